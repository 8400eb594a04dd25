import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from baode.bao import Signature, find_algebra_isomorphism
from baode.errors import SizeError
from baode.frames import is_bounded_morphism
from baode.generators import (
    automorphisms,
    canonical_key,
    embeddings,
    enumerate_algebras,
    enumerate_algebras_unpruned,
    enumerate_instances,
    monoid_actions,
    random_frame,
    random_instance,
    random_valid_algebra,
    surjective_bounded_morphism,
)
from baode.schema import default_positive_schema, satisfies, schema_from_dict

seeds = st.integers(0, 2**32 - 1)


@pytest.mark.parametrize("dim, n", [(1, 1), (1, 2), (2, 1)])
def test_pruned_enumeration_matches_unpruned(dim, n):
    schema = default_positive_schema()
    pruned = enumerate_algebras(dim, n)
    plain = enumerate_algebras_unpruned(dim, n, schema)
    assert sorted(map(canonical_key, pruned)) == sorted(map(canonical_key, plain))
    assert all(satisfies(a, schema) for a in pruned)


def test_enumeration_is_up_to_isomorphism():
    algs = enumerate_algebras(1, 3)
    for i, a in enumerate(algs):
        for b in algs[i + 1 :]:
            assert find_algebra_isomorphism(a, b) is None
    assert len({canonical_key(a) for a in algs}) == len(algs)


def test_monoid_actions_are_actions():
    sig = Signature(2)
    for gm in monoid_actions(sig, 2):
        gm = np.asarray(gm)
        for s in sig.transformations:
            for t in sig.transformations:
                st_ = tuple(s[t[i]] for i in range(2))
                # s_s s_t = s_(s o t) with s_tau X = g_tau^-1[X]: g_(s o t) = g_t o g_s
                assert np.array_equal(gm[sig.tindex(st_)], gm[sig.tindex(t)][gm[sig.tindex(s)]])


def test_embeddings_and_automorphisms():
    one = enumerate_algebras(1, 1)
    two = enumerate_algebras(1, 2)
    for a in one:
        for b in two:
            for e in embeddings(a, b):
                assert e.is_homomorphism() and e.is_injective()
    assert embeddings(two[0], one[0]) == []
    trivial = next(a for a in two if not a.cyl.any() or (a.cyl == [1, 2]).all())
    assert (0, 1) in automorphisms(trivial)


def test_enumerate_instances_small():
    inst = enumerate_instances(1, 2)
    assert len(inst) == 43
    for f, h in inst:
        assert f.source is h.source
        assert f.is_injective() and h.is_injective()


@given(seeds, st.integers(1, 2), st.integers(1, 3))
@settings(max_examples=20)
def test_random_valid_algebra_satisfies_schema(seed, dim, n):
    rng = np.random.default_rng(seed)
    a = random_valid_algebra(rng, dim, n)
    assert a.n == n and a.dim == dim
    assert satisfies(a, default_positive_schema())


def test_random_valid_algebra_gives_up():
    impossible = schema_from_dict({"equations": ["x = 0"]})
    with pytest.raises(SizeError):
        random_valid_algebra(np.random.default_rng(0), 1, 2, impossible, tries=50)


@given(seeds)
@settings(max_examples=20)
def test_random_instance_embeds(seed):
    rng = np.random.default_rng(seed)
    pool = [random_valid_algebra(rng, 2, int(rng.integers(1, 3))) for _ in range(2)]
    f, h = random_instance(rng, pool)
    assert f.is_homomorphism() and h.is_homomorphism()
    assert f.is_injective() and h.is_injective()
    assert satisfies(f.source, default_positive_schema())


@given(seeds, st.integers(1, 3))
def test_surjective_bounded_morphism(seed, n):
    rng = np.random.default_rng(seed)
    F = random_frame(rng, Signature(2), n)
    m = surjective_bounded_morphism(rng, F)
    assert m.target is F and m.is_surjective() and is_bounded_morphism(m)


def test_unreduced_instances_count_every_pair():
    algs = [a for n in (1, 2) for a in enumerate_algebras(1, n)]
    want = sum(sum(len(embeddings(A, B)) for B in algs) ** 2 for A in algs)
    assert len(enumerate_instances(1, 2, up_to_iso=False)) == want


def test_instance_stream_is_a_prefix():
    from baode.generators import iter_algebras, iter_instances

    algs = [a for n in (1, 2) for a in enumerate_algebras(1, n)]
    small = enumerate_instances(1, 2, algebras=algs[:5])
    stream = iter_instances(iter(algs))
    prefix = [next(stream) for _ in range(len(small))]
    key = lambda fh: (fh[0].atom_images.tolist(), fh[1].atom_images.tolist(), fh[0].target.n, fh[1].target.n)
    assert sorted(map(key, prefix)) == sorted(map(key, small))
    assert len(prefix) + len(list(stream)) == 43
    with pytest.raises(SizeError):
        list(iter_instances(iter(algs[::-1])))
    assert sum(1 for _ in iter_algebras(1, 2)) == len(enumerate_algebras(1, 2))
