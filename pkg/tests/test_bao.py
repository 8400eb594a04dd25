import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from baode.bao import (
    FiniteBao,
    Morphism,
    Signature,
    compose,
    dimension_set,
    dual_cyl,
    find_algebra_isomorphism,
    full_monoid,
    generated_subalgebra,
    inverse,
    isomorphism_morphism,
    monoid_closure,
    preimage_in,
    replacement,
    subst_ij,
    upper_bound_in,
)
from baode.dilation import cs_dilation
from baode.errors import MorphismError, SignatureError
from baode.frames import complex_algebra, cylindric_set_frame
from baode.schema import check_schema, default_schema
from baode.terms import check_equation, parse_equation

from conftest import random_complex_algebra, two_point_frame

seeds = st.integers(0, 2**32 - 1)


def test_compose_applies_right_first():
    s, t = (1, 2, 0), (0, 0, 1)
    assert compose(s, t) == (s[0], s[0], s[1])
    assert compose(inverse(s), s) == (0, 1, 2)


def test_replacement_sends_i_to_j():
    assert replacement(3, 0, 2) == (2, 1, 2)


def test_monoid_closure_of_swap_and_replacement():
    assert monoid_closure([(1, 0)], 2) == ((0, 1), (1, 0))
    assert set(monoid_closure([(1, 0), (0, 0)], 2)) == set(full_monoid(2))


@pytest.mark.parametrize(
    "ts",
    [[(1, 0)], [(0, 1), (0, 1)], [(0, 1), (0, 2)], [(0, 1), (0, 0), (1, 0)]],
)
def test_signature_rejects_non_monoids(ts):
    with pytest.raises(SignatureError):
        Signature(2, ts)


def test_signature_full():
    sig = Signature(2)
    assert sig.is_full and len(sig.transformations) == 4
    assert Signature(2, [(1, 0), (0, 1)], True) == Signature(2, [(0, 1), (1, 0)], True)


def test_non_monoid_action_rejected():
    sig = Signature(2, [(0, 1), (1, 0)])
    # the swap must be an involution on atoms; a 3-cycle is not
    with pytest.raises(SignatureError):
        FiniteBao(3, sig, [[1, 2, 4], [1, 2, 4]], [[0, 1, 2], [1, 2, 0]], np.full((2, 2), 7))
    with pytest.raises(SignatureError):
        FiniteBao(2, sig, [[1, 2], [1, 2]], [[1, 0], [1, 0]], np.full((2, 2), 3))


def test_from_tables_validates_operators():
    sig = Signature(1, with_diagonals=False)
    ident = list(range(4))
    with pytest.raises(SignatureError):  # not normal
        FiniteBao.from_tables(2, sig, [[1, 1, 2, 3]], {(0,): ident})
    with pytest.raises(SignatureError):  # not additive
        FiniteBao.from_tables(2, sig, [[0, 3, 3, 1]], {(0,): ident})
    a = FiniteBao.from_tables(2, sig, [[0, 3, 3, 3]], {(0,): ident})
    assert a.c(0, 1) == 3


def test_dimension_set_examples(noncommuting):
    a = noncommuting
    assert dimension_set(a, 0) == frozenset()
    b = cs_dilation(2, 2, 2).small
    assert b.c(0, b.top) == b.top and dimension_set(b, b.top) == frozenset()
    one_way = complex_algebra(two_point_frame([(0, 1)]))
    assert one_way.c(0, 0b01) == 0b10
    assert 0 in dimension_set(one_way, 0b01)


def _cs_index(dim, base):
    return list(itertools.product(range(base), repeat=dim))


def test_subst_ij_examples():
    a = cs_dilation(2, 2, 2).small
    pts = _cs_index(2, 2)
    for x in range(16):
        assert subst_ij(a, 0, 0, x) == x
    assert subst_ij(a, 0, 1, 0) == 0
    # c_0(d_01 . {(0,0)}) by coordinates: sequences agreeing with (0,0) off 0
    want = sum(1 << k for k, p in enumerate(pts) if p[1] == 0)
    assert subst_ij(a, 0, 1, 1 << pts.index((0, 0))) == want == 0b0101


def test_subst_ij_needs_diagonals():
    sig = Signature(2, with_diagonals=False)
    a = FiniteBao(1, sig, [[1], [1]], [[0]] * 4)
    with pytest.raises(SignatureError):
        subst_ij(a, 0, 1, 1)


def test_dual_cyl_examples():
    a = complex_algebra(two_point_frame([(0, 1)]))
    assert dual_cyl(a, 0, a.top) == a.top
    assert dual_cyl(a, 0, 0b10) == 0b01


@given(seeds, st.integers(1, 2), st.integers(1, 4))
def test_dual_cyl_and_monotonicity(seed, dim, n):
    a = random_complex_algebra(seed, dim, n)
    xs = range(1 << n)
    for i in range(dim):
        for x in xs:
            assert dual_cyl(a, i, x) == a.top & ~a.c(i, a.top & ~x)
            for y in xs:
                if x & ~y == 0:
                    assert a.c(i, x) & ~a.c(i, y) == 0


@given(seeds, st.integers(1, 2), st.integers(1, 4))
def test_substitution_monoid_law_on_constructed_algebras(seed, dim, n):
    a = random_complex_algebra(seed, dim, n)
    e = parse_equation("(s (o sigma tau) x) = (s sigma (s tau x))")
    for s, t in itertools.product(a.sig.transformations, repeat=2):
        assert check_equation(a, e, binding={"sigma": s, "tau": t}).valid


@pytest.mark.parametrize("dim, base", [(2, 2), (2, 3), (3, 2)])
def test_dimension_set_of_substituted_element(dim, base):
    a = cs_dilation(dim, dim, base).small
    for i, j in itertools.product(range(dim), repeat=2):
        for x in a.elements().tolist():
            assert dimension_set(a, subst_ij(a, i, j, x)) <= (dimension_set(a, x) - {i}) | {j}


def test_spare_commute_fails_in_three_dimensional_set_algebra():
    """``c_m s_tau z = s_tau c_m z`` for spare ``m`` fixed by ``tau`` breaks when another index lands on ``m``."""
    a = complex_algebra(cylindric_set_frame(3, 2))
    rep = check_schema(a, default_schema().select(["spare-commute"]), small_dim=2)
    bad = {inst.label for inst, _ in rep.failures()}
    assert "spare-commute[m=2,tau=022]" in bad
    # every failing tau sends some other index onto m
    for inst, r in rep.failures():
        b = dict(inst.binding)
        assert any(b["tau"][i] == b["m"] for i in range(3) if i != b["m"])
        z = r.counterexample["z"]
        assert a.c(b["m"], a.s(b["tau"], z)) != a.s(b["tau"], a.c(b["m"], z))


def test_morphism_basics(noncommuting):
    a = noncommuting
    ident = Morphism.identity(a)
    assert ident.is_homomorphism() and ident.is_injective()
    swap = Morphism(a, a, [0b10, 0b01])
    assert swap.is_boolean_homomorphism()
    # the swap exchanges T_0 and T_1 direction, not an automorphism of operators
    assert not swap.is_homomorphism()
    assert swap.compose(swap).atom_images.tolist() == [1, 2]
    with pytest.raises(MorphismError):
        Morphism.from_table(a, a, [0, 1, 1, 3])


def brute_subalgebra(a, gens):
    """Close under all operations element by element."""
    S = {0, a.top} | {int(g) for g in gens}
    if a.diag is not None:
        S |= {int(v) for v in a.diag.ravel()}
    while True:
        new = set(S)
        for x in S:
            new.add(a.top & ~x)
            for i in range(a.dim):
                new.add(a.c(i, x))
            for t in a.sig.transformations:
                new.add(a.s(t, x))
            for y in S:
                new.add(x | y)
                new.add(x & y)
        if new == S:
            return S
        S = new


@given(seeds, st.integers(1, 2), st.integers(1, 4), st.lists(st.integers(0, 15), max_size=2))
def test_generated_subalgebra_matches_closure(seed, dim, n, gens):
    a = random_complex_algebra(seed, dim, n)
    gens = [g & a.top for g in gens]
    sub, incl = generated_subalgebra(a, gens)
    assert incl.is_homomorphism() and incl.is_injective()
    image = {int(v) for v in incl.apply(sub.elements())}
    assert image == brute_subalgebra(a, gens)
    for y in range(a.top + 1):
        z = upper_bound_in(incl, y)
        assert y & ~incl(z) == 0
        p = preimage_in(incl, y)
        assert (p is not None) == (y in image)


@given(seeds, st.integers(1, 2), st.integers(1, 4), st.randoms())
def test_isomorphism_search_finds_relabelling(seed, dim, n, r):
    a = random_complex_algebra(seed, dim, n)
    perm = list(range(n))
    r.shuffle(perm)
    # b is a with atom k renamed perm[k]
    m = isomorphism_morphism(a, a, perm)
    inv = inverse(perm)
    cyl = [[int(m(a.cyl[i, inv[q]])) for q in range(n)] for i in range(dim)]
    gm = [[perm[int(a.gmaps[t, inv[q]])] for q in range(n)] for t in range(len(a.sig.transformations))]
    diag = [[m(int(a.diag[i, j])) for j in range(dim)] for i in range(dim)]
    b = FiniteBao(n, a.sig, cyl, gm, diag)
    found = find_algebra_isomorphism(a, b)
    assert found is not None
    assert isomorphism_morphism(a, b, found).is_homomorphism()
