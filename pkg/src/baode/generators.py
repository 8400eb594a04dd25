"""Exhaustive and random corpora of frames, algebras, morphisms and instances.

Exhaustive enumeration works up to isomorphism: every structure is reduced
to a canonical key, the least encoding over all relabellings of its points.
Random generators take a ``numpy.random.Generator`` so campaigns replay
exactly from a seed.
"""

import itertools
from functools import lru_cache

import numpy as np

from .bao import FiniteBao, Morphism, Signature, generated_subalgebra, identity
from .boolean import FiniteBA
from .errors import SizeError
from .frames import Frame, FrameMorphism, complex_algebra, is_bounded_morphism
from .schema import default_positive_schema, satisfies

# ------------------------------------------------------------ monoid actions


@lru_cache(maxsize=None)
def _monoid_actions_cached(dim, transformations, n):
    sig = Signature(dim, transformations, with_diagonals=False)
    M = len(sig.transformations)
    ident = sig.index[identity(dim)]
    others = [t for t in range(M) if t != ident]
    funcs = np.array(list(itertools.product(range(n), repeat=n)), dtype=np.int64).reshape(-1, n)
    out = []
    gm = np.zeros((M, n), dtype=np.int64)
    gm[ident] = np.arange(n)
    comp = sig.composition

    def consistent(upto):
        # check the action law on every pair whose three entries are assigned
        assigned = set(upto) | {ident}
        for s in assigned:
            for t in assigned:
                st = int(comp[s, t])
                if st in assigned and not np.array_equal(gm[t][gm[s]], gm[st]):
                    return False
        return True

    def search(k):
        if k == len(others):
            out.append(gm.copy())
            return
        t = others[k]
        for f in funcs:
            gm[t] = f
            if consistent(others[: k + 1]):
                search(k + 1)

    search(0)
    return tuple(out)


def monoid_actions(sig, n):
    """Every family of point maps ``g_tau`` on ``n`` points that is an action of the signature's monoid."""
    return [a.copy() for a in _monoid_actions_cached(sig.dim, sig.transformations, n)]


# --------------------------------------------------------------- canonical keys


def _encode(cyl, gmaps, diag, perm, n):
    inv = np.empty(n, dtype=np.int64)
    inv[list(perm)] = np.arange(n)

    def remap_mask(m):
        out = 0
        for b in range(n):
            if (int(m) >> b) & 1:
                out |= 1 << perm[b]
        return out

    c = tuple(tuple(remap_mask(cyl[i, inv[q]]) for q in range(n)) for i in range(cyl.shape[0]))
    g = tuple(tuple(int(perm[gmaps[t, inv[q]]]) for q in range(n)) for t in range(gmaps.shape[0]))
    d = () if diag is None else tuple(remap_mask(v) for v in np.asarray(diag).ravel())
    return (c, g, d)


def canonical_key(a):
    """Least encoding of ``a`` over all atom relabellings; equal keys iff isomorphic."""
    gm = np.array([a.gmaps[a.sig.tindex(t)] for t in sorted(a.sig.transformations)])
    return min(_encode(a.cyl, gm, a.diag, perm, a.n) for perm in itertools.permutations(range(a.n)))


# ------------------------------------------------------------ algebra corpus


def _per_index_cyl_candidates(n, check):
    """Atom-image vectors for one cylindrifier that pass ``check``."""
    out = []
    for imgs in itertools.product(range(1 << n), repeat=n):
        arr = np.array(imgs, dtype=np.int64)
        if check(arr):
            out.append(arr)
    return out


def _meet_closed(n):
    """``c(cx . y) = cx . cy`` for a single additive ``c`` given by atom images."""
    from ._kernels import additive_table

    xs = np.arange(1 << n, dtype=np.int64)

    def check(imgs):
        tab = additive_table(imgs)
        cx = tab[xs]
        lhs = tab[cx[:, None] & xs[None, :]]
        rhs = cx[:, None] & tab[xs][None, :]
        return bool((lhs == rhs).all())

    return check


def _diag_ok(n, cyl_i, g_rep, d):
    """``s_[i/j] x = c_i(d_ij . x)`` on atoms."""
    for p in range(n):
        pre = 0
        for q in range(n):
            if g_rep[q] == p:
                pre |= 1 << q
        rhs = int(cyl_i[p]) if (d >> p) & 1 else 0
        if pre != rhs:
            return False
    return True


def enumerate_algebras(dim, n, schema=None, with_diagonals=True, up_to_iso=True):
    """Every algebra on ``n`` atoms over the full ``dim`` signature satisfying ``schema``.

    Defaults to the default positive schema.  When the schema contains
    ``c-meet-closed`` or ``s-ij-diagonal``, cylindrifier and diagonal
    candidates are pruned by those laws first; the full schema check is
    always the final filter.
    """
    return list(iter_algebras(dim, n, schema, with_diagonals, up_to_iso))


def iter_algebras(dim, n, schema=None, with_diagonals=True, up_to_iso=True):
    """:func:`enumerate_algebras` as a generator."""
    schema = default_positive_schema() if schema is None else schema
    names = set(schema.names())
    sig = Signature.full(dim, with_diagonals)
    prune_c = "c-meet-closed" in names
    prune_d = "s-ij-diagonal" in names
    cands = _per_index_cyl_candidates(n, _meet_closed(n) if prune_c else lambda _: True)
    actions = monoid_actions(sig, n)
    seen = set()
    all_masks = range(1 << n)
    for gm in actions:
        for cyl in itertools.product(cands, repeat=dim):
            cyl = np.array(cyl, dtype=np.int64)
            if with_diagonals:
                pools = []
                for i in range(dim):
                    for j in range(dim):
                        if i != j and prune_d:
                            rep = gm[sig.index[tuple(j if k == i else k for k in range(dim))]]
                            pools.append([d for d in all_masks if _diag_ok(n, cyl[i], rep, d)])
                        else:
                            pools.append(list(all_masks))
                diags = itertools.product(*pools)
            else:
                diags = [None]
            for diag in diags:
                d = None if diag is None else np.array(diag, dtype=np.int64).reshape(dim, dim)
                a = FiniteBao(FiniteBA(n), sig, cyl, gm, d)
                if not satisfies(a, schema):
                    continue
                if up_to_iso:
                    key = canonical_key(a)
                    if key in seen:
                        continue
                    seen.add(key)
                yield a


def enumerate_algebras_unpruned(dim, n, schema, with_diagonals=True, up_to_iso=True):
    """Like :func:`enumerate_algebras` with no pruning; only for tiny sizes."""
    sig = Signature.full(dim, with_diagonals)
    seen = set()
    out = []
    for gm in monoid_actions(sig, n):
        for cyl in itertools.product(range(1 << n), repeat=dim * n):
            for diag in itertools.product(range(1 << n), repeat=dim * dim) if with_diagonals else [None]:
                d = None if diag is None else np.array(diag).reshape(dim, dim)
                a = FiniteBao(FiniteBA(n), sig, np.array(cyl).reshape(dim, n), gm, d)
                if not satisfies(a, schema):
                    continue
                if up_to_iso:
                    key = canonical_key(a)
                    if key in seen:
                        continue
                    seen.add(key)
                out.append(a)
    return out


# -------------------------------------------------------------- embeddings


def _partitions_into(n, k):
    """Ordered lists of ``k`` nonempty disjoint masks covering ``n`` atoms."""
    for labels in itertools.product(range(k), repeat=n):
        if len(set(labels)) != k:
            continue
        masks = [0] * k
        for atom, lab in enumerate(labels):
            masks[lab] |= 1 << atom
        yield masks


def embeddings(a, b):
    """Every injective homomorphism ``a -> b``."""
    if a.sig != b.sig or a.n > b.n:
        return []
    out = []
    for masks in _partitions_into(b.n, a.n):
        m = Morphism(a, b, masks)
        if m.is_homomorphism():
            out.append(m)
    return out


def automorphisms(a):
    out = []
    for perm in itertools.permutations(range(a.n)):
        m = Morphism(a, a, [1 << p for p in perm])
        if m.is_homomorphism():
            out.append(perm)
    return out


def _instance_key(f, h):
    """Invariant of an instance under automorphisms of the base and swapping the sides."""
    A = f.source
    keys = []
    for perm in automorphisms(A):
        fi = tuple(int(f.atom_images[p]) for p in perm)
        hi = tuple(int(h.atom_images[p]) for p in perm)
        keys.append((fi, hi))
        keys.append((hi, fi))
    return min(keys)


def enumerate_instances(dim, max_atoms, schema=None, up_to_iso=True, algebras=None):
    """All ``(f, h)`` embedding pairs of a common base with every algebra of at most ``max_atoms`` atoms.

    Isomorphism of instances is taken with ``A``, ``B`` and ``C`` drawn from
    the isomorphism-reduced corpus, ``B`` and ``C`` unordered, and embeddings
    identified modulo automorphisms of ``A`` and of ``B`` and ``C``.
    """
    if algebras is None:
        algebras = (a for n in range(1, max_atoms + 1) for a in iter_algebras(dim, n, schema))
    return list(iter_instances(algebras, up_to_iso))


def iter_instances(algebras, up_to_iso=True):
    """The instances of :func:`enumerate_instances`, produced as ``algebras`` streams in.

    ``algebras`` must come in nondecreasing atom count.  After each new
    algebra ``X`` every instance whose larger side is ``X`` is yielded, so a
    consumer can stop at any point with a complete prefix of the corpus.
    """
    corpus = []
    emb_cache = {}
    seen = {}

    def emb(ia, ib):
        if (ia, ib) not in emb_cache:
            es = embeddings(corpus[ia], corpus[ib])
            if up_to_iso and es:
                es = _reduce_by_target_automorphisms(es, corpus[ib])
            emb_cache[ia, ib] = es
        return emb_cache[ia, ib]

    for X in algebras:
        if corpus and X.n < corpus[-1].n:
            raise SizeError("algebras must arrive in nondecreasing atom count")
        corpus.append(X)
        ic = len(corpus) - 1
        for ia in range(ic + 1):
            done = seen.setdefault(ia, set())
            for ib in range(ic + 1):
                pairs = [(ib, ic)] if up_to_iso or ib == ic else [(ib, ic), (ic, ib)]
                for jb, jc in pairs:
                    for f in emb(ia, jb):
                        for h in emb(ia, jc):
                            if up_to_iso:
                                key = (jb, jc, _instance_key(f, h) if jb == jc else _one_sided_key(f, h, jb, jc))
                                if key in done:
                                    continue
                                done.add(key)
                            yield f, h


def _one_sided_key(f, h, ib, ic):
    A = f.source
    keys = []
    for perm in automorphisms(A):
        fi = tuple(int(f.atom_images[p]) for p in perm)
        hi = tuple(int(h.atom_images[p]) for p in perm)
        keys.append((fi, hi) if ib <= ic else (hi, fi))
    return min(keys)


def _reduce_by_target_automorphisms(es, B):
    """Keep one embedding per orbit under automorphisms of the target."""
    auts = automorphisms(B)
    seen = set()
    out = []
    for e in es:
        orbit = []
        for perm in auts:
            imgs = []
            for m in e.atom_images:
                r = 0
                for b in range(B.n):
                    if (int(m) >> b) & 1:
                        r |= 1 << perm[b]
                imgs.append(r)
            orbit.append(tuple(imgs))
        key = min(orbit)
        if key not in seen:
            seen.add(key)
            out.append(e)
    return out


# ------------------------------------------------------------- random frames


def random_frame(rng, sig, n, density=0.4, functional=True):
    """A random frame; ``S`` comes from a random monoid action when ``functional``."""
    T = rng.random((sig.dim, n, n)) < density
    D = rng.random((sig.dim, sig.dim, n)) < 0.5 if sig.with_diagonals else None
    if functional:
        acts = monoid_actions(sig, n)
        gm = acts[rng.integers(len(acts))]
        return Frame.from_functions(n, sig, T, gm, D)
    S = rng.random((len(sig.transformations), n, n)) < density
    return Frame(n, sig, T, S, D)


def random_algebra(rng, sig, n, density=0.4):
    return complex_algebra(random_frame(rng, sig, n, density))


def random_boolean_morphism(rng, a, b, homomorphism_bias=0.5):
    """A random Boolean homomorphism ``a -> b``, or with some probability any additive map."""
    if rng.random() < homomorphism_bias:
        labels = rng.integers(a.n, size=b.n)
        imgs = [0] * a.n
        for atom, lab in enumerate(labels):
            imgs[lab] |= 1 << atom
        return Morphism(a, b, imgs)
    return Morphism(a, b, rng.integers(0, b.top + 1, size=a.n))


def surjective_bounded_morphism(rng, target, extra=2, density=0.5):
    """A random frame ``G`` with a surjective bounded morphism onto ``target``.

    ``G`` is built over ``target x C`` for a random frame ``C`` with a
    constant-free signature action, and the first projection is the map;
    fibres are then thinned to random nonempty subsets closed enough for the
    back condition, retried until bounded.
    """
    sig = target.sig
    for _ in range(200):
        m = int(rng.integers(1, extra + 1))
        C = random_frame(rng, sig, m, density)
        if C.D is not None:
            C = Frame(C.n, sig, C.T, C.S, np.ones_like(C.D))
        G = _product2(target, C)
        keep = _random_closed_subset(rng, G, target)
        if keep is None:
            continue
        sub = G.induced(keep)
        proj = FrameMorphism(sub, target, tuple(G.labels[p][0] for p in keep))
        if proj.is_surjective() and is_bounded_morphism(proj):
            return proj
    # the identity always works
    return FrameMorphism(target, target, tuple(range(target.n)))


def _product2(F, C):
    from .frames import product_frame

    return product_frame([F, C])


def _random_closed_subset(rng, G, F):
    """A random subset of ``G`` closed under every ``g_tau`` whose first projection is onto."""
    gm = G.gmaps()
    pts = [p for p in range(G.n) if rng.random() < 0.7]
    keep = set(pts)
    changed = True
    while changed:
        changed = False
        for p in list(keep):
            for t in range(gm.shape[0]):
                q = int(gm[t, p])
                if q not in keep:
                    keep.add(q)
                    changed = True
    if {G.labels[p][0] for p in keep} != set(range(F.n)):
        return None
    return sorted(keep)


def random_subalgebra_embedding(rng, a, gens=1):
    """A subalgebra of ``a`` generated by random elements, with its inclusion."""
    g = [int(rng.integers(0, a.top + 1)) for _ in range(gens)]
    return generated_subalgebra(a, g)


# ------------------------------------------------- random schema-valid models


@lru_cache(maxsize=None)
def _cyl_candidates(n):
    return tuple(_per_index_cyl_candidates(n, _meet_closed(n)))


def _draw_algebra(rng, sig, n):
    """One draw from the pruned search space of :func:`enumerate_algebras`, or ``None``."""
    dim = sig.dim
    acts = monoid_actions(sig, n)
    cands = _cyl_candidates(n)
    gm = acts[rng.integers(len(acts))]
    cyl = np.array([cands[rng.integers(len(cands))] for _ in range(dim)], dtype=np.int64)
    diag = None
    if sig.with_diagonals:
        diag = np.zeros((dim, dim), dtype=np.int64)
        for i in range(dim):
            for j in range(dim):
                if i == j:
                    diag[i, j] = rng.integers(1 << n)
                    continue
                rep = gm[sig.index[tuple(j if k == i else k for k in range(dim))]]
                pool = [d for d in range(1 << n) if _diag_ok(n, cyl[i], rep, d)]
                if not pool:
                    return None
                diag[i, j] = pool[rng.integers(len(pool))]
    return FiniteBao(FiniteBA(n), sig, cyl, gm, diag)


def random_valid_algebra(rng, dim, n, schema=None, tries=200000, with_diagonals=True):
    """Rejection-sample an ``n``-atom model of ``schema`` (default positive schema)."""
    schema = default_positive_schema() if schema is None else schema
    sig = Signature.full(dim, with_diagonals)
    for _ in range(tries):
        a = _draw_algebra(rng, sig, n)
        if a is not None and satisfies(a, schema):
            return a
    raise SizeError(f"no model of the schema on {n} atoms found in {tries} draws")


def random_instance(rng, pool, tries=1000):
    """A random ``(f, h)``: ``A`` is a random subalgebra of a pool member ``B``, ``C`` a pool member ``A`` embeds in.

    Subalgebras of models are models, so every instance stays inside the
    schema's variety.
    """
    for _ in range(tries):
        B = pool[rng.integers(len(pool))]
        A, f = random_subalgebra_embedding(rng, B, int(rng.integers(0, 2)))
        order = rng.permutation(len(pool))
        for ic in order:
            es = embeddings(A, pool[ic])
            if es:
                return f, es[rng.integers(len(es))]
    raise SizeError("no random instance found")
