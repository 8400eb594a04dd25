"""Frames, complex algebras, atom structures and the maps between them.

A :class:`Frame` over a signature has one accessibility relation ``T[i]`` per
cylindrifier index, one relation ``S[t]`` per admitted transformation and,
with diagonals, one designated subset ``D[i, j]`` per index pair.  Relations
are boolean matrices, ``T[i][t, s]`` meaning ``(t, s) in T_i``.

For the complex algebra to have Boolean endomorphisms as substitutions, each
``S_tau`` must be the converse of the graph of a total function ``g_tau``:
``(t, s) in S_tau`` iff ``g_tau(s) == t``.  Then ``s_tau(X) = g_tau^-1[X]``.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .bao import FiniteBao, Morphism, Signature, _relational_isomorphism, images_from_gmap
from .boolean import FiniteBA
from .errors import ContainmentError, MorphismError, SignatureError, SizeError
from .terms import check_equation


def _bits(values, n):
    values = np.asarray(values, dtype=np.int64)
    return ((values[..., None] >> np.arange(n)) & 1).astype(bool)


def _masks(rows):
    rows = np.asarray(rows, dtype=np.int64)
    return (rows << np.arange(rows.shape[-1])).sum(axis=-1)


def _check_point(p, n):
    if isinstance(p, (bool, np.bool_)) or not isinstance(p, (int, np.integer)) or not 0 <= p < n:
        raise ContainmentError(f"{p!r} is not a point of a {n}-point universe")


class Frame:
    """A finite relational structure for a cylindric-polyadic signature."""

    def __init__(self, n, sig, T, S, D=None, labels=None):
        self.n = int(n)
        self.sig = sig
        M = len(sig.transformations)
        T = np.array(T, dtype=bool).reshape(sig.dim, self.n, self.n)
        S = np.array(S, dtype=bool).reshape(M, self.n, self.n)
        if sig.with_diagonals:
            if D is None:
                raise SignatureError("signature has diagonals but the frame has no D")
            D = np.array(D, dtype=bool).reshape(sig.dim, sig.dim, self.n)
        elif D is not None:
            raise SignatureError("diagonal sets given for a diagonal-free signature")
        for arr in (T, S) + ((D,) if D is not None else ()):
            arr.setflags(write=False)
        self.T, self.S, self.D = T, S, D
        self.labels = tuple(labels) if labels is not None else tuple(range(self.n))
        if len(self.labels) != self.n:
            raise SizeError("label count does not match the universe")

    @classmethod
    def from_functions(cls, n, sig, T, gmaps, D=None, labels=None):
        """Build with ``S_tau`` given by the functions ``g_tau`` (a dict ``tau -> list`` or an array)."""
        if isinstance(gmaps, dict):
            gmaps = [gmaps[t] for t in sig.transformations]
        gmaps = np.asarray(gmaps, dtype=np.int64).reshape(len(sig.transformations), n)
        S = np.zeros((len(sig.transformations), n, n), dtype=bool)
        for t in range(len(sig.transformations)):
            S[t, gmaps[t], np.arange(n)] = True
        return cls(n, sig, T, S, D, labels)

    @classmethod
    def from_pairs(cls, n, sig, T, S=None, D=None, labels=None):
        """Build from pair lists: ``T[i]`` and ``S[tau]`` are iterables of ``(t, s)``; ``D[(i, j)]`` of points.

        Missing ``S`` entries default to the identity function; missing ``D``
        entries default to the whole universe.
        """
        Tm = np.zeros((sig.dim, n, n), dtype=bool)
        for i, pairs in enumerate(T):
            for t, s in pairs:
                _check_point(t, n)
                _check_point(s, n)
                Tm[i, t, s] = True
        Sm = np.zeros((len(sig.transformations), n, n), dtype=bool)
        S = S or {}
        for k, tau in enumerate(sig.transformations):
            if tau in S:
                for t, s in S[tau]:
                    _check_point(t, n)
                    _check_point(s, n)
                    Sm[k, t, s] = True
            else:
                Sm[k] = np.eye(n, dtype=bool)
        Dm = None
        if sig.with_diagonals:
            Dm = np.ones((sig.dim, sig.dim, n), dtype=bool)
            for (i, j), pts in (D or {}).items():
                Dm[i, j] = False
                Dm[i, j, list(pts)] = True
        return cls(n, sig, Tm, Sm, Dm, labels)

    @property
    def dim(self):
        return self.sig.dim

    def points(self):
        return range(self.n)

    def gmaps(self):
        """The functions ``g_tau``; raises if some ``S_tau`` is not a converse function graph."""
        counts = self.S.sum(axis=1)
        bad = np.argwhere(counts != 1)
        if len(bad):
            t, s = bad[0]
            raise SignatureError(
                f"S_{self.sig.transformations[t]} is not the converse graph of a function: "
                f"point {s} has {counts[t, s]} predecessors"
            )
        return self.S.argmax(axis=1).astype(np.int64)

    def is_functional(self):
        return bool((self.S.sum(axis=1) == 1).all())

    def __eq__(self, other):
        return (
            isinstance(other, Frame)
            and self.n == other.n
            and self.sig == other.sig
            and np.array_equal(self.T, other.T)
            and all(
                np.array_equal(self.S[self.sig.tindex(t)], other.S[other.sig.tindex(t)])
                for t in self.sig.transformations
            )
            and (self.D is None) == (other.D is None)
            and (self.D is None or np.array_equal(self.D, other.D))
        )

    __hash__ = object.__hash__

    def __repr__(self):
        return f"<Frame points={self.n} dim={self.dim}>"

    def induced(self, points, labels=None):
        """The induced subframe on ``points`` (kept in the given order)."""
        idx = np.asarray(points, dtype=np.int64)
        T = self.T[:, idx][:, :, idx]
        S = self.S[:, idx][:, :, idx]
        D = self.D[:, :, idx] if self.D is not None else None
        if labels is None:
            labels = [self.labels[p] for p in idx]
        return Frame(len(idx), self.sig, T, S, D, labels)


@dataclass(frozen=True)
class FrameMorphism:
    """A map between frame universes, ``mapping[x]`` being the image of ``x``."""

    source: Frame
    target: Frame
    mapping: tuple

    def __post_init__(self):
        mp = tuple(int(v) for v in self.mapping)
        if len(mp) != self.source.n:
            raise MorphismError("frame map is not total on the source universe")
        if any(not 0 <= v < self.target.n for v in mp):
            raise MorphismError("frame map leaves the target universe")
        object.__setattr__(self, "mapping", mp)

    def __call__(self, x):
        return self.mapping[x]

    def matrix(self):
        P = np.zeros((self.source.n, self.target.n), dtype=bool)
        P[np.arange(self.source.n), list(self.mapping)] = True
        return P

    def is_surjective(self):
        return len(set(self.mapping)) == self.target.n

    def compose(self, other):
        """``self o other``."""
        return FrameMorphism(other.source, self.target, tuple(self.mapping[v] for v in other.mapping))


# ------------------------------------------------------------------ duality


def complex_algebra(F, name=None):
    """The powerset algebra of ``F`` with ``c_i X = {s : exists t in X, (t, s) in T_i}``."""
    if F.n < 1:
        raise SizeError("the complex algebra of an empty frame has no atoms")
    gm = F.gmaps()
    cyl = _masks(F.T)
    diag = _masks(F.D) if F.D is not None else None
    return FiniteBao(FiniteBA(F.n), F.sig, cyl, gm, diag, name)


def atom_structure(a):
    """The frame of atoms: ``(t, s) in T_i`` iff ``s <= c_i t``; ``(t, s) in S_tau`` iff ``s <= s_tau t``."""
    T = _bits(a.cyl, a.n)
    return Frame.from_functions(a.n, a.sig, T, a.gmaps, _bits(a.diag, a.n) if a.diag is not None else None)


def dual_map(h):
    """``h_+``: each atom ``u`` of the target goes to the atom ``a`` of the source with ``u <= h(a)``.

    Only requires ``h`` to be a Boolean homomorphism; this is the preimage of
    the principal ultrafilter of ``u``.
    """
    if not h.is_boolean_homomorphism():
        raise MorphismError("not a Boolean homomorphism; preimages of ultrafilters need not be ultrafilters")
    tgt_n = h.target.n
    mapping = [0] * tgt_n
    for a, img in enumerate(h.atom_images):
        for u in range(tgt_n):
            if (int(img) >> u) & 1:
                mapping[u] = a
    return FrameMorphism(atom_structure(h.target), atom_structure(h.source), tuple(mapping))


def dual_morphism(h):
    """``h_+`` for a homomorphism of algebras with operators (validated)."""
    fails = h.homomorphism_failures(limit=1)
    if fails:
        op, x = fails[0]
        raise MorphismError(f"not a homomorphism: fails to commute with {op}" + (f" at {x}" if x is not None else ""))
    return dual_map(h)


def complex_morphism(m):
    """``m^+``: the homomorphism ``Cm(target) -> Cm(source)`` taking ``X`` to ``m^-1[X]``."""
    src, tgt = complex_algebra(m.source), complex_algebra(m.target)
    return Morphism(tgt, src, images_from_gmap(np.asarray(m.mapping), m.target.n)), src, tgt


def bounded_morphism_failures(m, limit=None, back="predecessor"):
    """Failed forth/back/diagonal conditions of ``m`` as ``(kind, relation, point)`` triples.

    Forth: ``(x, y) in R`` gives ``(m x, m y) in R'``.  Because complex
    algebras take forward images, the back condition that matches them looks
    at predecessors: ``(z, m y) in R'`` needs some ``x`` with ``m x == z``
    and ``(x, y) in R``.  ``back="successor"`` selects the mirror-image
    condition instead (``(m x, z) in R'`` needs ``y`` with ``m y == z``).
    """
    if back not in ("predecessor", "successor"):
        raise ValueError(f"unknown back condition {back!r}")
    src, tgt = m.source, m.target
    out = []
    if src.sig != tgt.sig:
        return [("signature", None, None)]
    P = m.matrix().astype(np.int64)
    mp = np.asarray(m.mapping)
    rels = [(f"T_{i}", src.T[i], tgt.T[i]) for i in range(src.dim)]
    rels += [(f"S_{t}", src.S[k], tgt.S[tgt.sig.tindex(t)]) for k, t in enumerate(src.sig.transformations)]
    for name, R, R2 in rels:
        if back == "predecessor":
            R, R2 = R.T, R2.T
        Ri = R.astype(np.int64)
        image = (P.T @ Ri @ P) > 0
        forth = image & ~R2
        for x, _ in np.argwhere(forth):
            out.append(("forth", name, int(x)))
        reach = (Ri @ P) > 0
        missing = R2[mp] & ~reach
        for x in np.nonzero(missing.any(axis=1))[0]:
            out.append(("back", name, int(x)))
        if limit is not None and len(out) >= limit:
            return out[:limit]
    if src.D is not None:
        for i in range(src.dim):
            for j in range(src.dim):
                bad = src.D[i, j] != tgt.D[i, j][mp]
                for x in np.nonzero(bad)[0]:
                    out.append(("diagonal", f"D_{i}{j}", int(x)))
    return out if limit is None else out[:limit]


def is_bounded_morphism(m, back="predecessor"):
    return not bounded_morphism_failures(m, limit=1, back=back)


# ----------------------------------------------------------------- products


def product_frame(fs):
    """Direct product; the universe is the lexicographic product, relations and diagonals componentwise."""
    fs = list(fs)
    if not fs:
        raise SignatureError("product of no frames")
    sig = fs[0].sig
    for f in fs[1:]:
        if f.sig != sig:
            raise SignatureError("product factors have different signatures")
    T, S, D = fs[0].T, fs[0].S, fs[0].D
    for f in fs[1:]:
        T = np.array([np.kron(T[i], f.T[i]) for i in range(sig.dim)], dtype=bool)
        S = np.array(
            [np.kron(S[k], f.S[f.sig.tindex(t)]) for k, t in enumerate(sig.transformations)], dtype=bool
        )
        if D is not None:
            D = (D[:, :, :, None] & f.D[:, :, None, :]).reshape(sig.dim, sig.dim, -1)
    labels = list(itertools.product(*[range(f.n) for f in fs]))
    return Frame(len(labels), sig, T, S, D, labels)


def _product_index(coords, sizes):
    k = 0
    for c, s in zip(coords, sizes):
        k = k * s + c
    return k


def is_zigzag_product(s, fs, points=None):
    """Whether ``s`` is an induced substructure of the product of ``fs`` with onto projections.

    Points of ``s`` are read as coordinate tuples from ``points`` or, by
    default, from ``s.labels``.
    """
    fs = list(fs)
    sizes = [f.n for f in fs]
    pts = list(points) if points is not None else list(s.labels)
    for p in pts:
        if not (isinstance(p, tuple) and len(p) == len(fs) and all(0 <= c < n for c, n in zip(p, sizes))):
            raise ContainmentError(f"point {p!r} is not in the product universe")
    if len(set(pts)) != len(pts):
        raise ContainmentError("repeated product points")
    prod = product_frame(fs)
    idx = [_product_index(p, sizes) for p in pts]
    sub = prod.induced(idx, labels=pts)
    if not (sub == Frame(s.n, s.sig, s.T, s.S, s.D, pts)):
        return False
    return all({p[k] for p in pts} == set(range(fs[k].n)) for k in range(len(fs)))


@dataclass(frozen=True)
class Insep:
    """The pullback frame of two frame maps with its projections and checked postconditions."""

    frame: Frame
    left: FrameMorphism
    right: FrameMorphism
    zigzag: bool
    commutes: bool

    @property
    def degenerate(self):
        return not (self.zigzag and self.commutes)


def insep(f, h, check_bounded=True):
    """``{(x, y) in G x H : f(x) == h(y)}`` as an induced subframe of ``G x H``."""
    if not (f.target is h.target or f.target == h.target):
        raise MorphismError("INSEP needs two maps into the same frame")
    if check_bounded:
        for name, m in (("f", f), ("h", h)):
            fails = bounded_morphism_failures(m, limit=1)
            if fails:
                kind, rel, x = fails[0]
                raise MorphismError(f"{name} is not a bounded morphism ({kind} fails for {rel} at {x})")
    G, H = f.source, h.source
    pts = [(x, y) for x in range(G.n) for y in range(H.n) if f(x) == h(y)]
    prod = product_frame([G, H])
    fr = prod.induced([x * H.n + y for x, y in pts], labels=pts)
    left = FrameMorphism(fr, G, tuple(x for x, _ in pts))
    right = FrameMorphism(fr, H, tuple(y for _, y in pts))
    commutes = all(f(x) == h(y) for x, y in pts)
    zigzag = bool(pts) and is_zigzag_product(fr, [G, H])
    return Insep(fr, left, right, zigzag, commutes)


def str_membership(F, eqs):
    """Whether the complex algebra of ``F`` validates every equation in ``eqs``."""
    from .schema import Schema, satisfies

    if isinstance(eqs, Schema):
        return satisfies(complex_algebra(F), eqs)
    eqs = list(eqs)
    if not eqs:
        return True
    a = complex_algebra(F)
    return all(check_equation(a, e).valid for e in eqs)


# -------------------------------------------------------------- isomorphism


def find_frame_isomorphism(F, G):
    """A point bijection ``F -> G`` preserving every relation and diagonal set, or ``None``."""
    if F.n != G.n or F.sig != G.sig:
        return None
    rels1 = list(F.T) + [F.S[F.sig.tindex(t)] for t in sorted(F.sig.transformations)]
    rels2 = list(G.T) + [G.S[G.sig.tindex(t)] for t in sorted(G.sig.transformations)]
    preds1 = list(F.D.reshape(-1, F.n)) if F.D is not None else []
    preds2 = list(G.D.reshape(-1, G.n)) if G.D is not None else []
    return _relational_isomorphism(F.n, rels1, rels2, preds1, preds2)


def frames_isomorphic(F, G):
    return find_frame_isomorphism(F, G) is not None


# --------------------------------------------------------- concrete frames


def cylindric_set_frame(dim, base_size, transformations=None, with_diagonals=True):
    """The frame of ``dim``-sequences over ``base_size`` points.

    ``T_i`` relates sequences that agree off ``i``, ``g_tau(y) = y o tau`` and
    ``D_ij`` holds the sequences with ``y_i == y_j``.  Its complex algebra is
    the full cylindric-polyadic set algebra.
    """
    sig = Signature(dim, transformations, with_diagonals)
    pts = list(itertools.product(range(base_size), repeat=dim))
    n = len(pts)
    index = {p: k for k, p in enumerate(pts)}
    arr = np.array(pts, dtype=np.int64).reshape(n, dim)
    T = np.zeros((dim, n, n), dtype=bool)
    for i in range(dim):
        others = [k for k in range(dim) if k != i]
        T[i] = (arr[:, None, others] == arr[None, :, others]).all(axis=2)
    gmaps = np.array([[index[tuple(p[t] for t in tau)] for p in pts] for tau in sig.transformations], dtype=np.int64)
    D = None
    if with_diagonals:
        D = arr.T[:, None, :] == arr.T[None, :, :]
    return Frame.from_functions(n, sig, T, gmaps, D, labels=pts)
