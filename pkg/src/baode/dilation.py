"""Transformation systems, neat reducts, dilations and Henkin-style witnesses.

Everything here is finite.  A dilation of an ``alpha``-dimensional algebra is
a ``beta``-dimensional algebra into whose neat ``alpha``-reduct it embeds;
the concrete dilations used throughout are cylindric set algebras, where
``X`` lifts to ``{y : y restricted to alpha is in X}``.

Witness indices ("fresh variables") are always taken from ``beta \\ alpha``
and chosen least-first, so every construction is deterministic.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .bao import (
    FiniteBao,
    Morphism,
    Signature,
    dimension_set,
    full_monoid,
    generated_subalgebra,
    identity,
    inverse,
    replacement,
    upper_bound_in,
)
from .boolean import FiniteBA, Filter, extend_to_ultrafilter
from .errors import (
    ClosureError,
    DimensionBudgetError,
    MapError,
    MorphismError,
    PropernessError,
    SignatureError,
    SizeError,
    WellDefinednessError,
    WitnessClaimError,
    WitnessIndexError,
)
from .frames import complex_algebra, cylindric_set_frame

MAX_FUNCTION_POINTS = 10_000

# ------------------------------------------------------ transformation systems


class TransformationSystem:
    """Functions from ``dim``-sequences over ``base_size`` points into an algebra's elements.

    A function is an ``int64`` array indexed by the sequences in lexicographic
    order; Boolean operations act pointwise and ``(s_tau f)(x) = f(x o tau)``.
    """

    def __init__(self, base_size, values, dim):
        npts = base_size**dim
        if npts > MAX_FUNCTION_POINTS:
            raise SizeError(f"{base_size}^{dim} = {npts} points exceed {MAX_FUNCTION_POINTS}")
        self.base_size = base_size
        self.values = values
        self.dim = dim
        self.points = list(itertools.product(range(base_size), repeat=dim))
        self.index = {p: k for k, p in enumerate(self.points)}
        self._pull = {}

    @property
    def top(self):
        return np.full(len(self.points), self.values.top, dtype=np.int64)

    def constant(self, v):
        return np.full(len(self.points), int(v), dtype=np.int64)

    def join(self, f, g):
        return f | g

    def meet(self, f, g):
        return f & g

    def neg(self, f):
        return self.values.top ^ f

    def pullback(self, tau):
        """Index array ``P`` with ``P[x] = index(x o tau)``."""
        tau = tuple(tau)
        if tau not in self._pull:
            if len(tau) != self.dim or any(not 0 <= t < self.dim for t in tau):
                raise SignatureError(f"{tau} is not a transformation of {self.dim}")
            self._pull[tau] = np.array([self.index[tuple(p[t] for t in tau)] for p in self.points], dtype=np.int64)
        return self._pull[tau]

    def subst(self, tau, f):
        return np.asarray(f)[self.pullback(tau)]

    def random_function(self, rng):
        return rng.integers(0, self.values.top + 1, size=len(self.points)).astype(np.int64)

    def carrier_size(self):
        return self.values.size ** len(self.points)


def full_function_system(base_size, a, dim):
    """All functions from ``dim``-sequences over ``base_size`` points into ``a``."""
    return TransformationSystem(base_size, a, dim)


@dataclass(frozen=True)
class SystemMap:
    """An element map into a transformation system, stored as a table over source elements."""

    source: object
    system: TransformationSystem
    table: np.ndarray

    def __call__(self, p):
        return self.table[int(p)]

    def is_injective(self):
        rows = {tuple(r) for r in self.table.tolist()}
        return len(rows) == len(self.table)


def embed_H(a):
    """``H(p)(x) = s_x p`` for ``x`` ranging over all transformations of ``a``'s dimension."""
    if not a.sig.is_full:
        raise SignatureError("H needs every transformation of the dimension")
    ts = full_function_system(a.dim, a, a.dim)
    xs = a.elements()
    table = np.empty((len(xs), len(ts.points)), dtype=np.int64)
    for k, x in enumerate(ts.points):
        table[:, k] = a.subst_apply(x, xs)
    return SystemMap(a, ts, table)


def dilate_K(ts, beta):
    """The system over ``beta``-sequences and ``K(f)(y) = f(y restricted to alpha)``, as ``(system, K)``."""
    if beta < ts.dim:
        raise SizeError("cannot dilate to a smaller dimension")
    big = TransformationSystem(ts.base_size, ts.values, beta)
    restrict = np.array([ts.index[p[: ts.dim]] for p in big.points], dtype=np.int64)

    def K_(f):
        return np.asarray(f)[restrict]

    return big, K_


def extend_transformation(tau, beta):
    """``tau`` on its own dimension, the identity above it."""
    return tuple(tau) + tuple(range(len(tau), beta))


# ---------------------------------------------------------------- supports


def supports(b, J, p):
    """Whether ``s_sigma1 p == s_sigma2 p`` for all admitted ``sigma1, sigma2`` agreeing on ``J``."""
    J = sorted(set(J))
    groups = {}
    p = np.array([int(p)], dtype=np.int64)
    for t, sigma in enumerate(b.sig.transformations):
        key = tuple(sigma[j] for j in J)
        v = int(b.subst_apply_index(t, p)[0])
        if groups.setdefault(key, v) != v:
            return False
    return True


def _support_classes(b, J):
    """Atom classes whose unions are exactly the elements supported by ``J``.

    ``s_sigma1 p == s_sigma2 p`` iff ``p`` never separates ``g_sigma1(x)`` from
    ``g_sigma2(x)``; the classes are the equivalence those pairs generate.
    """
    J = sorted(set(J))
    parent = list(range(b.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    first = {}
    for t, sigma in enumerate(b.sig.transformations):
        key = tuple(sigma[j] for j in J)
        if key not in first:
            first[key] = t
            continue
        g1, g2 = b.gmaps[first[key]], b.gmaps[t]
        for x in range(b.n):
            r1, r2 = find(int(g1[x])), find(int(g2[x]))
            if r1 != r2:
                parent[r1] = r2
    classes = {}
    for x in range(b.n):
        classes.setdefault(find(x), 0)
        classes[find(x)] |= 1 << x
    return sorted(classes.values(), key=lambda m: m & -m)


def supported_elements(b, J):
    classes = np.array(_support_classes(b, J), dtype=np.int64)
    idx = np.arange(1 << len(classes), dtype=np.int64)
    return np.sort(K.apply_additive(classes, idx))


def _is_union(blocks, y):
    return all((blk & y) in (0, blk) for blk in blocks)


def neat_reduct_embedding(b, J):
    """``Nr_J b`` with its atoms given as elements of ``b``, as ``(algebra, blocks)``."""
    J = sorted(set(J))
    if not J:
        raise SignatureError("neat reduct needs a nonempty index set")
    for j in J:
        b.sig.check_index(j)
    blocks = _support_classes(b, J)
    arr = np.array(blocks, dtype=np.int64)
    for k, j in enumerate(J):
        for y in b.cyl_apply(j, arr):
            if not _is_union(blocks, int(y)):
                raise ClosureError(f"supported elements not closed under c_{j}")
    sub_ts = []
    for tau in full_monoid(len(J)):
        full = list(range(b.dim))
        for k, j in enumerate(J):
            full[j] = J[tau[k]]
        full = tuple(full)
        if full not in b.sig.index:
            continue
        for y in b.subst_apply(full, arr):
            if not _is_union(blocks, int(y)):
                raise ClosureError(f"supported elements not closed under s_{full}")
        sub_ts.append((tau, full))
    diag = None
    if b.sig.with_diagonals:
        diag = np.zeros((len(J), len(J)), dtype=np.int64)
        for a_, i in enumerate(J):
            for c_, j in enumerate(J):
                d = b.d(i, j)
                if not _is_union(blocks, d):
                    raise ClosureError(f"d_{i}{j} is not supported by {J}")
                diag[a_, c_] = _encode(blocks, d)
    sig = Signature(len(J), [t for t, _ in sub_ts], b.sig.with_diagonals)
    cyl = np.array([[_encode(blocks, int(v)) for v in b.cyl_apply(j, arr)] for j in J], dtype=np.int64)
    gmaps = np.empty((len(sig.transformations), len(blocks)), dtype=np.int64)
    for tau, full in sub_ts:
        imgs = [_encode(blocks, int(v)) for v in b.subst_apply(full, arr)]
        gmaps[sig.tindex(tau)] = _gmap_of(imgs, len(blocks))
    return FiniteBao(FiniteBA(len(blocks)), sig, cyl, gmaps, diag, name=f"Nr_{J}"), arr


def _encode(blocks, y):
    return sum(1 << k for k, blk in enumerate(blocks) if blk & y)


def _gmap_of(images, n):
    g = np.empty(n, dtype=np.int64)
    for a_, img in enumerate(images):
        for b_ in range(n):
            if (img >> b_) & 1:
                g[b_] = a_
    return g


def neat_reduct(b, J):
    """The algebra of elements supported by ``J``, with index ``J[k]`` renamed ``k``."""
    return neat_reduct_embedding(b, J)[0]


def rename_dilation(a, mu):
    """Reindex ``a`` along a bijection ``mu`` from the new indices onto the old ones.

    ``c_i`` becomes ``c_mu(i)``, ``s_tau`` becomes ``s_(mu tau mu^-1)`` and
    ``d_ij`` becomes ``d_mu(i)mu(j)``.
    """
    mu = tuple(int(m) for m in mu)
    if sorted(mu) != list(range(a.dim)):
        raise MapError(f"{mu} is not a bijection onto {a.dim}")
    inv = inverse(mu)
    ts = []
    gm = []
    for tau in a.sig.transformations:
        # new tau' with mu tau' mu^-1 = tau, i.e. tau' = mu^-1 tau mu
        new = tuple(inv[tau[mu[i]]] for i in range(a.dim))
        ts.append(new)
        gm.append(a.gmaps[a.sig.tindex(tau)])
    sig = Signature(a.dim, ts, a.sig.with_diagonals)
    gmaps = np.array([gm[ts.index(t)] for t in sig.transformations])
    cyl = np.array([a.cyl[mu[i]] for i in range(a.dim)])
    diag = None
    if a.diag is not None:
        diag = np.array([[a.diag[mu[i], mu[j]] for j in range(a.dim)] for i in range(a.dim)])
    return FiniteBao(a.ba, sig, cyl, gmaps, diag, name=a.name)


# -------------------------------------------------------------- dilations


class DilationPair:
    """``small`` (dimension ``alpha``) embedded into the neat ``alpha``-reduct of ``big``.

    ``embedding`` holds the images in ``big`` of the atoms of ``small``.
    ``adm`` is the list of admissible transformations of ``beta`` used by the
    Henkin constructions; it defaults to every transformation of ``big``.
    """

    def __init__(self, small, big, embedding, adm=None, validate=True):
        self.small = small
        self.big = big
        self.embedding = np.asarray(embedding, dtype=np.int64).reshape(small.n)
        self.adm = tuple(big.sig.transformations) if adm is None else tuple(tuple(t) for t in adm)
        self._cache = {}
        if validate:
            self.validate()

    @property
    def alpha(self):
        return self.small.dim

    @property
    def beta(self):
        return self.big.dim

    def spare(self):
        return range(self.alpha, self.beta)

    def embed(self, x):
        return int(K.apply_additive(self.embedding, np.array([x]))[0])

    def embed_array(self, xs):
        return K.apply_additive(self.embedding, xs)

    def image(self):
        return self.embed_array(self.small.elements())

    def validate(self):
        small, big = self.small, self.big
        if self.beta < self.alpha:
            raise SignatureError("the dilation must not have smaller dimension")
        acc = 0
        for img in self.embedding:
            img = int(img)
            if img == 0 or acc & img:
                raise MorphismError("embedding is not an injective Boolean homomorphism")
            acc |= img
        if acc != big.top:
            raise MorphismError("embedding does not preserve the top element")
        atoms = np.array([1 << a for a in range(small.n)], dtype=np.int64)
        for i in range(self.alpha):
            if not np.array_equal(self.embed_array(small.cyl_apply(i, atoms)), big.cyl_apply(i, self.embedding)):
                raise MorphismError(f"embedding does not commute with c_{i}")
        for tau in small.sig.transformations:
            ext = extend_transformation(tau, self.beta)
            if ext not in big.sig.index:
                raise SignatureError(f"{ext} is missing from the dilation's signature")
            if not np.array_equal(self.embed_array(small.subst_apply(tau, atoms)), big.subst_apply(ext, self.embedding)):
                raise MorphismError(f"embedding does not commute with s_{tau}")
        if small.sig.with_diagonals:
            for i in range(self.alpha):
                for j in range(self.alpha):
                    if self.embed(small.d(i, j)) != big.d(i, j):
                        raise MorphismError(f"embedding does not preserve d_{i}{j}")
        classes = _support_classes(big, range(self.alpha))
        for img in self.embedding:
            if not _is_union(classes, int(img)):
                raise MorphismError("embedded element is not supported by the small dimensions")

    def is_neat(self):
        """Whether the image is all of ``Nr_alpha big``."""
        return len(_support_classes(self.big, range(self.alpha))) == self.small.n

    # presentations s_sigma p with sigma: alpha -> beta
    def sigmas(self):
        return list(itertools.product(range(self.beta), repeat=self.alpha))

    def present(self, sigma, p):
        """The element ``s_sigma p`` of ``big``: ``s`` of ``sigma`` extended by the identity, applied to ``e(p)``."""
        return int(self.present_array(sigma, np.array([p]))[0])

    def present_array(self, sigma, ps):
        ext = extend_transformation(sigma, self.beta)
        return self.big.subst_apply(ext, self.embed_array(ps))

    def presentations(self):
        """Map from each element of ``big`` of the form ``s_sigma p`` to all its ``(sigma, p)``."""
        if "presentations" not in self._cache:
            ps = self.small.elements()
            out = {}
            for sigma in self.sigmas():
                for p, v in zip(ps.tolist(), self.present_array(sigma, ps).tolist()):
                    out.setdefault(v, []).append((sigma, p))
            self._cache["presentations"] = out
        return self._cache["presentations"]

    def admissible_rhos(self, sigma):
        """Permutations ``rho`` of ``beta`` in the signature with ``rho(sigma(alpha))`` inside ``alpha``, lexicographically."""
        key = ("rho", tuple(sigma))
        if key not in self._cache:
            img = set(sigma)
            out = [
                rho
                for rho in itertools.permutations(range(self.beta))
                if rho in self.big.sig.index and all(rho[s] < self.alpha for s in img)
            ]
            self._cache[key] = out
        return self._cache[key]


def cs_dilation(alpha, beta, base_size, small_generators=None, minimal=False):
    """Set-algebra dilation: ``Cs_alpha(U)`` (or a subalgebra) inside ``Cs_beta(U)``.

    ``small_generators`` picks a generated subalgebra of ``Cs_alpha(U)`` as the
    small algebra; ``minimal`` replaces the big algebra by the subalgebra
    generated by the image.
    """
    if beta < alpha:
        raise SignatureError("beta must be at least alpha")
    Fs = cylindric_set_frame(alpha, base_size)
    Fb = cylindric_set_frame(beta, base_size)
    small = complex_algebra(Fs, name=f"Cs_{alpha}({base_size})")
    big = complex_algebra(Fb, name=f"Cs_{beta}({base_size})")
    emb = np.zeros(small.n, dtype=np.int64)
    small_index = {p: k for k, p in enumerate(Fs.labels)}
    for q, y in enumerate(Fb.labels):
        emb[small_index[y[:alpha]]] |= 1 << q
    if small_generators is not None:
        sub, incl = generated_subalgebra(small, small_generators)
        emb = K.apply_additive(emb, incl.atom_images)
        small = sub
    if minimal:
        sub, incl = generated_subalgebra(big, emb.tolist())
        emb = np.array([upper_bound_in(incl, int(v)) for v in emb], dtype=np.int64)
        big = sub
    return DilationPair(small, big, emb)


# --------------------------------------------------- dilated cylindrifiers


@dataclass(frozen=True)
class DilatedValue:
    value: int
    rho: tuple
    rhos_checked: int = 1
    presentations_checked: int = 1
    native: int = None

    @property
    def native_agrees(self):
        return self.native is None or self.native == self.value


def _dilated_value_array(pair, k, sigma, rho, ps):
    small, big = pair.small, pair.big
    rs = tuple(rho[s] for s in sigma)
    if rs not in small.sig.index:
        raise SignatureError(f"{rs} is not a transformation of the small algebra")
    q = small.subst_apply(rs, ps)
    if k in sigma:
        q = small.cyl_apply(rho[k], q)
    return big.subst_apply(inverse(rho), pair.embed_array(q))


def dilated_cylindrifier(pair, k, sigma, p, verify_all=False, native=False):
    """``c_k s_sigma p`` evaluated through the small algebra.

    With the lexicographically least admissible ``rho``:
    ``c_k s_sigma p = s_(rho^-1) e(c_(rho({k} & sigma alpha)) s_(rho sigma) p)``.
    ``verify_all`` recomputes the value for every admissible ``rho`` and every
    other presentation ``(sigma', p')`` of the same element and raises
    :class:`WellDefinednessError` on disagreement; ``native`` also records
    ``big``'s own ``c_k`` of the element.  The full sweep runs once per
    element and ``k``; later calls compare against the value it settled.
    """
    pair.big.sig.check_index(k)
    sigma = tuple(int(s) for s in sigma)
    if len(sigma) != pair.alpha or any(not 0 <= s < pair.beta for s in sigma):
        raise SignatureError(f"{sigma} does not map {pair.alpha} into {pair.beta}")
    rhos = pair.admissible_rhos(sigma)
    if not rhos:
        raise DimensionBudgetError(f"no admissible permutation moves the image of {sigma} into {pair.alpha}")
    p = int(p)
    value = int(_dilated_value_array(pair, k, sigma, rhos[0], np.array([p]))[0])
    nat = pair.big.c(k, pair.present(sigma, p)) if native else None
    if not verify_all:
        return DilatedValue(value, rhos[0], native=nat)
    elem = pair.present(sigma, p)
    pres = pair.presentations()[elem]
    # once every presentation of an element has been checked for c_k, a new
    # (sigma, p) only has to match the value they all agreed on
    done = pair._cache.setdefault(("verified", k), {})
    if elem in done:
        agreed, n_pres = done[elem]
        if value != agreed:
            raise WellDefinednessError(
                f"c_{k} of s_{sigma} {p}: rho={rhos[0]} gives {value} but other presentations give {agreed}"
            )
        return DilatedValue(value, rhos[0], 1, n_pres, nat)
    n_rho = 0
    for sig2, p2 in pres:
        for rho in pair.admissible_rhos(sig2):
            v = int(_dilated_value_array(pair, k, sig2, rho, np.array([p2]))[0])
            n_rho += 1
            if v != value:
                raise WellDefinednessError(
                    f"c_{k} of s_{sigma} {p}: rho={rhos[0]} gives {value} but presentation "
                    f"(sigma={sig2}, p={p2}) with rho={rho} gives {v}"
                )
    done[elem] = (value, len(pres))
    return DilatedValue(value, rhos[0], n_rho, len(pres), nat)


def verify_well_definedness(pair, ks=None, native=True):
    """Check the dilated cylindrifier over every ``k``, ``sigma`` and ``p`` at once.

    Returns ``(evaluations, disagreements, native_mismatches)``; each
    disagreement is ``(k, sigma, p, rho, value, other)``.
    """
    ks = range(pair.beta) if ks is None else ks
    ps = pair.small.elements()
    evaluations = 0
    disagreements = []
    native_bad = []
    for k in ks:
        per_elem = {}
        for sigma in pair.sigmas():
            elems = pair.present_array(sigma, ps)
            rhos = pair.admissible_rhos(sigma)
            if not rhos:
                raise DimensionBudgetError(f"no admissible permutation for {sigma}")
            for rho in rhos:
                vals = _dilated_value_array(pair, k, sigma, rho, ps)
                evaluations += len(ps)
                for e_, v, p in zip(elems.tolist(), vals.tolist(), ps.tolist()):
                    ref = per_elem.setdefault(e_, (v, sigma, p, rho))
                    if ref[0] != v:
                        disagreements.append((k, sigma, p, rho, v, ref))
        if native:
            keys = np.array(sorted(per_elem), dtype=np.int64)
            nat = pair.big.cyl_apply(k, keys)
            for e_, n_ in zip(keys.tolist(), nat.tolist()):
                if per_elem[e_][0] != n_:
                    native_bad.append((k, e_, per_elem[e_][0], n_))
    return evaluations, disagreements, native_bad


# ------------------------------------------------------- Henkin machinery


def _big_filter(big, f):
    if isinstance(f, Filter):
        return f
    return Filter(big.ba, int(f))


def is_perfect_ultrafilter(pair, adm, F):
    """Every ``s_tau c_j x`` in ``F`` (``x`` embedded, ``j < alpha``) has a witness ``s_tau s_[j/m] x`` in ``F``.

    ``m`` ranges over ``beta \\ alpha`` with ``tau(m) == m``.
    """
    F = _big_filter(pair.big, F)
    if not F.is_ultra():
        raise PropernessError("perfection is defined for ultrafilters")
    adm = pair.adm if adm is None else adm
    big = pair.big
    xs = pair.image()
    for tau in adm:
        tau = tuple(tau)
        for j in range(pair.alpha):
            lhs = big.subst_apply(tau, big.cyl_apply(j, xs))
            need = np.array([v in F for v in lhs.tolist()])
            if not need.any():
                continue
            ok = np.zeros(len(xs), dtype=bool)
            for m in pair.spare():
                if tau[m] != m:
                    continue
                rep = replacement(pair.beta, j, m)
                w = big.subst_apply(tau, big.subst_apply(rep, xs))
                ok |= np.array([v in F for v in w.tolist()])
            if (need & ~ok).any():
                return False
    return True


def witness_filter_step(big, g_prev, tau, j, x, m, alpha):
    """``g_prev`` plus the implication ``s_tau c_j x -> s_tau s_[j/m] x``.

    ``m`` must lie outside ``alpha`` and every dimension set of ``g_prev``,
    and be fixed by ``tau``.
    """
    if isinstance(big, DilationPair):
        big = big.big
    tau = tuple(tau)
    if not 0 <= m < big.dim:
        raise WitnessIndexError(f"witness index {m} is outside the dimension {big.dim}")
    if m < alpha:
        raise WitnessIndexError(f"witness index {m} lies inside {alpha}")
    if tau[m] != m:
        raise WitnessIndexError(f"witness index {m} is moved by {tau}")
    for g in g_prev:
        if m in dimension_set(big, g):
            raise WitnessIndexError(f"witness index {m} occurs in the dimension set of {g}")
    lhs = big.s(tau, big.c(j, int(x)))
    rhs = big.s(tau, big.s(replacement(big.dim, j, m), int(x)))
    return frozenset(g_prev) | {big.neg(lhs) | rhs}


def henkin_chain(pair, generators, triples):
    """Run witness steps for ``triples`` of ``(tau, j, x)``, each with the least admissible ``m``.

    Returns the list of generator sets ``G_0, G_1, ...`` and whether each
    generates a proper filter.
    """
    big = pair.big
    g = frozenset(int(v) for v in generators)
    chain = [g]
    for tau, j, x in triples:
        used = set()
        for v in g:
            used |= dimension_set(big, v)
        cands = [m for m in pair.spare() if m not in used and tuple(tau)[m] == m]
        if not cands:
            raise DimensionBudgetError(f"no fresh witness index left for {(tuple(tau), j, x)}")
        g = witness_filter_step(big, g, tau, j, x, cands[0], pair.alpha)
        chain.append(g)
    proper = []
    for gs in chain:
        least = big.top
        for v in gs:
            least &= v
        proper.append(least != 0)
    return chain, proper


# ------------------------------------------------------- witness systems


@dataclass
class Side:
    """One generated subalgebra of ``big`` with its inclusion."""

    algebra: FiniteBao
    inclusion: Morphism

    def ub(self, y):
        return upper_bound_in(self.inclusion, y)

    def to_big(self, z):
        return self.inclusion(z)


@dataclass
class WitnessSystem:
    pair: DilationPair
    a: int
    c: int
    x1: tuple
    x2: tuple
    enumeration: tuple
    u: list
    v: list
    y1: frozenset
    y2: frozenset
    h1: Filter
    h2: Filter
    h: Filter
    h_star: Filter = None
    f1: Filter = None
    f2: Filter = None
    claims_checked: int = 0
    sides: dict = field(default_factory=dict)
    interpolant: int = None
    interpolant_in_common: int = None

    @property
    def h_proper(self):
        return self.h.proper

    @property
    def interpolant_exists(self):
        return self.interpolant is not None


def _support(tau):
    return {i for i, t in enumerate(tau) if t != i}


def _range_moved(tau):
    return {tau[i] for i in _support(tau)}


def default_enumeration(pair, a, c):
    """One triple per small index on each side: ``(id, k, a)`` and ``(id, k, -c)`` in the big algebra."""
    ident = identity(pair.beta)
    ea, ec = pair.embed(a), pair.big.neg(pair.embed(c))
    side1 = [(ident, k, ea) for k in range(pair.alpha)]
    side2 = [(ident, k, ec) for k in range(pair.alpha)]
    return side1, side2


def _choose_witnesses(pair, a_big, c_big, side1, side2):
    big = pair.big
    base = set(dimension_set(big, a_big)) | set(dimension_set(big, c_big))
    u, v = [], []
    seen = set(base)
    n = max(len(side1), len(side2))
    for i in range(n):
        for side in (side1, side2):
            if i < len(side):
                tau, k, x = side[i]
                seen |= set(dimension_set(big, x)) | _support(tau) | _range_moved(tau)
        for side, out in ((side1, u), (side2, v)):
            if i >= len(side):
                continue
            free = [m for m in pair.spare() if m not in seen and m not in u and m not in v]
            if not free:
                raise DimensionBudgetError(
                    f"no fresh index for witness {i}: {pair.beta - pair.alpha} spare dimensions are used up"
                )
            out.append(free[0])
    return u, v


def _witness_element(big, tau, k, x, w):
    """``-s_tau c_k x + s_tau s_[k/w] x``."""
    lhs = big.s(tau, big.c(k, x))
    rhs = big.s(tau, big.s(replacement(big.dim, k, w), x))
    return big.neg(lhs) | rhs


def _zt(big, k, x, w):
    """The quantifier-free part ``-c_k x + s_[k/w] x``."""
    return big.neg(big.c(k, x)) | big.s(replacement(big.dim, k, w), x)


def _check_claims(big, zs, ts, us, vs):
    """Claims (i)/(ii) for every pair of index subsets; returns the number of checks."""
    n_checks = 0
    n1, n2 = len(zs), len(ts)
    for eta in _subsets(n1):
        for xi in _subsets(n2):
            if not eta and not xi:
                continue
            if eta and (not xi or eta[-1] > xi[-1]):
                w, own, other, own_name = us[eta[-1]], [zs[i] for i in eta], [ts[j] for j in xi], "z"
            else:
                w, own, other, own_name = vs[xi[-1]], [ts[j] for j in xi], [zs[i] for i in eta], "t"
            for i, z in enumerate(own[:-1]):
                n_checks += 1
                if big.c(w, z) != z:
                    raise WitnessClaimError(f"c_{w} {own_name}_{i} != {own_name}_{i}")
            n_checks += 1
            if big.c(w, own[-1]) != big.top:
                raise WitnessClaimError(f"c_{w} of the last {own_name} is not 1")
            for j, t in enumerate(other):
                n_checks += 1
                if big.dual_c(w, t) != t:
                    raise WitnessClaimError(f"dual c_{w} does not fix element {j} of the other side")
    return n_checks


def _subsets(n):
    for r in range(n + 1):
        yield from itertools.combinations(range(n), r)


def _sub_inclusion(small_side, big_side):
    """Inclusion of one generated subalgebra of a common algebra into another, as a morphism."""
    imgs = [upper_bound_in(big_side.inclusion, int(b)) for b in small_side.inclusion.atom_images]
    return Morphism(small_side.algebra, big_side.algebra, imgs)


def build_witness_system(pair, a, c, enumeration=None, x1=None, x2=None, check_claims=True):
    """The two witness sets, their filters, and the common filter ``H``.

    ``a`` and ``c`` are elements of the small algebra generated by ``x1`` and
    ``x2`` respectively (both default to ``[a]`` and ``[c]``).
    ``enumeration`` is ``(side1, side2)``, lists of ``(tau, k, x)`` with ``x``
    in the big algebra.  Witness indices are chosen least-first from the
    spare dimensions.  When ``H`` is proper, ``H*`` and ``F1``, ``F2`` are
    built and checked to agree on the common subalgebra.  The interpolant is
    searched in the small algebra's common subalgebra.
    """
    from .amalgam import AmalgamationInstance, find_interpolant
    from .bao import preimage_in

    small, big = pair.small, pair.big
    a, c = int(a), int(c)
    x1 = (a,) if x1 is None else tuple(int(v) for v in x1)
    x2 = (c,) if x2 is None else tuple(int(v) for v in x2)
    common = tuple(sorted(set(x1) & set(x2)))

    # small-side subalgebras, and a and c located in them
    A1, i1 = generated_subalgebra(small, x1)
    A2, i2 = generated_subalgebra(small, x2)
    A12, i12 = generated_subalgebra(small, common)

    a1 = preimage_in(i1, a)
    c2 = preimage_in(i2, c)
    if a1 is None:
        raise MorphismError(f"{a} is not generated by {x1}")
    if c2 is None:
        raise MorphismError(f"{c} is not generated by {x2}")

    # big-side subalgebras Sg(X1), Sg(X2), Sg(X1 & X2)
    S1 = Side(*generated_subalgebra(big, [pair.embed(v) for v in x1]))
    S2 = Side(*generated_subalgebra(big, [pair.embed(v) for v in x2]))
    S12 = Side(*generated_subalgebra(big, [pair.embed(v) for v in common]))

    ea, ec = pair.embed(a), pair.embed(c)
    side1, side2 = enumeration if enumeration is not None else default_enumeration(pair, a, c)
    side1 = [(tuple(t), int(k), int(x)) for t, k, x in side1]
    side2 = [(tuple(t), int(k), int(x)) for t, k, x in side2]
    for name, side, S in (("first", side1, S1), ("second", side2, S2)):
        for tau, k, x in side:
            if tau not in big.sig.index:
                raise SignatureError(f"{tau} is not admitted")
            if S.to_big(S.ub(x)) != x:
                raise MorphismError(f"{x} is not in the {name} generated subalgebra")
    u, v = _choose_witnesses(pair, ea, ec, side1, side2)

    y1 = frozenset([ea] + [_witness_element(big, t, k, x, w) for (t, k, x), w in zip(side1, u)])
    y2 = frozenset([big.neg(ec)] + [_witness_element(big, t, k, x, w) for (t, k, x), w in zip(side2, v)])
    m1 = big.top
    for y in y1:
        m1 &= y
    m2 = big.top
    for y in y2:
        m2 &= y
    h1 = Filter(S1.algebra.ba, S1.ub(m1))
    h2 = Filter(S2.algebra.ba, S2.ub(m2))
    # H: generated in the common subalgebra by the traces of H1 and H2
    h_least = S12.ub(m1) & S12.ub(m2)
    h = Filter(S12.algebra.ba, h_least)

    n_checks = 0
    if check_claims:
        zs = [_zt(big, k, x, w) for (_, k, x), w in zip(side1, u)]
        ts = [_zt(big, k, x, w) for (_, k, x), w in zip(side2, v)]
        n_checks = _check_claims(big, zs, ts, u, v)

    ws = WitnessSystem(
        pair, a, c, x1, x2, (tuple(side1), tuple(side2)), u, v, y1, y2, h1, h2, h,
        claims_checked=n_checks, sides={"1": S1, "2": S2, "12": S12},
    )

    if h.proper:
        h_star = extend_to_ultrafilter(S12.algebra.ba, h)
        block = S12.to_big(h_star.least)
        f1 = extend_to_ultrafilter(S1.algebra.ba, Filter(S1.algebra.ba, _exact(S1, m1 & block)))
        f2 = extend_to_ultrafilter(S2.algebra.ba, Filter(S2.algebra.ba, _exact(S2, m2 & block)))
        for name, f, S in (("F1", f1, S1), ("F2", f2, S2)):
            trace = S12.ub(S.to_big(f.least))
            if trace != h_star.least:
                raise WitnessClaimError(f"{name} does not restrict to H* on the common subalgebra")
        ws.h_star, ws.f1, ws.f2 = h_star, f1, f2

    # interpolant in the small algebra's common subalgebra, via the amalgam search
    f = _sub_inclusion(Side(A12, i12), Side(A1, i1))
    g = _sub_inclusion(Side(A12, i12), Side(A2, i2))
    inst = AmalgamationInstance(f, g, schema=(), validate=False)
    r = find_interpolant(inst, a1, c2)
    ws.interpolant = None if r is None else i12(r)
    r_big = S12.ub(ea)
    ws.interpolant_in_common = S12.to_big(r_big) if S12.to_big(r_big) & ~ec == 0 else None
    return ws


def _exact(S, y):
    """``y`` itself in subalgebra coordinates; ``y`` must lie in the subalgebra."""
    z = S.ub(y)
    if S.to_big(z) != y:
        raise WitnessClaimError("element expected in the generated subalgebra is missing")
    return z
