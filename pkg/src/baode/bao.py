"""Cylindric-polyadic signatures and finite Boolean algebras with operators.

A :class:`FiniteBao` keeps its operators in atom form:

* ``cyl[i, a]`` is the element ``c_i({a})``; ``c_i`` is recovered by
  additivity, so normality and additivity hold by construction.
* ``gmaps[t, b]`` is an atom map with ``s_tau(x) = {b : gmaps[t, b] in x}``;
  every such map is a Boolean endomorphism and every endomorphism of a finite
  powerset algebra has this form.
* ``diag[i, j]`` is the element ``d_ij``.

Transformations are tuples ``tau`` with ``tau[i]`` the image of ``i``.  They
compose as functions, ``compose(sigma, tau)[i] == sigma[tau[i]]``, and the
substitutions act covariantly: ``s_sigma s_tau == s_(sigma o tau)``.
"""

import itertools
from functools import cached_property, lru_cache

import numpy as np

from . import _kernels as K
from .boolean import FiniteBA
from .errors import IndexRangeError, MorphismError, SignatureError, SizeError

# ------------------------------------------------------------ transformations


def identity(dim):
    return tuple(range(dim))


def compose(sigma, tau):
    """``sigma o tau`` (apply ``tau`` first)."""
    return tuple(sigma[t] for t in tau)


def replacement(dim, i, j):
    """The transformation ``[i/j]`` sending ``i`` to ``j`` and fixing the rest."""
    if not (0 <= i < dim and 0 <= j < dim):
        raise IndexRangeError(f"[{i}/{j}] out of range for dimension {dim}")
    tau = list(range(dim))
    tau[i] = j
    return tuple(tau)


def full_monoid(dim):
    """All of ``dim^dim`` in lexicographic order."""
    return tuple(itertools.product(range(dim), repeat=dim))


def permutations(dim):
    return tuple(itertools.permutations(range(dim)))


def inverse(perm):
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(inv)


def monoid_closure(generators, dim):
    elems = {identity(dim)}
    frontier = [tuple(g) for g in generators]
    elems.update(frontier)
    while frontier:
        new = []
        for s in list(elems):
            for t in frontier:
                for c in (compose(s, t), compose(t, s)):
                    if c not in elems:
                        elems.add(c)
                        new.append(c)
        frontier = new
    return tuple(sorted(elems))


@lru_cache(maxsize=64)
def _composition_table(ts):
    index = {t: k for k, t in enumerate(ts)}
    table = np.empty((len(ts), len(ts)), dtype=np.int64)
    for a, s in enumerate(ts):
        for b, t in enumerate(ts):
            c = compose(s, t)
            if c not in index:
                raise SignatureError(f"transformations not closed: {s} o {t} = {c}")
            table[a, b] = index[c]
    table.setflags(write=False)
    return table


class Signature:
    """Dimension, admitted substitution indices, and whether diagonals exist."""

    def __init__(self, dim, transformations=None, with_diagonals=True):
        if dim < 1:
            raise SignatureError("dimension must be positive")
        self.dim = int(dim)
        if transformations is None:
            transformations = full_monoid(self.dim)
        ts = tuple(tuple(int(v) for v in t) for t in transformations)
        for t in ts:
            if len(t) != self.dim or any(not 0 <= v < self.dim for v in t):
                raise SignatureError(f"{t} is not a transformation of {self.dim}")
        if len(set(ts)) != len(ts):
            raise SignatureError("duplicate transformations")
        self.transformations = ts
        self.index = {t: k for k, t in enumerate(ts)}
        if identity(self.dim) not in self.index:
            raise SignatureError("transformations must contain the identity")
        self.composition = _composition_table(ts)
        self.with_diagonals = bool(with_diagonals)

    @classmethod
    def full(cls, dim, with_diagonals=True):
        return cls(dim, full_monoid(dim), with_diagonals)

    @property
    def is_full(self):
        return len(self.transformations) == self.dim**self.dim

    def tindex(self, tau):
        try:
            return self.index[tuple(tau)]
        except KeyError:
            raise SignatureError(f"transformation {tuple(tau)} not in the signature") from None

    def check_index(self, i):
        if not 0 <= i < self.dim:
            raise IndexRangeError(f"index {i} out of range for dimension {self.dim}")

    def __eq__(self, other):
        return (
            isinstance(other, Signature)
            and self.dim == other.dim
            and set(self.transformations) == set(other.transformations)
            and self.with_diagonals == other.with_diagonals
        )

    def __hash__(self):
        return hash((self.dim, frozenset(self.transformations), self.with_diagonals))

    def __repr__(self):
        kind = "full" if self.is_full else f"{len(self.transformations)} transformations"
        return f"Signature(dim={self.dim}, {kind}, with_diagonals={self.with_diagonals})"


# ------------------------------------------------------------------- algebras


def _images_from_table(ba, table, what):
    table = np.asarray(table, dtype=np.int64)
    if table.shape != (ba.size,):
        raise SignatureError(f"{what}: table must have {ba.size} entries")
    if table.min() < 0 or table.max() > ba.top:
        raise SignatureError(f"{what}: table value outside the algebra")
    if table[0] != 0:
        raise SignatureError(f"{what}: not normal, maps 0 to {table[0]}")
    images = table[[1 << a for a in range(ba.atom_count)]]
    if not np.array_equal(K.additive_table(images), table):
        raise SignatureError(f"{what}: not additive")
    return images


def _gmap_from_images(ba, images, what):
    """Atom map of the endomorphism with the given atom images."""
    images = np.asarray(images, dtype=np.int64)
    gmap = np.full(ba.atom_count, -1, dtype=np.int64)
    for a, img in enumerate(images):
        img = int(img)
        for b in range(ba.atom_count):
            if (img >> b) & 1:
                if gmap[b] != -1:
                    raise SignatureError(f"{what}: images of atoms {gmap[b]} and {a} overlap, not a Boolean endomorphism")
                gmap[b] = a
    if (gmap < 0).any():
        raise SignatureError(f"{what}: does not preserve the top element, not a Boolean endomorphism")
    return gmap


def images_from_gmap(gmap, atom_count):
    images = np.zeros(atom_count, dtype=np.int64)
    for b, a in enumerate(gmap):
        images[a] |= 1 << b
    return images


class FiniteBao:
    """A finite Boolean algebra with cylindrifiers, substitutions and diagonals."""

    def __init__(self, ba, sig, cyl, gmaps, diag=None, name=None):
        if isinstance(ba, int):
            ba = FiniteBA(ba)
        self.ba = ba
        self.sig = sig
        self.name = name
        n = ba.atom_count
        cyl = np.array(cyl, dtype=np.int64).reshape(sig.dim, n)
        if cyl.size and (cyl.min() < 0 or cyl.max() > ba.top):
            raise SignatureError("cylindrifier image outside the algebra")
        gm = np.array(gmaps, dtype=np.int64).reshape(len(sig.transformations), n)
        if gm.size and (gm.min() < 0 or gm.max() >= n):
            raise SignatureError("substitution atom map out of range")
        if sig.with_diagonals:
            if diag is None:
                raise SignatureError("signature has diagonals but none were given")
            diag = np.array(diag, dtype=np.int64).reshape(sig.dim, sig.dim)
            if diag.min() < 0 or diag.max() > ba.top:
                raise SignatureError("diagonal outside the algebra")
        elif diag is not None:
            raise SignatureError("diagonals given for a diagonal-free signature")
        self.cyl = cyl
        self.gmaps = gm
        self.diag = diag
        for arr in (self.cyl, self.gmaps) + ((self.diag,) if diag is not None else ()):
            arr.setflags(write=False)
        self._check_monoid()

    def _check_monoid(self):
        sig = self.sig
        ident = sig.index[identity(sig.dim)]
        if not np.array_equal(self.gmaps[ident], np.arange(self.n)):
            raise SignatureError("s_id is not the identity")
        gm = self.gmaps
        # [s, t, b] = g_t[g_s[b]] must equal g_(s o t)[b]
        lhs = gm[np.arange(len(gm))[None, :, None], gm[:, None, :]]
        rhs = gm[sig.composition]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            s, t, _ = bad[0]
            raise SignatureError(
                f"substitutions are not a monoid action: s_{sig.transformations[s]} s_{sig.transformations[t]} "
                f"!= s_{sig.transformations[sig.composition[s, t]]}"
            )

    # construction helpers
    @classmethod
    def from_atom_images(cls, ba, sig, cyl_images, subst_images, diag=None, name=None):
        """Build from atom images of every operator; ``subst_images`` maps ``tau`` to images."""
        if isinstance(ba, int):
            ba = FiniteBA(ba)
        gmaps = np.empty((len(sig.transformations), ba.atom_count), dtype=np.int64)
        missing = set(sig.transformations) - {tuple(t) for t in subst_images}
        if missing:
            raise SignatureError(f"no substitution given for {sorted(missing)[0]}")
        for tau, imgs in subst_images.items():
            gmaps[sig.tindex(tau)] = _gmap_from_images(ba, imgs, f"s_{tuple(tau)}")
        return cls(ba, sig, cyl_images, gmaps, diag, name)

    @classmethod
    def from_tables(cls, ba, sig, cyl_tables, subst_tables, diag=None, name=None):
        """Build from full operation tables, validating normality, additivity and endomorphism."""
        if isinstance(ba, int):
            ba = FiniteBA(ba)
        cyl = np.array([_images_from_table(ba, t, f"c_{i}") for i, t in enumerate(cyl_tables)])
        subst = {}
        for tau, table in subst_tables.items():
            images = _images_from_table(ba, table, f"s_{tuple(tau)}")
            subst[tuple(tau)] = images
        return cls.from_atom_images(ba, sig, cyl, subst, diag, name)

    # basic data
    @property
    def n(self):
        return self.ba.atom_count

    @property
    def dim(self):
        return self.sig.dim

    @property
    def top(self):
        return self.ba.top

    @property
    def size(self):
        return self.ba.size

    def elements(self):
        return self.ba.elements()

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<FiniteBao{label} atoms={self.n} dim={self.dim} |M|={len(self.sig.transformations)}>"

    def __eq__(self, other):
        return (
            isinstance(other, FiniteBao)
            and self.ba == other.ba
            and self.sig == other.sig
            and np.array_equal(self.cyl, other.cyl)
            and all(
                np.array_equal(self.gmaps[self.sig.tindex(t)], other.gmaps[other.sig.tindex(t)])
                for t in self.sig.transformations
            )
            and (self.diag is None) == (other.diag is None)
            and (self.diag is None or np.array_equal(self.diag, other.diag))
        )

    __hash__ = object.__hash__

    # operations, scalar and vectorised
    def neg(self, x):
        return self.top ^ x

    def c(self, i, x):
        self.sig.check_index(i)
        return int(K.apply_additive(self.cyl[i], np.array([x]))[0])

    def cyl_apply(self, i, xs):
        self.sig.check_index(i)
        return K.apply_additive(self.cyl[i], xs)

    def s(self, tau, x):
        return int(K.apply_preimage(self.gmaps[self.sig.tindex(tau)], np.array([x]))[0])

    def subst_apply(self, tau, xs):
        return K.apply_preimage(self.gmaps[self.sig.tindex(tau)], xs)

    def subst_apply_index(self, t, xs):
        return K.apply_preimage(self.gmaps[t], xs)

    def d(self, i, j):
        if not self.sig.with_diagonals:
            raise SignatureError("signature has no diagonal constants")
        self.sig.check_index(i)
        self.sig.check_index(j)
        return int(self.diag[i, j])

    def dual_c(self, i, x):
        return self.top ^ self.c(i, self.top ^ x)

    def subst_images(self, tau):
        return images_from_gmap(self.gmaps[self.sig.tindex(tau)], self.n)

    @cached_property
    def cyl_tables(self):
        return np.array([K.additive_table(self.cyl[i]) for i in range(self.dim)])

    def subst_table(self, tau):
        return K.additive_table(self.subst_images(tau))


# ------------------------------------------------------------- spec operations


def dimension_set(a, x):
    """Indices ``i`` with ``c_i x != x``."""
    x = int(x)
    return frozenset(i for i in range(a.dim) if a.c(i, x) != x)


def subst_ij(a, i, j, x):
    """``s_i^j x``: ``x`` when ``i == j``, else ``c_i(d_ij . x)``."""
    if not a.sig.with_diagonals:
        raise SignatureError("s_i^j needs diagonal constants")
    a.sig.check_index(i)
    a.sig.check_index(j)
    if i == j:
        return int(x)
    return a.c(i, a.d(i, j) & int(x))


def dual_cyl(a, i, x):
    """``-c_i(-x)``."""
    a.sig.check_index(i)
    return a.dual_c(i, int(x))


# ------------------------------------------------------------------ morphisms


class Morphism:
    """An additive map between finite algebras, given by the images of source atoms.

    Every Boolean homomorphism between finite algebras has this form; whether
    a particular map *is* one (and whether it respects the operators) is
    checked by the predicates, not assumed.
    """

    def __init__(self, source, target, atom_images):
        self.source = source
        self.target = target
        imgs = np.array(atom_images, dtype=np.int64).reshape(source.n)
        if imgs.min() < 0 or imgs.max() > target.top:
            raise MorphismError("atom image outside the target algebra")
        self.atom_images = imgs

    @classmethod
    def from_table(cls, source, target, table):
        table = np.asarray(table, dtype=np.int64)
        try:
            images = _images_from_table(FiniteBA(source.n), table, "morphism")
        except SignatureError as exc:
            raise MorphismError(str(exc)) from None
        return cls(source, target, images)

    @classmethod
    def identity(cls, a):
        return cls(a, a, [1 << i for i in range(a.n)])

    def __call__(self, x):
        return int(K.apply_additive(self.atom_images, np.array([x]))[0])

    def apply(self, xs):
        return K.apply_additive(self.atom_images, xs)

    def table(self):
        return K.additive_table(self.atom_images)

    def compose(self, other):
        """``self o other``."""
        if other.target is not self.source and other.target != self.source:
            raise MorphismError("morphisms do not compose")
        return Morphism(other.source, self.target, self.apply(other.atom_images))

    def is_boolean_homomorphism(self):
        acc = 0
        for img in self.atom_images:
            img = int(img)
            if acc & img:
                return False
            acc |= img
        return acc == self.target.top

    def is_injective(self):
        return self.is_boolean_homomorphism() and bool((self.atom_images != 0).all())

    def homomorphism_failures(self, limit=None):
        """List of ``(operation, source element)`` pairs where the map fails to commute."""
        src, tgt = self.source, self.target
        out = []
        if not self.is_boolean_homomorphism():
            out.append(("boolean", None))
            if limit is not None and len(out) >= limit:
                return out
        if src.dim != tgt.dim or set(src.sig.transformations) != set(tgt.sig.transformations):
            out.append(("signature", None))
            return out
        atoms = np.array([1 << a for a in range(src.n)], dtype=np.int64)
        imgs = self.atom_images
        for i in range(src.dim):
            lhs = self.apply(src.cyl_apply(i, atoms))
            rhs = tgt.cyl_apply(i, imgs)
            for a in np.nonzero(lhs != rhs)[0]:
                out.append((f"c_{i}", int(atoms[a])))
        for tau in src.sig.transformations:
            lhs = self.apply(src.subst_apply(tau, atoms))
            rhs = tgt.subst_apply(tau, imgs)
            for a in np.nonzero(lhs != rhs)[0]:
                out.append((f"s_{tau}", int(atoms[a])))
        if src.sig.with_diagonals != tgt.sig.with_diagonals:
            out.append(("diagonals", None))
        elif src.sig.with_diagonals:
            for i in range(src.dim):
                for j in range(src.dim):
                    if self(src.d(i, j)) != tgt.d(i, j):
                        out.append((f"d_{i}{j}", None))
        return out if limit is None else out[:limit]

    def is_homomorphism(self):
        return not self.homomorphism_failures(limit=1)

    def __repr__(self):
        return f"<Morphism {self.source!r} -> {self.target!r}>"


# -------------------------------------------------------------- subalgebras


def _refine(blocks, y):
    out = []
    changed = False
    for b in blocks:
        inside, outside = b & y, b & ~y
        if inside and outside:
            out.extend((inside, outside))
            changed = True
        else:
            out.append(b)
    return out, changed


def generated_subalgebra(a, generators):
    """The subalgebra generated by ``generators`` and its inclusion morphism.

    The atoms of the subalgebra are found by partition refinement: start from
    the one-block partition, split by the generators and diagonals, then keep
    splitting by operator images of blocks until the partition is stable.
    Atoms of the result are ordered by their lowest atom in ``a``.
    """
    blocks = [a.top]
    pending = [int(g) for g in generators]
    if a.sig.with_diagonals:
        pending.extend(int(v) for v in a.diag.ravel())
    for y in pending:
        blocks, _ = _refine(blocks, y)
    changed = True
    while changed:
        changed = False
        arr = np.array(blocks, dtype=np.int64)
        images = [a.cyl_apply(i, arr) for i in range(a.dim)]
        images.extend(a.subst_apply_index(t, arr) for t in range(len(a.sig.transformations)))
        ys = np.unique(np.concatenate(images))
        parts = ys[:, None] & arr[None, :]
        split = ((parts != 0) & (parts != arr[None, :])).any(axis=1)
        for y in ys[split].tolist():
            blocks, hit = _refine(blocks, y)
            changed = changed or hit
    blocks.sort(key=lambda b: b & -b)
    arr = np.array(blocks, dtype=np.int64)
    m = len(blocks)
    sub_ba = FiniteBA(m)

    def encode(y):
        return sum(1 << k for k, b in enumerate(blocks) if b & y)

    cyl = np.array([[encode(int(v)) for v in a.cyl_apply(i, arr)] for i in range(a.dim)], dtype=np.int64)
    gmaps = np.empty((len(a.sig.transformations), m), dtype=np.int64)
    for t in range(len(a.sig.transformations)):
        imgs = [encode(int(v)) for v in a.subst_apply_index(t, arr)]
        gmaps[t] = _gmap_from_images(sub_ba, imgs, "restricted substitution")
    diag = None
    if a.sig.with_diagonals:
        diag = np.array([[encode(int(a.diag[i, j])) for j in range(a.dim)] for i in range(a.dim)])
    sub = FiniteBao(sub_ba, a.sig, cyl, gmaps, diag)
    return sub, Morphism(sub, a, arr)


def upper_bound_in(incl, y):
    """Least element ``z`` of the subalgebra with ``y <= incl(z)``."""
    return sum(1 << k for k, b in enumerate(incl.atom_images) if int(b) & int(y))


def preimage_in(incl, y):
    """The subalgebra element mapped to ``y``, or ``None`` if ``y`` is not in the image."""
    z = 0
    for k, b in enumerate(incl.atom_images):
        b = int(b)
        part = b & int(y)
        if part == b:
            z |= 1 << k
        elif part:
            return None
    return z if incl(z) == int(y) else None


# --------------------------------------------------------------- isomorphism


def _relational_isomorphism(n, rels1, rels2, preds1, preds2, funcs1=(), funcs2=()):
    """Backtracking search for a bijection preserving binary relations, unary predicates and unary functions."""
    if len(rels1) != len(rels2) or len(preds1) != len(preds2) or len(funcs1) != len(funcs2):
        return None

    def profile(rels, preds, funcs, p):
        return (
            tuple((int(r[p].sum()), int(r[:, p].sum()), bool(r[p, p])) for r in rels)
            + tuple(bool(q[p]) for q in preds)
            + tuple(bool(f[p] == p) for f in funcs)
        )

    prof1 = [profile(rels1, preds1, funcs1, p) for p in range(n)]
    prof2 = [profile(rels2, preds2, funcs2, p) for p in range(n)]
    if sorted(prof1) != sorted(prof2):
        return None
    order = sorted(range(n), key=lambda p: prof2.count(prof1[p]))
    assign = [-1] * n
    used = [False] * n

    def consistent(p, q):
        for p2 in range(n):
            q2 = assign[p2]
            if q2 < 0 and p2 != p:
                continue
            if p2 == p:
                q2 = q
            for r1, r2 in zip(rels1, rels2):
                if r1[p, p2] != r2[q, q2] or r1[p2, p] != r2[q2, q]:
                    return False
        for f1, f2 in zip(funcs1, funcs2):
            fp = int(f1[p])
            if fp == p:
                if int(f2[q]) != q:
                    return False
            elif assign[fp] >= 0 and assign[fp] != int(f2[q]):
                return False
            for p2 in range(n):
                if assign[p2] >= 0 and int(f1[p2]) == p and int(f2[assign[p2]]) != q:
                    return False
        return True

    def search(k):
        if k == n:
            return True
        p = order[k]
        for q in range(n):
            if used[q] or prof1[p] != prof2[q] or not consistent(p, q):
                continue
            assign[p] = q
            used[q] = True
            if search(k + 1):
                return True
            assign[p] = -1
            used[q] = False
        return False

    return tuple(assign) if search(0) else None


def _algebra_relations(a):
    n = a.n
    bits = (a.cyl[:, :, None] >> np.arange(n)[None, None, :]) & 1
    rels = [bits[i].astype(bool) for i in range(a.dim)]
    funcs = [a.gmaps[a.sig.tindex(t)] for t in sorted(a.sig.transformations)]
    preds = []
    if a.diag is not None:
        for i in range(a.dim):
            for j in range(a.dim):
                preds.append(((int(a.diag[i, j]) >> np.arange(n)) & 1).astype(bool))
    return rels, preds, funcs


def find_algebra_isomorphism(a, b):
    """An atom bijection ``pi`` (as a tuple) inducing an isomorphism ``a -> b``, or ``None``."""
    if a.n != b.n or a.sig != b.sig:
        return None
    r1, p1, f1 = _algebra_relations(a)
    r2, p2, f2 = _algebra_relations(b)
    return _relational_isomorphism(a.n, r1, r2, p1, p2, f1, f2)


def isomorphism_morphism(a, b, perm):
    return Morphism(a, b, [1 << q for q in perm])


def check_size(n, limit, what="universe"):
    if n > limit:
        raise SizeError(f"{what} of size {n} exceeds the limit {limit}")
