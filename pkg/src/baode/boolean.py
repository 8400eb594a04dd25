"""Finite Boolean algebras as powersets of atoms, and their filters.

An element is an ``int`` whose set bits are the atoms below it, so ``x <= y``
is ``x & ~y == 0``.  Every filter of a finite Boolean algebra is principal;
a :class:`Filter` therefore stores its least member and materialises the
member set only on request.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import MAX_ATOMS
from .errors import PropernessError, SizeError

MAX_ENUMERATED_ATOMS = 20


@dataclass(frozen=True)
class FiniteBA:
    """The powerset Boolean algebra on ``atom_count`` atoms."""

    atom_count: int

    def __post_init__(self):
        if not isinstance(self.atom_count, (int, np.integer)) or not 1 <= self.atom_count <= MAX_ATOMS:
            raise SizeError(f"atom_count must be in 1..{MAX_ATOMS}, got {self.atom_count!r}")

    @property
    def size(self):
        return 1 << self.atom_count

    @property
    def top(self):
        return (1 << self.atom_count) - 1

    bottom = 0

    def atoms(self):
        return [1 << i for i in range(self.atom_count)]

    def elements(self):
        if self.atom_count > MAX_ENUMERATED_ATOMS:
            raise SizeError(f"refusing to enumerate 2^{self.atom_count} elements")
        return np.arange(self.size, dtype=np.int64)

    def contains(self, x):
        return 0 <= int(x) <= self.top

    def join(self, x, y):
        return x | y

    def meet(self, x, y):
        return x & y

    def complement(self, x):
        return self.top ^ x

    @staticmethod
    def leq(x, y):
        return x & ~y == 0

    def atoms_below(self, x):
        x = int(x)
        return [i for i in range(self.atom_count) if (x >> i) & 1]

    def element_from_atoms(self, indices):
        x = 0
        for i in indices:
            if not 0 <= i < self.atom_count:
                raise SizeError(f"atom index {i} out of range for {self.atom_count} atoms")
            x |= 1 << i
        return x


def mk_finite_ba(atom_count):
    if not 1 <= atom_count <= MAX_ENUMERATED_ATOMS:
        raise SizeError(f"atom_count must be in 1..{MAX_ENUMERATED_ATOMS}, got {atom_count}")
    return FiniteBA(atom_count)


def _ba_of(base):
    return base if isinstance(base, FiniteBA) else base.ba


@dataclass(frozen=True)
class Filter:
    """A Boolean filter, identified by its least member."""

    base: FiniteBA
    least: int

    def __contains__(self, x):
        return self.least & ~int(x) == 0

    @property
    def proper(self):
        return self.least != 0

    @property
    def members(self):
        """All members; the up-set of ``least``."""
        xs = self.base.elements()
        return frozenset(int(x) for x in xs[(xs & self.least) == self.least])

    def __len__(self):
        return 1 << (self.base.atom_count - bin(self.least).count("1"))

    def is_ultra(self):
        return self.least != 0 and self.least & (self.least - 1) == 0

    def issubset(self, other):
        return self.base == other.base and other.least & ~self.least == 0


def generated_filter(base, generators):
    """Smallest filter containing ``generators`` (may be improper)."""
    ba = _ba_of(base)
    least = ba.top
    for y in generators:
        least &= int(y)
    return Filter(ba, least)


def is_proper(f):
    return 0 not in f


def principal_filter(base, x):
    return Filter(_ba_of(base), int(x))


def extend_to_ultrafilter(base, f, literal=None):
    """Extend a proper filter to an ultrafilter.

    Elements are visited in increasing index order; each undecided element
    (neither it nor its complement is in the current filter) is added.  The
    outcome is the principal ultrafilter on the lowest atom below
    ``f.least``; ``literal=True`` forces the element-by-element loop, which
    the default uses anyway for algebras of at most 2^12 elements.
    """
    ba = _ba_of(base)
    if f.least == 0:
        raise PropernessError("cannot extend an improper filter to an ultrafilter")
    if literal is None:
        literal = ba.atom_count <= 12
    if not literal:
        least = int(f.least)
        return Filter(ba, least & -least)
    least = int(f.least)
    top = ba.top
    for x in range(ba.size):
        if least & (least - 1) == 0:
            break
        inside = least & x
        outside = least & (top ^ x)
        if inside and outside:
            least = inside
    return Filter(ba, least)


def enumerate_ultrafilters(base):
    """One principal ultrafilter per atom, in atom order."""
    ba = _ba_of(base)
    return [Filter(ba, 1 << i) for i in range(ba.atom_count)]


def is_filter(base, members):
    """Check the filter axioms on an explicit member set (test oracle)."""
    ba = _ba_of(base)
    members = {int(m) for m in members}
    if ba.top not in members:
        return False
    for x in members:
        for y in members:
            if x & y not in members:
                return False
    for x in members:
        for z in ba.elements():
            if (x & ~int(z)) == 0 and int(z) not in members:
                return False
    return True
