"""Bitmask kernels shared by every algebra in the package.

Elements of a finite Boolean algebra with ``n`` atoms are ``int64`` bitmasks.
An additive operator is stored by the images of its atoms; a Boolean
endomorphism by a map on atoms (``s(x) = g^-1[x]``).  The kernels below apply
those encodings to whole arrays of elements at once.

Two implementations exist for each kernel: a numba ``@njit`` loop and a pure
numpy path.  Set ``BAODE_DISABLE_NUMBA=1`` before import to force the numpy
path (numba is also skipped when it cannot be imported).
"""

import os

import numpy as np

MAX_ATOMS = 62

_DISABLED = os.environ.get("BAODE_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError("numba disabled by BAODE_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


# ---------------------------------------------------------------- numpy path


def apply_additive_numpy(images, xs):
    out = np.zeros(xs.shape, dtype=np.int64)
    for b in range(images.shape[0]):
        out |= np.where((xs >> b) & 1, images[b], 0)
    return out


def apply_preimage_numpy(gmap, xs):
    out = np.zeros(xs.shape, dtype=np.int64)
    for b in range(gmap.shape[0]):
        out |= ((xs >> gmap[b]) & 1) << b
    return out


def additive_table_numpy(images):
    n = images.shape[0]
    table = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        half = 1 << b
        table[half : 2 * half] = table[:half] | images[b]
    return table


def popcount_numpy(xs):
    return np.bitwise_count(xs).astype(np.int64)


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def apply_additive_numba(images, xs):
        out = np.empty(xs.shape[0], dtype=np.int64)
        for k in range(xs.shape[0]):
            x = xs[k]
            r = 0
            b = 0
            while x:
                if x & 1:
                    r |= images[b]
                x >>= 1
                b += 1
            out[k] = r
        return out

    @njit(cache=True)
    def apply_preimage_numba(gmap, xs):
        out = np.empty(xs.shape[0], dtype=np.int64)
        n = gmap.shape[0]
        for k in range(xs.shape[0]):
            x = xs[k]
            r = 0
            for b in range(n):
                if (x >> gmap[b]) & 1:
                    r |= np.int64(1) << b
            out[k] = r
        return out

    @njit(cache=True)
    def additive_table_numba(images):
        n = images.shape[0]
        size = 1 << n
        table = np.zeros(size, dtype=np.int64)
        for x in range(1, size):
            low = x & (-x)
            b = 0
            while (low >> b) != 1:
                b += 1
            table[x] = table[x ^ low] | images[b]
        return table

    @njit(cache=True)
    def popcount_numba(xs):
        out = np.empty(xs.shape[0], dtype=np.int64)
        for k in range(xs.shape[0]):
            x = xs[k]
            c = 0
            while x:
                x &= x - 1
                c += 1
            out[k] = c
        return out

    apply_additive_impl = apply_additive_numba
    apply_preimage_impl = apply_preimage_numba
    additive_table_impl = additive_table_numba
    popcount_impl = popcount_numba
else:
    apply_additive_impl = apply_additive_numpy
    apply_preimage_impl = apply_preimage_numpy
    additive_table_impl = additive_table_numpy
    popcount_impl = popcount_numpy


def _as_elements(xs):
    arr = np.asarray(xs, dtype=np.int64)
    return arr.reshape(-1), arr.shape


def apply_additive(images, xs):
    """Apply the additive map with the given atom images to every element of ``xs``."""
    flat, shape = _as_elements(xs)
    return apply_additive_impl(np.ascontiguousarray(images, dtype=np.int64), flat).reshape(shape)


def apply_preimage(gmap, xs):
    """Apply ``x -> {b : gmap[b] in x}`` to every element of ``xs``."""
    flat, shape = _as_elements(xs)
    return apply_preimage_impl(np.ascontiguousarray(gmap, dtype=np.int64), flat).reshape(shape)


def additive_table(images):
    """Full operation table (indexed by element) of an additive map."""
    return additive_table_impl(np.ascontiguousarray(images, dtype=np.int64))


def popcount(xs):
    flat, shape = _as_elements(xs)
    return popcount_impl(flat).reshape(shape)


def backend():
    return "numba" if HAVE_NUMBA else "numpy"
