"""Linear algebra and enumeration over GF(2).

Bit matrices are numpy ``uint8`` arrays holding 0/1.  Column spaces used to
parametrise stabilizer states are also handled in a packed form, where a
column of an ``n x k`` matrix is an ``n``-bit integer (bit ``r`` = row ``r``);
this is what the vectorised search code consumes.
"""
from __future__ import annotations

import itertools

import numpy as np


def as_bits(m) -> np.ndarray:
    return np.asarray(m, dtype=np.uint8) & 1


def rank(m) -> int:
    """Rank over GF(2), by row reduction."""
    a = as_bits(m).copy()
    if a.ndim != 2:
        raise ValueError("rank expects a 2-D bit matrix")
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivots = np.nonzero(a[r:, c])[0]
        if pivots.size == 0:
            continue
        p = r + pivots[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        below = np.nonzero(a[:, c])[0]
        below = below[below != r]
        a[below] ^= a[r]
        r += 1
    return r


def rref(m) -> np.ndarray:
    """Reduced row echelon form over GF(2)."""
    a = as_bits(m).copy()
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivots = np.nonzero(a[r:, c])[0]
        if pivots.size == 0:
            continue
        p = r + pivots[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        a[others] ^= a[r]
        r += 1
    return a


def rcef(m) -> np.ndarray:
    """Reduced column echelon form (transpose of the RREF of the transpose)."""
    return rref(as_bits(m).T).T


def matmul(a, b) -> np.ndarray:
    return (as_bits(a).astype(np.int64) @ as_bits(b).astype(np.int64) % 2).astype(np.uint8)


def q_binomial(n: int, k: int) -> int:
    """Number of ``k``-dimensional subspaces of GF(2)^n (Gaussian binomial, q=2)."""
    if not 0 <= k <= n:
        raise ValueError(f"q_binomial needs 0 <= k <= n, got n={n}, k={k}")
    num = den = 1
    for i in range(k):
        num *= 2 ** (n - i) - 1
        den *= 2 ** (k - i) - 1
    return num // den


# -- packed column-space enumeration ------------------------------------------

def _pivot_block(n: int, pivots: tuple[int, ...]) -> np.ndarray:
    """All RCEF matrices with the given pivot rows, as packed columns ``(m, k)``."""
    k = len(pivots)
    pivset = set(pivots)
    free = [(j, r) for j, p in enumerate(pivots) for r in range(p + 1, n) if r not in pivset]
    f = len(free)
    cols = np.tile(np.array([1 << p for p in pivots], dtype=np.int64), (1 << f, 1))
    if f:
        assign = np.arange(1 << f, dtype=np.int64)
        for b, (j, r) in enumerate(free):
            cols[:, j] |= ((assign >> b) & 1) << r
    return cols.reshape(1 << f, k)


def subspace_blocks(n: int, k: int):
    """Yield ``(pivots, cols)`` blocks covering every k-dim subspace of GF(2)^n once.

    ``cols`` has shape ``(m, k)``; row ``i`` lists the packed columns of one
    canonical (RCEF) basis matrix.  Blocks come in lexicographic pivot order
    and, inside a block, in increasing order of the free bits.
    """
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    for pivots in itertools.combinations(range(n), k):
        yield pivots, _pivot_block(n, pivots)


def unpack_columns(cols, n: int) -> np.ndarray:
    cols = list(cols)
    m = np.zeros((n, len(cols)), dtype=np.uint8)
    for j, c in enumerate(cols):
        for r in range(n):
            m[r, j] = (int(c) >> r) & 1
    return m


def pack_columns(m) -> tuple[int, ...]:
    a = as_bits(m)
    return tuple(int(sum(int(a[r, j]) << r for r in range(a.shape[0]))) for j in range(a.shape[1]))


def enumerate_subspaces(n: int, k: int):
    """Canonical ``n x k`` bases (RCEF, rank k) of every k-dim subspace of GF(2)^n."""
    for _, block in subspace_blocks(n, k):
        for cols in block:
            yield unpack_columns(cols, n)


def pivot_rows(r) -> tuple[int, ...]:
    """Pivot row of each column of an RCEF matrix."""
    a = as_bits(r)
    return tuple(int(np.nonzero(a[:, j])[0][0]) for j in range(a.shape[1]))


def is_rcef(r) -> bool:
    a = as_bits(r)
    if a.ndim != 2:
        return False
    return a.shape[1] == 0 or np.array_equal(rcef(a), a) and rank(a) == a.shape[1]


def coset_reps(r) -> list[int]:
    """Canonical representatives of GF(2)^n / Im(R), packed as integers.

    Representatives vanish on the pivot rows of ``R``; there are ``2^(n-k)``.
    """
    a = as_bits(r)
    n, k = a.shape
    if rank(a) != k:
        raise ValueError("coset_reps needs a full-column-rank matrix")
    if not is_rcef(a):
        raise ValueError("coset_reps needs R in reduced column echelon form")
    return list(coset_reps_for_pivots(n, pivot_rows(a)))


def coset_reps_for_pivots(n: int, pivots) -> np.ndarray:
    free = [r for r in range(n) if r not in set(pivots)]
    t = np.zeros(1 << len(free), dtype=np.int64)
    for b, r in enumerate(free):
        t[(np.arange(t.size) >> b) & 1 == 1] |= 1 << r
    return t


def span_table(cols) -> np.ndarray:
    """``span[..., x] = R x`` for every ``x`` in GF(2)^k (bit ``j`` of ``x`` selects column ``j``)."""
    cols = np.asarray(cols, dtype=np.int64)
    span = np.zeros(cols.shape[:-1] + (1,), dtype=np.int64)
    for j in range(cols.shape[-1]):
        span = np.concatenate([span, span ^ cols[..., j : j + 1]], axis=-1)
    return span


def enumerate_upper_triangular(k: int, strict: bool = False):
    """All (strictly) upper triangular ``k x k`` bit matrices.

    Entries are filled row-major over the allowed positions; matrix number
    ``m`` has entry ``i`` set iff bit ``i`` of ``m`` is set.
    """
    positions = upper_positions(k, strict)
    for m in range(1 << len(positions)):
        q = np.zeros((k, k), dtype=np.uint8)
        for b, (i, j) in enumerate(positions):
            q[i, j] = (m >> b) & 1
        yield q


def upper_positions(k: int, strict: bool = True) -> list[tuple[int, int]]:
    off = 1 if strict else 0
    return [(i, j) for i in range(k) for j in range(i + off, k)]


def fwht(a, axis: int = -1) -> np.ndarray:
    """Unnormalised fast Walsh-Hadamard transform along ``axis``.

    ``out[y] = sum_x (-1)^(x.y) a[x]``; the length must be a power of two.
    """
    a = np.moveaxis(np.asarray(a), axis, -1)
    n = a.shape[-1]
    if n & (n - 1):
        raise ValueError("fwht length must be a power of two")
    lead = a.shape[:-1]
    h = 1
    out = a
    while h < n:
        out = out.reshape(*lead, n // (2 * h), 2, h)
        lo, hi = out[..., 0, :], out[..., 1, :]
        out = np.stack((lo + hi, lo - hi), axis=-2)
        h *= 2
    return np.moveaxis(out.reshape(*lead, n), -1, axis)
