"""Integer vectors in Z^{d+1} and exact 2-lattice geometry.

Vectors are plain tuples of ints, first coordinate the denominator/height
slot. Fundamental volumes are kept squared (integers); completion of a
sublattice to its real-span intersection with Z^{d+1} divides the minor
vector by its gcd, so squared volumes divide exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import gcd

from ..errors import DependentInput

IntVec = tuple[int, ...]


def vec_add(u: IntVec, v: IntVec) -> IntVec:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vec_sub(u: IntVec, v: IntVec) -> IntVec:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vec_scale(k: int, v: IntVec) -> IntVec:
    return tuple(k * a for a in v)


def vec_dot(u: IntVec, v: IntVec) -> int:
    return sum(a * b for a, b in zip(u, v, strict=True))


def vec_sup_norm(v: IntVec) -> int:
    return max(abs(a) for a in v)


def vec_gcd(v: IntVec) -> int:
    g = 0
    for a in v:
        g = gcd(g, abs(a))
    return g


def is_primitive(v: IntVec) -> bool:
    return vec_gcd(v) == 1


def minors2(v0: IntVec, v1: IntVec) -> tuple[int, ...]:
    """All 2x2 minors of the 2-row matrix (v0; v1), index pairs i < j."""
    n = len(v0)
    return tuple(v0[i] * v1[j] - v0[j] * v1[i] for i, j in combinations(range(n), 2))


def cross3(v0: IntVec, v1: IntVec) -> IntVec:
    """Cross product in Z^3; coordinates are the 2x2 minors up to sign."""
    return (
        v0[1] * v1[2] - v0[2] * v1[1],
        v0[2] * v1[0] - v0[0] * v1[2],
        v0[0] * v1[1] - v0[1] * v1[0],
    )


def fundamental_volume_sq(v0: IntVec, v1: IntVec) -> int:
    """Squared fundamental volume of the 2-lattice spanned by v0, v1."""
    ms = minors2(v0, v1)
    vol = sum(m * m for m in ms)
    if vol == 0:
        raise DependentInput("v1 is a rational multiple of v0")
    return vol


def is_complete(v0: IntVec, v1: IntVec) -> bool:
    """True iff <v0,v1>_Z equals span(v0,v1) intersected with Z^{d+1}."""
    ms = minors2(v0, v1)
    g = 0
    for m in ms:
        g = gcd(g, abs(m))
    if g == 0:
        raise DependentInput("v1 is a rational multiple of v0")
    return g == 1


def completed_volume_sq(v0: IntVec, v1: IntVec) -> int:
    """Squared fundamental volume of span(v0,v1) ∩ Z^{d+1} (the completion)."""
    ms = minors2(v0, v1)
    vol = sum(m * m for m in ms)
    if vol == 0:
        raise DependentInput("v1 is a rational multiple of v0")
    g = 0
    for m in ms:
        g = gcd(g, abs(m))
    assert vol % (g * g) == 0
    return vol // (g * g)


def det_int(rows: list[list[int]]) -> int:
    """Exact determinant of a small square integer matrix (Laplace expansion)."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = 0
    rest = rows[1:]
    for j, pivot in enumerate(rows[0]):
        if pivot == 0:
            continue
        sub = [[r[k] for k in range(n) if k != j] for r in rest]
        total += (-1) ** j * pivot * det_int(sub)
    return total


def minors_k(vectors: list[IntVec], k: int) -> tuple[int, ...]:
    """All k x k minors of the k-row matrix with the given rows."""
    assert len(vectors) == k
    n = len(vectors[0])
    out = []
    for cols in combinations(range(n), k):
        out.append(det_int([[v[c] for c in cols] for v in vectors]))
    return tuple(out)


def completed_volume_sq_k(vectors: list[IntVec]) -> int:
    """Squared volume of the completion of the rank-k lattice they span.

    Cauchy-Binet: the raw squared volume is the sum of squared k x k minors;
    completion divides the minor vector by its gcd.
    """
    ms = minors_k(vectors, len(vectors))
    vol = sum(m * m for m in ms)
    if vol == 0:
        raise DependentInput("vectors are linearly dependent")
    g = 0
    for m in ms:
        g = gcd(g, abs(m))
    assert vol % (g * g) == 0
    return vol // (g * g)


def int_rank(rows: list[IntVec]) -> int:
    """Rank of an integer matrix, exact fraction-free elimination."""
    mat = [list(r) for r in rows]
    if not mat:
        return 0
    n_cols = len(mat[0])
    rank = 0
    prev_pivot = 1
    col = 0
    while rank < len(mat) and col < n_cols:
        pivot_row = next((i for i in range(rank, len(mat)) if mat[i][col]), None)
        if pivot_row is None:
            col += 1
            continue
        mat[rank], mat[pivot_row] = mat[pivot_row], mat[rank]
        pivot = mat[rank][col]
        for i in range(rank + 1, len(mat)):
            for j in range(col + 1, n_cols):
                # Bareiss step: stays integral, keeps entries small
                mat[i][j] = (pivot * mat[i][j] - mat[i][col] * mat[rank][j]) // prev_pivot
            mat[i][col] = 0
        prev_pivot = pivot
        rank += 1
        col += 1
    return rank


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a x + b y = g = gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def bezout3(n: IntVec) -> tuple[int, IntVec]:
    """(g, u) with <u, n> = g = gcd of the three coordinates."""
    g12, x, y = ext_gcd(n[0], n[1])
    g, z, w = ext_gcd(g12, n[2])
    return g, (z * x, z * y, w)


@dataclass(frozen=True)
class PlaneLattice:
    """Integer 2-lattice <v0, v1> with exact squared fundamental volume."""

    v0: IntVec
    v1: IntVec
    delta_sq: int
    complete: bool

    @classmethod
    def from_basis(cls, v0: IntVec, v1: IntVec) -> "PlaneLattice":
        return cls(v0, v1, fundamental_volume_sq(v0, v1), is_complete(v0, v1))
