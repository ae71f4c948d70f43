"""Exact arithmetic for finitely generated rational translation lattices.

A lattice is the set of integer combinations of its rational generators.
Membership, kernels and coordinate-subspace intersections reduce to an
integer column echelon form computed with exact Python integers.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Vector = tuple[Fraction, ...]


def vec(values) -> Vector:
    return tuple(Fraction(v) for v in values)


def _scale_to_int(columns: Sequence[Vector]) -> tuple[list[list[int]], int]:
    """Common-denominator scaling: returns integer columns and the scale."""
    denom = 1
    for col in columns:
        for x in col:
            denom = lcm(denom, Fraction(x).denominator)
    cols = [[int(Fraction(x) * denom) for x in col] for col in columns]
    return cols, denom


def column_echelon(int_columns: list[list[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Integer column echelon form via unimodular column operations.

    Returns (H, U) with H = A * U column by column, U unimodular, and H in
    echelon shape: pivot rows strictly increase column by column, trailing
    columns zero.
    """
    m = len(int_columns)
    n = len(int_columns[0]) if m else 0
    H = [list(col) for col in int_columns]
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]

    def colop(j, k, a, b, c, d):
        # (col_j, col_k) <- (a*col_j + b*col_k, c*col_j + d*col_k)
        for mat in (H, U):
            cj, ck = mat[j], mat[k]
            for r in range(len(cj)):
                cj[r], ck[r] = a * cj[r] + b * ck[r], c * cj[r] + d * ck[r]

    pivot_col = 0
    for row in range(n):
        if pivot_col >= m:
            break
        nz = [j for j in range(pivot_col, m) if H[j][row] != 0]
        if not nz:
            continue
        j0 = nz[0]
        for j in nz[1:]:
            a, b = H[j0][row], H[j][row]
            g, x, y = _gcdext(a, b)
            # col_j0 <- x*col_j0 + y*col_j carries the gcd; determinant is 1
            colop(j0, j, x, y, -b // g, a // g)
        if j0 != pivot_col:
            H[j0], H[pivot_col] = H[pivot_col], H[j0]
            U[j0], U[pivot_col] = U[pivot_col], U[j0]
        if H[pivot_col][row] < 0:
            for r in range(n):
                H[pivot_col][r] = -H[pivot_col][r]
            for r in range(m):
                U[pivot_col][r] = -U[pivot_col][r]
        pivot_col += 1
    return H, U


def _gcdext(a: int, b: int) -> tuple[int, int, int]:
    """g, x, y with a*x + b*y = g = gcd(a, b), g > 0 (a, b not both 0)."""
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


class Lattice:
    """Integer span of rational generator vectors in Q^n."""

    def __init__(self, dim: int, generators: Sequence[Sequence]):
        self.dim = dim
        self.generators: tuple[Vector, ...] = tuple(vec(g) for g in generators)
        for g in self.generators:
            if len(g) != dim:
                raise ValueError("generator dimension mismatch")
        cols, denom = _scale_to_int(self.generators)
        self._denom = denom
        H, _ = column_echelon(cols) if cols else ([], [])
        self._echelon = [col for col in H if any(col)]
        self._pivots = [next(r for r, x in enumerate(col) if x) for col in self._echelon]

    def contains(self, v) -> bool:
        """Exact membership by forward substitution against the echelon."""
        target = [Fraction(x) * self._denom for x in vec(v)]
        if len(target) != self.dim:
            raise ValueError("vector dimension mismatch")
        residue = list(target)
        for col, pivot in zip(self._echelon, self._pivots):
            for r in range(pivot):
                if residue[r] != 0:
                    return False
            q = Fraction(residue[pivot], col[pivot])
            if q.denominator != 1:
                return False
            for r in range(self.dim):
                residue[r] -= q * col[r]
        return all(x == 0 for x in residue)

    def intersect_prefix(self, keep: int) -> "Lattice":
        """Intersection with Q^keep + 0: members whose trailing coordinates
        vanish, as a lattice in Q^keep."""
        cols, denom = _scale_to_int(self.generators)
        if not cols:
            return Lattice(keep, [])
        tail = [[col[r] for r in range(keep, self.dim)] for col in cols]
        kernel = integer_kernel(tail)
        gens = []
        for coeffs in kernel:
            w = [Fraction(0)] * keep
            for c, g in zip(coeffs, self.generators):
                for r in range(keep):
                    w[r] += c * g[r]
            gens.append(tuple(w))
        return Lattice(keep, gens)

    def __repr__(self):
        return f"Lattice(dim={self.dim}, generators={[tuple(map(str, g)) for g in self.generators]})"


def integer_kernel(int_columns: list[list[int]]) -> list[list[int]]:
    """Basis of {x in Z^m : sum x_j col_j = 0}.

    The kernel columns of the unimodular transform form a genuine Z-basis,
    not just a finite-index sublattice.
    """
    if not int_columns:
        return []
    H, U = column_echelon(int_columns)
    return [U[j] for j in range(len(int_columns)) if not any(H[j])]
