"""Exact linear algebra over the rationals (fractions.Fraction).

Small dense systems only; everything is O(n^3) Gaussian elimination.  Used
for the exact spectral mode when the growth rate is rational.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

Vector = list[Fraction]
Matrix = list[list[Fraction]]


def to_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(mat: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form (copy) and pivot column indices."""
    a = [row[:] for row in mat]
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if a[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return a, pivots


def nullspace(mat: Matrix) -> list[Vector]:
    """Basis of the kernel of ``mat``."""
    nrows = len(mat)
    ncols = len(mat[0]) if nrows else 0
    red, pivots = rref(mat)
    pivot_set = set(pivots)
    basis: list[Vector] = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for row_idx, pc in enumerate(pivots):
            v[pc] = -red[row_idx][free]
        basis.append(v)
    return basis


def solve(mat: Matrix, rhs: Vector) -> Optional[Vector]:
    """One exact solution of mat @ x = rhs, or None if inconsistent.

    Free variables are set to zero.
    """
    nrows = len(mat)
    ncols = len(mat[0]) if nrows else 0
    aug = [mat[i][:] + [rhs[i]] for i in range(nrows)]
    red, pivots = rref(aug)
    for row in red:
        if all(x == 0 for x in row[:ncols]) and row[ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for row_idx, pc in enumerate(pivots):
        if pc == ncols:  # pivot in the rhs column: inconsistent (caught above)
            return None
        x[pc] = red[row_idx][ncols]
    return x


def eigen_projection(mat: Matrix, lam: Fraction, vec: Vector,
                     transpose: bool = False) -> Optional[Vector]:
    """Projection of ``vec`` onto the lam-eigenspace along range(M - lam I).

    Solves (M - lam I) w + B a = vec with B a kernel basis and returns B a,
    which is the unique eigenvector component when the eigenvalue's algebraic
    and geometric multiplicities agree.  Returns None when the combined system
    is inconsistent (degenerate eigenstructure) or lam is not an eigenvalue.
    """
    n = len(mat)
    shifted = [[(mat[j][i] if transpose else mat[i][j]) - (lam if i == j else 0)
                for j in range(n)] for i in range(n)]
    basis = nullspace(shifted)
    if not basis:
        return None
    k = len(basis)
    aug = [shifted[i][:] + [basis[b][i] for b in range(k)] for i in range(n)]
    sol = solve(aug, list(vec))
    if sol is None:
        return None
    alpha = sol[n:]
    return [sum(basis[b][i] * alpha[b] for b in range(k)) for i in range(n)]


def rational_eigenvalue_candidate(value: float, max_denominator: int = 10**6,
                                  tol: float = 1e-9) -> Optional[Fraction]:
    """A nearby rational, or None if no convincing candidate exists."""
    cand = Fraction(value).limit_denominator(max_denominator)
    if abs(float(cand) - value) <= tol * max(1.0, abs(value)):
        return cand
    return None
