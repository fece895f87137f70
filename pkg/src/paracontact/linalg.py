"""Small dense linear algebra over :class:`Expr` entries.

Pivots are chosen by numeric magnitude at a few reference points so that an
entry which is identically zero (but not yet recognised as such by the
simplifier) is never used as a pivot.
"""

from __future__ import annotations

from itertools import permutations
from typing import Sequence

from .symexpr import ONE, ZERO, DomainError, Expr, add, as_expr, div, eval_expr, mul, neg

Matrix = list  # list of rows of Expr

PIVOT_TOL = 1e-10


class SingularMatrixError(ArithmeticError):
    pass


def _magnitude(e: Expr, ref_points: Sequence[dict]) -> float:
    if e.is_zero:
        return 0.0
    if e.is_constant:
        return abs(float(e.value)) if hasattr(e, "value") else abs(eval_expr(e, {}))
    vals = []
    for p in ref_points:
        try:
            vals.append(abs(eval_expr(e, p)))
        except DomainError:
            vals.append(0.0)
    return min(vals) if vals else 1.0


def solve(A: Matrix, B: Matrix, ref_points: Sequence[dict]) -> Matrix:
    """Solve ``A X = B`` by Gauss-Jordan elimination (A square, B n-by-m)."""
    n = len(A)
    if any(len(row) != n for row in A) or len(B) != n:
        raise ValueError("solve expects a square system")
    m = len(B[0]) if n else 0
    M = [[as_expr(v) for v in A[i]] + [as_expr(v) for v in B[i]] for i in range(n)]
    ref_points = list(ref_points)[:3]
    for k in range(n):
        mags = [_magnitude(M[r][k], ref_points) for r in range(k, n)]
        best = max(range(len(mags)), key=mags.__getitem__)
        if mags[best] <= PIVOT_TOL:
            raise SingularMatrixError(f"no usable pivot in column {k}")
        r = k + best
        M[k], M[r] = M[r], M[k]
        inv = div(ONE, M[k][k])
        M[k] = [ZERO] * (k + 1) + [mul(inv, v) for v in M[k][k + 1 :]]
        M[k][k] = ONE
        for i in range(n):
            if i == k or M[i][k].is_zero:
                continue
            f = M[i][k]
            M[i] = [add(M[i][j], neg(mul(f, M[k][j]))) if j > k else (ZERO if j == k else M[i][j]) for j in range(n + m)]
    return [row[n:] for row in M]


def inverse(A: Matrix, ref_points: Sequence[dict]) -> Matrix:
    n = len(A)
    eye = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    return solve(A, eye, ref_points)


def _perm_sign(p: Sequence[int]) -> int:
    sign, seen = 1, list(p)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def det(A: Matrix) -> Expr:
    """Leibniz expansion; fine for the n <= 5 systems used here."""
    n = len(A)
    if n == 0:
        return ONE
    terms = []
    for p in permutations(range(n)):
        factors = [as_expr(A[i][p[i]]) for i in range(n)]
        if any(f.is_zero for f in factors):
            continue
        terms.append(mul(*factors) if _perm_sign(p) > 0 else neg(mul(*factors)))
    return add(*terms)


def null_vector(rows: Matrix) -> list[Expr]:
    """Generalised cross product of ``n-1`` rows of length ``n``.

    The result is orthogonal (in the plain dot-product sense) to every row.
    """
    k = len(rows)
    n = k + 1
    if any(len(r) != n for r in rows):
        raise ValueError("null_vector expects n-1 rows of length n")
    out = []
    for j in range(n):
        minor = [[r[c] for c in range(n) if c != j] for r in rows]
        d = det(minor)
        out.append(d if (j + k) % 2 == 0 else neg(d))
    return out


def matmul(A: Matrix, B: Matrix) -> Matrix:
    return [[add(*(mul(A[i][k], B[k][j]) for k in range(len(B)))) for j in range(len(B[0]))] for i in range(len(A))]
