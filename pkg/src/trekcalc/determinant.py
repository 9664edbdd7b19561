"""Exact determinants over commutative rings (Poly or Fraction entries)."""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from .poly import Poly


def cofactor_det(matrix: Sequence[Sequence], one=1):
    """Laplace expansion along rows, memoized on the set of remaining columns.

    Costs O(k 2^k) ring multiplications for a k x k matrix.
    """
    k = len(matrix)
    if k == 0:
        return one
    memo: dict[int, object] = {}

    def det(mask: int):
        # mask = columns still available; the current row is k - popcount(mask)
        if mask in memo:
            return memo[mask]
        r = k - bin(mask).count("1")
        if r == k:
            return one
        total = None
        sign = 1
        for c in range(k):
            if not mask >> c & 1:
                continue
            entry = matrix[r][c]
            if entry:
                sub = det(mask & ~(1 << c))
                if sub:
                    term = entry * sub
                    if sign < 0:
                        term = -term
                    total = term if total is None else total + term
            sign = -sign
        if total is None:
            total = one * 0
        memo[mask] = total
        return total

    return det((1 << k) - 1)


def bareiss_det(matrix: Sequence[Sequence], exact_div: Callable, one=1):
    """Fraction-free Bareiss elimination with row pivoting."""
    k = len(matrix)
    if k == 0:
        return one
    m = [list(row) for row in matrix]
    sign = 1
    prev = one
    for p in range(k - 1):
        if not m[p][p]:
            for r in range(p + 1, k):
                if m[r][p]:
                    m[p], m[r] = m[r], m[p]
                    sign = -sign
                    break
            else:
                return one * 0
        piv = m[p][p]
        for i in range(p + 1, k):
            for j in range(p + 1, k):
                m[i][j] = exact_div(piv * m[i][j] - m[i][p] * m[p][j], prev)
        prev = piv
    d = m[k - 1][k - 1]
    return -d if sign < 0 else d


def poly_det(matrix: Sequence[Sequence[Poly]], crossover: int = 6) -> Poly:
    """Cofactor expansion up to ``crossover`` rows, Bareiss above that."""
    one = Poly.constant(1)
    if len(matrix) <= crossover:
        return cofactor_det(matrix, one)
    return bareiss_det(matrix, Poly.exact_div, one)


def _frac_div(x, y):
    return Fraction(x) / y


def rational_det(matrix: Sequence[Sequence]) -> Fraction:
    """Exact determinant of a matrix of ints/Fractions."""
    return Fraction(bareiss_det(matrix, _frac_div, Fraction(1)))

