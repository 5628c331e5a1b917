"""Nonzero multilinear polynomials vanishing on a point set.

A multilinear polynomial vanishing on every point of H is a kernel vector
of the |H| x 2^n matrix whose (point, monomial) entry is the monomial's
value at the point.  Monomials are ordered by degree, then
lexicographically.  The kernel vector returned puts 1 on the first free
column of the reduced row echelon form and 0 on the other free columns.

Since the RREF of a leading block of columns is the leading block of the
full RREF, and there are at most |H| pivots, the first free column lies
among the first |H| + 1 columns.  Only those columns are built.
"""

from __future__ import annotations

import itertools
from typing import Iterator

import flint

from .algebra import SparseMultilinearPoly
from .hitting import BudgetError, HittingSet

DEFAULT_ROW_BUDGET = 4096


class PreconditionError(ValueError):
    pass


def monomials(n: int) -> Iterator[tuple]:
    """All multilinear monomials over n variables, by degree then lex."""
    for deg in range(n + 1):
        yield from itertools.combinations(range(n), deg)


def _matrix(points, monos, p):
    rows = []
    for pt in points:
        row = []
        for m in monos:
            v = 1
            for i in m:
                v = v * pt[i] % p
                if not v:
                    break
            row.append(v)
        rows.append(row)
    return rows


def _rref_python(rows, ncols, p):
    """Plain Gauss-Jordan elimination; returns (rows, pivot columns)."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        piv = next((i for i in range(r, len(rows)) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        rows[r] = [v * inv % p for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def _rref_flint(rows, ncols, p):
    if not rows:
        return [], []
    M = flint.nmod_mat(len(rows), ncols, [v for r in rows for v in r], p)
    R, rank = M.rref()
    out, pivots = [], []
    for i in range(rank):
        row = [int(R[i, j]) for j in range(ncols)]
        pivots.append(next(j for j, v in enumerate(row) if v))
        out.append(row)
    return out, pivots


def vanishing_multilinear(H: HittingSet, n: int | None = None, engine: str = "flint",
                          max_rows: int = DEFAULT_ROW_BUDGET) -> SparseMultilinearPoly:
    """Nonzero multilinear f with f(p) = 0 for every p in H; needs |H| < 2^n."""
    n = H.n if n is None else n
    if n != H.n:
        raise PreconditionError(f"points have {H.n} coordinates, expected {n}")
    field = H.field
    p = field.p
    if len(H) >= 2 ** n:
        raise PreconditionError(f"|H| = {len(H)} is not below 2^n = {2 ** n}")
    if len(H) > max_rows:
        raise BudgetError(f"|H| = {len(H)} rows exceeds the budget of {max_rows}")
    ncols = len(H) + 1
    monos = list(itertools.islice(monomials(n), ncols))
    rows = _matrix(H.points, monos, p)
    if engine == "flint":
        R, pivots = _rref_flint(rows, ncols, p)
    elif engine == "python":
        R, pivots = _rref_python(rows, ncols, p)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    pivset = set(pivots)
    free = next(j for j in range(ncols) if j not in pivset)
    coeffs = {monos[free]: 1}
    for row, pc in zip(R, pivots):
        if pc < free and row[free]:
            coeffs[monos[pc]] = -row[free] % p
    return SparseMultilinearPoly(n, coeffs, field)


def verify_certificate(f: SparseMultilinearPoly, H: HittingSet) -> bool:
    if f.is_zero() or f.n != H.n:
        return False
    return all(f.eval(pt) == 0 for pt in H.points)
