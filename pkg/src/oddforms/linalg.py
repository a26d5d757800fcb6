"""Small exact linear algebra over Q and over Z/mZ.

Matrices are lists of rows.  Everything here is exact; sizes at desk scale
are tiny, so plain Python lists beat the overhead of anything heavier.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Sequence


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (nonzero rows, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def independent_subset(rows: Sequence[Sequence]) -> list[int]:
    """Indices of a maximal independent subset, greedily in input order."""
    keep: list[int] = []
    basis: list[Sequence] = []
    for i, r in enumerate(rows):
        if rank(basis + [r]) > len(basis):
            basis.append(r)
            keep.append(i)
    return keep


def in_span(rows: Sequence[Sequence], v: Sequence) -> bool:
    if not rows:
        return all(x == 0 for x in v)
    return rank(list(rows) + [v]) == rank(rows)


def solve(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """One rational solution of ``A x = b`` (free variables set to 0), or None."""
    if not A:
        return [] if all(x == 0 for x in b) else None
    n = len(A[0])
    aug = [list(r) + [bi] for r, bi in zip(A, b)]
    red, piv = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for row, c in zip(red, piv):
        x[c] = row[n]
    return x


def nullspace(A: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of ``{x : A x = 0}``."""
    if not A:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    n = len(A[0])
    red, piv = rref(A)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, c in zip(red, piv):
            v[c] = -row[f]
        basis.append(v)
    return basis


def left_kernel_vector(rows: Sequence[Sequence]) -> list[Fraction] | None:
    """Non-zero ``c`` with ``sum_i c_i rows[i] == 0``, or None if independent."""
    if not rows:
        return None
    cols = [list(col) for col in zip(*rows)]
    ns = nullspace(cols) if cols else [[Fraction(int(i == j)) for j in range(len(rows))] for i in range(len(rows))]
    return ns[0] if ns else None


# -- integer helpers ----------------------------------------------------------


def det(M: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant (Bareiss fraction-free elimination)."""
    n = len(M)
    if n == 0:
        return 1
    a = [list(map(int, r)) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def valuation(n: int, p: int, cap: int | None = None) -> int:
    """p-adic valuation of ``n``; ``cap`` (or infinity for 0 without cap) bounds it."""
    if n == 0:
        if cap is None:
            raise ValueError("valuation of 0 is infinite")
        return cap
    v = 0
    while n % p == 0:
        n //= p
        v += 1
        if cap is not None and v >= cap:
            return cap
    return v


def rank_mod(rows: Sequence[Sequence[int]], p: int) -> int:
    """Rank over the field F_p."""
    m = [[x % p for x in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(r + 1, len(m)):
            if m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def solve_mod(M: Sequence[Sequence[int]], b: Sequence[int], p: int, modulus: int) -> list[int]:
    """Solve the square system ``M x = b`` modulo ``modulus = p^k``.

    ``det M`` must be a unit mod ``p``; pivots are chosen coprime to ``p``.
    """
    n = len(M)
    a = [[x % modulus for x in r] + [bi % modulus] for r, bi in zip(M, b)]
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] % p), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular modulo p")
        a[c], a[piv] = a[piv], a[c]
        inv = pow(a[c][c], -1, modulus)
        a[c] = [x * inv % modulus for x in a[c]]
        for i in range(n):
            if i != c and a[i][c]:
                f = a[i][c]
                a[i] = [(u - f * v) % modulus for u, v in zip(a[i], a[c])]
    return [a[i][n] for i in range(n)]


def minors(M: Sequence[Sequence[int]], size: int, columns: Sequence[int] | None = None):
    """Yield ``(column tuple, determinant)`` for every ``size x size`` minor using all rows."""
    ncols = len(M[0]) if M else 0
    cols = range(ncols) if columns is None else columns
    for cs in combinations(cols, size):
        yield cs, det([[row[c] for c in cs] for row in M])


def min_minor_valuation(M: Sequence[Sequence[int]], p: int, cap: int) -> tuple[int, tuple[int, ...] | None]:
    """Smallest p-adic valuation (capped) over all maximal minors of ``M``."""
    R = len(M)
    if R == 0:
        return 0, ()
    best, best_cols = cap, None
    for cs, dv in minors(M, R):
        v = valuation(dv, p, cap)
        if v < best:
            best, best_cols = v, cs
            if v == 0:
                break
    return best, best_cols
