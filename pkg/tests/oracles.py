"""Independent reference computations used by the tests."""

from itertools import combinations, product

import sympy

U, V = sympy.symbols("u v")


def binary_gcd(a: int, b: int) -> int:
    a, b = abs(a), abs(b)
    if a == 0:
        return b
    if b == 0:
        return a
    shift = 0
    while (a | b) & 1 == 0:
        a >>= 1
        b >>= 1
        shift += 1
    while a & 1 == 0:
        a >>= 1
    while b:
        while b & 1 == 0:
            b >>= 1
        if a > b:
            a, b = b, a
        b -= a
    return a << shift


def fraction_free_rank(rows) -> int:
    """Rank over Q by Bareiss-style elimination on integers."""
    M = [list(r) for r in rows]
    if not M:
        return 0
    rank, col, ncols = 0, 0, len(M[0])
    prev = 1
    while rank < len(M) and col < ncols:
        piv = next((i for i in range(rank, len(M)) if M[i][col]), None)
        if piv is None:
            col += 1
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for i in range(rank + 1, len(M)):
            for j in range(col + 1, ncols):
                M[i][j] = (M[rank][col] * M[i][j] - M[i][col] * M[rank][j]) // prev
            M[i][col] = 0
        prev = M[rank][col]
        rank += 1
        col += 1
    return rank


def _independent(polys) -> bool:
    """True iff the elimination ideal of (Y_i - p_i) in Q[Y] is zero."""
    ys = sympy.symbols(f"y0:{len(polys)}")
    gens = [y - p for y, p in zip(ys, polys)]
    G = sympy.groebner(gens, U, V, *ys, order="lex")
    return not any(not (g.free_symbols & {U, V}) for g in G.exprs)


_cache = {}


def trdeg(polys) -> int:
    key = tuple(sorted(str(p) for p in polys))
    if key not in _cache:
        best = 0
        for k in range(len(polys), 0, -1):
            if any(_independent(list(s)) for s in combinations(polys, k)):
                best = k
                break
        _cache[key] = best
    return _cache[key]


def elimination_transcendence(f, gens) -> str:
    """``independent`` iff adjoining f raises the transcendence degree."""
    return "independent" if trdeg(list(gens) + [f]) > trdeg(list(gens)) else "dependent"


def brute_force_vL(B, support):
    """Lex-min of the L-degrees of all exponents in ``support``."""
    return min(tuple(sum(a * b for a, b in zip(A, row)) for row in B) for A in support)


def exponents_upto(n: int, degree: int):
    return [e for e in product(range(degree + 1), repeat=n) if 0 < sum(e) <= degree]
