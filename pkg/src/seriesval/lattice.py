"""Integer linear algebra for value matrices.

Matrices are lists of rows of Python ints.  Everything here is sized for the
tiny matrices of the valuation engines (n <= 3 or 4), so elimination is naive.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import List, Sequence

IntMatrix = List[List[int]]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> IntMatrix:
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))]
            for i in range(len(A))]


def transpose(A: Sequence[Sequence[int]]) -> IntMatrix:
    return [list(col) for col in zip(*A)]


def determinant(M: Sequence[Sequence[int]]) -> int:
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    return sum((-1) ** j * M[0][j] * determinant([row[:j] + row[j + 1:] for row in M[1:]])
               for j in range(n) if M[0][j])


def inverse_unimodular(M: Sequence[Sequence[int]]) -> IntMatrix:
    """Exact integer inverse via the adjugate; M must have |det| = 1."""
    n = len(M)
    d = determinant(M)
    if abs(d) != 1:
        raise ValueError(f"matrix is not unimodular (det {d})")
    if n == 1:
        return [[d]]
    adj = [[(-1) ** (i + j) * determinant([r[:i] + r[i + 1:] for k, r in enumerate(M) if k != j])
            for j in range(n)] for i in range(n)]
    return [[d * x for x in row] for row in adj]


# ----------------------------------------------------------------------------
# normal forms
# ----------------------------------------------------------------------------


def smith_normal_form(A: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """``(S, D, T)`` with ``S A T == D`` diagonal, S and T unimodular.

    Diagonal entries are nonnegative and each divides the next.
    """
    m, n = len(A), len(A[0]) if A else 0
    D = [list(r) for r in A]
    S = identity(m)
    T = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        S[i], S[j] = S[j], S[i]

    def swap_cols(i, j):
        for M in (D, T):
            for r in M:
                r[i], r[j] = r[j], r[i]

    def add_row(src, dst, k):  # row dst += k * row src
        D[dst] = [a + k * b for a, b in zip(D[dst], D[src])]
        S[dst] = [a + k * b for a, b in zip(S[dst], S[src])]

    def add_col(src, dst, k):  # col dst += k * col src
        for M in (D, T):
            for r in M:
                r[dst] += k * r[src]

    for t in range(min(m, n)):
        while True:
            nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
            if not nz:
                return S, D, T
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            p = D[t][t]
            done = True
            for i in range(t + 1, m):
                q = D[i][t] // p
                if q:
                    add_row(t, i, -q)
                if D[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = D[t][j] // p
                if q:
                    add_col(t, j, -q)
                if D[t][j]:
                    done = False
            if not done:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            S[t] = [-x for x in S[t]]
    return S, D, T


def invariant_factors(A: Sequence[Sequence[int]]) -> list[int]:
    _, D, _ = smith_normal_form(A)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """Row-style HNF: echelon, positive pivots, entries above pivots in [0, pivot)."""
    H = [list(r) for r in rows]
    if not H:
        return H
    m, n = len(H), len(H[0])
    r = 0
    for c in range(n):
        if r == m:
            break
        # Euclid down the column to leave a single nonzero at row r
        while True:
            nz = [i for i in range(r, m) if H[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(H[i][c]))
            H[r], H[piv] = H[piv], H[r]
            for i in range(r + 1, m):
                q = H[i][c] // H[r][c]
                if q:
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
            if all(H[i][c] == 0 for i in range(r + 1, m)):
                break
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
        for i in range(r):
            q = H[i][c] // H[r][c]
            if q:
                H[i] = [a - q * b for a, b in zip(H[i], H[r])]
        r += 1
    return [row for row in H if any(row)]


# ----------------------------------------------------------------------------
# operations on value matrices
# ----------------------------------------------------------------------------


def _check_value_matrix(B: Sequence[Sequence[int]]) -> None:
    if not B or not B[0]:
        raise ValueError("empty value matrix")
    width = len(B[0])
    if any(len(row) != width for row in B):
        raise ValueError("ragged value matrix")


def generates_full_lattice(B: Sequence[Sequence[int]]) -> bool:
    """True iff the columns of B generate ``Z^m``."""
    _check_value_matrix(B)
    factors = invariant_factors(B)
    return len(factors) == len(B) and all(f == 1 for f in factors)


def kernel_basis(B: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Hermite-reduced basis of ``{y in Z^n : B y = 0}``, sorted lex-descending.

    Column operations on ``[B; I]`` reduce B to echelon form; the identity
    block then holds a unimodular U with ``B U = [H | 0]`` and the trailing
    columns of U span the kernel.
    """
    _check_value_matrix(B)
    m, n = len(B), len(B[0])
    # work on the transpose so column operations become row operations
    W = [list(col) + [int(i == j) for j in range(n)] for i, col in enumerate(zip(*B))]
    r = 0
    for c in range(m):
        while True:
            nz = [i for i in range(r, n) if W[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(W[i][c]))
            W[r], W[piv] = W[piv], W[r]
            for i in range(r + 1, n):
                q = W[i][c] // W[r][c]
                if q:
                    W[i] = [a - q * b for a, b in zip(W[i], W[r])]
            if all(W[i][c] == 0 for i in range(r + 1, n)):
                break
        if r < n and W[r][c]:
            r += 1
    kernel = [row[m:] for row in W[r:]]
    basis = [tuple(v) for v in hermite_normal_form(kernel)]
    return sorted(basis, reverse=True)


@dataclass(frozen=True)
class EuclidSchedule:
    chain: tuple[tuple[int, int], ...]
    gcd: int
    blowups: tuple[int, ...]  # per round: q, or q - 1 when the remainder is 0

    @property
    def total_blowups(self) -> int:
        return sum(self.blowups)


def euclid_schedule(d1: int, d2: int) -> EuclidSchedule:
    """The Euclid chain of ``(d1, d2)`` with the blow-up count of each round."""
    if d1 <= 0 or d2 <= 0:
        raise ValueError("euclid_schedule needs positive integers")
    chain = []
    a, b = d1, d2
    while b:
        q, r = divmod(a, b)
        chain.append((q, r))
        a, b = b, r
    blowups = tuple(q if r else q - 1 for q, r in chain)
    return EuclidSchedule(tuple(chain), a, blowups)


def compose_transforms(steps: Sequence[Sequence[Sequence[int]]], n: int | None = None) -> IntMatrix:
    """Ordered product ``steps[0] @ steps[1] @ ...``; identity when empty."""
    if not steps:
        if n is None:
            raise ValueError("dimension needed for an empty product")
        return identity(n)
    size = len(steps[0])
    out = identity(size)
    for M in steps:
        if len(M) != size or any(len(row) != size for row in M):
            raise ValueError("transforms must all be square of the same size")
        if abs(determinant(M)) != 1:
            raise ValueError("transform is not unimodular")
        out = matmul(out, M)
    return out
