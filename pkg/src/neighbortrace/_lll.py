"""Exact LLL reduction driven by a Gram matrix, plus Smith form with transforms."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def _gso(G: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[Fraction]]:
    n = len(G)
    mu = [[Fraction(0)] * n for _ in range(n)]
    r = [[Fraction(0)] * n for _ in range(n)]
    B = [Fraction(0)] * n
    for i in range(n):
        for j in range(i + 1):
            s = G[i][j]
            for k in range(j):
                s -= mu[j][k] * r[i][k]
            r[i][j] = s
            if j < i:
                mu[i][j] = s / B[j]
        B[i] = r[i][i]
        if B[i] <= 0:
            raise ValueError("Gram matrix is not positive definite")
    return mu, B


def _round(x: Fraction) -> int:
    # nearest integer, ties toward +infinity; any fixed rule keeps runs deterministic
    return (2 * x.numerator + x.denominator) // (2 * x.denominator)


def lll_gram(gram: Sequence[Sequence], delta: Fraction = Fraction(3, 4)) -> list[list[int]]:
    """Return a unimodular integer matrix ``T`` whose rows express an LLL-reduced basis.

    ``gram`` is the Gram matrix of the input basis; row ``i`` of ``T`` holds the
    coordinates of the ``i``-th reduced vector in the input basis.
    """
    n = len(gram)
    G = [[Fraction(x) for x in row] for row in gram]
    T = [[int(i == j) for j in range(n)] for i in range(n)]
    k = 1
    while k < n:
        mu, B = _gso(G)
        for j in range(k - 1, -1, -1):
            c = _round(mu[k][j])
            if c:
                _reduce(G, T, k, j, c)
                mu, B = _gso(G)
        if B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            k += 1
        else:
            T[k], T[k - 1] = T[k - 1], T[k]
            G[k], G[k - 1] = G[k - 1], G[k]
            for row in G:
                row[k], row[k - 1] = row[k - 1], row[k]
            k = max(k - 1, 1)
    return T


def _reduce(G: list[list[Fraction]], T: list[list[int]], k: int, j: int, c: int) -> None:
    """Replace basis vector ``k`` by ``b_k - c*b_j`` and update the Gram matrix."""
    n = len(G)
    T[k] = [a - c * b for a, b in zip(T[k], T[j])]
    gkk = G[k][k] - 2 * c * G[k][j] + c * c * G[j][j]
    for i in range(n):
        if i != k:
            G[k][i] -= c * G[j][i]
            G[i][k] = G[k][i]
    G[k][k] = gkk


def smith_with_transforms(m: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Return ``(S, U, V)`` with ``U*m*V = S`` diagonal, ``U`` and ``V`` unimodular."""
    A = [[int(x) for x in row] for row in m]
    r, c = len(A), len(A[0])
    U = [[int(i == j) for j in range(r)] for i in range(r)]
    V = [[int(i == j) for j in range(c)] for i in range(c)]

    def swap_rows(M, a, b):
        M[a], M[b] = M[b], M[a]

    def swap_cols(M, a, b):
        for row in M:
            row[a], row[b] = row[b], row[a]

    for t in range(min(r, c)):
        while True:
            piv = None
            for i in range(t, r):
                for j in range(t, c):
                    if A[i][j] and (piv is None or abs(A[i][j]) < abs(A[piv[0]][piv[1]])):
                        piv = (i, j)
            if piv is None:
                return A, U, V
            i, j = piv
            swap_rows(A, t, i)
            swap_rows(U, t, i)
            swap_cols(A, t, j)
            swap_cols(V, t, j)
            done = True
            for i in range(t + 1, r):
                q = A[i][t] // A[t][t]
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[t])]
                if A[i][t]:
                    done = False
            for j in range(t + 1, c):
                q = A[t][j] // A[t][t]
                if q:
                    for row in A:
                        row[j] -= q * row[t]
                    for row in V:
                        row[j] -= q * row[t]
                if A[t][j]:
                    done = False
            if not done:
                continue
            bad = next(
                ((i, j) for i in range(t + 1, r) for j in range(t + 1, c) if A[i][j] % A[t][t]),
                None,
            )
            if bad is None:
                break
            i, _ = bad
            A[t] = [a + b for a, b in zip(A[t], A[i])]
            U[t] = [a + b for a, b in zip(U[t], U[i])]
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return A, U, V
