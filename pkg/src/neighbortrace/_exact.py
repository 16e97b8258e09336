"""Small exact linear-algebra helpers shared by the lattice modules.

Matrices are ``flint.fmpq_mat`` objects; vectors are tuples of ``Fraction``.
Integer Hermite and Smith forms are delegated to FLINT.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import flint
import numpy as np

Vector = tuple[Fraction, ...]


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, flint.fmpq):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, flint.fmpz):
        return Fraction(int(x))
    return Fraction(x)


def _q(x) -> flint.fmpq:
    x = frac(x)
    return flint.fmpq(x.numerator, x.denominator)


def qmat(rows: Sequence[Sequence]) -> flint.fmpq_mat:
    rows = [list(r) for r in rows]
    if not rows:
        raise ValueError("empty matrix")
    return flint.fmpq_mat([[_q(x) for x in r] for r in rows])


def from_columns(cols: Sequence[Sequence]) -> flint.fmpq_mat:
    cols = [list(c) for c in cols]
    n = len(cols[0])
    return qmat([[cols[j][i] for j in range(len(cols))] for i in range(n)])


def identity(n: int) -> flint.fmpq_mat:
    return qmat([[1 if i == j else 0 for j in range(n)] for i in range(n)])


def rows_of(m: flint.fmpq_mat) -> list[list[Fraction]]:
    return [[frac(m[i, j]) for j in range(m.ncols())] for i in range(m.nrows())]


def columns_of(m: flint.fmpq_mat) -> list[Vector]:
    return [tuple(frac(m[i, j]) for i in range(m.nrows())) for j in range(m.ncols())]


def column_matrix(v: Sequence) -> flint.fmpq_mat:
    return qmat([[x] for x in v])


def apply(m: flint.fmpq_mat, v: Sequence) -> Vector:
    return columns_of(m * column_matrix(v))[0]


def denominator(m: flint.fmpq_mat) -> int:
    d = 1
    for i in range(m.nrows()):
        for j in range(m.ncols()):
            d = lcm(d, int(m[i, j].q))
    return d


def is_integral(m: flint.fmpq_mat) -> bool:
    return denominator(m) == 1


def scaled_int_array(m: flint.fmpq_mat, scale: int | None = None) -> tuple[np.ndarray, int]:
    """Return ``(A, d)`` with ``A = d*m`` an int64 array."""
    d = denominator(m) if scale is None else scale
    rows = rows_of(m)
    out = np.empty((m.nrows(), m.ncols()), dtype=np.int64)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            y = x * d
            if y.denominator != 1:
                raise ValueError("scale does not clear denominators")
            out[i, j] = int(y)
    return out, d


def dot(u: Sequence, v: Sequence, form: flint.fmpq_mat | None = None) -> Fraction:
    if form is None:
        return sum((frac(a) * frac(b) for a, b in zip(u, v)), Fraction(0))
    fv = apply(form, v)
    return sum((frac(a) * b for a, b in zip(u, fv)), Fraction(0))


def hnf_columns(gens: Iterable[Sequence]) -> list[Vector]:
    """A basis (as column vectors) of the Z-module spanned by ``gens``."""
    gens = [tuple(frac(x) for x in g) for g in gens]
    if not gens:
        raise ValueError("no generators")
    d = 1
    for g in gens:
        for x in g:
            d = lcm(d, x.denominator)
    rows = [[int(x * d) for x in g] for g in gens]
    h = flint.fmpz_mat(rows).hnf()
    basis = []
    for i in range(h.nrows()):
        row = [int(h[i, j]) for j in range(h.ncols())]
        if any(row):
            basis.append(tuple(Fraction(x, d) for x in row))
    return basis


def smith_invariants(m: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form (all of them, including 1s)."""
    s = flint.fmpz_mat([[int(x) for x in r] for r in m]).snf()
    k = min(s.nrows(), s.ncols())
    return [abs(int(s[i, i])) for i in range(k) if int(s[i, i]) != 0]


def rank(m: flint.fmpq_mat) -> int:
    return m.rref()[1]


def mat_equal(a: flint.fmpq_mat, b: flint.fmpq_mat) -> bool:
    return a.nrows() == b.nrows() and a.ncols() == b.ncols() and rows_of(a) == rows_of(b)
