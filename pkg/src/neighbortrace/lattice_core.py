"""Even lattices in rational ambient space: standard models, roots, theta series, residues.

A lattice is stored as a matrix of basis columns in ambient coordinates together
with the ambient inner product, so that the Gram matrix is ``basis^T * form * basis``.
Every computation here is exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import isqrt
from typing import Sequence

import flint

from ._exact import (
    Vector,
    apply,
    columns_of,
    frac,
    from_columns,
    identity,
    is_integral,
    qmat,
    rows_of,
)
from ._lll import lll_gram, smith_with_transforms

__all__ = [
    "GramLattice",
    "ResidueGroup",
    "RootSet",
    "E7_SIMPLE_ROOTS_MODEL",
    "E8_EXTRA_SIMPLE_ROOT",
    "standard_lattice",
    "roots",
    "short_vectors",
    "theta_coefficients",
    "residue",
]

_H = Fraction(1, 2)

# Seven simple roots of E7 inside the 8-coordinate model {x in E8 : sum(x) = 0}.
E7_SIMPLE_ROOTS_MODEL: tuple[Vector, ...] = tuple(
    tuple(_H * c for c in v)
    for v in (
        (-1, 1, 1, 1, -1, -1, -1, 1),
        (-1, 1, 1, -1, -1, 1, 1, -1),
        (1, -1, -1, 1, -1, 1, 1, -1),
        (1, -1, 1, -1, 1, -1, -1, 1),
        (-1, 1, -1, 1, 1, -1, 1, -1),
        (1, 1, -1, -1, -1, 1, -1, 1),
        (-1, -1, 1, 1, 1, 1, -1, -1),
    )
)
# Completing the E7 simple roots to a simple system of E8.
E8_EXTRA_SIMPLE_ROOT: Vector = tuple(Fraction(c) for c in (0, 0, 0, 0, 0, 0, 1, 1))


@dataclass(frozen=True, eq=False)
class GramLattice:
    """An integral lattice ``basis * Z^rank`` inside ``(Q^ambient_dim, form)``.

    ``embedding``, when present, maps ambient coordinates isometrically into a
    larger coordinate model with the standard inner product (used for E7 and A_n).
    """

    basis: flint.fmpq_mat
    form: flint.fmpq_mat
    name: str = ""
    embedding: flint.fmpq_mat | None = field(default=None, repr=False)

    @property
    def ambient_dim(self) -> int:
        return self.basis.nrows()

    @property
    def rank(self) -> int:
        return self.basis.ncols()

    @cached_property
    def gram(self) -> flint.fmpq_mat:
        return self.basis.transpose() * self.form * self.basis

    @cached_property
    def det(self) -> Fraction:
        return frac(self.gram.det())

    @cached_property
    def _basis_inverse(self) -> flint.fmpq_mat:
        if self.rank != self.ambient_dim:
            raise ValueError("coordinates are only defined for full-rank lattices")
        return self.basis.inv()

    def gram_rows(self) -> list[list[Fraction]]:
        return rows_of(self.gram)

    def int_gram(self) -> list[list[int]]:
        rows = self.gram_rows()
        if any(x.denominator != 1 for r in rows for x in r):
            raise ValueError(f"{self.name or 'lattice'} is not integral")
        return [[int(x) for x in r] for r in rows]

    def dot(self, u: Sequence, v: Sequence) -> Fraction:
        fv = apply(self.form, v)
        return sum((frac(a) * b for a, b in zip(u, fv)), Fraction(0))

    def norm(self, v: Sequence) -> Fraction:
        return self.dot(v, v)

    def coordinates(self, v: Sequence) -> Vector:
        """Coordinates of an ambient vector in the lattice basis."""
        return apply(self._basis_inverse, v)

    def vector(self, coords: Sequence) -> Vector:
        """Ambient vector with the given basis coordinates."""
        return apply(self.basis, coords)

    def contains(self, v: Sequence) -> bool:
        return all(c.denominator == 1 for c in self.coordinates(v))

    def is_integral(self) -> bool:
        return is_integral(self.gram)

    def is_even(self) -> bool:
        if not self.is_integral():
            return False
        g = self.gram_rows()
        return all(g[i][i].numerator % 2 == 0 for i in range(self.rank))

    def basis_vectors(self) -> list[Vector]:
        return columns_of(self.basis)

    def with_basis(self, basis: flint.fmpq_mat, name: str | None = None) -> "GramLattice":
        return GramLattice(basis, self.form, self.name if name is None else name, self.embedding)

    def preserves_form(self, g: flint.fmpq_mat) -> bool:
        """True when the ambient matrix ``g`` is an isometry of the ambient form."""
        return rows_of(g.transpose() * self.form * g) == rows_of(self.form)

    def stabilizes(self, g: flint.fmpq_mat) -> bool:
        """True when ``g`` maps this lattice onto itself."""
        return self.preserves_form(g) and is_integral(self._basis_inverse * g * self.basis)

    def to_model(self, v: Sequence) -> Vector:
        return tuple(frac(x) for x in v) if self.embedding is None else apply(self.embedding, v)

    def same_lattice(self, other: "GramLattice") -> bool:
        if self.ambient_dim != other.ambient_dim or self.rank != other.rank:
            return False
        a = self._basis_inverse * other.basis
        b = other._basis_inverse * self.basis
        return is_integral(a) and is_integral(b)


@dataclass(frozen=True)
class RootSet:
    vectors: tuple[Vector, ...]

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def positive(self, rho: Sequence, lattice: GramLattice) -> list[Vector]:
        """Roots with positive pairing against ``rho`` (which must be regular)."""
        out = []
        for r in self.vectors:
            s = lattice.dot(r, rho)
            if s == 0:
                raise ValueError("rho is orthogonal to a root")
            if s > 0:
                out.append(r)
        return out


@dataclass(frozen=True)
class ResidueGroup:
    """The finite group ``L#/L`` with a cyclic decomposition and its discriminant forms.

    ``generators`` are dual vectors in ambient coordinates; ``linking_form`` maps an
    index pair to ``x.y mod 1``; ``quadratic_values`` gives ``x.x/2 mod 1``.
    """

    generators: tuple[Vector, ...]
    structure: tuple[int, ...]
    linking_form: dict[tuple[int, int], Fraction]
    quadratic_values: tuple[Fraction, ...]

    @property
    def order(self) -> int:
        out = 1
        for s in self.structure:
            out *= s
        return out


def _mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def _cartan_matrix_a(n: int) -> list[list[int]]:
    return [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)]


def _lattice_a(n: int) -> GramLattice:
    # root coordinates, embedded in Q^(n+1) via alpha_i = e_i - e_{i+1}
    emb = [[0] * n for _ in range(n + 1)]
    for i in range(n):
        emb[i][i] = 1
        emb[i + 1][i] = -1
    return GramLattice(identity(n), qmat(_cartan_matrix_a(n)), f"A{n}", qmat(emb))


def _lattice_d(n: int) -> GramLattice:
    if n < 2:
        raise ValueError("D_n needs n >= 2")
    cols = []
    for i in range(n - 1):
        v = [0] * n
        v[i], v[i + 1] = 1, -1
        cols.append(v)
    v = [0] * n
    v[n - 2], v[n - 1] = 1, 1
    cols.append(v)
    return GramLattice(from_columns(cols), identity(n), f"D{n}")


def _lattice_e7() -> GramLattice:
    emb = from_columns(E7_SIMPLE_ROOTS_MODEL)
    cartan = emb.transpose() * emb
    return GramLattice(identity(7), cartan, "E7", emb)


def _lattice_e8() -> GramLattice:
    return GramLattice(from_columns(E7_SIMPLE_ROOTS_MODEL + (E8_EXTRA_SIMPLE_ROOT,)), identity(8), "E8")


def _lattice_e8a1() -> GramLattice:
    cols = [tuple(v) + (Fraction(0),) for v in E7_SIMPLE_ROOTS_MODEL + (E8_EXTRA_SIMPLE_ROOT,)]
    cols.append(tuple(Fraction(0) for _ in range(8)) + (Fraction(1),))
    form = [[0] * 9 for _ in range(9)]
    for i in range(8):
        form[i][i] = 1
    form[8][8] = 2
    return GramLattice(from_columns(cols), qmat(form), "E8+A1")


_ALIASES = {"E8+A1": "E8A1", "E8⊕A1": "E8A1", "E8A1": "E8A1", "E8_A1": "E8A1"}


def standard_lattice(name: str) -> GramLattice:
    """Return A_n, D_n, E7, E8 or E8+A1 (names are case-insensitive)."""
    key = name.strip().upper().replace(" ", "")
    key = _ALIASES.get(key, key)
    if key == "E7":
        return _lattice_e7()
    if key == "E8":
        return _lattice_e8()
    if key == "E8A1":
        return _lattice_e8a1()
    m = re.fullmatch(r"([AD])_?(\d+)", key)
    if m:
        n = int(m.group(2))
        if n >= 1:
            return _lattice_a(n) if m.group(1) == "A" else _lattice_d(n)
    raise ValueError(f"unknown lattice name: {name!r}")


def _reduced_gram(lattice: GramLattice) -> tuple[list[list[Fraction]], list[list[int]]]:
    g = lattice.gram_rows()
    t = lll_gram(g)
    n = len(g)
    red = [[sum(t[i][a] * g[a][b] * t[j][b] for a in range(n) for b in range(n)) for j in range(n)] for i in range(n)]
    return red, t


def _floor_sqrt(x: Fraction) -> int:
    return isqrt(x.numerator * x.denominator) // x.denominator


def _enumerate_coords(gram: list[list[Fraction]], bound: Fraction):
    """Yield ``(x, x^T gram x)`` for integer ``x != 0`` with norm at most ``bound`` (Fincke-Pohst)."""
    n = len(gram)
    # Q(x) = sum_i d_i (x_i + sum_{j>i} u_ij x_j)^2
    u = [[Fraction(0)] * n for _ in range(n)]
    d = [Fraction(0)] * n
    a = [[Fraction(x) for x in r] for r in gram]
    for i in range(n):
        d[i] = a[i][i]
        for j in range(i + 1, n):
            u[i][j] = a[i][j] / d[i]
        for j in range(i + 1, n):
            for k in range(j, n):
                a[j][k] -= d[i] * u[i][j] * u[i][k]
                a[k][j] = a[j][k]
    x = [0] * n

    def rec(i: int, budget: Fraction):
        c = sum((u[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        r = budget / d[i]
        s = _floor_sqrt(r) + 1
        centre = -c
        lo = (centre - s).__floor__()
        hi = (centre + s).__ceil__()
        for v in range(lo, hi + 1):
            t = (v + c) ** 2
            if t > r:
                continue
            x[i] = v
            rest = budget - d[i] * t
            if i == 0:
                if any(x):
                    yield tuple(x), bound - rest
            else:
                yield from rec(i - 1, rest)
        x[i] = 0

    bound = Fraction(bound)
    yield from rec(n - 1, bound)


def short_vectors(lattice: GramLattice, max_norm: int) -> list[tuple[int, Vector]]:
    """All nonzero lattice vectors of norm at most ``max_norm``, as ``(norm, ambient vector)``.

    Both ``v`` and ``-v`` are listed.  The search runs on an LLL-reduced basis.
    """
    red, t = _reduced_gram(lattice)
    n = len(red)
    basis = lattice.basis_vectors()
    reduced_basis = [tuple(sum(t[i][k] * basis[k][a] for k in range(n)) for a in range(lattice.ambient_dim)) for i in range(n)]
    out = []
    for x, nrm in _enumerate_coords(red, Fraction(max_norm)):
        v = tuple(sum((x[i] * reduced_basis[i][a] for i in range(n)), Fraction(0)) for a in range(lattice.ambient_dim))
        out.append((int(nrm) if nrm.denominator == 1 else nrm, v))
    out.sort(key=lambda p: (p[0], p[1]))
    return out


def roots(lattice: GramLattice) -> RootSet:
    """All vectors of norm 2."""
    if not lattice.is_even():
        raise ValueError("roots are defined here for even lattices")
    return RootSet(tuple(v for nrm, v in short_vectors(lattice, 2) if nrm == 2))


def theta_coefficients(lattice: GramLattice, count: int) -> list[int]:
    """``[#{x : x.x = 2k} for k in 0..count]`` for an even lattice."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    if not lattice.is_even():
        raise ValueError("theta coefficients by half-norm need an even lattice")
    out = [1] + [0] * count
    if count == 0:
        return out
    red, _ = _reduced_gram(lattice)
    for _, nrm in _enumerate_coords(red, Fraction(2 * count)):
        out[int(nrm) // 2] += 1
    return out


def residue(lattice: GramLattice) -> ResidueGroup:
    """Cyclic decomposition of ``L#/L`` with its linking and quadratic forms."""
    g = lattice.int_gram()
    s, _u, v = smith_with_transforms(g)
    n = len(g)
    gens: list[Vector] = []
    orders: list[int] = []
    coords: list[list[Fraction]] = []
    # L# = G^{-1} Z^n and G^{-1} = V S^{-1} U, so V S^{-1} e_i generate L#/L.
    for i in range(n):
        si = abs(s[i][i])
        if si > 1:
            c = [Fraction(v[k][i], si) for k in range(n)]
            coords.append(c)
            orders.append(si)
            gens.append(lattice.vector(c))
    gram = lattice.gram_rows()

    def pair(a, b):
        return sum((a[i] * gram[i][j] * b[j] for i in range(n) for j in range(n)), Fraction(0))

    link = {(i, j): _mod1(pair(coords[i], coords[j])) for i in range(len(coords)) for j in range(len(coords))}
    quad = tuple(_mod1(pair(c, c) / 2) for c in coords)
    return ResidueGroup(tuple(gens), tuple(orders), link, quad)
