"""Explicit isometries between root-spanned lattices of rank at most 9.

Given an isomorphic pair ``L, L'`` in the same ambient space, a generating family
of ``L'`` is first reduced to a basis.  A simple system of its roots, renumbered to
match a reference Dynkin diagram, is then sent onto the simple system of ``L``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import flint

from ._exact import Vector, columns_of, frac, from_columns, hnf_columns, is_integral, qmat, rows_of
from ._lll import lll_gram
from .lattice_core import GramLattice, roots, standard_lattice
from .weyl import SimpleRootSystem

__all__ = [
    "DynkinMatch",
    "IsometryError",
    "lll_reduce",
    "reduced_lattice",
    "simple_system",
    "reference_cartan",
    "dynkin_renumber",
    "e7_index_chase",
    "isometry_between",
]


class IsometryError(ValueError):
    """The two lattices could not be matched (not isomorphic, or not root-spanned)."""


@dataclass(frozen=True)
class DynkinMatch:
    """``permutation[l]`` is the (0-based) index of the target simple root placed at reference position ``l``."""

    permutation: tuple[int, ...]

    def apply(self, items: Sequence) -> list:
        return [items[i] for i in self.permutation]


def lll_reduce(generators: Sequence[Sequence], form: flint.fmpq_mat) -> list[Vector]:
    """An LLL-reduced (delta = 3/4) basis of the lattice spanned by ``generators`` under ``form``.

    Generators may be dependent; a Hermite basis is computed first, then reduced exactly.
    """
    basis = hnf_columns(generators)
    n = form.nrows()
    if len(basis) != n:
        raise ValueError(f"generators span rank {len(basis)}, expected {n}")
    bm = from_columns(basis)
    gram = rows_of(bm.transpose() * form * bm)
    t = lll_gram(gram)
    return [tuple(sum((t[i][k] * basis[k][a] for k in range(n)), Fraction(0)) for a in range(n)) for i in range(n)]


def reduced_lattice(generators: Sequence[Sequence], like: GramLattice, name: str = "") -> GramLattice:
    """The lattice spanned by ``generators`` in the ambient space of ``like``, on an LLL basis."""
    basis = lll_reduce(generators, like.form)
    return GramLattice(from_columns(basis), like.form, name, like.embedding)


def _lex_positive(v: Sequence[Fraction]) -> bool:
    for x in v:
        if x:
            return x > 0
    return False


def simple_system(lattice: GramLattice) -> SimpleRootSystem:
    """Simple roots of ``R(lattice)`` for the positive system of lexicographically positive roots.

    ``rho`` is half the sum of the positive roots; simple roots are the positive
    roots that are not a sum of two positive roots.
    """
    rs = list(roots(lattice))
    pos = [r for r in rs if _lex_positive(r)]
    n = lattice.ambient_dim
    rho = tuple(sum((r[a] for r in pos), Fraction(0)) / 2 for a in range(n))
    posset = set(pos)
    simple = []
    for b in pos:
        if not any(tuple(x - y for x, y in zip(b, g)) in posset for g in pos if g != b):
            simple.append(b)
    if len(simple) != lattice.rank:
        raise IsometryError("roots do not span a full-rank root system")
    simple.sort(reverse=True)
    if not _spans(lattice, simple):
        raise IsometryError("lattice is not spanned by its roots")
    form = tuple(tuple(frac(x) for x in row) for row in rows_of(lattice.form))
    return SimpleRootSystem(lattice.name or "lattice", tuple(simple), rho, form, tuple(rs))


def _spans(lattice: GramLattice, vectors: Sequence[Vector]) -> bool:
    m = from_columns(vectors)
    c = lattice._basis_inverse * m
    return is_integral(c) and abs(frac(c.det())) == 1


@lru_cache(maxsize=None)
def reference_cartan(kind: str) -> tuple[tuple[int, ...], ...]:
    """Reference Gram matrix of simple roots for ``E7``, ``E8``, ``E8+A1``, ``A<n>``, ``D<n>``."""
    key = kind.upper().replace(" ", "").replace("⊕", "+")
    if key in ("E8+A1", "E8A1"):
        e8 = reference_cartan("E8")
        n = 9
        return tuple(
            tuple(e8[i][j] if i < 8 and j < 8 else (2 if i == j == 8 else 0) for j in range(n)) for i in range(n)
        )
    lat = standard_lattice(key)
    return tuple(tuple(int(x) for x in row) for row in rows_of(lat.gram))


def dynkin_renumber(gram: Sequence[Sequence[int]], kind: str) -> DynkinMatch:
    """Reindex simple roots so that their Gram matrix equals ``reference_cartan(kind)``.

    Generic backtracking over the diagram; among equivalent answers (diagram
    automorphisms) the lexicographically first permutation is returned.
    """
    ref = reference_cartan(kind)
    b = [[int(x) for x in row] for row in gram]
    n = len(ref)
    if len(b) != n:
        raise IsometryError(f"rank mismatch for type {kind}")
    perm: list[int] = []
    used = [False] * n

    def extend(pos: int) -> bool:
        if pos == n:
            return True
        for cand in range(n):
            if used[cand] or b[cand][cand] != ref[pos][pos]:
                continue
            if all(b[cand][perm[q]] == ref[pos][q] for q in range(pos)):
                used[cand] = True
                perm.append(cand)
                if extend(pos + 1):
                    return True
                perm.pop()
                used[cand] = False
        return False

    if not extend(0):
        raise IsometryError(f"Gram matrix is not of type {kind}")
    return DynkinMatch(tuple(perm))


def e7_index_chase(gram: Sequence[Sequence[int]]) -> DynkinMatch:
    """Direct E7 renumbering from row sums and neighbourhoods of the branch node.

    Node degree ``d`` gives row sum ``2 - d``: the branch node has sum -1, the three
    leaves sum +1, the three inner chain nodes sum 0.
    """
    b = [[int(x) for x in row] for row in gram]
    n = 7
    if len(b) != n:
        raise IsometryError("E7 needs 7 simple roots")
    sums = [sum(b[i][j] for i in range(n)) for j in range(n)]
    branch = [i for i in range(n) if sums[i] == -1]
    if len(branch) != 1:
        raise IsometryError("no unique branch node")
    i4 = branch[0]
    nb4 = {j for j in range(n) if b[i4][j] == -1}
    leaves = {j for j in range(n) if sums[j] == 1}
    inner = {j for j in range(n) if sums[j] == 0}
    second = {j for j in range(n) if any(b[i][j] == -1 for i in nb4)}

    def single(s: set) -> int:
        if len(s) != 1:
            raise IsometryError("diagram is not of type E7")
        return next(iter(s))

    i1 = single(leaves & second)
    i2 = single(nb4 & leaves)
    i6 = single(inner & second)
    i7 = single(leaves - {i1, i2})
    i3 = single({j for j in range(n) if b[i1][j] == -1})
    i5 = single(set(range(n)) - {i1, i2, i3, i4, i6, i7})
    return DynkinMatch((i1, i2, i3, i4, i5, i6, i7))


def _reference_kind(lattice: GramLattice, kind: str | None) -> str:
    if kind:
        return kind
    name = (lattice.name or "").upper()
    for k in ("E8+A1", "E7", "E8"):
        if name.startswith(k):
            return k
    raise IsometryError("cannot infer the Dynkin type; pass kind explicitly")


def _ordered_simple_roots(lattice: GramLattice, kind: str) -> list[Vector]:
    system = simple_system(lattice)
    gram = [[int(system.dot(a, c)) for c in system.simple_roots] for a in system.simple_roots]
    match = dynkin_renumber(gram, kind)
    return match.apply(list(system.simple_roots))


def isometry_between(source: GramLattice, target: GramLattice, kind: str | None = None) -> flint.fmpq_mat:
    """An ambient matrix ``g`` of determinant +1 preserving the form with ``g(source) = target``."""
    if source.ambient_dim != target.ambient_dim or rows_of(source.form) != rows_of(target.form):
        raise IsometryError("lattices live in different ambient spaces")
    k = _reference_kind(source, kind)
    alphas = _ordered_simple_roots(source, k)
    betas = _ordered_simple_roots(target, k)
    a = from_columns(alphas)
    ainv = a.inv()
    g = from_columns(betas) * ainv
    if frac(g.det()) != 1:
        if k.upper() in ("E8+A1", "E8A1"):
            betas = betas[:-1] + [tuple(-x for x in betas[-1])]
            g = from_columns(betas) * ainv
        else:
            s1 = _reflection(source, alphas[0])
            g = g * s1
    if frac(g.det()) != 1:
        raise IsometryError("could not reach determinant +1")
    if not source.preserves_form(g):
        raise IsometryError("diagram match does not preserve the form")
    image = source.with_basis(g * source.basis)
    if not image.same_lattice(target):
        raise IsometryError("image lattice differs from the target")
    return g


def _reflection(lattice: GramLattice, root: Sequence) -> flint.fmpq_mat:
    n = lattice.ambient_dim
    froot = columns_of(lattice.form * qmat([[x] for x in root]))[0]
    nr = lattice.norm(root)
    return qmat([[(1 if r == c else 0) - 2 * frac(root[r]) * froot[c] / nr for c in range(n)] for r in range(n)])
