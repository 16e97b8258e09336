"""Kneser A-neighbors built from isotropic data mod q or mod p, or from norm-4 vectors.

Isotropic lines are recorded by their coordinates in the lattice basis, reduced
mod ``q``.  Neighbor lattices come back on an LLL-reduced basis; equality is
always tested by mutual membership, never by comparing bases.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import flint
import numpy as np

from ._exact import Vector, columns_of, frac, from_columns, hnf_columns, qmat, rows_of, smith_invariants
from .isometry import reduced_lattice
from .lattice_core import GramLattice

__all__ = [
    "IsotropicLine",
    "NeighborResult",
    "prime_power",
    "isotropic_vectors",
    "isotropic_lines",
    "q_neighbor",
    "repair_family",
    "pk_neighbor",
    "norm4_symmetry",
    "two_neighbor_from_norm4",
    "chain2_neighbors",
    "four_neighbor",
    "lattice_sum",
    "lattice_intersection",
    "quotient_invariants",
    "verify_neighbor",
]


def prime_power(q: int) -> tuple[int, int]:
    """``(p, k)`` with ``q = p**k``; raises for other integers."""
    if q < 2:
        raise ValueError("modulus must be at least 2")
    p = next(d for d in itertools.count(2) if q % d == 0)
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    if r != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, k


@dataclass(frozen=True)
class IsotropicLine:
    """A point of the quadric ``C_L(Z/q)``: basis coordinates of a generator, normalized mod ``q``.

    Normalization: the first coordinate prime to ``q`` equals 1.
    """

    modulus: int
    generator: tuple[int, ...]

    def vector(self, lattice: GramLattice) -> Vector:
        return lattice.vector(self.generator)


@dataclass(frozen=True, eq=False)
class NeighborResult:
    lattice: GramLattice
    meta: object
    intersection_index: tuple[int, ...]


def _int_gram(lattice: GramLattice) -> np.ndarray:
    return np.array(lattice.int_gram(), dtype=np.int64)


def _brute_isotropic(g: np.ndarray, q: int) -> np.ndarray:
    n = g.shape[0]
    p, _ = prime_power(q)
    grid = np.array(list(itertools.product(range(q), repeat=n)), dtype=np.int64)
    norms = np.einsum("ki,ij,kj->k", grid, g, grid)
    ok = (norms % (2 * q) == 0) & np.any(grid % p != 0, axis=1)
    return grid[ok]


def _lifted_isotropic(g: np.ndarray, q: int) -> np.ndarray:
    """Isotropic primitive vectors mod an odd prime power by lifting one digit at a time."""
    p, k = prime_power(q)
    n = g.shape[0]
    cur = _brute_isotropic(g, p)
    digits = np.array(list(itertools.product(range(p), repeat=n)), dtype=np.int64)
    mod = p
    for _ in range(1, k):
        nxt = mod * p
        chunks = []
        for start in range(0, len(cur), 256):
            base = cur[start : start + 256]
            cand = (base[:, None, :] + mod * digits[None, :, :]).reshape(-1, n)
            norms = np.einsum("ki,ij,kj->k", cand, g, cand)
            chunks.append(cand[norms % (2 * nxt) == 0])
        cur = np.concatenate(chunks) if chunks else np.zeros((0, n), dtype=np.int64)
        mod = nxt
    return cur


def isotropic_vectors(lattice: GramLattice, q: int, method: str = "auto") -> np.ndarray:
    """All primitive ``x in L/qL`` (basis coordinates in ``[0, q)``) with ``x.x/2 = 0 mod q``."""
    g = _int_gram(lattice)
    p, k = prime_power(q)
    if method == "brute" or (method == "auto" and (p == 2 or k == 1)):
        return _brute_isotropic(g, q)
    if method in ("auto", "lift"):
        if p == 2:
            raise ValueError("digit lifting is implemented for odd primes")
        return _lifted_isotropic(g, q)
    raise ValueError(f"unknown method {method!r}")


def isotropic_lines(lattice: GramLattice, q: int, method: str = "auto") -> list[IsotropicLine]:
    """One normalized generator per point of ``C_L(Z/q)``, sorted."""
    vecs = isotropic_vectors(lattice, q, method)
    p, _ = prime_power(q)
    # keep vectors whose first unit coordinate is 1
    unit = vecs % p != 0
    first = np.argmax(unit, axis=1)
    lead = vecs[np.arange(len(vecs)), first]
    reps = vecs[lead == 1]
    return [IsotropicLine(q, tuple(int(x) for x in r)) for r in sorted(map(tuple, reps.tolist()))]


def q_neighbor(lattice: GramLattice, line: IsotropicLine) -> NeighborResult:
    """The ``q``-neighbor ``Z.(v'/q) + M`` with ``M`` the preimage of the orthogonal of the line."""
    q = line.modulus
    p, _ = prime_power(q)
    coords = [int(c) for c in line.generator]
    if all(c % p == 0 for c in coords):
        raise ValueError("line generator is not primitive")
    v = lattice.vector(coords)
    if frac(lattice.norm(v)) % (2 * q) != 0:
        raise ValueError("line is not isotropic")
    basis = lattice.basis_vectors()
    pair = [lattice.dot(b, v) for b in basis]
    i0 = next((i for i, a in enumerate(pair) if int(a) % p), None)
    if i0 is None:
        raise ValueError("no basis vector pairs invertibly with the line")
    m = pow(int(pair[i0]) % q, -1, q)
    half_norm = lattice.norm(v) / 2
    vprime = tuple(x - half_norm * m * y for x, y in zip(v, basis[i0]))
    gens = [tuple(pair[i0] * b[a] - pair[i] * basis[i0][a] for a in range(len(v))) for i, b in enumerate(basis) if i != i0]
    gens += [tuple(q * x for x in b) for b in basis]
    gens.append(tuple(x / q for x in vprime))
    nb = reduced_lattice(gens, lattice, f"{lattice.name}-nbr")
    return NeighborResult(nb, line, (q,))


def _solve_mod_p(a: list[list[int]], b: list[list[int]], p: int) -> list[list[int]]:
    """A solution ``X`` of ``a X = b`` over ``Z/p`` (``a`` of full row rank)."""
    rows, cols = len(a), len(a[0])
    k = len(b[0])
    aug = [[x % p for x in a[i]] + [x % p for x in b[i]] for i in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if aug[i][c]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = pow(aug[r][c], -1, p)
        aug[r] = [x * inv % p for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [(x - f * y) % p for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    if r < rows:
        raise ValueError("family is not independent mod p")
    x = [[0] * k for _ in range(cols)]
    for i, c in enumerate(pivots):
        x[c] = aug[i][cols:]
    return x


def _kernel_mod_p(a: list[list[int]], p: int) -> list[list[int]]:
    """Basis of ``{y : a y = 0 mod p}`` as integer vectors."""
    rows, cols = len(a), len(a[0])
    m = [[x % p for x in row] for row in a]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    out = []
    for f in free:
        y = [0] * cols
        y[f] = 1
        for i, c in enumerate(pivots):
            y[c] = (-m[i][f]) % p
        out.append(y)
    return out


def repair_family(lattice: GramLattice, family: Sequence[Sequence[int]], p: int) -> list[tuple[int, ...]]:
    """Adjust ``x_i`` by multiples of ``p`` so that ``v_i.v_i = 0 mod 2p^2`` and ``v_i.v_j = 0 mod p^2``.

    ``family`` holds basis coordinates.  Writing ``v_i = x_i + p w_i`` with
    ``w_i = sum_k c_ik u_k`` and ``u_k.x_l = delta_kl mod p`` turns the conditions
    into ``c_ii = -x_i.x_i/(2p)`` and ``c_ij + c_ji = -x_i.x_j/p``, solved with ``c_ji = 0`` for ``j > i``.
    """
    if p == 2:
        raise ValueError("families are repaired for odd p only")
    g = lattice.int_gram()
    n = len(g)
    xs = [[int(c) for c in x] for x in family]
    k = len(xs)

    def dot(a, b):
        return sum(a[i] * g[i][j] * b[j] for i in range(n) for j in range(n))

    for i in range(k):
        if dot(xs[i], xs[i]) % (2 * p):
            raise ValueError("family vector is not isotropic mod p")
        for j in range(i + 1, k):
            if dot(xs[i], xs[j]) % p:
                raise ValueError("family is not totally isotropic mod p")
    # rows x_l^T G, solve (x^T G) U = I mod p
    xg = [[sum(x[i] * g[i][j] for i in range(n)) for j in range(n)] for x in xs]
    u = _solve_mod_p(xg, [[int(r == c) for c in range(k)] for r in range(k)], p)
    ucols = [[u[a][c] for a in range(n)] for c in range(k)]
    out = []
    for i in range(k):
        coeff = [0] * k
        coeff[i] = (-(dot(xs[i], xs[i]) // (2 * p))) % p
        for j in range(i + 1, k):
            coeff[j] = (-(dot(xs[i], xs[j]) // p)) % p
        w = [sum(coeff[c] * ucols[c][a] for c in range(k)) for a in range(n)]
        out.append(tuple(xs[i][a] + p * w[a] for a in range(n)))
    for i in range(k):
        assert dot(out[i], out[i]) % (2 * p * p) == 0
        for j in range(i + 1, k):
            assert dot(out[i], out[j]) % (p * p) == 0
    return out


def pk_neighbor(lattice: GramLattice, family: Sequence[Sequence[int]], p: int, repair: bool = True) -> NeighborResult:
    """The ``(Z/p)^k``-neighbor ``M + sum_i Z v_i/p`` attached to a totally isotropic family."""
    vs = repair_family(lattice, family, p) if repair else [tuple(int(c) for c in x) for x in family]
    g = lattice.int_gram()
    n = len(g)
    rows = [[sum(v[i] * g[i][j] for i in range(n)) for j in range(n)] for v in vs]
    _solve_mod_p(rows, [[0] * 1 for _ in rows], p)  # independence check
    kernel = _kernel_mod_p(rows, p)
    gens = [lattice.vector(y) for y in kernel]
    gens += [tuple(p * x for x in b) for b in lattice.basis_vectors()]
    gens += [tuple(x / p for x in lattice.vector(v)) for v in vs]
    nb = reduced_lattice(gens, lattice, f"{lattice.name}-nbr")
    return NeighborResult(nb, tuple(vs), (p,) * len(vs))


def norm4_symmetry(lattice: GramLattice, x: Sequence) -> flint.fmpq_mat:
    """Ambient matrix of ``y -> y - ((x.y)/2) x`` (the reflection in a norm-4 vector)."""
    x = tuple(frac(c) for c in x)
    if lattice.norm(x) != 4:
        raise ValueError("vector must have norm 4")
    fx = [sum(frac(lattice.form[k, c]) * x[k] for k in range(len(x))) for c in range(len(x))]
    n = len(x)
    return qmat([[(1 if r == c else 0) - x[r] * fx[c] / 2 for c in range(n)] for r in range(n)])


def _check_norm4(lattice: GramLattice, x: Sequence) -> None:
    if lattice.norm(x) != 4:
        raise ValueError("vector must have norm 4")
    if not lattice.contains(x):
        raise ValueError("vector is not in the lattice")
    if all(int(c) % 2 == 0 for c in lattice.coordinates(x)):
        raise ValueError("vector lies in 2L")


def two_neighbor_from_norm4(lattice: GramLattice, x: Sequence) -> tuple[NeighborResult, flint.fmpq_mat]:
    """``sigma(L)`` for the norm-4 symmetry ``sigma``: the 2-neighbor of the line of ``x`` mod 2."""
    _check_norm4(lattice, x)
    s = norm4_symmetry(lattice, x)
    nb = reduced_lattice([tuple(c) for c in _image_basis(lattice, s)], lattice, f"{lattice.name}-nbr")
    return NeighborResult(nb, tuple(frac(c) for c in x), (2,)), s


def _image_basis(lattice: GramLattice, g: flint.fmpq_mat) -> list[Vector]:
    return columns_of(g * lattice.basis)


def chain2_neighbors(lattice: GramLattice, xs: Sequence[Sequence]) -> tuple[NeighborResult, flint.fmpq_mat]:
    """``sigma_m o ... o sigma_1 (L)`` for pairwise orthogonal norm-4 vectors independent mod 2."""
    xs = [tuple(frac(c) for c in x) for x in xs]
    for x in xs:
        _check_norm4(lattice, x)
    for a, b in itertools.combinations(xs, 2):
        if lattice.dot(a, b) != 0:
            raise ValueError("vectors must be pairwise orthogonal")
    coords = [[int(c) % 2 for c in lattice.coordinates(x)] for x in xs]
    if _rank_mod2(coords) != len(xs):
        raise ValueError("vectors are not independent mod 2")
    s = identity_like(lattice)
    for x in xs:
        s = norm4_symmetry(lattice, x) * s
    nb = reduced_lattice(_image_basis(lattice, s), lattice, f"{lattice.name}-nbr")
    return NeighborResult(nb, tuple(xs), (2,) * len(xs)), s


def four_neighbor(lattice: GramLattice, x1: Sequence, x2: Sequence) -> tuple[NeighborResult, flint.fmpq_mat]:
    """``sigma_2 o sigma_1 (L)`` for norm-4 vectors with odd ``x1.x2``: a 4-neighbor."""
    x1 = tuple(frac(c) for c in x1)
    x2 = tuple(frac(c) for c in x2)
    _check_norm4(lattice, x1)
    _check_norm4(lattice, x2)
    d = lattice.dot(x1, x2)
    if d.denominator != 1 or d.numerator % 2 == 0:
        raise ValueError("x1.x2 must be odd")
    s = norm4_symmetry(lattice, x2) * norm4_symmetry(lattice, x1)
    nb = reduced_lattice(_image_basis(lattice, s), lattice, f"{lattice.name}-nbr")
    return NeighborResult(nb, (x1, x2), (4,)), s


def identity_like(lattice: GramLattice) -> flint.fmpq_mat:
    n = lattice.ambient_dim
    return qmat([[int(i == j) for j in range(n)] for i in range(n)])


def _rank_mod2(rows: list[list[int]]) -> int:
    m = [r[:] for r in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(m)) if m[i][c] % 2), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c] % 2:
                m[i] = [(a + b) % 2 for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def lattice_sum(a: GramLattice, b: GramLattice) -> GramLattice:
    return GramLattice(from_columns(hnf_columns(a.basis_vectors() + b.basis_vectors())), a.form, "", a.embedding)


def _dual(lattice: GramLattice) -> GramLattice:
    return lattice.with_basis(lattice.basis * lattice.gram.inv())


def lattice_intersection(a: GramLattice, b: GramLattice) -> GramLattice:
    """``A cap B = (A# + B#)#`` for full-rank lattices in a nondegenerate ambient space."""
    return _dual(lattice_sum(_dual(a), _dual(b)))


def quotient_invariants(big: GramLattice, small: GramLattice) -> tuple[int, ...]:
    """Nontrivial invariant factors of ``big/small`` (``small`` must be a sublattice)."""
    c = big._basis_inverse * small.basis
    entries = rows_of(c)
    if any(x.denominator != 1 for r in entries for x in r):
        raise ValueError("not a sublattice")
    inv = smith_invariants([[int(x) for x in r] for r in entries])
    if len(inv) != big.rank:
        raise ValueError("sublattice has lower rank")
    return tuple(sorted(x for x in inv if x != 1))


def verify_neighbor(a: GramLattice, b: GramLattice, group: Sequence[int]) -> bool:
    """True iff ``A/(A cap B)`` and ``B/(A cap B)`` are both isomorphic to ``prod Z/group_i``."""
    want = tuple(sorted(int(g) for g in group if int(g) != 1))
    s = lattice_sum(a, b)
    # A/(A cap B) = (A+B)/B and B/(A cap B) = (A+B)/A
    return quotient_invariants(s, b) == want and quotient_invariants(s, a) == want
