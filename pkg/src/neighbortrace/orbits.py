"""Orbits of isotropic lines mod q, and of 2-adic neighbor data, under W', W and W+.

Odd ``q``: the formula route works in model coordinates.  Every point of
``C_L(Z/q)`` is a line spanned by a vector of ``(Z/q)^8`` (``(Z/q)^9`` for
E8+A1).  The subgroup ``W'`` has a complete invariant on vectors:

* E7, ``W' = S8 x {+-1}``: the sorted coordinates of ``v`` or of ``-v``;
* E8, ``W' = S8 x even sign changes``: the sorted absolute residues together
  with the sign product ``signe_q``;
* E8+A1: the E8 invariant of the first eight coordinates plus ``|w|``.

The invariant of a line is the minimum over units ``i`` of the invariant of
``i.v``.  Orbit sizes come from stabilizer counts.  ``W``-orbits are unions of
``W'``-orbits glued by the coset representatives ``H_7``/``H_8``, and E8
``W``-orbits split in two under ``W+`` unless some ``h(v)`` has two equal or
opposite coordinates.

The brute-force route acts with explicit group generators on all points of the
quadric in lattice-basis coordinates and labels connected components; it is the
oracle for the formula route and the only route for the 2-adic structures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, partial
from math import factorial
from typing import Callable, Sequence

import flint
import numpy as np

from ._exact import frac, qmat, rows_of
from .isometry import simple_system
from .lattice_core import GramLattice, short_vectors, standard_lattice
from .neighbors import (
    IsotropicLine,
    NeighborResult,
    chain2_neighbors,
    four_neighbor,
    isotropic_vectors,
    prime_power,
    q_neighbor,
    two_neighbor_from_norm4,
    verify_neighbor,
)
from .weyl import _kind, coset_reps, model_to_lattice

__all__ = [
    "GROUP_TAGS",
    "OrbitData",
    "IsotropicSubspace",
    "orbit_reps_Wdouble",
    "orbit_reps_Wprime",
    "merge_to_W",
    "refine_to_Wplus",
    "wplus_orbits",
    "quadric_size",
    "line_key",
    "model_to_coords",
    "coords_to_model",
    "brute_force_orbits",
    "connecting_element",
    "two_adic_orbits",
    "TwoAdicGroup",
]

GROUP_TAGS = ("W''", "W'", "W", "W+")

_MAX_CODE = 2**62


@dataclass(frozen=True)
class IsotropicSubspace:
    """A totally singular subspace of ``L/2L``: basis coordinates of its nonzero vectors, sorted."""

    modulus: int
    vectors: tuple[tuple[int, ...], ...]

    @property
    def dimension(self) -> int:
        return (len(self.vectors) + 1).bit_length() - 1


@dataclass(frozen=True)
class OrbitData:
    """One orbit: a representative, its size, the acting group and (optionally) a neighbor constructor.

    ``model_vector`` is the representative generator in model coordinates mod ``q``
    (empty for 2-adic data).  ``construct()`` builds the neighbor lattice of the
    representative.
    """

    representative: IsotropicLine | IsotropicSubspace
    cardinality: int
    group_tag: str
    model_vector: tuple[int, ...] = ()
    construct: Callable[[], NeighborResult] | None = field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------------------
# modular helpers


def _check_odd(q: int) -> tuple[int, int]:
    p, k = prime_power(q)
    if p == 2:
        raise ValueError("even moduli are handled by two_adic_orbits")
    return p, k


def _units(q: int) -> np.ndarray:
    p, _ = prime_power(q)
    return np.array([i for i in range(1, q) if i % p], dtype=np.int64)


def _mod(x: Fraction, q: int) -> int:
    x = frac(x)
    return x.numerator * pow(x.denominator, -1, q) % q


def _matrix_mod(m: flint.fmpq_mat, q: int) -> np.ndarray:
    return np.array([[_mod(x, q) for x in row] for row in rows_of(m)], dtype=np.int64)


def _dim(kind: str) -> int:
    return 9 if kind == "E8+A1" else 8


def _isotropic_mask(kind: str, v: np.ndarray, q: int) -> np.ndarray:
    p, _ = prime_power(q)
    sq = v[:, :8] * v[:, :8]
    if kind == "E7":
        ok = (v.sum(axis=1) % q == 0) & (sq.sum(axis=1) % q == 0)
    elif kind == "E8":
        ok = sq.sum(axis=1) % q == 0
    else:
        ok = (sq.sum(axis=1) + 2 * v[:, 8] * v[:, 8]) % q == 0
    return ok & np.any(v % p != 0, axis=1)


# ---------------------------------------------------------------------------
# invariants


def _encode(rows: np.ndarray, base: int) -> np.ndarray:
    if base ** rows.shape[1] * 3 * base > _MAX_CODE:
        raise ValueError("modulus too large for packed orbit keys")
    code = np.zeros(rows.shape[0], dtype=np.int64)
    for j in range(rows.shape[1]):
        code = code * base + rows[:, j]
    return code


def _signs(v: np.ndarray, q: int) -> np.ndarray:
    """``signe_q`` row by row."""
    r = v % q
    zero = np.any(r == 0, axis=1)
    neg = np.sum(r > (q - 1) // 2, axis=1) % 2
    out = np.where(neg == 1, -1, 1)
    out[zero] = 0
    return out


def _abs_residues(v: np.ndarray, q: int) -> np.ndarray:
    r = v % q
    return np.minimum(r, q - r)


def _vector_key(kind: str, v: np.ndarray, q: int) -> np.ndarray:
    """Packed complete ``W'``-invariant of each row of ``v`` (entries in ``[0, q)``)."""
    if kind == "E7":
        a = np.sort(v % q, axis=1)
        b = np.sort((-v) % q, axis=1)
        return np.minimum(_encode(a, q), _encode(b, q))
    half = (q - 1) // 2 + 1
    a = np.sort(_abs_residues(v[:, :8], q), axis=1)
    code = _encode(a, half) * 3 + (_signs(v[:, :8], q) + 1)
    if kind == "E8+A1":
        code = code * half + _abs_residues(v[:, 8], q)
    return code


def _line_keys(kind: str, v: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """``(line key, stabilizing-unit count)`` for each row: min over units, and ``#{i : key(i v) = key(v)}``."""
    units = _units(q)
    keys = np.stack([_vector_key(kind, (i * v) % q, q) for i in units])
    own = keys[0]
    return keys.min(axis=0), (keys == own[None, :]).sum(axis=0)


def line_key(kind: str, vector: Sequence[int], q: int) -> int:
    """Complete ``W'``-invariant of the line spanned by a model vector mod ``q``."""
    k = _kind(kind)
    _check_odd(q)
    v = np.array([[int(x) % q for x in vector]], dtype=np.int64)
    return int(_line_keys(k, v, q)[0][0])


def _multiplicity_factor(rows: np.ndarray) -> np.ndarray:
    out = np.ones(rows.shape[0], dtype=object)
    s = np.sort(rows, axis=1)
    for r in range(rows.shape[0]):
        _, counts = np.unique(s[r], return_counts=True)
        f = 1
        for c in counts:
            f *= factorial(int(c))
        out[r] = f
    return out


def _vector_orbit_sizes(kind: str, v: np.ndarray, q: int, group: str) -> list[int]:
    """Size of the vector orbit ``G.v`` for ``G = W'`` or ``W''``."""
    if kind == "E7":
        mult = _multiplicity_factor(v % q)
        self_opposite = np.all(np.sort(v % q, axis=1) == np.sort((-v) % q, axis=1), axis=1)
        return [factorial(8) // int(m) * (1 if so else 2) for m, so in zip(mult, self_opposite)]
    a = _abs_residues(v[:, :8], q)
    mult = _multiplicity_factor(a)
    zeros = (a == 0).sum(axis=1)
    out = []
    for r in range(v.shape[0]):
        size = 2 ** (8 - int(zeros[r])) * factorial(8) // int(mult[r])
        if group == "W'" and zeros[r] == 0:
            size //= 2
        if kind == "E8+A1" and v[r, 8] % q:
            size *= 2
        out.append(size)
    return out


def _double_key(kind: str, v: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Line invariant for ``W''`` (sign product dropped)."""
    units = _units(q)
    half = (q - 1) // 2 + 1
    keys = []
    for i in units:
        a = np.sort(_abs_residues((i * v[:, :8]) % q, q), axis=1)
        code = _encode(a, half)
        if kind == "E8+A1":
            code = code * half + _abs_residues((i * v[:, 8]) % q, q)
        keys.append(code)
    keys = np.stack(keys)
    return keys.min(axis=0), (keys == keys[0][None, :]).sum(axis=0)


# ---------------------------------------------------------------------------
# candidate enumeration


def _candidates(kind: str, q: int) -> np.ndarray:
    """Model vectors meeting every ``W'``-orbit of lines, sorted lexicographically."""
    if kind == "E7":
        rows = np.array(list(itertools.combinations_with_replacement(range(q), 8)), dtype=np.int64)
    else:
        h = (q - 1) // 2
        base = np.array(list(itertools.combinations_with_replacement(range(h + 1), 8)), dtype=np.int64)
        flipped = base.copy()
        flipped[:, 0] = (-flipped[:, 0]) % q
        rows = np.concatenate([base, flipped[base[:, 0] != 0]])
        if kind == "E8+A1":
            ws = np.arange(h + 1, dtype=np.int64)
            rows = np.concatenate([np.hstack([rows, np.full((len(rows), 1), w, dtype=np.int64)]) for w in ws])
    rows = rows[_isotropic_mask(kind, rows, q)]
    order = np.lexsort(rows.T[::-1])
    return rows[order]


def _first_per_key(keys: np.ndarray) -> np.ndarray:
    _, first = np.unique(keys, return_index=True)
    return np.sort(first)


def model_to_coords(kind: str, vector: Sequence[int], q: int) -> tuple[int, ...]:
    """Lattice-basis coordinates mod ``q`` of a model vector (``standard_lattice(kind)``)."""
    k = _kind(kind)
    lat = standard_lattice(k)
    v = [int(x) % q for x in vector]
    if k == "E7":
        if sum(v) % q:
            raise ValueError("E7 model vectors have coordinate sum 0 mod q")
        v[-1] -= sum(v)
        emb = lat.embedding
        ambient = lat.form.inv() * emb.transpose() * flint.fmpq_mat(8, 1, [int(x) for x in v])
    else:
        ambient = flint.fmpq_mat(len(v), 1, v)
    coords = lat._basis_inverse * ambient
    return tuple(_mod(frac(coords[i, 0]), q) for i in range(coords.nrows()))


def coords_to_model(kind: str, coords: Sequence[int], q: int) -> tuple[int, ...]:
    k = _kind(kind)
    lat = standard_lattice(k)
    v = lat.to_model(lat.vector(coords))
    return tuple(_mod(x, q) for x in v)


def _line(kind: str, model: Sequence[int], q: int) -> IsotropicLine:
    p, _ = prime_power(q)
    coords = model_to_coords(kind, model, q)
    lead = next(c for c in coords if c % p)
    inv = pow(lead, -1, q)
    return IsotropicLine(q, tuple(c * inv % q for c in coords))


def _orbit(kind: str, model: Sequence[int], q: int, size: int, tag: str) -> OrbitData:
    line = _line(kind, model, q)
    construct = partial(q_neighbor, standard_lattice(kind), line)
    return OrbitData(line, int(size), tag, tuple(int(x) for x in model), construct)


# ---------------------------------------------------------------------------
# formula route


def quadric_size(kind: str, q: int) -> int:
    """``|C_L(Z/q)|`` by counting isotropic primitive vectors of ``L/qL`` and dividing by the unit count."""
    lat = standard_lattice(_kind(kind))
    return len(isotropic_vectors(lat, q)) // len(_units(q))


def orbit_reps_Wdouble(L: str, q: int) -> list[OrbitData]:
    """Orbits under ``W'' = S8 x all sign changes`` (times ``+-1`` on ``w`` for E8+A1)."""
    k = _kind(L)
    if k == "E7":
        raise ValueError("W'' is defined for E8 and E8+A1")
    _check_odd(q)
    cand = _candidates(k, q)
    keys, stab = _double_key(k, cand, q)
    idx = _first_per_key(keys)
    sizes = _vector_orbit_sizes(k, cand[idx], q, "W''")
    return [_orbit(k, cand[i], q, sizes[j] // int(stab[i]), "W''") for j, i in enumerate(idx)]


def orbit_reps_Wprime(L: str, q: int) -> list[OrbitData]:
    """One canonical representative and the size of every ``W'``-orbit on ``C_L(Z/q)``, q odd.

    The representative is the lexicographically smallest candidate in its key
    class; its smallest nonzero coordinate is 1.
    """
    k = _kind(L)
    _check_odd(q)
    cand = _candidates(k, q)
    keys, stab = _line_keys(k, cand, q)
    idx = _first_per_key(keys)
    sizes = _vector_orbit_sizes(k, cand[idx], q, "W'")
    out = []
    for j, i in enumerate(idx):
        size, rem = divmod(sizes[j], int(stab[i]))
        if rem:
            raise ArithmeticError("stabilizer count does not divide the orbit size")
        out.append(_orbit(k, cand[i], q, size, "W'"))
    return out


@lru_cache(maxsize=None)
def _coset_matrices_mod(kind: str, q: int) -> tuple[np.ndarray, ...]:
    base = "E8" if kind == "E8+A1" else kind
    mats = []
    for h in coset_reps(base).reps:
        m = _matrix_mod(h.matrix, q)
        if kind == "E8+A1":
            big = np.eye(9, dtype=np.int64)
            big[:8, :8] = m
            m = big
        mats.append(m)
    return tuple(mats)


def _find(parent: list[int], a: int) -> int:
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


def merge_to_W(L: str, q: int, wprime_orbits: Sequence[OrbitData]) -> list[OrbitData]:
    """Glue ``W'``-orbits into ``W``-orbits: ``W.x`` is the union of the ``W'.h(x)`` for ``h`` in ``H_n``."""
    k = _kind(L)
    _check_odd(q)
    reps = np.array([o.model_vector for o in wprime_orbits], dtype=np.int64)
    own, _ = _line_keys(k, reps, q)
    index = {int(c): i for i, c in enumerate(own)}
    parent = list(range(len(reps)))
    for h in _coset_matrices_mod(k, q):
        images = (reps @ h.T) % q
        keys, _ = _line_keys(k, images, q)
        for a, c in enumerate(keys):
            b = index.get(int(c))
            if b is None:
                raise ArithmeticError("image of a representative is not among the W'-orbits")
            ra, rb = _find(parent, a), _find(parent, b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for i in range(len(reps)):
        groups.setdefault(_find(parent, i), []).append(i)
    out = []
    for root in sorted(groups):
        members = groups[root]
        first = wprime_orbits[members[0]]
        total = sum(wprime_orbits[i].cardinality for i in members)
        out.append(OrbitData(first.representative, total, "W", first.model_vector, first.construct))
    return out


def _has_equal_or_opposite(rows: np.ndarray, q: int) -> np.ndarray:
    r = rows[:, :8] % q
    hit = np.zeros(len(r), dtype=bool)
    for i, j in itertools.combinations(range(8), 2):
        hit |= (r[:, i] == r[:, j]) | ((r[:, i] + r[:, j]) % q == 0)
    return hit


def refine_to_Wplus(L: str, q: int, w_orbits: Sequence[OrbitData]) -> list[OrbitData]:
    """``W+``-orbits.  For E7 and E8+A1, ``-1`` acts trivially on lines, so nothing splits."""
    k = _kind(L)
    _check_odd(q)
    if k != "E8":
        return [OrbitData(o.representative, o.cardinality, "W+", o.model_vector, o.construct) for o in w_orbits]
    mats = _coset_matrices_mod(k, q)
    out = []
    for o in w_orbits:
        v = np.array(o.model_vector, dtype=np.int64)
        images = np.stack([(h @ v) % q for h in mats])
        if _has_equal_or_opposite(images, q).any():
            out.append(OrbitData(o.representative, o.cardinality, "W+", o.model_vector, o.construct))
            continue
        if o.cardinality % 2:
            raise ArithmeticError("a splitting orbit must have even size")
        swapped = list(o.model_vector)
        swapped[0], swapped[1] = swapped[1], swapped[0]
        out.append(_orbit(k, o.model_vector, q, o.cardinality // 2, "W+"))
        out.append(_orbit(k, swapped, q, o.cardinality // 2, "W+"))
    return out


def wplus_orbits(L: str, q: int) -> list[OrbitData]:
    """Full pipeline ``W' -> W -> W+`` for an odd prime power."""
    k = _kind(L)
    return refine_to_Wplus(k, q, merge_to_W(k, q, orbit_reps_Wprime(k, q)))


# ---------------------------------------------------------------------------
# brute-force route (explicit action on all points, lattice-basis coordinates)


def _basis_matrix(lattice: GramLattice, ambient: flint.fmpq_mat) -> flint.fmpq_mat:
    return lattice._basis_inverse * ambient * lattice.basis


def _reflection_ambient(lattice: GramLattice, root: Sequence) -> flint.fmpq_mat:
    n = lattice.ambient_dim
    r = [frac(x) for x in root]
    fr = [sum(frac(lattice.form[a, c]) * r[a] for a in range(n)) for c in range(n)]
    nr = lattice.norm(r)
    return qmat([[(1 if i == j else 0) - 2 * r[i] * fr[j] / nr for j in range(n)] for i in range(n)])


@lru_cache(maxsize=None)
def _reflections_in_basis(kind: str) -> tuple[flint.fmpq_mat, ...]:
    lat = standard_lattice(kind)
    system = simple_system(lat)
    return tuple(_basis_matrix(lat, _reflection_ambient(lat, a)) for a in system.simple_roots)


@lru_cache(maxsize=None)
def _wprime_model_generators(kind: str) -> tuple[flint.fmpq_mat, ...]:
    n = _dim(kind)
    gens = []
    for i in range(7):
        m = [[int(r == c) for c in range(n)] for r in range(n)]
        m[i][i] = m[i + 1][i + 1] = 0
        m[i][i + 1] = m[i + 1][i] = 1
        gens.append(qmat(m))
    if kind in ("E8", "E8+A1"):
        m = [[int(r == c) for c in range(n)] for r in range(n)]
        m[0][0] = m[1][1] = -1
        gens.append(qmat(m))
    if kind == "E8+A1":
        m = [[int(r == c) for c in range(n)] for r in range(n)]
        m[8][8] = -1
        gens.append(qmat(m))
    return tuple(gens)


def _group_generators(kind: str, group: str) -> list[flint.fmpq_mat]:
    """Generators in lattice-basis coordinates (columns act on coordinate columns)."""
    refl = list(_reflections_in_basis(kind))
    if group == "W":
        return refl
    if group == "W+":
        return [refl[0] * s for s in refl[1:]] + [s * refl[0] for s in refl[1:]]
    if group == "W'":
        lat = standard_lattice(kind)
        return [_basis_matrix(lat, model_to_lattice(kind, m)) for m in _wprime_model_generators(kind)]
    raise ValueError(f"unknown group {group!r}")


def _normalize_lines(v: np.ndarray, q: int) -> np.ndarray:
    p, _ = prime_power(q)
    inv = np.zeros(q, dtype=np.int64)
    for i in range(1, q):
        if i % p:
            inv[i] = pow(i, -1, q)
    first = np.argmax(v % p != 0, axis=1)
    lead = v[np.arange(len(v)), first]
    return (v * inv[lead][:, None]) % q


def _components(codes: np.ndarray, images: list[np.ndarray]) -> np.ndarray:
    """Component labels (smallest member index) of the graph ``i -> images[g][i]``."""
    labels = np.arange(len(codes))
    while True:
        new = labels.copy()
        for img in images:
            np.minimum(new, new[img], out=new)
            new[img] = np.minimum(new[img], new)
        new = new[new]
        if np.array_equal(new, labels):
            return labels
        labels = new


def _all_lines(kind: str, q: int) -> np.ndarray:
    lat = standard_lattice(kind)
    vecs = isotropic_vectors(lat, q)
    lines = np.unique(_normalize_lines(vecs, q), axis=0)
    return lines


def _action_labels(kind: str, q: int, group: str, points: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    pts = _all_lines(kind, q) if points is None else points
    codes = _encode(pts, q)
    order = np.argsort(codes)
    pts, codes = pts[order], codes[order]
    images = []
    for g in _group_generators(kind, group):
        m = _matrix_mod(g, q)
        img = _normalize_lines((pts @ m.T) % q, q)
        pos = np.searchsorted(codes, _encode(img, q))
        if np.any(pos >= len(codes)) or np.any(codes[np.minimum(pos, len(codes) - 1)] != _encode(img, q)):
            raise ArithmeticError("generator does not preserve the quadric")
        images.append(pos)
    return pts, _components(codes, images)


def brute_force_orbits(L: str, q: int, group: str = "W+") -> list[OrbitData]:
    """Orbits found by acting with explicit generators on every point of ``C_L(Z/q)``.

    Works for any prime power ``q`` (including 2 and 4); ``group`` is ``W'``, ``W``
    or ``W+``.  The representative of an orbit is its smallest normalized point.
    """
    k = _kind(L)
    pts, labels = _action_labels(k, q, group)
    roots, counts = np.unique(labels, return_counts=True)
    lat = standard_lattice(k)
    out = []
    for r, c in zip(roots, counts):
        line = IsotropicLine(q, tuple(int(x) for x in pts[r]))
        model = coords_to_model(k, line.generator, q) if q % 2 else ()
        out.append(OrbitData(line, int(c), group, model, partial(q_neighbor, lat, line)))
    return out


def connecting_element(L: str, q: int, source: IsotropicLine, target: IsotropicLine, group: str = "W+") -> flint.fmpq_mat:
    """A basis-coordinate matrix ``g`` of ``group`` with ``g(source)`` proportional to ``target`` mod ``q``.

    Breadth-first search from ``source`` over generator words; raises ``LookupError``
    when the two lines lie in different orbits.
    """
    k = _kind(L)
    gens = _group_generators(k, group)
    mods = [_matrix_mod(g, q) for g in gens]
    start = tuple(int(x) for x in _normalize_lines(np.array([source.generator]), q)[0])
    goal = tuple(int(x) for x in _normalize_lines(np.array([target.generator]), q)[0])
    seen = {start: None}
    frontier = [start]
    while frontier and goal not in seen:
        nxt = []
        block = np.array(frontier, dtype=np.int64)
        for gi, m in enumerate(mods):
            imgs = _normalize_lines((block @ m.T) % q, q)
            for src, img in zip(frontier, map(tuple, imgs.tolist())):
                if img not in seen:
                    seen[img] = (src, gi)
                    nxt.append(img)
        frontier = nxt
    if goal not in seen:
        raise LookupError("lines lie in different orbits")
    g = qmat([[int(i == j) for j in range(len(start))] for i in range(len(start))])
    cur = goal
    while seen[cur] is not None:
        cur, gi = seen[cur]
        g = g * gens[gi]
    return g


# ---------------------------------------------------------------------------
# 2-adic structures


@dataclass(frozen=True)
class TwoAdicGroup:
    """``(Z/2)^rank`` when ``cyclic`` is False, ``Z/4`` when it is True."""

    rank: int = 1
    cyclic: bool = False

    @classmethod
    def parse(cls, text: str) -> "TwoAdicGroup":
        t = text.replace(" ", "").lower()
        if t in ("z4", "z/4", "4"):
            return cls(1, True)
        if t.startswith("2k:") or t.startswith("2^"):
            return cls(int(t[3:] if t.startswith("2k:") else t[2:]), False)
        if t in ("z2", "z/2", "2"):
            return cls(1, False)
        raise ValueError(f"unrecognized 2-adic group {text!r}")

    @property
    def invariants(self) -> tuple[int, ...]:
        return (4,) if self.cyclic else (2,) * self.rank


_EXPECTED_ORBITS = {
    ("E7", TwoAdicGroup(1)): 1,
    ("E7", TwoAdicGroup(2)): 1,
    ("E7", TwoAdicGroup(3)): 1,
    ("E7", TwoAdicGroup(1, True)): 1,
    ("E8", TwoAdicGroup(1)): 1,
    ("E8", TwoAdicGroup(2)): 1,
    ("E8", TwoAdicGroup(3)): 1,
    ("E8", TwoAdicGroup(4)): 2,
    ("E8", TwoAdicGroup(1, True)): 1,
    ("E8+A1", TwoAdicGroup(1)): 2,
}


def _bits(coords: Sequence[int]) -> int:
    return sum((int(c) % 2) << i for i, c in enumerate(coords))


def _unbits(x: int, n: int) -> tuple[int, ...]:
    return tuple((x >> i) & 1 for i in range(n))


def _singular_subspaces(lattice: GramLattice, rank: int) -> list[frozenset[int]]:
    """Totally singular ``rank``-dimensional subspaces of ``L/2L`` as sets of nonzero bit-vectors."""
    g = lattice.int_gram()
    n = len(g)

    def q2(x: int) -> int:
        c = _unbits(x, n)
        return sum(g[i][j] * c[i] * c[j] for i in range(n) for j in range(n)) // 2 % 2

    def b2(x: int, y: int) -> int:
        cx, cy = _unbits(x, n), _unbits(y, n)
        return sum(g[i][j] * cx[i] * cy[j] for i in range(n) for j in range(n)) % 2

    points = [x for x in range(1, 2**n) if q2(x) == 0]
    perp = {x: frozenset(y for y in points if b2(x, y) == 0) for x in points}
    layer = {frozenset([x]) for x in points}
    for _ in range(1, rank):
        nxt = set()
        for s in layer:
            allowed = frozenset.intersection(*(perp[x] for x in s)) - s
            for y in allowed:
                nxt.add(s | {y ^ x for x in s} | {y})
        layer = nxt
    return sorted(layer, key=lambda s: sorted(s))


def _act_bits(m: np.ndarray, x: int, n: int) -> int:
    c = np.array(_unbits(x, n), dtype=np.int64)
    return _bits((m @ c) % 2)


def _subspace_orbits(kind: str, rank: int) -> tuple[list[frozenset[int]], np.ndarray]:
    lat = standard_lattice(kind)
    n = lat.rank
    subs = _singular_subspaces(lat, rank)
    index = {s: i for i, s in enumerate(subs)}
    images = []
    for g in _group_generators(kind, "W+"):
        m = _matrix_mod(g, 2)
        act = {x: _act_bits(m, x, n) for x in range(1, 2**n)}
        images.append(np.array([index[frozenset(act[x] for x in s)] for s in subs], dtype=np.int64))
    return subs, _components(np.arange(len(subs)), images)


def _norm4_vectors(lattice: GramLattice) -> list[tuple[Fraction, ...]]:
    return [v for norm, v in short_vectors(lattice, 4) if norm == 4]


def _span_bits(lattice: GramLattice, xs: Sequence[Sequence]) -> frozenset[int]:
    vs = [_bits([int(c) for c in lattice.coordinates(x)]) for x in xs]
    span = {0}
    for v in vs:
        span |= {s ^ v for s in span}
    return frozenset(span - {0})


def _orthogonal_frames(lattice: GramLattice, vectors: list, rank: int):
    """Pairwise orthogonal norm-4 tuples independent mod 2, in a deterministic order."""

    def extend(chosen: list, start: int):
        if len(chosen) == rank:
            yield list(chosen)
            return
        for j in range(start, len(vectors)):
            y = vectors[j]
            if any(lattice.dot(x, y) != 0 for x in chosen):
                continue
            if len(_span_bits(lattice, chosen + [y])) != 2 ** (len(chosen) + 1) - 1:
                continue
            chosen.append(y)
            yield from extend(chosen, j + 1)
            chosen.pop()

    yield from extend([], 0)


def _two_adic_lines(kind: str, q: int) -> list[OrbitData]:
    lat = standard_lattice(kind)
    pts, labels = _action_labels(kind, q, "W+")
    codes = _encode(pts, q)
    roots, counts = np.unique(labels, return_counts=True)

    def label_of(coords: Sequence[int]) -> int:
        code = _encode(_normalize_lines(np.array([coords], dtype=np.int64), q), q)
        return int(labels[np.searchsorted(codes, code)[0]])

    builders: dict[int, Callable[[], NeighborResult]] = {}
    vecs = _norm4_vectors(lat)
    if q == 2:
        for x in vecs:
            coords = [int(c) % 2 for c in lat.coordinates(x)]
            if any(coords):
                builders.setdefault(label_of(coords), _first(two_neighbor_from_norm4, lat, x))
            if len(builders) == len(roots):
                break
    else:
        for x1, x2 in itertools.combinations(vecs, 2):
            d = lat.dot(x1, x2)
            if d.denominator == 1 and d.numerator % 2:
                nb, _ = four_neighbor(lat, x1, x2)
                lab = label_of(_line_of_four_neighbor(lat, nb.lattice))
                builders.setdefault(lab, _first(four_neighbor, lat, x1, x2))
                if len(builders) == len(roots):
                    break
    out = []
    for r, c in zip(roots, counts):
        line = IsotropicLine(q, tuple(int(x) for x in pts[r]))
        out.append(OrbitData(line, int(c), "W+", (), builders.get(int(r))))
    return out


def _first(fn, *args) -> Callable[[], NeighborResult]:
    def build() -> NeighborResult:
        return fn(*args)[0]

    return build


def _line_of_four_neighbor(lattice: GramLattice, neighbor: GramLattice) -> list[int]:
    """The isotropic line of ``L/4L`` attached to a 4-neighbor ``N = Z.(x/4) + M``.

    ``4N = Z.x + 4M`` lies in ``L`` and its image in ``L/4L`` is the line of ``x``;
    any image vector with an odd coordinate generates it.
    """
    q = 4
    gens = []
    for b in neighbor.basis_vectors():
        c = lattice.coordinates(tuple(q * x for x in b))
        gens.append([int(x) % q for x in c])
    for g in gens:
        if any(x % 2 for x in g):
            return g
    raise ArithmeticError("no primitive vector in the image of 4N")


def two_adic_orbits(L: str, A: str | TwoAdicGroup) -> list[OrbitData]:
    """``SO(L)``-orbits of ``A``-neighbors for ``A = (Z/2)^i`` or ``Z/4``, with neighbor constructors.

    The orbit counts are known theorems; they are re-verified here by acting with
    generators of ``W+ = SO(L)`` on the parametrizing sets (isotropic lines mod 2
    or 4, totally singular subspaces of ``L/2L``).  Each orbit carries a builder
    of one neighbor from norm-4 vectors, verified to be an ``A``-neighbor.
    """
    k = _kind(L)
    group = TwoAdicGroup.parse(A) if isinstance(A, str) else A
    expected = _EXPECTED_ORBITS.get((k, group))
    if expected is None:
        raise ValueError(f"unsupported 2-adic pair ({k}, {group})")
    lat = standard_lattice(k)
    if group.cyclic:
        out = _two_adic_lines(k, 4)
    elif group.rank == 1:
        out = _two_adic_lines(k, 2)
    else:
        out = _two_adic_subspaces(k, group.rank)
    if len(out) != expected:
        raise ArithmeticError(f"expected {expected} orbits for ({k}, {group}), found {len(out)}")
    for o in out:
        if o.construct is None:
            raise ArithmeticError("no norm-4 construction reached one of the orbits")
        nb = o.construct()
        if not nb.lattice.is_even() or nb.lattice.det != lat.det:
            raise ArithmeticError("constructed neighbor lies outside the genus")
        if not verify_neighbor(lat, nb.lattice, group.invariants):
            raise ArithmeticError("constructed lattice is not an A-neighbor")
    return out


def _two_adic_subspaces(kind: str, rank: int) -> list[OrbitData]:
    lat = standard_lattice(kind)
    n = lat.rank
    subs, labels = _subspace_orbits(kind, rank)
    index = {s: i for i, s in enumerate(subs)}
    roots, counts = np.unique(labels, return_counts=True)
    builders: dict[int, Callable[[], NeighborResult]] = {}
    frames: dict[int, list] = {}
    vecs = _norm4_vectors(lat)
    for frame in _orthogonal_frames(lat, vecs, rank):
        lab = int(labels[index[_span_bits(lat, frame)]])
        if lab not in frames:
            frames[lab] = frame
        if len(frames) == len(roots):
            break
        if len(roots) == 2:
            # the second family is the image of the first under a reflection (an element of O minus SO)
            s = _reflection_ambient(lat, simple_system(lat).simple_roots[0])
            image = [tuple(frac(c) for c in _apply(s, x)) for x in frame]
            img_lab = int(labels[index[_span_bits(lat, image)]])
            if img_lab == lab:
                raise ArithmeticError("reflection preserves the family of maximal singular subspaces")
            frames[img_lab] = image
            break
    for lab, frame in frames.items():
        builders[lab] = _first(chain2_neighbors, lat, frame)
    # every singular subspace carries 2^(rank(rank-1)/2) neighbors (the lagrangians of the
    # hyperbolic residue transverse to L/M), permuted transitively by its stabilizer
    per_subspace = 2 ** (rank * (rank - 1) // 2)
    out = []
    for r, c in zip(roots, counts):
        vectors = tuple(sorted(_unbits(x, n) for x in subs[r]))
        out.append(OrbitData(IsotropicSubspace(2, vectors), int(c) * per_subspace, "W+", (), builders.get(int(r))))
    return out


def _apply(m: flint.fmpq_mat, v: Sequence) -> list[Fraction]:
    n = m.nrows()
    return [sum((frac(m[i, j]) * frac(v[j]) for j in range(n)), Fraction(0)) for i in range(n)]
