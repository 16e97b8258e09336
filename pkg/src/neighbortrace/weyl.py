"""Weyl groups of E7, E8 and E8+A1: length-ordered traversal, coset representatives, full iteration.

Groups act on a coordinate model: E7 and E8 on Q^8 with the standard form (E7
fixing ``e = (1,...,1)``), E8+A1 on Q^9 with form ``diag(1,...,1,2)``.  Every
element is written as ``sigma o epsilon o h`` where ``sigma`` permutes
coordinates, ``epsilon`` is a sign change and ``h`` runs over a fixed set of
minimal-length right coset representatives.

Words follow the convention ``[a_1, ..., a_j] = s_{a_j} o ... o s_{a_1}`` with
1-based letters.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import factorial
from typing import Iterator, Sequence

import flint
import numpy as np

from . import cache as _cache
from ._exact import Vector, apply, frac, identity, qmat, rows_of, scaled_int_array
from .lattice_core import E7_SIMPLE_ROOTS_MODEL, E8_EXTRA_SIMPLE_ROOT, GramLattice, standard_lattice

__all__ = [
    "KINDS",
    "SimpleRootSystem",
    "WeylElement",
    "CosetRepSet",
    "Layer",
    "FactorBatch",
    "root_system",
    "length_layers",
    "enumerate_by_length",
    "traversal_count",
    "poincare_coefficients",
    "phi7",
    "phi8",
    "signe_q",
    "coset_key",
    "coset_reps",
    "element_from_word",
    "reduced_word",
    "coxeter_length",
    "minimal_in_coset",
    "group_order",
    "iterate_full",
    "count_elements",
    "model_to_lattice",
    "lattice_to_model",
]

KINDS = ("E7", "E8", "E8+A1")

_KIND_ALIASES = {"E7": "E7", "E8": "E8", "E8+A1": "E8+A1", "E8A1": "E8+A1", "E8⊕A1": "E8+A1", "E8_A1": "E8+A1"}

# Degrees of the basic invariants, used to cross-check traversal layer sizes.
_DEGREES = {"E7": (2, 6, 8, 10, 12, 14, 18), "E8": (2, 8, 12, 14, 18, 20, 24, 30)}


def _kind(kind: str) -> str:
    k = _KIND_ALIASES.get(kind.strip().upper().replace(" ", ""))
    if k is None:
        raise ValueError(f"unknown Weyl group kind: {kind!r}")
    return k


@dataclass(frozen=True, eq=False)
class SimpleRootSystem:
    """Simple roots with their Cartan matrix, plus a regular vector ``rho`` of the fundamental chamber.

    Vectors live in a coordinate space with inner product matrix ``form``.  When
    ``roots`` is omitted the full root system is the standard model one for ``name``.
    """

    name: str
    simple_roots: tuple[Vector, ...]
    rho: Vector
    form: tuple[tuple[Fraction, ...], ...]
    roots: tuple[Vector, ...] | None = field(default=None, repr=False)

    @property
    def rank(self) -> int:
        return len(self.simple_roots)

    @property
    def dim(self) -> int:
        return len(self.rho)

    def dot(self, u: Sequence, v: Sequence) -> Fraction:
        fv = [sum((f * frac(x) for f, x in zip(row, v)), Fraction(0)) for row in self.form]
        return sum((frac(a) * b for a, b in zip(u, fv)), Fraction(0))

    @cached_property
    def cartan(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(self.dot(a, b)) for b in self.simple_roots) for a in self.simple_roots)

    @cached_property
    def form_matrix(self) -> flint.fmpq_mat:
        return qmat(self.form)

    @cached_property
    def doubled_simple(self) -> np.ndarray:
        return np.array([[int(2 * x) for x in a] for a in self.simple_roots], dtype=np.int64)

    @cached_property
    def doubled_rho(self) -> np.ndarray:
        return np.array([int(2 * x) for x in self.rho], dtype=np.int64)

    @cached_property
    def form_array(self) -> np.ndarray:
        if any(x.denominator != 1 for row in self.form for x in row):
            raise ValueError("integer arithmetic needs an integral form")
        return np.array([[int(x) for x in row] for row in self.form], dtype=np.int64)

    @cached_property
    def positive_roots(self) -> tuple[Vector, ...]:
        out = []
        for r in (self.roots if self.roots is not None else _model_roots(self.name)):
            s = self.dot(r, self.rho)
            if s == 0:
                raise ValueError("rho is not regular")
            if s > 0:
                out.append(r)
        return tuple(sorted(out))

    @cached_property
    def doubled_positive(self) -> np.ndarray:
        return np.array([[int(2 * x) for x in r] for r in self.positive_roots], dtype=np.int64)

    def reflection(self, i: int) -> flint.fmpq_mat:
        """Matrix of the reflection in the ``i``-th simple root (1-based)."""
        a = self.simple_roots[i - 1]
        n = self.dim
        fa = [sum((self.form[k][c] * a[k] for k in range(n)), Fraction(0)) for c in range(n)]
        na = self.dot(a, a)
        return qmat([[(1 if r == c else 0) - 2 * a[r] * fa[c] / na for c in range(n)] for r in range(n)])

    @cached_property
    def reflections(self) -> tuple[flint.fmpq_mat, ...]:
        return tuple(self.reflection(i) for i in range(1, self.rank + 1))


def _diag(entries: Sequence[int]) -> tuple[tuple[Fraction, ...], ...]:
    n = len(entries)
    return tuple(tuple(Fraction(entries[i]) if i == j else Fraction(0) for j in range(n)) for i in range(n))


def _model_roots(name: str) -> list[Vector]:
    h = Fraction(1, 2)
    e8: list[Vector] = []
    for i, j in itertools.combinations(range(8), 2):
        for si, sj in itertools.product((1, -1), repeat=2):
            v = [Fraction(0)] * 8
            v[i], v[j] = Fraction(si), Fraction(sj)
            e8.append(tuple(v))
    for signs in itertools.product((1, -1), repeat=8):
        if signs.count(-1) % 2 == 0:
            e8.append(tuple(h * s for s in signs))
    if name == "E8":
        return e8
    if name == "E7":
        return [r for r in e8 if sum(r) == 0]
    if name == "E8+A1":
        out = [tuple(r) + (Fraction(0),) for r in e8]
        z = (Fraction(0),) * 8
        return out + [z + (Fraction(1),), z + (Fraction(-1),)]
    raise ValueError(name)


@lru_cache(maxsize=None)
def root_system(kind: str) -> SimpleRootSystem:
    """The fixed simple system and chamber vector used throughout."""
    k = _kind(kind)
    if k == "E7":
        rho = tuple(Fraction(x) for x in (29, 21, 13, 5, -3, -11, -19, -35))
        return SimpleRootSystem("E7", E7_SIMPLE_ROOTS_MODEL, rho, _diag((1,) * 8))
    e8 = E7_SIMPLE_ROOTS_MODEL + (E8_EXTRA_SIMPLE_ROOT,)
    rho8 = tuple(Fraction(x) for x in (29, 25, 21, 17, 13, 9, 5, -3))
    if k == "E8":
        return SimpleRootSystem("E8", e8, rho8, _diag((1,) * 8))
    z = (Fraction(0),)
    roots9 = tuple(tuple(a) + z for a in e8) + ((Fraction(0),) * 8 + (Fraction(1),),)
    return SimpleRootSystem("E8+A1", roots9, rho8 + (Fraction(1),), _diag((1,) * 8 + (2,)))


# ---------------------------------------------------------------------------
# elements


@dataclass(frozen=True, eq=False)
class WeylElement:
    """An element of ``W`` as a model-coordinate matrix, optionally with a word and a factorization.

    ``factorization`` is ``(sigma, epsilon, h_index)`` (plus the A1 sign for E8+A1),
    with ``sigma`` a tuple ``pi`` acting by ``(P x)_j = x_{pi(j)}``.
    """

    system: SimpleRootSystem
    word: tuple[int, ...] | None = None
    _matrix: flint.fmpq_mat | None = field(default=None, repr=False)
    factorization: tuple | None = None

    @cached_property
    def matrix(self) -> flint.fmpq_mat:
        if self._matrix is not None:
            return self._matrix
        if self.word is None:
            raise ValueError("element has neither a matrix nor a word")
        return _word_matrix(self.system, self.word)

    @cached_property
    def image_of_rho(self) -> Vector:
        return apply(self.matrix, self.system.rho)

    @property
    def det(self) -> int:
        if self.word is not None:
            return -1 if len(self.word) % 2 else 1
        return int(frac(self.matrix.det()))

    @property
    def length(self) -> int:
        return coxeter_length(self.system, self.matrix)

    def __matmul__(self, other: "WeylElement") -> "WeylElement":
        return WeylElement(self.system, None, self.matrix * other.matrix)


def _word_matrix(system: SimpleRootSystem, word: Sequence[int]) -> flint.fmpq_mat:
    m = identity(system.dim)
    for a in word:
        m = system.reflections[a - 1] * m
    return m


def element_from_word(kind: str, word: Sequence[int]) -> WeylElement:
    return WeylElement(root_system(kind), tuple(int(a) for a in word))


def coxeter_length(system: SimpleRootSystem, matrix: flint.fmpq_mat) -> int:
    """``#{beta > 0 : beta . w(rho) < 0}``."""
    v = np.array([int(2 * x) for x in apply(matrix, system.rho)], dtype=np.int64)
    return int(np.count_nonzero((system.doubled_positive @ system.form_array) @ v < 0))


def reduced_word(system: SimpleRootSystem, matrix: flint.fmpq_mat) -> tuple[int, ...]:
    """Lexicographically smallest reduced word ``[a_1, ..., a_j]`` of ``matrix``.

    The first letter is the smallest right descent ``i`` (``w(alpha_i) < 0``), then recurse on ``w s_i``.
    """
    word = []
    m = matrix
    while True:
        for i in range(1, system.rank + 1):
            if system.dot(apply(m, system.simple_roots[i - 1]), system.rho) < 0:
                word.append(i)
                m = m * system.reflections[i - 1]
                break
        else:
            break
    if rows_of(m) != rows_of(identity(system.dim)):
        raise ValueError("matrix is not in the Weyl group")
    return tuple(word)


# ---------------------------------------------------------------------------
# length-ordered traversal


@dataclass(frozen=True)
class Layer:
    """All elements of a given length: doubled images ``2 w(rho)``, parent index and last letter (0-based)."""

    length: int
    images: np.ndarray
    parent: np.ndarray
    letter: np.ndarray

    def __len__(self) -> int:
        return int(self.images.shape[0])


def length_layers(system: SimpleRootSystem, max_length: int | None = None) -> Iterator[Layer]:
    """Yield the layers ``W_0, W_1, ...`` in order.

    ``W_{j+1}`` is produced from ``W_j`` by ``(w, s_i) -> s_i o w`` restricted to
    ``(alpha_i . w(rho)) > 0``; duplicates (equal images of rho) keep the first
    candidate in ``(parent rank, letter)`` order, which is the lexicographically
    smallest word since parents are themselves sorted that way.
    """
    a = system.doubled_simple
    af = a @ system.form_array
    r = system.rank
    images = system.doubled_rho[None, :].copy()
    layer = Layer(0, images, np.array([-1], dtype=np.int64), np.array([-1], dtype=np.int8))
    yield layer
    j = 0
    while len(layer) and (max_length is None or j < max_length):
        v = layer.images
        pair = (v @ af.T) // 4
        parts, keys = [], []
        for i in range(r):
            idx = np.nonzero(pair[:, i] > 0)[0]
            if idx.size:
                parts.append(v[idx] - pair[idx, i, None] * a[i])
                keys.append(idx * r + i)
        if not parts:
            return
        cand = np.concatenate(parts)
        key = np.concatenate(keys)
        order = np.argsort(key, kind="stable")
        cand, key = cand[order], key[order]
        view = np.ascontiguousarray(cand).view(np.dtype((np.void, cand.dtype.itemsize * cand.shape[1])))
        _, first = np.unique(view.ravel(), return_index=True)
        first.sort()
        j += 1
        layer = Layer(j, cand[first], key[first] // r, (key[first] % r).astype(np.int8))
        yield layer


def enumerate_by_length(kind: str, max_length: int | None = None) -> Iterator[WeylElement]:
    """Stream group elements in nondecreasing length, each with its lexicographically smallest word."""
    system = root_system(kind)
    words: list[list[tuple[int, ...]]] = []
    for layer in length_layers(system, max_length):
        if layer.length == 0:
            cur = [()]
        else:
            prev = words[-1]
            cur = [prev[p] + (int(l) + 1,) for p, l in zip(layer.parent, layer.letter)]
        words.append(cur)
        for w in cur:
            yield WeylElement(system, w)


def traversal_count(kind: str, max_length: int | None = None) -> list[int]:
    """Layer sizes of the traversal (the full group when ``max_length`` is None)."""
    return [len(layer) for layer in length_layers(root_system(kind), max_length)]


def poincare_coefficients(kind: str, up_to: int) -> list[int]:
    """Coefficients of ``prod_i (1 + t + ... + t^{d_i - 1})`` (number of elements per length)."""
    k = _kind(kind)
    degrees = _DEGREES["E8"] if k == "E8+A1" else _DEGREES[k]
    poly = [1] + [0] * up_to
    for d in degrees:
        new = [0] * (up_to + 1)
        for i, c in enumerate(poly):
            if c:
                for s in range(d):
                    if i + s <= up_to:
                        new[i + s] += c
        poly = new
    if k == "E8+A1":
        poly = [poly[i] + (poly[i - 1] if i else 0) for i in range(up_to + 1)]
    return poly


# ---------------------------------------------------------------------------
# coset keys


def phi7(v: Sequence) -> tuple[Fraction, ...]:
    """Multiset of coordinates (sorted tuple)."""
    return tuple(sorted(frac(x) for x in v))


def phi8(v: Sequence) -> tuple[Fraction, ...]:
    """Multiset of squared coordinates (sorted tuple)."""
    return tuple(sorted(frac(x) ** 2 for x in v))


def signe_q(v: Sequence[int], q: int) -> int:
    """Product of coordinate signs mod odd ``q``: 0 for a zero coordinate, +1 on ``1..(q-1)/2``, -1 above."""
    if q % 2 == 0:
        raise ValueError("signe_q needs odd q")
    out = 1
    for x in v:
        r = int(x) % q
        if r == 0:
            return 0
        if r > (q - 1) // 2:
            out = -out
    return out


def coset_key(kind: str, matrix: flint.fmpq_mat) -> tuple:
    """Complete invariant of the right coset ``W' o w`` (E8+A1 appends the A1 sign)."""
    k = _kind(kind)
    system = root_system(k)
    v = apply(matrix, system.rho)
    if k == "E7":
        return min(phi7(v), phi7([-x for x in v]))
    if k == "E8":
        return phi8(v)
    return phi8(v[:8]) + (v[8],)


def _keys_e7(images: np.ndarray) -> np.ndarray:
    s1 = np.sort(images, axis=1)
    s2 = -s1[:, ::-1]
    diff = s1 - s2
    nz = diff != 0
    first = np.argmax(nz, axis=1)
    pick2 = diff[np.arange(len(diff)), first] > 0
    out = s1.copy()
    out[pick2] = s2[pick2]
    return out


def _keys_e8(images: np.ndarray) -> np.ndarray:
    return np.sort(images[:, :8] ** 2, axis=1)


def _row_bytes(a: np.ndarray) -> list[bytes]:
    a = np.ascontiguousarray(a)
    return [a[i].tobytes() for i in range(a.shape[0])]


# ---------------------------------------------------------------------------
# coset representatives


@dataclass(frozen=True, eq=False)
class CosetRepSet:
    """Minimal-length representatives of ``W' \\ W`` with their coset keys, in discovery order."""

    kind: str
    reps: tuple[WeylElement, ...]
    invariant_keys: tuple[tuple, ...]

    def __len__(self) -> int:
        return len(self.reps)

    @cached_property
    def index_of_key(self) -> dict[tuple, int]:
        return {k: i for i, k in enumerate(self.invariant_keys)}


def _subgroup_order(kind: str) -> int:
    k = _kind(kind)
    return 2 * factorial(8) if k == "E7" else 2**7 * factorial(8)


def group_order(kind: str) -> int:
    k = _kind(kind)
    if k == "E7":
        return 36 * _subgroup_order("E7")
    if k == "E8":
        return 135 * _subgroup_order("E8")
    return 2 * group_order("E8")


def coset_reps(kind: str, cache_dir=None) -> CosetRepSet:
    """Greedy length-ordered search for the representatives ``H_7`` (36) or ``H_8`` (135).

    Elements are visited by length, then by lexicographic word; the first element
    of each unseen coset key is kept.
    """
    k = _kind(kind)
    if k not in ("E7", "E8"):
        raise ValueError("coset representatives are defined for E7 and E8")
    system = root_system(k)
    target = group_order(k) // _subgroup_order(k)
    ckey = _cache.content_key("coset_reps", k, [list(map(str, a)) for a in system.simple_roots], list(map(str, system.rho)))
    cached = _cache.load(cache_dir, "coset_reps", ckey)
    if cached is not None:
        words = [tuple(w) for w in cached["words"]]
        reps = tuple(WeylElement(system, w) for w in words)
        keys = tuple(coset_key(k, r.matrix) for r in reps)
        if len(set(keys)) != target:
            raise _cache.CacheIntegrityError("cached coset representatives are not distinct cosets")
        return CosetRepSet(k, reps, keys)
    keyfun = _keys_e7 if k == "E7" else _keys_e8
    found: dict[bytes, tuple[int, int]] = {}
    layers: list[Layer] = []
    for layer in length_layers(system):
        layers.append(layer)
        rows = _row_bytes(keyfun(layer.images))
        for idx, rb in enumerate(rows):
            if rb not in found:
                found[rb] = (layer.length, idx)
        if len(found) == target:
            break
    words = []
    for length, idx in sorted(found.values()):
        letters = []
        j, i = length, idx
        while j > 0:
            letters.append(int(layers[j].letter[i]) + 1)
            i = int(layers[j].parent[i])
            j -= 1
        words.append(tuple(reversed(letters)))
    if cache_dir is not None:
        _cache.store(cache_dir, "coset_reps", ckey, {"kind": k, "words": [list(w) for w in words]})
    reps = tuple(WeylElement(system, w) for w in words)
    keys = tuple(coset_key(k, r.matrix) for r in reps)
    return CosetRepSet(k, reps, keys)


def minimal_in_coset(kind: str, matrix: flint.fmpq_mat) -> flint.fmpq_mat:
    """Minimal-length element of ``W' o w`` computed without any search.

    For E8 the subgroup ``W(D8)`` is a reflection subgroup, so its coset has a
    unique minimum, the element sending rho to the ``D8``-dominant point of the
    orbit.  For E7, ``S8 = W(A7)`` is a reflection subgroup and ``W' = S8 x {+-1}``;
    the minimum is the shorter of the two ``S8``-minima, ties broken by word.
    """
    k = _kind(kind)
    system = root_system(k)
    v = apply(matrix, system.rho)
    n = 8
    if k == "E8":
        order = sorted(range(n), key=lambda i: -abs(v[i]))
        rows = [[0] * n for _ in range(n)]
        for pos, i in enumerate(order):
            rows[pos][i] = 1 if v[i] >= 0 else -1
        if sum(1 for x in v if x < 0) % 2 == 1:
            # an odd number of minus signs cannot be cleared by W(D8): keep it on the smallest coordinate
            rows[n - 1][order[-1]] *= -1
        gamma = qmat(rows)
        return gamma * matrix
    if k == "E7":
        best = None
        for sgn in (1, -1):
            u = [sgn * x for x in v]
            order = sorted(range(n), key=lambda i: -u[i])
            perm = qmat([[1 if c == order[r] else 0 for c in range(n)] for r in range(n)])
            if sgn == 1:
                cand = perm * matrix
            else:
                cand = perm * _minus_on_complement() * matrix
            word = reduced_word(system, cand)
            key = (len(word), word)
            if best is None or key < best[0]:
                best = (key, cand)
        return best[1]
    raise ValueError("minimal coset elements are defined for E7 and E8")


@lru_cache(maxsize=None)
def _minus_on_complement() -> flint.fmpq_mat:
    """``-1`` on ``e^perp`` and ``+1`` on ``e = (1,...,1)``."""
    return qmat([[(-1 if i == j else 0) + Fraction(1, 4) for j in range(8)] for i in range(8)])


# ---------------------------------------------------------------------------
# full iteration


@lru_cache(maxsize=None)
def _permutations(n: int) -> tuple[np.ndarray, np.ndarray]:
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    # parity from inversion counts
    inv = np.zeros(len(perms), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            inv += perms[:, i] > perms[:, j]
    signs = np.where(inv % 2 == 0, 1, -1).astype(np.int64)
    return perms, signs


@lru_cache(maxsize=None)
def _even_sign_vectors() -> tuple[tuple[int, ...], ...]:
    return tuple(s for s in itertools.product((1, -1), repeat=8) if s.count(-1) % 2 == 0)


@dataclass(frozen=True, eq=False)
class FactorBatch:
    """Elements ``P_pi o core`` for all permutations ``pi`` in ``perms``.

    ``core = epsilon o h`` is exact; for E8+A1 the A1 factor of element ``k`` is ``a1_signs[k]``.
    ``perms[k]`` acts by ``(P x)_j = x_{pi(j)}``.
    """

    kind: str
    h_index: int
    epsilon: int | tuple[int, ...]
    core: flint.fmpq_mat
    perms: np.ndarray
    a1_signs: np.ndarray | None = None

    def __len__(self) -> int:
        return int(self.perms.shape[0])

    def int_matrices(self) -> tuple[np.ndarray, int]:
        """``(M, d)`` with ``M[k] = d * element_k`` in model coordinates, int64."""
        core, d = scaled_int_array(self.core)
        mats = core[self.perms]
        if self.a1_signs is None:
            return mats, d
        out = np.zeros((len(self), 9, 9), dtype=np.int64)
        out[:, :8, :8] = mats
        out[:, 8, 8] = self.a1_signs * d
        return out, d

    def element(self, k: int) -> WeylElement:
        system = root_system(self.kind)
        pi = [int(x) for x in self.perms[k]]
        n = 8
        p = [[1 if c == pi[r] else 0 for c in range(n)] for r in range(n)]
        m = qmat(p) * self.core
        fac: tuple = (tuple(pi), self.epsilon, self.h_index)
        if self.a1_signs is not None:
            rows = rows_of(m)
            s = int(self.a1_signs[k])
            m = qmat([list(r) + [0] for r in rows] + [[0] * 8 + [s]])
            fac = fac + (s,)
        return WeylElement(system, None, m, fac)


def iterate_full(kind: str, det_filter: str | int = "all", cache_dir=None) -> Iterator[FactorBatch]:
    """Visit every element of ``W`` (or of ``W+ = SO(L)`` when ``det_filter`` is +1) exactly once.

    E7: ``S8 x {+-1} x H_7``; E8: ``S8 x even signs x H_8``; E8+A1: the E8 product times ``{+-1}``.
    """
    k = _kind(kind)
    plus_only = det_filter in (1, "+1", "plus", "+")
    if not plus_only and det_filter not in ("all", None):
        raise ValueError(f"det_filter must be 'all' or +1, not {det_filter!r}")
    base = "E7" if k == "E7" else "E8"
    hs = coset_reps(base, cache_dir)
    perms, psign = _permutations(8)
    if k == "E7":
        for hi, h in enumerate(hs.reps):
            for eps in (1, -1):
                core = (h.matrix if eps == 1 else _minus_on_complement() * h.matrix)
                d = eps * h.det
                sel = perms if not plus_only else perms[psign == d]
                yield FactorBatch(k, hi, eps, core, sel)
        return
    for hi, h in enumerate(hs.reps):
        for eps in _even_sign_vectors():
            core = qmat([[eps[i] if i == j else 0 for j in range(8)] for i in range(8)]) * h.matrix
            if k == "E8":
                sel = perms if not plus_only else perms[psign == h.det]
                yield FactorBatch(k, hi, eps, core, sel)
            else:
                a1 = psign * h.det  # the A1 sign making det = +1
                if plus_only:
                    yield FactorBatch(k, hi, eps, core, perms, a1)
                else:
                    yield FactorBatch(k, hi, eps, core, perms, a1)
                    yield FactorBatch(k, hi, eps, core, perms, -a1)


def count_elements(kind: str, det_filter: str | int = "all", cache_dir=None) -> int:
    return sum(len(b) for b in iterate_full(kind, det_filter, cache_dir))


# ---------------------------------------------------------------------------
# coordinates


@lru_cache(maxsize=None)
def _e7_embedding() -> tuple[flint.fmpq_mat, flint.fmpq_mat]:
    lat = standard_lattice("E7")
    emb = lat.embedding
    pinv = lat.form.inv() * emb.transpose()
    return emb, pinv


def model_to_lattice(kind: str, model_matrix: flint.fmpq_mat) -> flint.fmpq_mat:
    """Express a model-coordinate isometry in the ambient coordinates of ``standard_lattice(kind)``."""
    k = _kind(kind)
    if k != "E7":
        return model_matrix
    emb, pinv = _e7_embedding()
    return pinv * model_matrix * emb


def lattice_to_model(kind: str, matrix: flint.fmpq_mat) -> flint.fmpq_mat:
    """Inverse of :func:`model_to_lattice`; the E7 model matrix fixes ``e = (1,...,1)``."""
    k = _kind(kind)
    if k != "E7":
        return matrix
    emb, pinv = _e7_embedding()
    e = qmat([[Fraction(1, 8)] * 8 for _ in range(8)])
    return emb * matrix * pinv + e


def standard_model_lattice(kind: str) -> GramLattice:
    return standard_lattice("E8+A1" if _kind(kind) == "E8+A1" else kind)
