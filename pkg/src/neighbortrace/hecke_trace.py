"""Traces of Hecke operators on M_{V_lambda}(SO_n) for n = 7, 8, 9.

For the one-class genera the trace formula reads

    tr(T_A) = (1 / |SO(L0)|) * sum_y |Omega_y| * sum_{gamma in SO(L0)} chi_lambda(gamma g_y)

with ``L0 = E7, E8, E8+A1`` and ``g_y`` an isometry carrying ``L0`` to the
neighbor of the orbit representative ``y``.  The inner sum only depends on the
characteristic polynomial of ``gamma g_y``, so each orbit is reduced to a
census of characteristic polynomials.  The census is computed by streaming
``SO(L0)`` in factored form, and one character value is taken per class.
"""

from __future__ import annotations

import sys
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Callable, Iterable, Sequence

import flint
import numpy as np

from . import cache as _cache
from ._exact import denominator, frac, scaled_int_array
from .characters import (
    DEFAULT_PRECISION,
    MAX_PRECISION,
    DominantWeight,
    averaged_character,
    averaged_from_charpoly_exact,
    charpoly_from_power_sums,
    parameter_from_charpoly,
    precision,
)
from .isometry import isometry_between
from .lattice_core import standard_lattice
from .neighbors import prime_power
from .orbits import OrbitData, TwoAdicGroup, two_adic_orbits, wplus_orbits
from .weyl import group_order, iterate_full, lattice_to_model

__all__ = [
    "LATTICE_FOR_N",
    "GroupDescriptor",
    "TraceRequest",
    "ScaledTrace",
    "ClassCensus",
    "class_census",
    "orbit_data",
    "hecke_trace",
    "dimension",
    "traces_for_weights",
    "naive_trace",
]

LATTICE_FOR_N = {7: "E7", 8: "E8", 9: "E8+A1"}


# ---------------------------------------------------------------------------
# requests


@dataclass(frozen=True)
class GroupDescriptor:
    """The finite abelian group ``A`` of a Hecke operator ``T_A``.

    ``kind`` is ``"trivial"``, ``"cyclic"`` (``Z/q``) or ``"elementary"`` (``(Z/2)^rank``).
    """

    kind: str
    modulus: int = 1
    rank: int = 0

    @classmethod
    def parse(cls, text: str) -> "GroupDescriptor":
        t = text.strip().lower().replace(" ", "")
        if t in ("trivial", "1", "id"):
            return cls("trivial")
        if t in ("z4", "z/4"):
            return cls("cyclic", 4)
        if t.startswith("p:"):
            q = int(t[2:])
            prime_power(q)
            return cls("cyclic", q)
        if t.startswith("2k:"):
            i = int(t[3:])
            if i < 1:
                raise ValueError("rank must be positive")
            return cls("cyclic", 2) if i == 1 else cls("elementary", 2, i)
        raise ValueError(f"unrecognized group descriptor {text!r}")

    @property
    def order(self) -> int:
        if self.kind == "trivial":
            return 1
        if self.kind == "cyclic":
            return self.modulus
        return 2**self.rank

    @property
    def prime(self) -> int | None:
        if self.kind == "trivial":
            return None
        return prime_power(self.modulus)[0]

    def __str__(self) -> str:
        if self.kind == "trivial":
            return "trivial"
        if self.kind == "elementary":
            return f"2k:{self.rank}"
        return "z4" if self.modulus == 4 else f"p:{self.modulus}"


@dataclass(frozen=True)
class TraceRequest:
    n: int
    weight: DominantWeight
    group: GroupDescriptor

    def __post_init__(self):
        if self.n not in LATTICE_FOR_N:
            raise ValueError("n must be 7, 8 or 9")
        if self.weight.n != self.n:
            raise ValueError("weight does not belong to SO_n")

    @classmethod
    def make(cls, n: int, weight: Sequence[int], group: str | GroupDescriptor = "trivial") -> "TraceRequest":
        g = GroupDescriptor.parse(group) if isinstance(group, str) else group
        return cls(n, DominantWeight(n, tuple(weight)), g)

    @property
    def lattice_kind(self) -> str:
        return LATTICE_FOR_N[self.n]


# ---------------------------------------------------------------------------
# scaled traces


@dataclass(frozen=True)
class ScaledTrace:
    """The number ``mantissa * p^(half_exponent / 2)`` with ``half_exponent`` in {0, 1}.

    Sums require equal ``half_exponent`` unless one side is zero; products add exponents.
    """

    mantissa: Fraction
    p: int
    half_exponent: int = 0

    def __post_init__(self):
        m = frac(self.mantissa)
        k = int(self.half_exponent)
        half, odd = divmod(k, 2)
        object.__setattr__(self, "mantissa", m * Fraction(self.p) ** half)
        object.__setattr__(self, "half_exponent", odd)

    @classmethod
    def power(cls, p: int, half_exponent: int) -> "ScaledTrace":
        """``p^(half_exponent / 2)``."""
        return cls(Fraction(1), p, half_exponent)

    def _check(self, other: "ScaledTrace") -> None:
        if self.p != other.p:
            raise ValueError("scaled traces at different primes")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ScaledTrace(Fraction(other), self.p, 0)
        self._check(other)
        if other.mantissa == 0:
            return self
        if self.mantissa == 0:
            return other
        if self.half_exponent != other.half_exponent:
            raise ValueError("cannot add scaled traces of different parity")
        return ScaledTrace(self.mantissa + other.mantissa, self.p, self.half_exponent)

    __radd__ = __add__

    def __neg__(self):
        return ScaledTrace(-self.mantissa, self.p, self.half_exponent)

    def __sub__(self, other):
        return self + (-other if isinstance(other, ScaledTrace) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ScaledTrace(self.mantissa * other, self.p, self.half_exponent)
        self._check(other)
        m = self.mantissa * other.mantissa
        k = self.half_exponent + other.half_exponent
        if k == 2:
            m *= self.p
            k = 0
        return ScaledTrace(m, self.p, k)

    __rmul__ = __mul__

    def inverse(self) -> "ScaledTrace":
        if self.mantissa == 0:
            raise ZeroDivisionError("zero scaled trace")
        if self.half_exponent:
            return ScaledTrace(1 / (self.mantissa * self.p), self.p, 1)
        return ScaledTrace(1 / self.mantissa, self.p, 0)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return ScaledTrace(self.mantissa / other, self.p, self.half_exponent)
        return self * other.inverse()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.half_exponent == 0 and self.mantissa == other or (self.mantissa == 0 and other == 0)
        if not isinstance(other, ScaledTrace):
            return NotImplemented
        if self.mantissa == 0 and other.mantissa == 0:
            return True
        return (self.p, self.half_exponent, self.mantissa) == (other.p, other.half_exponent, other.mantissa)

    def __hash__(self):
        return hash((self.p, self.half_exponent, self.mantissa))

    def is_rational(self) -> bool:
        return self.half_exponent == 0 or self.mantissa == 0

    def __str__(self) -> str:
        if self.half_exponent == 0:
            return str(self.mantissa)
        return f"{self.mantissa}*{self.p}^(1/2)"


# ---------------------------------------------------------------------------
# census of characteristic polynomials


@dataclass(frozen=True)
class ClassCensus:
    """Multiset of characteristic polynomials of ``gamma g`` over ``gamma`` in ``SO(L0)``."""

    n: int
    classes: tuple[tuple[tuple[Fraction, ...], int], ...]

    @property
    def total(self) -> int:
        return sum(m for _, m in self.classes)

    def as_list(self) -> list[tuple[tuple[Fraction, ...], int]]:
        return list(self.classes)


def _power_sum_keys(mats: np.ndarray, count: int) -> np.ndarray:
    """``tr(M^k)`` for ``k = 1..count`` (count <= 4) of a batch of integer matrices, exactly."""
    out = np.empty((mats.shape[0], count), dtype=np.int64)
    mt = np.transpose(mats, (0, 2, 1))
    out[:, 0] = np.trace(mats, axis1=1, axis2=2)
    if count >= 2:
        out[:, 1] = np.einsum("bij,bij->b", mats, mt)
    if count >= 3:
        sq = np.matmul(mats, mats)
        out[:, 2] = np.einsum("bij,bij->b", sq, mt)
        if count >= 4:
            out[:, 3] = np.einsum("bij,bji->b", sq, sq)
    return out


def _check_range(mats: np.ndarray, power: int) -> None:
    bound = int(np.abs(mats).max()) if mats.size else 0
    dim = mats.shape[-1]
    if bound and (bound**power) * dim ** (power - 1) * dim >= 2**62:
        raise OverflowError("census entries too large for 64-bit power sums")


def _row_keys(keys: np.ndarray) -> np.ndarray:
    keys = np.ascontiguousarray(keys)
    return keys.view(np.dtype((np.void, keys.dtype.itemsize * keys.shape[1]))).ravel()


def _census_counts(kind: str, g_model: flint.fmpq_mat, progress: Callable[[str], None] | None = None):
    """``(scale, Counter)`` of scaled power sums ``(D^k tr(M^k))_k``."""
    n = {"E7": 7, "E8": 8, "E8+A1": 9}[kind]
    count = n // 2
    batches = list(iterate_full(kind, det_filter=1))
    cores = []
    for b in batches:
        core = b.core
        if kind == "E8+A1":
            big = flint.fmpq_mat(9, 9)
            for i in range(8):
                for j in range(8):
                    big[i, j] = core[i, j]
            big[8, 8] = 1
            core = big
        cores.append(core * g_model)
    scale = lcm(*(denominator(c) for c in cores))
    counts: Counter = Counter()
    for bi, (b, c) in enumerate(zip(batches, cores)):
        ci, _ = scaled_int_array(c, scale)
        if kind == "E8+A1":
            perms9 = np.hstack([b.perms, np.full((len(b), 1), 8, dtype=np.int64)])
            mats = ci[perms9]
            mats[:, 8, :] *= b.a1_signs[:, None]
        else:
            mats = ci[b.perms]
        _check_range(mats, count)
        keys = _power_sum_keys(mats, count)
        rows = _row_keys(keys)
        uniq, idx, cnt = np.unique(rows, return_index=True, return_counts=True)
        for i, c_ in zip(idx, cnt):
            counts[tuple(int(x) for x in keys[i])] += int(c_)
        if progress and bi % 16 == 0:
            progress(f"census {kind}: batch {bi + 1}/{len(batches)}, {len(counts)} classes")
    return scale, counts


def _census_key(kind: str, g_model: flint.fmpq_mat) -> str:
    entries = [str(g_model[i, j]) for i in range(g_model.nrows()) for j in range(g_model.ncols())]
    return _cache.content_key("census", kind, entries)


def class_census(
    n: int, g_y: flint.fmpq_mat, cache_dir=None, progress: Callable[[str], None] | None = None
) -> ClassCensus:
    """Characteristic polynomials of ``gamma g_y``, ``gamma`` in ``SO(L0)``, with multiplicities.

    ``g_y`` is given in model coordinates (8x8 fixing ``e`` for n = 7, 8x8 for
    n = 8, 9x9 for n = 9).  Results are cached under ``cache_dir`` when given.
    """
    kind = LATTICE_FOR_N[n]
    key = _census_key(kind, g_y)
    payload = _cache.load(cache_dir, "census", key)
    if payload is None:
        scale, counts = _census_counts(kind, g_y, progress)
        payload = {"n": n, "scale": scale, "classes": sorted([list(k) + [v] for k, v in counts.items()])}
        if cache_dir is not None:
            _cache.store(cache_dir, "census", key, payload)
    scale = int(payload["scale"])
    classes = []
    extra = 1 if kind == "E7" else 0
    for row in payload["classes"]:
        *sums, mult = row
        power_sums = [Fraction(int(s), scale ** (k + 1)) - extra for k, s in enumerate(sums)]
        classes.append((charpoly_from_power_sums(n, power_sums), int(mult)))
    merged: Counter = Counter()
    for cp, m in classes:
        merged[cp] += m
    return ClassCensus(n, tuple(sorted(merged.items())))


# ---------------------------------------------------------------------------
# orbits and isometries


def orbit_data(n: int, group: GroupDescriptor) -> list[OrbitData]:
    """``SO(L0)``-orbits of ``A``-neighbors of ``L0`` with neighbor constructors."""
    kind = LATTICE_FOR_N[n]
    if group.kind == "trivial":
        return []
    if group.kind == "elementary":
        return two_adic_orbits(kind, TwoAdicGroup(group.rank))
    q = group.modulus
    p, _ = prime_power(q)
    if p == 2:
        if q == 2:
            return two_adic_orbits(kind, TwoAdicGroup(1))
        if q == 4:
            return two_adic_orbits(kind, TwoAdicGroup(1, True))
        raise ValueError("2-power moduli beyond 4 are not supported")
    return wplus_orbits(kind, q)


def _model_isometry(kind: str, orbit: OrbitData) -> flint.fmpq_mat:
    base = standard_lattice(kind)
    nb = orbit.construct()
    g = isometry_between(base, nb.lattice, kind)
    return lattice_to_model(kind, g)


@lru_cache(maxsize=None)
def _identity_model(kind: str) -> flint.fmpq_mat:
    d = 9 if kind == "E8+A1" else 8
    return flint.fmpq_mat([[int(i == j) for j in range(d)] for i in range(d)])


# ---------------------------------------------------------------------------
# the trace


@dataclass
class _Accumulator:
    """Sum of ``multiplicity * character`` split into an exact part and a ball part."""

    exact: Fraction
    balls: list

    def add(self, weight: Fraction, class_value) -> None:
        if class_value.is_exact:
            self.exact += weight * class_value.exact
        else:
            self.balls.append((weight, class_value))


def _sum_characters(weight: DominantWeight, censuses: Sequence[tuple[int, ClassCensus]], bits: int):
    acc = _Accumulator(Fraction(0), [])
    for omega, census in censuses:
        for cp, mult in census.classes:
            t = parameter_from_charpoly(weight.n, cp)
            acc.add(Fraction(omega * mult), averaged_character(weight, t, bits))
    return acc


def _certify(acc: _Accumulator, factor: Fraction, recompute: Callable[[int], _Accumulator], bits: int) -> int:
    while True:
        exact = acc.exact * factor
        if not acc.balls:
            if exact.denominator != 1:
                raise ArithmeticError(f"trace is not an integer: {exact}")
            return int(exact)
        with precision(bits):
            total = flint.acb(0)
            for w, v in acc.balls:
                total += v.as_ball() * flint.acb(flint.fmpq(w.numerator, w.denominator))
            total *= flint.acb(flint.fmpq(factor.numerator, factor.denominator))
            total += flint.acb(flint.fmpq(exact.numerator, exact.denominator))
            re, im = total.real, total.imag
            ok_width = float(re.rad()) < 0.25 and float(im.rad()) < 0.25
            if ok_width:
                if not im.contains(0):
                    raise ArithmeticError("trace has a nonzero imaginary part")
                value = re.unique_fmpz()
                if value is None:
                    raise ArithmeticError(f"trace enclosure {re} contains no unique integer")
                return int(value)
        if bits >= MAX_PRECISION:
            raise ArithmeticError("trace enclosure too wide at maximal precision")
        bits *= 2
        acc = recompute(bits)


def _stderr(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _censuses(req: TraceRequest, cache_dir, progress) -> list[tuple[int, ClassCensus]]:
    kind = req.lattice_kind
    if req.group.kind == "trivial":
        return [(1, class_census(req.n, _identity_model(kind), cache_dir, progress))]
    out = []
    for i, orbit in enumerate(orbit_data(req.n, req.group)):
        if progress:
            progress(f"orbit {i + 1}: size {orbit.cardinality}")
        g = _model_isometry(kind, orbit)
        out.append((orbit.cardinality, class_census(req.n, g, cache_dir, progress)))
    return out


def hecke_trace(
    req: TraceRequest, cache_dir=None, bits: int = DEFAULT_PRECISION, progress: Callable[[str], None] | None = None
) -> int:
    """``|A|^{m_1} * tr(T_A | M_{V_lambda}(SO_n))``, certified as an integer."""
    censuses = _censuses(req, cache_dir, progress)
    order = group_order(req.lattice_kind) // 2
    factor = Fraction(req.group.order ** req.weight.coords[0], order)
    acc = _sum_characters(req.weight, censuses, bits)
    return _certify(acc, factor, lambda b: _sum_characters(req.weight, censuses, b), bits)


def dimension(n: int, weight: Sequence[int] | DominantWeight, cache_dir=None) -> int:
    """``dim M_{V_lambda}(SO_n)``: the trace of the identity."""
    w = weight if isinstance(weight, DominantWeight) else DominantWeight(n, tuple(weight))
    value = hecke_trace(TraceRequest(n, w, GroupDescriptor("trivial")), cache_dir)
    if value < 0:
        raise ArithmeticError("negative dimension")
    return value


def traces_for_weights(
    n: int, weights: Iterable[Sequence[int]], group: GroupDescriptor, cache_dir=None, progress=None
) -> dict[tuple[int, ...], int]:
    """Several weights sharing one set of censuses."""
    weights = list(weights)
    if not weights:
        return {}
    base = TraceRequest.make(n, weights[0], group)
    censuses = _censuses(base, cache_dir, progress)
    order = group_order(base.lattice_kind) // 2
    out = {}
    for wt in weights:
        w = DominantWeight(n, tuple(wt))
        factor = Fraction(group.order ** w.coords[0], order)
        acc = _sum_characters(w, censuses, DEFAULT_PRECISION)
        out[w.coords] = _certify(acc, factor, lambda b, w=w: _sum_characters(w, censuses, b), DEFAULT_PRECISION)
    return out


# ---------------------------------------------------------------------------
# unoptimized oracle


def _divide_by_x_minus_one(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Synthetic division of a polynomial (low to high) by ``x - 1``; the remainder must vanish."""
    high = list(coeffs[::-1])
    out = [high[0]]
    for c in high[1:]:
        out.append(c + out[-1])
    if out.pop() != 0:
        raise ArithmeticError("1 is not an eigenvalue")
    return tuple(out[::-1])


def naive_trace(req: TraceRequest, progress: Callable[[str], None] | None = None) -> int:
    """Element-by-element evaluation for ``n = 7``.

    Every ``gamma g_y`` gets its own exact integer characteristic polynomial and
    a Koike-Terada character value.  Nothing is shared with the census route
    beyond the group iteration and the orbit data.
    """
    if req.n != 7:
        raise ValueError("the unoptimized oracle is provided for n = 7")
    kind = req.lattice_kind
    if req.group.kind == "trivial":
        pairs = [(1, _identity_model(kind))]
    else:
        pairs = [(o.cardinality, _model_isometry(kind, o)) for o in orbit_data(7, req.group)]
    memo: dict[tuple, Fraction] = {}
    total = Fraction(0)
    for omega, g in pairs:
        inner = Fraction(0)
        batches = list(iterate_full(kind, det_filter=1))
        products = [b.core * g for b in batches]
        scale = lcm(*(denominator(c) for c in products))
        powers = [Fraction(1, scale**k) for k in range(9)]
        for bi, (b, c) in enumerate(zip(batches, products)):
            ci, _ = scaled_int_array(c, scale)
            for mat in ci[b.perms].tolist():
                raw = tuple(int(x) for x in flint.fmpz_mat(mat).charpoly().coeffs())
                value = memo.get(raw)
                if value is None:
                    cp = tuple(x * powers[8 - i] for i, x in enumerate(raw))
                    value = averaged_from_charpoly_exact(req.weight, _divide_by_x_minus_one(cp))
                    memo[raw] = value
                inner += value
            if progress:
                progress(f"naive: batch {bi + 1}/{len(batches)}")
        total += omega * inner
    value = total * Fraction(req.group.order ** req.weight.coords[0], group_order(kind) // 2)
    if value.denominator != 1:
        raise ArithmeticError(f"trace is not an integer: {value}")
    return int(value)
