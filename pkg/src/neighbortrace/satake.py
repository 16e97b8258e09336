"""The dual-group layer: Lusztig-Kato coefficients, Gross relations and Satake traces.

Hecke operators ``T_{(Z/p)^j}`` on ``M_{V_lambda}(SO_n)`` are related to the
traces of Satake parameters on the exterior powers of the standard
representation of the dual group (``Sp_6``, ``SO_8``, ``Sp_8``).  Satake traces
of Arthur parameters ``pi_1[d_1] + ... + pi_k[d_k]`` are computed from the
traces of their summands, which lets one subtract known summands from a packet
total and isolate the remaining cuspidal parameter.

All arithmetic is exact.  Half-integral powers of ``p`` are carried by
:class:`~neighbortrace.hecke_trace.ScaledTrace`.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from pathlib import Path
from typing import Mapping, Sequence

from .hecke_trace import ScaledTrace

__all__ = [
    "DUAL_TYPE_FOR_N",
    "RootDatumTables",
    "root_datum",
    "Polynomial",
    "kato_polynomial",
    "kato_dlambda",
    "GrossRelation",
    "gross_relations",
    "exterior_decomposition",
    "SatakeTraceVector",
    "hecke_to_satake",
    "infinitesimal_weights",
    "ramanujan_coefficients",
    "cusp_form_coefficient",
    "modular_form_traces",
    "SatakeParameter",
    "unit_parameter",
    "unit_closed_form",
    "direct_sum",
    "tensor_product",
    "power_traces",
    "ArthurSummand",
    "ArthurParameter",
    "parse_parameter",
    "CatalogGap",
    "CatalogEntry",
    "FormCatalog",
    "param_traces",
    "packet",
    "endoscopic_subtract",
    "divide_unit_twist",
]

DUAL_TYPE_FOR_N = {7: "C3", 8: "D4", 9: "C4"}


# ---------------------------------------------------------------------------
# root data


@dataclass(frozen=True)
class RootDatumTables:
    """Root datum of ``G = SO_{2r+1}`` or ``SO_{2r}`` split over ``Z_p``, seen from the dual group.

    ``dual_type`` names the dual group (``C3``, ``C4`` or ``D4``).  Coordinates
    are in the basis ``eps_i^*`` of cocharacters.  ``coroots`` are the positive
    coroots of ``G`` (the positive roots of the dual group).
    """

    dual_type: str
    rank: int
    positive_roots: tuple[tuple[Fraction, ...], ...]
    coroots: tuple[tuple[int, ...], ...]
    rho: tuple[Fraction, ...]
    rho_check: tuple[int, ...]
    fundamental: tuple[tuple[int, ...], ...]
    weyl: tuple[tuple[tuple[int, ...], tuple[int, ...], int], ...]

    def pair(self, weight: Sequence[Fraction], coweight: Sequence[int]) -> Fraction:
        return sum((Fraction(a) * b for a, b in zip(weight, coweight)), Fraction(0))

    def is_dominant(self, mu: Sequence[int]) -> bool:
        r = self.rank
        if any(mu[i] < mu[i + 1] for i in range(r - 1)):
            return False
        if self.dual_type.startswith("D"):
            return mu[r - 2] >= abs(mu[r - 1])
        return mu[r - 1] >= 0

    def flip(self, mu: Sequence[int]) -> tuple[int, ...]:
        """Diagram involution fixing ``eps_i`` for ``i < r`` and negating ``eps_r`` (type D)."""
        return tuple(mu[:-1]) + (-mu[-1],)

    def act(self, element, v: Sequence[int]) -> tuple[int, ...]:
        perm, signs, _ = element
        return tuple(signs[i] * v[perm[i]] for i in range(self.rank))


def _unit(r: int, i: int, scale=1) -> tuple:
    return tuple(scale if j == i else 0 for j in range(r))


@lru_cache(maxsize=None)
def root_datum(dual_type: str) -> RootDatumTables:
    t = dual_type.upper()
    if t not in ("C3", "C4", "D4"):
        raise ValueError(f"unsupported dual type {dual_type!r}")
    r = int(t[1])
    pairs = []
    coroots = []
    for i in range(r):
        for j in range(i + 1, r):
            for s in (-1, 1):
                v = [0] * r
                v[i], v[j] = 1, s
                pairs.append(tuple(Fraction(x) for x in v))
                coroots.append(tuple(v))
    if t.startswith("C"):
        short = [tuple(Fraction(x) for x in _unit(r, i)) for i in range(r)]
        roots = tuple(pairs + short)
        coroots += [_unit(r, i, 2) for i in range(r)]
        rho = tuple(Fraction(2 * (r - i) - 1, 2) for i in range(r))
        rho_check = tuple(r - i for i in range(r))
        signs_ok = lambda s: True  # noqa: E731
    else:
        roots = tuple(pairs)
        rho = tuple(Fraction(r - 1 - i) for i in range(r))
        rho_check = tuple(r - 1 - i for i in range(r))
        signs_ok = lambda s: s.count(-1) % 2 == 0  # noqa: E731
    fundamental = tuple(tuple(1 if j < i else 0 for j in range(r)) for i in range(1, r + 1))
    weyl = []
    for perm in itertools.permutations(range(r)):
        inversions = sum(1 for a in range(r) for b in range(a + 1, r) if perm[a] > perm[b])
        for signs in itertools.product((1, -1), repeat=r):
            if signs_ok(signs):
                det = (-1) ** inversions * (-1) ** signs.count(-1)
                weyl.append((perm, signs, det))
    return RootDatumTables(t, r, roots, tuple(coroots), rho, rho_check, fundamental, tuple(weyl))


# ---------------------------------------------------------------------------
# Lusztig-Kato coefficients


@dataclass(frozen=True)
class Polynomial:
    """Integer polynomial in ``p``, coefficients from low to high degree."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def monomial(cls, degree: int, coefficient: int = 1) -> "Polynomial":
        return cls((0,) * degree + (coefficient,))

    def __call__(self, p) -> int | Fraction:
        return sum(c * p**k for k, c in enumerate(self.coeffs))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Polynomial(tuple(x + y for x, y in zip(a, b)))

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if not self.coeffs or not other.coeffs:
            return Polynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return Polynomial(tuple(out))

    def shift(self, degree: int) -> "Polynomial":
        if degree < 0 and any(self.coeffs[:-degree]):
            raise ValueError("negative powers of p")
        if degree < 0:
            return Polynomial(self.coeffs[-degree:])
        return Polynomial((0,) * degree + self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("p" if k == 1 else f"p^{k}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}" + (f"*{mono}" if mono else "")
            terms.append(("-" if c < 0 else "+", body))
        head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        return head + "".join(f" {s} {b}" for s, b in terms[1:])


def _height_functional(datum: RootDatumTables) -> tuple[int, ...]:
    """Integer functional strictly positive on every positive coroot."""
    r = datum.rank
    return tuple(2 * (r - i) + 1 for i in range(r))


def _partition_series(datum: RootDatumTables, target: tuple[int, ...]) -> dict[int, int]:
    """Coefficients ``c_k`` of the number of ways to write ``target`` with ``k`` positive coroots."""
    coroots = datum.coroots
    h = _height_functional(datum)

    @lru_cache(maxsize=None)
    def count(v: tuple[int, ...], index: int) -> tuple[tuple[int, int], ...]:
        if not any(v):
            return ((0, 1),)
        if index == len(coroots) or sum(a * b for a, b in zip(h, v)) <= 0:
            return ()
        alpha = coroots[index]
        out: dict[int, int] = {}
        w, n = v, 0
        while sum(a * b for a, b in zip(h, w)) >= 0:
            for k, c in count(w, index + 1):
                out[k + n] = out.get(k + n, 0) + c
            w = tuple(a - b for a, b in zip(w, alpha))
            n += 1
        return tuple(sorted(out.items()))

    return dict(count(tuple(target), 0))


def _check_weights(datum: RootDatumTables, lam: Sequence[int], mu: Sequence[int]) -> None:
    if len(lam) != datum.rank or len(mu) != datum.rank:
        raise ValueError("coweights have the wrong rank")
    if not datum.is_dominant(lam) or not datum.is_dominant(mu):
        raise ValueError("coweights must be dominant")


def kato_polynomial(dual_type: str, lam: Sequence[int], mu: Sequence[int]) -> Polynomial:
    """``d_lambda(mu)`` as a polynomial in ``p`` via the alternating sum over the Weyl group.

    Raises ``ValueError`` unless ``mu <= lambda`` in the dominance order.
    """
    datum = root_datum(dual_type)
    lam, mu = tuple(lam), tuple(mu)
    _check_weights(datum, lam, mu)
    gap = tuple(a - b for a, b in zip(lam, mu))
    if not _partition_series(datum, gap):
        raise ValueError(f"{mu} is not below {lam}")
    shifted = tuple(a + b for a, b in zip(lam, datum.rho_check))
    base = tuple(a + b for a, b in zip(mu, datum.rho_check))
    height = datum.pair(datum.rho, gap)
    if height.denominator != 1:
        raise ValueError("non-integral pairing")
    total: dict[int, int] = {}
    for element in datum.weyl:
        image = datum.act(element, shifted)
        target = tuple(a - b for a, b in zip(image, base))
        for k, c in _partition_series(datum, target).items():
            total[k] = total.get(k, 0) + element[2] * c
    n = int(height)
    coeffs = [0] * (n + 1)
    for k, c in total.items():
        if c == 0:
            continue
        if k > n:
            raise ArithmeticError("partition count exceeds the height")
        coeffs[n - k] += c
    return Polynomial(tuple(coeffs))


def kato_dlambda(dual_type: str, lam: Sequence[int], mu: Sequence[int], p: int) -> int:
    """The integer ``d_lambda(mu)`` at the prime ``p``."""
    return int(kato_polynomial(dual_type, lam, mu)(p))


# ---------------------------------------------------------------------------
# Gross relations


def exterior_decomposition(dual_type: str, i: int) -> tuple[tuple[int, ...], ...]:
    """Highest weights of the irreducible summands of ``Lambda^i`` of the standard representation."""
    datum = root_datum(dual_type)
    r = datum.rank
    if not 1 <= i <= r:
        raise ValueError("exterior power out of range")
    zero = (0,) * r
    lam = lambda j: datum.fundamental[j - 1] if j else zero  # noqa: E731
    if dual_type.startswith("C"):
        return tuple(lam(j) for j in range(i, -1, -2))
    if i < r:
        return (lam(i),)
    return (lam(r), datum.flip(lam(r)))


def _dominant_below(datum: RootDatumTables, lam: tuple[int, ...]) -> list[tuple[int, ...]]:
    bound = max(abs(x) for x in lam)
    out = []
    for mu in itertools.product(range(-bound, bound + 1), repeat=datum.rank):
        if datum.is_dominant(mu) and _partition_series(datum, tuple(a - b for a, b in zip(lam, mu))):
            out.append(tuple(mu))
    return out


def _hecke_index(datum: RootDatumTables, mu: tuple[int, ...]) -> int:
    """``j`` with ``c_mu`` a summand of ``T_{(Z/p)^j}``."""
    r = datum.rank
    zero = (0,) * r
    if mu == zero:
        return 0
    for j, lam in enumerate(datum.fundamental, start=1):
        if mu == lam or (j == r and datum.dual_type.startswith("D") and mu == datum.flip(lam)):
            return j
    raise ValueError(f"c_{mu} is not a Hecke operator T_(Z/p)^j")


@dataclass(frozen=True)
class GrossRelation:
    """``p^exponent [Lambda^i V_St] = sum_j coefficients[j] * Sat(T_{(Z/p)^j})`` with ``T_{(Z/p)^0} = 1``."""

    dual_type: str
    i: int
    exponent: Fraction
    coefficients: tuple[tuple[int, Polynomial], ...]

    def coefficient(self, j: int) -> Polynomial:
        return dict(self.coefficients).get(j, Polynomial(()))

    def evaluate(self, p: int) -> dict[int, int]:
        return {j: int(c(p)) for j, c in self.coefficients}

    def __str__(self) -> str:
        parts = []
        for j, c in sorted(self.coefficients, key=lambda t: -t[0]):
            op = "1" if j == 0 else "Sat(T_" + ",".join(["p"] * j) + ")"
            parts.append(f"({c})*{op}" if j else f"({c})")
        return f"p^({self.exponent}) [Lambda^{self.i} V_St] = " + " + ".join(parts)


@lru_cache(maxsize=None)
def gross_relations(dual_type: str) -> tuple[GrossRelation, ...]:
    """One relation per exterior power ``i = 1..r``, from the Lusztig-Kato coefficients."""
    datum = root_datum(dual_type)
    out = []
    for i in range(1, datum.rank + 1):
        top = datum.fundamental[i - 1]
        exponent = datum.pair(datum.rho, top)
        per_mu: dict[tuple[int, ...], Polynomial] = {}
        for nu in exterior_decomposition(dual_type, i):
            shift = exponent - datum.pair(datum.rho, nu)
            if shift.denominator != 1 or shift < 0:
                raise ArithmeticError("unexpected exponent shift")
            for mu in _dominant_below(datum, nu):
                term = kato_polynomial(dual_type, nu, mu).shift(int(shift))
                per_mu[mu] = per_mu.get(mu, Polynomial(())) + term
        per_j: dict[int, Polynomial] = {}
        for mu, poly in per_mu.items():
            j = _hecke_index(datum, mu)
            if j == datum.rank and dual_type.startswith("D"):
                partner = per_mu.get(datum.flip(mu), Polynomial(()))
                if partner != poly:
                    raise ArithmeticError("c_lambda_r and its flip enter with different coefficients")
                if mu != datum.fundamental[-1]:
                    continue
            if j in per_j:
                raise ArithmeticError("two coweights map to one Hecke operator")
            per_j[j] = poly
        coeffs = tuple(sorted((j, c) for j, c in per_j.items() if not c.is_zero()))
        out.append(GrossRelation(datum.dual_type, i, exponent, coeffs))
    return tuple(out)


# ---------------------------------------------------------------------------
# Hecke traces to Satake traces


def infinitesimal_weights(n: int, weight: Sequence[int]) -> tuple[tuple[Fraction, ...], tuple[int, ...]]:
    """Positive weights of ``psi(pi, St)`` as half-integers, and the integer tuple ``(w_1, ...)``.

    ``m_i + (n - 2i)/2`` for ``i = 1..floor(n/2)`` (absolute value for the last entry when ``n`` is even).
    """
    if n not in DUAL_TYPE_FOR_N:
        raise ValueError("n must be 7, 8 or 9")
    r = n // 2
    if len(weight) != r:
        raise ValueError("weight has the wrong length")
    halves = tuple(abs(Fraction(m) + Fraction(n - 2 * (i + 1), 2)) for i, m in enumerate(weight))
    return halves, tuple(int(2 * h) for h in halves)


@dataclass(frozen=True)
class SatakeTraceVector:
    """``entries[i-1] = p^(w_1/2) * sum over the packet of Trace(c_p | Lambda^i V_St)``."""

    p: int
    w1: int
    entries: tuple[ScaledTrace, ...]

    def traces(self) -> tuple[ScaledTrace, ...]:
        """The unscaled sums of ``Trace(c_p | Lambda^i V_St)``."""
        inv = ScaledTrace.power(self.p, -self.w1)
        return tuple(e * inv for e in self.entries)

    @classmethod
    def from_traces(cls, p: int, w1: int, traces: Sequence[ScaledTrace]) -> "SatakeTraceVector":
        scale = ScaledTrace.power(p, w1)
        return cls(p, w1, tuple(scale * t for t in traces))

    def __sub__(self, other: "SatakeTraceVector") -> "SatakeTraceVector":
        if (self.p, self.w1, len(self.entries)) != (other.p, other.w1, len(other.entries)):
            raise ValueError("incompatible trace vectors")
        return SatakeTraceVector(self.p, self.w1, tuple(a - b for a, b in zip(self.entries, other.entries)))


def hecke_to_satake(
    n: int, weight: Sequence[int], p: int, hecke_traces: Mapping[int, int | Fraction], depth: int | None = None
) -> SatakeTraceVector:
    """Packet sums of Satake traces from Hecke traces.

    ``hecke_traces[j]`` is the scaled trace ``p^(j*m_1) * tr(T_{(Z/p)^j})`` on
    ``M_{V_lambda}(SO_n)``, as returned by ``hecke_trace``; ``hecke_traces[0]``
    is the dimension.  Relations ``i = 1..depth`` are used (default: all of them).
    """
    dual = DUAL_TYPE_FOR_N[n]
    relations = gross_relations(dual)
    depth = len(relations) if depth is None else depth
    _, w = infinitesimal_weights(n, weight)
    traces = []
    for rel in relations[:depth]:
        total = Fraction(0)
        for j, coeff in rel.coefficients:
            if j not in hecke_traces:
                raise KeyError(f"missing Hecke trace for (Z/p)^{j}")
            total += Fraction(hecke_traces[j], p ** (j * weight[0])) * coeff(p)
        traces.append(ScaledTrace(total, p, 0) * ScaledTrace.power(p, -int(2 * rel.exponent)))
    return SatakeTraceVector.from_traces(p, w[0], traces)


# ---------------------------------------------------------------------------
# modular forms


def _series_mul(a: Sequence[int], b: Sequence[int], length: int) -> list[int]:
    out = [0] * length
    for i, x in enumerate(a[:length]):
        if x:
            for j, y in enumerate(b[: length - i]):
                out[i + j] += x * y
    return out


def _eisenstein(k: int, length: int) -> list[int]:
    const = {4: 240, 6: -504}[k]
    out = [1] + [0] * (length - 1)
    for m in range(1, length):
        out[m] = const * sum(d ** (k - 1) for d in range(1, m + 1) if m % d == 0)
    return out


def ramanujan_coefficients(length: int) -> list[int]:
    """``q * prod (1 - q^m)^24`` as a list of coefficients of ``q^0 .. q^(length-1)``."""
    series = [0] * length
    if length > 1:
        series[1] = 1
    for m in range(1, length):
        factor = [0] * length
        for k in range(25):
            if k * m >= length:
                break
            factor[k * m] = (-1) ** k * comb(24, k)
        series = _series_mul(series, factor, length)
    return series


_CUSP_FORM_FACTORS = {12: (), 16: (4,), 18: (6,), 20: (4, 4), 22: (4, 6), 26: (4, 4, 6)}


def cusp_form_coefficient(k: int, p: int) -> int:
    """``tau_k(p)``: the ``q^p`` coefficient of the normalized cusp form of weight ``k`` (one-dimensional ``S_k``)."""
    if k not in _CUSP_FORM_FACTORS:
        raise ValueError(f"unsupported weight {k}")
    length = p + 1
    series = ramanujan_coefficients(length)
    for e in _CUSP_FORM_FACTORS[k]:
        series = _series_mul(series, _eisenstein(e, length), length)
    return series[p]


def modular_form_traces(k: int, p: int) -> ScaledTrace:
    """``tau_k(p) * p^(-(k-1)/2)``: the trace of ``c_p(Delta_{k-1})`` on the standard representation."""
    return ScaledTrace(Fraction(cusp_form_coefficient(k, p)), p, -(k - 1))


# ---------------------------------------------------------------------------
# Satake parameters of SL_n


class InsufficientDepth(ValueError):
    """An exterior-power trace needed by a computation is not known."""


@dataclass(frozen=True)
class SatakeParameter:
    """Traces ``e_k = Trace(c_p | Lambda^k)`` of a self-dual Satake parameter in ``SL_size``.

    Only ``e_1 .. e_depth`` need to be stored; ``e_0 = e_size = 1`` and
    ``e_{size-k} = e_k`` fill in the rest.
    """

    size: int
    p: int
    known: tuple[ScaledTrace, ...]

    def trace(self, k: int) -> ScaledTrace:
        if k < 0 or k > self.size:
            return ScaledTrace(Fraction(0), self.p)
        if k == 0 or k == self.size:
            return ScaledTrace(Fraction(1), self.p)
        if k <= len(self.known):
            return self.known[k - 1]
        if self.size - k <= len(self.known):
            return self.trace(self.size - k)
        raise InsufficientDepth(f"Lambda^{k} trace unknown for a parameter of size {self.size}")

    def traces(self, up_to: int) -> list[ScaledTrace]:
        return [self.trace(k) for k in range(up_to + 1)]

    @classmethod
    def from_traces(cls, size: int, p: int, traces: Sequence[ScaledTrace]) -> "SatakeParameter":
        half = size // 2
        return cls(size, p, tuple(traces[1 : min(len(traces), half + 1)]))


def power_traces(e: Sequence[ScaledTrace], up_to: int) -> list[ScaledTrace]:
    """``Trace(c^m)`` for ``m = 1..up_to`` from ``e_0..e_up_to`` (Newton identities)."""
    p_sums: list[ScaledTrace] = []
    for m in range(1, up_to + 1):
        acc = e[m] * ((-1) ** (m - 1) * m)
        for j in range(1, m):
            acc = acc + e[j] * p_sums[m - j - 1] * ((-1) ** (j - 1))
        p_sums.append(acc)
    return p_sums


def _elementary_from_powers(p_sums: Sequence[ScaledTrace], up_to: int, prime: int) -> list[ScaledTrace]:
    e = [ScaledTrace(Fraction(1), prime)]
    for k in range(1, up_to + 1):
        acc = ScaledTrace(Fraction(0), prime)
        for m in range(1, k + 1):
            acc = acc + e[k - m] * p_sums[m - 1] * ((-1) ** (m - 1))
        e.append(acc / k)
    return e


def unit_parameter(d: int, p: int) -> SatakeParameter:
    """``[d] = Sym^{d-1}(e_p)``: eigenvalues ``p^{(d-1)/2 - j}`` for ``j = 0..d-1``."""
    if d < 1:
        raise ValueError("d must be positive")
    coeffs = [ScaledTrace(Fraction(1), p)]
    for j in range(d):
        eig = ScaledTrace.power(p, d - 1 - 2 * j)
        nxt = coeffs + [ScaledTrace(Fraction(0), p)]
        for k in range(len(coeffs), 0, -1):
            nxt[k] = nxt[k] + coeffs[k - 1] * eig
        coeffs = nxt
    return SatakeParameter.from_traces(d, p, coeffs)


def unit_closed_form(d: int, k: int, p: int) -> ScaledTrace:
    """Closed forms for ``Trace(c_p([d]) | Lambda^k)``, ``k = 1..4``, as rational functions of ``p``."""
    q = Fraction(p)
    if k == 1:
        return ScaledTrace.power(p, 1 - d) * ((q**d - 1) / (q - 1))
    if k == 2:
        return ScaledTrace(q ** (2 - d) * (q**d - 1) * (q ** (d - 1) - 1) / ((q - 1) ** 2 * (q + 1)), p)
    if k == 3:
        num = (q**d - 1) * (q ** (d - 1) - 1) * (q ** (d - 2) - 1)
        den = (q - 1) ** 3 * (q + 1) * (q**2 + q + 1)
        return ScaledTrace.power(p, 3 * (3 - d)) * (num / den)
    if k == 4:
        num = (q**d - 1) * (q ** (d - 1) - 1) * (q ** (d - 2) - 1) * (q ** (d - 3) - 1)
        den = (q - 1) ** 4 * (q + 1) ** 2 * (q**2 + q + 1) * (q**2 + 1)
        return ScaledTrace(q ** (2 * (4 - d)) * num / den, p)
    raise ValueError("closed forms are available for k = 1..4")


def direct_sum(parts: Sequence[SatakeParameter], depth: int) -> SatakeParameter:
    """``e_k`` of a direct sum is the coefficient of ``t^k`` in the product of the summands' series."""
    p = parts[0].p
    size = sum(x.size for x in parts)
    depth = min(depth, size // 2)
    coeffs = [ScaledTrace(Fraction(1), p)] + [ScaledTrace(Fraction(0), p)] * depth
    for part in parts:
        series = part.traces(min(depth, part.size))
        nxt = [ScaledTrace(Fraction(0), p)] * (depth + 1)
        for a in range(depth + 1):
            for b, y in enumerate(series):
                if a + b <= depth:
                    nxt[a + b] = nxt[a + b] + coeffs[a] * y
        coeffs = nxt
    return SatakeParameter(size, p, tuple(coeffs[1:]))


def tensor_product(a: SatakeParameter, b: SatakeParameter, depth: int) -> SatakeParameter:
    """Power traces multiply under tensor products; exterior traces follow by Newton's identities."""
    p = a.p
    size = a.size * b.size
    depth = min(depth, size // 2)
    pa = power_traces(a.traces(depth), depth) if depth else []
    pb = power_traces(b.traces(depth), depth) if depth else []
    e = _elementary_from_powers([x * y for x, y in zip(pa, pb)], depth, p)
    return SatakeParameter(size, p, tuple(e[1:]))


# ---------------------------------------------------------------------------
# Arthur parameters and the form catalog


@dataclass(frozen=True)
class ArthurSummand:
    """``label[d]``; ``label`` is ``"1"`` for the trivial parameter of ``SL_1``."""

    label: str
    d: int = 1

    def __str__(self) -> str:
        base = "" if self.label == "1" else self.label
        return f"{base}[{self.d}]" if self.d != 1 or not base else base


@dataclass(frozen=True)
class ArthurParameter:
    summands: tuple[ArthurSummand, ...]
    multiplicity: int = 1

    def __str__(self) -> str:
        body = " + ".join(str(s) for s in self.summands)
        return body if self.multiplicity == 1 else f"{body} (x{self.multiplicity})"

    def size(self, catalog: "FormCatalog") -> int:
        return sum(catalog.size(s.label) * s.d for s in self.summands)


_NAME = re.compile(r"^(Delta(?:_\d+)+|1)(?:\^(\d+))?(?:\[(\d+)\])?$")


def parse_parameter(text: str) -> ArthurParameter:
    """Parse ``"Delta_23_7 + Delta_15"``, ``"Delta_11[3]"``, ``"[6]"`` or ``"Delta_25_19_5^2 + Delta_11"``.

    A superscript ``^k`` marks one of ``k`` conjugate forms sharing the label;
    the parameter then stands for ``k`` members of the packet.
    """
    summands = []
    mult = 1
    for raw in text.split("+"):
        token = raw.strip().replace(" ", "")
        if token.startswith("["):
            token = "1" + token
        m = _NAME.match(token)
        if not m:
            raise ValueError(f"cannot parse summand {raw!r}")
        label, sup, d = m.group(1), m.group(2), m.group(3)
        if sup:
            mult *= int(sup)
        summands.append(ArthurSummand(label, int(d) if d else 1))
    return ArthurParameter(tuple(summands), mult)


class CatalogGap(LookupError):
    """A trace needed for a subtraction is not in the catalog."""


@dataclass
class CatalogEntry:
    name: str
    size: int
    provenance: str
    traces: dict[int, tuple[ScaledTrace, ...]] = field(default_factory=dict)


def _scaled_to_json(t: ScaledTrace) -> dict:
    return {"mantissa": str(t.mantissa), "half_exponent": t.half_exponent}


def _scaled_from_json(p: int, blob) -> ScaledTrace:
    if isinstance(blob, (int, str)):
        return ScaledTrace(Fraction(blob), p)
    return ScaledTrace(Fraction(blob["mantissa"]), p, int(blob.get("half_exponent", 0)))


_LEVEL_ONE_WEIGHTS = {11: 12, 15: 16, 17: 18, 19: 20, 21: 22, 25: 26}


class FormCatalog:
    """Named cuspidal Satake parameters with per-prime traces.

    ``Delta_w`` for ``w`` in 11, 15, 17, 19, 21, 25 are computed from
    q-expansions; other entries are external inputs loaded from JSON.
    """

    def __init__(self, entries: Mapping[str, CatalogEntry] | None = None):
        self.entries: dict[str, CatalogEntry] = dict(entries or {})

    @staticmethod
    def label_size(label: str) -> int:
        if label == "1":
            return 1
        indices = label.split("_")[1:]
        return 2 * len(indices)

    def size(self, label: str) -> int:
        if label in self.entries:
            return self.entries[label].size
        return self.label_size(label)

    def provenance(self, label: str) -> str:
        if label in self.entries:
            return self.entries[label].provenance
        if label == "1" or self._level_one(label):
            return "computed"
        return "missing"

    @staticmethod
    def _level_one(label: str) -> int | None:
        parts = label.split("_")[1:]
        if len(parts) == 1 and int(parts[0]) in _LEVEL_ONE_WEIGHTS:
            return _LEVEL_ONE_WEIGHTS[int(parts[0])]
        return None

    def parameter(self, label: str, p: int) -> SatakeParameter:
        if label == "1":
            return SatakeParameter(1, p, ())
        if label in self.entries and p in self.entries[label].traces:
            e = self.entries[label]
            return SatakeParameter(e.size, p, e.traces[p])
        weight = self._level_one(label)
        if weight is not None:
            return SatakeParameter(2, p, (modular_form_traces(weight, p),))
        raise CatalogGap(f"no traces for {label} at p = {p}")

    def add(self, name: str, p: int, traces: Sequence[ScaledTrace], provenance: str = "computed") -> None:
        entry = self.entries.setdefault(name, CatalogEntry(name, self.label_size(name), provenance))
        entry.traces[p] = tuple(traces)

    @classmethod
    def load(cls, path: str | Path) -> "FormCatalog":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        entries = {}
        for name, body in data.items():
            entry = CatalogEntry(name, int(body.get("size", cls.label_size(name))), body.get("provenance", "external"))
            for p_text, per_i in body.get("traces", {}).items():
                p = int(p_text)
                ordered = sorted((int(i), v) for i, v in per_i.items())
                if [i for i, _ in ordered] != list(range(1, len(ordered) + 1)):
                    raise ValueError(f"{name}: traces must cover Lambda^1 .. Lambda^k")
                entry.traces[p] = tuple(_scaled_from_json(p, v) for _, v in ordered)
            entries[name] = entry
        return cls(entries)

    def dump(self, path: str | Path) -> None:
        out = {}
        for name, e in sorted(self.entries.items()):
            out[name] = {
                "size": e.size,
                "provenance": e.provenance,
                "traces": {
                    str(p): {str(i + 1): _scaled_to_json(t) for i, t in enumerate(ts)} for p, ts in sorted(e.traces.items())
                },
            }
        Path(path).write_text(json.dumps(out, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def param_traces(ap: ArthurParameter, p: int, i: int, catalog: FormCatalog | None = None) -> ScaledTrace:
    """``Trace(c_p(ap) | Lambda^i V_St)`` for ``i <= 4``."""
    if not 0 <= i <= 4:
        raise ValueError("exterior powers up to 4 are supported")
    catalog = catalog or FormCatalog()
    parts = []
    for s in ap.summands:
        base = catalog.parameter(s.label, p)
        parts.append(base if s.d == 1 else tensor_product(base, unit_parameter(s.d, p), i))
    total = parts[0] if len(parts) == 1 else direct_sum(parts, i)
    return total.trace(i)


# ---------------------------------------------------------------------------
# packets and subtraction

_PACKETS_TEXT = {
    7: """
        5,3,1: [6]
        13,11,9: Delta_11[3]
        17,15,13: Delta_15[3]
        17,3,1: Delta_17 + [4]
        23,13,5: Delta_23_13_5
        23,11,7: Delta_23_7 + Delta_11
        23,15,7: Delta_23_7 + Delta_15 ; Delta_23_15_7
    """,
    9: """
        25,17,9,5: Delta_25_17_9_5
        25,17,13,5: Delta_25_17_13_5
        25,19,9,3: Delta_25_19_9_3
        25,19,11,5: Delta_25_19_5^2 + Delta_11 ; Delta_25_19_11_5
        25,19,13,3: Delta_25_19_13_3
        25,19,13,5: Delta_25_19_13_5
        25,19,13,7: Delta_25_13^2 + Delta_19_7 ; Delta_25_19_13_7
        25,19,13,9: Delta_25_19_13_9
        25,19,15,5: Delta_25_19_5^2 + Delta_15 ; Delta_25_19_15_5
        25,21,11,7: Delta_25_21_7^2 + Delta_11 ; Delta_25_21_11_7
        25,21,13,5: Delta_25_13^2 + Delta_21_5 ; Delta_25_21_13_5
        25,21,13,7: Delta_25_21_13_7
        25,21,15,3: Delta_25_21_3^2 + Delta_15 ; Delta_25_21_15_3
        25,21,15,5: Delta_25 + Delta_15 + Delta_21_5 ; Delta_25_15 + Delta_21_5 ; Delta_25_21_15_5
        25,21,15,7: Delta_25_21_7^2 + Delta_15 ; Delta_25_21_15_7^2
        25,21,15,9: Delta_25 + Delta_15 + Delta_21_9 ; Delta_25_15 + Delta_21_9 ; Delta_25_21_15_9
        25,21,17,5: Delta_25 + Delta_17 + Delta_21_5 ; Delta_25_17 + Delta_21_5 ; Delta_25_21_17_5
        25,21,17,7: Delta_25_21_7^2 + Delta_17 ; Delta_25_21_17_7
        25,21,17,9: Delta_25 + Delta_21_9 + Delta_17 ; Delta_25_17 + Delta_21_9 ; Delta_25_21_17_9
        25,23,9,3: Delta_25_23_9_3
        25,23,11,1: Delta_25_23_11_1
        25,23,11,5: Delta_25_23_11_5^2
        25,23,13,3: Delta_25_23_13_3
        25,23,13,7: Delta_25_13^2 + Delta_23_7 ; Delta_25_23_13_7
        25,23,15,1: Delta_25_23_15_1
        25,23,15,5: Delta_25_23_15_5^3
        25,23,15,9: Delta_25 + Delta_15 + Delta_23_9 ; Delta_25_15 + Delta_23_9 ; Delta_25_23_15_9
        25,23,15,11: Delta_25_23_15_11
        25,23,17,3: Delta_25_23_17_3
        25,23,17,5: Delta_23_17_5 + Delta_25 ; Delta_25_23_17_5
        25,23,17,7: Delta_25 + Delta_17 + Delta_23_7 ; Delta_25_17 + Delta_23_7 ; Delta_25_23_17_7
        25,23,17,11: Delta_25_23_17_11
        25,23,19,5: Delta_25_23_19_5
    """,
}


@lru_cache(maxsize=None)
def _packets(n: int) -> dict[tuple[int, ...], tuple[ArthurParameter, ...]]:
    out = {}
    for line in _PACKETS_TEXT.get(n, "").strip().splitlines():
        key, _, body = line.partition(":")
        w = tuple(int(x) for x in key.split(","))
        out[w] = tuple(parse_parameter(part) for part in body.split(";"))
    return out


def packet(n: int, weights: Sequence[int]) -> tuple[ArthurParameter, ...]:
    """Arthur parameters of the discrete automorphic representations of ``SO_n`` with the given weights."""
    try:
        return _packets(n)[tuple(weights)]
    except KeyError:
        raise CatalogGap(f"no packet decomposition embedded for SO_{n} weights {tuple(weights)}") from None


def _is_target(ap: ArthurParameter, catalog: FormCatalog) -> bool:
    return len(ap.summands) == 1 and ap.summands[0].d == 1 and catalog.provenance(ap.summands[0].label) == "missing"


def endoscopic_subtract(
    n: int,
    weights: Sequence[int],
    totals: SatakeTraceVector,
    catalog: FormCatalog | None = None,
    target: ArthurParameter | None = None,
    members: Sequence[ArthurParameter] | None = None,
) -> tuple[ArthurParameter | None, SatakeTraceVector]:
    """Remove the contributions of all packet members except ``target`` from ``totals``.

    Without ``target`` the member whose traces are missing from the catalog
    is isolated; when every member is known the residual (zero for consistent
    data) is returned with ``None``.  A member standing for ``k`` conjugate
    forms contributes, or is isolated as, the sum over the ``k`` of them.
    """
    catalog = catalog or FormCatalog()
    members = tuple(members) if members is not None else packet(n, weights)
    if target is None:
        unknown = [ap for ap in members if _is_target(ap, catalog)]
        if len(unknown) > 1:
            raise CatalogGap("more than one packet member has unknown traces: " + ", ".join(map(str, unknown)))
        target = unknown[0] if unknown else None
    elif target not in members:
        raise ValueError(f"{target} is not a member of the packet")
    depth = len(totals.entries)
    rest = totals
    for ap in members:
        if ap == target:
            continue
        values = [param_traces(ap, totals.p, i, catalog) * ap.multiplicity for i in range(1, depth + 1)]
        rest = rest - SatakeTraceVector.from_traces(totals.p, totals.w1, values)
    return target, rest


def divide_unit_twist(trace_of_twist: ScaledTrace, d: int, p: int) -> ScaledTrace:
    """``Trace(c_p(pi) | V_St)`` from ``Trace(c_p(pi[d]) | V_St)``: trace multiplies under tensor products."""
    return trace_of_twist / unit_parameter(d, p).trace(1)
