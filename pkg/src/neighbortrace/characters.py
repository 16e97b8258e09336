"""Characters of irreducible representations of SO_n(R), n = 7, 8, 9, at orthogonal matrices.

A matrix enters through its characteristic polynomial.  Factoring it over Q
fixes a torus element ``t`` up to the Weyl group, and decides exactly which
roots satisfy ``t^alpha = 1``.  The degenerate Weyl character formula is then
evaluated:

* exactly in a cyclotomic field when every eigenvalue is a root of unity;
* otherwise on complex ball enclosures of the eigenvalues, with precision
  doubled until the requested width is met.

An independent exact route is the Koike-Terada determinant in the complete
symmetric functions of the eigenvalues; it gives the orthogonal-group character,
which equals the ``SO_n`` character for odd ``n`` and ``chi_lambda + chi_lambda_bar``
for even ``n`` with a nonzero last coordinate.
"""

from __future__ import annotations

import contextlib
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import lcm
from typing import Iterator, Sequence

import flint

from ._exact import frac

__all__ = [
    "DominantWeight",
    "WeightData",
    "weight_data",
    "Slot",
    "TorusParameter",
    "CharacterValue",
    "torus_parameter",
    "parameter_from_charpoly",
    "degenerate_character",
    "averaged_character",
    "weyl_dimension",
    "koike_terada_character",
    "averaged_from_charpoly_exact",
    "charpoly_from_power_sums",
    "precision",
]

DEFAULT_PRECISION = 128
MAX_PRECISION = 8192


@contextlib.contextmanager
def precision(bits: int) -> Iterator[None]:
    """Temporarily set the working precision of ball arithmetic."""
    old = flint.ctx.prec
    flint.ctx.prec = bits
    try:
        yield
    finally:
        flint.ctx.prec = old


# ---------------------------------------------------------------------------
# root data of SO_n


@dataclass(frozen=True)
class WeightData:
    """Root datum of ``SO_n`` on the character lattice ``Z^m`` with ``m = n // 2``.

    ``weyl`` lists signed permutations ``(perm, signs, sign)`` acting by
    ``w(v)_i = signs[i] * v[perm[i]]``; ``sign`` is the determinant.
    """

    n: int
    positive_roots: tuple[tuple[int, ...], ...]
    rho: tuple[Fraction, ...]
    weyl: tuple[tuple[tuple[int, ...], tuple[int, ...], int], ...]

    @property
    def rank(self) -> int:
        return self.n // 2

    @cached_property
    def positive_set(self) -> frozenset[tuple[int, ...]]:
        return frozenset(self.positive_roots)


def _perm_sign(perm: Sequence[int]) -> int:
    s = 1
    for i, j in itertools.combinations(range(len(perm)), 2):
        if perm[i] > perm[j]:
            s = -s
    return s


@lru_cache(maxsize=None)
def weight_data(n: int) -> WeightData:
    """Type ``B_m`` for odd ``n``, ``D_m`` for even ``n``, generated from the definitions."""
    if n < 3:
        raise ValueError("n must be at least 3")
    m = n // 2
    roots = []
    for i, j in itertools.combinations(range(m), 2):
        for s in (-1, 1):
            v = [0] * m
            v[i] = 1
            v[j] = s
            roots.append(tuple(v))
    if n % 2:
        for i in range(m):
            v = [0] * m
            v[i] = 1
            roots.append(tuple(v))
    roots.sort(reverse=True)
    rho = tuple(sum((Fraction(r[a]) for r in roots), Fraction(0)) / 2 for a in range(m))
    weyl = []
    for perm in itertools.permutations(range(m)):
        ps = _perm_sign(perm)
        for signs in itertools.product((1, -1), repeat=m):
            prod = 1
            for s in signs:
                prod *= s
            if n % 2 == 0 and prod != 1:
                continue
            weyl.append((perm, signs, ps * prod))
    return WeightData(n, tuple(roots), rho, tuple(weyl))


def _act(w, v: Sequence) -> tuple:
    perm, signs, _ = w
    return tuple(signs[i] * v[perm[i]] for i in range(len(perm)))


def _act_inverse(w, v: Sequence) -> tuple:
    perm, signs, _ = w
    out = [0] * len(perm)
    for i in range(len(perm)):
        out[perm[i]] = signs[i] * v[i]
    return tuple(out)


def _pair(a: Sequence, b: Sequence) -> Fraction:
    return sum((frac(x) * frac(y) for x, y in zip(a, b)), Fraction(0))


@dataclass(frozen=True)
class DominantWeight:
    """Highest weight ``(m_1, ..., m_m)`` of an irreducible representation of ``SO_n``."""

    n: int
    coords: tuple[int, ...]

    def __post_init__(self):
        m = self.n // 2
        c = tuple(int(x) for x in self.coords)
        object.__setattr__(self, "coords", c)
        if len(c) != m:
            raise ValueError(f"SO_{self.n} weights have {m} coordinates")
        body = c[:-1] if self.n % 2 == 0 else c
        if any(body[i] < body[i + 1] for i in range(len(body) - 1)):
            raise ValueError(f"{c} is not dominant")
        if self.n % 2:
            if c[-1] < 0:
                raise ValueError(f"{c} is not dominant")
        elif m >= 2 and c[-2] < abs(c[-1]):
            raise ValueError(f"{c} is not dominant")

    @property
    def bar(self) -> "DominantWeight":
        """The weight of the conjugate representation by an element of ``O_n`` outside ``SO_n``."""
        if self.n % 2:
            return self
        return DominantWeight(self.n, self.coords[:-1] + (-self.coords[-1],))

    @property
    def is_self_conjugate(self) -> bool:
        return self.n % 2 == 1 or self.coords[-1] == 0


def weyl_dimension(weight: DominantWeight) -> int:
    """``prod (alpha, lambda + rho) / (alpha, rho)`` over positive roots."""
    data = weight_data(weight.n)
    lr = tuple(x + r for x, r in zip(weight.coords, data.rho))
    val = Fraction(1)
    for a in data.positive_roots:
        val *= _pair(a, lr) / _pair(a, data.rho)
    if val.denominator != 1:
        raise ArithmeticError("Weyl dimension is not an integer")
    return int(val)


# ---------------------------------------------------------------------------
# torus parameters


@dataclass(frozen=True)
class Slot:
    """One torus coordinate: ``kind`` is ``"one"``, ``"minus"`` or ``"root"``.

    A ``"root"`` slot is the ``root_index``-th eigenvalue with positive imaginary
    part of irreducible factor ``factor_index``; ``order`` is its multiplicative
    order when that factor is cyclotomic (0 otherwise) and ``exponent`` the ``a`` in
    ``exp(2 pi i a / order)``.
    """

    kind: str
    factor_index: int = -1
    root_index: int = -1
    order: int = 0
    exponent: int = 0

    @property
    def identity(self) -> tuple:
        return (self.kind, self.factor_index, self.root_index)


@dataclass(frozen=True, eq=False)
class TorusParameter:
    """A torus element attached to a characteristic polynomial.

    ``charpoly`` lists coefficients from the constant term up; ``slots`` is the
    exact relation structure; enclosures are computed on demand at any precision.
    """

    n: int
    charpoly: tuple[Fraction, ...]
    factors: tuple[tuple[tuple[Fraction, ...], int], ...]
    slots: tuple[Slot, ...]
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def rank(self) -> int:
        return len(self.slots)

    @property
    def has_real_eigenvalue_slot(self) -> bool:
        """Some ``t_i`` equals +-1 (then ``t`` and ``t_bar`` are conjugate in ``SO_n``)."""
        return any(s.kind != "root" for s in self.slots)

    @property
    def is_torsion(self) -> bool:
        return all(s.kind != "root" or s.order > 0 for s in self.slots)

    def pattern(self) -> tuple[int, ...]:
        """Canonical labels: equal labels mean equal coordinates."""
        seen: dict[tuple, int] = {}
        return tuple(seen.setdefault(s.identity, len(seen)) for s in self.slots)

    def kinds(self) -> tuple[str, ...]:
        return tuple(s.kind for s in self.slots)

    def enclosures(self, bits: int) -> list[flint.acb]:
        key = ("enc", bits)
        if key not in self._cache:
            with precision(bits):
                roots_by_factor = {}
                out = []
                for s in self.slots:
                    if s.kind == "one":
                        out.append(flint.acb(1))
                    elif s.kind == "minus":
                        out.append(flint.acb(-1))
                    else:
                        if s.factor_index not in roots_by_factor:
                            roots_by_factor[s.factor_index] = _upper_roots(self.factors[s.factor_index][0])
                        out.append(roots_by_factor[s.factor_index][s.root_index])
                self._cache[key] = out
        return self._cache[key]

    def cyclotomic_data(self) -> tuple[int, tuple[int, ...]] | None:
        """``(N, k)`` with ``t_i = zeta_N^{k_i}`` when every eigenvalue is a root of unity."""
        if not self.is_torsion:
            return None
        orders = [1 if s.kind == "one" else 2 if s.kind == "minus" else s.order for s in self.slots]
        big = lcm(*orders) if orders else 1
        ks = []
        for s, o in zip(self.slots, orders):
            if s.kind == "one":
                ks.append(0)
            elif s.kind == "minus":
                ks.append(big // 2)
            else:
                ks.append(s.exponent * (big // o))
        return big, tuple(ks)


def _poly_coeffs(p: flint.fmpq_poly) -> tuple[Fraction, ...]:
    return tuple(frac(c) for c in p.coeffs())


def _integer_poly(coeffs: Sequence[Fraction]) -> flint.fmpz_poly:
    d = lcm(*(Fraction(c).denominator for c in coeffs))
    return flint.fmpz_poly([int(Fraction(c) * d) for c in coeffs])


def _upper_roots(coeffs: Sequence[Fraction]) -> list[flint.acb]:
    """Roots with positive imaginary part, sorted by argument, at the current precision."""
    roots = [r for r, _ in _integer_poly(coeffs).complex_roots()]
    up = [r for r in roots if r.imag > 0]
    if 2 * len(up) != len(roots):
        raise ArithmeticError("could not separate conjugate eigenvalues")
    up.sort(key=lambda r: float(r.arg().mid()))
    return up


def _is_self_reciprocal(coeffs: Sequence[Fraction]) -> bool:
    c = list(coeffs)
    lead = c[-1]
    rev = [x / c[0] * lead for x in reversed(c)] if c[0] else None
    return rev is not None and rev == c


def _cyclotomic_exponents(order: int) -> list[int]:
    """``a`` in ``(0, order/2)`` coprime to ``order``: the roots of ``Phi_order`` in the upper half plane."""
    from math import gcd

    return [a for a in range(1, (order + 1) // 2) if gcd(a, order) == 1 and 2 * a < order]


@lru_cache(maxsize=65536)
def parameter_from_charpoly(n: int, charpoly: tuple[Fraction, ...]) -> TorusParameter:
    """Factor ``det(X - g)`` over Q and record the torus coordinates with their exact relations."""
    coeffs = tuple(frac(c) for c in charpoly)
    if len(coeffs) != n + 1 or coeffs[-1] != 1:
        raise ValueError("characteristic polynomial must be monic of degree n")
    poly = flint.fmpq_poly([flint.fmpq(c.numerator, c.denominator) for c in coeffs])
    _, facs = poly.factor()
    ones = minus = 0
    rest: list[tuple[tuple[Fraction, ...], int]] = []
    for f, e in facs:
        fc = _poly_coeffs(f)
        fc = tuple(x / fc[-1] for x in fc)
        if fc == (Fraction(-1), Fraction(1)):
            ones += e
        elif fc == (Fraction(1), Fraction(1)):
            minus += e
        else:
            if len(fc) % 2 == 0 or not _is_self_reciprocal(fc):
                raise ValueError("matrix is not orthogonal: eigenvalues off the unit circle")
            rest.append((fc, e))
    if minus % 2:
        raise ValueError("determinant is -1: not in SO_n")
    if (ones % 2) != (n % 2):
        raise ValueError("multiplicity of the eigenvalue 1 has the wrong parity")
    rest.sort()
    slots: list[Slot] = []
    for fi, (fc, e) in enumerate(rest):
        order = _integer_poly(fc).is_cyclotomic()
        degree = len(fc) - 1
        exps = _cyclotomic_exponents(order) if order else [0] * (degree // 2)
        for ri in range(degree // 2):
            slot = Slot("root", fi, ri, int(order), exps[ri] if order else 0)
            slots.extend([slot] * e)
    slots.extend([Slot("one")] * (ones // 2))
    slots.extend([Slot("minus")] * (minus // 2))
    if len(slots) != n // 2:
        raise ArithmeticError("torus coordinates do not match the rank")
    return TorusParameter(n, coeffs, tuple(rest), tuple(slots))


def _charpoly_of_matrix(g: flint.fmpq_mat) -> tuple[Fraction, ...]:
    return _poly_coeffs(g.charpoly())


def torus_parameter(g: flint.fmpq_mat, form: flint.fmpq_mat | None = None) -> TorusParameter:
    """Torus parameter of an exact matrix orthogonal for ``form`` (identity by default)."""
    n = g.nrows()
    f = form if form is not None else flint.fmpq_mat([[int(i == j) for j in range(n)] for i in range(n)])
    if g.transpose() * f * g != f:
        raise ValueError("matrix does not preserve the form")
    return parameter_from_charpoly(n, _charpoly_of_matrix(g))


# ---------------------------------------------------------------------------
# degenerate Weyl character formula


def _dyadic(x: flint.arb) -> Fraction:
    man, exp = x.man_exp()
    return Fraction(int(man)) * Fraction(2) ** int(exp)


@dataclass(frozen=True)
class CharacterValue:
    """A character value: ``exact`` when certified rational, else a complex ball ``enclosure``."""

    exact: Fraction | None
    enclosure: flint.acb | None = None
    bits: int = 0

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def width(self) -> float:
        if self.exact is not None:
            return 0.0
        return float(self.enclosure.real.rad()) + float(self.enclosure.imag.rad())

    def contains(self, x: Fraction) -> bool:
        """Exact membership of a rational: compares against the dyadic midpoint and radius."""
        if self.exact is not None:
            return self.exact == x
        re, im = self.enclosure.real, self.enclosure.imag
        return abs(frac(x) - _dyadic(re.mid())) <= _dyadic(re.rad()) and abs(_dyadic(im.mid())) <= _dyadic(im.rad())

    def as_ball(self) -> flint.acb:
        if self.exact is not None:
            return flint.acb(flint.fmpq(self.exact.numerator, self.exact.denominator))
        return self.enclosure


def _root_is_trivial(alpha: Sequence[int], t: TorusParameter) -> bool:
    """``t^alpha == 1`` decided from the slot structure alone."""
    idx = [i for i, a in enumerate(alpha) if a]
    kinds = [t.slots[i] for i in idx]
    if len(idx) == 1:
        return kinds[0].kind == "one"
    a, b = (alpha[i] for i in idx)
    s1, s2 = kinds
    if s1.kind != "root" and s2.kind != "root":
        return s1.kind == s2.kind
    if a == -b:
        return s1.identity == s2.identity
    return False


@lru_cache(maxsize=4096)
def _weyl_terms(n: int, weight: tuple[int, ...], pattern: tuple[int, ...], kinds: tuple[str, ...]):
    """Exact numerator terms ``{exponent: coefficient}`` and the list of non-trivial positive roots."""
    data = weight_data(n)
    probe = TorusParameter(n, (), (), tuple(_pattern_slot(k, p) for k, p in zip(kinds, pattern)))
    phi_m = [a for a in data.positive_roots if _root_is_trivial(a, probe)]
    others = [a for a in data.positive_roots if a not in phi_m]
    rho_m = tuple(sum((Fraction(a[i]) for a in phi_m), Fraction(0)) / 2 for i in range(data.rank))
    lr = tuple(w + r for w, r in zip(weight, data.rho))
    pos = data.positive_set
    terms: dict[tuple[int, ...], Fraction] = {}
    denominators = [_pair(a, rho_m) for a in phi_m]
    for w in data.weyl:
        if any(_act_inverse(w, a) not in pos for a in phi_m):
            continue
        wl = _act(w, lr)
        expo = tuple(x - r for x, r in zip(wl, data.rho))
        if any(Fraction(e).denominator != 1 for e in expo):
            raise ArithmeticError("non-integral exponent in the Weyl numerator")
        coeff = Fraction(w[2])
        for a, den in zip(phi_m, denominators):
            coeff *= _pair(a, wl) / den
        if coeff:
            key = tuple(int(e) for e in expo)
            terms[key] = terms.get(key, Fraction(0)) + coeff
    return tuple((k, v) for k, v in sorted(terms.items()) if v), tuple(others)


def _pattern_slot(kind: str, label: int) -> Slot:
    return Slot(kind, label if kind == "root" else -1, 0)


def _evaluate_exact(terms, others, t: TorusParameter) -> flint.fmpq_poly:
    big, ks = t.cyclotomic_data()
    phi = flint.fmpq_poly(flint.fmpz_poly.cyclotomic(big).coeffs())

    def power(e: int) -> flint.fmpq_poly:
        return (flint.fmpq_poly([0] * (e % big) + [1])) % phi

    num = flint.fmpq_poly([0])
    for expo, c in terms:
        num += power(sum(e * k for e, k in zip(expo, ks))) * flint.fmpq(c.numerator, c.denominator)
    num = num % phi
    den = flint.fmpq_poly([1])
    for a in others:
        den = (den * (1 - power(-sum(x * k for x, k in zip(a, ks))))) % phi
    g, s, _ = den.xgcd(phi)
    if g.degree() != 0:
        raise ArithmeticError("Weyl denominator vanishes on a regular coordinate")
    return (num * s) % phi * (1 / g.coeffs()[0])


def _cyclotomic_value(val: flint.fmpq_poly, big: int, bits: int) -> CharacterValue:
    if val.degree() <= 0:
        c = val.coeffs()
        return CharacterValue(frac(c[0]) if c else Fraction(0), None, bits)
    with precision(bits):
        zeta = flint.acb.exp_pi_i(flint.acb(flint.fmpq(2, big)))
        total = flint.acb(0)
        for i, c in enumerate(val.coeffs()):
            total += flint.acb(c) * zeta**i
    return CharacterValue(None, total, bits)


def _evaluate_balls(terms, others, t: TorusParameter, bits: int) -> flint.acb:
    enc = t.enclosures(bits)
    with precision(bits):
        cache: dict[tuple[int, int], flint.acb] = {}

        def pw(i: int, e: int) -> flint.acb:
            key = (i, e)
            if key not in cache:
                cache[key] = enc[i] ** e
            return cache[key]

        num = flint.acb(0)
        for expo, c in terms:
            mono = flint.acb(1)
            for i, e in enumerate(expo):
                if e:
                    mono *= pw(i, e)
            num += mono * flint.acb(flint.fmpq(c.numerator, c.denominator))
        den = flint.acb(1)
        for a in others:
            mono = flint.acb(1)
            for i, e in enumerate(a):
                if e:
                    mono *= pw(i, -e)
            den *= 1 - mono
        if den.contains(0):
            raise ArithmeticError("Weyl denominator enclosure contains zero: a relation was missed")
        return num / den


def degenerate_character(
    weight: DominantWeight, t: TorusParameter, bits: int = DEFAULT_PRECISION, width: float | None = None
) -> CharacterValue:
    """``chi_{V_lambda}(t)`` by the degenerate Weyl character formula.

    Exact over a cyclotomic field for torsion ``t``; otherwise a ball at ``bits``
    of precision, doubled until its width is below ``width`` when one is given.
    """
    if weight.n != t.n:
        raise ValueError("weight and torus parameter belong to different groups")
    terms, others = _weyl_terms(t.n, weight.coords, t.pattern(), t.kinds())
    if t.is_torsion:
        big, _ = t.cyclotomic_data()
        return _cyclotomic_value(_evaluate_exact(terms, others, t), big, bits)
    while True:
        ball = _evaluate_balls(terms, others, t, bits)
        value = CharacterValue(None, ball, bits)
        if width is None or value.width() < width:
            return value
        if bits >= MAX_PRECISION:
            raise ArithmeticError("character enclosure did not reach the requested width")
        bits *= 2


def averaged_character(
    weight: DominantWeight, t: TorusParameter, bits: int = DEFAULT_PRECISION, width: float | None = None
) -> CharacterValue:
    """``(chi_lambda(t) + chi_lambda_bar(t)) / 2``, which does not depend on the ``t`` versus ``t_bar`` ambiguity."""
    if weight.is_self_conjugate or t.has_real_eigenvalue_slot:
        # a coordinate equal to +-1 can be moved last, where conjugation does nothing
        return degenerate_character(weight, t, bits, width)
    a = degenerate_character(weight, t, bits, width)
    b = degenerate_character(weight.bar, t, bits, width)
    return _mean(a, b)


def _mean(a: CharacterValue, b: CharacterValue) -> CharacterValue:
    if a.is_exact and b.is_exact:
        return CharacterValue((a.exact + b.exact) / 2, None, max(a.bits, b.bits))
    with precision(max(a.bits, b.bits)):
        ball = (a.as_ball() + b.as_ball()) / 2
    return CharacterValue(None, ball, max(a.bits, b.bits))


# ---------------------------------------------------------------------------
# independent exact route


def _elementary_from_charpoly(charpoly: Sequence[Fraction]) -> list[Fraction]:
    n = len(charpoly) - 1
    return [(-1) ** k * frac(charpoly[n - k]) for k in range(n + 1)]


def _complete_symmetric(charpoly: Sequence[Fraction], up_to: int) -> list[Fraction]:
    e = _elementary_from_charpoly(charpoly)
    n = len(e) - 1
    h = [Fraction(1)]
    for k in range(1, up_to + 1):
        h.append(sum(((-1) ** (i + 1) * e[i] * h[k - i] for i in range(1, min(k, n) + 1)), Fraction(0)))
    return h


def koike_terada_character(coords: Sequence[int], charpoly: Sequence[Fraction]) -> Fraction:
    """Orthogonal-group character ``det(h_{l_i - i + j} - h_{l_i - i - j})`` for the partition ``|coords|``."""
    parts = [abs(int(x)) for x in coords]
    parts = [x for x in parts if x]
    if not parts:
        return Fraction(1)
    size = len(parts)
    top = parts[0] + size
    h = _complete_symmetric(charpoly, top)

    def hk(k: int) -> Fraction:
        return h[k] if 0 <= k <= top else Fraction(0)

    # 1-based i, j as in the determinant formula
    rows = [[hk(parts[i] - (i + 1) + (j + 1)) - hk(parts[i] - (i + 1) - (j + 1)) for j in range(size)] for i in range(size)]
    m = flint.fmpq_mat([[flint.fmpq(x.numerator, x.denominator) for x in r] for r in rows])
    return frac(m.det())


def averaged_from_charpoly_exact(weight: DominantWeight, charpoly: Sequence[Fraction]) -> Fraction:
    """The averaged character through the Koike-Terada determinant."""
    o = koike_terada_character(weight.coords, charpoly)
    if weight.is_self_conjugate:
        return o
    return o / 2


def charpoly_from_power_sums(n: int, power_sums: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Characteristic polynomial of a matrix in ``SO_n`` from ``p_1, ..., p_{n//2}``.

    Newton's identities give ``e_1, ..., e_{n//2}``; the rest follow from
    ``e_{n-k} = e_k`` (eigenvalues closed under inversion, determinant 1).
    """
    half = n // 2
    if len(power_sums) < half:
        raise ValueError(f"need {half} power sums")
    p = [Fraction(0)] + [frac(x) for x in power_sums]
    e = [Fraction(1)]
    for k in range(1, half + 1):
        e.append(sum(((-1) ** (i - 1) * e[k - i] * p[i] for i in range(1, k + 1)), Fraction(0)) / k)
    full = e + [Fraction(0)] * (n - half)
    for k in range(half + 1, n + 1):
        full[k] = e[n - k]
    return tuple((-1) ** (n - j) * full[n - j] for j in range(n + 1))
