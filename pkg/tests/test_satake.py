import itertools
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neighbortrace.hecke_trace import GroupDescriptor, ScaledTrace, traces_for_weights
from neighbortrace.reference_values import CHARPOLY_P2
from neighbortrace.satake import (
    CatalogGap,
    FormCatalog,
    Polynomial,
    SatakeParameter,
    SatakeTraceVector,
    cusp_form_coefficient,
    direct_sum,
    divide_unit_twist,
    endoscopic_subtract,
    exterior_decomposition,
    gross_relations,
    hecke_to_satake,
    infinitesimal_weights,
    kato_dlambda,
    kato_polynomial,
    modular_form_traces,
    packet,
    param_traces,
    parse_parameter,
    power_traces,
    ramanujan_coefficients,
    root_datum,
    tensor_product,
    unit_closed_form,
    unit_parameter,
)

from tests.helpers import cusp_coefficient_oracle

PRIMES = (2, 3, 5, 7, 11)

# expected relations: {dual type: {i: (exponent, {j: coefficients of the polynomial in p})}}
EXPECTED_RELATIONS = {
    "C3": {1: (Fraction(5, 2), {1: [1]}), 2: (4, {2: [1], 0: [1, 0, 1, 0, 1]}), 3: (Fraction(9, 2), {3: [1], 1: [1, 0, 1]})},
    "D4": {1: (3, {1: [1]}), 2: (5, {2: [1], 0: [1, 0, 2, 0, 1]}), 3: (6, {3: [1], 1: [1, 1, 1]}),
           4: (6, {4: [1], 2: [2], 0: [2, 0, 2, 0, 2]})},
    "C4": {1: (Fraction(7, 2), {1: [1]}), 2: (6, {2: [1], 0: [1, 0, 1, 0, 1, 0, 1]}),
           3: (Fraction(15, 2), {3: [1], 1: [1, 0, 1, 0, 1]}),
           4: (8, {4: [1], 2: [1, 0, 1], 0: [1, 0, 1, 0, 2, 0, 1, 0, 1]})},
}


def _poly_at(coeffs, p):
    return sum(c * p**k for k, c in enumerate(coeffs))


@pytest.mark.parametrize("dual", ["C3", "D4", "C4"])
@pytest.mark.parametrize("p", PRIMES)
def test_gross_relations_match_the_expected_identities(dual, p):
    relations = gross_relations(dual)
    assert len(relations) == len(EXPECTED_RELATIONS[dual])
    for rel in relations:
        exponent, coeffs = EXPECTED_RELATIONS[dual][rel.i]
        assert rel.exponent == exponent
        assert rel.evaluate(p) == {j: _poly_at(c, p) for j, c in coeffs.items()}


def _standard_weights(dual):
    r = root_datum(dual).rank
    return [tuple(s if k == i else 0 for k in range(r)) for i in range(r) for s in (1, -1)]


def _exterior_weight_multiplicities(dual, i):
    return Counter(tuple(map(sum, zip(*c))) for c in itertools.combinations(_standard_weights(dual), i))


def _dominant(dual, counter):
    datum = root_datum(dual)
    return {mu: m for mu, m in counter.items() if datum.is_dominant(mu)}


@pytest.mark.parametrize("dual", ["C3", "D4", "C4"])
def test_kato_at_one_gives_weight_multiplicities_of_exterior_powers(dual):
    r = root_datum(dual).rank
    for i in range(1, r + 1):
        summands = exterior_decomposition(dual, i)
        expected = _dominant(dual, _exterior_weight_multiplicities(dual, i))
        got = Counter()
        for nu in summands:
            for mu in expected:
                try:
                    got[mu] += kato_polynomial(dual, nu, mu)(1)
                except ValueError:
                    pass
        assert dict(got) == expected


@pytest.mark.parametrize("dual", ["C3", "D4", "C4"])
def test_kato_at_one_gives_weight_multiplicities_of_the_symmetric_square(dual):
    # Sym^2 of the standard representation: irreducible (adjoint) in type C, adjoint-free V_(2,0..) plus trivial in type D
    std = _standard_weights(dual)
    sym = Counter(tuple(map(sum, zip(a, b))) for a, b in itertools.combinations_with_replacement(std, 2))
    if dual.startswith("D"):
        sym[(0,) * len(std[0])] -= 1
    top = (2,) + (0,) * (len(std[0]) - 1)
    expected = _dominant(dual, sym)
    got = {mu: kato_polynomial(dual, top, mu)(1) for mu in expected}
    assert got == expected


def test_kato_basic_properties():
    for dual in ("C3", "D4", "C4"):
        datum = root_datum(dual)
        for lam in datum.fundamental + ((2,) + (0,) * (datum.rank - 1),):
            assert kato_polynomial(dual, lam, lam) == Polynomial((1,))
    # Lambda^2 = V_(1,1,0) + 1 puts p^4 of the display on the trivial summand
    assert kato_dlambda("C3", (1, 1, 0), (0, 0, 0), 2) == 4 + 1
    with pytest.raises(ValueError):
        kato_polynomial("C3", (1, 0, 0), (1, 1, 0))
    with pytest.raises(ValueError):
        kato_polynomial("C3", (0, 1, 0), (0, 0, 0))


def test_exterior_decompositions():
    assert exterior_decomposition("C3", 3) == ((1, 1, 1), (1, 0, 0))
    assert exterior_decomposition("C4", 4) == ((1, 1, 1, 1), (1, 1, 0, 0), (0, 0, 0, 0))
    assert exterior_decomposition("D4", 4) == ((1, 1, 1, 1), (1, 1, 1, -1))
    assert exterior_decomposition("D4", 2) == ((1, 1, 0, 0),)


def test_infinitesimal_weights():
    assert infinitesimal_weights(7, (9, 5, 2))[1] == (23, 13, 5)
    assert infinitesimal_weights(8, (1, 1, 1, -1))[1] == (8, 6, 4, 2)
    assert infinitesimal_weights(9, (0, 0, 0, 0))[1] == (7, 5, 3, 1)


def test_ramanujan_product_matches_eisenstein_route():
    coeffs = ramanujan_coefficients(40)
    assert coeffs[:6] == [0, 1, -24, 252, -1472, 4830]
    assert all(coeffs[m] == cusp_coefficient_oracle(12, m) for m in range(1, 40))
    for k in (12, 16, 18, 20, 22, 26):
        for p in (2, 3, 5, 7, 11, 13):
            assert cusp_form_coefficient(k, p) == cusp_coefficient_oracle(k, p)
    with pytest.raises(ValueError):
        cusp_form_coefficient(14, 2)


def _elementary(eigenvalues, k, p):
    total = ScaledTrace(Fraction(0), p)
    for combo in itertools.combinations(eigenvalues, k):
        term = ScaledTrace(Fraction(1), p)
        for e in combo:
            term = term * e
        total = total + term
    return total


@pytest.mark.parametrize("p", [2, 3, 5])
def test_unit_closed_forms(p):
    for d in range(1, 8):
        eig = [ScaledTrace.power(p, d - 1 - 2 * j) for j in range(d)]
        unit = unit_parameter(d, p)
        for k in range(1, 5):
            closed = unit_closed_form(d, k, p)
            assert closed == unit.trace(k)
            assert closed == _elementary(eig, k, p)


def _from_eigenvalues(eigs, p):
    size = len(eigs)
    return SatakeParameter(size, p, tuple(_elementary(eigs, k, p) for k in range(1, size // 2 + 1)))


rationals = st.fractions(min_value=Fraction(1, 9), max_value=9, max_denominator=9).filter(lambda x: x != 0)


def _self_dual(values, p):
    eigs = []
    for v in values:
        eigs += [ScaledTrace(v, p), ScaledTrace(1 / v, p)]
    return eigs


@settings(max_examples=40, deadline=None)
@given(st.lists(rationals, min_size=1, max_size=2), st.lists(rationals, min_size=1, max_size=2), st.integers(1, 4))
def test_tensor_and_sum_match_eigenvalue_brute_force(xs, ys, depth):
    p = 3
    ea, eb = _self_dual(xs, p), _self_dual(ys, p)
    a, b = _from_eigenvalues(ea, p), _from_eigenvalues(eb, p)
    t = tensor_product(a, b, depth)
    prods = [x * y for x in ea for y in eb]
    for k in range(1, min(depth, len(prods) // 2) + 1):
        assert t.trace(k) == _elementary(prods, k, p)
        assert t.trace(k) == tensor_product(b, a, depth).trace(k)
    s = direct_sum([a, b], depth)
    for k in range(1, min(depth, (len(ea) + len(eb)) // 2) + 1):
        assert s.trace(k) == _elementary(ea + eb, k, p)
        assert s.trace(k) == direct_sum([b, a], depth).trace(k)


def test_twisted_parameters_against_eigenvalues():
    p = 2
    tau = modular_form_traces(12, p)
    delta = SatakeParameter(2, p, (tau,))
    twist = tensor_product(delta, unit_parameter(3, p), 3)
    # eigenvalues of Delta_11 are the roots of x^2 - tau x + 1; use the power sums instead
    pa = power_traces(delta.traces(3), 3)
    pu = power_traces(unit_parameter(3, p).traces(3), 3)
    assert power_traces(twist.traces(3), 3) == [x * y for x, y in zip(pa, pu)]
    assert divide_unit_twist(twist.trace(1), 3, p) == tau


def test_power_traces_of_units():
    p = 5
    unit = unit_parameter(4, p)
    eig = [ScaledTrace.power(p, 3 - 2 * j) for j in range(4)]
    for m, value in enumerate(power_traces(unit.traces(4), 4), start=1):
        expect = ScaledTrace(Fraction(0), p)
        for e in eig:
            term = ScaledTrace(Fraction(1), p)
            for _ in range(m):
                term = term * e
            expect = expect + term
        assert value == expect


def test_parse_parameter():
    ap = parse_parameter("Delta_25_19_5^2 + Delta_11[3] + [4]")
    assert ap.multiplicity == 2
    assert [(s.label, s.d) for s in ap.summands] == [("Delta_25_19_5", 1), ("Delta_11", 3), ("1", 4)]
    assert ap.size(FormCatalog()) == 6 + 6 + 4
    with pytest.raises(ValueError):
        parse_parameter("Gamma_3")


@pytest.mark.parametrize("weights", [(5, 3, 1), (13, 11, 9), (17, 15, 13), (17, 3, 1)])
@pytest.mark.parametrize("p", [2, 3])
def test_subtracting_a_packet_from_its_own_total_leaves_zero(weights, p):
    catalog = FormCatalog()
    members = packet(7, weights)
    w1 = weights[0]
    totals = [sum((param_traces(ap, p, i, catalog) * ap.multiplicity for ap in members), ScaledTrace(Fraction(0), p))
              for i in (1, 2, 3)]
    vector = SatakeTraceVector.from_traces(p, w1, totals)
    target, rest = endoscopic_subtract(7, weights, vector, catalog)
    assert target is None
    assert all(e == 0 for e in rest.entries)


def test_missing_traces_are_isolated_or_reported():
    catalog = FormCatalog()
    p = 2
    members = packet(7, (23, 11, 7))
    values = [ScaledTrace(Fraction(i), p) for i in (1, 2, 3)]
    vector = SatakeTraceVector.from_traces(p, 23, values)
    with pytest.raises(CatalogGap):
        endoscopic_subtract(7, (23, 11, 7), vector, catalog)
    catalog.add("Delta_23_7", p, (ScaledTrace(Fraction(1), p), ScaledTrace(Fraction(5), p)), "test input")
    target, rest = endoscopic_subtract(7, (23, 11, 7), vector, catalog, target=members[0])
    assert target == members[0]
    assert rest == vector
    with pytest.raises(CatalogGap):
        packet(7, (1, 1, 1))


def test_catalog_json_round_trip(tmp_path):
    catalog = FormCatalog()
    catalog.add("Delta_23_7", 2, (ScaledTrace(Fraction(-3, 4), 2, 1), ScaledTrace(Fraction(7), 2)), "table")
    catalog.add("Delta_23_7", 3, (ScaledTrace(Fraction(1, 9), 3, 1), ScaledTrace(Fraction(2, 3), 3)), "table")
    path = tmp_path / "catalog.json"
    catalog.dump(path)
    loaded = FormCatalog.load(path)
    assert loaded.entries.keys() == catalog.entries.keys()
    for name, entry in catalog.entries.items():
        other = loaded.entries[name]
        assert (other.size, other.provenance, other.traces) == (entry.size, entry.provenance, entry.traces)
    assert loaded.provenance("Delta_23_7") == "table"
    assert loaded.provenance("Delta_11") == "computed"
    assert loaded.provenance("Delta_19_7") == "missing"
    loaded.dump(tmp_path / "again.json")
    assert (tmp_path / "again.json").read_text() == path.read_text()


def test_catalog_rejects_gapped_traces(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"Delta_19_7": {"traces": {"2": {"1": 1, "3": 2}}}}')
    with pytest.raises(ValueError):
        FormCatalog.load(path)


@pytest.mark.parametrize("p", [2, 3])
def test_delta11_extraction_from_computed_traces(p, cache_dir):
    lam = (4, 4, 4)
    groups = [GroupDescriptor("trivial"), GroupDescriptor("cyclic", p)]
    if p == 2:
        groups += [GroupDescriptor("elementary", 2, 2), GroupDescriptor("elementary", 2, 3)]
    hecke = {j: traces_for_weights(7, [lam], g, cache_dir)[lam] for j, g in enumerate(groups)}
    vector = hecke_to_satake(7, lam, p, hecke, depth=len(groups) - 1)
    expected = modular_form_traces(12, p)
    assert expected == ScaledTrace(Fraction(cusp_coefficient_oracle(12, p)), p, -11)
    assert divide_unit_twist(vector.traces()[0], 3, p) == expected
    lift = parse_parameter("Delta_11[3]")
    for i, value in enumerate(vector.traces(), start=1):
        assert value == param_traces(lift, p, i)


def test_single_form_charpoly_row_at_two(cache_dir):
    w = (23, 13, 5)
    lam = (9, 5, 2)
    groups = [GroupDescriptor("trivial"), GroupDescriptor("cyclic", 2), GroupDescriptor("elementary", 2, 2),
              GroupDescriptor("elementary", 2, 3)]
    hecke = {j: traces_for_weights(7, [lam], g, cache_dir)[lam] for j, g in enumerate(groups)}
    assert hecke[0] == 1
    entries = hecke_to_satake(7, lam, 2, hecke).traces()
    got = tuple(entries[i - 1] * ScaledTrace.power(2, i * w[0]) * (-1) ** i for i in (1, 2, 3))
    assert got == CHARPOLY_P2[w]


def test_hecke_to_satake_needs_every_operator():
    with pytest.raises(KeyError):
        hecke_to_satake(7, (4, 4, 4), 2, {0: 1, 1: -168}, depth=2)
