import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neighbortrace._exact import apply, qmat
from neighbortrace.weyl import (
    coset_key,
    coset_reps,
    count_elements,
    element_from_word,
    enumerate_by_length,
    group_order,
    iterate_full,
    lattice_to_model,
    minimal_in_coset,
    model_to_lattice,
    phi7,
    phi8,
    poincare_coefficients,
    reduced_word,
    root_system,
    signe_q,
    traversal_count,
)
from neighbortrace.lattice_core import standard_lattice

from tests.helpers import random_weyl_elements

# products of the degrees of the basic invariants
ORDER_E7 = 2 * 6 * 8 * 10 * 12 * 14 * 18
ORDER_E8 = 2 * 8 * 12 * 14 * 18 * 20 * 24 * 30


def _preserves_form(kind, m):
    f = root_system(kind).form_matrix
    return m.transpose() * f * m == f


def test_group_orders_are_degree_products():
    assert ORDER_E7 == 2903040 and ORDER_E8 == 696729600
    assert group_order("E7") == ORDER_E7
    assert group_order("E8") == ORDER_E8
    assert group_order("E8+A1") == 2 * ORDER_E8


def test_e7_traversal_visits_the_whole_group_by_length():
    layers = traversal_count("E7")
    assert sum(layers) == ORDER_E7
    assert len(layers) == 64  # longest element has length = number of positive roots
    assert layers == poincare_coefficients("E7", 63)
    assert layers == layers[::-1]


@pytest.mark.parametrize("kind,rank", [("E7", 7), ("E8", 8), ("E8+A1", 9)])
def test_first_layers(kind, rank):
    layers = traversal_count(kind, 3)
    assert layers[:2] == [1, rank]
    assert layers == poincare_coefficients(kind, 3)


def test_length_two_count_from_the_diagram():
    # s_i s_j is a new element for each ordered bonded pair and each unordered commuting pair
    for kind in ("E7", "E8"):
        cartan = root_system(kind).cartan
        r = len(cartan)
        edges = sum(1 for i, j in itertools.combinations(range(r), 2) if cartan[i][j] != 0)
        commuting = r * (r - 1) // 2 - edges
        assert traversal_count(kind, 2)[2] == commuting + 2 * edges


def test_poincare_values():
    assert poincare_coefficients("E7", 3) == [1, 7, 27, 77]


def test_enumerated_words_are_reduced_and_lexicographically_first():
    seen = set()
    for w in enumerate_by_length("E7", 4):
        m = w.matrix
        assert w.length == len(w.word)
        assert reduced_word(w.system, m) == w.word
        key = tuple(apply(m, w.system.rho))
        assert key not in seen
        seen.add(key)
    assert len(seen) == sum(poincare_coefficients("E7", 4))


@pytest.mark.parametrize("kind", ["E7", "E8", "E8+A1"])
def test_random_elements_preserve_the_form(kind):
    for w in random_weyl_elements(kind, 25, seed=3):
        assert _preserves_form(kind, w.matrix)
        assert w.det == int(w.matrix.det())
        word = reduced_word(w.system, w.matrix)
        assert len(word) == w.length
        assert element_from_word(kind, word).matrix == w.matrix


def test_e7_elements_fix_the_all_ones_vector():
    e = (Fraction(1),) * 8
    for w in random_weyl_elements("E7", 20, seed=5):
        assert tuple(apply(w.matrix, e)) == e


def test_coset_representatives():
    for kind, size in (("E7", 36), ("E8", 135)):
        reps = coset_reps(kind)
        assert len(reps) == size
        assert reps.reps[0].word == ()
        assert len(set(reps.invariant_keys)) == size
        assert group_order(kind) % size == 0


def test_coset_key_is_constant_on_cosets():
    rng = random.Random(11)
    for kind in ("E7", "E8"):
        for w in random_weyl_elements(kind, 10, seed=13):
            perm = list(range(8))
            rng.shuffle(perm)
            p = qmat([[1 if c == perm[r] else 0 for c in range(8)] for r in range(8)])
            signs = [rng.choice((1, -1)) for _ in range(8)]
            if kind == "E8" and signs.count(-1) % 2:
                signs[0] = -signs[0]
            if kind == "E7":
                signs = [-1] * 8 if rng.random() < 0.5 else [1] * 8
                shift = qmat([[(-1 if i == j else 0) + Fraction(1, 4) for j in range(8)] for i in range(8)])
                left = p * (shift if signs[0] == -1 else qmat([[int(i == j) for j in range(8)] for i in range(8)]))
            else:
                left = p * qmat([[signs[i] if i == j else 0 for j in range(8)] for i in range(8)])
            assert coset_key(kind, left * w.matrix) == coset_key(kind, w.matrix)
            m = minimal_in_coset(kind, w.matrix)
            assert coset_key(kind, m) == coset_key(kind, w.matrix)
            assert len(reduced_word(w.system, m)) <= w.length


def test_minimal_coset_elements_are_the_representatives():
    for kind in ("E7", "E8"):
        for rep in coset_reps(kind).reps[:40]:
            assert minimal_in_coset(kind, rep.matrix) == rep.matrix


def test_full_iteration_counts():
    assert count_elements("E7") == ORDER_E7
    assert count_elements("E7", +1) == ORDER_E7 // 2
    assert count_elements("E8") == ORDER_E8
    assert count_elements("E8+A1", +1) == ORDER_E8


def test_full_iteration_elements_are_isometries_with_correct_determinant():
    for kind in ("E7", "E8", "E8+A1"):
        for b, batch in enumerate(iterate_full(kind, +1)):
            if b % 9:
                continue
            for k in (0, len(batch) // 2, len(batch) - 1):
                w = batch.element(k)
                assert _preserves_form(kind, w.matrix)
                assert w.matrix.det() == 1
            if b > 60:
                break


def test_e7_iteration_matches_coset_keys():
    # each (epsilon, h) batch lies in the single coset of h
    reps = coset_reps("E7")
    for b, batch in enumerate(iterate_full("E7")):
        if b % 7:
            continue
        w = batch.element(len(batch) // 3)
        assert coset_key("E7", w.matrix) == reps.invariant_keys[batch.h_index]


def test_coordinates_round_trip():
    lat = standard_lattice("E7")
    for w in random_weyl_elements("E7", 10, seed=17):
        m = model_to_lattice("E7", w.matrix)
        assert lattice_to_model("E7", m) == w.matrix
        assert m.transpose() * lat.form * m == lat.form


def test_coordinate_keys():
    assert phi7((3, -1, 2)) == (-1, 2, 3)
    assert phi8((Fraction(-1, 2), 2, 0)) == (0, Fraction(1, 4), 4)
    assert signe_q((1, 2, 0, 4), 3) == 0
    assert signe_q((1, 4, 2), 7) == -1
    assert signe_q((1, 4, 6), 7) == 1
    assert signe_q((1, 2, 3), 7) == 1
    with pytest.raises(ValueError):
        signe_q((1,), 4)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=8), st.sampled_from([3, 5, 7, 9, 11]))
def test_signe_is_multiplicative_under_negation(v, q):
    flipped = [-v[0]] + v[1:]
    assert signe_q(flipped, q) == -signe_q(v, q) or signe_q(v, q) == 0
