import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neighbortrace._exact import hnf_columns, qmat
from neighbortrace.lattice_core import residue, roots, short_vectors, standard_lattice, theta_coefficients

from tests.helpers import random_unimodular


def _model_vectors(max_norm: int, *, orthogonal_to_e: bool) -> np.ndarray:
    """Brute-force E8 = D8 + Z.e in the 8-coordinate model: doubled coordinates, norms <= max_norm."""
    bound = int(max_norm**0.5)
    ints = np.array(list(itertools.product(range(-bound, bound + 1), repeat=8)), dtype=np.int64) * 2
    halves = np.array(list(itertools.product(range(-bound - 1, bound + 1), repeat=8)), dtype=np.int64) * 2 + 1
    out = []
    for block in (ints, halves):
        # the coordinate sum (half the doubled sum) must be even
        block = block[(block.sum(axis=1) // 2) % 2 == 0]
        norms4 = (block * block).sum(axis=1)
        keep = norms4 <= 4 * max_norm
        if orthogonal_to_e:
            keep &= block.sum(axis=1) == 0
        out.append(block[keep])
    return np.concatenate(out)


def _theta_oracle(max_half_norm: int, *, orthogonal_to_e: bool) -> list[int]:
    vecs = _model_vectors(2 * max_half_norm, orthogonal_to_e=orthogonal_to_e)
    counts = np.bincount((vecs * vecs).sum(axis=1) // 8, minlength=max_half_norm + 1)
    return [int(c) for c in counts[: max_half_norm + 1]]


def _sigma3(n: int) -> int:
    return sum(d**3 for d in range(1, n + 1) if n % d == 0)


class TestStandardLattices:
    def test_e8_is_even_unimodular(self):
        lat = standard_lattice("E8")
        assert lat.is_even() and lat.det == 1

    def test_e7_has_determinant_two(self):
        lat = standard_lattice("E7")
        assert lat.is_even() and lat.det == 2 and lat.rank == 7

    def test_e8_plus_a1_has_determinant_two(self):
        lat = standard_lattice("E8+A1")
        assert lat.is_even() and lat.det == 2 and lat.rank == 9

    def test_a1_gram(self):
        assert standard_lattice("A1").int_gram() == [[2]]

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_a_and_d_determinants(self, n):
        assert standard_lattice(f"A{n}").det == n + 1
        assert standard_lattice(f"D{n}").det == 4

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            standard_lattice("F4")

    @pytest.mark.parametrize("name", ["E7", "E8", "E8+A1", "D8", "A7"])
    def test_gram_is_symmetric_with_even_diagonal(self, name):
        g = standard_lattice(name).int_gram()
        assert all(g[i][j] == g[j][i] for i in range(len(g)) for j in range(len(g)))
        assert all(g[i][i] % 2 == 0 for i in range(len(g)))


class TestRoots:
    @pytest.mark.parametrize("name, count", [("E7", 126), ("E8", 240), ("E8+A1", 242)])
    def test_root_counts(self, name, count):
        assert len(roots(standard_lattice(name))) == count

    def test_e8_root_count_matches_brute_force(self):
        assert len(_model_vectors(2, orthogonal_to_e=False)) - 1 == 240

    @pytest.mark.parametrize("name", ["E7", "E8", "E8+A1"])
    def test_roots_span_the_lattice(self, name):
        lat = standard_lattice(name)
        coords = [lat.coordinates(r) for r in roots(lat)]
        basis = hnf_columns(coords)
        assert len(basis) == lat.rank
        assert abs(qmat([list(v) for v in basis]).det()) == 1

    @pytest.mark.parametrize("name", ["E7", "E8"])
    def test_roots_closed_under_negation(self, name):
        rs = set(roots(standard_lattice(name)))
        assert all(tuple(-x for x in r) in rs for r in rs)


class TestTheta:
    def test_e7_first_coefficients(self):
        assert theta_coefficients(standard_lattice("E7"), 5) == [1, 126, 756, 2072, 4158, 7560]

    def test_e7_matches_model_enumeration(self):
        assert theta_coefficients(standard_lattice("E7"), 4) == _theta_oracle(4, orthogonal_to_e=True)

    def test_e8_matches_eisenstein_series(self):
        assert theta_coefficients(standard_lattice("E8"), 3) == [1] + [240 * _sigma3(k) for k in (1, 2, 3)]

    def test_e8_first_terms(self):
        assert theta_coefficients(standard_lattice("E8"), 2) == [1, 240, 2160]

    @pytest.mark.parametrize("name", ["E7", "E8", "A3"])
    def test_zero_count(self, name):
        assert theta_coefficients(standard_lattice(name), 0) == [1]

    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 2**32))
    def test_invariant_under_basis_change(self, seed):
        lat = standard_lattice("E7")
        u = random_unimodular(7, random.Random(seed))
        other = lat.with_basis(lat.basis * qmat(u).transpose())
        assert theta_coefficients(other, 3) == theta_coefficients(lat, 3)

    def test_short_vectors_report_norms(self):
        lat = standard_lattice("E7")
        for nrm, v in short_vectors(lat, 4):
            assert lat.norm(v) == nrm


class TestResidue:
    def test_e8_is_trivial(self):
        assert residue(standard_lattice("E8")).order == 1

    def test_e7_discriminant_form(self):
        res = residue(standard_lattice("E7"))
        assert res.structure == (2,)
        assert res.quadratic_values == (Fraction(3, 4),)
        assert res.linking_form[(0, 0)] == Fraction(1, 2)

    def test_a1(self):
        res = residue(standard_lattice("A1"))
        assert res.structure == (2,) and res.quadratic_values == (Fraction(1, 4),)

    @pytest.mark.parametrize("name", ["E7", "E8+A1", "D5", "A4"])
    def test_order_equals_determinant(self, name):
        lat = standard_lattice(name)
        assert residue(lat).order == lat.det

    def test_generators_lie_in_the_dual(self):
        lat = standard_lattice("D6")
        for g in residue(lat).generators:
            assert all(lat.dot(g, b).denominator == 1 for b in lat.basis_vectors())
            assert not lat.contains(g)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=8, max_size=8))
def test_coordinates_round_trip(coords):
    lat = standard_lattice("E8")
    assert lat.coordinates(lat.vector(coords)) == tuple(Fraction(c) for c in coords)
