import itertools
import random

import pytest

from neighbortrace.isometry import (
    IsometryError,
    dynkin_renumber,
    e7_index_chase,
    isometry_between,
    reference_cartan,
    simple_system,
)
from neighbortrace.lattice_core import standard_lattice
from neighbortrace.neighbors import isotropic_lines, q_neighbor
from neighbortrace.weyl import model_to_lattice

from tests.helpers import random_weyl_elements


def _check_isometry(source, target, g):
    assert g.det() == 1
    assert source.preserves_form(g)
    assert source.with_basis(g * source.basis).same_lattice(target)


@pytest.mark.parametrize("kind", ["E7", "E8", "E8+A1"])
def test_weyl_images_round_trip(kind):
    lat = standard_lattice(kind)
    count = 100 if kind == "E7" else 30
    for w in random_weyl_elements(kind, count, seed=23):
        g = model_to_lattice(kind, w.matrix)
        image = lat.with_basis(g * lat.basis, kind)
        _check_isometry(lat, image, isometry_between(lat, image, kind))
        _check_isometry(image, lat, isometry_between(image, lat, kind))


def test_all_e7_two_neighbors_are_isometric_to_e7():
    lat = standard_lattice("E7")
    for line in isotropic_lines(lat, 2):
        nb = q_neighbor(lat, line).lattice
        _check_isometry(lat, nb, isometry_between(lat, nb, "E7"))


@pytest.mark.parametrize("kind,q", [("E7", 3), ("E8", 3), ("E8+A1", 3), ("E7", 2)])
def test_isometries_to_q_neighbors_have_denominator_q(kind, q):
    lat = standard_lattice(kind)
    for line in isotropic_lines(lat, q)[:25]:
        nb = q_neighbor(lat, line).lattice
        g = isometry_between(lat, nb, kind)
        coords = lat._basis_inverse * g * lat.basis
        dens = {coords[i, j].q for i in range(lat.rank) for j in range(lat.rank)}
        assert all(q % d == 0 for d in dens)
        assert max(dens) == q


def test_isometry_inference_and_errors():
    e7 = standard_lattice("E7")
    e8 = standard_lattice("E8")
    assert isometry_between(e8, e8) == isometry_between(e8, e8, "E8")
    with pytest.raises(IsometryError):
        isometry_between(e7, e8, "E7")
    unnamed = e8.with_basis(e8.basis, "")
    with pytest.raises(IsometryError):
        isometry_between(unnamed, e8)


def test_dynkin_renumbering_recovers_a_shuffle():
    rng = random.Random(29)
    for kind in ("E7", "E8", "E8+A1"):
        ref = reference_cartan(kind)
        n = len(ref)
        for _ in range(10):
            perm = list(range(n))
            rng.shuffle(perm)
            # shuffled[a][b] = ref[perm^-1(a)][perm^-1(b)]
            inv = [perm.index(a) for a in range(n)]
            shuffled = [[ref[inv[a]][inv[b]] for b in range(n)] for a in range(n)]
            match = dynkin_renumber(shuffled, kind)
            assert [[shuffled[match.permutation[l]][match.permutation[m]] for m in range(n)] for l in range(n)] == [
                list(r) for r in ref
            ]
            if kind == "E7":
                assert e7_index_chase(shuffled).permutation == match.permutation


def test_e7_diagram_row_sums():
    ref = reference_cartan("E7")
    sums = sorted(sum(row) for row in ref)
    assert sums == [-1, 0, 0, 0, 1, 1, 1]


def test_renumbering_rejects_other_types():
    a7 = reference_cartan("A7")
    with pytest.raises(IsometryError):
        dynkin_renumber(a7, "E7")
    with pytest.raises(IsometryError):
        e7_index_chase(a7)


@pytest.mark.parametrize("kind,rank,positive", [("E7", 7, 63), ("E8", 8, 120), ("E8+A1", 9, 121)])
def test_simple_systems(kind, rank, positive):
    system = simple_system(standard_lattice(kind))
    assert len(system.simple_roots) == rank
    assert len(system.positive_roots) == positive
    assert all(system.dot(a, system.rho) == 1 for a in system.simple_roots)
    cartan = system.cartan
    assert all(cartan[i][i] == 2 for i in range(rank))
    assert all(cartan[i][j] in (0, -1) for i, j in itertools.permutations(range(rank), 2))
