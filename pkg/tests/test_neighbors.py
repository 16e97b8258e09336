import itertools
from collections import Counter
from fractions import Fraction

import pytest

from neighbortrace._exact import apply
from neighbortrace.lattice_core import short_vectors, standard_lattice
from neighbortrace.neighbors import (
    IsotropicLine,
    chain2_neighbors,
    four_neighbor,
    isotropic_lines,
    isotropic_vectors,
    lattice_intersection,
    norm4_symmetry,
    pk_neighbor,
    prime_power,
    q_neighbor,
    quotient_invariants,
    repair_family,
    two_neighbor_from_norm4,
    verify_neighbor,
)
from neighbortrace.weyl import model_to_lattice

from tests.helpers import random_weyl_elements


def _smooth_quadric_points(dim, q_prime):
    """Points of a smooth quadric in P^(dim-1) over F_q (split in even dimension)."""
    q = q_prime
    if dim % 2:
        return (q ** (dim - 1) - 1) // (q - 1)
    return (q ** (dim - 1) - 1) // (q - 1) + q ** (dim // 2 - 1)


def _normalized(coords, q):
    p, _ = prime_power(q)
    c = next(x for x in coords if x % p)
    inv = pow(c, -1, q)
    return tuple(x * inv % q for x in coords)


def test_prime_power():
    assert prime_power(9) == (3, 2)
    assert prime_power(2) == (2, 1)
    assert prime_power(16) == (2, 4)
    for bad in (1, 6, 12):
        with pytest.raises(ValueError):
            prime_power(bad)


@pytest.mark.parametrize(
    "kind,q,expected",
    [("E7", 2, 63), ("E8", 2, 135), ("E8+A1", 2, 135 + 120), ("E7", 4, 63 * 2**5), ("E7", 3, 364), ("E8", 3, 1120)],
)
def test_line_counts(kind, q, expected):
    lat = standard_lattice(kind)
    assert len(isotropic_lines(lat, q)) == expected


def test_line_counts_match_the_smooth_quadric_formula():
    assert _smooth_quadric_points(7, 3) == 364
    assert _smooth_quadric_points(8, 3) == 1120
    lat = standard_lattice("E7")
    assert len(isotropic_lines(lat, 5)) == _smooth_quadric_points(7, 5)


def test_digit_lifting_agrees_with_brute_force():
    lat = standard_lattice("E7")
    lifted = {tuple(r) for r in isotropic_vectors(lat, 9, "lift").tolist()}
    brute = {tuple(r) for r in isotropic_vectors(lat, 9, "brute").tolist()}
    assert lifted == brute
    assert len(lifted) == 364 * 3**5 * 6


def test_e7_two_neighbors_are_distinct_even_and_of_index_two():
    lat = standard_lattice("E7")
    found = []
    for line in isotropic_lines(lat, 2):
        nb = q_neighbor(lat, line).lattice
        assert nb.is_even() and nb.det == lat.det
        assert verify_neighbor(lat, nb, (2,))
        assert not verify_neighbor(lat, nb, (4,))
        found.append(nb)
    for a, b in itertools.combinations(found, 2):
        assert not a.same_lattice(b)


@pytest.mark.parametrize("kind,q,group", [("E7", 3, (3,)), ("E7", 4, (4,)), ("E8", 3, (3,)), ("E8+A1", 5, (5,)), ("E7", 9, (9,))])
def test_q_neighbors_sample(kind, q, group):
    lat = standard_lattice(kind)
    lines = isotropic_lines(lat, q)
    for line in lines[:: max(1, len(lines) // 12)]:
        res = q_neighbor(lat, line)
        nb = res.lattice
        assert nb.is_even() and nb.det == lat.det
        assert verify_neighbor(lat, nb, group)
        inter = lattice_intersection(lat, nb)
        assert quotient_invariants(lat, inter) == group
        # the neighbor contains v/q for a lift of the line
        assert any(nb.contains(tuple(x / q for x in lat.vector(c))) for c in _lifts(lat, line))


def _lifts(lat, line):
    q = line.modulus
    base = list(line.generator)
    yield base
    for i in range(len(base)):
        for s in range(1, q):
            c = base.copy()
            c[i] += s * q
            yield c


def test_q_neighbor_rejects_bad_lines():
    lat = standard_lattice("E8")
    with pytest.raises(ValueError):
        q_neighbor(lat, IsotropicLine(3, (1, 0, 0, 0, 0, 0, 0, 0)))
    with pytest.raises(ValueError):
        q_neighbor(lat, IsotropicLine(3, (0,) * 8))


@pytest.mark.parametrize("kind,q", [("E7", 3), ("E8", 2), ("E8+A1", 3)])
def test_neighbors_are_equivariant(kind, q):
    lat = standard_lattice(kind)
    line = isotropic_lines(lat, q)[5]
    nb = q_neighbor(lat, line).lattice
    for w in random_weyl_elements(kind, 100, seed=19):
        g = model_to_lattice(kind, w.matrix)
        assert lat.stabilizes(g)
        image = [int(c) % q for c in lat.coordinates(apply(g, line.vector(lat)))]
        moved = IsotropicLine(q, _normalized(image, q))
        assert q_neighbor(lat, moved).lattice.same_lattice(nb.with_basis(g * nb.basis))


def _isotropic_pair(lat, p):
    lines = isotropic_lines(lat, p)
    g = lat.int_gram()
    n = len(g)

    def dot(a, b):
        return sum(a[i] * g[i][j] * b[j] for i in range(n) for j in range(n))

    x = lines[0].generator
    for other in lines[1:]:
        y = other.generator
        if dot(x, y) % p == 0:
            return [x, y]
    raise AssertionError("no orthogonal pair")


def test_pk_neighbor_index_nine():
    lat = standard_lattice("E7")
    family = _isotropic_pair(lat, 3)
    repaired = repair_family(lat, family, 3)
    assert all((a - b) % 3 == 0 for v, x in zip(repaired, family) for a, b in zip(v, x))
    nb = pk_neighbor(lat, family, 3).lattice
    assert nb.is_even() and nb.det == lat.det
    assert verify_neighbor(lat, nb, (3, 3))
    assert not verify_neighbor(lat, nb, (9,))
    inter = lattice_intersection(lat, nb)
    assert quotient_invariants(lat, inter) == (3, 3)


def test_repair_needs_an_isotropic_family():
    lat = standard_lattice("E7")
    with pytest.raises(ValueError):
        repair_family(lat, [(1, 0, 0, 0, 0, 0, 0)], 3)
    with pytest.raises(ValueError):
        repair_family(lat, [(1, 0, 0, 0, 0, 0, 0)], 2)


def test_norm4_symmetry_gives_the_two_neighbor_of_its_line():
    lat = standard_lattice("E8")
    x = (1, 1, 1, 1, 0, 0, 0, 0)
    res, sigma = two_neighbor_from_norm4(lat, x)
    assert lat.preserves_form(sigma) and sigma == norm4_symmetry(lat, x)
    ident = sigma * sigma
    assert all(ident[i, j] == (1 if i == j else 0) for i in range(8) for j in range(8))
    assert tuple(apply(sigma, x)) == tuple(-Fraction(c) for c in x)
    coords = [int(c) % 2 for c in lat.coordinates(x)]
    expect = q_neighbor(lat, IsotropicLine(2, _normalized(coords, 2))).lattice
    assert res.lattice.same_lattice(expect)
    assert verify_neighbor(lat, res.lattice, (2,))


def test_norm4_inputs_are_checked():
    lat = standard_lattice("E8")
    for bad in ((2, 1, -1, -1, -1, 0, 0, 0), (2, 2, 0, 0, 0, 0, 0, 0), (1, 1, 1, 0, 0, 0, 0, 0)):
        with pytest.raises(ValueError):
            two_neighbor_from_norm4(lat, bad)


def test_every_singular_class_mod_two_has_norm4_representatives():
    for kind, classes, per_class in (("E7", 63, 12), ("E8", 135, 16)):
        lat = standard_lattice(kind)
        norm4 = [c for n, c in _vectors_with_norm(lat, 4)]
        counts = Counter(_normalized([int(x) % 2 for x in lat.coordinates(v)], 2) for v in norm4)
        assert len(counts) == classes
        assert set(counts.values()) == {per_class}
        lines = {line.generator for line in isotropic_lines(lat, 2)}
        assert set(counts) == lines


def _vectors_with_norm(lat, norm):
    return [(n, v) for n, v in short_vectors(lat, norm) if n == norm]


def test_chain_of_four_orthogonal_norm4_vectors():
    lat = standard_lattice("E8")
    xs = _orthogonal_frame(lat, 4)
    res, g = chain2_neighbors(lat, xs)
    assert lat.preserves_form(g)
    assert verify_neighbor(lat, res.lattice, (2, 2, 2, 2))
    assert res.lattice.is_even()


def _orthogonal_frame(lat, size):
    """Depth-first search for pairwise orthogonal norm-4 vectors independent mod 2."""
    pool = [v for _, v in _vectors_with_norm(lat, 4)]

    def extend(chosen, start):
        if len(chosen) == size:
            return chosen
        for k in range(start, len(pool)):
            v = pool[k]
            if all(lat.dot(v, x) == 0 for x in chosen):
                trial = chosen + [v]
                if _rank2([[int(c) % 2 for c in lat.coordinates(x)] for x in trial]) == len(trial):
                    found = extend(trial, k + 1)
                    if found:
                        return found
        return None

    frame = extend([], 0)
    assert frame is not None
    return frame


def _rank2(rows):
    m = [r[:] for r in rows]
    rank = 0
    for c in range(len(m[0])):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                m[i] = [(a + b) % 2 for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def test_chain_rejects_dependent_vectors():
    lat = standard_lattice("E8")
    with pytest.raises(ValueError):
        chain2_neighbors(lat, [(1, 1, 1, 1, 0, 0, 0, 0), (-1, -1, -1, -1, 0, 0, 0, 0)])
    with pytest.raises(ValueError):
        chain2_neighbors(lat, [(1, 1, 1, 1, 0, 0, 0, 0), (1, 0, 0, 0, 1, 1, 1, 0)])


def test_four_neighbor_from_two_norm4_vectors():
    lat = standard_lattice("E8")
    res, g = four_neighbor(lat, (1, 1, 1, 1, 0, 0, 0, 0), (1, 0, 0, 0, 1, 1, 1, 0))
    assert lat.preserves_form(g)
    assert verify_neighbor(lat, res.lattice, (4,))
    assert not verify_neighbor(lat, res.lattice, (2, 2))
    with pytest.raises(ValueError):
        four_neighbor(lat, (1, 1, 1, 1, 0, 0, 0, 0), (1, 1, -1, -1, 0, 0, 0, 0))
