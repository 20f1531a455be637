import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_surface
from obstructor import load
from obstructor.cycles import (
    CycleError,
    EdgeCycle,
    canonical_cycle,
    enumerate_simple_cycles,
    fundamental_cycle_basis,
    is_cycle_space_element,
    is_orientation_reversing,
    lift_reverses,
    orientation_double_cover,
    symmetric_difference,
    w1_of,
)
from obstructor.surface import triangle_edges

BUNDLED = ["delta1", "delta2", "kb9_008", "tetrahedron", "csaszar"]


@pytest.mark.parametrize(
    "name, cycle, w",
    [
        ("delta1", (5, 6, 7), 1),
        ("delta1", (5, 8, 9), 1),
        ("delta2", (2, 4, 9), 1),
        ("delta2", (2, 6, 8), 1),
        ("delta2", (1, 2, 8), 0),
    ],
)
def test_named_cycles(name, cycle, w):
    s = load(name)
    assert is_orientation_reversing(s, cycle) == w
    assert lift_reverses(s, cycle) == w


@pytest.mark.parametrize("name", BUNDLED)
def test_band_walk_agrees_with_double_cover(name):
    s = load(name)
    cover = orientation_double_cover(s)
    for cyc, w in enumerate_simple_cycles(s, 5):
        assert lift_reverses(s, cyc, cover) == w, cyc


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_band_walk_agrees_with_double_cover_random(seed):
    s = random_surface(random.Random(seed), max_vertices=9)
    cover = orientation_double_cover(s)
    for cyc, w in enumerate_simple_cycles(s, 4):
        assert lift_reverses(s, cyc, cover) == w


@pytest.mark.parametrize("name", BUNDLED)
def test_face_boundaries_preserve_orientation(name):
    s = load(name)
    assert all(is_orientation_reversing(s, t) == 0 for t in s.triangles)


@pytest.mark.parametrize("name", BUNDLED)
def test_w1_is_additive(name):
    s = load(name)
    basis = fundamental_cycle_basis(s)
    cycles = enumerate_simple_cycles(s, 4)
    rng = random.Random(7)
    for _ in range(200):
        (a, wa), (b, wb) = rng.sample(cycles, 2)
        z = symmetric_difference(a.edges, b.edges)
        assert w1_of(basis, z) == wa ^ wb


@pytest.mark.parametrize("name", BUNDLED)
def test_w1_of_matches_walk_for_simple_cycles(name):
    s = load(name)
    basis = fundamental_cycle_basis(s)
    for cyc, w in enumerate_simple_cycles(s, 4):
        assert w1_of(basis, cyc.edges) == w


def test_basis_size(delta1, delta2, kb8):
    # E - V + 1
    assert len(fundamental_cycle_basis(delta1)) == 28
    assert len(fundamental_cycle_basis(delta2)) == 28
    assert len(fundamental_cycle_basis(kb8)) == 19


def test_double_cover_of_delta1(delta1):
    cover = orientation_double_cover(delta1)
    assert cover.connected
    assert cover.n_triangles == 48
    assert cover.euler_characteristic() == -6


def test_double_cover_of_klein_bottle_is_torus(kb8):
    cover = orientation_double_cover(kb8)
    assert cover.connected
    assert cover.euler_characteristic() == 0


def test_double_cover_of_orientable_splits(csaszar):
    assert orientation_double_cover(csaszar).n_components == 2


def test_canonical_cycle():
    assert canonical_cycle((7, 5, 6)) == (5, 6, 7)
    assert canonical_cycle((6, 5, 7)) == (5, 6, 7)
    assert EdgeCycle.of((9, 8, 5)).edges == ((5, 8), (8, 9), (5, 9)) or set(EdgeCycle.of((9, 8, 5)).edges) == {
        (5, 8), (8, 9), (5, 9)}


def test_rejects_non_cycle(delta1, kb8):
    with pytest.raises(CycleError):
        is_orientation_reversing(delta1, (1, 2))
    with pytest.raises(CycleError):
        is_orientation_reversing(delta1, (1, 2, 1, 3))
    non_edge = next((a, b) for a in kb8.vertices for b in kb8.vertices if a < b and (a, b) not in kb8.edges)
    with pytest.raises(CycleError):
        w1_of(fundamental_cycle_basis(kb8), [non_edge])


def test_cycle_space_membership():
    assert is_cycle_space_element([(1, 2), (2, 3), (1, 3)])
    assert not is_cycle_space_element([(1, 2), (2, 3)])


def test_enumeration_bounds(delta1):
    with pytest.raises(CycleError):
        enumerate_simple_cycles(delta1, 2)
    triangles = enumerate_simple_cycles(delta1, 3)
    # a neighborly 9-vertex surface has C(9,3) vertex triples, all of them 3-cycles
    assert len(triangles) == 84
    assert sum(1 for c, _ in triangles if c.vertices in delta1.triangles) == 24


def test_triangle_edge_sets_are_cycles(delta2):
    for t in delta2.triangles:
        assert is_cycle_space_element(triangle_edges(t))
