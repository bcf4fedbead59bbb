import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kickedgauss.classical import (
    MAX_FORCE,
    Ensemble,
    MapParams,
    PhaseState,
    TangentMatrix,
    classical_fidelity,
    classical_scatter,
    coarse_grain,
    default_launches,
    evolve_ensemble,
    find_periodic_orbits,
    involution_j1,
    involution_j2,
    iterate,
    map_inverse,
    map_step,
    noise_sequence,
    orbit_rotation_angle,
    orbit_tangent,
    phase_portrait,
    sample_gaussian_ensemble,
    tangent_map,
)
from kickedgauss.errors import DomainError, EmptyDensityError

coord = st.floats(-6, 6, allow_nan=False)
strength = st.floats(0.01, 6, allow_nan=False)
states = st.builds(PhaseState, coord, coord)


# -- map -------------------------------------------------------------------------------

def test_origin_is_fixed():
    assert map_step(PhaseState(0.0, 0.0), MapParams(1.0)) == PhaseState(0.0, 0.0)


def test_single_step_value():
    # independent evaluation: p' = -exp(-1/2), x' = 1 + p'
    s = map_step(PhaseState(1.0, 0.0), MapParams(1.0))
    assert s.p == pytest.approx(-0.6065306597126334, abs=1e-15)
    assert s.x == pytest.approx(0.3934693402873666, abs=1e-15)


def test_max_force():
    x = np.linspace(-5, 5, 200001)
    assert np.max(np.abs(x * np.exp(-x * x / 2))) == pytest.approx(MAX_FORCE, rel=1e-9)


@given(states, strength, st.floats(-0.05, 0.05))
def test_reflection_symmetry(s, K, dt):
    a = map_step(-s, K, dt)
    b = -map_step(s, K, dt)
    assert a == b


@given(states, strength)
def test_inverse(s, K):
    back = map_inverse(map_step(s, K), K)
    assert back.distance(s) < 1e-12 * (1 + abs(s.x) + abs(s.p) + K)


@given(states, strength)
def test_involutions(s, K):
    assert involution_j1(involution_j1(s)).distance(s) < 1e-12
    assert involution_j2(involution_j2(s, K), K).distance(s) < 1e-12
    assert involution_j2(involution_j1(s), K).distance(map_step(s, K)) < 1e-12
    assert involution_j1(involution_j2(s, K)).distance(map_inverse(s, K)) < 1e-12


def test_involution_fixed_lines():
    for c in (-2.0, 0.3, 5.0):
        assert involution_j1(PhaseState(c, 0.0)) == PhaseState(c, 0.0)
    assert involution_j2(PhaseState(0.0, 0.0), 1.0) == PhaseState(0.0, 0.0)


def test_noise_zero_reproduces_noiseless():
    s = PhaseState(0.4, -0.2)
    a = iterate(s, MapParams(1.0, 0.0, seed=5), 50)
    b = iterate(s, 1.0, 50)
    assert np.array_equal(a, b)


def test_noise_sequence_seeded():
    a = noise_sequence(0.01, 1000, seed=3)
    assert np.array_equal(a, noise_sequence(0.01, 1000, seed=3))
    assert not np.array_equal(a, noise_sequence(0.01, 1000, seed=3, realization=1))
    assert abs(a.std() - 0.01) < 5 * 0.01 / math.sqrt(2 * 1000)
    with pytest.raises(ValueError):
        MapParams(1.0, -0.1)


# -- tangent map and orbits ----------------------------------------------------------------

def test_tangent_at_origin():
    m = tangent_map(PhaseState(0.0, 0.0), 1.0)
    # (dx, dp) ordering: rows x', p'
    assert np.allclose(m.as_array(), [[0.0, 1.0], [-1.0, 1.0]])
    assert m.trace == pytest.approx(1.0)
    assert abs(tangent_map(PhaseState(0.0, 0.0), 4.5).trace) == pytest.approx(2.5)
    assert not tangent_map(PhaseState(0.0, 0.0), 4.5).elliptic


@given(states, strength, st.floats(-0.05, 0.05))
def test_symplectic(s, K, dt):
    assert abs(tangent_map(s, K, dt).det - 1) < 1e-12


def test_tangent_matches_finite_difference():
    s, K, h = PhaseState(0.7, -0.3), 1.3, 1e-6
    num = np.empty((2, 2))
    for j, d in enumerate(([h, 0], [0, h])):
        a = map_step(PhaseState(s.x + d[0], s.p + d[1]), K)
        b = map_step(PhaseState(s.x - d[0], s.p - d[1]), K)
        num[:, j] = [(a.x - b.x) / (2 * h), (a.p - b.p) / (2 * h)]
    assert np.allclose(tangent_map(s, K).as_array(), num, atol=1e-8)


def test_orbit_product_stays_symplectic():
    m = TangentMatrix.identity()
    s = PhaseState(0.9, 0.1)
    for _ in range(300):
        m = tangent_map(s, 1.0) @ m
        s = map_step(s, 1.0)
    assert abs(m.det - 1) < 1e-9


@pytest.mark.parametrize("K, expected", [(2.0, math.pi / 2), (1.0, math.pi / 3), (3.0, 2 * math.pi / 3)])
def test_rotation_angle(K, expected):
    assert orbit_rotation_angle(K) == pytest.approx(expected, abs=1e-14)


@given(st.floats(1e-6, 4 - 1e-6))
def test_rotation_angle_matches_eigenvalues(K):
    ev = np.linalg.eigvals(tangent_map(PhaseState(0.0, 0.0), K).as_array())
    assert orbit_rotation_angle(K) == pytest.approx(np.abs(np.angle(ev)).max(), abs=1e-12)


@pytest.mark.parametrize("K", [0.0, -1.0, 4.0, 4.5])
def test_rotation_angle_domain(K):
    with pytest.raises(DomainError):
        orbit_rotation_angle(K)


@given(strength)
def test_elliptic_transition(K):
    assert tangent_map(PhaseState(0.0, 0.0), K).elliptic == (0 < K < 4)


def test_fixed_point_orbit():
    orbits = find_periodic_orbits(1.0, 1)
    assert len(orbits) == 1
    o = orbits[0]
    assert o.points[0].distance(PhaseState(0.0, 0.0)) < 1e-12
    assert o.trace == pytest.approx(1.0)
    assert o.omega == pytest.approx(math.pi / 3)


def _chain_point(K, r, x):
    pts = [pt.x for o in find_periodic_orbits(K, r) if o.elliptic for pt in o.points if abs(pt.p) < 1e-9]
    return min(pts, key=lambda v: abs(v - x))


def test_r4_chain_near_launch_point():
    assert _chain_point(2.1, 4, 0.3198) == pytest.approx(0.3198, abs=0.01)


def test_r8_chain_near_launch_point():
    assert _chain_point(1.0, 8, 1.1312) == pytest.approx(1.1312, abs=0.01)


def test_launch_points_are_island_midpoints():
    # the quoted launch points sit between the island centres of the two maps
    mid8 = 0.5 * (_chain_point(1.0, 8, 1.13) + _chain_point(1.01, 8, 1.13))
    mid4 = 0.5 * (_chain_point(2.1, 4, 0.32) + _chain_point(2.11, 4, 0.32))
    assert mid8 == pytest.approx(1.1312, abs=1e-3)
    assert mid4 == pytest.approx(0.3198, abs=1e-3)


def test_orbits_return_and_trace_invariance():
    for K, r in ((1.0, 8), (2.1, 4)):
        for o in find_periodic_orbits(K, r):
            assert len(o.points) == r
            s = o.points[0]
            for _ in range(r):
                s = map_step(s, K)
            assert s.distance(o.points[0]) < 1e-7
            traces = [orbit_tangent(pt, K, r).trace for pt in o.points]
            assert np.ptp(traces) < 1e-9
            assert o.elliptic == (abs(o.trace) < 2)


def test_orbit_search_empty_range():
    assert find_periodic_orbits(1.0, 1, x_range=(2.0, 3.0)) == []


# -- ensembles ----------------------------------------------------------------------------

def test_gaussian_ensemble_moments():
    n, d = 100_000, math.sqrt(0.01 / 2)
    e = sample_gaussian_ensemble(-0.25, 0.1, d, d, n, seed=1)
    se = d / math.sqrt(n)
    assert abs(e.x.mean() + 0.25) < 5 * se
    assert abs(e.p.mean() - 0.1) < 5 * se
    assert abs(e.x.std() - d) < 5 * d / math.sqrt(2 * n)
    assert d == pytest.approx(0.070710678, rel=1e-8)


def test_ensemble_deterministic_and_ordered():
    a = sample_gaussian_ensemble(0, 0, 0.1, 0.1, 100, seed=7)
    b = sample_gaussian_ensemble(0, 0, 0.1, 0.1, 100, seed=7)
    assert np.array_equal(a.x, b.x)
    ea = evolve_ensemble(a, MapParams(1.0, 0.01, seed=2), 30)
    for i in (0, 17, 99):
        ref = iterate(PhaseState(a.x[i], a.p[i]), 1.0, 30, MapParams(1.0, 0.01, seed=2).noise(30))
        assert ea.x[i] == pytest.approx(ref[-1, 0], abs=1e-12)


def test_zero_kicks_is_identity():
    e = sample_gaussian_ensemble(0.2, 0, 0.1, 0.1, 50, seed=0)
    f = evolve_ensemble(e, 1.0, 0)
    assert np.array_equal(e.x, f.x) and np.array_equal(e.p, f.p)


def test_fixed_point_ensemble():
    e = Ensemble(np.zeros(1), np.zeros(1))
    f = evolve_ensemble(e, 1.0, 1000)
    assert f.x[0] == 0 and f.p[0] == 0


def test_kam_confinement():
    e = sample_gaussian_ensemble(-0.25, 0.0, 0.07, 0.07, 500, seed=3)
    f = evolve_ensemble(e, 1.0, 100_000)
    assert np.abs(f.x).max() < 3


def test_asymptotic_freedom():
    e = Ensemble(np.linspace(-1, 1, 21), np.full(21, 10.0))
    x_prev = e.x.copy()
    f = e
    for _ in range(20):
        p_prev = f.p.copy()
        f = evolve_ensemble(f, 1.0, 1)
        assert np.all(np.abs(f.p - p_prev) <= MAX_FORCE + 1e-12)
        assert np.all(f.x > x_prev)
        x_prev = f.x.copy()


# -- coarse graining and fidelity -----------------------------------------------------------

def test_single_cell():
    e = Ensemble(np.full(10, 0.05), np.full(10, 0.05))
    d = coarse_grain(e, 0.01)
    assert d.cell_side == pytest.approx(0.1)
    assert d.counts.max() == 1.0 and d.counts.sum() == 1.0


def test_four_cells_uniform():
    rng = np.random.default_rng(0)
    e = Ensemble(rng.uniform(0, 0.2, 200_000), rng.uniform(0, 0.2, 200_000))
    d = coarse_grain(e, 0.01, bounds=(0, 0.2, 0, 0.2))
    assert d.counts.shape == (2, 2)
    assert np.allclose(d.counts, 0.25, atol=0.005)


def test_empty_density():
    e = Ensemble(np.full(5, 10.0), np.zeros(5))
    with pytest.raises(EmptyDensityError):
        coarse_grain(e, 0.01)


@settings(max_examples=30)
@given(st.integers(1, 2000), st.integers(0, 2**31))
def test_density_normalized(n, seed):
    e = sample_gaussian_ensemble(0, 0, 0.5, 0.5, n, seed)
    inside = (np.abs(e.x) < 4) & (np.abs(e.p) < 4)
    if inside.any():
        assert abs(coarse_grain(e, 0.01).counts.sum() - 1) < 1e-12


@settings(max_examples=30)
@given(st.integers(0, 2**31), st.integers(0, 2**31))
def test_classical_fidelity_bounds(s1, s2):
    a = coarse_grain(sample_gaussian_ensemble(0, 0, 0.3, 0.3, 500, s1), 0.01)
    b = coarse_grain(sample_gaussian_ensemble(0.1, 0, 0.3, 0.3, 500, s2), 0.01)
    f = classical_fidelity(a, b)
    assert 0 <= f <= 1 + 1e-12
    assert f == pytest.approx(classical_fidelity(b, a))
    assert classical_fidelity(a, a) == pytest.approx(1.0)


def test_disjoint_fidelity():
    a = coarse_grain(Ensemble(np.full(3, -1.0), np.zeros(3)), 0.01)
    b = coarse_grain(Ensemble(np.full(3, 1.0), np.zeros(3)), 0.01)
    assert classical_fidelity(a, b) == 0


# -- scattering and portraits ----------------------------------------------------------------

def test_scatter_at_rest():
    e = Ensemble(np.zeros(100), np.zeros(100))
    tr = classical_scatter(e, 1.0, 100, 4.0)
    assert tr.left.max() == 0 and tr.right.max() == 0


def test_scatter_partition_and_transport():
    e = sample_gaussian_ensemble(-2, 0, 0.07, 0.07, 20_000, seed=0)
    tr = classical_scatter(e, 1.0, 1000, 4.0)
    assert np.allclose(tr.total, 1.0, atol=1e-15)
    assert tr.left[-1] > 0.05 and tr.right[-1] > 0.05


def test_phase_portrait_escape_cutoff():
    orbits = phase_portrait(4.5, default_launches(4.5), kicks=500)
    assert all(np.all(np.abs(o[:, 0]) <= 50) for o in orbits)
    assert any(len(o) < 501 for o in orbits)
