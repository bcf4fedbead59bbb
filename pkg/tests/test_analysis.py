"""Revival predictions, period measurement and quasi-energy ladders."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kickedgauss.analysis import (
    chain_launch_point,
    check_quasienergy_ladder,
    ladder_family_offset,
    match_chain_orbits,
    measure_chain_periods,
    measure_period,
    predict_center_period,
    predict_chain_periods,
)
from kickedgauss.classical import find_periodic_orbits, force
from kickedgauss.errors import DomainError
from kickedgauss.quantum import QuasiEnergySpectrum
from kickedgauss.traces import FidelityTrace


def _omega_by_eigen(points, K):
    """Rotation angle of the orbit's tangent map from numpy eigenvalues."""
    J = np.eye(2)
    for pt in points:
        x = pt.x
        fp = (1 - x * x) * math.exp(-x * x / 2)  # d/dx of x e^{-x^2/2}
        J = np.array([[1 - K * fp, 1.0], [-K * fp, 1.0]]) @ J
    lam = np.linalg.eigvals(J)
    return float(np.abs(np.angle(lam)).max())


# -- center predictions -------------------------------------------------------------------

def test_center_prediction_frozen():
    # oracle: dw = dK / sqrt(K2 (4 - K2)) evaluated by hand
    p = predict_center_period(1.0, 1.01)
    assert p.delta_omega == pytest.approx(0.01 / math.sqrt(1.01 * 2.99), rel=1e-14)
    assert p.delta_omega == pytest.approx(5.7544486496e-3, rel=1e-9)
    assert p.longest == pytest.approx(545.94155668, rel=1e-9)
    assert p.shortest is None


def test_center_prediction_exact_option():
    p = predict_center_period(1.0, 1.01, exact=True)
    w = [math.atan2(math.sqrt(K * (4 - K)), 2 - K) for K in (1.0, 1.01)]
    assert p.delta_omega == pytest.approx(w[1] - w[0], rel=1e-12)
    assert p.longest == pytest.approx(545.04219197, rel=1e-8)


def test_center_equal_maps_has_no_longest():
    assert predict_center_period(1.5, 1.5).longest is None


@pytest.mark.parametrize("K", [0.0, 4.0, 4.5, -1.0])
def test_center_outside_elliptic_range(K):
    with pytest.raises(DomainError):
        predict_center_period(K, 1.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 3.8), st.floats(1e-4, 0.1))
def test_center_is_half_the_r1_chain_beat(K, dK):
    # the origin is the r = 1 chain: pi/dw equals half of 2 pi r/dw
    c = predict_center_period(K, K + dK, exact=True)
    o = predict_chain_periods(K, K + dK, 1, 0.0)
    assert c.longest == pytest.approx(o.longest / 2, rel=1e-9)
    assert c.medium == pytest.approx(o.medium, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 3.5), st.floats(1e-4, 0.05))
def test_first_order_close_to_exact(K, dK):
    a = predict_center_period(K, K + dK)
    b = predict_center_period(K, K + dK, exact=True)
    # error of the one-sided derivative: dK times the log-derivative of dw/dK
    assert a.delta_omega == pytest.approx(b.delta_omega, rel=(2 * dK * abs(2 - K) + dK**2) / (K * (4 - K - dK)) + 1e-6)


# -- chain predictions --------------------------------------------------------------------

CHAINS = [
    # K1, K2, r, hint, frozen launch point, frozen (medium, longest), reference (medium, longest), one decimal
    (1.0, 1.01, 8, 1.1312, 1.1312859683, (44.72266397, 1077.50927513), (44.7, 1077.4)),
    (2.10, 2.11, 4, 0.3198, 0.3198058254, (61.29246453, 657.82985582), (61.3, 657.8)),
]


@pytest.mark.parametrize("K1,K2,r,hint,x0,frozen,reference", CHAINS)
def test_chain_predictions(K1, K2, r, hint, x0, frozen, reference):
    p = predict_chain_periods(K1, K2, r, hint)
    assert p.shortest == r / 2
    assert p.medium == pytest.approx(frozen[0], rel=1e-8)
    assert p.longest == pytest.approx(frozen[1], rel=1e-8)
    # reference values are rounded to one decimal
    assert p.medium == pytest.approx(reference[0], abs=0.05)
    assert p.longest == pytest.approx(reference[1], abs=0.15)
    assert chain_launch_point(K1, K2, r, hint) == pytest.approx(x0, abs=1e-9)


@pytest.mark.parametrize("K1,K2,r,hint,x0,frozen,reference", CHAINS)
def test_chain_omegas_by_eigenvalues(K1, K2, r, hint, x0, frozen, reference):
    o1, o2 = match_chain_orbits(K1, K2, r, hint)
    assert o1.omega == pytest.approx(_omega_by_eigen(o1.points, K1), abs=1e-10)
    assert o2.omega == pytest.approx(_omega_by_eigen(o2.points, K2), abs=1e-10)
    # the two island centres are close together
    assert abs(o1.points[0].x - o2.points[0].x) < 0.05 or any(abs(a.x - b.x) < 0.05 for a in o1.points for b in o2.points)


def test_reference_omegas():
    o1, o2 = match_chain_orbits(1.0, 1.01, 8, 1.1312)
    assert o1.omega == pytest.approx(1.10, abs=5e-3)
    assert o2.omega == pytest.approx(1.147, abs=5e-4)
    o1, o2 = match_chain_orbits(2.10, 2.11, 4, 0.3198)
    assert o1.omega == pytest.approx(0.391, abs=5e-4)
    assert o2.omega == pytest.approx(0.429, abs=5e-4)


def test_chain_orbits_are_periodic():
    for o in find_periodic_orbits(1.0, 8):
        x, p = o.points[0].x, o.points[0].p
        for _ in range(8):
            p = p - 1.0 * force(x)
            x = x + p
        assert abs(x - o.points[0].x) < 1e-9 and abs(p - o.points[0].p) < 1e-9


# -- period measurement -------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.floats(8.0, 400.0), st.floats(0.0, 2 * np.pi), st.floats(0.05, 0.5))
def test_measure_period_synthetic(T, phase, amp):
    N = 4000
    t = np.arange(N)
    v = 0.5 + amp * np.cos(2 * np.pi * t / T + phase)
    m = measure_period(v)
    # within one frequency bin of the true period
    assert abs(1 / m.period_kicks - 1 / T) <= 1.0 / N


def test_measure_period_uses_trace_spacing():
    k = np.arange(0, 5001, 10)
    v = 1 + np.cos(2 * np.pi * k / 546.0)
    m = measure_period(FidelityTrace(v, k))
    assert m.period_kicks == pytest.approx(546.0, rel=0.02)


def test_measure_period_flat_trace():
    m = measure_period(np.ones(1000))
    assert m.period_kicks is None and not m.found


def test_measure_period_short_trace():
    with pytest.raises(ValueError):
        measure_period([1.0, 0.5])


def test_chain_periods_synthetic():
    # hopping at period 4, doublet near 44.7 with beat ~1077
    t = np.arange(4000)
    f1, f2 = 1 / 45.8, 1 / 43.9
    v = 0.5 + 0.2 * np.cos(2 * np.pi * t / 4) + 0.3 * np.cos(2 * np.pi * f1 * t) + 0.25 * np.cos(2 * np.pi * f2 * t)
    m = measure_chain_periods(v)
    assert m.shortest.period_kicks == pytest.approx(4.0, abs=1e-6)
    assert m.medium.period_kicks == pytest.approx(2 / (f1 + f2), rel=0.005)
    assert m.longest.period_kicks == pytest.approx(1 / (f2 - f1), rel=0.05)


def test_chain_period_two_is_exact():
    t = np.arange(4000)
    v = 0.5 + 0.2 * (-1.0) ** t + 0.3 * np.cos(2 * np.pi * t / 61.0) + 0.3 * np.cos(2 * np.pi * t / 55.5)
    assert measure_chain_periods(v).shortest.period_kicks == 2.0


def test_chain_periods_empty_band():
    t = np.arange(2000)
    m = measure_chain_periods(0.5 + 0.1 * np.cos(2 * np.pi * t / 3.0))
    assert m.medium.period_kicks is None and m.longest.period_kicks is None


# -- quasi-energy ladder -----------------------------------------------------------------

@settings(max_examples=50, deadline=None)
@given(st.integers(2, 12), st.floats(-3.0, 3.0), st.integers(0, 10_000))
def test_ladder_recovers_offset(r, beta, seed):
    rng = np.random.default_rng(seed)
    E = 2 * np.pi * np.arange(r) / r + beta + rng.normal(0, 1e-4, r)
    E = np.angle(np.exp(1j * E))  # wrapped to (-pi, pi]
    fit = check_quasienergy_ladder(rng.permutation(E), r)
    gap = 2 * np.pi / r
    assert abs((fit.beta - beta + gap / 2) % gap - gap / 2) < 1e-3
    assert fit.max_residual < 5e-4
    assert sorted(fit.levels) == list(range(r))


def test_ladder_needs_two_peaks():
    with pytest.raises(ValueError):
        check_quasienergy_ladder(np.array([0.1]), 4)


def test_ladder_family_offset_synthetic():
    r, b1, b2 = 8, 0.24, 0.24 - 0.2752
    E = np.concatenate([2 * np.pi * np.arange(r) / r + b1, 2 * np.pi * np.arange(r) / r + b2])
    w = np.concatenate([np.full(r, 1.0), np.full(r, 0.1)])
    spec = QuasiEnergySpectrum(np.angle(np.exp(1j * E)), w, 1e-3)
    assert ladder_family_offset(spec, r) == pytest.approx(b2 - b1, abs=1e-9)
