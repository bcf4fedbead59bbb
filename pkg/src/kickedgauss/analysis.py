"""Closed-form revival predictions and the spectral procedures that measure them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .classical import PeriodicOrbit, find_periodic_orbits, orbit_rotation_angle
from .errors import DomainError
from .quantum import QuasiEnergySpectrum
from .traces import FidelityTrace


@dataclass
class PredictionRecord:
    """Rotation angles of two nearby maps and the fidelity timescales they imply.

    Angles are per ``r`` kicks.  ``longest`` is ``None`` when the two angles
    coincide.
    """

    K1: float
    K2: float
    omega1: float
    omega2: float
    r: int
    delta_omega: float
    shortest: float | None
    medium: float
    longest: float | None

    @property
    def omega_bar(self) -> float:
        return 0.5 * (self.omega1 + self.omega2)

    @property
    def periods(self) -> tuple:
        return (self.shortest, self.medium, self.longest)


@dataclass
class PeriodMeasurement:
    period_kicks: float | None
    method: str
    frequency: float | None = None
    magnitude: float | None = None

    @property
    def found(self) -> bool:
        return self.period_kicks is not None


def predict_center_period(K1: float, K2: float, exact: bool = False) -> PredictionRecord:
    """Fidelity revival period ``T = pi / delta_omega`` for a packet at the origin.

    By default ``delta_omega = (K2 - K1) / sqrt(K2 (4 - K2))``, the first-order
    difference of the rotation angles.  With ``exact=True`` the difference of
    the two rotation angles is used instead.
    """
    for K in (K1, K2):
        if not 0 < K < 4:
            raise DomainError(f"origin is not elliptic for K={K}")
    w1, w2 = orbit_rotation_angle(K1), orbit_rotation_angle(K2)
    dw = w2 - w1 if exact else (K2 - K1) / math.sqrt(K2 * (4 - K2))
    T = math.pi / abs(dw) if dw != 0 else None
    return PredictionRecord(K1, K2, w1, w2, 1, dw, None, 2 * math.pi / (0.5 * (w1 + w2)), T)


def _elliptic(orbits, K):
    ell = [o for o in orbits if o.elliptic]
    if not ell:
        raise DomainError(f"no elliptic orbit of the requested period at K={K}")
    return ell


def _nearest(orbits, x):
    return min(orbits, key=lambda o: min(abs(pt.x - x) + abs(pt.p) for pt in o.points))


def match_chain_orbits(
    K1: float,
    K2: float,
    r: int,
    x_hint: float | None = None,
    orbits1: list[PeriodicOrbit] | None = None,
    orbits2: list[PeriodicOrbit] | None = None,
) -> tuple[PeriodicOrbit, PeriodicOrbit]:
    """Elliptic period-``r`` orbits of the two maps that belong to the same chain.

    The first orbit is the elliptic one closest to ``x_hint`` (or the first
    found); the second is the elliptic orbit of ``K2`` closest to it.
    """
    if orbits1 is None:
        orbits1 = find_periodic_orbits(K1, r)
    if orbits2 is None:
        orbits2 = find_periodic_orbits(K2, r)
    e1, e2 = _elliptic(orbits1, K1), _elliptic(orbits2, K2)
    o1 = _nearest(e1, x_hint) if x_hint is not None else e1[0]
    x_ref = o1.points[0].x if x_hint is None else min((pt.x for pt in o1.points), key=lambda v: abs(v - x_hint))
    return o1, _nearest(e2, x_ref)


def chain_launch_point(K1: float, K2: float, r: int, x_hint: float) -> float:
    """Point on ``p = 0`` midway between the matching island centres of both maps.

    A packet launched here sits in the same island of both chains, offset
    symmetrically from each centre.
    """
    o1, o2 = match_chain_orbits(K1, K2, r, x_hint)
    c1 = min((pt.x for pt in o1.points if abs(pt.p) < 1e-9), key=lambda v: abs(v - x_hint))
    c2 = min((pt.x for pt in o2.points if abs(pt.p) < 1e-9), key=lambda v: abs(v - c1))
    return 0.5 * (c1 + c2)


def predict_chain_periods(
    K1: float,
    K2: float,
    r: int,
    x_hint: float | None = None,
    orbits1: list[PeriodicOrbit] | None = None,
    orbits2: list[PeriodicOrbit] | None = None,
) -> PredictionRecord:
    """Fidelity timescales for a packet in an order-``r`` island chain.

    ``shortest = r/2`` (hopping between islands), ``medium = 2 pi r / omega_bar``
    (one revolution about the island centre) and ``longest = 2 pi r / delta_omega``
    (dephasing of the two rotations), with ``omega`` the rotation angle of
    the tangent map of ``M^r``.
    """
    o1, o2 = match_chain_orbits(K1, K2, r, x_hint, orbits1, orbits2)
    w1, w2 = o1.omega, o2.omega
    dw = w2 - w1
    longest = 2 * math.pi * r / abs(dw) if dw != 0 else None
    return PredictionRecord(K1, K2, w1, w2, r, dw, r / 2, 2 * math.pi * r / (0.5 * (w1 + w2)), longest)


def _parabolic(mag: np.ndarray, j: int) -> float:
    if j <= 0 or j >= len(mag) - 1:
        return 0.0
    y0, y1, y2 = mag[j - 1], mag[j], mag[j + 1]
    den = y0 - 2 * y1 + y2
    return 0.5 * (y0 - y2) / den if den < 0 else 0.0


def _spacing(trace) -> tuple[np.ndarray, float]:
    if isinstance(trace, FidelityTrace):
        values = trace.values
        step = float(np.median(np.diff(trace.kicks))) if len(trace) > 1 else 1.0
    else:
        values, step = np.asarray(trace, dtype=float), 1.0
    return values, step


def measure_period(trace, flat_tol: float = 1e-6) -> PeriodMeasurement:
    """Period of the strongest oscillation in a trace.

    The raw trace is Fourier transformed; the zero-frequency bin is the
    largest and is skipped, and the next-largest bin is refined by a
    parabola through its neighbours.  Returns a measurement with
    ``period_kicks=None`` when nothing rises above ``flat_tol`` of the DC bin.
    """
    values, step = _spacing(trace)
    N = len(values)
    if N < 4:
        raise ValueError("trace too short")
    mag = np.abs(np.fft.rfft(values))
    j = int(np.argmax(mag[1:])) + 1
    if mag[j] < flat_tol * mag[0] or mag[j] == 0:
        return PeriodMeasurement(None, "rfft-argmax")
    f = (j + _parabolic(mag, j)) / (N * step)
    period = min(max(1 / f, 2 * step), N * step)
    return PeriodMeasurement(period, "rfft-argmax", f, float(mag[j]))


def _padded_spectrum(values: np.ndarray, step: float, pad: int):
    v = values - values.mean()
    w = np.hanning(len(v))
    nfft = pad * len(v)
    mag = np.abs(np.fft.rfft(v * w, nfft))
    freq = np.fft.rfftfreq(nfft, step)
    return freq, mag


def _band_peaks(freq, mag, lo_period, hi_period, noise_floor=0.0):
    # mirror across Nyquist so a period-2 oscillation can register as a peak
    peaks, _ = find_peaks(np.concatenate([mag, mag[-2:-1]]), height=noise_floor * mag.max())
    f = freq[peaks]
    sel = (f > 1 / hi_period) & (f <= 1 / lo_period)
    return peaks[sel]


def _refined(freq, mag, j):
    if j == len(mag) - 1:
        return freq[j]
    return freq[j] + _parabolic(mag, j) * (freq[1] - freq[0])


@dataclass
class ChainPeriods:
    shortest: PeriodMeasurement
    medium: PeriodMeasurement
    longest: PeriodMeasurement
    details: dict = field(default_factory=dict)

    @property
    def periods(self) -> tuple:
        return (self.shortest.period_kicks, self.medium.period_kicks, self.longest.period_kicks)


def measure_chain_periods(
    trace,
    short_band: tuple[float, float] = (2.0, 10.0),
    medium_band: tuple[float, float] = (10.0, 200.0),
    pad: int = 16,
    partner_width: float = 0.25,
    floor: float = 0.5,
    noise_floor: float = 1e-3,
) -> ChainPeriods:
    """Three fidelity timescales of a packet in an island chain.

    The trace is mean-subtracted, Hann windowed and zero padded.  The
    shortest period is the strongest peak in ``short_band``.  In
    ``medium_band`` the revolution appears as a doublet at ``omega_1`` and
    ``omega_2``: the fundamental is the lowest-frequency peak of at least
    ``floor`` times the band maximum, and its partner the strongest other
    peak within ``partner_width`` in relative frequency.  The medium period
    is the inverse mean frequency of the doublet and the longest period is
    its beat.  Peaks weaker than ``noise_floor`` times the spectrum maximum
    are window leakage and are ignored.  If no partner is found the longest period is taken from the
    strongest peak beyond ``medium_band``.
    """
    values, step = _spacing(trace)
    N = len(values) * step
    freq, mag = _padded_spectrum(values, step, pad)

    def strongest(lo, hi, name):
        pk = _band_peaks(freq, mag, lo, hi, noise_floor)
        if not len(pk):
            return PeriodMeasurement(None, name)
        j = pk[np.argmax(mag[pk])]
        f = _refined(freq, mag, j)
        return PeriodMeasurement(1 / f, name, f, float(mag[j]))

    short = strongest(*short_band, "hann-band-peak")
    pk = _band_peaks(freq, mag, *medium_band, noise_floor)
    details = {}
    if not len(pk):
        return ChainPeriods(short, PeriodMeasurement(None, "doublet"), PeriodMeasurement(None, "doublet-beat"))
    top = mag[pk].max()
    strong = pk[mag[pk] >= floor * top]
    j1 = strong[np.argmin(freq[strong])]
    f1 = _refined(freq, mag, j1)
    near = [j for j in pk if j != j1 and abs(freq[j] - f1) <= partner_width * f1]
    if near:
        j2 = max(near, key=lambda j: mag[j])
        f2 = _refined(freq, mag, j2)
        details.update(f1=f1, f2=f2)
        medium = PeriodMeasurement(2 / (f1 + f2), "doublet", 0.5 * (f1 + f2), float(mag[j1]))
        longest = PeriodMeasurement(1 / abs(f1 - f2), "doublet-beat", abs(f1 - f2), float(mag[j2]))
    else:
        medium = PeriodMeasurement(1 / f1, "doublet", f1, float(mag[j1]))
        longest = strongest(medium_band[1], N / 2, "hann-band-peak")
    return ChainPeriods(short, medium, longest, details)


@dataclass
class LadderFit:
    beta: float
    residuals: np.ndarray
    levels: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(np.abs(self.residuals).max())


def _wrap(a, period):
    return (np.asarray(a) + period / 2) % period - period / 2


def check_quasienergy_ladder(spectrum: QuasiEnergySpectrum | np.ndarray, r: int) -> LadderFit:
    """Least-squares fit of peak energies to ``E_n = 2 pi n / r + beta`` modulo ``2 pi``.

    ``beta`` is defined modulo ``2 pi / r`` and reported in ``[-pi/r, pi/r)``.
    """
    E = np.asarray(spectrum.energies if isinstance(spectrum, QuasiEnergySpectrum) else spectrum, dtype=float)
    if len(E) < 2:
        raise ValueError("need at least two peaks to fit a ladder")
    gap = 2 * np.pi / r
    beta = np.angle(np.exp(1j * r * E).sum()) / r
    res = _wrap(E - beta, gap)
    beta = float(_wrap(beta + res.mean(), gap))
    res = _wrap(E - beta, gap)
    levels = np.round((E - beta - res) / gap).astype(int) % r
    return LadderFit(beta, res, levels)


def ladder_family_offset(spectrum: QuasiEnergySpectrum, r: int) -> float:
    """Offset between the strongest and next-strongest ``r``-peak ladders.

    For a packet at an island centre the two families are the ground and
    second excited island states, so the offset is ``-2 nu / r`` modulo
    ``2 pi / r``.
    """
    order = np.argsort(spectrum.weights)[::-1]
    if len(order) < 2 * r:
        raise ValueError(f"need at least {2 * r} peaks")
    b1 = check_quasienergy_ladder(spectrum.energies[order[:r]], r).beta
    b2 = check_quasienergy_ladder(spectrum.energies[order[r : 2 * r]], r).beta
    return float(_wrap(b2 - b1, 2 * np.pi / r))
