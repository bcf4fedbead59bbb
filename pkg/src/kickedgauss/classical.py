"""Classical dynamics of the kicked Gaussian map.

The map acts on the state just before a kick::

    p' = p - K x exp(-x**2 / 2)
    x' = x + (1 + dt) p'

where ``dt`` is the relative jitter of the interval between kicks (zero for
the noiseless map).  All array-valued helpers broadcast, so the same code
iterates a single :class:`PhaseState` or a whole :class:`Ensemble`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import DomainError, EmptyDensityError
from .traces import FidelityTrace, ScatterTrace

MAX_FORCE = math.exp(-0.5)  # max |x exp(-x^2/2)|, attained at |x| = 1


@dataclass(frozen=True)
class PhaseState:
    x: float
    p: float

    def __neg__(self) -> PhaseState:
        return PhaseState(-self.x, -self.p)

    def distance(self, other: PhaseState) -> float:
        return math.hypot(self.x - other.x, self.p - other.p)


@dataclass(frozen=True)
class MapParams:
    """Kick strength plus the dephasing-noise setup.

    ``sigma_t`` is the standard deviation of the relative inter-kick jitter
    and ``seed`` fixes its realization.
    """

    K: float
    sigma_t: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.sigma_t >= 0:
            raise ValueError(f"sigma_t must be >= 0, got {self.sigma_t}")

    def noise(self, kicks: int, realization: int = 0) -> np.ndarray:
        return noise_sequence(self.sigma_t, kicks, self.seed, realization)


def _strength(params) -> float:
    return params.K if isinstance(params, MapParams) else float(params)


def force(x):
    """Kick profile ``x exp(-x**2/2)``; the momentum change is ``-K`` times this."""
    return x * np.exp(-0.5 * x * x)


def noise_sequence(sigma_t: float, kicks: int, seed: int = 0, realization: int = 0) -> np.ndarray:
    """I.i.d. normal inter-kick jitters ``dt_n`` for one noise realization.

    Distinct ``realization`` indices under one ``seed`` give independent
    streams, which is how the "same K, different noise" comparison is set up.
    """
    if sigma_t < 0:
        raise ValueError("sigma_t must be >= 0")
    if sigma_t == 0:
        return np.zeros(kicks)
    rng = np.random.default_rng([seed, realization])
    return rng.normal(0.0, sigma_t, size=kicks)


# -- single steps -------------------------------------------------------------

def step_arrays(x, p, K: float, dt_noise: float = 0.0):
    """One kick plus free flight on raw coordinates (scalars or arrays)."""
    p_new = p - K * force(x)
    return x + (1.0 + dt_noise) * p_new, p_new


def inverse_step_arrays(x, p, K: float, dt_noise: float = 0.0):
    x_old = x - (1.0 + dt_noise) * p
    return x_old, p + K * force(x_old)


def map_step(state: PhaseState, params, dt_noise: float = 0.0) -> PhaseState:
    """Advance ``state`` by one kick.  ``params`` is a :class:`MapParams` or a bare K."""
    x, p = step_arrays(state.x, state.p, _strength(params), dt_noise)
    return PhaseState(float(x), float(p))


def map_inverse(state: PhaseState, params, dt_noise: float = 0.0) -> PhaseState:
    x, p = inverse_step_arrays(state.x, state.p, _strength(params), dt_noise)
    return PhaseState(float(x), float(p))


def involution_j1(state: PhaseState) -> PhaseState:
    """Reversor ``(x, p) -> (x - p, -p)``; its fixed set is the line ``p = 0``.

    It conjugates the map to its inverse, ``J1 M J1 = M^-1``.
    """
    return PhaseState(state.x - state.p, -state.p)


def involution_j2(state: PhaseState, K: float) -> PhaseState:
    """Second involution, ``J2 = M J1``, so that ``J2(J1(s)) == M(s)``.

    Explicitly ``u = x - p``, ``p' = -p - K u exp(-u^2/2)``, ``x' = u + p'``.
    """
    u = state.x - state.p
    p_new = -state.p - K * float(force(u))
    return PhaseState(u + p_new, p_new)


def iterate(state: PhaseState, params, kicks: int, noise: Sequence[float] | None = None) -> np.ndarray:
    """Orbit of ``state`` as an array of shape ``(kicks + 1, 2)`` holding (x, p)."""
    K = _strength(params)
    out = np.empty((kicks + 1, 2))
    x, p = state.x, state.p
    out[0] = x, p
    for n in range(kicks):
        x, p = step_arrays(x, p, K, 0.0 if noise is None else noise[n])
        out[n + 1] = x, p
    return out


# -- linearization ------------------------------------------------------------

@dataclass(frozen=True)
class TangentMatrix:
    """Jacobian of the map in ``(dx, dp)`` ordering."""

    m11: float
    m12: float
    m21: float
    m22: float

    @classmethod
    def from_array(cls, a) -> TangentMatrix:
        a = np.asarray(a, dtype=float)
        return cls(a[0, 0], a[0, 1], a[1, 0], a[1, 1])

    @classmethod
    def identity(cls) -> TangentMatrix:
        return cls(1.0, 0.0, 0.0, 1.0)

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    def __matmul__(self, other: TangentMatrix) -> TangentMatrix:
        return TangentMatrix.from_array(self.as_array() @ other.as_array())

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def trace(self) -> float:
        return self.m11 + self.m22

    @property
    def elliptic(self) -> bool:
        return abs(self.trace) < 2.0

    @property
    def rotation_angle(self) -> float | None:
        """``nu`` with eigenvalues ``exp(+-i nu)``; ``None`` unless elliptic."""
        if not self.elliptic:
            return None
        return math.acos(self.trace / 2.0)


def tangent_map(state: PhaseState, K: float, dt_noise: float = 0.0) -> TangentMatrix:
    d = K * (1.0 - state.x**2) * math.exp(-0.5 * state.x**2)
    s = 1.0 + dt_noise
    return TangentMatrix(1.0 - s * d, s, -d, 1.0)


def orbit_tangent(state: PhaseState, K: float, r: int) -> TangentMatrix:
    """Tangent map of ``M**r`` at ``state``: ordered product of one-kick Jacobians."""
    m = np.eye(2)
    x, p = state.x, state.p
    for _ in range(r):
        m = tangent_map(PhaseState(x, p), K).as_array() @ m
        x, p = step_arrays(x, p, K)
    return TangentMatrix.from_array(m)


def orbit_rotation_angle(K: float) -> float:
    """Rotation angle per kick about the origin, ``omega in (0, pi)`` for ``0 < K < 4``.

    Two-argument arctangent of the eigenvalue ``(2-K)/2 + i sqrt(K(4-K))/2``,
    so the branch is right for ``K > 2`` as well.
    """
    if not 0.0 < K < 4.0:
        raise DomainError(f"origin is not elliptic for K={K}; need 0 < K < 4")
    return math.atan2(math.sqrt(K * (4.0 - K)), 2.0 - K)


# -- periodic orbits ------------------------------------------------------------

@dataclass(frozen=True)
class PeriodicOrbit:
    r: int
    points: tuple[PhaseState, ...]
    trace: float
    omega: float | None

    @property
    def elliptic(self) -> bool:
        return self.omega is not None

    @property
    def symmetric_points(self) -> list[PhaseState]:
        """Orbit points lying on the symmetry line ``p = 0``."""
        return [s for s in self.points if abs(s.p) < 1e-9]


def _return_map(x, K: float, r: int):
    p = np.zeros_like(x)
    for _ in range(r):
        x, p = step_arrays(x, p, K)
    return x, p


def _bisect(f, a: float, b: float, fa: float, tol: float) -> float:
    for _ in range(200):
        if b - a <= tol:
            break
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def find_periodic_orbits(
    K: float,
    r: int,
    x_range: tuple[float, float] = (-3.0, 3.0),
    tolerance: float = 1e-12,
    step: float = 1e-3,
    return_tol: float = 1e-7,
    merge_tol: float = 1e-6,
) -> list[PeriodicOrbit]:
    """Period-``r`` orbits crossing the symmetry line ``p = 0`` inside ``x_range``.

    Candidates are sign changes of the momentum after ``r`` kicks started from
    ``(x, 0)``, scanned on a grid of spacing ``step`` and bisected to
    ``tolerance``.  A candidate is kept only if it actually returns to itself
    (``return_tol``), is not periodic with a proper divisor of ``r``, and does
    not belong to an orbit already found.
    """
    if r < 1:
        raise ValueError("period must be >= 1")
    lo, hi = x_range
    xs = np.arange(lo, hi + 0.5 * step, step)
    g = _return_map(xs, K, r)[1]

    def g1(x):
        return float(_return_map(np.float64(x), K, r)[1])

    roots = list(xs[g == 0.0])
    for i in np.nonzero(g[:-1] * g[1:] < 0)[0]:
        roots.append(_bisect(g1, xs[i], xs[i + 1], g[i], tolerance))
    roots.sort()

    orbits: list[PeriodicOrbit] = []
    for x0 in roots:
        start = PhaseState(float(x0), 0.0)
        path = iterate(start, K, r)
        if math.hypot(path[-1, 0] - x0, path[-1, 1]) > return_tol * max(1.0, abs(x0)):
            continue
        if any(
            math.hypot(path[d, 0] - x0, path[d, 1]) < return_tol * max(1.0, abs(x0))
            for d in range(1, r)
            if r % d == 0
        ):
            continue
        points = tuple(PhaseState(float(a), float(b)) for a, b in path[:-1])
        if any(any(q.distance(start) < merge_tol for q in o.points) for o in orbits):
            continue
        tm = orbit_tangent(start, K, r)
        orbits.append(PeriodicOrbit(r, points, float(tm.trace), tm.rotation_angle))
    return orbits


# -- ensembles ------------------------------------------------------------------

@dataclass
class Ensemble:
    """Equally weighted trajectories; index ``i`` always labels the same trajectory."""

    x: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        if self.x.shape != self.p.shape or self.x.ndim != 1:
            raise ValueError("x and p must be 1-D arrays of equal length")
        if len(self.x) == 0:
            raise ValueError("ensemble must contain at least one trajectory")

    def __len__(self):
        return len(self.x)

    @property
    def states(self) -> list[PhaseState]:
        return [PhaseState(float(a), float(b)) for a, b in zip(self.x, self.p)]

    @classmethod
    def from_states(cls, states: Sequence[PhaseState]) -> Ensemble:
        return cls(np.array([s.x for s in states]), np.array([s.p for s in states]))

    def copy(self) -> Ensemble:
        return Ensemble(self.x.copy(), self.p.copy())


def sample_gaussian_ensemble(x0: float, p0: float, dx: float, dp: float, n: int, seed: int = 0) -> Ensemble:
    """``n`` draws from the product Gaussian centred on ``(x0, p0)``."""
    if dx <= 0 or dp <= 0:
        raise ValueError("widths must be positive")
    if n < 1:
        raise ValueError("need at least one trajectory")
    rng = np.random.default_rng(seed)
    return Ensemble(rng.normal(x0, dx, n), rng.normal(p0, dp, n))


def minimal_width(tau: float) -> float:
    """Width ``sqrt(tau/2)`` shared by position and momentum for a minimal packet."""
    return math.sqrt(tau / 2.0)


def _resolve_noise(params, kicks, noise):
    if noise is not None:
        noise = np.asarray(noise, dtype=float)
        if len(noise) < kicks:
            raise ValueError(f"noise sequence has {len(noise)} entries, need {kicks}")
        return noise
    if isinstance(params, MapParams):
        return params.noise(kicks)
    return np.zeros(kicks)


def iter_ensemble(e: Ensemble, params, kicks: int, noise=None) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
    """Yield ``(n, x, p)`` after each of ``kicks`` kicks.  Arrays are reused between yields."""
    K = _strength(params)
    noise = _resolve_noise(params, kicks, noise)
    x, p = e.x.copy(), e.p.copy()
    for n in range(kicks):
        p -= K * force(x)
        x += (1.0 + noise[n]) * p
        yield n + 1, x, p


def evolve_ensemble(e: Ensemble, params, kicks: int, noise=None) -> Ensemble:
    """Ensemble after ``kicks`` kicks.  Noise defaults to the realization fixed by ``params.seed``."""
    x, p = e.x, e.p
    for _, x, p in iter_ensemble(e, params, kicks, noise):
        pass
    return Ensemble(x.copy(), p.copy())


# -- coarse graining ------------------------------------------------------------------

@dataclass
class CoarseDensity:
    cell_side: float
    origin: tuple[float, float]
    nx: int
    np: int
    counts: np.ndarray  # shape (nx, np), sums to 1

    def same_grid(self, other: CoarseDensity) -> bool:
        return (
            self.nx == other.nx
            and self.np == other.np
            and math.isclose(self.cell_side, other.cell_side)
            and np.allclose(self.origin, other.origin)
        )


def coarse_grid(tau: float, bounds: tuple[float, float, float, float]) -> tuple[float, tuple[float, float], int, int]:
    """Cell side ``sqrt(tau)``, origin and cell counts covering ``(x_lo, x_hi, p_lo, p_hi)``."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    x_lo, x_hi, p_lo, p_hi = bounds
    h = math.sqrt(tau)
    nx = max(1, math.ceil((x_hi - x_lo) / h - 1e-9))
    npp = max(1, math.ceil((p_hi - p_lo) / h - 1e-9))
    return h, (x_lo, p_lo), nx, npp


def _cell_weights(x, p, h, origin, nx, npp):
    i = np.floor((x - origin[0]) / h).astype(np.int64)
    j = np.floor((p - origin[1]) / h).astype(np.int64)
    ok = (i >= 0) & (i < nx) & (j >= 0) & (j < npp)
    return np.bincount(i[ok] * npp + j[ok], minlength=nx * npp).astype(float)


def coarse_grain(e: Ensemble, tau: float, bounds=(-4.0, 4.0, -4.0, 4.0)) -> CoarseDensity:
    """Histogram on square cells of area ``tau`` inside ``bounds``, normalized to the in-bounds weight."""
    h, origin, nx, npp = coarse_grid(tau, bounds)
    w = _cell_weights(e.x, e.p, h, origin, nx, npp)
    total = w.sum()
    if total == 0:
        raise EmptyDensityError("no trajectories inside the coarse-graining bounds")
    return CoarseDensity(h, origin, nx, npp, (w / total).reshape(nx, npp))


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = float(a @ a), float(b @ b)
    if na == 0 or nb == 0:
        raise EmptyDensityError("density has zero weight")
    return float(a @ b) / math.sqrt(na * nb)


def classical_fidelity(d1: CoarseDensity, d2: CoarseDensity) -> float:
    """Cosine overlap of two coarse-grained densities on the same grid."""
    if not d1.same_grid(d2):
        raise ValueError("densities live on different grids")
    return _cosine(d1.counts.ravel(), d2.counts.ravel())


def classical_fidelity_trace(
    ensemble: Ensemble,
    K1: float,
    K2: float,
    tau: float,
    kicks: int,
    noise1=None,
    noise2=None,
    bounds=(-4.0, 4.0, -4.0, 4.0),
    record_every: int = 1,
    start: int = 0,
) -> FidelityTrace:
    """Coarse-grained fidelity of one ensemble evolved under two kick strengths.

    Pass the same noise array twice for a shared realization, different
    arrays to compare noise realizations.  Restricting ``bounds`` to the
    window ``|x| <= x_b`` gives the window-normalized variant, because each
    density is normalized to its in-bounds weight.
    """
    h, origin, nx, npp = coarse_grid(tau, bounds)
    n1 = _resolve_noise(None, kicks, noise1)
    n2 = _resolve_noise(None, kicks, noise2)

    def overlap(x1, p1, x2, p2):
        try:
            return _cosine(_cell_weights(x1, p1, h, origin, nx, npp), _cell_weights(x2, p2, h, origin, nx, npp))
        except EmptyDensityError:
            return math.nan

    ks, vals = [], []
    if start == 0:
        ks.append(0)
        vals.append(overlap(ensemble.x, ensemble.p, ensemble.x, ensemble.p))
    for (n, x1, p1), (_, x2, p2) in zip(iter_ensemble(ensemble, K1, kicks, n1), iter_ensemble(ensemble, K2, kicks, n2)):
        if n >= start and n % record_every == 0:
            ks.append(n)
            vals.append(overlap(x1, p1, x2, p2))
    cfg = dict(K1=K1, K2=K2, tau=tau, kind="classical", bounds=list(bounds), n=len(ensemble))
    return FidelityTrace(np.array(vals), np.array(ks), cfg)


# -- scattering ---------------------------------------------------------------------

def classical_scatter(e: Ensemble, params, kicks: int, x_b: float, noise=None) -> ScatterTrace:
    """Fractions of trajectories with ``x < -x_b``, ``x > x_b`` and in between, after each kick.

    Index 0 holds the initial ensemble.  Trajectories may re-enter the window,
    so the outside fractions need not be monotone.
    """
    if x_b <= 0:
        raise ValueError("x_b must be positive")
    n = len(e)
    left = np.empty(kicks + 1)
    right = np.empty(kicks + 1)

    def record(i, x):
        left[i] = np.count_nonzero(x < -x_b) / n
        right[i] = np.count_nonzero(x > x_b) / n

    record(0, e.x)
    for k, x, _ in iter_ensemble(e, params, kicks, noise):
        record(k, x)
    center = 1.0 - left - right
    stderr = np.sqrt(np.clip(center * (1.0 - center), 0.0, None) / n)
    return ScatterTrace(left, right, center, x_b, stderr=stderr, diagnostics={"n": n})


# -- phase portraits -------------------------------------------------------------------

def phase_portrait(
    K: float,
    launches: Sequence[PhaseState],
    kicks: int = 2000,
    escape: float = 50.0,
) -> list[np.ndarray]:
    """Orbit point clouds for a roster of launch points.

    Each orbit is truncated at the first iterate with ``|x| > escape``.
    """
    e = Ensemble.from_states(launches)
    xs = np.full((kicks + 1, len(e)), np.nan)
    ps = np.full_like(xs, np.nan)
    xs[0], ps[0] = e.x, e.p
    alive = np.ones(len(e), dtype=bool)
    for k, x, p in iter_ensemble(e, K, kicks):
        alive &= np.abs(x) <= escape
        xs[k] = np.where(alive, x, np.nan)
        ps[k] = np.where(alive, p, np.nan)
    out = []
    for j in range(len(e)):
        keep = ~np.isnan(xs[:, j])
        out.append(np.column_stack([xs[keep, j], ps[keep, j]]))
    return out


def default_launches(K: float, n_line: int = 24, n_ladder: int = 8) -> list[PhaseState]:
    """Launch roster for portraits: points on ``p = 0`` plus a momentum ladder at ``x = 0``."""
    line = [PhaseState(float(x), 0.0) for x in np.linspace(0.05, 4.0, n_line)]
    ladder = [PhaseState(0.0, float(p)) for p in np.linspace(0.1, 2.5, n_ladder)]
    return line + ladder
