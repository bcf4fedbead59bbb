"""Runners turning an :class:`ExperimentConfig` into data files."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, classical, quantum
from .config import ExperimentConfig
from .io import write_csv, write_json


@dataclass
class RunResult:
    paths: list[Path] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def _grid(cfg: ExperimentConfig) -> quantum.Grid:
    return quantum.Grid.symmetric(cfg.grid_span, cfg.grid_n, cfg.tau)


def _ensemble(cfg: ExperimentConfig, x0: float) -> classical.Ensemble:
    d = classical.minimal_width(cfg.tau)
    return classical.sample_gaussian_ensemble(x0, cfg.p0, d, d, cfg.ensemble, cfg.seed)


def _noises(cfg: ExperimentConfig, kicks: int):
    n1 = classical.noise_sequence(cfg.sigma_t, kicks, cfg.seed, 0)
    n2 = n1 if cfg.noise_mode == "shared" else classical.noise_sequence(cfg.sigma_t, kicks, cfg.seed, 1)
    return n1, n2


def _path(cfg: ExperimentConfig, stem: str, suffix: str) -> Path:
    return Path(cfg.out) / f"{stem}_{suffix}"


def _launch_x(cfg: ExperimentConfig) -> float:
    if cfg.kind == "fidelity-chain":
        return analysis.chain_launch_point(cfg.K1, cfg.K2, cfg.r, cfg.x0)
    if cfg.kind == "quasienergy" and cfg.r >= 1:
        orbits = [o for o in classical.find_periodic_orbits(cfg.K1, cfg.r) if o.elliptic]
        pts = [pt.x for o in orbits for pt in o.points if abs(pt.p) < 1e-9]
        if not pts:
            raise ValueError(f"no elliptic period-{cfg.r} orbit at K={cfg.K1}")
        return min(pts, key=lambda v: abs(v - cfg.x0))
    return cfg.x0


def run_phase_portrait(cfg: ExperimentConfig, stem: str) -> RunResult:
    orbits = classical.phase_portrait(cfg.K1, classical.default_launches(cfg.K1), cfg.kicks)
    ids = np.concatenate([np.full(len(o), j) for j, o in enumerate(orbits)])
    its = np.concatenate([np.arange(len(o)) for o in orbits])
    xy = np.concatenate(orbits)
    p = write_csv(
        _path(cfg, stem, "portrait.csv"),
        {"orbit": ids, "iterate": its, "x": xy[:, 0], "p": xy[:, 1]},
        cfg,
        {"iterate": "kicks", "x": "1", "p": "1"},
        f"phase portrait K={cfg.K1}",
    )
    return RunResult([p], {"orbits": len(orbits), "points": len(xy)})


def run_fidelity(cfg: ExperimentConfig, stem: str) -> RunResult:
    x0 = _launch_x(cfg)
    n1, n2 = _noises(cfg, cfg.kicks)
    phi0 = quantum.gaussian_packet(_grid(cfg), x0, cfg.p0)
    windowed = cfg.kind == "dephasing"
    if windowed:
        qt = quantum.windowed_fidelity_trace(phi0, cfg.K1, cfg.K2, cfg.kicks, cfg.x_b, n1, n2, cfg.record_every)
    else:
        qt = quantum.fidelity_trace(phi0, cfg.K1, cfg.K2, cfg.kicks, n1, n2, cfg.record_every)
    res = RunResult()
    res.paths.append(
        write_csv(_path(cfg, stem, "quantum.csv"), {"kick": qt.kicks, "S": qt.values}, cfg, {"kick": "kicks"}, "quantum fidelity")
    )
    summary = {"x0": x0, "S_min": float(qt.values.min()), "S_final": float(qt.values[-1])}
    if cfg.classical:
        bounds = (-cfg.x_b, cfg.x_b, -4.0, 4.0) if windowed else (-4.0, 4.0, -4.0, 4.0)
        ct = classical.classical_fidelity_trace(
            _ensemble(cfg, x0), cfg.K1, cfg.K2, cfg.tau, cfg.kicks, n1, n2, bounds, cfg.record_every
        )
        res.paths.append(
            write_csv(_path(cfg, stem, "classical.csv"), {"kick": ct.kicks, "S_c": ct.values}, cfg, {"kick": "kicks"}, "classical fidelity")
        )
        summary["S_c_final"] = float(ct.values[-1])
    if cfg.kind in ("fidelity-center", "dephasing") and cfg.K1 != cfg.K2 and 0 < min(cfg.K1, cfg.K2) and max(cfg.K1, cfg.K2) < 4:
        pred = analysis.predict_center_period(cfg.K1, cfg.K2)
        summary.update(predicted_period=pred.longest, measured_period=analysis.measure_period(qt).period_kicks)
    elif cfg.kind == "fidelity-center":
        summary["measured_period"] = analysis.measure_period(qt).period_kicks
    if cfg.kind == "fidelity-chain":
        pred = analysis.predict_chain_periods(cfg.K1, cfg.K2, cfg.r, x0)
        meas = analysis.measure_chain_periods(qt)
        summary.update(
            omega1=pred.omega1,
            omega2=pred.omega2,
            predicted=dict(zip(("shortest", "medium", "longest"), pred.periods)),
            measured=dict(zip(("shortest", "medium", "longest"), meas.periods)),
        )
    res.summary = summary
    res.paths.append(write_json(_path(cfg, stem, "report.json"), summary, cfg))
    return res


def run_scattering(cfg: ExperimentConfig, stem: str) -> RunResult:
    n1, _ = _noises(cfg, cfg.kicks)
    phi0 = quantum.gaussian_packet(_grid(cfg), cfg.x0, cfg.p0)
    qs = quantum.scatter_trace(phi0, cfg.K1, cfg.kicks, cfg.x_b, noise=n1)
    cols = {"kick": qs.kicks, "L": qs.left, "R": qs.right, "C": qs.center}
    summary = {"L": qs.left[-1], "R": qs.right[-1], "C": qs.center[-1], "flux_mismatch": qs.diagnostics["flux_mismatch"]}
    if cfg.classical:
        cs = classical.classical_scatter(_ensemble(cfg, cfg.x0), cfg.K1, cfg.kicks, cfg.x_b, n1)
        cols.update(L_c=cs.left, R_c=cs.right, C_c=cs.center, C_c_err=cs.stderr)
        summary.update(L_c=cs.left[-1], R_c=cs.right[-1], C_c=cs.center[-1], C_c_err=cs.stderr[-1])
    sel = slice(None, None, cfg.record_every)
    cols = {k: np.asarray(v)[sel] for k, v in cols.items()}
    p = write_csv(_path(cfg, stem, "scatter.csv"), cols, cfg, {"kick": "kicks"}, "scattering probabilities")
    j = write_json(_path(cfg, stem, "report.json"), summary, cfg)
    return RunResult([p, j], summary)


def run_quasienergy(cfg: ExperimentConfig, stem: str) -> RunResult:
    x0 = _launch_x(cfg)
    phi0 = quantum.gaussian_packet(_grid(cfg), x0, cfg.p0)
    spec = quantum.quasienergy_spectrum(phi0, cfg.K1, cfg.kicks)
    res = RunResult()
    res.paths.append(
        write_csv(_path(cfg, stem, "spectrum.csv"), {"E": spec.energies, "weight": spec.weights}, cfg, {"E": "rad"}, "quasi-energies")
    )
    summary = {"x0": x0, "peaks": len(spec), "resolution": spec.resolution}
    if cfg.r >= 1 and len(spec) >= cfg.r:
        fit = analysis.check_quasienergy_ladder(spec.strongest(cfg.r), cfg.r)
        summary.update(beta=fit.beta, max_residual=fit.max_residual, max_residual_bins=fit.max_residual / spec.resolution)
        orbit = min(
            (o for o in classical.find_periodic_orbits(cfg.K1, cfg.r) if o.elliptic),
            key=lambda o: min(abs(pt.x - x0) for pt in o.points),
        )
        summary["nu"] = orbit.omega
        if len(spec) >= 2 * cfg.r:
            summary.update(
                family_offset=analysis.ladder_family_offset(spec, cfg.r),
                predicted_family_offset=-2 * orbit.omega / cfg.r,
            )
    res.summary = summary
    res.paths.append(write_json(_path(cfg, stem, "report.json"), summary, cfg))
    return res


RUNNERS = {
    "phase-portrait": run_phase_portrait,
    "fidelity-center": run_fidelity,
    "fidelity-chain": run_fidelity,
    "fidelity-chaos": run_fidelity,
    "dephasing": run_fidelity,
    "scattering": run_scattering,
    "quasienergy": run_quasienergy,
}


def run_experiment(cfg: ExperimentConfig, stem: str | None = None) -> RunResult:
    cfg.validate()
    return RUNNERS[cfg.kind](cfg, stem or cfg.kind)


def run_center_sweep(base: ExperimentConfig, Ks, dK: float, stem: str) -> RunResult:
    """Measured and predicted revival period for ``K1 = K``, ``K2 = K + dK`` over ``Ks``."""
    rows = {"K": [], "predicted": [], "measured": []}
    for K in Ks:
        cfg = base.replace(kind="fidelity-center", K1=float(K), K2=float(K + dK), classical=False).validate()
        phi0 = quantum.gaussian_packet(_grid(cfg), cfg.x0, cfg.p0)
        # tails outside small islands escape; a wrapped 1e-4 changes S negligibly
        tr = quantum.fidelity_trace(phi0, cfg.K1, cfg.K2, cfg.kicks, edge_tol=1e-4)
        m = analysis.measure_period(tr).period_kicks
        pred = analysis.predict_center_period(cfg.K1, cfg.K2).longest if cfg.K2 < 4 else math.nan
        rows["K"].append(K)
        rows["predicted"].append(pred)
        rows["measured"].append(math.nan if m is None else m)
    p = write_csv(_path(base, stem, "sweep.csv"), rows, base, {"predicted": "kicks", "measured": "kicks"}, f"period sweep dK={dK}")
    return RunResult([p], rows)
