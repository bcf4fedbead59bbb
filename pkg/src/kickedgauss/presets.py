"""Named parameter sets for the standard runs, one per plot or table."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from . import classical
from .config import ExperimentConfig
from .errors import ConfigError
from .experiments import RunResult, _ensemble, _path, run_center_sweep, run_experiment
from .io import write_csv, write_json

CENTER = dict(K1=1.0, K2=1.01, tau=0.01, x0=-0.25, p0=0.0)
CHAIN_GRID = dict(tau=2e-4, grid_span=3.0, grid_n=2**14)
CHAIN4 = dict(kind="fidelity-chain", K1=2.10, K2=2.11, x0=0.3198, r=4, kicks=4000, classical=False, **CHAIN_GRID)
CHAIN8 = dict(kind="fidelity-chain", K1=1.0, K2=1.01, x0=1.1312, r=8, kicks=4000, classical=False, **CHAIN_GRID)
SCATTER = dict(kind="scattering", K1=1.0, tau=0.01, p0=0.0, x_b=4.0, kicks=1000, grid_span=80.0, grid_n=2**15)
DEPHASING = dict(kind="dephasing", x_b=3.0, kicks=10_000, record_every=10, **CENTER)

CONFIGS = {
    "fig1": dict(kind="phase-portrait", K1=1.0, kicks=2000),
    "fig2": dict(kind="phase-portrait", K1=4.5, kicks=2000),
    "fig3": dict(kind="fidelity-center", kicks=10_000, record_every=10, **CENTER),
    "fig7": CHAIN4,
    "fig8": CHAIN8,
    "fig9": dict(kind="fidelity-chaos", K1=1.0, K2=1.01, tau=2e-4, x0=-2.0, kicks=100, grid_span=40.0, grid_n=2**19),
    "fig10": dict(DEPHASING, sigma_t=0.01),
    "fig11": dict(DEPHASING, sigma_t=0.001),
    "fig11-samek": dict(DEPHASING, K2=1.0, sigma_t=0.001, noise_mode="independent"),
    "quasienergy-r8": dict(kind="quasienergy", K1=1.0, K2=1.0, x0=1.1312, r=8, kicks=2**14, **CHAIN_GRID),
}
for _n in (12, 13, 14):
    CONFIGS[f"fig{_n}"] = dict(SCATTER, x0=-2.0)
    CONFIGS[f"fig{_n + 3}"] = dict(SCATTER, x0=-3.0)

SWEEPS = {
    "fig5": (dict(kind="fidelity-center", x0=0.0, tau=0.01, kicks=2000), np.arange(0.25, 3.9, 0.25), 0.1),
    "fig6": (dict(kind="fidelity-center", x0=-0.25, tau=2e-4, kicks=4000, **{k: CHAIN_GRID[k] for k in ("grid_span", "grid_n")}), np.arange(0.25, 1.51, 0.25), 0.01),
}

PRESETS = sorted([*CONFIGS, *SWEEPS, "fig4", "table1"], key=lambda s: (not s.startswith("fig"), len(s), s))


def preset_config(name: str, **overrides) -> ExperimentConfig:
    if name not in CONFIGS:
        raise ConfigError(f"preset {name!r} is not a single-run preset")
    return ExperimentConfig.from_dict({**CONFIGS[name], **overrides}).validate()


def _whorls(cfg: ExperimentConfig, stem: str) -> RunResult:
    """Classical densities of one launch after ``kicks`` kicks under both strengths."""
    e = _ensemble(cfg, cfg.x0)
    a = classical.evolve_ensemble(e, cfg.K1, cfg.kicks)
    b = classical.evolve_ensemble(e, cfg.K2, cfg.kicks)
    which = np.repeat([1, 2], len(e))
    p = write_csv(
        _path(cfg, stem, "whorls.csv"),
        {"map": which, "x": np.concatenate([a.x, b.x]), "p": np.concatenate([a.p, b.p])},
        cfg,
        title=f"classical densities after {cfg.kicks} kicks",
    )
    return RunResult([p], {"points": 2 * len(e)})


def _table1(overrides: dict) -> RunResult:
    out = RunResult()
    report = {}
    for label, base in (("r4", CHAIN4), ("r8", CHAIN8)):
        cfg = ExperimentConfig.from_dict({**base, **overrides})
        res = run_experiment(cfg, f"table1_{label}")
        out.paths += res.paths
        report[label] = {k: res.summary[k] for k in ("x0", "omega1", "omega2", "predicted", "measured")}
    cfg = ExperimentConfig.from_dict({**CHAIN8, **overrides})
    out.paths.append(write_json(Path(cfg.out) / "table1.json", report, cfg))
    out.summary = report
    return out


def run_preset(name: str, **overrides) -> RunResult:
    """Run a named preset; keyword overrides replace individual config fields."""
    if name in CONFIGS:
        return run_experiment(preset_config(name, **overrides), name)
    if name in SWEEPS:
        base, Ks, dK = SWEEPS[name]
        cfg = ExperimentConfig.from_dict({**base, **overrides})
        return run_center_sweep(cfg, Ks, dK, name)
    if name == "fig4":
        cfg = ExperimentConfig.from_dict({"kind": "fidelity-center", **CENTER, "kicks": 500, "ensemble": 10_000, **overrides})
        return _whorls(cfg.validate(), name)
    if name == "table1":
        return _table1(overrides)
    raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
