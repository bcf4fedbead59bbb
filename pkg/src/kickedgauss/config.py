"""Experiment configuration, validation and physical-unit conversion."""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError

KINDS = (
    "phase-portrait",
    "fidelity-center",
    "fidelity-chain",
    "fidelity-chaos",
    "dephasing",
    "scattering",
    "quasienergy",
)
NOISE_MODES = ("shared", "independent")
HBAR = 1.054571817e-34


@dataclass
class ExperimentConfig:
    """Complete parameter record of one run.

    ``grid_span`` is the half width of the periodic domain ``[-span, span)``.
    ``r`` is the island-chain order used by chain and quasi-energy runs; for
    those ``x0`` is a hint snapped to the chain launch point.
    ``noise_mode`` selects whether the two evolutions of a dephasing run
    share one noise realization or use two.
    """

    kind: str
    K1: float = 1.0
    K2: float = 1.01
    tau: float = 0.01
    x0: float = -0.25
    p0: float = 0.0
    sigma_t: float = 0.0
    kicks: int = 1000
    x_b: float = 3.0
    grid_n: int = 2**14
    grid_span: float = 40.0
    ensemble: int = 100_000
    seed: int = 0
    out: str = "out"
    r: int = 0
    record_every: int = 1
    noise_mode: str = "shared"
    classical: bool = True

    def replace(self, **changes) -> ExperimentConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        names = {f.name: f for f in dataclasses.fields(cls)}
        unknown = set(d) - set(names)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "kind" not in d:
            raise ConfigError("config needs a 'kind'")
        return cls(**{k: _coerce(names[k], v) for k, v in d.items()})

    def dumps(self) -> str:
        """``key = value`` text, one field per line."""
        return "".join(f"{k} = {_fmt(v)}\n" for k, v in self.to_dict().items())

    @classmethod
    def loads(cls, text: str, base: dict | None = None) -> ExperimentConfig:
        return cls.from_dict({**(base or {}), **parse_key_values(text)})

    @classmethod
    def load(cls, path, base: dict | None = None) -> ExperimentConfig:
        return cls.loads(Path(path).read_text(), base)

    @property
    def delta_x(self) -> float:
        return math.sqrt(self.tau / 2)

    @property
    def p_max(self) -> float:
        return math.pi * self.tau * self.grid_n / (2 * self.grid_span)

    def validate(self) -> ExperimentConfig:
        """Check every field against the preconditions of the operations it feeds."""
        c = self
        _check(c.kind in KINDS, f"kind must be one of {KINDS}, got {c.kind!r}")
        for name in ("K1", "K2", "tau", "x0", "p0", "sigma_t", "x_b", "grid_span"):
            _check(math.isfinite(getattr(c, name)), f"{name} must be finite")
        _check(c.tau > 0, "tau must be positive")
        _check(c.sigma_t >= 0, "sigma_t must be >= 0")
        _check(c.kicks >= 1, "kicks must be >= 1")
        _check(c.ensemble >= 1, "ensemble must be >= 1")
        _check(c.record_every >= 1, "record_every must be >= 1")
        _check(c.r >= 0, "r must be >= 0")
        _check(c.noise_mode in NOISE_MODES, f"noise_mode must be one of {NOISE_MODES}")
        if c.kind == "phase-portrait":
            return self
        _check(c.grid_n >= 16 and c.grid_n & (c.grid_n - 1) == 0, "grid_n must be a power of two >= 16")
        _check(c.grid_span > 0, "grid_span must be positive")
        _check(abs(c.x0) + 6 * c.delta_x < c.grid_span, "packet does not fit inside the grid")
        _check(abs(c.p0) + 6 * c.tau / (2 * c.delta_x) < c.p_max, "grid too coarse for the packet momentum")
        if c.kind in ("dephasing", "scattering"):
            _check(0 < c.x_b < c.grid_span, "x_b must lie inside the grid")
        if c.kind == "scattering":
            _check(c.grid_span - 20 > c.x_b, "grid_span must exceed x_b + 20 to fit the absorber")
        if c.kind in ("fidelity-chain", "quasienergy"):
            _check(c.r >= 1 or c.kind == "quasienergy", "fidelity-chain needs the chain order r >= 1")
        return self


def _check(ok: bool, msg: str):
    if not ok:
        raise ConfigError(msg)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _coerce(f: dataclasses.Field, v):
    t = f.type if isinstance(f.type, str) else f.type.__name__
    try:
        if t == "bool":
            if isinstance(v, str):
                if v.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(v)
                return v.lower() in ("true", "1", "yes")
            return bool(v)
        if t == "int":
            if isinstance(v, str):
                v = float(v) if any(ch in v for ch in ".eE") else int(v, 0)
            if isinstance(v, float):
                if not v.is_integer():
                    raise ValueError(v)
                v = int(v)
            return int(v)
        if t == "float":
            return float(v)
        return str(v)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {f.name}: {v!r}") from None


def parse_key_values(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment and dashes in keys map to underscores."""
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def config_json(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensional kick strength ``K_prime`` (J), period ``T`` (s), mass ``m`` (kg) and waist ``Delta`` (m)."""

    K_prime: float
    T: float
    m: float
    Delta: float
    hbar: float = HBAR

    def __post_init__(self):
        for name in ("K_prime", "T", "m", "Delta", "hbar"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be positive, got {v}")


def to_dimensionless(phys: PhysicalParams) -> tuple[float, float]:
    """``(K, tau) = (K' T^2 / (m Delta^2), hbar T / (m Delta^2))``."""
    scale = phys.T / (phys.m * phys.Delta**2)
    return phys.K_prime * phys.T * scale, phys.hbar * scale


def from_dimensionless(K: float, tau: float, T: float, m: float, Delta: float) -> PhysicalParams:
    """Invert :func:`to_dimensionless` for given ``T, m, Delta``; ``hbar`` is the one implied by ``tau``."""
    for name, v in (("K", K), ("tau", tau), ("T", T), ("m", m), ("Delta", Delta)):
        if not (math.isfinite(v) and v > 0):
            raise ConfigError(f"{name} must be positive, got {v}")
    scale = T / (m * Delta**2)
    return PhysicalParams(K / (T * scale), T, m, Delta, tau / scale)
