"""Per-kick time series produced by the classical and quantum simulations."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class FidelityTrace:
    """Fidelity sampled after selected numbers of kicks.

    ``kicks[i]`` is the number of applied kicks at which ``values[i]`` was
    recorded; a full-resolution trace has ``kicks == arange(len(values))``.
    """

    values: np.ndarray
    kicks: np.ndarray
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.kicks = np.asarray(self.kicks, dtype=int)
        if self.values.shape != self.kicks.shape:
            raise ValueError("values and kicks must have the same length")

    def __len__(self):
        return len(self.values)

    def between(self, start: int, stop: int) -> np.ndarray:
        """Values recorded at ``start <= kick < stop``."""
        sel = (self.kicks >= start) & (self.kicks < stop)
        return self.values[sel]


@dataclass
class ScatterTrace:
    """Cumulative probabilities to the left of, right of, and inside ``|x| <= x_b``.

    For the quantum trace ``left`` and ``right`` are time-integrated
    probability fluxes through ``-x_b`` and ``+x_b``; for the classical trace
    they are the fractions of trajectories currently outside the window.
    """

    left: np.ndarray
    right: np.ndarray
    center: np.ndarray
    x_b: float
    kicks: np.ndarray | None = None
    stderr: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.left = np.asarray(self.left, dtype=float)
        self.right = np.asarray(self.right, dtype=float)
        self.center = np.asarray(self.center, dtype=float)
        if self.kicks is None:
            self.kicks = np.arange(len(self.left))

    def __len__(self):
        return len(self.left)

    @property
    def total(self) -> np.ndarray:
        return self.left + self.right + self.center
