"""Fractional Ornstein-Uhlenbeck paths and first-zero detection.

Paths are built from a driving fBm path through the explicit solution
``Y_t = e^{at} (y0 + sigma * J_t)`` with the driving integral

    J_t = e^{-at} B_t + a * integral_0^t e^{-as} B_s ds,

the Lebesgue part evaluated by the trapezoid rule on the grid.  The grid
carries no Hurst information: H lives in :class:`ModelParams` purely so that
callers can keep the generating fBm consistent with the analytics they
compare against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, NonpositiveStart
from .fbm import HurstIndex, SamplePath, TimeGrid, _hurst

__all__ = [
    "ModelParams",
    "FouPath",
    "HitResult",
    "integral_J",
    "simulate_fou",
    "first_zero",
    "fou_values",
    "j_values",
]


@dataclass(frozen=True)
class ModelParams:
    """Parameters (H, a, sigma, y0) of dY = aY dt + sigma dB^H, Y_0 = y0.

    The squared process uses the doubled coefficients, exposed as
    ``a_tilde = 2a``, ``sigma_tilde = 2 sigma`` and ``x0 = y0**2``.
    """

    H: HurstIndex
    a: float
    sigma: float
    y0: float

    def __post_init__(self):
        h = self.H if isinstance(self.H, HurstIndex) else HurstIndex(self.H)
        object.__setattr__(self, "H", h)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "y0", float(self.y0))
        if not self.sigma > 0.0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")

    @property
    def hurst(self) -> float:
        return self.H.value

    @property
    def a_tilde(self) -> float:
        return 2.0 * self.a

    @property
    def sigma_tilde(self) -> float:
        return 2.0 * self.sigma

    @property
    def x0(self) -> float:
        return self.y0**2


@dataclass
class FouPath:
    """A fractional Ornstein-Uhlenbeck path on a uniform grid."""

    grid: TimeGrid
    values: np.ndarray
    params: ModelParams

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.shape[0] != self.grid.n_steps + 1:
            raise DomainError(
                f"values must have length n_steps+1={self.grid.n_steps + 1}"
            )
        self.values = vals

    def write_csv(self, stream, comment: str | None = None):
        SamplePath(self.grid, self.values).write_csv(stream, label="Y", comment=comment)


@dataclass(frozen=True)
class HitResult:
    """Outcome of a first-zero search: the bracketing grid index and the
    linearly interpolated hitting time, or hit=False."""

    hit: bool
    tau: float | None = None
    index: int | None = None

    def to_json(self) -> dict:
        return {"hit": self.hit, "tau": self.tau, "index": self.index}


def j_values(fbm_values: np.ndarray, grid: TimeGrid, a: float) -> np.ndarray:
    """Driving integral J on the grid for one path (1-D) or a batch (2-D)."""
    weights = np.exp(-a * grid.times)
    return _kernels.exp_weighted_integral(fbm_values, weights, a, grid.dt)


def fou_values(fbm_values: np.ndarray, grid: TimeGrid, params: ModelParams) -> np.ndarray:
    """fOU values e^{at} (y0 + sigma J) for one path (1-D) or a batch (2-D)."""
    growth = np.exp(params.a * grid.times)
    j = j_values(fbm_values, grid, params.a)
    return growth * (params.y0 + params.sigma * j)


def integral_J(fbm_path: SamplePath, a: float) -> SamplePath:
    """Pathwise integral J_t = e^{-at} B_t + a * trapz(e^{-as} B_s, [0, t])."""
    if fbm_path.values[0] != 0.0:
        raise DomainError("driving fBm path must start at 0")
    return SamplePath(fbm_path.grid, j_values(fbm_path.values, fbm_path.grid, float(a)))


def simulate_fou(fbm_path: SamplePath, params: ModelParams) -> FouPath:
    """fOU path driven by ``fbm_path`` (generated with params.H by the caller)."""
    if fbm_path.values[0] != 0.0:
        raise DomainError("driving fBm path must start at 0")
    values = fou_values(fbm_path.values, fbm_path.grid, params)
    return FouPath(fbm_path.grid, values, params)


def first_zero(path: FouPath) -> HitResult:
    """First grid crossing into (-inf, 0], with linear interpolation for tau.

    Touching zero counts as hitting; a node value of exactly zero returns the
    node time itself.
    """
    values = path.values
    if values[0] <= 0.0:
        raise NonpositiveStart(f"path must start strictly positive, got {values[0]}")
    k = _kernels.first_nonpositive(values)
    if k < 0:
        return HitResult(hit=False)
    times = path.grid.times
    prev, cur = values[k - 1], values[k]
    tau = times[k - 1] + path.grid.dt * (prev / (prev - cur))
    if cur == 0.0:
        tau = float(times[k])
    return HitResult(hit=True, tau=float(tau), index=int(k))
