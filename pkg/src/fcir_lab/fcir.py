"""The fractional CIR process and pathwise SDE residual checks.

The process is the squared fOU path absorbed at its first zero:
``X_t = Y_t^2`` for t < tau and 0 afterwards.  Before tau it satisfies

    X_t = X_0 + a~ * int_0^t X_s ds + sigma~ * int_0^t sqrt(X_s) o dB^H_s

with the stochastic term read as a pathwise Stratonovich (midpoint-sum)
integral; for H > 2/3 the left-point Riemann-Stieltjes sums converge to the
same value.  :func:`sde_residual` quantifies both claims on a dyadic mesh
ladder, holding the driving path fixed and subsampling its nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, GridMismatch, HurstTooSmall
from .fbm import SamplePath, TimeGrid
from .fou import FouPath, HitResult, ModelParams, first_zero, fou_values, simulate_fou

__all__ = [
    "FcirPath",
    "ResidualReport",
    "simulate_fcir",
    "stratonovich_sum",
    "rs_left_sum",
    "sde_residual",
    "INTEGRAL_KINDS",
]

INTEGRAL_KINDS = ("stratonovich", "riemann_stieltjes")


@dataclass
class FcirPath:
    """Squared-and-stopped fOU values, with the detected first zero."""

    grid: TimeGrid
    values: np.ndarray
    tau: HitResult
    params: ModelParams

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.shape[0] != self.grid.n_steps + 1:
            raise DomainError(
                f"values must have length n_steps+1={self.grid.n_steps + 1}"
            )
        self.values = vals

    def write_csv(self, stream, comment: str | None = None):
        SamplePath(self.grid, self.values).write_csv(stream, label="X", comment=comment)


@dataclass
class ResidualReport:
    """Sup-norm SDE residuals over a dyadic refinement ladder."""

    n_steps: np.ndarray
    mesh_sizes: np.ndarray
    max_residuals: np.ndarray
    rates: np.ndarray  # rates[0] is nan; rates[j] = log2(resid_{j-1}/resid_j)

    def write_csv(self, stream, comment: str | None = None):
        if comment is not None:
            stream.write(comment.rstrip("\n") + "\n")
        stream.write("n_steps,delta,max_residual,rate\n")
        for n, d, r, q in zip(self.n_steps, self.mesh_sizes, self.max_residuals, self.rates):
            rate = "" if np.isnan(q) else f"{q:.17g}"
            stream.write(f"{n},{d:.17g},{r:.17g},{rate}\n")


def simulate_fcir(fou_path: FouPath) -> FcirPath:
    """Square the fOU path and absorb it at the first nonpositive node."""
    hit = first_zero(fou_path)  # raises NonpositiveStart on a bad start
    x = fou_path.values**2
    if hit.hit:
        x[hit.index :] = 0.0
    return FcirPath(fou_path.grid, x, hit, fou_path.params)


def _require_same_grid(f: SamplePath, g: SamplePath):
    if f.grid != g.grid:
        raise GridMismatch(f"paths live on different grids: {f.grid} vs {g.grid}")


def stratonovich_sum(f: SamplePath, g: SamplePath) -> float:
    """Midpoint-average sum sum_k 0.5*(f_k + f_{k-1}) * (g_k - g_{k-1})."""
    _require_same_grid(f, g)
    return float(_kernels.midpoint_cumsum(f.values, g.values)[-1])


def rs_left_sum(f: SamplePath, g: SamplePath) -> float:
    """Left-point Riemann-Stieltjes sum sum_k f_{k-1} * (g_k - g_{k-1})."""
    _require_same_grid(f, g)
    return float(_kernels.left_cumsum(f.values, g.values)[-1])


def _residual_sup(fbm_values, grid: TimeGrid, params: ModelParams, kind: str) -> float:
    """Sup-norm of the SDE residual on one mesh, restricted to the segment
    ending one step before the last node strictly before tau."""
    y = fou_values(fbm_values, grid, params)
    k_hit = _kernels.first_nonpositive(y)
    # stop two nodes short of the first nonpositive one: the last node
    # strictly before tau, minus one step (avoids the sqrt kink at tau)
    last = grid.n_steps if k_hit < 0 else k_hit - 2
    if last < 1:
        raise DomainError(
            "path reaches zero too early on this mesh for a residual check"
        )
    y = y[: last + 1]
    b = fbm_values[: last + 1]
    x = y * y
    sqrt_x = np.abs(y)  # equals y before tau; |.| guards roundoff at squaring
    lebesgue = _kernels.cumtrapz(x, grid.dt)
    if kind == "stratonovich":
        stoch = _kernels.midpoint_cumsum(sqrt_x, b)
    else:
        stoch = _kernels.left_cumsum(sqrt_x, b)
    resid = x - x[0] - params.a_tilde * lebesgue - params.sigma_tilde * stoch
    return float(np.abs(resid).max())


def sde_residual(
    fbm_path: SamplePath,
    params: ModelParams,
    integral_kind: str = "stratonovich",
    coarsest_n: int = 256,
) -> ResidualReport:
    """Residual ladder for the squared-fOU SDE identity.

    The finest mesh is the grid of ``fbm_path``; coarser meshes keep every
    2^j-th node of the same realization (the refinement is pathwise, the
    driving noise is never re-drawn).  On each mesh the fOU path is rebuilt
    from the restricted fBm nodes and the residual

        R(t_k) = X_k - X_0 - a~ * Trap(X)_k - sigma~ * S(sqrt(X), B)_k

    is evaluated on the pre-hitting segment, S being the midpoint or the
    left-point cumulative sum depending on ``integral_kind``.
    """
    if integral_kind not in INTEGRAL_KINDS:
        raise DomainError(
            f"integral_kind must be one of {INTEGRAL_KINDS}, got {integral_kind!r}"
        )
    if integral_kind == "riemann_stieltjes" and params.hurst <= 2.0 / 3.0:
        raise HurstTooSmall(
            f"Riemann-Stieltjes sums require H > 2/3, got H={params.hurst}"
        )
    n_finest = fbm_path.grid.n_steps
    if coarsest_n < 2:
        raise DomainError("coarsest_n must be at least 2")
    if n_finest < coarsest_n:
        raise DomainError(
            f"finest grid ({n_finest} steps) is coarser than coarsest_n={coarsest_n}"
        )
    n_levels = round(np.log2(n_finest / coarsest_n))
    if coarsest_n * 2**n_levels != n_finest:
        raise DomainError(
            f"n_steps={n_finest} must equal coarsest_n={coarsest_n} times a power of 2"
        )

    n_steps, mesh, resid = [], [], []
    for j in range(n_levels, -1, -1):
        stride = 2**j
        grid_j = fbm_path.grid.coarsen(stride)
        values_j = fbm_path.values[::stride]
        n_steps.append(grid_j.n_steps)
        mesh.append(grid_j.dt)
        resid.append(_residual_sup(values_j, grid_j, params, integral_kind))

    rates = np.full(len(resid), np.nan)
    for j in range(1, len(resid)):
        if resid[j - 1] > 0.0 and resid[j] > 0.0:
            rates[j] = np.log2(resid[j - 1] / resid[j])
    return ResidualReport(
        n_steps=np.asarray(n_steps, dtype=np.int64),
        mesh_sizes=np.asarray(mesh),
        max_residuals=np.asarray(resid),
        rates=rates,
    )
