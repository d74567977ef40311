"""Exact fractional Brownian motion sampling on uniform grids.

Two independent constructions of the same law are provided and cross-checked
against each other in the test suite:

* :func:`cholesky_fbm` factorizes the node covariance matrix directly
  (O(n^3), intended for n up to ~4096);
* :func:`circulant_fbm` synthesizes exact fractional Gaussian noise through
  a circulant embedding FFT and cumulates it (O(n log n)).

fBm here is the centered Gaussian process with covariance
``0.5 * (t^{2H} + s^{2H} - |t-s|^{2H})``; see :func:`fbm_cov`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CovarianceNotPD, DomainError, EmbeddingNotNonnegative

__all__ = [
    "HurstIndex",
    "TimeGrid",
    "SamplePath",
    "Seed",
    "fbm_cov",
    "fbm_cov_matrix",
    "gaussian_stream",
    "cholesky_fbm",
    "circulant_fbm",
    "cholesky_fbm_paths",
    "circulant_fbm_paths",
]

# Circulant eigenvalues in [-EIG_TOL_FACTOR * max_eig, 0) are clamped to 0;
# anything more negative raises EmbeddingNotNonnegative.
EIG_TOL_FACTOR = 1e-12


@dataclass(frozen=True)
class HurstIndex:
    """Hurst parameter, restricted to the open interval (0, 1)."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or not 0.0 < v < 1.0:
            raise DomainError(f"Hurst index must lie in (0, 1), got {self.value!r}")
        object.__setattr__(self, "value", v)

    def __float__(self):
        return self.value


def _hurst(H) -> float:
    """Coerce a float or HurstIndex to a validated float value."""
    if isinstance(H, HurstIndex):
        return H.value
    return HurstIndex(H).value


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid 0 = t_0 < t_1 < ... < t_n = t_max with n = n_steps."""

    t_max: float
    n_steps: int

    def __post_init__(self):
        if not (isinstance(self.n_steps, (int, np.integer)) and self.n_steps >= 1):
            raise DomainError(f"n_steps must be a positive integer, got {self.n_steps!r}")
        t = float(self.t_max)
        if not math.isfinite(t) or t <= 0.0:
            raise DomainError(f"t_max must be positive and finite, got {self.t_max!r}")
        object.__setattr__(self, "t_max", t)
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @property
    def dt(self) -> float:
        return self.t_max / self.n_steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_steps + 1)

    def coarsen(self, stride: int) -> "TimeGrid":
        """Grid obtained by keeping every stride-th node."""
        if stride < 1 or self.n_steps % stride != 0:
            raise DomainError(f"stride {stride} does not divide n_steps={self.n_steps}")
        return TimeGrid(self.t_max, self.n_steps // stride)


@dataclass
class SamplePath:
    """Real-valued process values on the nodes of a uniform grid."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.shape[0] != self.grid.n_steps + 1:
            raise DomainError(
                f"values must be 1-D with length n_steps+1={self.grid.n_steps + 1}, "
                f"got shape {vals.shape}"
            )
        self.values = vals

    def write_csv(self, stream, label: str = "value", comment: str | None = None):
        """Write a `t,<label>` CSV at full double precision."""
        if comment is not None:
            stream.write(comment.rstrip("\n") + "\n")
        stream.write(f"t,{label}\n")
        for t, v in zip(self.grid.times, self.values):
            stream.write(f"{t:.17g},{v:.17g}\n")


@dataclass(frozen=True)
class Seed:
    """Master seed plus a stream index selecting one of many independent
    Gaussian streams (distinct indices never overlap)."""

    master: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master) < 2**64:
            raise DomainError("master seed must fit in an unsigned 64-bit integer")
        if int(self.stream_index) < 0:
            raise DomainError("stream_index must be nonnegative")
        object.__setattr__(self, "master", int(self.master))
        object.__setattr__(self, "stream_index", int(self.stream_index))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master, spawn_key=(self.stream_index,))
        return np.random.default_rng(ss)

    def with_stream(self, stream_index: int) -> "Seed":
        return Seed(self.master, stream_index)


def _seed(seed) -> Seed:
    return seed if isinstance(seed, Seed) else Seed(seed)


def fbm_cov(t, s, H):
    """fBm covariance 0.5*(t^{2H} + s^{2H} - |t-s|^{2H}); symmetric in (t, s).

    Accepts scalars or broadcastable arrays with t, s >= 0.
    """
    h2 = 2.0 * _hurst(H)
    t = np.asarray(t, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    if np.any(t < 0.0) or np.any(s < 0.0):
        raise DomainError("fbm_cov requires t >= 0 and s >= 0")
    out = 0.5 * (t**h2 + s**h2 - np.abs(t - s) ** h2)
    return float(out) if out.ndim == 0 else out


def fbm_cov_matrix(grid: TimeGrid, H) -> np.ndarray:
    """Covariance matrix of (B_{t_1}, ..., B_{t_n}); the t_0 = 0 node is
    excluded because its row is identically zero."""
    t = grid.times[1:]
    return fbm_cov(t[:, None], t[None, :], H)


def gaussian_stream(seed, count: int) -> np.ndarray:
    """`count` i.i.d. standard normal variates, deterministic per seed."""
    if count < 0:
        raise DomainError(f"count must be nonnegative, got {count}")
    return _seed(seed).generator().standard_normal(int(count))


@lru_cache(maxsize=64)
def _cholesky_factor(t_max: float, n_steps: int, h: float) -> np.ndarray:
    cov = fbm_cov_matrix(TimeGrid(t_max, n_steps), h)
    try:
        factor = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise CovarianceNotPD(
            f"fBm covariance factorization failed for n={n_steps}, H={h}: {exc}"
        ) from exc
    factor.setflags(write=False)
    return factor


def cholesky_fbm_paths(grid: TimeGrid, H, seed, n_paths: int) -> np.ndarray:
    """Batch of exact fBm paths via the covariance Cholesky factor.

    Path i consumes the Gaussian stream ``seed.stream_index + i``; the result
    is a (n_paths, n_steps+1) array whose first column is zero.
    """
    h = _hurst(H)
    base = _seed(seed)
    if n_paths < 1:
        raise DomainError("n_paths must be >= 1")
    factor = _cholesky_factor(grid.t_max, grid.n_steps, h)
    z = np.empty((grid.n_steps, n_paths))
    for i in range(n_paths):
        z[:, i] = base.with_stream(base.stream_index + i).generator().standard_normal(
            grid.n_steps
        )
    out = np.empty((n_paths, grid.n_steps + 1))
    out[:, 0] = 0.0
    out[:, 1:] = (factor @ z).T
    return out


def cholesky_fbm(grid: TimeGrid, H, seed) -> SamplePath:
    """One exact fBm path from the O(n^3) Cholesky construction."""
    values = cholesky_fbm_paths(grid, H, seed, 1)[0]
    return SamplePath(grid, values)


@lru_cache(maxsize=64)
def _fgn_eigenvalues(n: int, h: float) -> np.ndarray:
    """Eigenvalues of the circulant embedding of unit-spacing fGn covariance."""
    k = np.arange(n + 1, dtype=np.float64)
    h2 = 2.0 * h
    rho = 0.5 * ((k + 1.0) ** h2 - 2.0 * k**h2 + np.abs(k - 1.0) ** h2)
    first_row = np.concatenate([rho, rho[-2:0:-1]])
    eig = np.fft.fft(first_row).real
    eig = _clip_eigenvalues(eig, n, h)
    eig.setflags(write=False)
    return eig


def _clip_eigenvalues(eig: np.ndarray, n: int, h: float) -> np.ndarray:
    tol = EIG_TOL_FACTOR * eig.max()
    if eig.min() < -tol:
        raise EmbeddingNotNonnegative(
            f"circulant embedding for n={n}, H={h} has eigenvalue "
            f"{eig.min():.3e} below -{tol:.3e}"
        )
    return np.maximum(eig, 0.0)


def circulant_fbm_paths(grid: TimeGrid, H, seed, n_paths: int) -> np.ndarray:
    """Batch of exact fBm paths via circulant-embedding fGn, cumulated.

    Same stream-per-path layout and output shape as
    :func:`cholesky_fbm_paths`.
    """
    h = _hurst(H)
    base = _seed(seed)
    if n_paths < 1:
        raise DomainError("n_paths must be >= 1")
    m = grid.n_steps
    eig = _fgn_eigenvalues(m, h)
    root = np.sqrt(eig)

    # Hermitian-symmetric Gaussian spectrum: 2m real draws per path, fixed order.
    spectrum = np.empty((n_paths, 2 * m), dtype=np.complex128)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for i in range(n_paths):
        z = base.with_stream(base.stream_index + i).generator().standard_normal(2 * m)
        spectrum[i, 0] = z[0]
        spectrum[i, m] = z[1]
        if m > 1:
            interior = (z[2 : m + 1] + 1j * z[m + 1 :]) * inv_sqrt2
            spectrum[i, 1:m] = interior
            spectrum[i, m + 1 :] = np.conj(interior[::-1])

    fgn_unit = np.fft.fft(spectrum * root, axis=1).real[:, :m] / np.sqrt(2.0 * m)
    increments = fgn_unit * grid.dt**h
    out = np.empty((n_paths, m + 1))
    out[:, 0] = 0.0
    np.cumsum(increments, axis=1, out=out[:, 1:])
    return out


def circulant_fbm(grid: TimeGrid, H, seed) -> SamplePath:
    """One exact fBm path from the O(n log n) circulant construction."""
    values = circulant_fbm_paths(grid, H, seed, 1)[0]
    return SamplePath(grid, values)
