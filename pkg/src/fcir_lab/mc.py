"""Monte Carlo estimation of hitting probabilities, sup-tail probabilities
and empirical covariances, cross-validating the closed-form analytics.

Determinism contract: every estimate is a pure function of its arguments.
Path i always draws from Gaussian stream ``seed.stream_index + i``, paths are
processed in fixed-size chunks (so the batched FFT sees the same blocks no
matter what), and workers write per-path results into disjoint slices of
preallocated arrays.  Reductions then run in path order, which makes results
bit-identical for any worker count.

Finite horizons stand in for the suprema over all t >= 0, so hitting and
sup-tail estimates are lower bounds for the corresponding infinite-horizon
probabilities.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, NonpositiveStart
from .fbm import Seed, TimeGrid, _hurst, cholesky_fbm_paths, circulant_fbm_paths
from .fou import ModelParams, j_values

__all__ = [
    "McEstimate",
    "HittingStudy",
    "estimate_hitting_prob",
    "hitting_study",
    "estimate_sup_tail",
    "empirical_cov",
    "write_cov_sweep_csv",
    "GENERATORS",
    "resolve_threads",
]

GENERATORS = ("circulant", "cholesky")

# Fixed batch size for path generation; never depends on the worker count.
# Batched FFTs are row-exact, so this is purely a memory/performance knob.
CHUNK = 512


def resolve_threads(threads: int | None) -> int:
    """Explicit argument, else FCIR_THREADS, else hardware parallelism."""
    if threads is not None:
        if threads < 1:
            raise DomainError(f"threads must be >= 1, got {threads}")
        return int(threads)
    env = os.environ.get("FCIR_THREADS", "").strip()
    if env:
        return resolve_threads(int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class McEstimate:
    """Point estimate with its standard error and sample count."""

    mean: float
    stderr: float
    n_samples: int
    elapsed: float


@dataclass
class HittingStudy:
    """P(tau <= T) estimates over a ladder of horizons, evaluated on one
    shared path set simulated to the largest horizon (so the estimates are
    exactly non-decreasing in T, not just statistically)."""

    params: ModelParams
    horizons: np.ndarray
    estimates: list[McEstimate]
    grid_steps: int


def _generate(grid: TimeGrid, H, seed: Seed, n_paths: int, generator: str) -> np.ndarray:
    if generator == "circulant":
        return circulant_fbm_paths(grid, H, seed, n_paths)
    if generator == "cholesky":
        return cholesky_fbm_paths(grid, H, seed, n_paths)
    raise DomainError(f"generator must be one of {GENERATORS}, got {generator!r}")


def _sweep_paths(grid: TimeGrid, H, seed, n_paths: int, generator: str,
                 threads: int | None, consume) -> None:
    """Run ``consume(start, fbm_block)`` over fixed-size path chunks.

    ``consume`` must only write to per-path output slots in [start,
    start+len(block)); that keeps the sweep deterministic under any thread
    count.
    """
    base = seed if isinstance(seed, Seed) else Seed(seed)
    n_workers = resolve_threads(threads)
    starts = list(range(0, n_paths, CHUNK))

    def run(start: int):
        count = min(CHUNK, n_paths - start)
        block = _generate(grid, H, base.with_stream(base.stream_index + start),
                          count, generator)
        consume(start, block)

    if n_workers == 1 or len(starts) == 1:
        for start in starts:
            run(start)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(run, starts))


def _proportion(values: np.ndarray, elapsed: float) -> McEstimate:
    n = values.shape[0]
    p = float(values.mean())
    stderr = float(np.sqrt(p * (1.0 - p) / n))
    return McEstimate(mean=p, stderr=stderr, n_samples=n, elapsed=elapsed)


def _validate_common(n_paths: int, steps_per_unit: int):
    if n_paths < 1:
        raise DomainError(f"n_paths must be >= 1, got {n_paths}")
    if steps_per_unit < 1:
        raise DomainError(f"steps_per_unit must be >= 1, got {steps_per_unit}")


def _hitting_taus(params: ModelParams, T: float, n_paths: int, steps_per_unit: int,
                  seed, generator: str, threads: int | None) -> np.ndarray:
    """Interpolated first-zero time per path, +inf where the path never hits."""
    if not params.y0 > 0.0:
        raise NonpositiveStart(f"hitting studies need y0 > 0, got {params.y0}")
    grid = TimeGrid(float(T), round(float(T) * steps_per_unit))
    times = grid.times
    growth = np.exp(params.a * times)
    taus = np.full(n_paths, np.inf)

    def consume(start, block):
        y = growth * (params.y0 + params.sigma * j_values(block, grid, params.a))
        idx = _kernels.first_nonpositive(y)
        rows = np.nonzero(idx >= 0)[0]
        k = idx[rows]
        prev = y[rows, k - 1]
        cur = y[rows, k]
        tau = times[k - 1] + grid.dt * (prev / (prev - cur))
        taus[start + rows] = np.where(cur == 0.0, times[k], tau)

    _sweep_paths(grid, params.H, seed, n_paths, generator, threads, consume)
    return taus


def estimate_hitting_prob(params: ModelParams, T: float, n_paths: int,
                          steps_per_unit: int, seed, generator: str = "circulant",
                          threads: int | None = None) -> McEstimate:
    """Fraction of paths whose fOU first zero falls inside [0, T]."""
    _validate_common(n_paths, steps_per_unit)
    tic = time.perf_counter()
    taus = _hitting_taus(params, T, n_paths, steps_per_unit, seed, generator, threads)
    return _proportion(taus <= float(T), time.perf_counter() - tic)


def hitting_study(params: ModelParams, horizons, n_paths: int, steps_per_unit: int,
                  seed, generator: str = "circulant",
                  threads: int | None = None) -> HittingStudy:
    """P(tau <= T) over a horizon ladder, one simulation at max(horizons)."""
    _validate_common(n_paths, steps_per_unit)
    horizons = np.asarray(sorted(float(T) for T in np.atleast_1d(horizons)))
    if horizons.size == 0:
        raise DomainError("horizons must be nonempty")
    if horizons[0] <= 0.0:
        raise DomainError("horizons must be positive")
    tic = time.perf_counter()
    taus = _hitting_taus(params, horizons[-1], n_paths, steps_per_unit, seed,
                         generator, threads)
    elapsed = time.perf_counter() - tic
    estimates = [_proportion(taus <= T, elapsed) for T in horizons]
    return HittingStudy(params=params, horizons=horizons, estimates=estimates,
                        grid_steps=int(steps_per_unit))


def estimate_sup_tail(a: float, H, levels, T: float, n_paths: int,
                      steps_per_unit: int, seed, generator: str = "circulant",
                      threads: int | None = None,
                      negate_noise: bool = False) -> list[McEstimate]:
    """Per-level fraction of paths whose J excursion on [0, T] reaches x.

    For x >= 0 "reaches" means the running maximum attains x, for x < 0 the
    running minimum drops to x (negative levels exist for the mirrored-noise
    symmetry check).  All levels are evaluated on the same path set, so the
    estimates are nested by construction.  ``negate_noise`` flips the sign of
    every Gaussian draw, which maps each J path to its exact mirror image.
    """
    _validate_common(n_paths, steps_per_unit)
    levels = [float(x) for x in levels]
    if not levels:
        raise DomainError("levels must be nonempty")
    if any(b <= a_ for a_, b in zip(levels, levels[1:])):
        raise DomainError("levels must be strictly increasing")
    h = _hurst(H)
    grid = TimeGrid(float(T), round(float(T) * steps_per_unit))
    weights = np.exp(-float(a) * grid.times)
    mins = np.empty(n_paths)
    maxs = np.empty(n_paths)

    tic = time.perf_counter()

    def consume(start, block):
        if negate_noise:
            block = -block
        j = _kernels.exp_weighted_integral(block, weights, float(a), grid.dt)
        lo, hi = _kernels.row_extrema(j)
        mins[start : start + block.shape[0]] = lo
        maxs[start : start + block.shape[0]] = hi

    _sweep_paths(grid, h, seed, n_paths, generator, threads, consume)
    elapsed = time.perf_counter() - tic

    out = []
    for x in levels:
        reached = (maxs >= x) if x >= 0.0 else (mins <= x)
        out.append(_proportion(reached, elapsed))
    return out


def write_cov_sweep_csv(stream, rows, comment: str | None = None):
    """Write a `s,t,empirical,analytic,stderr,z_score` CSV.

    ``rows`` holds (s, t, empirical, analytic, stderr) tuples; the z-score is
    the gap between the Monte Carlo and quadrature values in stderr units.
    """
    if comment is not None:
        stream.write(comment.rstrip("\n") + "\n")
    stream.write("s,t,empirical,analytic,stderr,z_score\n")
    for s, t, empirical, analytic, stderr in rows:
        z = (empirical - analytic) / stderr if stderr > 0.0 else 0.0
        stream.write(f"{s:.17g},{t:.17g},{empirical:.17g},{analytic:.17g},"
                     f"{stderr:.17g},{z:.17g}\n")


def _node_index(t: float, grid: TimeGrid) -> int:
    k = t / grid.dt
    idx = round(k)
    if abs(k - idx) > 1e-9 or not 0 <= idx <= grid.n_steps:
        raise DomainError(
            f"time {t} does not lie on the simulation grid (dt={grid.dt})"
        )
    return int(idx)


def empirical_cov(process: str, params: ModelParams, pairs, n_paths: int,
                  steps_per_unit: int, seed, generator: str = "circulant",
                  threads: int | None = None) -> list[McEstimate]:
    """Sample covariances of the fOU or J process at the given (s, t) pairs.

    The fOU values are centered by the known mean y0 e^{at} before taking
    products, so each estimate is a mean of per-path products and its
    standard error is the plug-in one (sample std of products / sqrt(n)).
    """
    if process not in ("fou", "j_process"):
        raise DomainError(f"process must be 'fou' or 'j_process', got {process!r}")
    _validate_common(n_paths, steps_per_unit)
    pairs = [(float(s), float(t)) for s, t in pairs]
    if not pairs:
        raise DomainError("pairs must be nonempty")
    t_max = max(max(s, t) for s, t in pairs)
    if t_max <= 0.0:
        raise DomainError("at least one pair time must be positive")
    grid = TimeGrid(t_max, round(t_max * steps_per_unit))
    idx_pairs = [(_node_index(s, grid), _node_index(t, grid)) for s, t in pairs]
    times = grid.times
    growth = np.exp(params.a * times)

    products = np.empty((n_paths, len(pairs)))
    tic = time.perf_counter()

    def consume(start, block):
        j = j_values(block, grid, params.a)
        if process == "fou":
            centered = (params.sigma * growth) * j  # Y - y0 e^{at}, exactly
        else:
            centered = j
        for col, (ks, kt) in enumerate(idx_pairs):
            products[start : start + block.shape[0], col] = (
                centered[:, ks] * centered[:, kt]
            )

    _sweep_paths(grid, params.H, seed, n_paths, generator, threads, consume)
    elapsed = time.perf_counter() - tic

    out = []
    for col in range(len(pairs)):
        prod = products[:, col]
        mean = float(prod.mean())
        stderr = float(prod.std(ddof=1) / np.sqrt(n_paths)) if n_paths > 1 else 0.0
        out.append(McEstimate(mean=mean, stderr=stderr, n_samples=n_paths,
                              elapsed=elapsed))
    return out
