"""Invariant sweep: every identity the modules promise, run at desk scale.

Each check returns a :class:`CheckResult`; the CLI ``validate`` command
prints one line per check and fails (exit 3) if any is violated.  Quadrature
identities run always; the Monte Carlo cross-checks scale with ``n_paths``
so the quick default stays in seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels, analytics, fbm, fcir, fou, mc

__all__ = ["CheckResult", "run_checks", "expansion_identity_gap", "covariance_sweep"]

H_LATTICE = (0.1, 0.3, 0.5, 0.7, 0.9)
A_LATTICE = (-1.0, -0.1, 0.5, 1.0)
T_LATTICE = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def expansion_identity_gap(fbm_path: fbm.SamplePath, params: fou.ModelParams) -> float:
    """Relative gap of the six-term bracket expansion of X_T - X_0.

    With L the trapezoid cumulative of the fOU path Y and q = y0 + a L + s B,
    expanding sum (q_k^2 - q_{k-1}^2) produces six sums whose total must
    telescope back to q_n^2 - q_0^2 exactly; any gap is pure roundoff.
    """
    if not params.y0 > 0.0:
        raise ValueError("expansion check needs y0 > 0")
    y = fou.fou_values(fbm_path.values, fbm_path.grid, params)
    b = fbm_path.values
    a, sig, y0 = params.a, params.sigma, params.y0
    lebesgue = _kernels.cumtrapz(y, fbm_path.grid.dt)

    def midsum(f, g):
        return float(_kernels.midpoint_cumsum(f, g)[-1])

    total = (
        2.0 * a * y0 * float(lebesgue[-1])
        + 2.0 * a**2 * midsum(lebesgue, lebesgue)
        + 2.0 * a * sig * midsum(b, lebesgue)
        + 2.0 * sig * y0 * float(b[-1])
        + 2.0 * a * sig * midsum(lebesgue, b)
        + 2.0 * sig**2 * midsum(b, b)
    )
    q_end = y0 + a * float(lebesgue[-1]) + sig * float(b[-1])
    lhs = params.x0 + total
    rhs = q_end**2
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def _tol(spec: analytics.QuadSpec, value: float) -> float:
    return 2.0 * (spec.rel_tol * abs(value) + spec.abs_tol)


def _params(h, a, sigma=1.0, y0=1.0):
    return fou.ModelParams(H=h, a=a, sigma=sigma, y0=y0)


def check_cov_symmetry_and_diagonal() -> CheckResult:
    worst = 0.0
    for h in H_LATTICE:
        for t, s in ((1.0, 2.0), (0.5, 2.0), (3.0, 0.25)):
            gap = abs(fbm.fbm_cov(t, s, h) - fbm.fbm_cov(s, t, h))
            diag = abs(fbm.fbm_cov(t, t, h) - t ** (2 * h))
            worst = max(worst, gap, diag)
    return CheckResult("fbm covariance symmetry/diagonal", worst == 0.0,
                       f"worst gap {worst:.2e}")


def check_gram_psd() -> CheckResult:
    grid = fbm.TimeGrid(1.0, 512)
    try:
        for h in H_LATTICE:
            fbm._cholesky_factor(grid.t_max, grid.n_steps, float(h))
    except Exception as exc:
        return CheckResult("fbm Gram matrix PSD (n=512)", False, str(exc))
    return CheckResult("fbm Gram matrix PSD (n=512)", True,
                       f"Cholesky succeeded for H in {H_LATTICE}")


def check_classical_reduction() -> CheckResult:
    worst = 0.0
    for a in A_LATTICE:
        p = _params(0.5, a)
        for t, s in ((1.0, 1.0), (2.0, 1.0), (0.5, 2.0)):
            got = analytics.ou_cov(t, s, p)
            ref = (math.exp(a * (t + s)) - math.exp(a * abs(t - s))) / (2.0 * a)
            worst = max(worst, abs(got - ref) / abs(ref))
    return CheckResult("H=1/2 classical covariance", worst <= 1e-8,
                       f"worst relative gap {worst:.2e}")


def check_diagonal_identity() -> CheckResult:
    worst = 0.0
    for h in H_LATTICE:
        for a in A_LATTICE:
            p = _params(h, a)
            for t in T_LATTICE:
                gap = abs(analytics.ou_cov(t, t, p) - analytics.ou_var(t, p))
                worst = max(worst, gap / max(1.0, abs(analytics.ou_var(t, p))))
    return CheckResult("covariance diagonal equals variance", worst <= 1e-8,
                       f"worst scaled gap {worst:.2e}")


def check_bilinear_identity() -> CheckResult:
    s, t = 0.5, 1.5
    worst = 0.0
    for h in H_LATTICE:
        for a in A_LATTICE:
            inc = analytics.j_increment_var(s, t, a, h)
            combo = (analytics.j_var(t, a, h) + analytics.j_var(s, a, h)
                     - 2.0 * analytics.j_cov(s, t, a, h))
            worst = max(worst, abs(inc - combo))
    return CheckResult("increment variance bilinear identity", worst <= 1e-8,
                       f"worst gap {worst:.2e}")


def check_limit_formula() -> CheckResult:
    worst = 0.0
    for h in (0.3, 0.5, 0.7):
        worst = max(worst, abs(analytics.j_var(30.0, 1.0, h) - analytics.v_limit(1.0, h)))
    return CheckResult("variance saturates at H*Gamma(2H)/a^{2H}", worst <= 1e-6,
                       f"worst gap {worst:.2e}")


def check_variance_derivative() -> CheckResult:
    tight = analytics.QuadSpec(rel_tol=1e-12, abs_tol=1e-16)
    hstep = 1e-5
    worst = 0.0
    for a in (0.5, 1.0):
        for h in (0.3, 0.7):
            for t in (0.5, 2.0):
                fd = (analytics.j_var(t + hstep, a, h, tight)
                      - analytics.j_var(t - hstep, a, h, tight)) / (2.0 * hstep)
                worst = max(worst, abs(analytics.vtsq_derivative(t, a, h, tight) - fd))
    return CheckResult("variance derivative matches finite difference",
                       worst <= 1e-5, f"worst gap {worst:.2e}")


def check_cov_psd_spot() -> CheckResult:
    ts = (0.5, 1.0, 1.5, 2.0)
    worst = np.inf
    for h in H_LATTICE:
        for a in A_LATTICE:
            p = _params(h, a)
            m = np.array([[analytics.ou_cov(ti, tj, p) for tj in ts] for ti in ts])
            worst = min(worst, float(np.linalg.eigvalsh(m).min()))
    return CheckResult("4x4 covariance matrices PSD", worst >= -1e-8,
                       f"smallest eigenvalue {worst:.2e}")


def check_jvar_monotone() -> CheckResult:
    ts = np.linspace(1.0, 50.0, 50)
    ok = True
    for a in (0.5, 1.0):
        vals = [analytics.j_var(t, a, 0.7) for t in ts]
        ok = ok and bool(np.all(np.diff(vals) > -1e-12))
    return CheckResult("Var J increasing on [1, 50] for a > 0", ok, "checked a in {0.5, 1}")


def check_stratonovich_identity(seed: int) -> CheckResult:
    worst = 0.0
    for h in (0.3, 0.5, 0.75):
        for n in (256, 4096):
            path = fbm.circulant_fbm(fbm.TimeGrid(1.0, n), h, fbm.Seed(seed))
            got = fcir.stratonovich_sum(path, path)
            ref = 0.5 * (path.values[-1] ** 2 - path.values[0] ** 2)
            worst = max(worst, abs(got - ref) / max(1.0, abs(ref)))
    return CheckResult("midpoint sums telescope exactly", worst <= 1e-10,
                       f"worst scaled gap {worst:.2e}")


def check_rs_strat_coincide(seed: int) -> CheckResult:
    params = _params(0.75, -0.5, sigma=0.5, y0=2.0)
    grid = fbm.TimeGrid(1.0, 2**12)
    path = fbm.circulant_fbm(grid, params.H, fbm.Seed(seed))
    gaps = []
    for stride in (16, 4, 1):
        sub = fbm.SamplePath(grid.coarsen(stride), path.values[::stride])
        y = fou.simulate_fou(sub, params)
        sqrt_x = fbm.SamplePath(sub.grid, np.abs(y.values))
        gaps.append(abs(fcir.stratonovich_sum(sqrt_x, sub)
                        - fcir.rs_left_sum(sqrt_x, sub)))
    ok = gaps[0] > gaps[1] > gaps[2]
    return CheckResult("H>2/3: left sums approach midpoint sums", ok,
                       f"gaps {gaps[0]:.2e} -> {gaps[1]:.2e} -> {gaps[2]:.2e}")


def check_expansion_identity(seed: int) -> CheckResult:
    worst = 0.0
    for h in (0.3, 0.75):
        params = _params(h, -0.5, sigma=0.5, y0=2.0)
        path = fbm.circulant_fbm(fbm.TimeGrid(1.0, 2048), h, fbm.Seed(seed))
        worst = max(worst, expansion_identity_gap(path, params))
    return CheckResult("six-term expansion telescopes", worst <= 1e-10,
                       f"worst relative gap {worst:.2e}")


def check_residual_ladder(seed: int) -> CheckResult:
    params = _params(0.5, -0.5, sigma=0.5, y0=2.0)
    path = fbm.circulant_fbm(fbm.TimeGrid(1.0, 2**12), params.H, fbm.Seed(seed))
    report = fcir.sde_residual(path, params, coarsest_n=256)
    resid = report.max_residuals
    ok = bool(np.all(np.diff(resid) < 0.0))
    return CheckResult("SDE residual decreases under refinement", ok,
                       "residuals " + " -> ".join(f"{r:.2e}" for r in resid))


def check_bound_consistency(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    bounds = analytics.BoundParams()
    for _ in range(5):
        p = _params(rng.uniform(0.15, 0.9), rng.uniform(0.2, 2.0),
                    sigma=rng.uniform(0.3, 2.0), y0=rng.uniform(0.5, 3.0))
        tb = analytics.tau_bound(p, bounds)
        sb = analytics.sup_tail_bound(p.y0 / p.sigma, p.a, p.hurst, bounds,
                                      variant="comparison")
        worst = max(worst, abs(tb - sb) / abs(sb))
    return CheckResult("hitting bound equals sup-tail bound at y0/sigma",
                       worst <= 1e-12, f"worst relative gap {worst:.2e}")


def check_asymptotic_decay() -> CheckResult:
    p = _params(0.7, -1.0)
    t = 1.0
    lags = np.array([4.0, 6.0, 8.0, 10.0])
    diffs = [abs(analytics.ou_cov(t + s, t, p) - analytics.ou_cov_asymptotic(t, s, p))
             for s in lags]
    slope = np.polyfit(lags, np.log(diffs), 1)[0]
    ok = abs(slope - p.a) <= 0.15 * abs(p.a)
    return CheckResult("asymptotic covariance error decays like e^{as}", ok,
                       f"fitted slope {slope:.3f} vs a={p.a}")


def covariance_sweep(seed: int, n_paths: int, threads=None):
    """(s, t, empirical, analytic, stderr) rows over the validation cells,
    both for the fOU covariance and the driving-integral covariance."""
    cells = ((0.3, -1.0, 1.0), (0.7, -1.0, 1.0), (0.7, 1.0, 0.5))
    pairs = ((0.5, 0.5), (0.5, 1.0), (1.0, 2.0), (2.0, 2.0))
    rows = []
    for h, a, sigma in cells:
        p = _params(h, a, sigma=sigma, y0=1.0)
        for process in ("fou", "j_process"):
            est = mc.empirical_cov(process, p, pairs, n_paths, 256,
                                   fbm.Seed(seed), threads=threads)
            for (s, t), e in zip(pairs, est):
                if process == "fou":
                    ref = analytics.ou_cov(t, s, p)
                else:
                    ref = analytics.j_cov(min(s, t), max(s, t), a, h)
                rows.append((s, t, e.mean, ref, e.stderr))
    return rows


def check_mc_covariance(seed: int, n_paths: int, threads) -> CheckResult:
    rows = covariance_sweep(seed, n_paths, threads)
    z_scores = [abs(emp - ref) / se for _, _, emp, ref, se in rows]
    within = sum(z <= 4.0 for z in z_scores)
    ok = within >= math.ceil(0.95 * len(rows))
    return CheckResult("MC covariances match quadrature", ok,
                       f"{within}/{len(rows)} within 4 stderr "
                       f"(worst z={max(z_scores):.2f})")


def check_antithetic_mirror(seed: int, n_paths: int, threads) -> CheckResult:
    levels = [0.5, 1.0, 1.5]
    up = mc.estimate_sup_tail(1.0, 0.7, levels, 4.0, n_paths, 128,
                              fbm.Seed(seed), threads=threads)
    down = mc.estimate_sup_tail(1.0, 0.7, [-x for x in reversed(levels)], 4.0,
                                n_paths, 128, fbm.Seed(seed), threads=threads,
                                negate_noise=True)
    ok = all(u.mean == d.mean and u.stderr == d.stderr
             for u, d in zip(up, reversed(down)))
    return CheckResult("mirrored noise reproduces sup-tail estimates", ok,
                       "bit-identical" if ok else "estimates differ")


def check_hitting_monotone(seed: int, n_paths: int, threads) -> CheckResult:
    p = _params(0.7, -1.0, sigma=1.0, y0=0.5)
    study = mc.hitting_study(p, (1.0, 2.0, 4.0), n_paths, 128, fbm.Seed(seed),
                             threads=threads)
    means = [e.mean for e in study.estimates]
    ok = all(b >= a for a, b in zip(means, means[1:]))
    return CheckResult("hitting probability non-decreasing in horizon", ok,
                       " -> ".join(f"{m:.4f}" for m in means))


def run_checks(seed: int = 0, n_paths: int = 2000, threads: int | None = None,
               full: bool = False) -> list[CheckResult]:
    """Run the invariant sweep; `full` bumps nothing but the caller's n_paths."""
    results = [
        check_cov_symmetry_and_diagonal(),
        check_gram_psd(),
        check_classical_reduction(),
        check_diagonal_identity(),
        check_bilinear_identity(),
        check_limit_formula(),
        check_variance_derivative(),
        check_cov_psd_spot(),
        check_jvar_monotone(),
        check_stratonovich_identity(seed),
        check_rs_strat_coincide(seed),
        check_expansion_identity(seed),
        check_residual_ladder(seed),
        check_bound_consistency(seed),
        check_asymptotic_decay(),
        check_antithetic_mirror(seed, n_paths, threads),
        check_hitting_monotone(seed, n_paths, threads),
    ]
    if full:
        results.append(check_mc_covariance(seed, n_paths, threads))
    return results
