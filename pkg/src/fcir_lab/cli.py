"""Command-line front end: reproducible simulation runs, analytics tables,
convergence studies and Monte Carlo sweeps with CSV/JSON output.

Exit codes: 0 success, 1 runtime/numerical failure, 2 invalid parameters,
3 convergence or invariant check failure.  Every output file starts with a
provenance comment line ``# fcir-lab <version> seed=<seed>``.

Options may also come from a JSON config file (``--config``); explicit flags
override file values, which override built-in defaults.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys

import numpy as np

from . import __version__, analytics, fcir, mc, validation
from .errors import (
    CovarianceNotPD,
    DomainError,
    EmbeddingNotNonnegative,
    FcirLabError,
    GridMismatch,
    ToleranceNotMet,
)
from .fbm import Seed, TimeGrid, cholesky_fbm, circulant_fbm
from .fou import ModelParams, first_zero, simulate_fou
from .fcir import simulate_fcir

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_CHECK = 3

_VALIDATION_ERRORS = (DomainError, GridMismatch)
_RUNTIME_ERRORS = (ToleranceNotMet, EmbeddingNotNonnegative, CovarianceNotPD)


class CheckFailure(FcirLabError):
    """A convergence or invariant gate did not pass (exit code 3)."""


DEFAULTS = {
    "simulate": {"T": 1.0, "n_steps": 1024, "seed": 0, "stream": 0,
                 "generator": "circulant", "tol": 1e-10, "out": None},
    "cov-table": {"sigma": [1.0], "seed": 0, "tol": 1e-10, "out": None},
    "sde-check": {"T": 1.0, "n_steps": 2**14, "coarsest": 2**8,
                  "kind": "stratonovich", "threshold": 0.05, "seed": 0,
                  "generator": "circulant", "tol": 1e-10, "out": None},
    "hitting": {"horizons": [1.0, 2.0, 4.0, 8.0], "n_paths": 20000,
                "steps_per_unit": 256, "C1": 1.0, "seed": 0,
                "generator": "circulant", "threads": None, "out": None,
                "bound_table": None, "refine": False},
    "sup-tail": {"T": 8.0, "n_paths": 20000, "steps_per_unit": 256,
                 "negate_noise": False, "seed": 0, "generator": "circulant",
                 "threads": None, "out": None},
    "validate": {"full": False, "n_paths": 2000, "seed": 0, "threads": None,
                 "out": None, "sweep_out": None},
}

REQUIRED = {
    "simulate": ("H", "a", "sigma", "y0"),
    "cov-table": ("H", "a", "t", "s"),
    "sde-check": ("H", "a", "sigma", "y0"),
    "hitting": ("H", "a", "sigma", "y0"),
    "sup-tail": ("H", "a", "levels"),
    "validate": (),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fcir-lab",
        description="Fractional Cox-Ingersoll-Ross simulation and analytics",
    )
    parser.add_argument("--version", action="version",
                        version=f"fcir-lab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, scalars=(), lists=(), flags=()):
        p.add_argument("--config", type=str, default=None,
                       help="JSON file with option defaults")
        p.add_argument("--out", type=str, default=None,
                       help="output CSV path (default: stdout)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None,
                       help="worker count (or FCIR_THREADS; default: all cores)")
        for name in scalars:
            p.add_argument(f"--{name}", type=float, default=None)
        for name in lists:
            p.add_argument(f"--{name}", type=float, nargs="+", default=None)
        for name in flags:
            p.add_argument(f"--{name}", action="store_true", default=None)

    p = sub.add_parser("simulate", help="one fBm/fOU/fCIR path as t,B,Y,X CSV")
    add_common(p, scalars=("H", "a", "sigma", "y0", "T", "tol"))
    p.add_argument("--n-steps", type=int, default=None)
    p.add_argument("--stream", type=int, default=None)
    p.add_argument("--generator", choices=mc.GENERATORS, default=None)

    p = sub.add_parser("cov-table", help="covariance lattice table")
    add_common(p, scalars=("tol",), lists=("H", "a", "sigma", "t", "s"))

    p = sub.add_parser(
        "sde-check", help="pathwise SDE residual ladder",
        description="Exit 0 iff the finest-mesh residual is at most "
                    "--threshold (absolute, default 0.05) and the residuals "
                    "decrease over the last three meshes.",
    )
    add_common(p, scalars=("H", "a", "sigma", "y0", "T", "threshold", "tol"))
    p.add_argument("--n-steps", type=int, default=None,
                   help="finest mesh (coarsest times a power of 2)")
    p.add_argument("--coarsest", type=int, default=None,
                   help="coarsest mesh of the refinement ladder")
    p.add_argument("--kind", choices=("stratonovich", "riemann-stieltjes"),
                   default=None,
                   help="integral-sum rule; riemann-stieltjes needs H > 2/3")
    p.add_argument("--generator", choices=mc.GENERATORS, default=None)

    p = sub.add_parser("hitting", help="zero-hitting probability study")
    add_common(p, scalars=("H", "a", "sigma", "y0", "C1"), lists=("horizons",),
               flags=("refine",))
    p.add_argument("--n-paths", type=int, default=None)
    p.add_argument("--steps-per-unit", type=int, default=None)
    p.add_argument("--generator", choices=mc.GENERATORS, default=None)
    p.add_argument("--bound-table", type=str, default=None,
                   help="also write a H,a,sigma,y0,C1,bound CSV here (a > 0)")

    p = sub.add_parser("sup-tail", help="P(sup J >= x) estimates per level")
    add_common(p, scalars=("H", "a", "T"), lists=("levels",),
               flags=("negate-noise",))
    p.add_argument("--n-paths", type=int, default=None)
    p.add_argument("--steps-per-unit", type=int, default=None)
    p.add_argument("--generator", choices=mc.GENERATORS, default=None)

    p = sub.add_parser("validate", help="run the full invariant sweep")
    add_common(p, flags=("full",))
    p.add_argument("--n-paths", type=int, default=None)
    p.add_argument("--sweep-out", type=str, default=None,
                   help="write the MC covariance sweep CSV here")

    return parser


def merge_options(args: argparse.Namespace) -> dict:
    """defaults < config file < explicit flags, with unknown keys rejected."""
    merged = dict(DEFAULTS[args.command])
    explicit = {k: v for k, v in vars(args).items()
                if k not in ("command", "config") and v is not None}
    if args.config is not None:
        with open(args.config) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise DomainError("config file must contain a JSON object")
        known = set(merged) | set(vars(args)) | set(REQUIRED[args.command])
        for key, value in loaded.items():
            attr = key.replace("-", "_")
            if attr in ("command", "config") or attr not in known:
                raise DomainError(f"unknown config key {key!r} for {args.command}")
            merged[attr] = value
    merged.update(explicit)
    for key in REQUIRED[args.command]:
        if merged.get(key) is None:
            raise DomainError(f"missing required option --{key}")
    return merged


def _quad_spec(tol) -> analytics.QuadSpec:
    rel = float(tol)
    return analytics.QuadSpec(rel_tol=rel, abs_tol=rel * 1e-4)


def _provenance(seed) -> str:
    return f"# fcir-lab {__version__} seed={seed}"


@contextlib.contextmanager
def _open_out(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def cmd_simulate(opt) -> int:
    params = ModelParams(H=opt["H"], a=opt["a"], sigma=opt["sigma"], y0=opt["y0"])
    if not params.y0 > 0.0:
        raise DomainError("simulate requires y0 > 0")
    grid = TimeGrid(opt["T"], int(opt["n_steps"]))
    seed = Seed(int(opt["seed"]), int(opt["stream"]))
    sample = (circulant_fbm if opt["generator"] == "circulant" else cholesky_fbm)(
        grid, params.H, seed
    )
    y = simulate_fou(sample, params)
    x = simulate_fcir(y)
    with _open_out(opt["out"]) as fh:
        fh.write(_provenance(opt["seed"]) + "\n")
        fh.write("t,B,Y,X\n")
        for t, b, yv, xv in zip(grid.times, sample.values, y.values, x.values):
            fh.write(f"{t:.17g},{b:.17g},{yv:.17g},{xv:.17g}\n")
    print(json.dumps(x.tau.to_json()))
    return EXIT_OK


def cmd_cov_table(opt) -> int:
    spec = _quad_spec(opt["tol"])
    lattice = [(h, a, sig, t, s)
               for h in opt["H"] for a in opt["a"] for sig in opt["sigma"]
               for t in opt["t"] for s in opt["s"]]
    if not lattice:
        raise DomainError("covariance lattice is empty")
    with _open_out(opt["out"]) as fh:
        fh.write(_provenance(opt["seed"]) + "\n")
        fh.write("H,a,sigma,t,s,R,check\n")
        for h, a, sig, t, s in lattice:
            params = ModelParams(H=h, a=a, sigma=sig, y0=1.0)
            r = analytics.ou_cov(t, s, params, spec)
            if t == s:
                var = analytics.ou_var(t, params, spec)
                gap = abs(r - var) / (2.0 * (spec.rel_tol * abs(r) + spec.abs_tol))
                check = f"{gap:.6g}"
            else:
                check = ""
            fh.write(f"{h:.17g},{a:.17g},{sig:.17g},{t:.17g},{s:.17g},"
                     f"{r:.17g},{check}\n")
    return EXIT_OK


def cmd_sde_check(opt) -> int:
    kind = opt["kind"].replace("-", "_")
    params = ModelParams(H=opt["H"], a=opt["a"], sigma=opt["sigma"], y0=opt["y0"])
    grid = TimeGrid(opt["T"], int(opt["n_steps"]))
    seed = Seed(int(opt["seed"]))
    sample = (circulant_fbm if opt["generator"] == "circulant" else cholesky_fbm)(
        grid, params.H, seed
    )
    report = fcir.sde_residual(sample, params, integral_kind=kind,
                               coarsest_n=int(opt["coarsest"]))
    with _open_out(opt["out"]) as fh:
        report.write_csv(fh, comment=_provenance(opt["seed"]))
    resid = report.max_residuals
    monotone = bool(np.all(np.diff(resid[-3:]) < 0.0)) if resid.size >= 3 else True
    if not monotone:
        raise CheckFailure("residuals are not monotone over the last three meshes")
    if not resid[-1] <= float(opt["threshold"]):
        raise CheckFailure(
            f"final residual {resid[-1]:.3e} exceeds threshold {opt['threshold']}"
        )
    return EXIT_OK


def cmd_hitting(opt) -> int:
    params = ModelParams(H=opt["H"], a=opt["a"], sigma=opt["sigma"], y0=opt["y0"])
    if opt["bound_table"] is not None and not params.a > 0.0:
        raise DomainError("--bound-table requires a > 0")
    # zero crossings between nodes are missed, so estimates are biased low;
    # --refine re-runs at doubled resolution to expose that bias in the table
    resolutions = [int(opt["steps_per_unit"])]
    if opt["refine"]:
        resolutions.append(2 * resolutions[0])
    studies = [
        mc.hitting_study(params, opt["horizons"], int(opt["n_paths"]), spu,
                         Seed(int(opt["seed"])), generator=opt["generator"],
                         threads=opt["threads"])
        for spu in resolutions
    ]
    study = studies[-1]
    with _open_out(opt["out"]) as fh:
        fh.write(_provenance(opt["seed"]) + "\n")
        fh.write("T,estimate,stderr,n_paths,steps_per_unit\n")
        for one in studies:
            for T, est in zip(one.horizons, one.estimates):
                fh.write(f"{T:.17g},{est.mean:.17g},{est.stderr:.17g},"
                         f"{est.n_samples},{one.grid_steps}\n")
    if params.a > 0.0:
        bounds = analytics.BoundParams(C1=float(opt["C1"]))
        bound = analytics.tau_bound(params, bounds)
        top = study.estimates[-1].mean
        summary = {
            "bound": bound,
            "C1": bounds.C1,
            "bound_is_shape_only": bounds.C1 == 1.0,
            "largest_horizon_estimate": top,
            "ratio_estimate_to_bound_shape": top / bound if bound > 0.0 else math.inf,
        }
        print(json.dumps(summary))
        if opt["bound_table"] is not None:
            with open(opt["bound_table"], "w") as fh:
                analytics.write_bound_table(fh, [(params, bounds)],
                                            comment=_provenance(opt["seed"]))
    return EXIT_OK


def cmd_sup_tail(opt) -> int:
    estimates = mc.estimate_sup_tail(
        opt["a"], opt["H"], opt["levels"], opt["T"], int(opt["n_paths"]),
        int(opt["steps_per_unit"]), Seed(int(opt["seed"])),
        generator=opt["generator"], threads=opt["threads"],
        negate_noise=bool(opt["negate_noise"]),
    )
    with _open_out(opt["out"]) as fh:
        fh.write(_provenance(opt["seed"]) + "\n")
        fh.write("x,estimate,stderr\n")
        for x, est in zip(opt["levels"], estimates):
            fh.write(f"{x:.17g},{est.mean:.17g},{est.stderr:.17g}\n")
    return EXIT_OK


def cmd_validate(opt) -> int:
    results = validation.run_checks(seed=int(opt["seed"]),
                                    n_paths=int(opt["n_paths"]),
                                    threads=opt["threads"],
                                    full=bool(opt["full"]))
    if opt["sweep_out"] is not None:
        rows = validation.covariance_sweep(int(opt["seed"]), int(opt["n_paths"]),
                                           opt["threads"])
        with open(opt["sweep_out"], "w") as fh:
            mc.write_cov_sweep_csv(fh, rows, comment=_provenance(opt["seed"]))
    if opt["out"] is not None:
        with _open_out(opt["out"]) as fh:
            fh.write(_provenance(opt["seed"]) + "\n")
            fh.write("check,passed,detail\n")
            for r in results:
                fh.write(f"\"{r.name}\",{int(r.passed)},\"{r.detail}\"\n")
    failed = 0
    for r in results:
        tag = "PASS" if r.passed else "FAIL"
        failed += not r.passed
        print(f"[{tag}] {r.name}: {r.detail}")
    if failed:
        raise CheckFailure(f"{failed} of {len(results)} invariant checks failed")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "cov-table": cmd_cov_table,
    "sde-check": cmd_sde_check,
    "hitting": cmd_hitting,
    "sup-tail": cmd_sup_tail,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        options = merge_options(args)
        return COMMANDS[args.command](options)
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except _VALIDATION_ERRORS as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _RUNTIME_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
