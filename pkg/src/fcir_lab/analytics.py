"""Closed-form second-order analytics of the fractional Ornstein-Uhlenbeck
process and the derived hitting-probability bounds.

Everything reduces to integrals of the kernel family ``z^{2H-1} e^{rate*z}``
(plus a constant exponential shift folded into the integrand for numerical
range safety).  The kernel has an integrable endpoint singularity at 0 for
H < 1/2, which :func:`quad` removes by the substitution ``z = u^{1/(p+1)}``
before handing the integrand to an adaptive Gauss-Kronrod routine.

Covariances are of the centered process, i.e. of ``Y_t - y0 e^{at}``; the
start value never enters them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate

from .errors import ArgOrder, DomainError, HalfHurst, ToleranceNotMet
from .fbm import fbm_cov, _hurst
from .fou import ModelParams

__all__ = [
    "QuadSpec",
    "BoundParams",
    "DEFAULT_QUAD",
    "quad",
    "gamma_fn",
    "power_exp_integral",
    "ou_cov",
    "ou_var",
    "j_cov",
    "j_var",
    "j_increment_var",
    "v_limit",
    "vtsq_derivative",
    "sup_tail_bound",
    "tau_bound",
    "ou_cov_asymptotic",
    "write_bound_table",
    "SUP_BOUND_VARIANTS",
]


@dataclass(frozen=True)
class QuadSpec:
    """Tolerances and subdivision budget for all quadrature evaluations."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be at least 1")


DEFAULT_QUAD = QuadSpec()


@dataclass(frozen=True)
class BoundParams:
    """User-supplied constants of the sup-tail and hitting bounds.

    The underlying inequalities only assert that such constants exist; with
    the defaults the results are shape-only bounds.
    """

    C: float = 1.0
    C1: float = 1.0

    def __post_init__(self):
        if not (self.C > 0.0 and self.C1 > 0.0):
            raise DomainError("bound constants must be strictly positive")


def quad(f, lo: float, hi: float, spec: QuadSpec | None = None,
         singularity_exponent: float = 0.0) -> float:
    """Adaptive integral of ``f`` on [lo, hi].

    ``singularity_exponent`` declares a power behavior ``(z-lo)^p`` of the
    integrand at the left endpoint; for -1 < p < 0 the substitution
    ``z = lo + u^{1/(p+1)}`` makes the transformed integrand bounded, for
    p >= 0 it is a no-op.  ``f`` is only ever evaluated at interior points.

    Raises :class:`ToleranceNotMet` when the subdivision budget is exhausted.
    """
    spec = spec or DEFAULT_QUAD
    p = float(singularity_exponent)
    if p <= -1.0:
        raise DomainError(f"singularity exponent must exceed -1, got {p}")
    if hi < lo:
        raise DomainError(f"integration bounds out of order: [{lo}, {hi}]")
    if hi == lo:
        return 0.0

    if p < 0.0:
        power = 1.0 / (p + 1.0)

        def integrand(u, _f=f, _lo=lo, _q=power):
            return _f(_lo + u**_q) * (_q * u ** (_q - 1.0))

        a, b = 0.0, (hi - lo) ** (p + 1.0)
    else:
        integrand, a, b = f, lo, hi

    result = scipy.integrate.quad(
        integrand, a, b,
        epsabs=spec.abs_tol, epsrel=spec.rel_tol,
        limit=spec.max_subdivisions, full_output=1,
    )
    if len(result) > 3:
        raise ToleranceNotMet(
            f"quadrature on [{lo}, {hi}] did not converge: {result[3]}"
        )
    return float(result[0])


def gamma_fn(x: float) -> float:
    """Euler gamma function for x > 0."""
    if not x > 0.0:
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


def power_exp_integral(lo: float, hi: float, rate: float, H,
                       spec: QuadSpec | None = None, shift: float = 0.0) -> float:
    """Kernel integral of ``z^{2H-1} e^{rate*z + shift}`` on [lo, hi].

    The exponential shift stays inside the integrand so that large
    prefactors never overflow on the way in.
    """
    h = _hurst(H)
    p = 2.0 * h - 1.0

    def f(z, _p=p, _r=rate, _s=shift):
        return z**_p * math.exp(_r * z + _s)

    exponent = p if lo == 0.0 else 0.0
    return quad(f, lo, hi, spec, singularity_exponent=exponent)


def ou_cov(t: float, s: float, params: ModelParams,
           spec: QuadSpec | None = None) -> float:
    """Covariance of the centered fOU process at times (t, s), any order.

    Five kernel integrals assemble the value; at a = 0 the process is
    ``y0 + sigma B^H`` and the fBm covariance is used directly.
    """
    t, s = float(t), float(s)
    if t < 0.0 or s < 0.0:
        raise DomainError("ou_cov requires t >= 0 and s >= 0")
    a, sig, h = params.a, params.sigma, params.hurst
    if a == 0.0:
        return sig**2 * fbm_cov(t, s, h)
    u = abs(t - s)
    mn, mx = min(t, s), max(t, s)
    total = (
        -power_exp_integral(0.0, u, -a, h, spec, shift=a * u)
        + power_exp_integral(u, mx, a, h, spec, shift=-a * u)
        - power_exp_integral(mn, mx, -a, h, spec, shift=a * (t + s))
        + power_exp_integral(0.0, mn, a, h, spec, shift=a * u)
        + 2.0 * power_exp_integral(0.0, mx, -a, h, spec, shift=a * (t + s))
    )
    return 0.5 * h * sig**2 * total


def ou_var(t: float, params: ModelParams, spec: QuadSpec | None = None) -> float:
    """Variance of the centered fOU process at time t."""
    t = float(t)
    if t < 0.0:
        raise DomainError("ou_var requires t >= 0")
    if t == 0.0:
        return 0.0
    a, sig, h = params.a, params.sigma, params.hurst
    if a == 0.0:
        return sig**2 * t ** (2.0 * h)
    return h * sig**2 * (
        power_exp_integral(0.0, t, a, h, spec)
        + power_exp_integral(0.0, t, -a, h, spec, shift=2.0 * a * t)
    )


def j_cov(s: float, t: float, a: float, H, spec: QuadSpec | None = None) -> float:
    """Covariance of the driving integral J at ordered times s <= t."""
    s, t = float(s), float(t)
    if s < 0.0:
        raise DomainError("j_cov requires s >= 0")
    if s > t:
        raise ArgOrder(f"j_cov requires s <= t, got s={s} > t={t}")
    h = _hurst(H)
    a = float(a)
    if a == 0.0:
        return fbm_cov(s, t, h)
    return (
        -0.5 * h * power_exp_integral(0.0, t - s, -a, h, spec, shift=-2.0 * a * s)
        + 0.5 * h * power_exp_integral(t - s, t, a, h, spec, shift=-2.0 * a * t)
        - 0.5 * h * power_exp_integral(s, t, -a, h, spec)
        + 0.5 * h * power_exp_integral(0.0, s, a, h, spec, shift=-2.0 * a * s)
        + h * power_exp_integral(0.0, t, -a, h, spec)
    )


def j_var(t: float, a: float, H, spec: QuadSpec | None = None) -> float:
    """Variance of the driving integral J at time t."""
    t = float(t)
    if t < 0.0:
        raise DomainError("j_var requires t >= 0")
    if t == 0.0:
        return 0.0
    h = _hurst(H)
    a = float(a)
    if a == 0.0:
        return t ** (2.0 * h)
    return h * (
        power_exp_integral(0.0, t, a, h, spec, shift=-2.0 * a * t)
        + power_exp_integral(0.0, t, -a, h, spec)
    )


def j_increment_var(s: float, t: float, a: float, H,
                    spec: QuadSpec | None = None) -> float:
    """Second moment of the increment J_t - J_s for ordered times s <= t."""
    s, t = float(s), float(t)
    if s < 0.0:
        raise DomainError("j_increment_var requires s >= 0")
    if s > t:
        raise ArgOrder(f"j_increment_var requires s <= t, got s={s} > t={t}")
    if s == t:
        return 0.0
    h = _hurst(H)
    a = float(a)
    if a == 0.0:
        return (t - s) ** (2.0 * h)
    return h * (
        power_exp_integral(0.0, t - s, a, h, spec, shift=-2.0 * a * t)
        + power_exp_integral(0.0, t - s, -a, h, spec, shift=-2.0 * a * s)
    )


def v_limit(a: float, H) -> float:
    """Large-time limit H*Gamma(2H)/a^{2H} of Var J_t, which is also its
    supremum over all t >= 0 (requires a > 0)."""
    if not a > 0.0:
        raise DomainError(f"v_limit requires a > 0, got {a}")
    h = _hurst(H)
    return h * gamma_fn(2.0 * h) / a ** (2.0 * h)


def vtsq_derivative(t: float, a: float, H, spec: QuadSpec | None = None) -> float:
    """d/dt of Var J_t, 2H*(t^{2H-1} e^{-at} - a e^{-2at} int_0^t z^{2H-1} e^{az} dz)."""
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"vtsq_derivative requires t > 0, got {t}")
    if not a > 0.0:
        raise DomainError(f"vtsq_derivative requires a > 0, got {a}")
    h = _hurst(H)
    first = t ** (2.0 * h - 1.0) * math.exp(-a * t)
    second = a * power_exp_integral(0.0, t, a, h, spec, shift=-2.0 * a * t)
    return 2.0 * h * (first - second)


#: The two proven shapes of the sup-tail inequality
#: P(sup_{t>=0} J_t >= x) <= const * x^alpha * exp(-x^2 / (2 v^2)):
#: "direct" has alpha = 1/H - 1 with constant C, "comparison" (obtained
#: through a stationary-process comparison) has alpha = 1/H - 2 with C1.
SUP_BOUND_VARIANTS = ("direct", "comparison")


def sup_tail_bound(x: float, a: float, H, bounds: BoundParams,
                   variant: str = "comparison") -> float:
    """Value of the chosen sup-tail bound at level x > 0."""
    if not x > 0.0:
        raise DomainError(f"sup_tail_bound requires x > 0, got {x}")
    if not a > 0.0:
        raise DomainError(f"sup_tail_bound requires a > 0, got {a}")
    h = _hurst(H)
    v2 = v_limit(a, h)
    if variant == "direct":
        const, alpha = bounds.C, 1.0 / h - 1.0
    elif variant == "comparison":
        const, alpha = bounds.C1, 1.0 / h - 2.0
    else:
        raise DomainError(
            f"variant must be one of {SUP_BOUND_VARIANTS}, got {variant!r}"
        )
    return const * x**alpha * math.exp(-(x**2) / (2.0 * v2))


def tau_bound(params: ModelParams, bounds: BoundParams) -> float:
    """Upper bound C1 (y0/sigma)^{1/H-2} exp(-a^{2H} y0^2 / (sigma^2 Gamma(2H+1)))
    for the probability that the fOU path ever hits zero (a > 0, y0 > 0)."""
    if not params.a > 0.0:
        raise DomainError(f"tau_bound requires a > 0, got {params.a}")
    if not params.y0 > 0.0:
        raise DomainError(f"tau_bound requires y0 > 0, got {params.y0}")
    h = params.hurst
    x = params.y0 / params.sigma
    exponent = params.a ** (2.0 * h) * params.y0**2 / (
        params.sigma**2 * gamma_fn(2.0 * h + 1.0)
    )
    return bounds.C1 * x ** (1.0 / h - 2.0) * math.exp(-exponent)


def write_bound_table(stream, entries, comment: str | None = None):
    """Write a `H,a,sigma,y0,C1,bound` CSV for (ModelParams, BoundParams) rows."""
    if comment is not None:
        stream.write(comment.rstrip("\n") + "\n")
    stream.write("H,a,sigma,y0,C1,bound\n")
    for params, bounds in entries:
        value = tau_bound(params, bounds)
        stream.write(
            f"{params.hurst:.17g},{params.a:.17g},{params.sigma:.17g},"
            f"{params.y0:.17g},{bounds.C1:.17g},{value:.17g}\n"
        )


def _tail_cutoff(c: float, h: float, abs_tol: float) -> float:
    """Doubling search for u with e^{-u} (c+u)^{2H-2} below abs_tol."""
    u = 1.0
    while math.exp(-u) * (c + u) ** (2.0 * h - 2.0) >= abs_tol:
        u *= 2.0
    return u


def ou_cov_asymptotic(t: float, s: float, params: ModelParams,
                      spec: QuadSpec | None = None) -> float:
    """Leading large-lag term of ou_cov(t+s, t) for a < 0 and H != 1/2.

    The remainder of the full covariance is O(e^{as}) as s grows.  Each
    infinite integral is truncated where its integrand drops below the
    quadrature absolute tolerance; exponential prefactors are absorbed by
    the substitution y = c -+ u so everything stays in range.
    """
    spec = spec or DEFAULT_QUAD
    if not params.a < 0.0:
        raise DomainError(f"ou_cov_asymptotic requires a < 0, got {params.a}")
    h = params.hurst
    if h == 0.5:
        raise HalfHurst("the leading coefficient vanishes at H = 1/2")
    t, s = float(t), float(s)
    if not t > 0.0:
        raise DomainError("ou_cov_asymptotic requires t > 0")
    b = -params.a
    if not b * s > 1.0:
        raise DomainError(
            f"ou_cov_asymptotic requires -a*s > 1, got {b * s}"
        )

    q = 2.0 * h - 2.0

    def grow_part(c):
        # e^{-c} int_1^c e^y y^{2H-2} dy  via  y = c - u
        return quad(lambda u: math.exp(-u) * (c - u) ** q, 0.0, c - 1.0, spec)

    def decay_part(c):
        # e^{c} int_c^inf e^{-y} y^{2H-2} dy  via  y = c + u
        cutoff = _tail_cutoff(c, h, spec.abs_tol)
        return quad(lambda u: math.exp(-u) * (c + u) ** q, 0.0, cutoff, spec)

    near = grow_part(b * s) + decay_part(b * s)
    far = grow_part(b * (t + s)) + decay_part(b * (t + s))
    coef = params.sigma**2 * h * (2.0 * h - 1.0) / (2.0 * b ** (2.0 * h))
    return coef * (near - math.exp(params.a * t) * far)
