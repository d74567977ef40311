"""Exception types shared across the package."""


class FcirLabError(Exception):
    """Base class for all fcir-lab errors."""


class DomainError(FcirLabError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ArgOrder(DomainError):
    """Time arguments were passed in the wrong order (expected s <= t)."""


class NonpositiveStart(DomainError):
    """A path that must start strictly positive does not."""


class HurstTooSmall(DomainError):
    """Riemann-Stieltjes integration requested with H <= 2/3."""


class HalfHurst(DomainError):
    """H = 1/2 makes the requested asymptotic expansion degenerate."""


class GridMismatch(FcirLabError, ValueError):
    """Two paths that must share a time grid do not."""


class CovarianceNotPD(FcirLabError, ArithmeticError):
    """Cholesky factorization of a covariance matrix hit a nonpositive pivot."""


class EmbeddingNotNonnegative(FcirLabError, ArithmeticError):
    """A circulant embedding produced an eigenvalue below tolerance."""


class ToleranceNotMet(FcirLabError, ArithmeticError):
    """Adaptive quadrature exhausted its subdivision budget."""
