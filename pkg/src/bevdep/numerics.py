"""Special functions, quadrature and root finding.

Thin, domain-checked wrappers around :mod:`scipy.special` plus a couple of
small deterministic routines (Simpson quadrature, bisection) that the rest of
the package relies on.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special


class DomainError(ValueError):
    """Argument outside the domain of a function."""


class BracketError(ValueError):
    """Root-finding target not enclosed by the bracket."""


class ConvergenceError(RuntimeError):
    """Iterative routine exhausted its iteration budget."""


@dataclass(frozen=True)
class ToleranceConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_iter: int = 200
    quadrature_points: int = 1001

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be >= 1")
        if self.quadrature_points < 3 or self.quadrature_points % 2 == 0:
            raise DomainError("quadrature_points must be odd and >= 3")


DEFAULT_TOL = ToleranceConfig()


def _scalar_or_array(x):
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


def _check_unit(x, name="x"):
    x = np.asarray(x, dtype=float)
    if np.any(~(x >= 0.0) | ~(x <= 1.0)):
        raise DomainError(f"{name} must lie in [0, 1]")
    return x


def _check_shapes(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(~(a > 0)) or np.any(~(b > 0)):
        raise DomainError("shape parameters must be positive")
    return a, b


def log_gamma(x):
    """Natural log of the gamma function for positive arguments."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("log_gamma requires x > 0")
    return _scalar_or_array(special.gammaln(x))


def beta_density(x, a, b):
    """Beta(a, b) density at ``x``.

    At the endpoints a zero exponent contributes a factor of one, so
    ``Be(0|1,b) = b`` and ``Be(1|a,1) = a``. Exponents below zero give ``inf``.
    """
    x = _check_unit(x)
    a, b = _check_shapes(a, b)
    # xlogy(0, 0) == 0 gives the finite endpoint limits
    logpdf = special.xlogy(a - 1.0, x) + special.xlog1py(b - 1.0, -x) - special.betaln(a, b)
    return _scalar_or_array(np.exp(logpdf))


def regularized_incomplete_beta(x, a, b):
    """Beta(a, b) distribution function ``B(x|a,b)``."""
    x = _check_unit(x)
    a, b = _check_shapes(a, b)
    return _scalar_or_array(special.betainc(a, b, x))


def std_normal_cdf(x):
    return _scalar_or_array(special.ndtr(np.asarray(x, dtype=float)))


def student_t_cdf(x, df):
    df = np.asarray(df, dtype=float)
    if np.any(~(df > 0)):
        raise DomainError("degrees of freedom must be positive")
    return _scalar_or_array(special.stdtr(df, np.asarray(x, dtype=float)))


def bisection_invert(f, target, lo, hi, tol=DEFAULT_TOL):
    """Solve ``f(x) = target`` for monotone ``f`` on ``[lo, hi]``.

    Stops when ``|f(x) - target| <= abs_tol`` or the bracket is narrower than
    ``rel_tol * |x| + abs_tol``.
    """
    flo = f(lo) - target
    fhi = f(hi) - target
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise BracketError(f"target {target!r} not bracketed by [{lo!r}, {hi!r}]")
    increasing = fhi > 0
    for _ in range(tol.max_iter):
        mid = 0.5 * (lo + hi)
        fmid = f(mid) - target
        if abs(fmid) <= tol.abs_tol or (hi - lo) <= tol.rel_tol * abs(mid) + tol.abs_tol:
            return mid
        if (fmid > 0) == increasing:
            hi = mid
        else:
            lo = mid
    raise ConvergenceError(f"bisection did not converge in {tol.max_iter} iterations")


def bisection_invert_vec(f, target, lo, hi, rel_tol=1e-12, abs_tol=0.0, max_iter=200):
    """Elementwise bisection for an increasing vectorised ``f``.

    ``lo``, ``hi`` and ``target`` broadcast together; every element must be
    bracketed. Iterates until every bracket is narrower than
    ``rel_tol * |x| + abs_tol``.
    """
    target, lo, hi = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (target, lo, hi)))
    lo = lo.copy()
    hi = hi.copy()
    if np.any(f(lo) > target) or np.any(f(hi) < target):
        raise BracketError("some targets are not bracketed")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        below = f(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= rel_tol * np.abs(mid) + abs_tol):
            return 0.5 * (lo + hi)
    raise ConvergenceError(f"vectorised bisection did not converge in {max_iter} iterations")


def simpson_weights(n, a=0.0, b=1.0):
    """Composite Simpson weights for ``n`` equispaced nodes on ``[a, b]``."""
    if n < 3 or n % 2 == 0:
        raise DomainError("Simpson's rule needs an odd number of points >= 3")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (b - a) / (3.0 * (n - 1))


def quadrature(f, a, b, n=DEFAULT_TOL.quadrature_points):
    """Composite Simpson estimate of the integral of ``f`` over ``[a, b]``.

    ``f`` is called once with the full node array.
    """
    if not a < b:
        raise DomainError("quadrature needs a < b")
    x = np.linspace(a, b, n)
    fx = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    if not np.all(np.isfinite(fx)):
        raise DomainError("integrand is not finite on the grid")
    return float(simpson_weights(n, a, b) @ fx)
