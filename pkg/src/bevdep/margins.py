"""GEV margins: distribution functions, maximum likelihood and the unit-Fréchet map."""

from dataclasses import dataclass
import math

import numpy as np
from scipy import optimize, special

from .numerics import DomainError

GUMBEL_EPS = 1e-8


class DegenerateDataError(ValueError):
    """Data cannot support a GEV fit (too short or constant)."""


class FitConvergenceError(RuntimeError):
    """The likelihood maximisation did not converge."""


@dataclass(frozen=True)
class GevParams:
    mu: float
    sigma: float
    xi: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"GEV scale must be positive, got {self.sigma!r}")

    def to_dict(self):
        return {"mu": float(self.mu), "sigma": float(self.sigma), "xi": float(self.xi)}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["mu"]), float(d["sigma"]), float(d["xi"]))


@dataclass(frozen=True)
class GevFit:
    params: GevParams
    se: GevParams | None
    loglik: float
    n: int

    def to_dict(self):
        d = self.params.to_dict()
        d["se"] = None if self.se is None else {
            "mu": self.se.mu, "sigma": self.se.sigma, "xi": self.se.xi}
        d["loglik"] = self.loglik
        d["n"] = self.n
        return d


def _out(x):
    return x.item() if x.ndim == 0 else x


def _gumbel(p):
    return abs(p.xi) < GUMBEL_EPS


def gev_cdf(p, z):
    s = (np.asarray(z, dtype=float) - p.mu) / p.sigma
    if _gumbel(p):
        return _out(np.exp(-np.exp(-s)))
    u = 1.0 + p.xi * s
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # log1p keeps full precision for small xi
        inside = np.exp(-np.exp(-np.log1p(np.where(u > 0, p.xi * s, 0.0)) / p.xi))
    # outside the support: below the lower endpoint (xi > 0) or above the upper one (xi < 0)
    outside = 0.0 if p.xi > 0 else 1.0
    return _out(np.where(u > 0, inside, outside))


def gev_pdf(p, z):
    s = (np.asarray(z, dtype=float) - p.mu) / p.sigma
    if _gumbel(p):
        return _out(np.exp(-s - np.exp(-s)) / p.sigma)
    u = 1.0 + p.xi * s
    if np.any(~(u > 0)):
        raise DomainError("z outside the GEV support")
    lu = np.log1p(p.xi * s)
    return _out(np.exp(-(1.0 / p.xi + 1.0) * lu - np.exp(-lu / p.xi)) / p.sigma)


def gev_quantile(p, q):
    q = np.asarray(q, dtype=float)
    if np.any(~(q > 0)) or np.any(~(q < 1)):
        raise DomainError("quantile level must lie in (0, 1)")
    if _gumbel(p):
        return _out(p.mu - p.sigma * np.log(-np.log(q)))
    return _out(p.mu + p.sigma * np.expm1(-p.xi * np.log(-np.log(q))) / p.xi)


def to_unit_frechet(p, z):
    """Map data-scale values to unit-Fréchet: ``(1 + xi (z - mu) / sigma) ** (1 / xi)``."""
    s = (np.asarray(z, dtype=float) - p.mu) / p.sigma
    if _gumbel(p):
        return _out(np.exp(s))
    u = 1.0 + p.xi * s
    if np.any(~(u > 0)):
        raise DomainError("value outside the GEV support")
    return _out(np.exp(np.log1p(p.xi * s) / p.xi))


def from_unit_frechet(p, y):
    y = np.asarray(y, dtype=float)
    if np.any(~(y > 0)):
        raise DomainError("unit-Fréchet values must be positive")
    if _gumbel(p):
        return _out(p.mu + p.sigma * np.log(y))
    return _out(p.mu + p.sigma * np.expm1(p.xi * np.log(y)) / p.xi)


def gev_negloglik(theta, x):
    """Negative GEV log-likelihood at ``theta = (mu, sigma, xi)``; ``inf`` off-support."""
    mu, sigma, xi = theta
    if not sigma > 0:
        return np.inf
    s = (x - mu) / sigma
    if abs(xi) < GUMBEL_EPS:
        return float(len(x) * math.log(sigma) + np.sum(s) + np.sum(np.exp(-s)))
    u = 1.0 + xi * s
    if np.any(u <= 0):
        return np.inf
    logu = np.log(u)
    return float(len(x) * math.log(sigma) + (1.0 + 1.0 / xi) * np.sum(logu)
                 + np.sum(np.exp(-logu / xi)))


def pwm_start(x):
    """Probability-weighted-moment estimates (Hosking's approximation)."""
    x = np.sort(np.asarray(x, dtype=float))
    n = len(x)
    i = np.arange(n)
    b0 = x.mean()
    b1 = np.sum(i / (n - 1) * x) / n
    b2 = np.sum(i * (i - 1) / ((n - 1) * (n - 2)) * x) / n
    c = (2 * b1 - b0) / (3 * b2 - b0) - math.log(2) / math.log(3)
    kh = 7.8590 * c + 2.9554 * c * c
    if abs(kh) < 1e-6:
        sigma = (2 * b1 - b0) / math.log(2)
        return GevParams(b0 - 0.5772156649 * sigma, sigma, 0.0)
    g = math.exp(special.gammaln(1 + kh))
    sigma = (2 * b1 - b0) * kh / (g * (1 - 2.0 ** (-kh)))
    mu = b0 + sigma * (g - 1) / kh
    return GevParams(mu, sigma, -kh)


def _hessian(f, x, rel_step=1e-4):
    x = np.asarray(x, dtype=float)
    h = rel_step * np.maximum(np.abs(x), 1.0)
    n = len(x)
    H = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            ei = np.zeros(n)
            ej = np.zeros(n)
            ei[i] = h[i]
            ej[j] = h[j]
            val = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * h[i] * h[j])
            H[i, j] = H[j, i] = val
    return H


def gev_fit_mle(data, max_iter=20000):
    """Maximum likelihood GEV fit by Nelder-Mead from PWM starting values.

    The data are standardised before optimising so the simplex works on
    unit-scale parameters; standard errors come from a finite-difference
    Hessian of the negative log-likelihood.
    """
    x = np.asarray(data, dtype=float)
    if x.ndim != 1 or len(x) < 10:
        raise DegenerateDataError("need at least 10 observations")
    if not np.all(np.isfinite(x)):
        raise DegenerateDataError("data contain non-finite values")
    centre, scale = x.mean(), x.std()
    if not scale > 0:
        raise DegenerateDataError("data have zero variance")
    xs = (x - centre) / scale

    start = pwm_start(xs)
    xi0 = float(np.clip(start.xi, -0.9, 0.9))
    theta0 = np.array([start.mu, math.log(start.sigma), xi0])
    # nudge the start inside the support if PWM landed outside it
    for _ in range(50):
        if np.isfinite(gev_negloglik((theta0[0], math.exp(theta0[1]), theta0[2]), xs)):
            break
        theta0[2] *= 0.5
        theta0[1] += 0.2

    def objective(th):
        return gev_negloglik((th[0], math.exp(th[1]), th[2]), xs)

    res = optimize.minimize(objective, theta0, method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": max_iter,
                                     "maxfev": 2 * max_iter})
    if not res.success or not np.isfinite(res.fun):
        raise FitConvergenceError(f"GEV likelihood maximisation failed: {res.message}")
    mu_s, sigma_s, xi = res.x[0], math.exp(res.x[1]), res.x[2]
    params = GevParams(centre + scale * mu_s, scale * sigma_s, xi)
    loglik = -res.fun - len(x) * math.log(scale)

    se = None
    try:
        H = _hessian(lambda th: gev_negloglik(th, x), [params.mu, params.sigma, params.xi])
        cov = np.linalg.inv(H)
        var = np.diag(cov)
        if np.all(var > 0) and np.all(np.isfinite(var)):
            s = np.sqrt(var)
            se = GevParams(float(s[0]), float(s[1]), float(s[2]))
    except np.linalg.LinAlgError:
        pass
    return GevFit(params, se, float(loglik), len(x))
