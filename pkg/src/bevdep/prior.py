"""Prior on the polynomial order and the angular coefficients.

The order ``k >= 3`` gets a shifted Poisson or negative binomial prior. Given
``k``, the vertex mass ``p0`` is uniform on ``[0, 1/2]``, ``p1`` is uniform on
the range that keeps the constraints satisfiable, and each interior
coefficient is uniform on the widest interval that keeps the ordering and the
sum ``k/2`` reachable. The second-to-last coefficient is always forced by the
sum constraint.
"""

from dataclasses import dataclass
import math

from .extremal import AngularCoefficients, validate_angular, validate_pickands

K_MIN = 3
FEASIBILITY_TOL = 1e-12


class InfeasiblePrefixError(ValueError):
    """No admissible value remains for the next coefficient."""


@dataclass(frozen=True)
class PoissonPrior:
    """``k - 3 ~ Poisson(kappa)``."""

    kappa: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("Poisson mean must be positive")

    def logpmf(self, k):
        x = k - K_MIN
        if x < 0:
            return -math.inf
        return x * math.log(self.kappa) - self.kappa - math.lgamma(x + 1)

    def sample(self, rng):
        return K_MIN + int(rng.poisson(self.kappa))

    def mode(self):
        return K_MIN + int(math.floor(self.kappa))

    def to_dict(self):
        return {"family": "poisson", "kappa": self.kappa}

    def spec(self):
        return f"poisson:{self.kappa!r}"


@dataclass(frozen=True)
class NegBinPrior:
    """``k - 3`` negative binomial with mean ``kappa`` and variance ``sigma2``.

    Uses the pmf ``Gamma(x+s) / (Gamma(s) x!) p^s (1-p)^x`` with
    ``p = kappa / sigma2`` and ``s = kappa^2 / (sigma2 - kappa)``.
    """

    kappa: float
    sigma2: float

    def __post_init__(self):
        if not (self.kappa > 0 and self.sigma2 > self.kappa):
            raise ValueError("negative binomial prior needs sigma2 > kappa > 0")

    @property
    def p(self):
        return self.kappa / self.sigma2

    @property
    def s(self):
        return self.kappa ** 2 / (self.sigma2 - self.kappa)

    def logpmf(self, k):
        x = k - K_MIN
        if x < 0:
            return -math.inf
        s, p = self.s, self.p
        return (math.lgamma(x + s) - math.lgamma(s) - math.lgamma(x + 1)
                + s * math.log(p) + x * math.log1p(-p))

    def sample(self, rng):
        return K_MIN + int(rng.negative_binomial(self.s, self.p))

    def mode(self):
        s, p = self.s, self.p
        return K_MIN + (int(math.floor((s - 1) * (1 - p) / p)) if s > 1 else 0)

    def to_dict(self):
        return {"family": "negbin", "kappa": self.kappa, "sigma2": self.sigma2}

    def spec(self):
        return f"negbin:{self.kappa!r},{self.sigma2!r}"


def parse_k_prior(text):
    """Parse ``poisson:7`` or ``negbin:3.2,4.48``."""
    family, _, args = text.partition(":")
    try:
        values = [float(v) for v in args.split(",")] if args else []
    except ValueError as exc:
        raise ValueError(f"bad k-prior spec {text!r}") from exc
    family = family.strip().lower()
    if family == "poisson" and len(values) == 1:
        return PoissonPrior(values[0])
    if family in ("negbin", "nbin") and len(values) == 2:
        return NegBinPrior(*values)
    raise ValueError(f"bad k-prior spec {text!r}")


def prior_from_dict(d):
    if d["family"] == "poisson":
        return PoissonPrior(float(d["kappa"]))
    if d["family"] == "negbin":
        return NegBinPrior(float(d["kappa"]), float(d["sigma2"]))
    raise ValueError(f"unknown prior family {d['family']!r}")


def k_prior_pmf(cfg, k):
    if k < K_MIN:
        raise ValueError(f"k must be >= {K_MIN}")
    return math.exp(cfg.logpmf(k))


def sample_k(cfg, rng):
    return cfg.sample(rng)


def sample_p0(rng):
    return rng.uniform(0.0, 0.5)


def p1_bounds(k, p0):
    a = max(0.0, (k - 1) * p0 - k / 2.0 + 1.0)
    b = (p0 + k / 2.0 - 1.0) / (k - 1)
    return a, max(a, b)


def _interval(lo, hi, what):
    if hi < lo - FEASIBILITY_TOL:
        raise InfeasiblePrefixError(f"{what}: empty interval [{lo!r}, {hi!r}]")
    return lo, max(lo, hi)


def eta_interval(j, k, eta_prefix, eta_last):
    """Admissible range for ``eta[j]`` given ``eta[0..j-1]`` and ``eta[k-1]``."""
    if not 1 <= j <= k - 2:
        raise ValueError("j must satisfy 1 <= j <= k - 2")
    if len(eta_prefix) != j:
        raise ValueError("prefix must hold eta[0..j-1]")
    p1 = 1.0 - eta_last
    total = math.fsum(eta_prefix)
    lo = max(eta_prefix[-1], k / 2.0 + (k - j - 1) * (p1 - 1.0) - total)
    hi = min(1.0 - p1, (k / 2.0 + p1 - 1.0 - total) / (k - j - 1))
    return _interval(lo, hi, f"eta[{j}]")


def beta_interval(j, k, beta_prefix, beta_km1):
    """Admissible range for ``beta[j]`` given ``beta[0..j-1]`` and ``beta[k-1]``."""
    if not 2 <= j <= k - 2:
        raise ValueError("j must satisfy 2 <= j <= k - 2")
    if len(beta_prefix) != j:
        raise ValueError("prefix must hold beta[0..j-1]")
    lo = max(2.0 * beta_prefix[-1] - beta_prefix[-2], (k - j) * beta_km1 - (k - j - 1))
    hi = (beta_km1 + (k - j - 1) * beta_prefix[-1]) / (k - j)
    return _interval(lo, hi, f"beta[{j}]")


def draw_eta(k, u):
    """Coefficients from ``k`` uniforms on [0, 1); the sequential prior by inversion.

    ``u[0]`` sets ``p0``, ``u[1]`` sets ``p1`` and ``u[j + 1]`` sets
    ``eta[j]`` for ``1 <= j <= k - 3``; ``u[k - 1]`` is unused.
    """
    return _draw(k, 0.5 * u[0], None, u)


def _draw(k, p0, p1, u):
    if p1 is None:
        a, b = p1_bounds(k, p0)
        p1 = a + (b - a) * u[1]
    last = 1.0 - p1
    eta = [p0]
    total = p0
    half = 0.5 * k
    for j in range(1, k - 1):
        lo = half + (k - j - 1) * (p1 - 1.0) - total
        if lo < eta[-1]:
            lo = eta[-1]
        if j == k - 2:
            # the sum constraint pins the last free coefficient
            v = half - last - total
            v = min(max(v, lo), last)
        else:
            hi = (half + p1 - 1.0 - total) / (k - j - 1)
            if hi > last:
                hi = last
            if hi < lo:
                hi = lo
            v = lo + (hi - lo) * u[j + 1]
        eta.append(v)
        total += v
    eta.append(last)
    return eta


def sample_eta(cfg, k, rng, p0=None, p1=None):
    """Draw angular coefficients of order ``k`` from the conditional prior.

    ``cfg`` is accepted for symmetry with the other prior functions; the
    conditional prior does not depend on the order prior. ``p0``/``p1`` fix the
    vertex masses when given.
    """
    if k < K_MIN:
        raise ValueError(f"k must be >= {K_MIN}")
    u = rng.random(k)
    if p0 is None:
        p0 = 0.5 * u[0]
    if p1 is not None:
        a, b = p1_bounds(k, p0)
        if not a - FEASIBILITY_TOL <= p1 <= b + FEASIBILITY_TOL:
            raise InfeasiblePrefixError(f"p1={p1!r} outside [{a!r}, {b!r}] for p0={p0!r}")
    return AngularCoefficients(_draw(k, p0, p1, u))


def _log_uniform(value, lo, hi, point_tol=FEASIBILITY_TOL):
    if value < lo - FEASIBILITY_TOL or value > hi + FEASIBILITY_TOL:
        return -math.inf
    width = hi - lo
    return 0.0 if width <= point_tol else -math.log(width)


def prior_logdensity_eta(cfg, c):
    """``log Pi(k) + log Pi(eta | k)``; ``-inf`` outside the valid set.

    Degenerate (single point) intervals contribute zero.
    """
    if not validate_angular(c):
        return -math.inf
    k = c.k
    eta = c.eta.tolist()
    lp = cfg.logpmf(k) + math.log(2.0)
    a, b = p1_bounds(k, eta[0])
    lp += _log_uniform(c.p1, a, b)
    for j in range(1, k - 1):
        try:
            lo, hi = eta_interval(j, k, eta[:j], eta[-1])
        except InfeasiblePrefixError:
            return -math.inf
        lp += _log_uniform(eta[j], lo, hi)
    return lp


def prior_logdensity_beta(cfg, c):
    """Prior log density of Pickands coefficients, using the intervals on ``beta``.

    Equals the angular version plus ``(k - 3) log(k / 2)`` whenever no
    interval is degenerate, the Jacobian of the linear coefficient map.
    """
    if not validate_pickands(c):
        return -math.inf
    k = c.k
    beta = c.beta.tolist()
    p0, p1 = c.p0, c.p1
    lp = cfg.logpmf(k) + math.log(2.0)
    a, b = p1_bounds(k, p0)
    lp += _log_uniform(p1, a, b)
    # beta intervals are the eta intervals scaled by 2/k; scale the point
    # cutoff too so both parametrisations agree on which intervals are points
    point_tol = FEASIBILITY_TOL * 2.0 / k
    for j in range(2, k - 1):
        try:
            lo, hi = beta_interval(j, k, beta[:j], beta[k - 1])
        except InfeasiblePrefixError:
            return -math.inf
        lp += _log_uniform(beta[j], lo, hi, point_tol)
    return lp
