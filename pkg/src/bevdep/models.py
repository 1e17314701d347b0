"""Parametric dependence models used as ground truth and for simulation.

Four families, each with a closed-form Pickands function on the convention
``L(x1, x2) = (x1 + x2) A(x2 / (x1 + x2))``:

* symmetric logistic ``SL(alpha)``
* asymmetric logistic ``AL(alpha, tau1, tau2)``
* Husler-Reiss ``HR(lam)``
* extremal-t ``ET(omega, nu)``

Samples are drawn on the unit-Fréchet scale by inverting the conditional
distribution of the second coordinate given the first.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import special

from .likelihood import FrechetSample
from .numerics import DomainError, bisection_invert_vec, quadrature

LOG_Y_BRACKET = (math.log(1e-8), math.log(1e12))


class ModelSpecError(ValueError):
    """Unknown model family or parameters outside their range."""


def _unit(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t >= 0)) or np.any(~(t <= 1)):
        raise DomainError("t must lie in [0, 1]")
    return t


def _out(x):
    return x.item() if np.ndim(x) == 0 else x


class DependenceModel:
    """Common interface: ``pickands`` and its first derivative ``pickands_d1``."""

    name = ""

    def pickands(self, t):
        t = _unit(t)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return _out(self._A(t))

    def pickands_d1(self, t):
        t = _unit(t)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return _out(self._dA(t))

    def spec(self):
        args = ",".join(repr(float(v)) for v in self.params())
        return f"{self.name}:{args}"


@dataclass(frozen=True)
class SymmetricLogistic(DependenceModel):
    alpha: float
    name = "sl"

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ModelSpecError("SL needs 0 < alpha <= 1")

    def params(self):
        return (self.alpha,)

    def _A(self, t):
        r = 1.0 / self.alpha
        return ((1 - t) ** r + t ** r) ** self.alpha

    def _dA(self, t):
        r = 1.0 / self.alpha
        s = (1 - t) ** r + t ** r
        return s ** (self.alpha - 1) * (t ** (r - 1) - (1 - t) ** (r - 1))


@dataclass(frozen=True)
class AsymmetricLogistic(DependenceModel):
    alpha: float
    tau1: float
    tau2: float
    name = "al"

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ModelSpecError("AL needs 0 < alpha <= 1")
        if not (0 <= self.tau1 <= 1 and 0 <= self.tau2 <= 1):
            raise ModelSpecError("AL needs tau1, tau2 in [0, 1]")

    def params(self):
        return (self.alpha, self.tau1, self.tau2)

    def _A(self, t):
        a, t1, t2 = self.alpha, self.tau1, self.tau2
        r = 1.0 / a
        return (1 - t1) * (1 - t) + (1 - t2) * t + ((t1 * (1 - t)) ** r + (t2 * t) ** r) ** a

    def _dA(self, t):
        a, t1, t2 = self.alpha, self.tau1, self.tau2
        r = 1.0 / a
        s = (t1 * (1 - t)) ** r + (t2 * t) ** r
        inner = t2 ** r * t ** (r - 1) - t1 ** r * (1 - t) ** (r - 1)
        term = np.where(s > 0, np.where(s > 0, s, 1.0) ** (a - 1) * inner, 0.0)
        return t1 - t2 + term


@dataclass(frozen=True)
class HuslerReiss(DependenceModel):
    lam: float
    name = "hr"

    def __post_init__(self):
        if not self.lam > 0:
            raise ModelSpecError("HR needs lambda > 0")

    def params(self):
        return (self.lam,)

    def _args(self, t):
        lg = np.log(t) - np.log1p(-t)
        return self.lam - lg / (2 * self.lam), self.lam + lg / (2 * self.lam)

    def _A(self, t):
        z1, z2 = self._args(t)
        return (1 - t) * special.ndtr(z1) + t * special.ndtr(z2)

    def _dA(self, t):
        # the density terms of the product rule cancel
        z1, z2 = self._args(t)
        return special.ndtr(z2) - special.ndtr(z1)


@dataclass(frozen=True)
class ExtremalT(DependenceModel):
    omega: float
    nu: float
    name = "et"

    def __post_init__(self):
        if not -1 < self.omega < 1:
            raise ModelSpecError("ET needs -1 < omega < 1")
        if not self.nu > 0:
            raise ModelSpecError("ET needs nu > 0")

    def params(self):
        return (self.omega, self.nu)

    def _args(self, t):
        c = math.sqrt((self.nu + 1) / (1 - self.omega ** 2))
        lg = (np.log(t) - np.log1p(-t)) / self.nu
        return c * (np.exp(-lg) - self.omega), c * (np.exp(lg) - self.omega)

    def _A(self, t):
        z1, z2 = self._args(t)
        df = self.nu + 1
        return (1 - t) * special.stdtr(df, z1) + t * special.stdtr(df, z2)

    def _dA(self, t):
        # as for HR, the density terms cancel
        z1, z2 = self._args(t)
        df = self.nu + 1
        return special.stdtr(df, z2) - special.stdtr(df, z1)


_FAMILIES = {
    "sl": (SymmetricLogistic, 1),
    "al": (AsymmetricLogistic, 3),
    "hr": (HuslerReiss, 1),
    "et": (ExtremalT, 2),
}


def parse_model(text):
    """Parse ``sl:0.45``, ``al:0.6,0.3,0.8``, ``hr:1.2`` or ``et:0.8,2``."""
    family, _, args = text.partition(":")
    entry = _FAMILIES.get(family.strip().lower())
    if entry is None:
        raise ModelSpecError(f"unknown model family in {text!r}")
    cls, nargs = entry
    try:
        values = [float(v) for v in args.split(",")] if args else []
    except ValueError as exc:
        raise ModelSpecError(f"bad model parameters in {text!r}") from exc
    if len(values) != nargs:
        raise ModelSpecError(f"{family} takes {nargs} parameter(s), got {len(values)}")
    return cls(*values)


def true_pickands(m, t):
    return m.pickands(t)


def true_point_masses(m):
    """Vertex masses ``{1 + A'(0)}/2`` and ``{1 - A'(1)}/2``.

    Uses the closed-form one-sided derivatives at the endpoints; difference
    quotients converge too slowly for logistic models with alpha near one.
    """
    d0, d1 = np.asarray(m.pickands_d1(np.array([0.0, 1.0])))
    return float(np.clip((1.0 + d0) / 2.0, 0.0, 0.5)), float(np.clip((1.0 - d1) / 2.0, 0.0, 0.5))


def _log_conditional_cdf(m, y2, y1):
    t = y1 / (y1 + y2)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        A = m._A(t)
        dA = m._dA(t)
        return 1.0 / y1 - (1.0 / y1 + 1.0 / y2) * A + np.log(np.maximum(A - t * dA, 0.0))


def conditional_cdf(m, y2, y1):
    """``P(Y2 <= y2 | Y1 = y1) = exp(1/y1) G(y1, y2) {A(t) - t A'(t)}``, ``t = y1/(y1+y2)``."""
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    if np.any(~(y1 > 0)) or np.any(~(y2 > 0)):
        raise DomainError("unit-Fréchet arguments must be positive")
    return _out(np.exp(_log_conditional_cdf(m, y2, y1)))


def copula_cdf(m, u, v):
    """Distribution function of ``(exp(-1/Y1), exp(-1/Y2))``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    lu, lv = np.log(u), np.log(v)
    # -log u = 1/y1, so the Pickands argument y1/(y1+y2) is log v / log(uv)
    return _out(np.exp((lu + lv) * np.asarray(m.pickands(lv / (lu + lv)))))


def sample_bivariate(m, n, rng):
    """``n`` i.i.d. pairs with unit-Fréchet margins and dependence ``m``."""
    if n < 1:
        raise ValueError("n must be positive")
    u = rng.random((n, 2))
    y1 = -1.0 / np.log(u[:, 0])
    log_target = np.log(u[:, 1])
    lo = np.full(n, LOG_Y_BRACKET[0])
    hi = np.maximum(LOG_Y_BRACKET[1], np.log(y1) + 10.0)

    def f(log_y2):
        return _log_conditional_cdf(m, np.exp(log_y2), y1)

    # uniforms within rounding of 0 or 1 sit on the bracket ends
    log_target = np.clip(log_target, f(lo), f(hi))
    log_y2 = bisection_invert_vec(f, log_target, lo, hi, rel_tol=0.0, abs_tol=1e-11)
    return FrechetSample(np.column_stack([y1, np.exp(log_y2)]))


def ise(posterior_A, m, grid=101):
    """Integrated squared error of ``posterior_A`` against the model's Pickands function."""
    return quadrature(lambda t: (np.asarray(posterior_A(t)) - np.asarray(m.pickands(t))) ** 2,
                      0.0, 1.0, grid)
