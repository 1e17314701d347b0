"""Bernstein-form angular distributions and Pickands dependence functions.

An angular distribution of polynomial order ``k`` is stored through its
coefficients ``eta[0..k-1]``::

    H(w) = sum_j eta[j] * b_j(w; k-1)    for w in [0, 1),    H(1) = 1

and the matching Pickands function through ``beta[0..k]``::

    A(t) = sum_j beta[j] * b_j(t; k)

with ``b_j(x; k) = C(k, j) x^j (1-x)^(k-j)``. The vertex masses are views,
``p0 = eta[0]`` and ``p1 = 1 - eta[-1]``; they are never stored separately.

All evaluation functions broadcast over their point argument.
"""

from dataclasses import dataclass, field
import json

import numpy as np
from scipy import special

from .numerics import DomainError


class InvalidCoefficientsError(ValueError):
    """Coefficients violate the restrictions of their representation."""


SUM_TOL = 1e-9
ORDER_SLACK = 1e-12


def bernstein_basis(x, k):
    """Bernstein basis of degree ``k`` at ``x``, shape ``x.shape + (k + 1,)``.

    Evaluated in log space so large degrees neither overflow nor underflow
    prematurely.
    """
    x = np.asarray(x, dtype=float)[..., None]
    j = np.arange(k + 1, dtype=float)
    log_binom = special.gammaln(k + 1.0) - special.gammaln(j + 1.0) - special.gammaln(k - j + 1.0)
    return np.exp(log_binom + special.xlogy(j, x) + special.xlog1py(k - j, -x))


def _unit_points(x, name, open_interval=False):
    x = np.asarray(x, dtype=float)
    if open_interval:
        bad = ~(x > 0.0) | ~(x < 1.0)
    else:
        bad = ~(x >= 0.0) | ~(x <= 1.0)
    if np.any(bad):
        interval = "(0, 1)" if open_interval else "[0, 1]"
        raise DomainError(f"{name} must lie in {interval}")
    return x


def _out(x):
    return x.item() if x.ndim == 0 else x


def _frozen(values):
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError("coefficients must be a one-dimensional sequence")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Violation:
    restriction: str
    index: int | None
    message: str


@dataclass(frozen=True)
class ValidityReport:
    violations: tuple = ()

    @property
    def valid(self):
        return not self.violations

    def __bool__(self):
        return self.valid

    def restrictions(self):
        return sorted({v.restriction for v in self.violations})


@dataclass(frozen=True, eq=False)
class AngularCoefficients:
    """Coefficients ``eta[0..k-1]`` of a Bernstein angular distribution."""

    eta: np.ndarray = field()

    def __post_init__(self):
        object.__setattr__(self, "eta", _frozen(self.eta))

    @property
    def k(self):
        return len(self.eta)

    @property
    def p0(self):
        return float(self.eta[0])

    @property
    def p1(self):
        return float(1.0 - self.eta[-1])

    def to_dict(self):
        return {"k": self.k, "eta": [float(v) for v in self.eta]}

    @classmethod
    def from_dict(cls, d):
        c = cls(d["eta"])
        if "k" in d and int(d["k"]) != c.k:
            raise ValueError(f"k={d['k']} does not match {c.k} coefficients")
        return c

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return f"AngularCoefficients(k={self.k}, eta={self.eta.tolist()})"


@dataclass(frozen=True, eq=False)
class PickandsCoefficients:
    """Coefficients ``beta[0..k]`` of a Bernstein Pickands function."""

    beta: np.ndarray = field()

    def __post_init__(self):
        object.__setattr__(self, "beta", _frozen(self.beta))

    @property
    def k(self):
        return len(self.beta) - 1

    @property
    def p0(self):
        return float((self.k * self.beta[1] - (self.k - 1)) / 2.0)

    @property
    def p1(self):
        return float((self.k * self.beta[-2] - (self.k - 1)) / 2.0)

    def to_dict(self):
        return {"k": self.k, "beta": [float(v) for v in self.beta]}

    @classmethod
    def from_dict(cls, d):
        c = cls(d["beta"])
        if "k" in d and int(d["k"]) != c.k:
            raise ValueError(f"k={d['k']} does not match {c.k + 1} coefficients")
        return c

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return f"PickandsCoefficients(k={self.k}, beta={self.beta.tolist()})"


# -- validation ---------------------------------------------------------------


def validate_angular(c, sum_tol=SUM_TOL, slack=ORDER_SLACK):
    """Check monotonicity (R1), the sum constraint (R2) and the vertex-mass bounds."""
    eta = c.eta
    k = len(eta)
    out = []
    if k < 3:
        out.append(Violation("shape", None, f"need k >= 3, got {k}"))
        return ValidityReport(tuple(out))
    if not np.all(np.isfinite(eta)):
        out.append(Violation("shape", None, "non-finite coefficient"))
        return ValidityReport(tuple(out))
    if eta[0] < -slack:
        out.append(Violation("R1", 0, f"eta[0]={eta[0]!r} < 0"))
    for j in np.flatnonzero(np.diff(eta) < -slack):
        out.append(Violation("R1", int(j + 1), f"eta[{j + 1}] < eta[{j}]"))
    if eta[-1] > 1.0 + slack:
        out.append(Violation("R1", k - 1, f"eta[{k - 1}]={eta[-1]!r} > 1"))
    total = float(np.sum(eta))
    if abs(total - k / 2.0) > sum_tol:
        out.append(Violation("R2", None, f"sum(eta)={total!r} differs from k/2={k / 2}"))
    if not (-slack <= c.p0 <= 0.5 + slack):
        out.append(Violation("masses", 0, f"p0={c.p0!r} outside [0, 1/2]"))
    if not (-slack <= c.p1 <= 0.5 + slack):
        out.append(Violation("masses", k - 1, f"p1={c.p1!r} outside [0, 1/2]"))
    return ValidityReport(tuple(out))


def validate_pickands(c, slack=ORDER_SLACK):
    """Check endpoint and upper bounds (R3), endpoint slopes (R4) and convexity (R5)."""
    beta = c.beta
    k = len(beta) - 1
    out = []
    if k < 3:
        out.append(Violation("shape", None, f"need k >= 3, got {k}"))
        return ValidityReport(tuple(out))
    if not np.all(np.isfinite(beta)):
        out.append(Violation("shape", None, "non-finite coefficient"))
        return ValidityReport(tuple(out))
    for j in (0, k):
        if abs(beta[j] - 1.0) > slack:
            out.append(Violation("R3", j, f"beta[{j}]={beta[j]!r} != 1"))
    for j in np.flatnonzero(beta > 1.0 + slack):
        if j not in (0, k):
            out.append(Violation("R3", int(j), f"beta[{j}]={beta[j]!r} > 1"))
    for j, p in ((1, c.p0), (k - 1, c.p1)):
        if not (-slack <= p <= 0.5 + slack):
            out.append(Violation("R4", j, f"beta[{j}] implies vertex mass {p!r} outside [0, 1/2]"))
    for j in np.flatnonzero(np.diff(beta, 2) < -slack):
        out.append(Violation("R5", int(j), f"second difference at {j} is negative"))
    return ValidityReport(tuple(out))


def _require(report, what):
    if not report:
        detail = "; ".join(v.message for v in report.violations)
        raise InvalidCoefficientsError(f"invalid {what}: {detail}")


# -- conversions ----------------------------------------------------------------


def beta_to_eta(c):
    """Angular coefficients of the angular distribution matching a Pickands function."""
    _require(validate_pickands(c), "Pickands coefficients")
    k = c.k
    return AngularCoefficients((k * np.diff(c.beta) + 1.0) / 2.0)


def eta_to_beta(c):
    """Pickands coefficients matching an angular distribution."""
    _require(validate_angular(c), "angular coefficients")
    return PickandsCoefficients(_beta_from_eta(c.eta))


def _beta_from_eta(eta):
    k = len(eta)
    j = np.arange(k)
    beta = np.empty(k + 1)
    beta[0] = 1.0
    beta[1:] = (2.0 * np.cumsum(eta) + k - j - 1.0) / k
    return beta


def elevate_angular(c):
    """Same angular distribution written with ``k + 1`` coefficients."""
    eta = c.eta
    k = len(eta)
    j = np.arange(k + 1)
    padded = np.concatenate([[0.0], eta, [0.0]])
    return AngularCoefficients(padded[1:] * (k - j) / k + padded[:-1] * j / k)


def elevate_pickands(c):
    """Same Pickands function written in degree ``k + 1``."""
    beta = c.beta
    k = len(beta) - 1
    j = np.arange(k + 2)
    padded = np.concatenate([[0.0], beta, [0.0]])
    return PickandsCoefficients(padded[1:] * (k + 1 - j) / (k + 1) + padded[:-1] * j / (k + 1))


# -- evaluation -----------------------------------------------------------------


def angular_cdf(c, w):
    """``H([0, w])``; jumps to one at ``w = 1`` to carry the mass ``p1``."""
    w = _unit_points(w, "w")
    values = bernstein_basis(w, c.k - 1) @ c.eta
    return _out(np.where(w == 1.0, 1.0, values))


def angular_density(c, w, endpoints=False):
    """Density of the angular measure on the open interval.

    With ``endpoints=True`` the finite one-sided limits at 0 and 1 are
    returned instead of raising.
    """
    w = _unit_points(w, "w", open_interval=not endpoints)
    k = c.k
    return _out((k - 1) * (bernstein_basis(w, k - 2) @ np.diff(c.eta)))


def pickands(c, t):
    t = _unit_points(t, "t")
    return _out(bernstein_basis(t, c.k) @ c.beta)


def pickands_d1(c, t):
    """First derivative of ``A``; one-sided at the endpoints."""
    t = _unit_points(t, "t")
    k = c.k
    return _out(k * (bernstein_basis(t, k - 1) @ np.diff(c.beta)))


def pickands_d2(c, t, endpoints=False):
    t = _unit_points(t, "t", open_interval=not endpoints)
    k = c.k
    return _out(k * (k - 1) * (bernstein_basis(t, k - 2) @ np.diff(c.beta, 2)))


def _nonnegative_pair(x1, x2):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if np.any(~(x1 >= 0)) or np.any(~(x2 >= 0)):
        raise DomainError("arguments must be nonnegative")
    return np.broadcast_arrays(x1, x2)


def stable_tail_L(c, x1, x2):
    """Stable-tail dependence function ``L(x1, x2) = (x1 + x2) A(x2 / (x1 + x2))``."""
    x1, x2 = _nonnegative_pair(x1, x2)
    s = x1 + x2
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(s > 0, x2 / np.where(s > 0, s, 1.0), 0.5)
    return _out(np.where(s > 0, s * pickands(c, t), 0.0))


def tail_dep_R(c, x1, x2):
    """``R(x1, x2) = x1 + x2 - L(x1, x2)``; approximates joint exceedance."""
    x1, x2 = _nonnegative_pair(x1, x2)
    return _out(np.maximum(x1 + x2 - np.asarray(stable_tail_L(c, x1, x2)), 0.0))


def chi(c):
    """Upper tail dependence coefficient ``R(1, 1) = 2 - 2 A(1/2)``."""
    return float(2.0 - 2.0 * pickands(c, 0.5))


def exceedance_prob(c, y1, y2):
    """``R(1/y1, 1/y2)`` for an angular distribution, in closed form.

    Integrates ``2 min(w/y1, (1-w)/y2)`` against the angular density using
    ``w Be(w|a,b) = a/(a+b) Be(w|a+1,b)``, which leaves incomplete beta
    functions split at ``w = y1 / (y1 + y2)``. Vertex masses contribute
    nothing since the integrand vanishes at both ends.
    """
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    if np.any(~(y1 > 0)) or np.any(~(y2 > 0)):
        raise DomainError("thresholds must be positive")
    y1, y2 = np.broadcast_arrays(y1, y2)
    return _out(_exceedance_terms(c.eta, y1[..., None], y2[..., None]))


def _exceedance_terms(eta, y1, y2):
    k = np.shape(eta)[-1]
    j = np.arange(k - 1, dtype=float)
    d = np.diff(eta)
    s = y1 + y2
    lower = (j + 1) * special.betainc(j + 2, k - j - 1, y1 / s) / y1
    upper = (k - j - 1) * special.betainc(k - j, j + 1, y2 / s) / y2
    return (2.0 / k) * np.sum(d * (lower + upper), axis=-1)
