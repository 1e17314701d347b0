"""Bivariate max-stable density and log-likelihood in the Bernstein parametrisation.

Observations are on the unit-Fréchet scale. Inside the density the Pickands
argument is ``t = y1 / (y1 + y2)``, the same orientation as
``L(x1, x2) = (x1 + x2) A(x2 / (x1 + x2))`` with ``x = 1 / y``.
"""

from dataclasses import dataclass
import csv
import warnings

import numpy as np

from .extremal import bernstein_basis, eta_to_beta, pickands, pickands_d1, pickands_d2
from .numerics import DomainError

DENSITY_FLOOR = 1e-300


class NumericFloorWarning(RuntimeWarning):
    """The density bracket fell below the floor; log density set to -inf."""


@dataclass(frozen=True, eq=False)
class FrechetSample:
    """Pairs on the unit-Fréchet scale, shape ``(n, 2)``."""

    pairs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.pairs, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2 or len(arr) == 0:
            raise ValueError("expected a non-empty (n, 2) array of pairs")
        if not np.all(arr > 0) or not np.all(np.isfinite(arr)):
            raise DomainError("unit-Fréchet observations must be positive and finite")
        arr.setflags(write=False)
        object.__setattr__(self, "pairs", arr)

    @property
    def n(self):
        return len(self.pairs)

    @property
    def y1(self):
        return self.pairs[:, 0]

    @property
    def y2(self):
        return self.pairs[:, 1]

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = [h.strip() for h in next(reader)]
            if header[:2] != ["y1", "y2"]:
                raise ValueError(f"{path}: expected header 'y1,y2', got {','.join(header)!r}")
            rows = [(float(r[0]), float(r[1])) for r in reader if r]
        return cls(np.array(rows))

    def to_csv_text(self):
        lines = ["y1,y2"]
        lines.extend(f"{a!r},{b!r}" for a, b in self.pairs.tolist())
        return "\n".join(lines) + "\n"


def _positive_pair(y1, y2):
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    if np.any(~(y1 > 0)) or np.any(~(y2 > 0)):
        raise DomainError("unit-Fréchet arguments must be positive")
    return np.broadcast_arrays(y1, y2)


def _out(x):
    return x.item() if x.ndim == 0 else x


def max_stable_cdf(c, y1, y2):
    """``G(y1, y2) = exp{-(1/y1 + 1/y2) A(y1 / (y1 + y2))}``."""
    y1, y2 = _positive_pair(y1, y2)
    t = y1 / (y1 + y2)
    return _out(np.exp(-(1.0 / y1 + 1.0 / y2) * np.asarray(pickands(c, t))))


def _log_density_from_A(A, dA, d2A, y1, y2):
    t = y1 / (y1 + y2)
    with np.errstate(over="ignore", under="ignore"):
        bracket = (A - t * dA) * (A + (1.0 - t) * dA) / (y1 * y2) ** 2 + d2A / (y1 + y2) ** 3
    floored = bracket <= DENSITY_FLOOR
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -(1.0 / y1 + 1.0 / y2) * A + np.log(np.where(floored, 1.0, bracket))
    return np.where(floored, -np.inf, out), floored


def log_density(c, y1, y2):
    """Log of the max-stable density for Pickands coefficients ``c``.

    Returns ``-inf`` (with a :class:`NumericFloorWarning`) where the density
    bracket underflows.
    """
    y1, y2 = _positive_pair(y1, y2)
    t = y1 / (y1 + y2)
    A = np.asarray(pickands(c, t))
    dA = np.asarray(pickands_d1(c, t))
    d2A = np.asarray(pickands_d2(c, t, endpoints=True))
    out, floored = _log_density_from_A(A, dA, d2A, y1, y2)
    if np.any(floored):
        warnings.warn("max-stable density underflowed", NumericFloorWarning, stacklevel=2)
    return _out(out)


def log_likelihood(c, data):
    return float(np.sum(log_density(c, data.y1, data.y2)))


def log_likelihood_eta(c, data):
    return log_likelihood(eta_to_beta(c), data)


class BernsteinLikelihood:
    """Log-likelihood of a fixed sample as a function of angular coefficients.

    Bernstein bases at the sample's ``t`` values are cached per degree, so a
    likelihood evaluation is three matrix-vector products. Used by the MCMC
    engine; validation of the coefficients is the caller's job.
    """

    def __init__(self, data):
        self.data = data
        y1, y2 = data.y1, data.y2
        self.t = y1 / (y1 + y2)
        self._inv_sum = 1.0 / y1 + 1.0 / y2
        self._w1 = 1.0 / (y1 * y2) ** 2
        self._w2 = 1.0 / (y1 + y2) ** 3
        self._cache = {}

    def _bases(self, k):
        bases = self._cache.get(k)
        if bases is None:
            bases = (bernstein_basis(self.t, k), bernstein_basis(self.t, k - 1),
                     bernstein_basis(self.t, k - 2))
            self._cache[k] = bases
        return bases

    def __call__(self, eta):
        eta = np.asarray(eta, dtype=float)
        k = len(eta)
        Bk, Bk1, Bk2 = self._bases(k)
        beta = np.empty(k + 1)
        beta[0] = 1.0
        beta[1:] = (2.0 * np.cumsum(eta) + (k - 1.0) - np.arange(k)) / k
        A = Bk @ beta
        dA = Bk1 @ (2.0 * eta - 1.0)
        d2A = 2.0 * (k - 1) * (Bk2 @ np.diff(eta))
        t = self.t
        bracket = (A - t * dA) * (A + (1.0 - t) * dA) * self._w1 + d2A * self._w2
        if np.any(bracket <= DENSITY_FLOOR):
            return -np.inf
        return float(np.sum(np.log(bracket)) - self._inv_sum @ A)


def flat_likelihood(eta):
    """Constant log-likelihood; turns the sampler into a prior sampler."""
    return 0.0
