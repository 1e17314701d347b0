"""Posterior summaries and posterior-predictive exceedance probabilities.

All functionals are evaluated per state and then reduced across the kept
states. States are grouped by order so each group is a single matrix
product against a cached Bernstein basis.
"""

from dataclasses import dataclass
import csv
import io
import math

import numpy as np

from .extremal import _exceedance_terms, bernstein_basis
from .margins import to_unit_frechet
from .numerics import DomainError, simpson_weights

DEFAULT_GRID = 101
QUANTILES = (0.05, 0.95)


class EmptyChainError(ValueError):
    """The chain holds no kept states."""


def _check(chain):
    if len(chain) == 0:
        raise EmptyChainError("chain has no kept states")


def default_grid(n=DEFAULT_GRID):
    return np.linspace(0.0, 1.0, n)


def _beta_matrix(etas):
    """Row-wise ``eta -> beta`` for a block of states of one order."""
    m, k = etas.shape
    beta = np.empty((m, k + 1))
    beta[:, 0] = 1.0
    beta[:, 1:] = (2.0 * np.cumsum(etas, axis=1) + (k - 1.0) - np.arange(k)) / k
    return beta


def pickands_draws(chain, grid):
    """``A`` of every kept state on ``grid``, shape ``(len(chain), len(grid))``."""
    _check(chain)
    grid = np.asarray(grid, dtype=float)
    out = np.empty((len(chain), len(grid)))
    for k, (idx, etas) in chain.by_order().items():
        out[idx] = _beta_matrix(etas) @ bernstein_basis(grid, k).T
    return out


def density_draws(chain, grid):
    """Angular density of every kept state on ``grid`` (endpoint limits included)."""
    _check(chain)
    grid = np.asarray(grid, dtype=float)
    out = np.empty((len(chain), len(grid)))
    for k, (idx, etas) in chain.by_order().items():
        out[idx] = (k - 1) * (np.diff(etas, axis=1) @ bernstein_basis(grid, k - 2).T)
    return out


def _triple(x):
    q05, med, q95 = np.quantile(x, [QUANTILES[0], 0.5, QUANTILES[1]])
    return float(med), float(q05), float(q95)


@dataclass(frozen=True, eq=False)
class PosteriorSummary:
    grid: np.ndarray
    A_mean: np.ndarray
    A_q05: np.ndarray
    A_q95: np.ndarray
    h_mean: np.ndarray
    h_q05: np.ndarray
    h_q95: np.ndarray
    k_posterior: dict
    p0_summary: tuple
    p1_summary: tuple
    chi_summary: tuple

    def to_csv_text(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["grid", "A_mean", "A_q05", "A_q95", "h_mean", "h_q05", "h_q95"])
        cols = (self.grid, self.A_mean, self.A_q05, self.A_q95,
                self.h_mean, self.h_q05, self.h_q95)
        for row in zip(*(c.tolist() for c in cols)):
            w.writerow([repr(v) for v in row])
        return buf.getvalue()

    def report(self):
        """JSON-ready scalar part of the summary."""
        def named(t):
            return {"median": t[0], "q05": t[1], "q95": t[2]}
        return {"k_posterior": {str(k): v for k, v in self.k_posterior.items()},
                "p0": named(self.p0_summary), "p1": named(self.p1_summary),
                "chi": named(self.chi_summary)}


def summarize(chain, grid=None):
    """Pointwise mean and 0.05/0.95 bands of ``A`` and ``h``, plus scalar summaries."""
    _check(chain)
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if np.any(~(grid >= 0)) or np.any(~(grid <= 1)):
        raise DomainError("grid must lie in [0, 1]")
    A = pickands_draws(chain, grid)
    h = density_draws(chain, grid)
    qA = np.quantile(A, QUANTILES, axis=0)
    qh = np.quantile(h, QUANTILES, axis=0)

    ks, counts = np.unique(chain.ks, return_counts=True)
    n = len(chain)
    p0 = np.array([e[0] for e in chain.etas])
    p1 = np.array([1.0 - e[-1] for e in chain.etas])
    chi = 2.0 - 2.0 * pickands_draws(chain, [0.5])[:, 0]
    return PosteriorSummary(
        grid=grid, A_mean=A.mean(axis=0), A_q05=qA[0], A_q95=qA[1],
        h_mean=h.mean(axis=0), h_q05=qh[0], h_q95=qh[1],
        k_posterior={int(k): int(c) / n for k, c in zip(ks, counts)},
        p0_summary=_triple(p0), p1_summary=_triple(p1), chi_summary=_triple(chi),
    )


def _exceedance_draws(chain, y1, y2):
    out = np.empty(len(chain))
    for k, (idx, etas) in chain.by_order().items():
        out[idx] = _exceedance_terms(etas, y1, y2)
    return out


def predictive_exceedance(chain, y1, y2):
    """Posterior predictive ``P(Y1 > y1, Y2 > y2)`` on the unit-Fréchet scale.

    Average over kept states of the closed-form exceedance probability.
    """
    _check(chain)
    y1, y2 = float(y1), float(y2)
    if not (y1 > 0 and y2 > 0):
        raise DomainError("thresholds must be positive")
    return float(np.clip(_exceedance_draws(chain, y1, y2).mean(), 0.0, 1.0))


def frechet_thresholds(margins, q):
    """Data-scale threshold(s) ``q`` mapped to the unit-Fréchet scale per margin."""
    q1, q2 = (q, q) if np.ndim(q) == 0 else q
    return float(to_unit_frechet(margins[0], q1)), float(to_unit_frechet(margins[1], q2))


def conditional_exceedance(chain, margins, q, condition_on=1):
    """``P(Y_other > y_other | Y_c > y_c)`` at data-scale threshold ``q``.

    ``q`` is one threshold used for both margins or a pair. Returns the
    joint predictive probability divided by the marginal exceedance
    ``1 - exp(-1/y_c)`` of the conditioning coordinate.
    """
    if condition_on not in (1, 2):
        raise ValueError("condition_on must be 1 or 2")
    y = frechet_thresholds(margins, q)
    joint = predictive_exceedance(chain, *y)
    marginal = -math.expm1(-1.0 / y[condition_on - 1])
    return float(np.clip(joint / marginal, 0.0, 1.0))


def ise_draws(chain, m, grid=DEFAULT_GRID):
    """Integrated squared error of every kept state against the model ``m``."""
    _check(chain)
    t = default_grid(grid)
    diff = pickands_draws(chain, t) - np.asarray(m.pickands(t))[None, :]
    return diff ** 2 @ simpson_weights(grid)


def posterior_mean_ise(chain, m, grid=DEFAULT_GRID):
    """Mean, 0.05- and 0.95-quantile of the per-state ISE."""
    e = ise_draws(chain, m, grid)
    q05, q95 = np.quantile(e, QUANTILES)
    return float(e.mean()), float(q05), float(q95)
