"""Trans-dimensional Metropolis-Hastings over the order and angular coefficients.

Each iteration moves the order ``k`` one step up or down (always up from the
minimum order) and redraws the whole coefficient vector from the conditional
prior at the new order. Because the coefficient proposal is the conditional
prior, its density cancels against the prior in the acceptance ratio, which
reduces to

    log Pi(k') - log Pi(k) + loglik' - loglik + log q(k | k') - log q(k' | k).

An optional within-order refresh move redraws the coefficients at the current
order and is accepted on the likelihood ratio alone.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import functools
import math
import os

import numpy as np

from .extremal import AngularCoefficients, validate_angular
from .likelihood import BernsteinLikelihood, FrechetSample, flat_likelihood
from .prior import K_MIN, PoissonPrior, draw_eta

LOG_HALF = math.log(0.5)


class InitializationError(ValueError):
    """Starting state is invalid or has zero likelihood."""


@dataclass(frozen=True)
class McmcConfig:
    iterations: int = 500_000
    burn_in: int = 400_000
    thin: int = 4
    seed: int = 0
    prior: object = field(default_factory=lambda: PoissonPrior(7.0))
    init_k: int | None = None
    refresh_prob: float = 0.0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be positive")
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError("burn_in must satisfy 0 <= burn_in < iterations")
        if self.thin < 1:
            raise ValueError("thin must be positive")
        if self.init_k is not None and self.init_k < K_MIN:
            raise ValueError(f"init_k must be >= {K_MIN}")
        if not 0.0 <= self.refresh_prob < 1.0:
            raise ValueError("refresh_prob must lie in [0, 1)")

    @property
    def n_kept(self):
        return (self.iterations - self.burn_in) // self.thin

    def to_dict(self):
        return {"iterations": self.iterations, "burn_in": self.burn_in, "thin": self.thin,
                "seed": self.seed, "prior": self.prior.to_dict(), "init_k": self.init_k,
                "refresh_prob": self.refresh_prob}


@dataclass(frozen=True)
class ChainState:
    k: int
    eta: AngularCoefficients
    loglik: float


@dataclass(eq=False)
class ChainOutput:
    """Kept states of a run; ``etas`` is ragged (one array per state)."""

    ks: np.ndarray
    etas: list
    logliks: np.ndarray
    acceptance_rate: float
    k_trace: np.ndarray | None = None

    def __len__(self):
        return len(self.ks)

    def states(self):
        for eta in self.etas:
            yield AngularCoefficients(eta)

    def by_order(self):
        """Group kept states by order: ``{k: (indices, eta matrix)}``."""
        groups = {}
        for k in np.unique(self.ks):
            idx = np.flatnonzero(self.ks == k)
            groups[int(k)] = (idx, np.array([self.etas[i] for i in idx]))
        return groups


def propose_k(k_current, rng):
    """Step the order by one; returns ``(k_new, log q_forward, log q_backward)``."""
    if k_current < K_MIN:
        raise ValueError(f"k must be >= {K_MIN}")
    return _propose_k(k_current, rng.random())


def _propose_k(k, u):
    if k == K_MIN:
        return K_MIN + 1, 0.0, LOG_HALF
    k_new = k + 1 if u < 0.5 else k - 1
    return k_new, LOG_HALF, (0.0 if k_new == K_MIN else LOG_HALF)


def acceptance_log_ratio(cfg, current, proposal, q_terms=(0.0, 0.0)):
    """Log Metropolis-Hastings ratio for a move ``current -> proposal``.

    ``q_terms = (log q_forward, log q_backward)`` for the order move.
    """
    log_fwd, log_bwd = q_terms
    prior = cfg.prior
    return (prior.logpmf(proposal.k) - prior.logpmf(current.k)
            + proposal.loglik - current.loglik + log_bwd - log_fwd)


def _likelihood_for(data):
    if data is None:
        return flat_likelihood
    if isinstance(data, FrechetSample):
        return BernsteinLikelihood(data)
    return data


def _rng(cfg, chain_index=None):
    if chain_index is None:
        return np.random.default_rng(cfg.seed)
    return np.random.default_rng([cfg.seed, chain_index])


def initial_state(cfg, loglik, rng, max_tries=1000):
    k = cfg.init_k if cfg.init_k is not None else max(K_MIN, cfg.prior.mode())
    for _ in range(max_tries):
        eta = draw_eta(k, rng.random(k))
        ll = loglik(eta)
        if np.isfinite(ll):
            return ChainState(k, AngularCoefficients(eta), ll)
    raise InitializationError(f"no starting coefficients with finite likelihood at k={k}")


def step(cfg, state, data, rng):
    """One iteration of the sampler from ``state``.

    ``data`` is a :class:`FrechetSample`, a callable log-likelihood of the
    coefficient vector, or ``None`` for a flat likelihood.
    """
    if not validate_angular(state.eta):
        raise InitializationError("current state has invalid coefficients")
    loglik = _likelihood_for(data)
    eta = state.eta.eta
    k, eta_new, ll, accepted = _iterate(state.k, eta, state.loglik, loglik, cfg.prior.logpmf,
                                        cfg.refresh_prob, rng.random)
    if not accepted:
        return state
    return ChainState(k, AngularCoefficients(eta_new), ll)


def _iterate(k, eta, ll, loglik, logpmf, refresh, random):
    u0, u1, u2 = random(3).tolist()
    if refresh > 0.0 and u0 < refresh:
        k_new = k
        log_ratio = 0.0
    else:
        k_new, log_fwd, log_bwd = _propose_k(k, u1)
        log_ratio = logpmf(k_new) - logpmf(k) + log_bwd - log_fwd
    eta_new = draw_eta(k_new, random(k_new).tolist())
    ll_new = loglik(eta_new)
    log_ratio += ll_new - ll
    # standard MH: accept when U <= min(1, ratio)
    if u2 == 0.0 or math.log(u2) <= log_ratio:
        return k_new, eta_new, ll_new, True
    return k, eta, ll, False


def run(cfg, data, chain_index=None, progress=None):
    """Run the sampler, applying burn-in and thinning; deterministic given the seed."""
    loglik = _likelihood_for(data)
    rng = _rng(cfg, chain_index)
    state = initial_state(cfg, loglik, rng)
    k, eta, ll = state.k, state.eta.eta.tolist(), state.loglik

    ks = np.empty(cfg.n_kept, dtype=np.int64)
    logliks = np.empty(cfg.n_kept)
    etas = []
    k_trace = np.empty(cfg.iterations, dtype=np.int32)
    burn_in, thin = cfg.burn_in, cfg.thin
    logpmf = functools.lru_cache(maxsize=None)(cfg.prior.logpmf)
    refresh = cfg.refresh_prob
    random = rng.random

    accepted = 0
    kept = 0
    for s in range(1, cfg.iterations + 1):
        k, eta, ll, moved = _iterate(k, eta, ll, loglik, logpmf, refresh, random)
        accepted += moved
        k_trace[s - 1] = k
        if s > burn_in and (s - burn_in) % thin == 0:
            ks[kept] = k
            logliks[kept] = ll
            etas.append(np.array(eta, dtype=float))
            kept += 1
        if progress is not None and s % 10000 == 0:
            progress(s)
    return ChainOutput(ks, etas, logliks, accepted / cfg.iterations, k_trace)


def _run_one(args):
    cfg, data, index = args
    return run(cfg, data, chain_index=index)


def run_chains(cfg, data, n_chains, workers=None):
    """Independent chains with seeds derived from ``(cfg.seed, chain index)``.

    Results come back in chain-index order regardless of completion order.
    """
    if workers is None:
        workers = int(os.environ.get("BEVDEP_WORKERS", os.cpu_count() or 1))
    jobs = [(cfg, data, i) for i in range(n_chains)]
    if workers <= 1 or n_chains == 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, n_chains)) as pool:
        return list(pool.map(_run_one, jobs))


def effective_sample_size(x):
    """Geyer initial-monotone-sequence ESS of a scalar trace."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 2:
        return float(n)
    x = x - x.mean()
    var = x @ x / n
    if not var > 0:
        return 1.0
    size = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, size)
    acov = np.fft.irfft(f * np.conjugate(f), size)[:n] / n
    rho = acov / acov[0]
    # pair sums Gamma_m = rho[2m] + rho[2m+1], truncated at the first negative
    # value and made monotone
    pairs = rho[: 2 * (n // 2)].reshape(-1, 2).sum(axis=1)
    neg = np.flatnonzero(pairs <= 0)
    pairs = pairs[: neg[0]] if len(neg) else pairs
    pairs = np.minimum.accumulate(pairs)
    tau = -1.0 + 2.0 * pairs.sum()
    return float(n / max(tau, 1.0 / n))


@dataclass(frozen=True)
class Diagnostics:
    acceptance_rate: float
    k_counts: dict
    k_median: float
    loglik_ess: float

    def to_dict(self):
        return {"acceptance_rate": self.acceptance_rate,
                "k_counts": {str(k): v for k, v in self.k_counts.items()},
                "k_median": self.k_median, "loglik_ess": self.loglik_ess}


def diagnostics(out):
    if len(out) == 0:
        raise ValueError("empty chain")
    ks, counts = np.unique(out.ks, return_counts=True)
    finite = out.logliks[np.isfinite(out.logliks)]
    return Diagnostics(
        acceptance_rate=float(out.acceptance_rate),
        k_counts={int(k): int(c) for k, c in zip(ks, counts)},
        k_median=float(np.median(out.ks)),
        loglik_ess=effective_sample_size(finite) if len(finite) else 0.0,
    )
