"""Command-line interface: ``bevdep simulate|transform|fit|summarize|predict``.

Exit codes: 0 success, 2 usage or validation error, 3 I/O error, 4 numeric
failure. Every output file is written atomically, and outputs depend only
on the inputs and the seed.
"""

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import io as bio
from .likelihood import FrechetSample
from .margins import (DegenerateDataError, FitConvergenceError, from_unit_frechet, gev_fit_mle,
                      to_unit_frechet)
from .mcmc import InitializationError, McmcConfig, diagnostics, run, run_chains
from .models import parse_model, sample_bivariate
from .numerics import ConvergenceError
from .prior import parse_k_prior
from .summary import (conditional_exceedance, frechet_thresholds, posterior_mean_ise,
                      predictive_exceedance, summarize)

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _pairs_csv(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for a, b in rows:
        buf.write(f"{a!r},{b!r}\n")
    return buf.getvalue()


def _read_two_columns(path):
    """First two columns of a CSV as floats; a non-numeric first row is a header."""
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc
    if rows:
        try:
            float(rows[0][0])
        except ValueError:
            rows = rows[1:]
    try:
        data = np.array([(float(r[0]), float(r[1])) for r in rows], dtype=float)
    except (ValueError, IndexError) as exc:
        raise CliError(f"{path}: expected two numeric columns", EXIT_USAGE) from exc
    if data.ndim != 2 or len(data) == 0:
        raise CliError(f"{path}: no data rows", EXIT_USAGE)
    return data


def _write(path, text):
    try:
        bio.atomic_write(path, text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from exc


def _read_margins(path):
    try:
        return bio.read_margins(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc
    except (ValueError, json.JSONDecodeError) as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc


def _read_chain(path):
    try:
        return bio.read_chain(path)
    except bio.ChainFileError as exc:
        raise CliError(str(exc), EXIT_IO) from exc


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- commands -------------------------------------------------------------------


def cmd_simulate(args):
    model = parse_model(args.model)
    if args.n < 1:
        raise CliError("--n must be positive", EXIT_USAGE)
    sample = sample_bivariate(model, args.n, np.random.default_rng(args.seed))
    if args.margins:
        m1, m2 = _read_margins(args.margins)
        x1 = np.atleast_1d(from_unit_frechet(m1, sample.y1))
        x2 = np.atleast_1d(from_unit_frechet(m2, sample.y2))
        text = _pairs_csv(["x1", "x2"], zip(x1.tolist(), x2.tolist()))
    else:
        text = sample.to_csv_text()
    _write(args.out, text)


def cmd_transform(args):
    data = _read_two_columns(args.input)
    if args.fixed_margins:
        margins = _read_margins(args.fixed_margins)
        extra = {"fixed": True}
    else:
        fits = [gev_fit_mle(data[:, i]) for i in (0, 1)]
        margins = (fits[0].params, fits[1].params)
        extra = {"fit1": fits[0].to_dict(), "fit2": fits[1].to_dict(), "fixed": False}
    y = np.column_stack([np.atleast_1d(to_unit_frechet(m, data[:, i]))
                         for i, m in enumerate(margins)])
    sample = FrechetSample(y)
    if args.params_out:
        _write(args.params_out, bio.margins_to_text(margins, extra))
    _write(args.out, sample.to_csv_text())


def _chain_paths(out, n_chains):
    if n_chains == 1:
        return [out]
    root, ext = os.path.splitext(out)
    return [f"{root}.{i}{ext or '.jsonl'}" for i in range(n_chains)]


def cmd_fit(args):
    try:
        sample = FrechetSample.from_csv(args.input)
    except OSError as exc:
        raise CliError(f"cannot read {args.input}: {exc}", EXIT_IO) from exc
    if args.chains < 1:
        raise CliError("--chains must be positive", EXIT_USAGE)
    cfg = McmcConfig(iterations=args.iterations, burn_in=args.burn_in, thin=args.thin,
                     seed=args.seed, prior=parse_k_prior(args.k_prior), init_k=args.init_k,
                     refresh_prob=args.refresh)
    digest = bio.data_digest(sample)
    if args.chains == 1:
        chains = [run(cfg, sample)]
        indices = [None]
    else:
        chains = run_chains(cfg, sample, args.chains, workers=args.workers)
        indices = list(range(args.chains))
    for path, chain, idx in zip(_chain_paths(args.out, args.chains), chains, indices):
        _write(path, bio.chain_to_text(chain, cfg, digest, sample.n, idx))
        d = diagnostics(chain)
        print(f"{path}: {len(chain)} states, acceptance {d.acceptance_rate:.3f}, "
              f"median k {d.k_median:g}", file=sys.stderr)


def cmd_summarize(args):
    chain, header = _read_chain(args.chain)
    if len(chain) == 0:
        raise CliError(f"{args.chain}: chain has no states", EXIT_IO)
    s = summarize(chain, np.linspace(0.0, 1.0, args.grid))
    report = s.report()
    report["diagnostics"] = diagnostics(chain).to_dict()
    report["run"] = {key: header.get(key) for key in
                     ("config", "data_digest", "n", "chain_index")}
    if args.true_model:
        m = parse_model(args.true_model)
        mean, q05, q95 = posterior_mean_ise(chain, m)
        report["ise"] = {"model": m.spec(), "mean": mean, "q05": q05, "q95": q95}
    _write(args.out_prefix + ".summary.csv", s.to_csv_text())
    _write(args.out_prefix + ".summary.json", _json(report))


def _parse_pair(text, what):
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise CliError(f"{what} expects 'a,b', got {text!r}", EXIT_USAGE) from exc
    return a, b


def cmd_predict(args):
    chain, _ = _read_chain(args.chain)
    if len(chain) == 0:
        raise CliError(f"{args.chain}: chain has no states", EXIT_IO)
    result = {"joint": []}
    for text in args.y or []:
        y1, y2 = _parse_pair(text, "--y")
        result["joint"].append({"y1": y1, "y2": y2,
                                "prob": predictive_exceedance(chain, y1, y2)})
    if args.condition_on is not None:
        if args.q is None or args.margins is None:
            raise CliError("--condition-on needs --q and --margins", EXIT_USAGE)
        margins = _read_margins(args.margins)
        q = _parse_pair(args.q, "--q") if "," in args.q else float(args.q)
        y = frechet_thresholds(margins, q)
        result["conditional"] = {
            "condition_on": args.condition_on, "q": q, "y_star": list(y),
            "joint": predictive_exceedance(chain, *y),
            "prob": conditional_exceedance(chain, margins, q, args.condition_on),
        }
    text = _json(result)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)


# -- parser -----------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="bevdep", description=(
        "Bayesian nonparametric estimation of bivariate extremal dependence "
        "with Bernstein polynomials."))
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="draw pairs from a parametric model")
    s.add_argument("--model", required=True, help="sl:A | al:A,T1,T2 | hr:L | et:W,NU")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.add_argument("--margins", help="GEV margins JSON; output on the data scale")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("transform", help="fit GEV margins and map to unit Fréchet")
    s.add_argument("--input", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--params-out")
    s.add_argument("--fixed-margins", help="use these GEV margins instead of fitting")
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("fit", help="run the MCMC sampler on unit-Fréchet pairs")
    s.add_argument("--input", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--iterations", type=int, default=500_000)
    s.add_argument("--burn-in", type=int, default=400_000)
    s.add_argument("--thin", type=int, default=4)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--k-prior", default="poisson:7", help="poisson:KAPPA | negbin:KAPPA,SIGMA2")
    s.add_argument("--refresh", type=float, default=0.0,
                   help="probability of a within-order refresh move")
    s.add_argument("--chains", type=int, default=1)
    s.add_argument("--workers", type=int, default=None)
    s.add_argument("--init-k", type=int, default=None)
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("summarize", help="pointwise bands and scalar summaries of a chain")
    s.add_argument("--chain", required=True)
    s.add_argument("--out-prefix", required=True)
    s.add_argument("--grid", type=int, default=101)
    s.add_argument("--true-model", help="report ISE against this model")
    s.set_defaults(func=cmd_summarize)

    s = sub.add_parser("predict", help="posterior predictive exceedance probabilities")
    s.add_argument("--chain", required=True)
    s.add_argument("--y", action="append", help="unit-Fréchet thresholds 'y1,y2' (repeatable)")
    s.add_argument("--condition-on", type=int, choices=(1, 2))
    s.add_argument("--q", help="data-scale threshold, one value or 'q1,q2'")
    s.add_argument("--margins", help="GEV margins JSON for --q")
    s.add_argument("--out")
    s.set_defaults(func=cmd_predict)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except CliError as exc:
        print(f"bevdep: {exc}", file=sys.stderr)
        return exc.code
    except (DegenerateDataError, FitConvergenceError, ConvergenceError,
            InitializationError) as exc:
        print(f"bevdep: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"bevdep: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"bevdep: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
