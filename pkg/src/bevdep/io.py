"""File formats: chain JSON-lines, margin-parameter JSON, atomic writes.

A chain file starts with one header record describing the run, followed by
one record per kept state::

    {"type": "header", "config": {...}, "data_digest": "...", ...}
    {"k": 5, "eta": [...], "ll": -123.4}
"""

import hashlib
import json
import os
import tempfile

import numpy as np

from .margins import GevParams
from .mcmc import ChainOutput

CHAIN_FORMAT = "bevdep-chain/1"


class ChainFileError(ValueError):
    """Missing, truncated or malformed chain file."""


def atomic_write(path, text):
    """Write ``text`` to ``path`` via a temporary file and ``os.replace``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def data_digest(sample):
    """SHA-256 of the sample's canonical CSV text."""
    return hashlib.sha256(sample.to_csv_text().encode()).hexdigest()


def _dumps(obj):
    return json.dumps(obj, sort_keys=True, allow_nan=True)


def chain_to_text(chain, config, digest=None, n=None, chain_index=None):
    ks, counts = np.unique(chain.ks, return_counts=True)
    header = {
        "type": "header",
        "format": CHAIN_FORMAT,
        "config": config.to_dict(),
        "seed": config.seed,
        "chain_index": chain_index,
        "data_digest": digest,
        "n": n,
        "n_states": len(chain),
        "acceptance_rate": float(chain.acceptance_rate),
        "k_counts": {str(int(k)): int(c) for k, c in zip(ks, counts)},
    }
    lines = [_dumps(header)]
    for k, eta, ll in zip(chain.ks.tolist(), chain.etas, chain.logliks.tolist()):
        lines.append(_dumps({"k": k, "eta": np.asarray(eta).tolist(), "ll": ll}))
    return "\n".join(lines) + "\n"


def write_chain(path, chain, config, digest=None, n=None, chain_index=None):
    atomic_write(path, chain_to_text(chain, config, digest, n, chain_index))


def read_chain(path):
    """Load a chain file; returns ``(ChainOutput, header)``."""
    try:
        with open(path) as fh:
            lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    except OSError as exc:
        raise ChainFileError(f"cannot read chain file {path}: {exc}") from exc
    if not lines:
        raise ChainFileError(f"{path}: empty chain file")
    try:
        header = json.loads(lines[0])
        records = [json.loads(ln) for ln in lines[1:]]
    except json.JSONDecodeError as exc:
        raise ChainFileError(f"{path}: malformed JSON ({exc})") from exc
    if header.get("type") != "header":
        raise ChainFileError(f"{path}: first record is not a header")
    if header.get("n_states") is not None and header["n_states"] != len(records):
        raise ChainFileError(f"{path}: expected {header['n_states']} states, "
                             f"found {len(records)}")
    try:
        ks = np.array([int(r["k"]) for r in records], dtype=np.int64)
        etas = [np.array(r["eta"], dtype=float) for r in records]
        lls = np.array([float(r["ll"]) for r in records])
    except (KeyError, TypeError, ValueError) as exc:
        raise ChainFileError(f"{path}: bad state record ({exc})") from exc
    if any(len(e) != k for e, k in zip(etas, ks)):
        raise ChainFileError(f"{path}: state length does not match k")
    chain = ChainOutput(ks, etas, lls, float(header.get("acceptance_rate", float("nan"))))
    return chain, header


def margins_to_text(margins, extra=None):
    d = {"margin1": margins[0].to_dict(), "margin2": margins[1].to_dict()}
    if extra:
        d.update(extra)
    return json.dumps(d, indent=2, sort_keys=True) + "\n"


def read_margins(path):
    """Read ``{"margin1": {...}, "margin2": {...}}``; extra keys are ignored."""
    with open(path) as fh:
        d = json.load(fh)
    try:
        return GevParams.from_dict(d["margin1"]), GevParams.from_dict(d["margin2"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: expected margin1/margin2 GEV parameters") from exc
