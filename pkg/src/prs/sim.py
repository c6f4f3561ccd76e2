"""Failure-injecting storage simulator and Monte-Carlo harness.

Each trial frames and encodes a random payload, marks every non-crashed
node Byzantine independently with probability p_byz, corrupts each of a
Byzantine node's symbols by XOR with a uniform nonzero field element (so a
compromised symbol is never silently correct), and runs progressive
retrieval over the live set. Trials are deterministic functions of
(master_seed, trial_index) and independent of each other, so the harness
can distribute them across processes and still reduce in trial order.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import codec
from .codec import CodeParams
from .gf import FieldContext
from .retrieval import RetrievalReport, progressive_retrieve

CORRUPTION_XOR_NONZERO = "xor_uniform_nonzero"


@dataclass(frozen=True)
class FailureModel:
    """Per-node failure injection parameters."""

    p_byz: float
    crash_set: frozenset = frozenset()
    corruption: str = CORRUPTION_XOR_NONZERO
    master_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_byz <= 1.0:
            raise ValueError(f"p_byz={self.p_byz} outside [0, 1]")
        if self.corruption != CORRUPTION_XOR_NONZERO:
            raise ValueError(f"unknown corruption rule {self.corruption!r}")


@dataclass
class MonteCarloSummary:
    trials: int
    mean_accesses: float  # analysis-normalized (failures charged the live count)
    mean_accesses_raw: float
    success_rate: float
    histogram: dict[int, int]  # normalized access count -> frequency
    per_trial_seeds: list[int]
    silent_corruptions: int
    n: int = 0
    k_hat: int = 0
    m: int = 0
    p_byz: float = 0.0
    s: int = 0
    master_seed: int = 0

    def to_json(self) -> str:
        doc = {k: v for k, v in self.__dict__.items() if k != "histogram"}
        doc["histogram"] = {str(k): v for k, v in sorted(self.histogram.items())}
        return json.dumps(doc, indent=2)

    def to_csv(self) -> str:
        lines = ["accesses,frequency"]
        lines += [f"{k},{v}" for k, v in sorted(self.histogram.items())]
        return "\n".join(lines) + "\n"


def default_payload_bytes(params: CodeParams) -> int:
    """Small payload that still round-trips: about one group's worth."""
    return max(1, params.data_bits_per_group // 8)


def _trial_seed_seq(master_seed: int, trial_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence((master_seed & 0xFFFFFFFFFFFFFFFF, trial_index))


def run_trial(params: CodeParams, model: FailureModel, trial_index: int,
              payload_bytes: int | None = None) -> RetrievalReport:
    report, _ok, _v = _run_trial_full(params, model, trial_index, payload_bytes)
    return report


def _run_trial_full(params: CodeParams, model: FailureModel, trial_index: int,
                    payload_bytes: int | None = None):
    """Returns (report, payload_intact, byzantine_count)."""
    if payload_bytes is None:
        payload_bytes = default_payload_bytes(params)
    ss = _trial_seed_seq(model.master_seed, trial_index)
    rng = np.random.default_rng(ss)
    payload = rng.bytes(payload_bytes)
    groups = codec.frame_payload(payload, params)
    coded = codec.encode_groups(groups, params)  # (G, n)

    n = params.n
    crashed = set(int(j) for j in model.crash_set)
    live = [j for j in range(n) if j not in crashed]
    byz = [j for j in live if rng.random() < model.p_byz]
    received = coded.copy()
    for j in byz:
        received[:, j] ^= rng.integers(1, n + 1, size=received.shape[0])

    retrieval_seed = int(rng.integers(0, 2**63 - 1))
    report = progressive_retrieve(lambda pos: received[:, pos], live, params,
                                  payload_bytes, rng_seed=retrieval_seed)
    intact = (not report.success) or report.payload == payload
    return report, intact, len(byz)


def _trial_batch(args):
    m, prim, k_hat, crc_width, model, indices, payload_bytes = args
    params = CodeParams(FieldContext(m, prim), k_hat, crc_width)
    return [(_run_trial_full(params, model, i, payload_bytes)) for i in indices]


def run_monte_carlo(params: CodeParams, model: FailureModel, trials: int,
                    payload_bytes: int | None = None,
                    workers: int | None = None) -> MonteCarloSummary:
    """Aggregate run_trial over per-trial derived seeds; deterministic.

    workers defaults to the PRS_THREADS environment variable (1 when unset);
    results are reduced in trial order either way.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if workers is None:
        workers = max(1, int(os.environ.get("PRS_THREADS", "1")))
    indices = list(range(trials))
    if workers > 1 and trials > 1:
        chunks = [indices[c::workers] for c in range(workers)]
        args = [(params.m, params.field.prim_poly, params.k_hat,
                 params.crc_width, model, chunk, payload_bytes)
                for chunk in chunks if chunk]
        by_index: dict[int, tuple] = {}
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for chunk, results in zip([a[5] for a in args],
                                      pool.map(_trial_batch, args)):
                for i, res in zip(chunk, results):
                    by_index[i] = res
        results = [by_index[i] for i in indices]
    else:
        results = [_run_trial_full(params, model, i, payload_bytes)
                   for i in indices]

    histogram: dict[int, int] = {}
    total_norm = 0
    total_raw = 0
    successes = 0
    silent = 0
    for report, intact, _v in results:
        norm = report.nodes_accessed_normalized
        histogram[norm] = histogram.get(norm, 0) + 1
        total_norm += norm
        total_raw += report.nodes_accessed
        if report.success:
            successes += 1
        if not intact:
            silent += 1
    seeds = [int(_trial_seed_seq(model.master_seed, i).generate_state(1)[0])
             for i in indices]
    return MonteCarloSummary(
        trials=trials,
        mean_accesses=total_norm / trials,
        mean_accesses_raw=total_raw / trials,
        success_rate=successes / trials,
        histogram=histogram,
        per_trial_seeds=seeds,
        silent_corruptions=silent,
        n=params.n, k_hat=params.k_hat, m=params.m, p_byz=model.p_byz,
        s=len(model.crash_set), master_seed=model.master_seed,
    )
