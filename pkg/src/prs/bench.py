"""Decoder micro-benchmarks with phase breakdown.

Per trial, one CRC-framed group is encoded, a fraction p of the nodes is
corrupted, and each requested algorithm replays the identical retrieval
(same injected faults, same access order). Wall time is split into

    elp      error-locator work: span-polynomial products / rebuilds,
             F_j weights, syndrome samples, W-B updates
    chien    root location over the accessed positions
    inv_mat  the interpolation performed on decoder success
    screen   the stage-0 erasure-decode attempt (identical pre-decoder
             work for every algorithm)
    crc      all CRC checks

An algorithm's decode time is elp + chien + inv_mat; screen and crc are
reported separately since they are common to every algorithm. A warm-up
trial is run and discarded before measurement.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass

import numpy as np

from . import codec
from ._timing import PhaseTimer
from .baseline import restart_decode
from .codec import CodeParams
from .ird import AccessGeometry, DecoderState, chien_count, erasure_decode_rows
from .retrieval import crc_test

ALGORITHMS = ("ird", "restart", "genie")

PHASES = ("elp", "chien", "inv_mat", "screen", "crc")


@dataclass
class BenchTrial:
    """One fault injection, shared across algorithms."""

    u_true: np.ndarray       # (1, k_hat) framed group
    received: np.ndarray     # (n,) possibly corrupted symbols
    perm: list               # access order over all n nodes
    byz_count: int


def make_trial(params: CodeParams, p: float, seed_seq) -> BenchTrial:
    rng = np.random.default_rng(seed_seq)
    payload = rng.bytes(max(1, params.data_bits_per_group // 8))
    groups = codec.frame_payload(payload, params)[:1]
    coded = codec.encode_groups(groups, params)[0]
    byz = np.nonzero(rng.random(params.n) < p)[0]
    received = coded.copy()
    received[byz] ^= rng.integers(1, params.n + 1, size=byz.size)
    perm = [int(j) for j in rng.permutation(params.n)]
    return BenchTrial(u_true=groups, received=received, perm=perm,
                      byz_count=int(byz.size))


def _interp(positions, symbols, params):
    return erasure_decode_rows(
        positions, np.asarray(symbols, dtype=np.int64)[None, :], params)[0]


def _screen(trial: BenchTrial, params: CodeParams, timer: PhaseTimer):
    """Stage-0 erasure decode + CRC; returns (decoded_or_None, initial)."""
    initial = trial.perm[: params.k_hat]
    with timer.phase("screen"):
        u = _interp(initial, trial.received[initial], params)
    with timer.phase("crc"):
        ok = crc_test(u, params)
    return (u if ok else None), initial


def run_ird(trial: BenchTrial, params: CodeParams, timer: PhaseTimer):
    u, initial = _screen(trial, params, timer)
    if u is not None:
        return {"accesses": params.k_hat, "stages": 0, "success": True, "u": u}
    with timer.phase("elp"):
        geometry = AccessGeometry(params, initial)
        state = DecoderState(
            geometry, [(j, trial.received[j]) for j in initial])
    idx = params.k_hat
    while idx + 2 <= len(trial.perm):
        j1, j2 = trial.perm[idx], trial.perm[idx + 1]
        idx += 2
        res = state.ird_step((j1, trial.received[j1]),
                             (j2, trial.received[j2]), timer=timer)
        if not res.success:
            continue
        with timer.phase("inv_mat"):
            u = _interp([p_ for p_, _ in res.trusted],
                        [s for _, s in res.trusted], params)
        with timer.phase("crc"):
            ok = crc_test(u, params)
        if ok:
            return {"accesses": idx, "stages": state.ell, "success": True, "u": u}
    return {"accesses": idx, "stages": (idx - params.k_hat) // 2,
            "success": False, "u": None}


def run_restart(trial: BenchTrial, params: CodeParams, timer: PhaseTimer):
    u, initial = _screen(trial, params, timer)
    if u is not None:
        return {"accesses": params.k_hat, "stages": 0, "success": True, "u": u}
    accessed = [(j, int(trial.received[j])) for j in initial]
    idx = params.k_hat
    ell = 0
    while idx + 2 <= len(trial.perm):
        j1, j2 = trial.perm[idx], trial.perm[idx + 1]
        idx += 2
        ell += 1
        accessed += [(j1, int(trial.received[j1])), (j2, int(trial.received[j2]))]
        out = restart_decode(accessed, params, ell, timer=timer)
        if not out.result.success:
            continue
        with timer.phase("inv_mat"):
            u = _interp([p_ for p_, _ in out.result.trusted],
                        [s for _, s in out.result.trusted], params)
        with timer.phase("crc"):
            ok = crc_test(u, params)
        if ok:
            return {"accesses": idx, "stages": ell, "success": True, "u": u}
    return {"accesses": idx, "stages": ell, "success": False, "u": None}


def run_genie(trial: BenchTrial, params: CodeParams, timer: PhaseTimer):
    """One-shot decode knowing the true corruption count (never iterates)."""
    v = trial.byz_count
    received = trial.received
    take = trial.perm[: params.k_hat + 2 * v]
    with timer.phase("elp"):
        geometry = AccessGeometry(params, take[: params.k_hat])
        state = DecoderState(
            geometry, [(j, received[j]) for j in take[: params.k_hat]])
        for j in take[params.k_hat:]:
            state.absorb(j, received[j])
    errors = set()
    if not state.lam.is_zero() and state.lam.degree >= 1:
        with timer.phase("chien"):
            errors = chien_count(state.lam, take)
    trusted = [(j, int(received[j])) for j in take if j not in errors][: params.k_hat]
    with timer.phase("inv_mat"):
        u = _interp([p_ for p_, _ in trusted], [s for _, s in trusted], params)
    with timer.phase("crc"):
        ok = crc_test(u, params)
    return {"accesses": len(take), "stages": 0, "success": ok,
            "u": u if ok else None}


_RUNNERS = {"ird": run_ird, "restart": run_restart, "genie": run_genie}


def run_bench(params: CodeParams, p_values, trials: int, seed: int,
              algorithms=("ird", "restart", "genie")) -> list[dict]:
    """Benchmark each algorithm at each p; returns one row per (algorithm, p)."""
    for alg in algorithms:
        if alg not in _RUNNERS:
            raise ValueError(f"unknown algorithm {alg!r}")
    rows = []
    for p in p_values:
        trial_objs = [
            make_trial(params, p,
                       np.random.SeedSequence((seed, int(round(p * 10**9)), t)))
            for t in range(trials + 1)  # index 0 is the discarded warm-up
        ]
        for alg in algorithms:
            runner = _RUNNERS[alg]
            per_trial = []
            for t, trial in enumerate(trial_objs):
                timer = PhaseTimer()
                result = runner(trial, params, timer)
                if t == 0:
                    continue  # warm-up (also triggers JIT)
                decode = (timer.get("elp") + timer.get("chien")
                          + timer.get("inv_mat"))
                per_trial.append((decode, timer, result))
            decode_times = [d for d, _, _ in per_trial]
            rows.append({
                "algorithm": alg,
                "p": p,
                "trials": trials,
                "mean_decode_s": statistics.fmean(decode_times),
                "median_decode_s": statistics.median(decode_times),
                **{f"{ph}_s": statistics.fmean(t.get(ph) for _, t, _ in per_trial)
                   for ph in PHASES},
                "mean_accesses": statistics.fmean(
                    r["accesses"] for _, _, r in per_trial),
                "mean_stages": statistics.fmean(
                    r["stages"] for _, _, r in per_trial),
                "success_rate": statistics.fmean(
                    1.0 if r["success"] else 0.0 for _, _, r in per_trial),
            })
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = list(rows[0].keys())
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(
            f"{row[c]:.9f}" if isinstance(row[c], float) else str(row[c])
            for c in cols))
    return "\n".join(lines) + "\n"
