"""Non-incremental reference decoders.

restart_decode re-derives everything a stage needs from scratch — the
erasure-span polynomial T(x) in coefficient form, the F_j weights, every
syndrome sample so far, and the whole W-B recursion — exactly as a decoder
without state carry-over would. Its verdict and (lam, omega) pair must be
bit-identical to the incremental decoder fed the same symbols in the same
order, which makes it both the correctness oracle and the benchmark
baseline that isolates the cost of non-incrementality.

genie_decode is the idealized comparison point: told the true number of
compromised nodes v, it fetches k_hat + 2v symbols once and decodes once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from ._timing import phase
from .codec import CodeParams
from .gf import Poly
from .ird import (DuplicatePositionError, StepResult, WrongCountError,
                  chien_count, erasure_decode_rows, wb_step)


@dataclass(frozen=True)
class RestartOutcome:
    result: StepResult
    lam: Poly
    om: Poly


def restart_decode(accessed: Sequence[tuple], params: CodeParams,
                   ell: int, timer=None) -> RestartOutcome:
    """Decode stage ell from scratch given all k_hat + 2*ell accessed pairs.

    The first k_hat pairs are the initial access set (they fix T's roots);
    the rest are consumed as samples in the given order, two per stage.
    """
    k_hat = params.k_hat
    if len(accessed) != k_hat + 2 * ell:
        raise WrongCountError(
            f"stage {ell} needs {k_hat + 2 * ell} pairs, got {len(accessed)}")
    positions = [int(p) for p, _ in accessed]
    if len(set(positions)) != len(positions):
        raise DuplicatePositionError("duplicate accessed position")
    f = params.field
    init = accessed[:k_hat]
    later = accessed[k_hat:]
    with phase(timer, "elp"):
        init_exps = np.array([int(p) for p, _ in init], dtype=np.int64)
        r_init = np.array([int(s) for _, s in init], dtype=np.int64)
        u0 = np.array(sorted(set(range(params.n)) - set(int(p) for p in init_exps)),
                      dtype=np.int64)
        # full rebuild: T in coefficient form, then everything by evaluation
        t_poly = Poly.from_root_exps(f, u0)
        t_der = t_poly.derivative()
        t_at_init = t_poly.eval_many(f.exp[init_exps])
        weights = f.mul_vec(f.exp[init_exps], t_at_init)
        f_vals = f.mul_vec(r_init, weights)
        quad = (Poly.one(f), Poly.zero(f), Poly.zero(f), Poly.one(f))
        for pos, sym in later:
            pos, sym = int(pos), int(sym)
            y = int(_kernels.syndrome_tail(f.exp, f.log, f.n, f_vals,
                                           init_exps, pos))
            y ^= f.mul(f.mul(sym, int(f.exp[pos])), t_der.eval(int(f.exp[pos])))
            quad = wb_step(quad, int(f.exp[pos]), y)
    lam, om = quad[0], quad[1]
    if lam.degree != ell:
        return RestartOutcome(
            StepResult(False, None, lam.degree, "degree-mismatch"), lam, om)
    with phase(timer, "chien"):
        roots = chien_count(lam, positions)
    if len(roots) > params.n - k_hat or len(roots) != lam.degree:
        return RestartOutcome(
            StepResult(False, None, lam.degree, "root-count-mismatch"), lam, om)
    trusted = tuple(sorted(
        (int(p), int(s)) for p, s in accessed if int(p) not in roots))[:k_hat]
    return RestartOutcome(StepResult(True, trusted, lam.degree, "ok"), lam, om)


def genie_decode(fetch, live_set: Iterable[int], v: int, params: CodeParams,
                 rng_seed: int = 0) -> np.ndarray | None:
    """One-shot error-erasure decode knowing the true compromised count v.

    Fetches k_hat + 2v uniformly random live nodes and decodes every group
    once. Returns the (group_count, k_hat) message array, or None when v
    exceeds the correctable budget floor((n - k_hat - s) / 2).
    """
    live = sorted(int(j) for j in live_set)
    s = params.n - len(live)
    k_hat = params.k_hat
    if v < 0 or 2 * v + s > params.n - k_hat:
        return None
    rng = np.random.default_rng(rng_seed)
    perm = [int(j) for j in rng.permutation(live)]
    take = perm[: k_hat + 2 * v]
    columns = [np.atleast_1d(np.asarray(fetch(j), dtype=np.int64)) for j in take]
    r = np.stack(columns, axis=1)  # (G, k_hat + 2v)
    f = params.field
    init = take[:k_hat]
    extra = take[k_hat:]
    init_exps = np.array(init, dtype=np.int64)
    u0 = np.array(sorted(set(range(params.n)) - set(init)), dtype=np.int64)
    t_at_init = np.zeros(k_hat, dtype=np.int64)
    _kernels.prods_at(f.exp, f.log, f.n, init_exps, u0, t_at_init)
    weights = f.mul_vec(f.exp[init_exps], t_at_init)
    out = np.zeros((r.shape[0], k_hat), dtype=np.int64)
    for g in range(r.shape[0]):
        f_vals = f.mul_vec(r[g, :k_hat], weights)
        quad = (Poly.one(f), Poly.zero(f), Poly.zero(f), Poly.one(f))
        for t, pos in enumerate(extra):
            y = int(_kernels.syndrome_tail(f.exp, f.log, f.n, f_vals,
                                           init_exps, pos))
            tprime = int(_kernels.prod_diff(f.exp, f.log, f.n,
                                            int(f.exp[pos]), u0, pos))
            y ^= f.mul(f.mul(int(r[g, k_hat + t]), int(f.exp[pos])), tprime)
            quad = wb_step(quad, int(f.exp[pos]), y)
        lam = quad[0]
        errors = set()
        if not lam.is_zero() and lam.degree > 0:
            errors = chien_count(lam, take)
            if len(errors) != lam.degree:
                return None  # cannot happen within the stated budget
        trusted = [(p, int(r[g, t])) for t, p in enumerate(take)
                   if p not in errors][:k_hat]
        out[g] = erasure_decode_rows(
            [p for p, _ in trusted],
            np.array([[sym for _, sym in trusted]], dtype=np.int64), params)[0]
    return out
