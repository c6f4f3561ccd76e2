import math
from itertools import combinations

import numpy as np
import pytest

from prs.analytics import (OutOfRangeError, access_pmf, avg_accesses,
                           evaluate, pr_Av, pr_Bi_given_Av, pr_success,
                           stage_cap)


def enumerate_stage_probs(n, k_hat, v):
    """Exhaustive oracle: place the v bad draws in every possible pattern of
    the access order (each pattern has probability 1 / C(n, v)) and find the
    first stage whose fetched prefix has at most stage-index corruptions."""
    counts = {}
    total = math.comb(n, v)
    for bad_slots in combinations(range(n), v):
        bad = set(bad_slots)
        result = None
        ell = 0
        while k_hat + 2 * ell <= n:
            fetched = k_hat + 2 * ell
            n_bad = sum(1 for t in range(fetched) if t in bad)
            if n_bad <= ell and fetched - n_bad >= k_hat:
                result = ell
                break
            ell += 1
        if result is not None:
            counts[result] = counts.get(result, 0) + 1
    return {i: c / total for i, c in counts.items()}


def test_pr_av_examples():
    assert pr_Av(10, 0, 0.0) == 1.0
    assert pr_Av(10, 3, 0.0) == 0.0
    assert pr_Av(10, 10, 1.0) == 1.0
    assert pr_Av(4, 2, 0.5) == pytest.approx(0.375, abs=1e-12)  # 6/16


def test_pr_av_sums_to_one():
    for n, p in ((31, 0.2), (127, 0.05)):
        assert sum(pr_Av(n, v, p) for v in range(n + 1)) == pytest.approx(1.0)


def test_stage_prob_i0_reduces_to_hypergeometric():
    # i = 0 term must equal C(n-v, k) / C(n, k)
    for n, k_hat, v in ((15, 4, 3), (31, 9, 6), (64, 10, 20)):
        want = math.comb(n - v, k_hat) / math.comb(n, k_hat)
        assert pr_Bi_given_Av(n, k_hat, 0, v) == pytest.approx(want, rel=1e-12)


def test_stage_prob_v0():
    assert pr_Bi_given_Av(20, 5, 0, 0) == pytest.approx(1.0)
    assert stage_cap(20, 5, 0) == 0
    with pytest.raises(OutOfRangeError):
        pr_Bi_given_Av(20, 5, 1, 0)


def test_stage_probs_match_enumeration_small():
    for n in (5, 6, 7):
        for k_hat in range(1, n):
            for v in range(n + 1):
                oracle = enumerate_stage_probs(n, k_hat, v)
                for i in range(stage_cap(n, k_hat, v) + 1):
                    got = pr_Bi_given_Av(n, k_hat, i, v)
                    assert got == pytest.approx(oracle.get(i, 0.0), abs=1e-12)
                # no oracle mass outside the closed-form support
                assert all(i <= stage_cap(n, k_hat, v) for i in oracle)


def test_out_of_range():
    with pytest.raises(OutOfRangeError):
        pr_Bi_given_Av(15, 4, -1, 2)
    with pytest.raises(OutOfRangeError):
        pr_Bi_given_Av(15, 4, 3, 2)  # i > v


def test_p_zero_degenerate():
    res = evaluate(31, 7, 0.0)
    assert res.avg_accesses == pytest.approx(7.0)
    assert res.pr_success == pytest.approx(1.0)
    assert res.access_pmf == {7: pytest.approx(1.0)}


def test_pmf_normalization_grid():
    for n, k_hats in ((15, (4, 11)), (127, (15, 60)), (1023, (101, 401))):
        for k_hat in k_hats:
            for p in (0.0, 0.05, 0.15, 0.3):
                res = evaluate(n, k_hat, p)
                total = sum(res.access_pmf.values()) + res.pr_terminal
                assert total == pytest.approx(1.0, abs=1e-9)
                assert k_hat <= res.avg_accesses <= n


def test_avg_monotone_in_p():
    for n, k_hat in ((15, 4), (127, 30), (1023, 201)):
        grid = [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3]
        vals = [avg_accesses(n, k_hat, p) for p in grid]
        assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


def test_crash_stop_reduction_identity():
    # s crashed nodes behave exactly like a code shortened to n - s
    full = evaluate(127, 30, 0.1, s=27)
    reduced = evaluate(100, 30, 0.1, s=0)
    assert full.avg_accesses == reduced.avg_accesses
    assert full.pr_success == reduced.pr_success
    assert full.access_pmf == reduced.access_pmf


def test_paper_scale_points():
    res = evaluate(1023, 401, 0.01)
    assert res.avg_accesses == pytest.approx(409.2, abs=0.3)
    assert math.ceil((res.avg_accesses - 401) / 2) == 5
    assert pr_success(1023, 401, 0.30) == pytest.approx(0.60, abs=0.05)


def test_access_pmf_surface():
    pmf = access_pmf(31, 7, 0.1)
    assert "terminal" in pmf
    int_keys = [k for k in pmf if isinstance(k, int)]
    assert all(k >= 7 and (k - 7) % 2 == 0 for k in int_keys)


def test_validation():
    with pytest.raises(ValueError):
        evaluate(15, 15, 0.1)
    with pytest.raises(ValueError):
        evaluate(15, 0, 0.1)
    with pytest.raises(ValueError):
        evaluate(15, 4, 1.5)
