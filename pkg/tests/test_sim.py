import numpy as np
import pytest

from prs.analytics import evaluate
from prs.codec import CodeParams
from prs.gf import FieldContext
from prs.sim import (FailureModel, MonteCarloSummary, default_payload_bytes,
                     run_monte_carlo, run_trial)


@pytest.fixture(scope="module")
def small_params():
    return CodeParams(FieldContext(5), 9)  # n = 31


def test_no_failures_always_khat(small_params):
    model = FailureModel(p_byz=0.0, master_seed=1)
    for t in range(5):
        report = run_trial(small_params, model, t)
        assert report.success
        assert report.nodes_accessed == small_params.k_hat


def test_all_byzantine_always_fails(small_params):
    model = FailureModel(p_byz=1.0, master_seed=2)
    for t in range(3):
        report = run_trial(small_params, model, t)
        assert not report.success


def test_trial_determinism(small_params):
    model = FailureModel(p_byz=0.3, master_seed=3)
    a = run_trial(small_params, model, 7)
    b = run_trial(small_params, model, 7)
    assert a.nodes_accessed == b.nodes_accessed
    assert a.stages == b.stages
    assert a.payload == b.payload
    c = run_trial(small_params, model, 8)
    assert (a.nodes_accessed, a.payload) != (c.nodes_accessed, c.payload)


def test_summary_determinism(small_params):
    model = FailureModel(p_byz=0.2, master_seed=4)
    s1 = run_monte_carlo(small_params, model, 50)
    s2 = run_monte_carlo(small_params, model, 50)
    assert s1 == s2


def test_parallel_matches_sequential(small_params):
    model = FailureModel(p_byz=0.2, master_seed=5)
    seq = run_monte_carlo(small_params, model, 24, workers=1)
    par = run_monte_carlo(small_params, model, 24, workers=3)
    assert seq == par


def test_histogram_accounting(small_params):
    model = FailureModel(p_byz=0.15, master_seed=6)
    s = run_monte_carlo(small_params, model, 80)
    assert sum(s.histogram.values()) == s.trials
    assert 0.0 <= s.success_rate <= 1.0
    assert s.silent_corruptions == 0
    assert len(s.per_trial_seeds) == s.trials


def test_crash_set_reduces_live(small_params):
    crash = frozenset({0, 1, 2, 3})
    model = FailureModel(p_byz=1.0, crash_set=crash, master_seed=7)
    report = run_trial(small_params, model, 0)
    assert not report.success
    assert report.nodes_accessed_normalized == small_params.n - len(crash)


def test_mean_matches_closed_form_small():
    # n = 31, k = 9, p = 0.15: quick distribution sanity at modest trial count
    params = CodeParams(FieldContext(5), 9)
    model = FailureModel(p_byz=0.15, master_seed=8)
    summary = run_monte_carlo(params, model, 600)
    closed = evaluate(params.n, params.k_hat, 0.15)
    assert summary.success_rate > 0.99
    assert summary.mean_accesses == pytest.approx(closed.avg_accesses, rel=0.03)


def test_summary_serialization(small_params):
    model = FailureModel(p_byz=0.1, master_seed=9)
    s = run_monte_carlo(small_params, model, 10)
    import json
    doc = json.loads(s.to_json())
    assert doc["trials"] == 10
    assert "histogram" in doc
    csv = s.to_csv()
    assert csv.startswith("accesses,frequency\n")
    assert sum(int(line.split(",")[1]) for line in csv.strip().splitlines()[1:]) == 10


def test_failure_model_validation():
    with pytest.raises(ValueError):
        FailureModel(p_byz=1.5)
    with pytest.raises(ValueError):
        FailureModel(p_byz=0.1, corruption="zero-out")


def test_default_payload_bytes(small_params):
    assert default_payload_bytes(small_params) == max(
        1, small_params.data_bits_per_group // 8)
