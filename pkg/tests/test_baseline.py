import numpy as np
import pytest

from prs.baseline import genie_decode, restart_decode
from prs.codec import CodeParams, encode_group, encode_groups, frame_payload
from prs.gf import FieldContext
from prs.ird import WrongCountError, decoder_init, erasure_decode

from test_ird import make_instance


def run_equivalence_trial(params, rng):
    """Drive ird and restart side by side; assert identical state per stage."""
    v_max = (params.n - params.k_hat) // 2
    v = int(rng.integers(0, min(v_max, 8) + 1))
    u, received, err, perm = make_instance(params, rng, v)
    k = params.k_hat
    init = [(j, int(received[j])) for j in perm[:k]]
    if np.array_equal(erasure_decode(init, params), u):
        return True  # stage 0 suffices; no incremental stages to compare
    state = decoder_init(params, init)
    accessed = list(init)
    idx = k
    while idx + 2 <= params.n:
        j1, j2 = perm[idx], perm[idx + 1]
        idx += 2
        accessed += [(j1, int(received[j1])), (j2, int(received[j2]))]
        res = state.ird_step((j1, received[j1]), (j2, received[j2]))
        out = restart_decode(accessed, params, state.ell)
        assert np.array_equal(state.lam.coeffs, out.lam.coeffs)
        assert np.array_equal(state.om.coeffs, out.om.coeffs)
        assert res.success == out.result.success
        assert res.reason == out.result.reason
        if res.success:
            assert res.trusted == out.result.trusted
            if np.array_equal(erasure_decode(res.trusted, params), u):
                return True
    return False


def test_restart_equals_incremental_gf16(params16):
    rng = np.random.default_rng(0)
    done = sum(run_equivalence_trial(params16, rng) for _ in range(60))
    assert done == 60  # every within-budget trial decodes


def test_restart_equals_incremental_gf256(params256):
    rng = np.random.default_rng(1)
    for _ in range(15):
        run_equivalence_trial(params256, rng)


def test_restart_stage0_is_pure_interpolation(params16):
    rng = np.random.default_rng(2)
    u, received, _, perm = make_instance(params16, rng, 0)
    pairs = [(j, int(received[j])) for j in perm[: params16.k_hat]]
    out = restart_decode(pairs, params16, 0)
    assert out.result.success
    assert out.lam.degree == 0
    assert np.array_equal(erasure_decode(out.result.trusted, params16), u)


def test_restart_wrong_count(params16):
    with pytest.raises(WrongCountError):
        restart_decode([(0, 1)] * (params16.k_hat + 1), params16, 0)


# --- genie ---

def test_genie_zero_errors_is_erasure_decode(params16):
    rng = np.random.default_rng(3)
    payload = b"genie"
    groups = frame_payload(payload, params16)
    coded = encode_groups(groups, params16)
    out = genie_decode(lambda pos: coded[:, pos], range(params16.n), 0,
                       params16, rng_seed=4)
    assert np.array_equal(out, groups)


def test_genie_one_byzantine(params16):
    rng = np.random.default_rng(5)
    u, received, err, _ = make_instance(params16, rng, 1)
    out = genie_decode(lambda pos: received[pos: pos + 1], range(params16.n),
                       1, params16, rng_seed=6)
    assert out is not None
    assert np.array_equal(out[0], u)


def test_genie_beyond_budget_fails(params16):
    v = (params16.n - params16.k_hat) // 2 + 1
    fetch = lambda pos: np.zeros(1, dtype=np.int64)
    assert genie_decode(fetch, range(params16.n), v, params16) is None


def test_genie_always_succeeds_within_budget(params16, params256):
    rng = np.random.default_rng(7)
    for params in (params16, params256):
        n, k = params.n, params.k_hat
        for trial in range(30):
            s = int(rng.integers(0, (n - k) // 2))
            v_max = (n - k - s) // 2
            v = int(rng.integers(0, min(v_max, 6) + 1))
            u, received, err, _ = make_instance(params, rng, 0)
            crash = [int(j) for j in rng.choice(n, size=s, replace=False)]
            live = [j for j in range(n) if j not in set(crash)]
            byz = [int(j) for j in rng.choice(live, size=v, replace=False)]
            for j in byz:
                received[j] ^= int(rng.integers(1, n + 1))
            out = genie_decode(lambda pos: received[pos: pos + 1], live, v,
                               params, rng_seed=trial)
            assert out is not None
            assert np.array_equal(out[0], u)
