"""JIT-compiled inner loops for GF(2^m) bulk arithmetic.

Every kernel takes the field's tables explicitly: ``exp`` (length 2n,
exponent -> element, period n) and ``log`` (length n+1, element -> exponent,
entry 0 unused). All arrays are int64. Kernels are cached to disk, so the
compilation cost is paid once per machine.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def eval_one(exp, log, n, coeffs, x):
    """Horner evaluation of a polynomial (coeffs lowest-degree first) at x."""
    k = coeffs.shape[0]
    if k == 0:
        return np.int64(0)
    if x == 0:
        return coeffs[0]
    lx = log[x]
    acc = np.int64(0)
    for d in range(k - 1, -1, -1):
        if acc != 0:
            acc = exp[log[acc] + lx]
        acc ^= coeffs[d]
    return acc


@njit(cache=True)
def eval_many(exp, log, n, coeffs, xs, out):
    """Horner evaluation at every point in xs; results written to out."""
    k = coeffs.shape[0]
    for t in range(xs.shape[0]):
        x = xs[t]
        acc = np.int64(0)
        if x == 0:
            out[t] = coeffs[0] if k > 0 else np.int64(0)
            continue
        lx = log[x]
        for d in range(k - 1, -1, -1):
            if acc != 0:
                acc = exp[log[acc] + lx]
            acc ^= coeffs[d]
        out[t] = acc


@njit(cache=True)
def prod_diff(exp, log, n, point, other_exps, skip_exp):
    """Product of (point - alpha^e) over other_exps, skipping e == skip_exp.

    Returns 0 as soon as a factor vanishes. Pass skip_exp = -1 to use
    every entry.
    """
    acc_log = np.int64(0)
    for t in range(other_exps.shape[0]):
        e = other_exps[t]
        if e == skip_exp:
            continue
        d = point ^ exp[e]
        if d == 0:
            return np.int64(0)
        acc_log += log[d]
    return exp[acc_log % n]


@njit(cache=True)
def prods_at(exp, log, n, point_exps, root_exps, out):
    """out[t] = prod over root_exps of (alpha^point_exps[t] - alpha^e)."""
    for t in range(point_exps.shape[0]):
        point = exp[point_exps[t]]
        acc_log = np.int64(0)
        zero = False
        for r in range(root_exps.shape[0]):
            d = point ^ exp[root_exps[r]]
            if d == 0:
                zero = True
                break
            acc_log += log[d]
        out[t] = np.int64(0) if zero else exp[acc_log % n]


@njit(cache=True)
def syndrome_tail(exp, log, n, f_vals, init_exps, i_exp):
    """Sum of F_j / (alpha^j - alpha^i) over the initially accessed positions."""
    xi = exp[i_exp]
    acc = np.int64(0)
    for t in range(init_exps.shape[0]):
        f = f_vals[t]
        if f == 0:
            continue
        den = exp[init_exps[t]] ^ xi
        acc ^= exp[(log[f] - log[den] + n) % n]
    return acc


@njit(cache=True)
def newton_rows(exp, log, n, xs, ys, out):
    """Interpolate each row of ys through the shared abscissas xs.

    xs must be distinct field elements. out receives, per row, the
    monomial coefficients (lowest-degree first) of the unique polynomial
    of degree < len(xs) through the points. O(rows * k^2) via divided
    differences; inverse denominators are computed once per (level, i)
    and reused across rows.
    """
    rows = ys.shape[0]
    k = xs.shape[0]
    for g in range(rows):
        for i in range(k):
            out[g, i] = ys[g, i]
    for level in range(1, k):
        for i in range(k - 1, level - 1, -1):
            den = xs[i] ^ xs[i - level]
            inv_log = n - log[den]
            for g in range(rows):
                num = out[g, i] ^ out[g, i - 1]
                if num == 0:
                    out[g, i] = np.int64(0)
                else:
                    out[g, i] = exp[(log[num] + inv_log) % n]
    # Newton form -> monomial coefficients, per row.
    scratch = np.zeros(k, dtype=np.int64)
    for g in range(rows):
        for i in range(k):
            scratch[i] = np.int64(0)
        scratch[0] = out[g, k - 1]
        deg = 0
        for i in range(k - 2, -1, -1):
            xi = xs[i]
            lxi = log[xi] if xi != 0 else np.int64(0)
            for j in range(deg, -1, -1):
                cj = scratch[j]
                scratch[j + 1] ^= cj
                if cj == 0 or xi == 0:
                    scratch[j] = np.int64(0)
                else:
                    scratch[j] = exp[log[cj] + lxi]
            deg += 1
            scratch[0] ^= out[g, i]
        for i in range(k):
            out[g, i] = scratch[i]


@njit(cache=True)
def encode_rows(exp, log, n, u, out):
    """out[g, j] = u_g(alpha^j) for j = 0..n-1, each row a message polynomial."""
    rows = u.shape[0]
    k = u.shape[1]
    for j in range(n):
        lx = log[exp[j]]
        for g in range(rows):
            acc = np.int64(0)
            for d in range(k - 1, -1, -1):
                if acc != 0:
                    acc = exp[log[acc] + lx]
                acc ^= u[g, d]
            out[g, j] = acc


@njit(cache=True)
def expand_roots(exp, log, n, root_exps, out):
    """Coefficients of prod (x - alpha^e) over root_exps; out length len+1."""
    for i in range(out.shape[0]):
        out[i] = np.int64(0)
    out[0] = np.int64(1)
    deg = 0
    for t in range(root_exps.shape[0]):
        la = log[exp[root_exps[t]]]
        for j in range(deg, -1, -1):
            cj = out[j]
            out[j + 1] ^= cj
            out[j] = np.int64(0) if cj == 0 else exp[log[cj] + la]
        deg += 1
