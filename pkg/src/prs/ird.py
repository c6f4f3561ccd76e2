"""Incremental Reed-Solomon error-erasure decoding via Welch-Berlekamp.

The decoder starts from k_hat accessed symbols and treats everything else
as erased. The span polynomial T(x) has its roots at exactly those n - k_hat
initially erased positions and never changes afterwards: each later stage
hypothesizes one more error, consumes two freshly fetched symbols, and turns
them into samples of the generalized syndrome

    S(alpha^i) = sum_{j in initial} F_j / (alpha^j - alpha^i)
                 + r_i * alpha^i * T'(alpha^i),      F_j = r_j alpha^j T(alpha^j)

at the new points. A sample depends only on the initial symbols and on r_i
itself, so samples computed at earlier stages stay valid verbatim; the W-B
rational-interpolation recursion then extends the running error-locator /
evaluator pair (lam, omega) one sample at a time, and a stage is accepted
only when deg(lam) equals the stage index and a Chien scan over the accessed
positions finds exactly that many roots. Because every erasure is a root of
T, lam is the pure error locator and its roots can only sit at accessed
positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from ._timing import phase
from .codec import CodeParams
from .gf import NEG_INF, FieldContext, Poly


class DuplicatePositionError(ValueError):
    """The same storage position was supplied twice."""


class WrongCountError(ValueError):
    """Wrong number of (position, symbol) pairs for this operation."""


class PositionNotErasedError(ValueError):
    """Syndrome sampling requested at a position outside the erased set."""


class ExhaustedPositionsError(RuntimeError):
    """Fewer than two un-accessed positions remain; no further stage possible."""


@dataclass(frozen=True)
class StepResult:
    """Outcome of one decoding stage."""

    success: bool
    trusted: tuple | None  # k_hat (position, symbol) pairs on success
    lam_degree: float
    reason: str  # "ok" | "degree-mismatch" | "root-count-mismatch"


class AccessGeometry:
    """Position-only precomputations shared by every group of a retrieval.

    T(alpha^j) for the initial positions and T'(alpha^i) for later ones
    depend only on which positions were fetched, not on the symbols, so
    one geometry serves all groups.
    """

    def __init__(self, params: CodeParams, init_positions: Sequence[int]):
        f = params.field
        init = [int(j) for j in init_positions]
        if len(init) != params.k_hat:
            raise WrongCountError(
                f"need k_hat={params.k_hat} initial positions, got {len(init)}")
        if len(set(init)) != len(init):
            raise DuplicatePositionError("duplicate initial position")
        if not all(0 <= j < params.n for j in init):
            raise ValueError("position out of range")
        self.params = params
        self.field = f
        self.init_exps = np.array(init, dtype=np.int64)
        self.u0 = np.array(sorted(set(range(params.n)) - set(init)),
                           dtype=np.int64)
        self.u0_set = frozenset(int(j) for j in self.u0)
        t_at_init = np.zeros(params.k_hat, dtype=np.int64)
        _kernels.prods_at(f.exp, f.log, f.n, self.init_exps, self.u0, t_at_init)
        # weight alpha^j * T(alpha^j): F_j is just r_j times this
        self.weights = f.mul_vec(f.exp[self.init_exps], t_at_init)
        self.t_at_init = t_at_init
        self._tprime: dict[int, int] = {}

    def tprime(self, pos: int) -> int:
        """T'(alpha^pos) = prod over other roots of (alpha^pos - alpha^j)."""
        cached = self._tprime.get(pos)
        if cached is None:
            f = self.field
            cached = int(_kernels.prod_diff(f.exp, f.log, f.n,
                                            int(f.exp[pos]), self.u0, pos))
            self._tprime[pos] = cached
        return cached


def wb_step(quad: tuple, x: int, y: int) -> tuple:
    """One Welch-Berlekamp update consuming the sample lam(x)*y = omega(x).

    quad is (lam, omega, phi, theta). On a zero discrepancy only the
    auxiliary pair picks up the factor (x - x_s); otherwise the pairs cross
    over. The lower-rank pair (rank = max(2 deg lam, 1 + 2 deg omega)) is
    kept in front, which preserves minimality of the returned interpolant.
    """
    lam, om, phi, th = quad
    f = lam.field
    b = om.eval(x) ^ f.mul(y, lam.eval(x))
    if b == 0:
        th = th.mul_linear(x)
        phi = phi.mul_linear(x)
    else:
        a = th.eval(x) ^ f.mul(y, phi.eval(x))
        new_th = om.mul_linear(x)
        new_phi = lam.mul_linear(x)
        om = om.scale(a).add_scaled(th, b)    # b*theta - a*omega (char 2)
        lam = lam.scale(a).add_scaled(phi, b)
        th, phi = new_th, new_phi
    if _rank(om, lam) > _rank(th, phi):
        lam, om, phi, th = phi, th, lam, om
    return lam, om, phi, th


def _rank(numer: Poly, denom: Poly):
    return max(2 * denom.degree, 1 + 2 * numer.degree)


def chien_count(lam: Poly, positions: Sequence[int]) -> set[int]:
    """Positions j among the given ones with lam(alpha^j) = 0."""
    if lam.is_zero():
        raise ValueError("Chien search needs a nonzero polynomial")
    f = lam.field
    pos = np.asarray(list(positions), dtype=np.int64)
    vals = lam.eval_many(f.exp[pos])
    return {int(p) for p, v in zip(pos, vals) if v == 0}


def erasure_decode(pairs: Sequence[tuple], params: CodeParams) -> np.ndarray:
    """Interpolate the unique degree < k_hat message through k_hat points.

    pairs are (position, symbol); O(k_hat^2) Newton interpolation, no
    matrix inversion. Distinct positions make the system nonsingular by
    construction.
    """
    if len(pairs) != params.k_hat:
        raise WrongCountError(f"need exactly k_hat={params.k_hat} pairs")
    positions = [int(p) for p, _ in pairs]
    if len(set(positions)) != len(positions):
        raise DuplicatePositionError("duplicate interpolation position")
    symbols = np.array([int(s) for _, s in pairs], dtype=np.int64)
    return erasure_decode_rows(positions, symbols[None, :], params)[0]


def erasure_decode_rows(positions: Sequence[int], symbols: np.ndarray,
                        params: CodeParams) -> np.ndarray:
    """Batched interpolation of many groups over one shared position set."""
    f = params.field
    xs = f.exp[np.asarray(list(positions), dtype=np.int64)].copy()
    assert np.unique(xs).size == xs.size, "interpolation points must be distinct"
    ys = np.ascontiguousarray(symbols, dtype=np.int64)
    out = np.zeros_like(ys)
    _kernels.newton_rows(f.exp, f.log, f.n, xs, ys, out)
    return out


class DecoderState:
    """All mutable state of one group's incremental decode.

    Single-owner: create via decoder_init, feed stages via ird_step. The
    polynomial quadruple starts at (lam, omega, phi, theta) = (1, 0, 0, 1)
    and always satisfies lam(x_s) * y_s = omega(x_s) for every consumed
    sample s.
    """

    def __init__(self, geometry: AccessGeometry, initial: Sequence[tuple]):
        params = geometry.params
        positions = [int(p) for p, _ in initial]
        if len(initial) != params.k_hat:
            raise WrongCountError(
                f"need k_hat={params.k_hat} initial pairs, got {len(initial)}")
        if list(geometry.init_exps) != positions:
            raise ValueError("initial pairs do not match the geometry")
        self.params = params
        self.field = params.field
        self.geometry = geometry
        self.r_init = np.array([int(s) for _, s in initial], dtype=np.int64)
        self.F = self.field.mul_vec(self.r_init, geometry.weights)
        self.accessed: list[tuple] = [(p, int(s)) for p, s in initial]
        self._symbol_at = {p: int(s) for p, s in initial}
        self.u_ell = set(geometry.u0_set)
        self.samples: list[tuple] = []
        self._sample_at: dict[int, int] = {}
        f = self.field
        self.lam = Poly.one(f)
        self.om = Poly.zero(f)
        self.phi = Poly.zero(f)
        self.th = Poly.one(f)
        self.ell = 0

    @property
    def wb(self) -> tuple:
        return self.lam, self.om, self.phi, self.th

    def syndrome_sample(self, pos: int) -> int:
        """Generalized syndrome S(alpha^pos); cached, never recomputed."""
        cached = self._sample_at.get(pos)
        if cached is not None:
            return cached
        if pos not in self.geometry.u0_set:
            raise PositionNotErasedError(f"position {pos} was never erased")
        if pos not in self._symbol_at:
            raise PositionNotErasedError(f"position {pos} not yet accessed")
        f = self.field
        g = self.geometry
        y = int(_kernels.syndrome_tail(f.exp, f.log, f.n, self.F,
                                       g.init_exps, pos))
        r = self._symbol_at[pos]
        y ^= f.mul(f.mul(r, int(f.exp[pos])), g.tprime(pos))
        self._sample_at[pos] = y
        return y

    def wb_update(self, x: int, y: int):
        """Consume one fresh sample point into the W-B recursion."""
        self.lam, self.om, self.phi, self.th = wb_step(self.wb, x, y)
        self.samples.append((x, y))

    def absorb(self, pos: int, symbol: int):
        """Record one freshly fetched symbol and feed its sample to W-B."""
        pos, symbol = int(pos), int(symbol)
        if pos not in self.u_ell:
            raise PositionNotErasedError(f"position {pos} not in the erased set")
        self.u_ell.discard(pos)
        self.accessed.append((pos, symbol))
        self._symbol_at[pos] = symbol
        y = self.syndrome_sample(pos)
        self.wb_update(int(self.field.exp[pos]), y)

    def ird_step(self, pair1: tuple, pair2: tuple, timer=None) -> StepResult:
        """Advance one stage with two freshly fetched (position, symbol) pairs.

        Returns success with the lexicographically smallest k_hat non-error
        accessed positions, or a continue verdict naming what failed.
        """
        if len(self.u_ell) < 2:
            raise ExhaustedPositionsError("fewer than 2 un-accessed positions")
        (j1, r1), (j2, r2) = pair1, pair2
        j1, j2 = int(j1), int(j2)
        if j1 == j2:
            raise DuplicatePositionError(f"position {j1} fetched twice")
        for j in (j1, j2):
            if j not in self.u_ell:
                raise PositionNotErasedError(f"position {j} not in the erased set")
        self.ell += 1
        with phase(timer, "elp"):
            self.absorb(j1, r1)
            self.absorb(j2, r2)
        if self.lam.degree != self.ell:
            return StepResult(False, None, self.lam.degree, "degree-mismatch")
        with phase(timer, "chien"):
            roots = chien_count(self.lam, [p for p, _ in self.accessed])
        if len(roots) > self.params.n - self.params.k_hat \
                or len(roots) != self.lam.degree:
            return StepResult(False, None, self.lam.degree, "root-count-mismatch")
        trusted = tuple(sorted(
            (p, s) for p, s in self.accessed if p not in roots))[: self.params.k_hat]
        return StepResult(True, trusted, self.lam.degree, "ok")


def decoder_init(params: CodeParams, initial: Sequence[tuple],
                 geometry: AccessGeometry | None = None) -> DecoderState:
    """Build decoding state from the k_hat initially accessed pairs.

    A shared AccessGeometry may be passed when many groups decode over the
    same fetched positions.
    """
    if geometry is None:
        geometry = AccessGeometry(params, [p for p, _ in initial])
    return DecoderState(geometry, initial)
