"""GF(2^m) arithmetic and univariate polynomials over it.

Elements are plain ints in {0 .. 2^m - 1}; addition is XOR, multiplication
and inversion go through double-length log/antilog tables so the hot loops
never reduce mod n. A ``FieldContext`` is immutable after construction and
safe to share across threads.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from . import _kernels

NEG_INF = float("-inf")
"""Degree of the zero polynomial; compares below every integer."""

# Standard primitive polynomials, one per supported width. Any of them can
# be overridden at construction; primitivity is always re-verified.
DEFAULT_PRIMITIVE_POLYS = {
    3: 0b1011,           # x^3 + x + 1
    4: 0b10011,          # x^4 + x + 1
    5: 0b100101,         # x^5 + x^2 + 1
    6: 0b1000011,        # x^6 + x + 1
    7: 0b10001001,       # x^7 + x^3 + 1
    8: 0x11D,            # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,     # x^9 + x^4 + 1
    10: 0b10000001001,   # x^10 + x^3 + 1
    11: 0b100000000101,  # x^11 + x^2 + 1
    12: 0b1000001010011,  # x^12 + x^6 + x^4 + x + 1
    13: 0b10000000011011,  # x^13 + x^4 + x^3 + x + 1
    14: 0b100010001000011,  # x^14 + x^10 + x^6 + x + 1
    15: 0b1000000000000011,  # x^15 + x + 1
    16: 0x1100B,         # x^16 + x^12 + x^3 + x + 1
}


class UnsupportedWidthError(ValueError):
    """Symbol width m outside the supported 3..16 range."""


class NotPrimitiveError(ValueError):
    """The given polynomial does not generate the full multiplicative group."""


class FieldContext:
    """Tables and parameters of one GF(2^m) instance.

    Attributes:
        m: symbol width in bits.
        n: 2^m - 1, the multiplicative group order (and codeword length).
        prim_poly: the primitive polynomial, as an (m+1)-bit integer.
        exp: int64 array of 2n entries, exponent -> element, period n.
        log: int64 array of n+1 entries, nonzero element -> exponent.
    """

    def __init__(self, m: int, prim_poly: int | None = None):
        if not 3 <= m <= 16:
            raise UnsupportedWidthError(f"m={m} not supported (need 3 <= m <= 16)")
        if prim_poly is None:
            prim_poly = DEFAULT_PRIMITIVE_POLYS[m]
        if prim_poly >> m != 1:
            raise ValueError(f"prim_poly 0x{prim_poly:X} does not have degree {m}")
        self.m = m
        self.n = (1 << m) - 1
        self.prim_poly = prim_poly
        n = self.n
        exp = np.zeros(2 * n, dtype=np.int64)
        log = np.full(n + 1, -1, dtype=np.int64)
        x = 1
        for i in range(n):
            if log[x] != -1:
                # power sequence of x cycled before covering the group
                raise NotPrimitiveError(
                    f"0x{prim_poly:X} is not primitive: x has order {i}")
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & (1 << m):
                x ^= prim_poly
        if x != 1:
            raise NotPrimitiveError(f"0x{prim_poly:X} is not primitive")
        log[0] = 0  # never consulted; kernels branch on zero first
        exp[n:] = exp[:n]
        self.exp = exp
        self.log = log
        self.alpha = int(exp[1])
        exp.setflags(write=False)
        log.setflags(write=False)

    def __repr__(self):
        return f"FieldContext(m={self.m}, prim_poly=0x{self.prim_poly:X})"

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    sub = add  # characteristic 2

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF(2^m)")
        return int(self.exp[self.n - self.log[a]])

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by 0 in GF(2^m)")
        if a == 0:
            return 0
        return int(self.exp[(self.log[a] - self.log[b]) % self.n])

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("0 raised to a negative power")
            return 0
        return int(self.exp[(int(self.log[a]) * e) % self.n])

    def mul_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise product of two arrays of field elements."""
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64),
                                   np.asarray(b, dtype=np.int64))
        out = np.zeros(a.shape, dtype=np.int64)
        mask = (a != 0) & (b != 0)
        out[mask] = self.exp[self.log[a[mask]] + self.log[b[mask]]]
        return out

    def prod_diff(self, point: int, others: Iterable[int], skip: int = -1) -> int:
        """prod over j in others of (point - alpha^j), optionally skipping one j.

        Zero exactly when point coincides with one of the alpha^j.
        """
        exps = np.asarray(list(others) if not isinstance(others, np.ndarray)
                          else others, dtype=np.int64)
        if exps.size == 0:
            return 1
        return int(_kernels.prod_diff(self.exp, self.log, self.n, point, exps,
                                      skip))


class Poly:
    """Dense univariate polynomial over a FieldContext, lowest degree first.

    The zero polynomial has an empty coefficient array and degree NEG_INF
    so that degree comparisons (the W-B rank rule in particular) stay total.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldContext, coeffs: Sequence[int] | np.ndarray = ()):
        self.field = field
        arr = np.asarray(coeffs, dtype=np.int64)
        nz = np.nonzero(arr)[0]
        self.coeffs = arr[: nz[-1] + 1].copy() if nz.size else np.zeros(0, np.int64)

    @classmethod
    def zero(cls, field: FieldContext) -> "Poly":
        return cls(field, ())

    @classmethod
    def one(cls, field: FieldContext) -> "Poly":
        return cls(field, (1,))

    @classmethod
    def from_root_exps(cls, field: FieldContext, exps: Iterable[int]) -> "Poly":
        """Monic polynomial with roots alpha^e for every e in exps."""
        e = np.asarray(list(exps), dtype=np.int64)
        out = np.zeros(e.size + 1, dtype=np.int64)
        _kernels.expand_roots(field.exp, field.log, field.n, e, out)
        return cls(field, out)

    @property
    def degree(self):
        return int(self.coeffs.size - 1) if self.coeffs.size else NEG_INF

    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    def eval(self, x: int) -> int:
        if self.coeffs.size == 0:
            return 0
        f = self.field
        return int(_kernels.eval_one(f.exp, f.log, f.n, self.coeffs, x))

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        out = np.zeros(xs.size, dtype=np.int64)
        if self.coeffs.size:
            f = self.field
            _kernels.eval_many(f.exp, f.log, f.n, self.coeffs, xs, out)
        return out

    def mul_linear(self, a: int) -> "Poly":
        """Multiply by (x - a)."""
        if self.coeffs.size == 0:
            return Poly.zero(self.field)
        res = np.zeros(self.coeffs.size + 1, dtype=np.int64)
        res[1:] ^= self.coeffs
        res[:-1] ^= _scale(self.field, self.coeffs, a)
        return Poly(self.field, res)

    def add_scaled(self, q: "Poly", s: int) -> "Poly":
        """self + s * q."""
        sq = _scale(self.field, q.coeffs, s)
        if sq.size < self.coeffs.size:
            res = self.coeffs.copy()
            res[: sq.size] ^= sq
        else:
            res = sq.copy()
            res[: self.coeffs.size] ^= self.coeffs
        return Poly(self.field, res)

    def scale(self, s: int) -> "Poly":
        return Poly(self.field, _scale(self.field, self.coeffs, s))

    def derivative(self) -> "Poly":
        """Formal derivative; in characteristic 2 only odd-degree terms survive."""
        c = self.coeffs
        out = np.zeros(max(c.size - 1, 0), dtype=np.int64)
        out[0::2] = c[1::2]
        return Poly(self.field, out)

    def __eq__(self, other):
        return (isinstance(other, Poly)
                and np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"Poly({list(self.coeffs)})"


def _scale(field: FieldContext, coeffs: np.ndarray, s: int) -> np.ndarray:
    if s == 0 or coeffs.size == 0:
        return np.zeros(0 if s == 0 else coeffs.size, dtype=np.int64)
    if s == 1:
        return coeffs.copy()
    out = np.zeros(coeffs.size, dtype=np.int64)
    mask = coeffs != 0
    out[mask] = field.exp[field.log[coeffs[mask]] + field.log[s]]
    return out
