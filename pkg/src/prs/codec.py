"""Data-node side: CRC framing, group encoding, shard assembly and shard files.

A payload is split into fixed-size bit chunks, each chunk gets a CRC-32 and
is packed into k_hat m-bit symbols (one information group). Every group is
encoded into n = 2^m - 1 coded symbols by evaluating its message polynomial
at the points alpha^0 .. alpha^(n-1); storage node j holds symbol j of every
group. The code is a pure evaluation (non-systematic) MDS code: any k_hat
symbol positions determine the group.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .gf import FieldContext

SHARD_MAGIC = b"PRS1"
_HEADER = struct.Struct("<4sBBHIIIIQ")  # magic, m, r, reserved, n, k, j, groups, payload_len

CRC_WIDTH = 32
_CRC_POLY_REFLECTED = 0xEDB88320  # 0x04C11DB7 bit-reversed


class GroupTooSmallError(ValueError):
    """k_hat * m must exceed the CRC width, or a group cannot hold its checksum."""


class ShardFormatError(ValueError):
    """Shard bytes do not parse as the expected file format."""


@dataclass(frozen=True)
class CodeParams:
    """Code geometry shared by every group of one payload."""

    field: FieldContext
    k_hat: int
    crc_width: int = CRC_WIDTH

    def __post_init__(self):
        if not 1 <= self.k_hat < self.field.n:
            raise ValueError(f"k_hat={self.k_hat} must satisfy 1 <= k_hat < n={self.field.n}")

    @property
    def n(self) -> int:
        return self.field.n

    @property
    def m(self) -> int:
        return self.field.m

    @property
    def bits_per_group(self) -> int:
        return self.k_hat * self.field.m

    @property
    def data_bits_per_group(self) -> int:
        return self.bits_per_group - self.crc_width

    def group_count(self, payload_byte_len: int) -> int:
        db = self.data_bits_per_group
        if db <= 0:
            raise GroupTooSmallError(
                f"k_hat*m = {self.bits_per_group} bits cannot hold a "
                f"{self.crc_width}-bit CRC")
        return max(1, -(-8 * payload_byte_len // db))


@dataclass
class Shard:
    """One storage node's coded symbols across all groups."""

    position: int
    symbols: np.ndarray  # int64, one element per group
    m: int
    n: int
    k_hat: int
    crc_width: int
    payload_byte_len: int

    @property
    def group_count(self) -> int:
        return int(self.symbols.size)

    def to_bytes(self) -> bytes:
        head = _HEADER.pack(SHARD_MAGIC, self.m, self.crc_width, 0, self.n,
                            self.k_hat, self.position, self.group_count,
                            self.payload_byte_len)
        return head + self.symbols.astype("<u2").tobytes()

    @classmethod
    def from_bytes(cls, raw: bytes) -> "Shard":
        if len(raw) < _HEADER.size:
            raise ShardFormatError("truncated shard header")
        magic, m, r, _res, n, k_hat, pos, groups, plen = _HEADER.unpack_from(raw)
        if magic != SHARD_MAGIC:
            raise ShardFormatError(f"bad magic {magic!r}")
        body = raw[_HEADER.size:]
        if len(body) != 2 * groups:
            raise ShardFormatError(
                f"expected {2 * groups} symbol bytes, found {len(body)}")
        if n != (1 << m) - 1 or not 0 <= pos < n:
            raise ShardFormatError("inconsistent header fields")
        symbols = np.frombuffer(body, dtype="<u2").astype(np.int64)
        return cls(position=pos, symbols=symbols, m=m, n=n, k_hat=k_hat,
                   crc_width=r, payload_byte_len=plen)

    def save(self, directory: Path) -> Path:
        path = Path(directory) / f"shard_{self.position:05d}.prs1"
        path.write_bytes(self.to_bytes())
        return path


def load_shard(path: Path) -> Shard:
    return Shard.from_bytes(Path(path).read_bytes())


def crc32_bits(bits: np.ndarray) -> int:
    """CRC-32 of a bit sequence fed in stream order to the reflected register.

    Standard parameters (poly 0x04C11DB7 reflected, init and final xor all
    ones). For whole bytes expanded LSB-first this is exactly zlib.crc32;
    the byte-aligned prefix is therefore delegated to zlib and only the
    sub-byte tail runs bit-serially.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    nbytes = bits.size // 8
    reg = zlib.crc32(np.packbits(bits[: 8 * nbytes], bitorder="little").tobytes())
    reg ^= 0xFFFFFFFF
    for b in bits[8 * nbytes:]:
        reg ^= int(b)
        reg = (reg >> 1) ^ _CRC_POLY_REFLECTED if reg & 1 else reg >> 1
    return reg ^ 0xFFFFFFFF


def bytes_to_bits(data: bytes) -> np.ndarray:
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bits_to_bytes(bits: np.ndarray) -> bytes:
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


def _int_to_bits(value: int, width: int) -> np.ndarray:
    return np.array([(value >> (width - 1 - t)) & 1 for t in range(width)],
                    dtype=np.uint8)


def _bits_to_int(bits: np.ndarray) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def _pack_symbols(bits: np.ndarray, k_hat: int, m: int) -> np.ndarray:
    """k_hat*m bits -> k_hat symbols, MSB of each symbol first."""
    weights = 1 << np.arange(m - 1, -1, -1, dtype=np.int64)
    return bits.reshape(k_hat, m).astype(np.int64) @ weights


def _unpack_symbols(u: np.ndarray, m: int) -> np.ndarray:
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    return (((np.asarray(u, dtype=np.int64)[:, None] >> shifts) & 1)
            .astype(np.uint8).reshape(-1))


def frame_payload(data: bytes, params: CodeParams) -> np.ndarray:
    """Split payload bits into CRC-protected groups of k_hat symbols.

    Returns a (group_count, k_hat) array. Each group holds
    data_bits_per_group payload bits (the last chunk zero-padded) followed
    by the chunk's CRC-32, packed m bits per symbol, MSB first.
    """
    groups = params.group_count(len(data))
    db = params.data_bits_per_group
    bits = bytes_to_bits(data)
    padded = np.zeros(groups * db, dtype=np.uint8)
    padded[: bits.size] = bits
    out = np.zeros((groups, params.k_hat), dtype=np.int64)
    for g in range(groups):
        chunk = padded[g * db: (g + 1) * db]
        group_bits = np.concatenate(
            [chunk, _int_to_bits(crc32_bits(chunk), params.crc_width)])
        out[g] = _pack_symbols(group_bits, params.k_hat, params.m)
    return out


def group_crc_ok(u: np.ndarray, params: CodeParams) -> bool:
    """Recompute the group's CRC over its data bits and compare."""
    if len(u) != params.k_hat:
        raise ValueError(f"group has {len(u)} symbols, expected {params.k_hat}")
    bits = _unpack_symbols(u, params.m)
    db = params.data_bits_per_group
    return crc32_bits(bits[:db]) == _bits_to_int(bits[db:])


def group_data_bits(u: np.ndarray, params: CodeParams) -> np.ndarray:
    bits = _unpack_symbols(u, params.m)
    return bits[: params.data_bits_per_group]


def encode_group(u: np.ndarray, params: CodeParams) -> np.ndarray:
    """Evaluate the group's message polynomial at alpha^0 .. alpha^(n-1)."""
    return encode_groups(np.asarray(u, dtype=np.int64)[None, :], params)[0]


def encode_groups(groups: np.ndarray, params: CodeParams) -> np.ndarray:
    groups = np.ascontiguousarray(groups, dtype=np.int64)
    if groups.ndim != 2 or groups.shape[1] != params.k_hat:
        raise ValueError("groups must be (G, k_hat)")
    f = params.field
    out = np.zeros((groups.shape[0], params.n), dtype=np.int64)
    _kernels.encode_rows(f.exp, f.log, f.n, groups, out)
    return out


def make_shards(groups: np.ndarray, params: CodeParams,
                payload_byte_len: int) -> list[Shard]:
    """Encode every group and slice the codeword matrix into per-node shards."""
    if len(groups) == 0:
        raise ValueError("need at least one group")
    coded = encode_groups(np.asarray(groups, dtype=np.int64), params)
    return [Shard(position=j, symbols=coded[:, j].copy(), m=params.m,
                  n=params.n, k_hat=params.k_hat, crc_width=params.crc_width,
                  payload_byte_len=payload_byte_len)
            for j in range(params.n)]


def parity_check(c: np.ndarray, params: CodeParams) -> bool:
    """True iff c(alpha^i) = 0 for i = 1 .. n - k_hat, with c(x) = sum c_j x^j.

    This is the membership test for the cyclic view of the evaluation code:
    its generator polynomial has alpha^1 .. alpha^(n-k_hat) as roots.
    """
    c = np.asarray(c, dtype=np.int64)
    if c.size != params.n:
        raise ValueError(f"codeword length {c.size} != n={params.n}")
    f = params.field
    points = f.exp[1: params.n - params.k_hat + 1].copy()
    out = np.zeros(points.size, dtype=np.int64)
    _kernels.eval_many(f.exp, f.log, f.n, c, points, out)
    return not out.any()
