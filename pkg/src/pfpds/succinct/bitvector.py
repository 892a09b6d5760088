"""Plain and Elias-Fano bitvectors with rank and select.

Two conventions live here:

* :class:`Bitvector` is an internal helper. ``ones_before(i)`` counts set
  bits in ``[0, i)`` and ``select1(j)`` / ``select0(j)`` are 1-based.
* :class:`SparseBitvector` is the public structure. ``rank1(i)`` counts set
  bits in ``[0, i]`` (inclusive) and ``select1(j)`` is 1-based, which keeps
  the index arithmetic of the query algorithms literal.
"""

from __future__ import annotations

import numpy as np

from ..errors import BoundsError, ConfigError
from .intvector import IntVector, IntVectorBuilder

_U64 = np.uint64


def _select_in_word(x: int, r: int) -> int:
    """Bit position of the r-th (1-based) set bit of ``x``."""
    for _ in range(r - 1):
        x &= x - 1
    return (x & -x).bit_length() - 1


class Bitvector:
    """Uncompressed bitvector backed by 64-bit words plus cumulative counts."""

    __slots__ = ("size", "words", "_cum", "_cum0", "_ones")

    def __init__(self, words: np.ndarray, size: int):
        words = np.ascontiguousarray(words, dtype=np.uint64)
        if len(words) != (size + 63) // 64:
            raise ConfigError("word count does not match bitvector size")
        self.size = size
        self.words = words
        counts = np.bitwise_count(words).astype(np.int64)
        self._cum = np.zeros(len(words) + 1, dtype=np.int64)
        np.cumsum(counts, out=self._cum[1:])
        self._cum0 = np.arange(len(words) + 1, dtype=np.int64) * 64 - self._cum
        self._ones = int(self._cum[-1])

    @classmethod
    def from_bools(cls, bits: np.ndarray) -> Bitvector:
        bits = np.asarray(bits, dtype=bool)
        packed = np.packbits(bits, bitorder="little")
        pad = (-len(packed)) % 8
        if pad:
            packed = np.concatenate([packed, np.zeros(pad, dtype=np.uint8)])
        words = packed.view("<u8")[: (len(bits) + 63) // 64]
        return cls(words.astype(np.uint64), len(bits))

    @classmethod
    def from_positions(cls, size: int, positions: np.ndarray) -> Bitvector:
        words = np.zeros((size + 63) // 64, dtype=np.uint64)
        pos = np.asarray(positions, dtype=np.int64)
        if pos.size:
            np.bitwise_or.at(words, pos >> 6, np.left_shift(_U64(1), (pos & 63).astype(np.uint64)))
        return cls(words, size)

    def __len__(self) -> int:
        return self.size

    @property
    def ones(self) -> int:
        return self._ones

    def get(self, i: int) -> int:
        return (int(self.words[i >> 6]) >> (i & 63)) & 1

    def ones_before(self, i: int) -> int:
        k = i >> 6
        r = i & 63
        c = int(self._cum[k])
        if r:
            c += (int(self.words[k]) & ((1 << r) - 1)).bit_count()
        return c

    def ones_before_many(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        k = idx >> 6
        r = (idx & 63).astype(np.uint64)
        words = self.words[np.minimum(k, len(self.words) - 1)] if len(self.words) else np.zeros(len(idx), np.uint64)
        mask = np.left_shift(_U64(1), r) - _U64(1)
        partial = np.bitwise_count(words & mask).astype(np.int64)
        return self._cum[k] + np.where(r > 0, partial, 0)

    def select1(self, j: int) -> int:
        if not 1 <= j <= self._ones:
            raise BoundsError(f"select1({j}) with {self._ones} ones")
        k = int(np.searchsorted(self._cum, j, side="left")) - 1
        return (k << 6) + _select_in_word(int(self.words[k]), j - int(self._cum[k]))

    def select0(self, j: int) -> int:
        if not 1 <= j <= self.size - self._ones:
            raise BoundsError(f"select0({j}) with {self.size - self._ones} zeros")
        k = int(np.searchsorted(self._cum0, j, side="left")) - 1
        inv = ~int(self.words[k]) & 0xFFFFFFFFFFFFFFFF
        return (k << 6) + _select_in_word(inv, j - int(self._cum0[k]))

    def to_bools(self) -> np.ndarray:
        bits = np.unpackbits(self.words.view(np.uint8), bitorder="little")[: self.size]
        return bits.astype(bool)

    def nbytes(self) -> int:
        return int(self.words.nbytes)


class SparseBitvector:
    """Elias-Fano encoded bitvector whose space depends on the number of ones.

    Each one-position ``v`` is split into ``low = v & (2**l - 1)``, stored in
    an :class:`IntVector`, and ``high = v >> l``, stored in unary in a plain
    bitvector as a set bit at ``high + k`` for the k-th one.
    """

    __slots__ = ("length", "count", "low_bits", "low", "high")

    def __init__(self, length: int, count: int, low_bits: int, low: IntVector | None, high: Bitvector):
        self.length = length
        self.count = count
        self.low_bits = low_bits
        self.low = low
        self.high = high

    @staticmethod
    def choose_low_bits(length: int, count: int) -> int:
        if count == 0 or length <= count:
            return 0
        return max(0, (length // count).bit_length() - 1)

    @classmethod
    def from_positions(cls, length: int, positions) -> SparseBitvector:
        pos = np.asarray(positions, dtype=np.int64)
        builder = SparseBitvectorBuilder(length, len(pos))
        builder.extend(pos)
        return builder.finish()

    @classmethod
    def from_bitstring(cls, bits: str) -> SparseBitvector:
        return cls.from_positions(len(bits), [i for i, ch in enumerate(bits) if ch == "1"])

    def __len__(self) -> int:
        return self.length

    def _low(self, k: int) -> int:
        return self.low[k] if self.low_bits else 0

    def _value(self, k: int) -> int:
        """Position of the k-th one, 0-based."""
        return ((self.high.select1(k + 1) - k) << self.low_bits) | self._low(k)

    def rank1(self, i: int) -> int:
        """Number of ones at positions ``<= i``."""
        if not 0 <= i < self.length:
            raise BoundsError(f"rank1({i}) on bitvector of length {self.length}")
        if self.count == 0:
            return 0
        lb = self.low_bits
        h = i >> lb
        # Ones with high part < h come before the h-th zero of the high vector.
        if h == 0:
            k = 0
            p = 0
        else:
            if h > self.high.size - self.count:
                return self.count
            p = self.high.select0(h) + 1
            k = p - h
        target = i & ((1 << lb) - 1)
        high = self.high
        low = self.low
        while k < self.count and high.get(p):
            if lb and low[k] > target:
                break
            k += 1
            p += 1
        return k

    def select1(self, j: int) -> int:
        """Position of the j-th one (1-based)."""
        if not 1 <= j <= self.count:
            raise BoundsError(f"select1({j}) with {self.count} ones")
        return self._value(j - 1)

    def get(self, i: int) -> int:
        r = self.rank1(i)
        return int(r > 0 and self.select1(r) == i)

    def ones(self) -> np.ndarray:
        """All one-positions as an int64 array."""
        if self.count == 0:
            return np.zeros(0, dtype=np.int64)
        bits = self.high.to_bools()
        hp = np.flatnonzero(bits).astype(np.int64)
        high = hp - np.arange(self.count, dtype=np.int64)
        low = self.low.to_numpy().astype(np.int64) if self.low_bits else 0
        return (high << self.low_bits) | low

    def to_bitstring(self) -> str:
        out = bytearray(b"0" * self.length)
        for p in self.ones():
            out[int(p)] = ord("1")
        return out.decode()

    def nbytes(self) -> int:
        return self.high.nbytes() + (self.low.nbytes() if self.low is not None else 0)

    def __repr__(self) -> str:
        return f"SparseBitvector(length={self.length}, ones={self.count})"


class SparseBitvectorBuilder:
    """Streams sorted one-positions into an Elias-Fano bitvector."""

    def __init__(self, length: int, count: int):
        if count > length:
            raise ConfigError("more ones than positions")
        self.length = length
        self.count = count
        self.low_bits = SparseBitvector.choose_low_bits(length, count)
        self._low = IntVectorBuilder(self.low_bits, count) if self.low_bits else None
        self._high_size = count + (length >> self.low_bits) + 1
        self._high = np.zeros((self._high_size + 63) // 64, dtype=np.uint64)
        self._seen = 0
        self._last = -1

    def extend(self, positions: np.ndarray) -> None:
        pos = np.asarray(positions, dtype=np.int64)
        if not len(pos):
            return
        if pos[0] <= self._last or (len(pos) > 1 and np.any(np.diff(pos) <= 0)):
            raise ConfigError("one-positions must be strictly increasing")
        if pos[-1] >= self.length:
            raise BoundsError(f"position {int(pos[-1])} beyond length {self.length}")
        if self._seen + len(pos) > self.count:
            raise BoundsError("more positions than declared")
        k = np.arange(self._seen, self._seen + len(pos), dtype=np.int64)
        hb = (pos >> self.low_bits) + k
        np.bitwise_or.at(self._high, hb >> 6, np.left_shift(_U64(1), (hb & 63).astype(np.uint64)))
        if self._low is not None:
            self._low.extend(pos & ((1 << self.low_bits) - 1))
        self._seen += len(pos)
        self._last = int(pos[-1])

    def finish(self) -> SparseBitvector:
        if self._seen != self.count:
            raise BoundsError(f"declared {self.count} ones, received {self._seen}")
        low = self._low.finish() if self._low is not None else None
        return SparseBitvector(self.length, self.count, self.low_bits, low, Bitvector(self._high, self._high_size))
