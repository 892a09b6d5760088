"""Fixed-width packed integer arrays."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from ..errors import BoundsError, ConfigError

# Values per packing chunk. A multiple of 64 so every chunk starts on a word
# boundary whatever the width.
_CHUNK = 1 << 16


def bits_needed(max_value: int) -> int:
    """Smallest width able to store ``max_value`` (at least one bit)."""
    return max(1, int(max_value).bit_length())


def _pack_chunk(values: np.ndarray, width: int) -> np.ndarray:
    """Pack values into words, value i at bit offset i*width of the result."""
    v = values.astype(np.uint64)
    if width < 64:
        v &= np.uint64((1 << width) - 1)
    words = np.zeros((len(v) * width + 63) // 64, dtype=np.uint64)
    off = np.arange(len(v), dtype=np.uint64) * np.uint64(width)
    k = (off >> np.uint64(6)).astype(np.intp)
    s = off & np.uint64(63)
    np.bitwise_or.at(words, k, v << s)
    spill = (s + np.uint64(width)) > np.uint64(64)
    if spill.any():
        np.bitwise_or.at(words, k[spill] + 1, v[spill] >> (np.uint64(64) - s[spill]))
    return words


class IntVector:
    """An array of ``size`` unsigned integers, each stored in ``width`` bits.

    Values live in little-endian 64-bit words, value ``i`` occupying bits
    ``[i*width, (i+1)*width)`` of the word stream.
    """

    __slots__ = ("width", "size", "words", "_mask")

    def __init__(self, width: int, size: int, words: np.ndarray):
        if not 1 <= width <= 64:
            raise ConfigError(f"width must be in [1, 64], got {width}")
        need = (size * width + 63) // 64
        if len(words) != need:
            raise ConfigError(f"expected {need} words for {size}x{width} bits, got {len(words)}")
        self.width = width
        self.size = size
        self.words = np.ascontiguousarray(words, dtype=np.uint64)
        self._mask = (1 << width) - 1

    @classmethod
    def from_values(cls, values: Iterable[int] | np.ndarray, width: int | None = None) -> IntVector:
        arr = np.asarray(values if isinstance(values, np.ndarray) else list(values))
        if arr.size and int(arr.min()) < 0:
            raise ConfigError("IntVector stores unsigned values only")
        top = int(arr.max()) if arr.size else 0
        if width is None:
            width = bits_needed(top)
        elif top >> width:
            raise ConfigError(f"value {top} does not fit in {width} bits")
        builder = IntVectorBuilder(width, len(arr))
        builder.extend(arr)
        return builder.finish()

    def __len__(self) -> int:
        return self.size

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.size:
            raise BoundsError(f"index {i} out of range [0, {self.size})")
        off = i * self.width
        k = off >> 6
        s = off & 63
        v = int(self.words[k]) >> s
        if s + self.width > 64:
            v |= int(self.words[k + 1]) << (64 - s)
        return v & self._mask

    def get_many(self, idx: np.ndarray) -> np.ndarray:
        """Vectorized access for an array of indices."""
        idx = np.asarray(idx, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= self.size):
            raise BoundsError("index array out of range")
        return self._decode(idx)

    def _decode(self, idx: np.ndarray) -> np.ndarray:
        off = idx.astype(np.uint64) * np.uint64(self.width)
        k = (off >> np.uint64(6)).astype(np.intp)
        s = off & np.uint64(63)
        out = self.words[k] >> s
        # Values straddling a word boundary take their high bits from the next word.
        spill = np.flatnonzero((s + np.uint64(self.width)) > np.uint64(64))
        if len(spill):
            out[spill] |= self.words[k[spill] + 1] << (np.uint64(64) - s[spill])
        if self.width < 64:
            out &= np.uint64(self._mask)
        return out

    def to_numpy(self) -> np.ndarray:
        """Decode every value as a uint64 array."""
        out = np.empty(self.size, dtype=np.uint64)
        for a in range(0, self.size, _CHUNK):
            b = min(self.size, a + _CHUNK)
            out[a:b] = self._decode(np.arange(a, b, dtype=np.int64))
        return out

    def nbytes(self) -> int:
        return int(self.words.nbytes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntVector):
            return NotImplemented
        return (self.width, self.size) == (other.width, other.size) and np.array_equal(self.words, other.words)

    def __repr__(self) -> str:
        return f"IntVector(width={self.width}, size={self.size})"


class IntVectorBuilder:
    """Packs values chunk by chunk into a preallocated word array.

    Used by the builder to stream large tables without materializing an
    intermediate int64 array of the whole table.
    """

    def __init__(self, width: int, size: int):
        self.width = width
        self.size = size
        self.words = np.zeros((size * width + 63) // 64, dtype=np.uint64)
        self._filled = 0
        self._pending: list[np.ndarray] = []
        self._pending_len = 0

    def extend(self, values: np.ndarray) -> None:
        values = np.asarray(values)
        if not len(values):
            return
        self._pending.append(values)
        self._pending_len += len(values)
        if self._pending_len >= _CHUNK:
            self._flush(final=False)

    def _flush(self, final: bool) -> None:
        if not self._pending:
            return
        buf = np.concatenate(self._pending) if len(self._pending) > 1 else self._pending[0]
        usable = len(buf) if final else (len(buf) // _CHUNK) * _CHUNK
        for a in range(0, usable, _CHUNK):
            chunk = buf[a : min(usable, a + _CHUNK)]
            self._write(chunk)
        rest = buf[usable:]
        self._pending = [rest] if len(rest) else []
        self._pending_len = len(rest)

    def _write(self, chunk: np.ndarray) -> None:
        if self._filled + len(chunk) > self.size:
            raise BoundsError("IntVectorBuilder overflow")
        packed = _pack_chunk(chunk, self.width)
        w0 = (self._filled * self.width) // 64
        n_words = (len(chunk) * self.width + 63) // 64
        self.words[w0 : w0 + n_words] = packed[:n_words]
        self._filled += len(chunk)

    def finish(self) -> IntVector:
        self._flush(final=True)
        if self._filled != self.size:
            raise BoundsError(f"IntVectorBuilder filled {self._filled} of {self.size} values")
        return IntVector(self.width, self.size, self.words)
