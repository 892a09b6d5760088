"""Wavelet structure over a sequence of co-lexicographic phrase ranks.

The sequence ``seq`` (one symbol per parse-BWT position) is viewed as a grid
with positions on one axis and symbols on the other. We store the grid
transposed: ``X`` lists the positions of symbol 0 in increasing order, then
the positions of symbol 1, and so on, and ``C[c]`` is the offset of symbol
``c``'s block in ``X``. ``X`` is a permutation of ``[0, m)`` kept in a
wavelet matrix, so

* counting elements of a symbol range ``[lo, hi]`` among the first ``j``
  positions is a rank query ("values < j") over ``X[C[lo]:C[hi+1]]``;
* selecting the j-th occurrence of that symbol range in sequence order is a
  range-quantile query over the same slice.

Both take one pass over the ``ceil(log2 m)`` levels.
"""

from __future__ import annotations

import numpy as np

from ..errors import BoundsError, ConfigError, NotFoundError
from .bitvector import Bitvector


class WaveletTree:
    """Counting and range selection over ``sequence`` with symbols in [0, sigma)."""

    __slots__ = ("m", "sigma", "nbits", "levels", "zeros", "C", "_C_list")

    def __init__(self, m: int, sigma: int, levels: list[Bitvector], C: np.ndarray):
        self.m = m
        self.sigma = sigma
        self.nbits = len(levels)
        self.levels = levels
        self.zeros = [lv.size - lv.ones for lv in levels]
        self.C = np.asarray(C, dtype=np.int64)
        self._C_list = self.C.tolist()

    @classmethod
    def from_sequence(cls, sequence, sigma: int | None = None) -> WaveletTree:
        seq = np.asarray(sequence, dtype=np.int64)
        if seq.size and seq.min() < 0:
            raise ConfigError("wavelet symbols must be non-negative")
        if sigma is None:
            sigma = int(seq.max()) + 1 if seq.size else 0
        if seq.size and seq.max() >= sigma:
            raise ConfigError("symbol outside [0, sigma)")
        counts = np.bincount(seq, minlength=sigma)
        C = np.zeros(sigma + 1, dtype=np.int64)
        np.cumsum(counts, out=C[1:])
        X = np.argsort(seq, kind="stable")
        return cls.from_grid(X, C)

    @classmethod
    def from_grid(cls, X: np.ndarray, C: np.ndarray) -> WaveletTree:
        m = len(X)
        nbits = max(1, (m - 1).bit_length())
        cur = np.asarray(X, dtype=np.int64)
        levels = []
        for lvl in range(nbits):
            shift = nbits - 1 - lvl
            bits = ((cur >> shift) & 1).astype(bool)
            levels.append(Bitvector.from_bools(bits))
            cur = np.concatenate([cur[~bits], cur[bits]])
        return cls(m, len(C) - 1, levels, C)

    def __len__(self) -> int:
        return self.m

    # -- transposed-grid primitives -------------------------------------------

    def _count_less(self, a: int, b: int, v: int) -> int:
        """Number of values < v in X[a:b]."""
        if v <= 0 or a >= b:
            return 0
        if v >= self.m:
            return b - a
        res = 0
        nb = self.nbits
        for lvl in range(nb):
            bv = self.levels[lvl]
            ra = bv.ones_before(a)
            rb = bv.ones_before(b)
            if (v >> (nb - 1 - lvl)) & 1:
                # Everything going left (bit 0) is smaller than v.
                res += (b - a) - (rb - ra)
                z = self.zeros[lvl]
                a, b = z + ra, z + rb
            else:
                a, b = a - ra, b - rb
        return res

    def _quantile(self, a: int, b: int, k: int) -> int:
        """The k-th smallest (0-based) value in X[a:b]."""
        val = 0
        nb = self.nbits
        for lvl in range(nb):
            bv = self.levels[lvl]
            ra = bv.ones_before(a)
            rb = bv.ones_before(b)
            left = (b - a) - (rb - ra)
            if k < left:
                a, b = a - ra, b - rb
            else:
                k -= left
                z = self.zeros[lvl]
                a, b = z + ra, z + rb
                val |= 1 << (nb - 1 - lvl)
        return val

    def _position_of_value(self, v: int) -> int:
        """Index p with X[p] == v (X is a permutation)."""
        a, b = 0, self.m
        nb = self.nbits
        for lvl in range(nb):
            bv = self.levels[lvl]
            if (v >> (nb - 1 - lvl)) & 1:
                z = self.zeros[lvl]
                a, b = z + bv.ones_before(a), z + bv.ones_before(b)
            else:
                a, b = a - bv.ones_before(a), b - bv.ones_before(b)
        p = a
        for lvl in range(nb - 1, -1, -1):
            bv = self.levels[lvl]
            if (v >> (nb - 1 - lvl)) & 1:
                p = bv.select1(p - self.zeros[lvl] + 1)
            else:
                p = bv.select0(p + 1)
        return p

    # -- public contract -------------------------------------------------------

    def access(self, i: int) -> int:
        """Symbol at sequence position i."""
        if not 0 <= i < self.m:
            raise BoundsError(f"access({i}) on sequence of length {self.m}")
        p = self._position_of_value(i)
        lo, hi = 0, self.sigma
        C = self._C_list
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if C[mid] <= p:
                lo = mid
            else:
                hi = mid
        return lo

    def count_prefix(self, j: int, r: int) -> int:
        """|{i < j : sequence[i] >= r}|."""
        if not 0 <= j <= self.m:
            raise BoundsError(f"prefix length {j} outside [0, {self.m}]")
        if not 0 <= r < max(self.sigma, 1):
            raise BoundsError(f"symbol threshold {r} outside [0, {self.sigma})")
        return self._count_less(self._C_list[r], self.m, j)

    def count_range(self, j: int, lo: int, hi: int) -> int:
        """|{i < j : lo <= sequence[i] <= hi}|."""
        if not 0 <= j <= self.m:
            raise BoundsError(f"prefix length {j} outside [0, {self.m}]")
        if not 0 <= lo <= hi < self.sigma:
            raise BoundsError(f"invalid symbol range [{lo}, {hi}] for sigma {self.sigma}")
        return self._count_less(self._C_list[lo], self._C_list[hi + 1], j)

    def select_range(self, lo: int, hi: int, j: int) -> int:
        """Position of the (j+1)-th element whose symbol lies in [lo, hi]."""
        if not 0 <= lo <= hi < self.sigma:
            raise BoundsError(f"invalid symbol range [{lo}, {hi}] for sigma {self.sigma}")
        a, b = self._C_list[lo], self._C_list[hi + 1]
        if not 0 <= j < b - a:
            raise NotFoundError(f"range [{lo}, {hi}] has {b - a} occurrences, asked for index {j}")
        return self._quantile(a, b, j)

    def grid(self) -> np.ndarray:
        """Reconstruct X (positions grouped by symbol)."""
        pos = np.arange(self.m, dtype=np.int64)
        val = np.zeros(self.m, dtype=np.int64)
        for lvl in range(self.nbits):
            bv = self.levels[lvl]
            bits = bv.to_bools()[pos]
            ones = bv.ones_before_many(pos)
            val |= bits.astype(np.int64) << (self.nbits - 1 - lvl)
            pos = np.where(bits, self.zeros[lvl] + ones, pos - ones)
        return val

    def to_numpy(self) -> np.ndarray:
        """Reconstruct the plain sequence."""
        X = self.grid()
        seq = np.empty(self.m, dtype=np.int64)
        seq[X] = np.repeat(np.arange(self.sigma, dtype=np.int64), np.diff(self.C))
        return seq

    def nbytes(self) -> int:
        return sum(lv.nbytes() for lv in self.levels) + int(self.C.nbytes)
