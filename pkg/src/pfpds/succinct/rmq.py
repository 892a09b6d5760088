"""Range-minimum structures."""

from __future__ import annotations

import numpy as np

from ..errors import BoundsError

BLOCK = 32


def _argmin_table(values: np.ndarray) -> list[np.ndarray]:
    """Sparse table of leftmost argmins over power-of-two windows."""
    table = [np.arange(len(values), dtype=np.int64)]
    span = 1
    while 2 * span <= len(values):
        prev = table[-1]
        left = prev[: len(prev) - span]
        right = prev[span:]
        table.append(np.where(values[left] <= values[right], left, right))
        span *= 2
    return table


class RmqStructure:
    """Leftmost-argmin queries over a static integer array.

    A sparse table is kept over the minima of fixed 32-element blocks, and
    the partial blocks at both ends of a query are scanned directly. Space is
    linear in the array length.
    """

    __slots__ = ("array", "_block_arg", "_table", "_n")

    def __init__(self, array):
        arr = np.asarray(array)
        if arr.dtype.kind not in "iu":
            arr = arr.astype(np.int64)
        self.array = arr
        n = len(arr)
        self._n = n
        nblocks = (n + BLOCK - 1) // BLOCK
        padded = np.full(nblocks * BLOCK, np.iinfo(arr.dtype).max, dtype=arr.dtype)
        padded[:n] = self.array
        local = padded.reshape(nblocks, BLOCK).argmin(axis=1) if nblocks else np.zeros(0, np.int64)
        self._block_arg = np.arange(nblocks, dtype=np.int64) * BLOCK + local
        block_min = arr[self._block_arg] if nblocks else np.zeros(0, arr.dtype)
        del padded
        # Table entries index blocks; map through _block_arg on query.
        self._table = _argmin_table(block_min)

    def __len__(self) -> int:
        return self._n

    def _scan(self, l: int, r: int) -> int:
        return l + int(np.argmin(self.array[l : r + 1]))

    def query(self, l: int, r: int) -> int:
        """Index of the leftmost minimum of ``array[l..r]`` (inclusive)."""
        if not 0 <= l <= r < self._n:
            raise BoundsError(f"rmq range [{l}, {r}] outside [0, {self._n})")
        bl = l // BLOCK
        br = r // BLOCK
        if br - bl <= 1:
            return self._scan(l, r)
        arr = self.array
        best = self._scan(l, (bl + 1) * BLOCK - 1)
        lo_b, hi_b = bl + 1, br - 1
        k = (hi_b - lo_b + 1).bit_length() - 1
        lvl = self._table[k]
        c1 = int(self._block_arg[lvl[lo_b]])
        c2 = int(self._block_arg[lvl[hi_b - (1 << k) + 1]])
        if arr[c2] < arr[c1]:
            c1 = c2
        if arr[c1] < arr[best]:
            best = c1
        tail = self._scan(br * BLOCK, r)
        if arr[tail] < arr[best]:
            best = tail
        return best

    def nbytes(self) -> int:
        return int(self._block_arg.nbytes + sum(t.nbytes for t in self._table))


class SparseMinTable:
    """Minimum values over power-of-two windows, with binary-lifting searches.

    Used over the longest-common-suffix array of co-lexicographically adjacent
    phrases: the phrases sharing a suffix of length ``l`` with phrase ``c``
    form the maximal range around ``c`` in which every adjacent pair shares
    at least ``l`` characters.
    """

    __slots__ = ("values", "levels")

    def __init__(self, values):
        vals = np.asarray(values, dtype=np.int32)
        self.values = vals
        self.levels = [vals]
        span = 1
        while 2 * span <= len(vals):
            prev = self.levels[-1]
            self.levels.append(np.minimum(prev[: len(prev) - span], prev[span:]))
            span *= 2

    def range_min(self, l: int, r: int) -> int:
        k = (r - l + 1).bit_length() - 1
        lv = self.levels[k]
        return int(min(lv[l], lv[r - (1 << k) + 1]))

    def extend_left(self, c: int, bound: int) -> int:
        """Smallest x <= c with min(values[x+1..c]) >= bound."""
        pos = c
        for k in range(len(self.levels) - 1, -1, -1):
            cand = pos - (1 << k)
            if cand >= 0 and self.levels[k][cand + 1] >= bound:
                pos = cand
        return pos

    def extend_right(self, c: int, bound: int) -> int:
        """Largest x >= c with min(values[c+1..x]) >= bound."""
        pos = c
        n = len(self.values)
        for k in range(len(self.levels) - 1, -1, -1):
            if pos + (1 << k) <= n - 1 and self.levels[k][pos + 1] >= bound:
                pos += 1 << k
        return pos

    def extend_left_many(self, c: np.ndarray, bound: np.ndarray) -> np.ndarray:
        pos = np.asarray(c, dtype=np.int64).copy()
        for k in range(len(self.levels) - 1, -1, -1):
            cand = pos - (1 << k)
            ok = cand >= 0
            idx = np.where(ok, cand + 1, 0)
            ok &= self.levels[k][idx] >= bound
            pos = np.where(ok, cand, pos)
        return pos

    def extend_right_many(self, c: np.ndarray, bound: np.ndarray) -> np.ndarray:
        pos = np.asarray(c, dtype=np.int64).copy()
        n = len(self.values)
        for k in range(len(self.levels) - 1, -1, -1):
            ok = pos + (1 << k) <= n - 1
            idx = np.where(ok, pos + 1, 0)
            ok &= self.levels[k][np.minimum(idx, len(self.levels[k]) - 1)] >= bound
            pos = np.where(ok, pos + (1 << k), pos)
        return pos

    def range_min_many(self, l: np.ndarray, r: np.ndarray) -> np.ndarray:
        l = np.asarray(l, dtype=np.int64)
        r = np.asarray(r, dtype=np.int64)
        length = r - l + 1
        k = np.zeros(len(l), dtype=np.int64)
        pos = length > 0
        k[pos] = np.floor(np.log2(length[pos])).astype(np.int64)
        # Guard floating point rounding on exact powers of two.
        k -= (np.left_shift(1, k) > np.maximum(length, 1)).astype(np.int64)
        out = np.empty(len(l), dtype=np.int64)
        for kk in np.unique(k[pos]):
            sel = pos & (k == kk)
            lv = self.levels[int(kk)]
            out[sel] = np.minimum(lv[l[sel]], lv[r[sel] - (1 << int(kk)) + 1])
        return out

    def nbytes(self) -> int:
        return int(sum(lv.nbytes for lv in self.levels))
