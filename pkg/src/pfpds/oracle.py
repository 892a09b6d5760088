"""Brute-force reference implementations used as ground truth in tests."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cmp_to_key

import numpy as np

from .errors import BoundsError, OracleSizeError

MAX_ORACLE_N = 10**6
_SLICE_LIMIT = 4_000_000  # n*n budget for the key-slice sort


@dataclass(frozen=True)
class OracleIndex:
    text: bytes
    sa: np.ndarray
    isa: np.ndarray
    lcp: np.ndarray
    bwt: bytes

    @property
    def n(self) -> int:
        return len(self.text)


def _rotation_order(text: bytes) -> list[int]:
    n = len(text)
    if n * n <= _SLICE_LIMIT:
        doubled = text + text
        return sorted(range(n), key=lambda i: doubled[i : i + n])
    doubled = text + text

    def cmp(i: int, j: int) -> int:
        step = 64
        k = 0
        while k < n:
            a = doubled[i + k : i + min(n, k + step)]
            b = doubled[j + k : j + min(n, k + step)]
            if a != b:
                return -1 if a < b else 1
            k += step
            step *= 2
        return 0

    return sorted(range(n), key=cmp_to_key(cmp))


def oracle_lce(text: bytes, i: int, j: int) -> int:
    """Longest common prefix of the finite suffixes text[i:] and text[j:]."""
    n = len(text)
    if not (0 <= i < n and 0 <= j < n):
        raise BoundsError(f"positions ({i}, {j}) outside [0, {n})")
    k = 0
    limit = n - max(i, j)
    while k < limit and text[i + k] == text[j + k]:
        k += 1
    return k


def oracle_build(text: bytes) -> OracleIndex:
    """Sort all rotations of ``text`` and derive ISA, LCP and BWT."""
    n = len(text)
    if n > MAX_ORACLE_N:
        raise OracleSizeError(f"oracle refuses n={n} > {MAX_ORACLE_N}")
    sa = np.asarray(_rotation_order(text), dtype=np.int64)
    isa = np.empty(n, dtype=np.int64)
    isa[sa] = np.arange(n, dtype=np.int64)
    lcp = np.zeros(n, dtype=np.int64)
    for r in range(1, n):
        lcp[r] = oracle_lce(text, int(sa[r - 1]), int(sa[r]))
    bwt = bytes(text[(int(p) - 1) % n] for p in sa)
    return OracleIndex(bytes(text), sa, isa, lcp, bwt)
