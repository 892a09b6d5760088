"""Invertible permutations of [0, m)."""

from __future__ import annotations

import numpy as np

from ..errors import BoundsError, ConfigError
from .intvector import IntVector


class Permutation:
    """A bijection on ``[0, m)`` with constant-time application both ways."""

    __slots__ = ("forward", "backward", "m")

    def __init__(self, forward):
        fwd = forward if isinstance(forward, IntVector) else IntVector.from_values(np.asarray(forward, dtype=np.int64))
        values = fwd.to_numpy().astype(np.int64)
        m = len(values)
        check = np.zeros(m, dtype=bool)
        check[values[(values >= 0) & (values < m)]] = True
        if not check.all():
            raise ConfigError("forward array is not a permutation")
        back = np.empty(m, dtype=np.int64)
        back[values] = np.arange(m, dtype=np.int64)
        self.m = m
        self.forward = fwd
        self.backward = IntVector.from_values(back, width=fwd.width)

    def __len__(self) -> int:
        return self.m

    def apply(self, i: int) -> int:
        if not 0 <= i < self.m:
            raise BoundsError(f"permutation index {i} outside [0, {self.m})")
        return self.forward[i]

    def invert(self, j: int) -> int:
        if not 0 <= j < self.m:
            raise BoundsError(f"permutation index {j} outside [0, {self.m})")
        return self.backward[j]

    def to_numpy(self) -> np.ndarray:
        return self.forward.to_numpy().astype(np.int64)
