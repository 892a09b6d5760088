"""Text preparation, trigger detection and prefix-free parsing.

A prepared text ``S`` is the raw input followed by ``w`` copies of the
sentinel byte 0x01. ``S`` is treated as cyclic and the cyclic start is the
sentinel window at ``n - w``. A window ``S[i:i+w]`` with ``0 <= i < n - w`` is
a trigger when its Karp-Rabin hash is divisible by ``p`` (hash mode) or its
content belongs to a fixed set (explicit mode). The sentinel window is always
a trigger. Phrases run from one trigger to the end of the next one, so
consecutive phrases overlap by exactly ``w`` bytes.

Phrase ``q`` of the parse starts at ``cstart[q]`` where ``cstart[0] = -w``
(the sentinel window, written as a negative offset so that starts increase)
and ``cstart[m] = n - w``. It contains text positions ``cstart[q]`` up to
``cstart[q+1] - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import AlphabetError, ConfigError, CorruptionError

SENTINEL = 0x01
RESERVED_LIMIT = 0x03  # bytes below this value are reserved
MERSENNE61 = (1 << 61) - 1
DEFAULT_BASE = 0x1F3D5B79A7C3E1
DEFAULT_W = 10
DEFAULT_P = 100

_HASH_CHUNK = 1 << 19
_MASK32 = np.uint64(0xFFFFFFFF)
_MASK29 = np.uint64((1 << 29) - 1)
_M61 = np.uint64(MERSENNE61)


# ---------------------------------------------------------------------------
# Text preparation


@dataclass(frozen=True)
class Text:
    """A prepared text: raw bytes (possibly recoded) plus ``w`` sentinels.

    ``symbols`` maps every internal byte value back to the byte shown to
    users. It is the identity table unless the input was remapped or a
    sentinel alias was used. The sentinel itself displays as ``$`` when no
    alias was given.
    """

    data: bytes
    w: int
    symbols: bytes = field(default=bytes(range(256)), repr=False)
    sentinel_alias: int | None = None
    encoding: bytes = field(default=bytes(range(256)), repr=False)

    def __post_init__(self) -> None:
        if self.w < 1:
            raise ConfigError("w must be at least 1")
        if len(self.data) < self.w + 1:
            raise ConfigError("a prepared text holds at least one byte plus w sentinels")
        if self.data[-self.w :] != bytes([SENTINEL]) * self.w:
            raise CorruptionError("prepared text must end with w sentinel bytes")

    @property
    def n(self) -> int:
        return len(self.data)

    def encode(self, raw: bytes) -> bytes:
        """Map user bytes (e.g. explicit trigger strings) to internal bytes."""
        return raw.translate(self.encoding)

    def display(self, data: bytes) -> bytes:
        """Map internal bytes back to user-visible bytes."""
        return data.translate(self.symbols)


def _default_symbols(alias: int | None) -> bytearray:
    table = bytearray(range(256))
    table[SENTINEL] = alias if alias is not None else ord("$")
    return table


def prepare_text(
    raw: bytes,
    w: int,
    remap: bool = False,
    sentinel_alias: bytes | int | None = None,
) -> Text:
    """Append ``w`` sentinels to ``raw`` after validating its alphabet.

    ``remap`` shifts the alphabet into the non-reserved range with an
    order-preserving dense mapping when reserved bytes are present.
    ``sentinel_alias`` names an input byte that stands for the sentinel
    itself, so a text like ``...GATA##`` can be indexed with ``#`` playing
    the terminator role.
    """
    if not raw:
        raise ConfigError("input text is empty")
    if w < 1:
        raise ConfigError("w must be at least 1")
    raw = bytes(raw)
    alias = None
    if sentinel_alias is not None:
        alias = sentinel_alias if isinstance(sentinel_alias, int) else bytes(sentinel_alias)[0]
        if isinstance(sentinel_alias, (bytes, bytearray)) and len(sentinel_alias) != 1:
            raise ConfigError("sentinel alias must be a single byte")

    present = np.zeros(256, dtype=bool)
    present[np.frombuffer(raw, dtype=np.uint8)] = True
    if alias is not None:
        present[alias] = False
    encoding = bytearray(range(256))
    symbols = _default_symbols(alias)
    if present[:RESERVED_LIMIT].any():
        if not remap:
            bad = int(np.flatnonzero(present[:RESERVED_LIMIT])[0])
            raise AlphabetError(f"input contains reserved byte 0x{bad:02x}; use remap to shift the alphabet")
        used = np.flatnonzero(present)
        if len(used) > 256 - RESERVED_LIMIT:
            raise AlphabetError("alphabet too large to remap above the reserved range")
        for code, byte in enumerate(used.tolist(), start=RESERVED_LIMIT):
            encoding[byte] = code
            symbols[code] = byte
    if alias is not None:
        encoding[alias] = SENTINEL
    data = raw.translate(bytes(encoding)) + bytes([SENTINEL]) * w

    if alias is not None:
        run = bytes([SENTINEL]) * w
        doubled = data + data[: w - 1]
        hits = 0
        at = doubled.find(run)
        while at != -1 and at < len(data):
            hits += 1
            at = doubled.find(run, at + 1)
        if hits != 1:
            raise ConfigError("sentinel alias produces a second run of w sentinels; the cyclic start would be ambiguous")
    return Text(data, w, bytes(symbols), alias, bytes(encoding))


# ---------------------------------------------------------------------------
# Trigger configuration and hashing


@dataclass(frozen=True)
class TriggerConfig:
    """Parameters deciding which length-``w`` windows start phrases."""

    w: int = DEFAULT_W
    p: int = DEFAULT_P
    mode: str = "hash"
    hash_base: int = DEFAULT_BASE
    hash_prime: int = MERSENNE61
    triggers: frozenset = frozenset()

    def __post_init__(self) -> None:
        if self.w < 1:
            raise ConfigError("w must be at least 1")
        if self.mode == "hash":
            if self.p < 1:
                raise ConfigError("p must be at least 1")
            if self.hash_prime < 2 or not 1 < self.hash_base < self.hash_prime:
                raise ConfigError("hash base must lie in (1, prime)")
        elif self.mode == "explicit":
            for t in self.triggers:
                if len(t) != self.w:
                    raise ConfigError(f"trigger {t!r} does not have length w={self.w}")
        else:
            raise ConfigError(f"unknown trigger mode {self.mode!r}")

    @classmethod
    def explicit(cls, triggers: Iterable[bytes], w: int | None = None) -> TriggerConfig:
        trig = frozenset(bytes(t) for t in triggers)
        if w is None:
            lengths = {len(t) for t in trig}
            if len(lengths) != 1:
                raise ConfigError("cannot infer w from an empty or mixed-length trigger set")
            w = lengths.pop()
        return cls(w=w, mode="explicit", triggers=trig)


def kr_window_hash(window: bytes, cfg: TriggerConfig) -> int:
    """Polynomial hash of ``window``: sum of window[k] * base**(w-1-k) mod prime."""
    h = 0
    base, prime = cfg.hash_base, cfg.hash_prime
    for b in window:
        h = (h * base + b) % prime
    return h


class RollingHash:
    """Sliding-window version of :func:`kr_window_hash`."""

    def __init__(self, cfg: TriggerConfig, window: bytes):
        if len(window) != cfg.w:
            raise ConfigError("initial window must have length w")
        self.base = cfg.hash_base
        self.prime = cfg.hash_prime
        self._top = pow(self.base, cfg.w - 1, self.prime)
        self.value = kr_window_hash(window, cfg)

    def roll(self, out_byte: int, in_byte: int) -> int:
        h = (self.value - out_byte * self._top) % self.prime
        self.value = (h * self.base + in_byte) % self.prime
        return self.value


def _mulmod61(a: np.ndarray, b_hi: np.uint64, b_lo: np.uint64) -> np.ndarray:
    """(a * b) mod 2**61-1 for a uint64 array ``a`` < 2**61 and scalar b split in 32-bit halves."""
    a_hi = a >> np.uint64(32)
    a_lo = a & _MASK32
    # a*b = a_hi*b_hi*2**64 + (a_hi*b_lo + a_lo*b_hi)*2**32 + a_lo*b_lo, and 2**64 = 8 mod p.
    top = (a_hi * b_hi) << np.uint64(3)
    mid = a_hi * b_lo + a_lo * b_hi
    mid = (mid >> np.uint64(29)) + ((mid & _MASK29) << np.uint64(32))
    low = a_lo * b_lo
    low = (low & _M61) + (low >> np.uint64(61))
    s = top + mid + low
    s = (s & _M61) + (s >> np.uint64(61))
    return np.where(s >= _M61, s - _M61, s)


def window_hashes(data: bytes, w: int, start: int, stop: int, base: int = DEFAULT_BASE) -> np.ndarray:
    """Hashes modulo 2**61-1 of the windows beginning at ``start .. stop-1``."""
    buf = np.frombuffer(data, dtype=np.uint8)
    b_hi = np.uint64(base >> 32)
    b_lo = np.uint64(base & 0xFFFFFFFF)
    count = stop - start
    h = np.zeros(count, dtype=np.uint64)
    for k in range(w):
        h = _mulmod61(h, b_hi, b_lo) + buf[start + k : start + k + count].astype(np.uint64)
        h = np.where(h >= _M61, h - _M61, h)
    return h


def hash_rows(windows: np.ndarray, base: int = DEFAULT_BASE) -> np.ndarray:
    """Hashes modulo 2**61-1 of each row of a 2-D uint8 array."""
    rows = np.asarray(windows, dtype=np.uint8)
    b_hi = np.uint64(base >> 32)
    b_lo = np.uint64(base & 0xFFFFFFFF)
    h = np.zeros(len(rows), dtype=np.uint64)
    for k in range(rows.shape[1]):
        h = _mulmod61(h, b_hi, b_lo) + rows[:, k].astype(np.uint64)
        h = np.where(h >= _M61, h - _M61, h)
    return h


def trigger_positions(data: bytes, cfg: TriggerConfig) -> np.ndarray:
    """Sorted starts of trigger windows among the non-wrapping positions [0, n-w].

    The sentinel window at ``n - w`` is always included.
    """
    n, w = len(data), cfg.w
    limit = n - w  # windows starting at 0 .. limit-1 are tested
    found: list[np.ndarray] = []
    if cfg.mode == "explicit":
        hits = []
        for t in cfg.triggers:
            at = data.find(t)
            while at != -1 and at < limit:
                hits.append(at)
                at = data.find(t, at + 1)
        found.append(np.asarray(hits, dtype=np.int64))
    elif cfg.hash_prime == MERSENNE61:
        for a in range(0, limit, _HASH_CHUNK):
            b = min(limit, a + _HASH_CHUNK)
            h = window_hashes(data, w, a, b, cfg.hash_base)
            found.append(np.flatnonzero(h % np.uint64(cfg.p) == 0).astype(np.int64) + a)
    else:
        hits = []
        if limit > 0:
            rh = RollingHash(cfg, data[:w])
            if rh.value % cfg.p == 0:
                hits.append(0)
            for i in range(1, limit):
                if rh.roll(data[i - 1], data[i + w - 1]) % cfg.p == 0:
                    hits.append(i)
        found.append(np.asarray(hits, dtype=np.int64))
    found.append(np.asarray([limit], dtype=np.int64))
    return np.unique(np.concatenate(found))


def _is_trigger(window: bytes, cfg: TriggerConfig) -> bool:
    if window == bytes([SENTINEL]) * cfg.w:
        return True
    if cfg.mode == "explicit":
        return window in cfg.triggers
    return kr_window_hash(window, cfg) % cfg.p == 0


# ---------------------------------------------------------------------------
# Dictionary and parse


@dataclass
class Dictionary:
    """Distinct phrases in lexicographic order with their parse frequencies."""

    phrases: list[bytes]
    freq: np.ndarray

    def __post_init__(self) -> None:
        self.freq = np.asarray(self.freq, dtype=np.int64)
        if len(self.freq) != len(self.phrases):
            raise CorruptionError("frequency table does not match phrase count")

    def __len__(self) -> int:
        return len(self.phrases)

    @property
    def total_len(self) -> int:
        return sum(len(ph) for ph in self.phrases)

    def lengths(self) -> np.ndarray:
        return np.fromiter((len(ph) for ph in self.phrases), dtype=np.int64, count=len(self.phrases))

    def check(self, w: int) -> None:
        for a, b in zip(self.phrases, self.phrases[1:]):
            if not a < b:
                raise CorruptionError("dictionary phrases are not strictly increasing")
        for ph in self.phrases:
            if len(ph) < w + 1:
                raise CorruptionError(f"phrase {ph!r} shorter than w+1")


@dataclass
class Parse:
    """Phrase ranks covering the cyclic text, with their start positions.

    ``starts[0]`` is ``n - w`` (the sentinel window). The remaining starts
    increase.
    """

    ranks: np.ndarray
    starts: np.ndarray
    n: int
    w: int

    def __post_init__(self) -> None:
        self.ranks = np.asarray(self.ranks, dtype=np.int64)
        self.starts = np.asarray(self.starts, dtype=np.int64)
        if len(self.ranks) != len(self.starts) or not len(self.ranks):
            raise CorruptionError("parse ranks and starts must be non-empty and of equal length")

    def __len__(self) -> int:
        return len(self.ranks)

    @property
    def m(self) -> int:
        return len(self.ranks)

    def cyclic_starts(self) -> np.ndarray:
        """``cstart`` of length m+1: starts with the first rewritten to -w, then n-w appended."""
        cs = np.empty(len(self.starts) + 1, dtype=np.int64)
        cs[0] = -self.w
        cs[1:-1] = self.starts[1:]
        cs[-1] = self.n - self.w
        return cs

    @classmethod
    def from_lengths(cls, ranks: np.ndarray, lengths: np.ndarray, w: int) -> Parse:
        """Rebuild start positions from the phrase lengths along the parse."""
        ranks = np.asarray(ranks, dtype=np.int64)
        plen = np.asarray(lengths, dtype=np.int64)[ranks]
        cs = np.empty(len(ranks) + 1, dtype=np.int64)
        cs[0] = -w
        np.cumsum(plen - w, out=cs[1:])
        cs[1:] -= w
        n = int(cs[-1]) + w
        starts = cs[:-1].copy()
        starts[0] = n - w
        return cls(ranks, starts, n, w)


def parse_text(text: Text, cfg: TriggerConfig) -> tuple[Dictionary, Parse]:
    """Split ``text`` into phrases at trigger windows."""
    if cfg.w != text.w:
        raise ConfigError(f"trigger config w={cfg.w} does not match text w={text.w}")
    S, w, n = text.data, text.w, text.n
    if text.sentinel_alias is not None:
        for i in range(n - w + 1, n):
            window = S[i:] + S[: i + w - n]
            if _is_trigger(window, cfg):
                raise ConfigError(
                    f"window wrapping the cyclic start at position {i} is a trigger; "
                    "choose other triggers or drop the sentinel alias"
                )
    pos = trigger_positions(S, cfg)
    # pos is sorted and ends with n - w.
    cstart = np.empty(len(pos) + 1, dtype=np.int64)
    cstart[0] = -w
    cstart[1:] = pos
    ext = S[n - w :] + S  # ext[x + w] == S[x] for -w <= x < n
    lefts = (cstart[:-1] + w).tolist()
    rights = (cstart[1:] + 2 * w).tolist()

    ids: dict[bytes, int] = {}
    seq = np.empty(len(lefts), dtype=np.int64)
    for q, (a, b) in enumerate(zip(lefts, rights)):
        ph = ext[a:b]
        seq[q] = ids.setdefault(ph, len(ids))
    distinct = list(ids)
    del ids
    order = sorted(range(len(distinct)), key=distinct.__getitem__)
    rank_of = np.empty(len(distinct), dtype=np.int64)
    rank_of[np.asarray(order, dtype=np.int64)] = np.arange(len(distinct), dtype=np.int64)
    phrases = [distinct[i] for i in order]
    ranks = rank_of[seq]
    freq = np.bincount(ranks, minlength=len(phrases))
    starts = cstart[:-1].copy()
    starts[0] = n - w
    return Dictionary(phrases, freq), Parse(ranks, starts, n, w)


def expand(d: Dictionary, p: Parse | np.ndarray, w: int) -> Text:
    """Concatenate the phrases of a parse back into the prepared text."""
    ranks = p.ranks if isinstance(p, Parse) else np.asarray(p, dtype=np.int64)
    if not len(ranks):
        raise CorruptionError("empty parse")
    if ranks.min() < 0 or ranks.max() >= len(d.phrases):
        raise CorruptionError("parse references a phrase outside the dictionary")
    phrases = d.phrases
    rl = ranks.tolist()
    out = bytearray(phrases[rl[0]])
    for q in range(1, len(rl)):
        ph = phrases[rl[q]]
        if out[-w:] != ph[:w]:
            raise CorruptionError(f"phrase {q} does not overlap its predecessor by w bytes")
        out += ph[w:]
    if out[:w] != out[-w:] or out[-w:] != bytes([SENTINEL]) * w:
        raise CorruptionError("parse does not close the cycle at the sentinel window")
    return Text(bytes(out[w:]), w)
