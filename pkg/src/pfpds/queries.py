"""Queries over a :class:`~pfpds.builder.PfpIndex`.

Suffix-array style queries (``sa``, ``isa``, ``bwt``) treat the text as
cyclic, which coincides with suffix order because the sentinel run is unique.
``lce`` works on finite suffixes ``S[i..n-1]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .builder import PfpIndex, common_prefix_len
from .errors import BoundsError


@dataclass(frozen=True)
class PhraseLocation:
    phrase_pos: int
    offset: int


def _check_pos(index: PfpIndex, i: int, name: str = "position") -> None:
    if not 0 <= i < index.n:
        raise BoundsError(f"{name} {i} outside [0, {index.n})")


def locate(index: PfpIndex, i: int) -> PhraseLocation:
    """The parse phrase containing text position i and the offset inside it."""
    _check_pos(index, i)
    r = index.b_p.rank1(i)
    if r == 0:
        # Before the first break: still inside the sentinel phrase, which
        # starts w positions before the (cyclic) beginning.
        return PhraseLocation(0, i + index.w)
    return PhraseLocation(r % index.m, i - index.b_p.select1(r))


def position_of(index: PfpIndex, loc: PhraseLocation) -> int:
    """Inverse of :func:`locate`."""
    return (index.phrase_start(loc.phrase_pos) + loc.offset) % index.n


def _contained_suffix(index: PfpIndex, loc: PhraseLocation) -> bytes:
    return index.phrases[int(index.ranks[loc.phrase_pos])][loc.offset :]


def access(index: PfpIndex, i: int) -> int:
    """Byte S[i]."""
    loc = locate(index, i)
    return index.phrases[int(index.ranks[loc.phrase_pos])][loc.offset]


def extract(index: PfpIndex, i: int, length: int) -> bytes:
    """Substring S[i : i+length], clipped at the end of the text."""
    _check_pos(index, i)
    end = min(index.n, i + length)
    out = bytearray()
    while i < end:
        loc = locate(index, i)
        piece = _contained_suffix(index, loc)[: -index.w]
        out += piece[: end - i]
        i += len(piece)
    return bytes(out)


def lce(index: PfpIndex, i: int, j: int) -> int:
    """Length of the longest common prefix of S[i..n-1] and S[j..n-1]."""
    _check_pos(index, i)
    _check_pos(index, j)
    n = index.n
    if i == j:
        return n - i
    li = locate(index, i)
    lj = locate(index, j)
    a = _contained_suffix(index, li)
    b = _contained_suffix(index, lj)
    k = common_prefix_len(a, b)
    limit = n - max(i, j)
    if k < len(a) or k < len(b):
        return min(k, limit)
    m = index.m
    rest = index.lce_support.lce_phrases((li.phrase_pos + 1) % m, (lj.phrase_pos + 1) % m)
    return min(len(a) + rest, limit)


def _sa_parts(index: PfpIndex, i: int) -> tuple[int, int, int]:
    """(row length, parse-BWT position k, row index t) for SA rank i."""
    _check_pos(index, i, "rank")
    t = index.b_bwt.rank1(i) - 1
    j = i - index.b_bwt.select1(t + 1)
    length, lo, hi = index.m_table.row_parts(t)
    k = index.wt.select_range(lo, hi, j)
    return length, k, t


def sa(index: PfpIndex, i: int) -> int:
    """Text position of the i-th smallest suffix."""
    length, k, _ = _sa_parts(index, i)
    q = index.pi.apply(k)
    nxt = (q + 1) % index.m
    return (index.phrase_start(nxt) + index.w - length) % index.n


def isa(index: PfpIndex, pos: int) -> int:
    """Lexicographic rank of the suffix starting at ``pos``."""
    _check_pos(index, pos)
    prev = locate(index, (pos - 1) % index.n)
    alpha = _contained_suffix(index, prev)[1:]
    t = index.m_table.rank_of(alpha)
    _, lo, hi = index.m_table.row_parts(t)
    j = index.wt.count_range(index.pi.invert(prev.phrase_pos), lo, hi)
    return index.b_bwt.select1(t + 1) + j


def lcp(index: PfpIndex, i: int) -> int:
    """LCP of the suffixes of rank i-1 and i (0 for i = 0)."""
    _check_pos(index, i, "rank")
    if i == 0:
        return 0
    return lce(index, sa(index, i - 1), sa(index, i))


def _tail_ranks(index: PfpIndex) -> list[tuple[int, int]]:
    """(rank, length) of the w-1 suffixes starting inside the final sentinel run."""
    cached = index.__dict__.get("_tail_ranks")
    if cached is None:
        n = index.n
        cached = sorted((isa(index, p), n - p) for p in range(n - index.w + 1, n))
        index._tail_ranks = cached
    return cached


def rmq_lcp(index: PfpIndex, l: int, r: int) -> int:
    """Minimum of lcp over ranks l..r.

    Rank order is rotation order, and the LCP of two finite suffixes is their
    rotation LCP capped by both lengths. The minimum over a rank range is
    therefore the LCE of its end points, further capped by the length of any
    suffix inside the range. Only suffixes shorter than w can be short enough
    to matter (a longer one holds the unique sentinel run), so those few
    ranks are checked explicitly.
    """
    if not 1 <= l <= r < index.n:
        raise BoundsError(f"rmq range [{l}, {r}] outside [1, {index.n})")
    best = lce(index, sa(index, l - 1), sa(index, r))
    for rank, length in _tail_ranks(index):
        if l - 1 <= rank <= r and length < best:
            best = length
    return best


def bwt(index: PfpIndex, i: int) -> int:
    """BWT byte at rank i: the character cyclically preceding suffix sa(i)."""
    length, k, _ = _sa_parts(index, i)
    c = index.wt.access(k)
    phrase = index.phrases[index.colex.phrase_id(c)]
    return phrase[len(phrase) - length - 1]


# ---------------------------------------------------------------------------
# Whole-text helpers (statistics and tests)


def sa_array(index: PfpIndex) -> np.ndarray:
    return np.fromiter((sa(index, i) for i in range(index.n)), dtype=np.int64, count=index.n)


def bwt_bytes(index: PfpIndex) -> bytes:
    return bytes(bwt(index, i) for i in range(index.n))


def count_bwt_runs(index: PfpIndex) -> int:
    """Number of maximal runs of equal characters in the BWT.

    Each M row covers a contiguous BWT interval. When all phrases ending with
    the row's suffix also agree on the character before it, the whole
    interval is one character. Otherwise the interval is spelled out from
    the parse BWT order of those phrases.
    """
    table = index.m_table
    colex = table.colex
    nodes = table.nodes.to_numpy().astype(np.int64)
    if not len(nodes):
        return 0
    c0 = np.searchsorted(colex.node_offset, nodes, side="right") - 1
    length = colex.lmin[c0] + nodes - colex.node_offset[c0]
    hi = colex.min_table.extend_right_many(c0, length)

    lens = index.dictionary.lengths()
    buf = np.frombuffer(b"".join(index.phrases), dtype=np.uint8)
    base = np.zeros(len(lens), dtype=np.int64)
    np.cumsum(lens[:-1], out=base[1:])
    # Character preceding the row suffix in co-lex phrase c.
    pid = colex.order[c0]
    first_char = buf[base[pid] + lens[pid] - length - 1].astype(np.int64)

    mixed = hi > c0
    if mixed.any():
        mins = colex.min_table.range_min_many(c0[mixed] + 1, hi[mixed])
        uniform_sub = mins >= length[mixed] + 1
        idx = np.flatnonzero(mixed)
        mixed[idx[uniform_sub]] = False

    first = first_char.copy()
    last = first_char.copy()
    inner = 0
    if mixed.any():
        X = index.wt.grid()
        C = index.wt.C
        for t in np.flatnonzero(mixed).tolist():
            lo, h = int(c0[t]), int(hi[t])
            seg = X[C[lo] : C[h + 1]]
            syms = np.repeat(np.arange(lo, h + 1), np.diff(C[lo : h + 2]))
            syms = syms[np.argsort(seg, kind="stable")]
            pids = colex.order[syms]
            chars = buf[base[pids] + lens[pids] - int(length[t]) - 1]
            inner += int(np.count_nonzero(chars[1:] != chars[:-1]))
            first[t] = chars[0]
            last[t] = chars[-1]
    return 1 + inner + int(np.count_nonzero(first[1:] != last[:-1]))
