"""Construct a :class:`PfpIndex` from a dictionary and parse.

Components, all sized by the dictionary and parse rather than the text:

* ``b_p``: sparse bitvector marking phrase starts in the text.
* ``m_table``: the distinct proper phrase suffixes of length >= w in
  lexicographic order. Each row is the length of the suffix and the
  co-lexicographic range of phrases ending with it.
* ``b_bwt``: sparse bitvector with a 1 at the first suffix-array row of each
  M row's interval, so interval sizes are suffix occurrence counts.
* ``wt``: wavelet structure over the parse BWT, symbols recoded as co-lex ranks.
* ``pi``: parse-BWT position to parse position of the phrase preceding it.
* ``lce_support``: ranks and adjacent LCPs of the boundary suffixes (those
  starting right after a trigger window), plus an RMQ over the LCPs.

M rows are stored as node ids of the trie of reversed phrases. The suffix of
length ``l`` shared by co-lex phrases ``c0..c1`` is identified by the
leftmost phrase ``c0`` and ``l``. Phrase ``c`` owns the lengths
``lmin(c) <= l < len(c)``, where ``lmin(c) = max(lcs[c] + 1, w)`` and
``lcs[c]`` is the longest common suffix with phrase ``c - 1``.
"""

from __future__ import annotations

from array import array
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np
from pydivsufsort import divsufsort

from .errors import BoundsError, CorruptionError, NotFoundError
from .parser import SENTINEL, Dictionary, Parse
from .succinct import (
    IntVector,
    IntVectorBuilder,
    Permutation,
    RmqStructure,
    SparseBitvector,
    SparseBitvectorBuilder,
    SparseMinTable,
    WaveletTree,
    bits_needed,
)

_SA_CHUNK = 1 << 17


def _index_dtype(n: int) -> type:
    return np.int32 if n < 2**31 else np.int64


def common_prefix_len(a: bytes, b: bytes) -> int:
    """Length of the longest common prefix of two byte strings.

    The strings are compared as big integers, i.e. whole machine words at a
    time, and the first differing byte is read off the XOR.
    """
    k = min(len(a), len(b))
    if a[:k] == b[:k]:
        return k
    x = int.from_bytes(a[:k], "big") ^ int.from_bytes(b[:k], "big")
    return k - 1 - (x.bit_length() - 1) // 8


def default_symbols() -> bytes:
    table = bytearray(range(256))
    table[SENTINEL] = ord("$")
    return bytes(table)


@dataclass(frozen=True)
class MRow:
    len: int
    colex_lo: int
    colex_hi: int


class ColexOrder:
    """Co-lexicographic order of the dictionary and its reversed-phrase trie."""

    def __init__(self, order: np.ndarray, lengths: np.ndarray, lcs: np.ndarray, w: int):
        self.order = np.asarray(order, dtype=np.int64)
        self.sigma = len(self.order)
        self.w = w
        self.rank = np.empty(self.sigma, dtype=np.int64)
        self.rank[self.order] = np.arange(self.sigma, dtype=np.int64)
        self.lcs = np.asarray(lcs, dtype=np.int64)
        clen = np.asarray(lengths, dtype=np.int64)[self.order]
        self.lmin = np.maximum(self.lcs + 1, w)
        count = np.maximum(clen - self.lmin, 0)
        self.node_offset = np.zeros(self.sigma + 1, dtype=np.int64)
        np.cumsum(count, out=self.node_offset[1:])
        self.min_table = SparseMinTable(self.lcs)
        self._offsets = self.node_offset.tolist()
        self._lmin = self.lmin.tolist()
        self._order = self.order.tolist()

    @property
    def nodes(self) -> int:
        return int(self.node_offset[-1])

    def node_of(self, c: int, length: int) -> int:
        c0 = self.min_table.extend_left(c, length)
        return self._offsets[c0] + length - self._lmin[c0]

    def decode(self, node: int) -> tuple[int, int]:
        """(leftmost co-lex phrase, suffix length) of a node id."""
        c0 = bisect_right(self._offsets, node) - 1
        return c0, self._lmin[c0] + node - self._offsets[c0]

    def range_of(self, c0: int, length: int) -> tuple[int, int]:
        return c0, self.min_table.extend_right(c0, length)

    def phrase_id(self, c: int) -> int:
        return self._order[c]

    def nbytes(self) -> int:
        return int(self.order.nbytes + self.lcs.nbytes)


def build_colex(d: Dictionary, w: int) -> ColexOrder:
    """Sort phrases by their reversals and compute adjacent common-suffix lengths."""
    rev = [ph[::-1] for ph in d.phrases]
    order = sorted(range(len(rev)), key=rev.__getitem__)
    lcs = np.zeros(len(rev), dtype=np.int64)
    for c in range(1, len(order)):
        lcs[c] = common_prefix_len(rev[order[c - 1]], rev[order[c]])
    del rev
    return ColexOrder(np.asarray(order, dtype=np.int64), d.lengths(), lcs, w)


class SuffixTable:
    """Table M: rows of distinct proper phrase suffixes in lexicographic order."""

    def __init__(self, nodes: IntVector, colex: ColexOrder, phrases: list[bytes]):
        self.nodes = nodes
        self.colex = colex
        self.phrases = phrases

    def __len__(self) -> int:
        return len(self.nodes)

    def _check(self, t: int) -> None:
        if not 0 <= t < len(self.nodes):
            raise BoundsError(f"M row {t} outside [0, {len(self.nodes)})")

    def row_parts(self, t: int) -> tuple[int, int, int]:
        """(length, colex_lo, colex_hi) of row t."""
        self._check(t)
        c0, length = self.colex.decode(self.nodes[t])
        return length, c0, self.colex.min_table.extend_right(c0, length)

    def __getitem__(self, t: int) -> MRow:
        return MRow(*self.row_parts(t))

    def suffix(self, t: int) -> bytes:
        self._check(t)
        c0, length = self.colex.decode(self.nodes[t])
        return self.phrases[self.colex.phrase_id(c0)][-length:]

    def rank_of(self, s: bytes) -> int:
        """Row index of suffix ``s`` (binary search over rows)."""
        lo, hi = 0, len(self.nodes)
        colex, phrases, nodes = self.colex, self.phrases, self.nodes
        while lo < hi:
            mid = (lo + hi) // 2
            c0, length = colex.decode(nodes[mid])
            cand = phrases[colex.phrase_id(c0)][-length:]
            if cand < s:
                lo = mid + 1
            elif cand == s:
                return mid
            else:
                hi = mid
        raise NotFoundError(f"{s!r} is not a proper phrase suffix of length >= w")

    def nbytes(self) -> int:
        return self.nodes.nbytes()


class BoundaryLcpSupport:
    """Lexicographic ranks of boundary suffixes with adjacent LCPs and an RMQ.

    ``rank[q]`` is the rank of the suffix starting at ``(starts[q] + w) mod n``,
    the first character after phrase ``q``'s leading trigger.
    """

    def __init__(self, rank: np.ndarray, lcp: np.ndarray, positions: np.ndarray):
        self.rank = np.asarray(rank)
        self.lcp = np.asarray(lcp)
        self.positions = np.asarray(positions)
        self.order = np.empty(len(self.rank), dtype=self.rank.dtype)
        self.order[self.rank] = np.arange(len(self.rank), dtype=self.rank.dtype)
        self.rmq = RmqStructure(self.lcp)

    def __len__(self) -> int:
        return len(self.rank)

    def rank_of_position(self, pos: int) -> int:
        q = int(np.searchsorted(self.positions, pos))
        if q >= len(self.positions) or self.positions[q] != pos:
            raise NotFoundError(f"position {pos} does not start a boundary suffix")
        return int(self.rank[q])

    def position_of_rank(self, t: int) -> int:
        if not 0 <= t < len(self.rank):
            raise BoundsError(f"boundary rank {t} outside [0, {len(self.rank)})")
        return int(self.positions[self.order[t]])

    def mapping(self) -> dict[int, int]:
        return {int(p): int(r) for p, r in zip(self.positions, self.rank)}

    def lce_phrases(self, qa: int, qb: int) -> int:
        """LCP of the boundary suffixes of phrases qa and qb."""
        ra, rb = int(self.rank[qa]), int(self.rank[qb])
        if ra == rb:
            raise BoundsError("boundary LCE of a suffix with itself is its length")
        if ra > rb:
            ra, rb = rb, ra
        return int(self.lcp[self.rmq.query(ra + 1, rb)])

    def nbytes(self) -> int:
        return int(self.rank.nbytes + self.lcp.nbytes + self.rmq.nbytes())


@dataclass
class PfpIndex:
    """The queryable bundle of dictionary, parse and index components."""

    dictionary: Dictionary
    parse: Parse
    w: int
    n: int
    b_p: SparseBitvector
    b_bwt: SparseBitvector
    m_table: SuffixTable
    wt: WaveletTree
    pi: Permutation
    lce_support: BoundaryLcpSupport
    symbols: bytes = default_symbols()

    def __post_init__(self) -> None:
        self.phrases = self.dictionary.phrases
        self.ranks = self.parse.ranks

    @property
    def dict(self) -> Dictionary:
        return self.dictionary

    @property
    def m(self) -> int:
        return len(self.parse)

    @property
    def sigma(self) -> int:
        return len(self.dictionary)

    @property
    def colex(self) -> ColexOrder:
        return self.m_table.colex

    def suffix_rank_of(self, phrase_id: int, offset: int) -> int:
        """Rank t of the suffix of phrase ``phrase_id`` starting at ``offset``."""
        ph = self.phrases[phrase_id]
        if not 1 <= offset <= len(ph) - self.w:
            raise BoundsError(f"offset {offset} does not start a proper suffix of length >= w")
        return self.m_table.rank_of(ph[offset:])

    def phrase_start(self, q: int) -> int:
        """Text position of the trigger that begins parse phrase q."""
        return self.b_p.select1(q if q else self.m)

    def display(self, data: bytes) -> bytes:
        return data.translate(self.symbols)


# ---------------------------------------------------------------------------
# Builders


def build_bp(parse: Parse, n: int, w: int) -> SparseBitvector:
    """Bitvector with a 1 at each phrase's leading trigger position."""
    ones = np.sort(parse.starts)
    return SparseBitvector.from_positions(n, ones)


def build_bbwt_and_m(
    d: Dictionary, parse: Parse, w: int, colex: ColexOrder | None = None
) -> tuple[SparseBitvector, SuffixTable]:
    """Sort dictionary suffixes and aggregate equal proper suffixes.

    All phrases are joined with a shared 0x00 terminator and suffix sorted
    once. Suffix-array entries are then streamed in chunks: whole phrases,
    terminators and suffixes shorter than ``w`` are dropped, and runs of equal
    suffixes are collapsed into one M row whose occurrence count is the sum of
    the phrase frequencies.
    """
    if colex is None:
        colex = build_colex(d, w)
    n = parse.n
    lens = d.lengths()
    freq = d.freq
    offs = np.zeros(len(lens), dtype=np.int64)
    np.cumsum(lens[:-1] + 1, out=offs[1:])
    concat = b"\x00".join(d.phrases) + b"\x00"
    sa = divsufsort(concat)
    del concat

    total_nodes = colex.nodes
    nodes_out = IntVectorBuilder(bits_needed(max(total_nodes - 1, 0)), total_nodes)
    ones_out = SparseBitvectorBuilder(n, total_nodes)
    pending_node = -1
    pending_freq = 0
    emitted = 0
    covered = 0

    def emit(node_ids: np.ndarray, counts: np.ndarray) -> None:
        nonlocal emitted, covered
        if not len(node_ids):
            return
        pos = np.empty(len(counts), dtype=np.int64)
        pos[0] = covered
        np.cumsum(counts[:-1], out=pos[1:])
        pos[1:] += covered
        nodes_out.extend(node_ids)
        ones_out.extend(pos)
        emitted += len(node_ids)
        covered += int(counts.sum())

    for a in range(0, len(sa), _SA_CHUNK):
        x = sa[a : a + _SA_CHUNK].astype(np.int64)
        dd = np.searchsorted(offs, x, side="right") - 1
        off = x - offs[dd]
        length = lens[dd] - off
        keep = (off >= 1) & (length >= w)
        if not keep.any():
            continue
        dd = dd[keep]
        length = length[keep]
        c = colex.rank[dd]
        c0 = colex.min_table.extend_left_many(c, length)
        node = colex.node_offset[c0] + length - colex.lmin[c0]
        f = freq[dd]
        change = np.empty(len(node), dtype=bool)
        change[0] = node[0] != pending_node
        np.not_equal(node[1:], node[:-1], out=change[1:])
        heads = np.flatnonzero(change)
        first = heads[0] if len(heads) else len(node)
        if first:
            pending_freq += int(f[:first].sum())
        if not len(heads):
            continue
        sums = np.add.reduceat(f, heads)
        group_nodes = node[heads]
        if pending_node >= 0:
            emit(
                np.concatenate([[pending_node], group_nodes[:-1]]),
                np.concatenate([[pending_freq], sums[:-1]]),
            )
        else:
            emit(group_nodes[:-1], sums[:-1])
        pending_node = int(group_nodes[-1])
        pending_freq = int(sums[-1])
    if pending_node >= 0:
        emit(np.asarray([pending_node]), np.asarray([pending_freq]))
    del sa
    if emitted != total_nodes:
        raise CorruptionError(f"found {emitted} distinct suffixes, expected {total_nodes}")
    if covered != n:
        raise CorruptionError(f"suffix occurrence counts sum to {covered}, expected n={n}")
    table = SuffixTable(nodes_out.finish(), colex, d.phrases)
    return ones_out.finish(), table


def parse_suffix_array(ranks: np.ndarray) -> np.ndarray:
    """Suffix array of the rank sequence, equal to its rotation order.

    The first parse phrase is the unique sentinel phrase of rank 0, so no
    suffix is a prefix of another rotation and suffix order is rotation order.
    """
    ranks = np.asarray(ranks)
    if len(ranks) == 1:
        return np.zeros(1, dtype=np.int64)
    if ranks[0] != 0 or np.count_nonzero(ranks == 0) != 1:
        raise CorruptionError("parse must start with the unique sentinel phrase")
    return divsufsort(ranks.astype(np.int32)).astype(np.int64)


def build_w_and_pi(d: Dictionary, parse: Parse, colex_rank: np.ndarray) -> tuple[WaveletTree, Permutation]:
    """Wavelet structure over the parse BWT (as co-lex ranks) and the permutation pi."""
    m = len(parse)
    sa_p = parse_suffix_array(parse.ranks)
    pi = (sa_p - 1) % m
    bwt_ids = parse.ranks[pi]
    wt = WaveletTree.from_sequence(np.asarray(colex_rank)[bwt_ids], len(d))
    return wt, Permutation(pi)


def _as_array(values: np.ndarray) -> array:
    """Compact Python-indexable copy of an integer array (8 bytes per entry)."""
    out = array("q")
    out.frombytes(np.ascontiguousarray(values, dtype=np.int64).tobytes())
    return out


def _walker(d: Dictionary, parse: Parse):
    """Return walk(x, y, h): LCP of finite suffixes x, y already known to share h chars."""
    n, w = parse.n, parse.w
    cstart = _as_array(parse.cyclic_starts())
    ranks = _as_array(parse.ranks)
    phrases = d.phrases

    def contained(pos: int) -> bytes:
        if pos >= n - w:
            pos -= n
        q = bisect_right(cstart, pos) - 1
        return phrases[ranks[q]][pos - cstart[q] :]

    def walk(x: int, y: int, h: int) -> int:
        limit = n - max(x, y)
        while h < limit:
            a = contained(x + h)
            b = contained(y + h)
            k = common_prefix_len(a, b)
            if k < len(a) or k < len(b):
                if k == len(a) or k == len(b):
                    raise CorruptionError("contained phrase suffixes are not prefix-free")
                h += k
                break
            h += k
        return min(h, limit)

    return walk


def _boundary_order(d: Dictionary, parse: Parse, table: SuffixTable, pi: Permutation) -> np.ndarray:
    """Boundary phrase ids sorted by the lexicographic order of their suffixes."""
    n, w = parse.n, parse.w
    cstart = parse.cyclic_starts()
    # Position preceding each boundary suffix, in cyclic phrase coordinates.
    k = parse.starts + (w - 1)
    k[0] = -1
    k[k >= n - w] -= n
    qk = np.searchsorted(cstart, k, side="right") - 1
    k -= cstart[qk]
    k += 1  # offset of the phrase suffix following the preceding character
    maxlen = int(d.lengths().max()) + 1
    pair = parse.ranks[qk] * maxlen + k
    del k
    uniq, inv = np.unique(pair, return_inverse=True)
    del pair
    phrases = d.phrases
    t_uniq = np.fromiter(
        (table.rank_of(phrases[p // maxlen][p % maxlen :]) for p in uniq.tolist()),
        dtype=np.int64,
        count=len(uniq),
    )
    key1 = t_uniq[inv.reshape(-1)]
    del inv, uniq, t_uniq
    key2 = pi.backward.get_many(qk).astype(np.int64)
    del qk
    return np.lexsort((key2, key1))


def build_boundary_lcp(d: Dictionary, parse: Parse, table: SuffixTable, pi: Permutation) -> BoundaryLcpSupport:
    """Rank boundary suffixes and compute the LCPs of lexicographic neighbours.

    A boundary suffix at ``b`` is ordered by the key (rank of the phrase
    suffix following ``S[b-1]``, rotation rank of the parse after the
    phrase containing ``S[b-1]``), exactly as in an inverse suffix array
    query. LCPs follow Kasai's scan in text order, where each extension step
    compares one contained phrase suffix at a time.
    """
    n, w, m = parse.n, parse.w, len(parse)
    dtype = _index_dtype(n)
    order = _boundary_order(d, parse, table, pi)
    rank = np.empty(m, dtype=dtype)
    rank[order] = np.arange(m, dtype=dtype)
    b = ((parse.starts + w) % n).astype(dtype)

    walk = _walker(d, parse)
    lcp = np.zeros(m, dtype=dtype)
    bl = _as_array(b)
    rl = _as_array(rank)
    ol = _as_array(order)
    del order
    h = 0
    for q in range(m):
        r = rl[q]
        if r:
            h = walk(bl[q], bl[ol[r - 1]], h)
            lcp[r] = h
        else:
            h = 0
        if q + 1 < m:
            g = bl[q + 1] - bl[q]
            # Kasai's bound carries over only when the next trigger lies inside the shared prefix.
            h = h - g if (g >= w and h > g) else 0
    return BoundaryLcpSupport(rank, lcp, b)


def build_index(d: Dictionary, parse: Parse, w: int | None = None, n: int | None = None, symbols: bytes | None = None) -> PfpIndex:
    """Build every component of the index."""
    w = parse.w if w is None else w
    n = parse.n if n is None else n
    if (w, n) != (parse.w, parse.n):
        raise CorruptionError("w/n disagree with the parse")
    if d.freq.sum() != len(parse) or not np.array_equal(np.bincount(parse.ranks, minlength=len(d)), d.freq):
        raise CorruptionError("dictionary frequencies do not match the parse")
    b_p = build_bp(parse, n, w)
    colex = build_colex(d, w)
    b_bwt, table = build_bbwt_and_m(d, parse, w, colex)
    wt, pi = build_w_and_pi(d, parse, colex.rank)
    lce = build_boundary_lcp(d, parse, table, pi)
    return PfpIndex(d, parse, w, n, b_p, b_bwt, table, wt, pi, lce, symbols or default_symbols())
