"""Binary index file format.

Layout (all integers little-endian)::

    magic   8 bytes  b"PFPIDX01"
    header  5 x u64  n, w, m, sigma, rows (number of M rows)
    sections         for each component in fixed order: u64 byte length, body
    checksum         SHA-256 of everything before it

Sections: symbols, dict, parse, b_p, b_bwt, m_table, wt, pi, lce. Only
primary data is written. Rank directories, sparse tables, inverse
permutations, phrase starts and frequencies are recomputed on load, so
encoding is canonical: save(load(save(x))) == save(x).
"""

from __future__ import annotations

import hashlib
import io
import struct
from pathlib import Path

import numpy as np

from .builder import BoundaryLcpSupport, ColexOrder, PfpIndex, SuffixTable, _index_dtype
from .errors import FormatError
from .parser import Dictionary, Parse
from .succinct import Bitvector, IntVector, Permutation, SparseBitvector, WaveletTree

MAGIC = b"PFPIDX01"
SECTIONS = ("symbols", "dict", "parse", "b_p", "b_bwt", "m_table", "wt", "pi", "lce")
_HEADER = struct.Struct("<5Q")
_DIGEST = 32


class _Writer:
    def __init__(self) -> None:
        self.buf = io.BytesIO()

    def u64(self, v: int) -> None:
        self.buf.write(struct.pack("<Q", v))

    def raw(self, b: bytes) -> None:
        self.u64(len(b))
        self.buf.write(b)

    def intvector(self, iv: IntVector) -> None:
        self.u64(iv.width)
        self.u64(iv.size)
        self.buf.write(iv.words.astype("<u8").tobytes())

    def ints(self, values) -> None:
        self.intvector(IntVector.from_values(np.asarray(values, dtype=np.int64)))

    def bitvector(self, bv: Bitvector) -> None:
        self.u64(bv.size)
        self.buf.write(bv.words.astype("<u8").tobytes())

    def sparse(self, sb: SparseBitvector) -> None:
        self.u64(sb.length)
        self.u64(sb.count)
        self.u64(sb.low_bits)
        if sb.low_bits:
            self.intvector(sb.low)
        self.bitvector(sb.high)

    def getvalue(self) -> bytes:
        return self.buf.getvalue()


class _Reader:
    def __init__(self, data: bytes, name: str):
        self.data = memoryview(data)
        self.pos = 0
        self.name = name

    def _take(self, k: int) -> memoryview:
        if self.pos + k > len(self.data):
            raise FormatError(f"section {self.name!r} truncated")
        out = self.data[self.pos : self.pos + k]
        self.pos += k
        return out

    def u64(self) -> int:
        return struct.unpack("<Q", self._take(8))[0]

    def raw(self) -> bytes:
        return bytes(self._take(self.u64()))

    def words(self, count: int) -> np.ndarray:
        return np.frombuffer(self._take(8 * count), dtype="<u8").astype(np.uint64)

    def intvector(self) -> IntVector:
        width, size = self.u64(), self.u64()
        if not 1 <= width <= 64:
            raise FormatError(f"bad integer width {width} in section {self.name!r}")
        return IntVector(width, size, self.words((size * width + 63) // 64))

    def ints(self) -> np.ndarray:
        return self.intvector().to_numpy().astype(np.int64)

    def bitvector(self) -> Bitvector:
        size = self.u64()
        return Bitvector(self.words((size + 63) // 64), size)

    def sparse(self) -> SparseBitvector:
        length, count, low_bits = self.u64(), self.u64(), self.u64()
        low = self.intvector() if low_bits else None
        return SparseBitvector(length, count, low_bits, low, self.bitvector())

    def done(self) -> None:
        if self.pos != len(self.data):
            raise FormatError(f"trailing bytes in section {self.name!r}")


def _sections(index: PfpIndex) -> dict[str, bytes]:
    out: dict[str, bytes] = {}

    w = _Writer()
    w.buf.write(index.symbols)
    out["symbols"] = w.getvalue()

    w = _Writer()
    w.ints(index.dictionary.lengths())
    w.buf.write(b"".join(index.dictionary.phrases))
    out["dict"] = w.getvalue()

    w = _Writer()
    w.ints(index.parse.ranks)
    out["parse"] = w.getvalue()

    w = _Writer()
    w.sparse(index.b_p)
    out["b_p"] = w.getvalue()

    w = _Writer()
    w.sparse(index.b_bwt)
    out["b_bwt"] = w.getvalue()

    w = _Writer()
    w.intvector(index.m_table.nodes)
    w.ints(index.colex.order)
    w.ints(index.colex.lcs)
    out["m_table"] = w.getvalue()

    w = _Writer()
    w.u64(index.wt.m)
    w.ints(index.wt.C)
    w.u64(index.wt.nbits)
    for lv in index.wt.levels:
        w.bitvector(lv)
    out["wt"] = w.getvalue()

    w = _Writer()
    w.intvector(index.pi.forward)
    out["pi"] = w.getvalue()

    w = _Writer()
    w.ints(index.lce_support.rank)
    w.ints(index.lce_support.lcp)
    out["lce"] = w.getvalue()
    return out


def dumps(index: PfpIndex) -> bytes:
    secs = _sections(index)
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(_HEADER.pack(index.n, index.w, index.m, index.sigma, len(index.m_table)))
    for name in SECTIONS:
        body = secs[name]
        buf.write(struct.pack("<Q", len(body)))
        buf.write(body)
    blob = buf.getvalue()
    return blob + hashlib.sha256(blob).digest()


def _split(blob: bytes) -> tuple[tuple[int, ...], dict[str, bytes]]:
    if len(blob) < len(MAGIC) + _HEADER.size + _DIGEST or blob[: len(MAGIC)] != MAGIC:
        raise FormatError("not a PFP index file (bad magic)")
    body, digest = blob[:-_DIGEST], blob[-_DIGEST:]
    if hashlib.sha256(body).digest() != digest:
        raise FormatError("checksum mismatch; index file is corrupt")
    header = _HEADER.unpack_from(body, len(MAGIC))
    pos = len(MAGIC) + _HEADER.size
    secs: dict[str, bytes] = {}
    for name in SECTIONS:
        if pos + 8 > len(body):
            raise FormatError(f"missing section {name!r}")
        (size,) = struct.unpack_from("<Q", body, pos)
        pos += 8
        if pos + size > len(body):
            raise FormatError(f"section {name!r} truncated")
        secs[name] = body[pos : pos + size]
        pos += size
    if pos != len(body):
        raise FormatError("unexpected bytes after the last section")
    return header, secs


def component_sizes(blob: bytes) -> dict[str, int]:
    """Bytes per section including its 8-byte length prefix."""
    _, secs = _split(blob)
    return {name: 8 + len(secs[name]) for name in SECTIONS}


def payload_size(blob: bytes) -> int:
    """Bytes between the header and the checksum."""
    return len(blob) - len(MAGIC) - _HEADER.size - _DIGEST


def loads(blob: bytes) -> PfpIndex:
    (n, w, m, sigma, rows), secs = _split(blob)

    symbols = secs["symbols"]
    if len(symbols) != 256:
        raise FormatError("symbol table must have 256 entries")

    r = _Reader(secs["dict"], "dict")
    lens = r.ints()
    flat = bytes(r._take(int(lens.sum())))
    r.done()
    if len(lens) != sigma:
        raise FormatError("dictionary size disagrees with header")
    bounds = np.concatenate([[0], np.cumsum(lens)]).tolist()
    phrases = [flat[bounds[i] : bounds[i + 1]] for i in range(sigma)]

    r = _Reader(secs["parse"], "parse")
    ranks = r.ints()
    r.done()
    if len(ranks) != m or (m and ranks.max() >= sigma):
        raise FormatError("parse disagrees with header")
    parse = Parse.from_lengths(ranks, lens, w)
    if parse.n != n:
        raise FormatError("phrase lengths do not add up to n")
    d = Dictionary(phrases, np.bincount(ranks, minlength=sigma))

    r = _Reader(secs["b_p"], "b_p")
    b_p = r.sparse()
    r.done()
    r = _Reader(secs["b_bwt"], "b_bwt")
    b_bwt = r.sparse()
    r.done()
    if b_p.length != n or b_p.count != m or b_bwt.length != n or b_bwt.count != rows:
        raise FormatError("bitvector dimensions disagree with header")

    r = _Reader(secs["m_table"], "m_table")
    nodes = r.intvector()
    order = r.ints()
    lcs = r.ints()
    r.done()
    colex = ColexOrder(order, lens, lcs, w)
    if len(nodes) != rows or colex.nodes != rows:
        raise FormatError("M table size disagrees with header")
    table = SuffixTable(nodes, colex, phrases)

    r = _Reader(secs["wt"], "wt")
    wm = r.u64()
    C = r.ints()
    nbits = r.u64()
    levels = [r.bitvector() for _ in range(nbits)]
    r.done()
    if wm != m or len(C) != sigma + 1:
        raise FormatError("wavelet structure disagrees with header")
    wt = WaveletTree(wm, sigma, levels, C)

    r = _Reader(secs["pi"], "pi")
    pi = Permutation(r.intvector())
    r.done()

    r = _Reader(secs["lce"], "lce")
    brank = r.ints()
    blcp = r.ints()
    r.done()
    dt = _index_dtype(n)
    lce = BoundaryLcpSupport(brank.astype(dt), blcp.astype(dt), ((parse.starts + w) % n).astype(dt))
    return PfpIndex(d, parse, w, n, b_p, b_bwt, table, wt, pi, lce, bytes(symbols))


def save_index(index: PfpIndex, path: str | Path) -> int:
    blob = dumps(index)
    Path(path).write_bytes(blob)
    return len(blob)


def load_index(path: str | Path) -> PfpIndex:
    return loads(Path(path).read_bytes())
