"""BigBWT-style ``.dict`` / ``.parse`` import and export.

``PREFIX.dict`` holds the phrases in lexicographic order, each followed by
0x01, and the file ends with 0x00. Inside phrases the text sentinel (0x01
internally) is written as 0x02 so the phrase terminator stays unambiguous.
``PREFIX.parse`` holds the parse as 1-based phrase ranks, each a 4-byte
little-endian unsigned integer.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import FormatError
from .parser import SENTINEL, Dictionary, Parse

END_OF_WORD = 0x01
END_OF_DICT = 0x00
DOLLAR = 0x02

_TO_FILE = bytes.maketrans(bytes([SENTINEL]), bytes([DOLLAR]))
_FROM_FILE = bytes.maketrans(bytes([DOLLAR]), bytes([SENTINEL]))


def write_pfp(prefix: str | Path, d: Dictionary, p: Parse) -> None:
    prefix = str(prefix)
    body = bytearray()
    for ph in d.phrases:
        body += ph.translate(_TO_FILE)
        body.append(END_OF_WORD)
    body.append(END_OF_DICT)
    Path(prefix + ".dict").write_bytes(bytes(body))
    Path(prefix + ".parse").write_bytes((p.ranks + 1).astype("<u4").tobytes())


def _check_overlaps(phrases: list[bytes], ranks: np.ndarray, w: int) -> None:
    """Consecutive phrases (cyclically) must share w bytes; the first opens the text."""
    if phrases[int(ranks[0])][:w] != bytes([SENTINEL]) * w:
        raise FormatError(".parse does not start with the sentinel phrase")
    nxt = np.roll(ranks, -1)
    for a, b in set(zip(ranks.tolist(), nxt.tolist())):
        if phrases[a][-w:] != phrases[b][:w]:
            raise FormatError(f"phrases {a + 1} and {b + 1} are adjacent in .parse but do not overlap by w={w}")


def read_pfp(prefix: str | Path, w: int) -> tuple[Dictionary, Parse]:
    prefix = str(prefix)
    try:
        raw = Path(prefix + ".dict").read_bytes()
        praw = Path(prefix + ".parse").read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read PFP files for prefix {prefix!r}: {exc}") from exc
    if not raw or raw[-1] != END_OF_DICT:
        raise FormatError(".dict file must end with 0x00")
    parts = raw[:-1].split(bytes([END_OF_WORD]))
    if parts[-1] != b"":
        raise FormatError(".dict phrases must each end with 0x01")
    phrases = [ph.translate(_FROM_FILE) for ph in parts[:-1]]
    if not phrases:
        raise FormatError(".dict file holds no phrases")
    for a, b in zip(phrases, phrases[1:]):
        if not a < b:
            raise FormatError(".dict phrases are not strictly increasing")
    if any(len(ph) <= w for ph in phrases):
        raise FormatError(f"a phrase is not longer than w={w}")
    if len(praw) % 4 or not praw:
        raise FormatError(".parse length must be a positive multiple of 4")
    ranks = np.frombuffer(praw, dtype="<u4").astype(np.int64) - 1
    if ranks.min() < 0 or ranks.max() >= len(phrases):
        raise FormatError(".parse references a phrase outside the dictionary")
    _check_overlaps(phrases, ranks, w)
    d = Dictionary(phrases, np.bincount(ranks, minlength=len(phrases)))
    lens = d.lengths()
    parse = Parse.from_lengths(ranks, lens, w)
    return d, parse
