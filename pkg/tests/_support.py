"""Helpers shared by the test modules (not collected by pytest)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pfpds import queries
from pfpds.builder import PfpIndex, build_index
from pfpds.oracle import OracleIndex, oracle_build, oracle_lce
from pfpds.parser import Text, TriggerConfig, parse_text, prepare_text

EXAMPLE_RAW = b"GATTACAT#GATACAT#GATTAGATA"
EXAMPLE_TRIGGERS = (b"AC", b"AG", b"T#")
# BWT of the worked example, '#' standing for the sentinel.
EXAMPLE_BWT = b"AT#TTTTTCCGGGGAAA###AAATATAA"


@dataclass
class Built:
    text: Text
    cfg: TriggerConfig
    index: PfpIndex


def build_text(
    raw: bytes,
    w: int,
    p: int = 100,
    triggers: list[bytes] | tuple[bytes, ...] | None = None,
    alias: bytes | None = None,
    remap: bool = False,
) -> Built:
    text = prepare_text(raw, w, remap=remap, sentinel_alias=alias)
    if triggers is not None:
        cfg = TriggerConfig.explicit([text.encode(t) for t in triggers], w=w)
    else:
        cfg = TriggerConfig(w=w, p=p)
    d, parse = parse_text(text, cfg)
    return Built(text, cfg, build_index(d, parse, symbols=text.symbols))


def build_example(alias: bool = True) -> Built:
    return build_text(EXAMPLE_RAW, 2, triggers=EXAMPLE_TRIGGERS, alias=b"#" if alias else None)


def random_text(rng: np.random.Generator, n: int, k: int) -> bytes:
    """n bytes over a random alphabet of k symbols above the reserved range."""
    alphabet = rng.choice(np.arange(3, 256), size=k, replace=False).astype(np.uint8)
    return alphabet[rng.integers(0, k, n)].tobytes()


def repetitive_text(rng: np.random.Generator, n: int, k: int) -> bytes:
    """Mutated copies of a short random seed, so that phrases repeat."""
    seed_len = int(rng.integers(5, max(6, n // 3)))
    seed = np.frombuffer(random_text(rng, seed_len, k), dtype=np.uint8)
    reps = -(-n // seed_len)
    out = np.tile(seed, reps)[:n].copy()
    hits = rng.random(n) < 0.02
    out[hits] = seed[rng.integers(0, seed_len, int(hits.sum()))]
    return out.tobytes()


def mismatches(index: PfpIndex, oracle: OracleIndex, rng: np.random.Generator, pairs: int) -> list[str]:
    """Compare every per-position query and ``pairs`` random LCEs with the oracle."""
    bad: list[str] = []
    n = index.n
    text = oracle.text
    for i in range(n):
        if queries.sa(index, i) != oracle.sa[i]:
            bad.append(f"SA({i})")
        if queries.isa(index, i) != oracle.isa[i]:
            bad.append(f"ISA({i})")
        if queries.lcp(index, i) != oracle.lcp[i]:
            bad.append(f"LCP({i})")
        if queries.bwt(index, i) != oracle.bwt[i]:
            bad.append(f"BWT({i})")
        if queries.access(index, i) != text[i]:
            bad.append(f"access({i})")
    for a, b in rng.integers(0, n, (pairs, 2)).tolist():
        if queries.lce(index, a, b) != oracle_lce(text, a, b):
            bad.append(f"LCE({a},{b})")
    return bad


def oracle_for(built: Built) -> OracleIndex:
    return oracle_build(built.text.data)
