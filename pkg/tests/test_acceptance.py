"""Acceptance checks for the index, one PASS/FAIL line per criterion.

Run with ``pytest -v tests/test_acceptance.py``. The lines are printed even
when output capture is on. Scale checks build the 50 MB corpus once per
session (about a minute).
"""

from __future__ import annotations

import subprocess
import sys
import time
import tracemalloc
from dataclasses import dataclass

import numpy as np
import pytest

from pfpds import queries
from pfpds.builder import build_index
from pfpds.corpus import mutated_copies
from pfpds.oracle import oracle_build
from pfpds.parser import TriggerConfig, expand, parse_text, prepare_text
from pfpds.serialize import dumps, loads

from _support import EXAMPLE_BWT, build_example, build_text, mismatches, random_text, repetitive_text

GRID = [(w, p) for w in (2, 4, 10) for p in (4, 16, 100)]
HASH_TEXTS = 540
EXPLICIT_TEXTS = 60
LCE_PAIRS = 1000
TIME_LIMIT = 600.0


@pytest.fixture()
def report(capsys):
    def emit(criterion: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}", flush=True)

    return emit


# -- golden worked example -------------------------------------------------------


def test_golden_example(report):
    built = build_example(alias=True)
    idx = built.index
    shown = [built.text.display(ph) for ph in idx.phrases]
    row = idx.m_table[19]
    ca = idx.m_table[idx.m_table.rank_of(b"AC")]
    checks = [
        ("dictionary", shown, [b"##GATTAC", b"ACAT#", b"AGATA##", b"T#GATAC", b"T#GATTAG"]),
        ("parse", idx.parse.ranks.tolist(), [0, 1, 3, 1, 4, 2]),
        ("B_P", idx.b_p.to_bitstring(), "0000100100001001000001000010"),
        ("B_BWT", idx.b_bwt.to_bitstring(), "1111110110111110111110110111"),
        ("pi", idx.pi.to_numpy().tolist(), [5, 0, 2, 4, 1, 3]),
        ("M[19]", (row.len, row.colex_lo, row.colex_hi), (3, 2, 3)),
        ("colex range of CA", (ca.colex_lo, ca.colex_hi), (2, 3)),
        ("LCE(3,11)", queries.lce(idx, 3, 11), 9),
        ("LCE(6,14)", queries.lce(idx, 6, 14), 6),
        ("SA(24)", queries.sa(idx, 24), 11),
        ("ISA(11)", queries.isa(idx, 11), 24),
        ("BWT(0..27)", idx.display(bytes(queries.bwt(idx, i) for i in range(idx.n))), EXAMPLE_BWT),
        ("boundary map", idx.lce_support.mapping(), {0: 4, 6: 0, 9: 3, 14: 1, 17: 5, 23: 2}),
        ("boundary LCP", idx.lce_support.lcp.tolist(), [0, 6, 2, 0, 3, 5]),
    ]
    failed = [name for name, got, want in checks if got != want]
    report("golden example", not failed, f"{len(checks) - len(failed)}/{len(checks)} values exact" + (f"; wrong: {failed}" if failed else ""))
    assert not failed


# -- oracle equivalence ------------------------------------------------------------


def _random_length(rng: np.random.Generator) -> int:
    return int(round(np.exp(rng.uniform(np.log(10), np.log(5000)))))


def _random_case(rng: np.random.Generator, k: int) -> bytes:
    n = _random_length(rng)
    kind = rng.integers(0, 2)
    return repetitive_text(rng, n, k) if kind else random_text(rng, n, k)


def test_oracle_equivalence(report):
    rng = np.random.default_rng(20240601)
    t0 = time.perf_counter()
    bad: list[str] = []
    cases = 0
    positions = 0
    for c in range(HASH_TEXTS):
        w, p = GRID[c % len(GRID)]
        k = 2 + c % 15
        raw = _random_case(rng, k)
        built = build_text(raw, w, p)
        errs = mismatches(built.index, oracle_build(built.text.data), rng, LCE_PAIRS)
        bad += [f"hash#{c}(w={w},p={p},n={len(raw)}):{e}" for e in errs[:3]]
        cases += 1
        positions += built.index.n
    for c in range(EXPLICIT_TEXTS):
        w = (2, 4, 10)[c % 3]
        k = 2 + c % 15
        raw = _random_case(rng, k)
        windows = [raw[i : i + w] for i in range(max(0, len(raw) - w + 1))]
        count = int(rng.integers(0, 7))
        trig = {windows[int(i)] for i in rng.integers(0, len(windows), count)} if windows else set()
        built = build_text(raw, w, triggers=sorted(trig))
        errs = mismatches(built.index, oracle_build(built.text.data), rng, LCE_PAIRS)
        bad += [f"explicit#{c}(w={w},n={len(raw)}):{e}" for e in errs[:3]]
        cases += 1
        positions += built.index.n
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < TIME_LIMIT
    report(
        "oracle equivalence",
        ok,
        f"{cases} texts, {positions} positions x 5 queries + {cases * LCE_PAIRS} LCE pairs, "
        f"{len(bad)} mismatches, {elapsed:.0f} s (limit {TIME_LIMIT:.0f} s)",
    )
    assert not bad, bad[:10]
    assert elapsed < TIME_LIMIT


# -- invariants --------------------------------------------------------------------


def _prefix_free(phrases: list[bytes], w: int) -> bool:
    sufs = sorted({ph[k:] for ph in phrases for k in range(1, len(ph) - w + 1)})
    return all(not b.startswith(a) for a, b in zip(sufs, sufs[1:]))


def test_invariant_suite(report):
    rng = np.random.default_rng(77)
    failures: dict[str, int] = {}
    texts = 150
    ranges = 0

    def fail(name: str) -> None:
        failures[name] = failures.get(name, 0) + 1

    for c in range(texts):
        w, p = GRID[c % len(GRID)]
        raw = _random_case(rng, 2 + c % 15)
        text = prepare_text(raw, w)
        d, parse = parse_text(text, TriggerConfig(w=w, p=p))
        if not _prefix_free(d.phrases, w):
            fail("prefix-freeness")
        if expand(d, parse, w).data != text.data:
            fail("expand(parse)")
        idx = build_index(d, parse)
        n = idx.n
        if any(queries.sa(idx, queries.isa(idx, i)) != i for i in range(n)):
            fail("sa(isa(i))")
        pi = idx.pi
        if any(pi.invert(pi.apply(i)) != i for i in range(idx.m)):
            fail("pi inverse")
        if idx.b_bwt.count != len(idx.m_table):
            fail("B_BWT ones = M rows")
        freq_colex = d.freq[idx.colex.order]
        occ = 0
        for t in range(len(idx.m_table)):
            row = idx.m_table[t]
            occ += int(freq_colex[row.colex_lo : row.colex_hi + 1].sum())
        if occ != n:
            fail("occurrences sum to n")
        if c % 15 == 0 and n > 2:
            lcp = oracle_build(text.data).lcp
            for _ in range(LCE_PAIRS):
                l, r = sorted(rng.integers(1, n, 2).tolist())
                ranges += 1
                if queries.rmq_lcp(idx, l, r) != int(lcp[l : r + 1].min()):
                    fail("rmq_lcp = min lcp")
    report(
        "invariant suite",
        not failures,
        f"{texts} texts, {ranges} rmq ranges, failures: {failures or 'none'}",
    )
    assert not failures


# -- scale: space, determinism, latency --------------------------------------------


@dataclass
class Scale:
    raw_size: int
    blob: bytes
    index: object
    build_seconds: float
    peak_bytes: int


@pytest.fixture(scope="module")
def scale():
    raw = mutated_copies(500_000, 100, 0.001, seed=1)
    text = prepare_text(raw, 10)
    d, parse = parse_text(text, TriggerConfig(w=10, p=100))
    raw_size = len(raw)
    del raw, text
    tracemalloc.start()
    t0 = time.perf_counter()
    index = build_index(d, parse)
    seconds = time.perf_counter() - t0
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    del d, parse
    return Scale(raw_size, dumps(index), index, seconds, peak)


@pytest.mark.slow
def test_space_proportionality(report, scale):
    size = len(scale.blob)
    ok = size < scale.raw_size and scale.peak_bytes < 3 * size and scale.build_seconds < 300
    report(
        "space proportionality",
        ok,
        f"input {scale.raw_size / 1e6:.1f} MB, index {size / 1e6:.2f} MB, "
        f"builder peak {scale.peak_bytes / 1e6:.1f} MB ({scale.peak_bytes / size:.2f}x index), "
        f"build {scale.build_seconds:.0f} s",
    )
    assert size < scale.raw_size
    assert scale.peak_bytes < 3 * size
    assert scale.build_seconds < 300


@pytest.mark.slow
def test_determinism(report, scale, tmp_path):
    reencoded = dumps(loads(scale.blob)) == scale.blob
    corpus = tmp_path / "corpus.txt"
    corpus.write_bytes(mutated_copies(100_000, 20, 0.001, seed=5))
    files = []
    for run in range(2):
        out = tmp_path / f"run{run}.pfp"
        subprocess.run(
            [sys.executable, "-m", "pfpds", "build", str(corpus), str(out), "-w", "10", "-p", "100"],
            check=True,
            capture_output=True,
        )
        files.append(out.read_bytes())
    same_builds = files[0] == files[1]
    small = files[0]
    small_reencoded = dumps(loads(small)) == small
    ok = reencoded and same_builds and small_reencoded
    report(
        "determinism",
        ok,
        f"two CLI builds identical: {same_builds}; re-serialization identical "
        f"(2 MB: {small_reencoded}, 50 MB: {reencoded})",
    )
    assert ok


@pytest.mark.slow
def test_query_latency(report, scale):
    idx = scale.index
    rng = np.random.default_rng(10_000)
    n = idx.n
    means = {}
    for kind in ("sa", "lcp", "lce"):
        if kind == "lce":
            args = rng.integers(0, n, (10_000, 2)).tolist()
            fn = lambda a: queries.lce(idx, a[0], a[1])  # noqa: E731
        elif kind == "lcp":
            args = rng.integers(1, n, 10_000).tolist()
            fn = lambda a: queries.lcp(idx, a)  # noqa: E731
        else:
            args = rng.integers(0, n, 10_000).tolist()
            fn = lambda a: queries.sa(idx, a)  # noqa: E731
        t0 = time.perf_counter()
        for a in args:
            fn(a)
        means[kind] = (time.perf_counter() - t0) / len(args)
    ok = all(v < 1e-3 for v in means.values())
    report("query latency", ok, ", ".join(f"{k} mean {v * 1e6:.0f} us" for k, v in means.items()) + " (limit 1000 us)")
    assert ok
