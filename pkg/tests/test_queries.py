from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pfpds import queries
from pfpds.errors import BoundsError
from pfpds.oracle import oracle_build, oracle_lce

from _support import EXAMPLE_BWT, build_example, build_text, mismatches, random_text, repetitive_text


@pytest.fixture(scope="module")
def ex():
    return build_example(alias=True)


def test_golden_lce(ex):
    idx = ex.index
    assert queries.lce(idx, 3, 11) == 9
    assert queries.lce(idx, 6, 14) == 6
    assert queries.lce(idx, 5, 5) == idx.n - 5


def test_golden_sa_isa(ex):
    idx = ex.index
    assert queries.sa(idx, 24) == 11
    assert queries.isa(idx, 11) == 24


def test_golden_bwt_column(ex):
    idx = ex.index
    column = bytes(queries.bwt(idx, i) for i in range(idx.n))
    assert idx.display(column) == EXAMPLE_BWT
    assert idx.display(queries.bwt_bytes(idx)) == EXAMPLE_BWT
    assert queries.count_bwt_runs(idx) == 13


def test_plain_example_bwt_differs_only_in_sentinel_rows():
    idx = build_example(alias=False).index
    column = idx.display(bytes(queries.bwt(idx, i) for i in range(idx.n))).replace(b"$", b"#")
    diff = [i for i in range(idx.n) if column[i] != EXAMPLE_BWT[i]]
    assert diff == [1, 2]
    assert queries.count_bwt_runs(idx) == 14


def test_locate_access_extract(ex):
    idx = ex.index
    loc = queries.locate(idx, 11)
    assert (loc.phrase_pos, loc.offset) == (2, 4)
    assert queries.position_of(idx, loc) == 11
    assert idx.display(queries.extract(idx, 0, 8)) == b"GATTACAT"
    assert idx.display(queries.extract(idx, 24, 4)) == b"TA##"
    assert bytes(queries.access(idx, i) for i in range(idx.n)) == ex.text.data


def test_lcp_and_rmq(ex):
    idx = ex.index
    orc = oracle_build(ex.text.data)
    lcps = [queries.lcp(idx, i) for i in range(idx.n)]
    assert lcps == orc.lcp.tolist()
    assert lcps[24] == 9
    for l in range(1, idx.n):
        for r in range(l, idx.n):
            assert queries.rmq_lcp(idx, l, r) == min(lcps[l : r + 1])


@pytest.mark.parametrize("w", [1, 2, 3, 5])
def test_rmq_all_ranges_random(w):
    rng = np.random.default_rng(w)
    raw = repetitive_text(rng, 300, 3)
    built = build_text(raw, w, 4)
    idx = built.index
    lcps = oracle_build(built.text.data).lcp.tolist()
    for l in range(1, idx.n, 3):
        for r in range(l, idx.n, 5):
            assert queries.rmq_lcp(idx, l, r) == min(lcps[l : r + 1])


def test_bounds(ex):
    idx = ex.index
    for fn in (queries.sa, queries.isa, queries.bwt, queries.access, queries.lcp):
        with pytest.raises(BoundsError):
            fn(idx, idx.n)
        with pytest.raises(BoundsError):
            fn(idx, -1)
    with pytest.raises(BoundsError):
        queries.lce(idx, 0, idx.n)
    with pytest.raises(BoundsError):
        queries.rmq_lcp(idx, 5, 4)


def test_sa_array_is_permutation(ex):
    sa = queries.sa_array(ex.index)
    assert sorted(sa.tolist()) == list(range(ex.index.n))


texts = st.builds(
    lambda body, k: bytes(3 + b % k for b in body),
    st.binary(min_size=1, max_size=300),
    st.integers(2, 16),
)


@settings(max_examples=120, deadline=None)
@given(texts, st.sampled_from([1, 2, 3, 4, 10]), st.sampled_from([1, 2, 4, 16, 100]), st.integers(0, 2**32))
def test_matches_oracle_hash_mode(raw, w, p, seed):
    built = build_text(raw, w, p)
    orc = oracle_build(built.text.data)
    assert mismatches(built.index, orc, np.random.default_rng(seed), 100) == []


@settings(max_examples=80, deadline=None)
@given(texts, st.integers(1, 4), st.data())
def test_matches_oracle_explicit_triggers(raw, w, data):
    windows = sorted({raw[i : i + w] for i in range(len(raw) - w + 1)})
    trig = data.draw(st.lists(st.sampled_from(windows), max_size=4)) if windows else []
    built = build_text(raw, w, triggers=trig)
    orc = oracle_build(built.text.data)
    assert mismatches(built.index, orc, np.random.default_rng(0), 100) == []


@pytest.mark.parametrize("seed", range(6))
def test_parameter_independence(seed):
    """Different (w, p) over the same text give identical answers."""
    rng = np.random.default_rng(100 + seed)
    raw = repetitive_text(rng, int(rng.integers(50, 600)), int(rng.integers(2, 6)))
    results = set()
    for w in (2, 4, 10):
        for p in (4, 16, 100):
            idx = build_text(raw, w, p).index
            n_body = idx.n - w
            sa = tuple(queries.sa(idx, i) for i in range(w, idx.n))  # skip sentinel rows
            lcp = tuple(queries.lcp(idx, i) for i in range(w + 1, idx.n))
            bwt = bytes(queries.bwt(idx, i) for i in range(w, idx.n))
            results.add((n_body, sa, lcp, bwt))
    assert len(results) == 1


def test_lce_random_pairs_on_repetitive_text():
    rng = np.random.default_rng(7)
    raw = repetitive_text(rng, 4000, 4)
    built = build_text(raw, 4, 16)
    S = built.text.data
    for a, b in rng.integers(0, len(S), (2000, 2)).tolist():
        assert queries.lce(built.index, a, b) == oracle_lce(S, a, b)


def test_count_bwt_runs_matches_oracle():
    rng = np.random.default_rng(11)
    for _ in range(10):
        raw = random_text(rng, int(rng.integers(10, 800)), int(rng.integers(2, 5)))
        built = build_text(raw, 2, 4)
        bwt = oracle_build(built.text.data).bwt
        runs = 1 + sum(1 for a, b in zip(bwt, bwt[1:]) if a != b)
        assert queries.count_bwt_runs(built.index) == runs
