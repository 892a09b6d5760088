from __future__ import annotations

import numpy as np
import pytest

from pfpds import queries
from pfpds.errors import FormatError
from pfpds.serialize import MAGIC, SECTIONS, component_sizes, dumps, load_index, loads, payload_size, save_index

from _support import build_example, build_text, repetitive_text


@pytest.fixture(scope="module")
def blob():
    return dumps(build_example().index)


def test_roundtrip_is_byte_identical(blob):
    assert dumps(loads(blob)) == blob


def test_rebuild_is_byte_identical():
    rng = np.random.default_rng(3)
    raw = repetitive_text(rng, 5000, 4)
    a = dumps(build_text(raw, 4, 16).index)
    b = dumps(build_text(raw, 4, 16).index)
    assert a == b
    assert dumps(loads(a)) == a


def test_loaded_index_answers_queries(tmp_path):
    built = build_example()
    path = tmp_path / "ex.pfp"
    size = save_index(built.index, path)
    assert size == path.stat().st_size
    idx = load_index(path)
    assert queries.sa(idx, 24) == 11
    assert queries.lce(idx, 3, 11) == 9
    assert queries.isa(idx, 11) == 24
    assert idx.display(queries.bwt_bytes(idx)) == b"AT#TTTTTCCGGGGAAA###AAATATAA"


def test_component_sizes_sum_to_payload(blob):
    sizes = component_sizes(blob)
    assert list(sizes) == list(SECTIONS)
    assert sum(sizes.values()) == payload_size(blob)


@pytest.mark.parametrize("where", [0, 20, 100, -40, -1])
def test_corruption_is_detected(blob, where):
    bad = bytearray(blob)
    bad[where] ^= 0x5A
    with pytest.raises(FormatError):
        loads(bytes(bad))


def test_truncation_is_detected(blob):
    for cut in (0, 7, len(MAGIC) + 10, len(blob) // 2, len(blob) - 1):
        with pytest.raises(FormatError):
            loads(blob[:cut])
