from __future__ import annotations

import numpy as np
import pytest

from pfpds import queries
from pfpds.builder import build_index
from pfpds.errors import FormatError
from pfpds.parser import TriggerConfig, parse_text, prepare_text
from pfpds.pfpfiles import read_pfp, write_pfp
from pfpds.serialize import dumps

from _support import EXAMPLE_RAW, repetitive_text


def _parse(raw, w, p):
    text = prepare_text(raw, w)
    return parse_text(text, TriggerConfig(w=w, p=p))


def test_file_layout(tmp_path):
    text = prepare_text(EXAMPLE_RAW, 2)
    d, p = parse_text(text, TriggerConfig.explicit([b"AC", b"AG", b"T#"]))
    write_pfp(tmp_path / "ex", d, p)
    dict_bytes = (tmp_path / "ex.dict").read_bytes()
    assert dict_bytes.endswith(b"\x01\x00")
    assert dict_bytes.split(b"\x01")[0] == b"\x02\x02GATTAC"
    parse_bytes = (tmp_path / "ex.parse").read_bytes()
    assert np.frombuffer(parse_bytes, dtype="<u4").tolist() == [1, 2, 4, 2, 5, 3]


def test_import_answers_identically(tmp_path):
    rng = np.random.default_rng(0)
    raw = repetitive_text(rng, 3000, 4)
    d, p = _parse(raw, 4, 16)
    direct = build_index(d, p)
    write_pfp(tmp_path / "t", d, p)
    d2, p2 = read_pfp(tmp_path / "t", 4)
    imported = build_index(d2, p2)
    assert dumps(imported) == dumps(direct)
    for i in rng.integers(0, direct.n, 200).tolist():
        assert queries.sa(imported, i) == queries.sa(direct, i)


def test_bad_files(tmp_path):
    d, p = parse_text(prepare_text(EXAMPLE_RAW, 2), TriggerConfig.explicit([b"AC", b"AG", b"T#"]))
    write_pfp(tmp_path / "x", d, p)
    good_dict = (tmp_path / "x.dict").read_bytes()
    good_parse = (tmp_path / "x.parse").read_bytes()

    (tmp_path / "x.dict").write_bytes(good_dict[:-1])
    with pytest.raises(FormatError):
        read_pfp(tmp_path / "x", 2)
    (tmp_path / "x.dict").write_bytes(good_dict)

    (tmp_path / "x.parse").write_bytes(good_parse[:-1])
    with pytest.raises(FormatError):
        read_pfp(tmp_path / "x", 2)

    ranks = np.frombuffer(good_parse, dtype="<u4").copy()
    ranks[-1] = len(d) + 5
    (tmp_path / "x.parse").write_bytes(ranks.tobytes())
    with pytest.raises(FormatError):
        read_pfp(tmp_path / "x", 2)

    # swapping two parse entries breaks the w-byte overlaps
    ranks = np.frombuffer(good_parse, dtype="<u4").copy()
    ranks[[1, 2]] = ranks[[2, 1]]
    (tmp_path / "x.parse").write_bytes(ranks.tobytes())
    with pytest.raises(FormatError):
        read_pfp(tmp_path / "x", 2)

    with pytest.raises(FormatError):
        read_pfp(tmp_path / "missing", 2)
