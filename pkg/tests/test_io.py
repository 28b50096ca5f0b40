import json
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from johnforge import io
from johnforge.exceptions import ParameterError
from johnforge.geometry import Box
from johnforge.simplify import build_graph, cut_slits


@settings(max_examples=50)
@given(st.lists(st.booleans(), min_size=16, max_size=16))
def test_rle_round_trip(flags):
    bits = np.array(flags).reshape(4, 4)
    assert np.array_equal(io.rle_decode(io.rle_encode(bits), (4, 4)), bits)


def test_rle_length_mismatch():
    with pytest.raises(ParameterError):
        io.rle_decode([3, 4], (4, 4))


def test_mask_round_trip(mask_of):
    m = mask_of("julia:0:1", 7)
    back = io.mask_from_dict(json.loads(io.dumps(io.mask_to_dict(m))))
    assert np.array_equal(back.bits, m.bits) and back.box == m.box and back.level == m.level


def test_whitney_round_trip_and_tamper(whitney_of):
    w = whitney_of("disks:2", 7)
    d = json.loads(io.dumps(io.whitney_to_dict(w)))
    back = io.whitney_from_dict(d)
    assert np.array_equal(back.levels, w.levels) and np.array_equal(back.rows, w.rows)
    d["squares"]["row"][0] += 1
    with pytest.raises(ParameterError):
        io.whitney_from_dict(d)


def test_simplified_round_trip(whitney_of):
    w = whitney_of("disks:2", 7)
    s = cut_slits(w, build_graph(w), 0.1)
    back = io.simplified_from_dict(json.loads(io.dumps(io.simplified_to_dict(s))))
    assert np.array_equal(back.omega_hat, s.omega_hat)
    assert np.array_equal(back.graph.parent, s.graph.parent)
    assert back.graph.root == s.graph.root


def test_dumps_is_canonical():
    a = io.dumps({"b": np.float64(1.5), "a": np.arange(3), "c": (np.bool_(True), float("inf"))})
    assert a == io.dumps({"c": [True, "inf"], "a": [0, 1, 2], "b": 1.5})
    assert a.endswith("\n")


def test_atomic_write_and_schema(tmp_path):
    p = tmp_path / "x.json"
    io.write_json(p, io.document("demo", {"seed": 1}, {"value": 2}))
    doc = io.read_json(p, "demo")
    assert doc["schema"] == io.SCHEMA and doc["value"] == 2
    assert not [f for f in os.listdir(tmp_path) if f.startswith(".tmp-")]
    with pytest.raises(ParameterError):
        io.read_json(p, "other")
    p.write_text(json.dumps({"schema": "else/1"}))
    with pytest.raises(ParameterError):
        io.read_json(p)


def test_field_round_trip(tmp_path):
    v = np.arange(12.0).reshape(3, 4) + 1j
    io.write_field(tmp_path / "f.bin", v, Box(), 2)
    back, side = io.read_field(tmp_path / "f.bin")
    assert np.array_equal(back, v) and side["dtype"] == "complex128"


def test_svg_and_csv(whitney_of):
    w = whitney_of("disk:0.5", 6)
    svg = io.whitney_svg(w, size=200)
    assert svg.startswith("<?xml") and 'version="1.1"' in svg and svg.rstrip().endswith("</svg>")

    class Rep:
        n_list, deltas, verdict_gap = [4, 8], [0.25, 0.125], [0.5, 0.25]

    lines = io.gap_csv(Rep).splitlines()
    assert lines[0] == "n,delta,verdict_gap" and len(lines) == 3
