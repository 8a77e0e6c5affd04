"""Serialization round-trips and manifest hashing."""

import json

import numpy as np
import pytest

from bolab.errors import PreconditionError
from bolab.spectral_core import Field, Grid
from bolab.storage import (content_hash, read_field, write_csv, write_field,
                           write_field_csv, write_manifest)


def test_field_roundtrip_exact(tmp_path, rng):
    g = Grid(512, 32.0)
    f = Field(g, rng.standard_normal(g.n))
    path = tmp_path / "field.bof"
    write_field(path, f)
    back = read_field(path)
    assert back.grid == g
    assert np.array_equal(back.samples, f.samples)


def test_field_bad_magic(tmp_path):
    path = tmp_path / "junk.bof"
    path.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(PreconditionError):
        read_field(path)


def test_csv_full_precision_roundtrip(tmp_path):
    path = tmp_path / "t.csv"
    value = 0.1 + 0.2
    write_csv(path, ["a"], [(value,)])
    text = path.read_text().splitlines()
    assert text[0] == "a"
    assert float(text[1]) == value


def test_field_csv_deterministic(tmp_path):
    g = Grid(256, 16.0)
    f = Field.from_function(g, lambda x: np.exp(-x ** 2))
    p1 = tmp_path / "a.csv"
    p2 = tmp_path / "b.csv"
    write_field_csv(p1, f)
    write_field_csv(p2, f)
    assert p1.read_bytes() == p2.read_bytes()


def test_manifest_hashes_outputs(tmp_path):
    g = Grid(256, 16.0)
    f = Field.from_function(g, lambda x: np.exp(-x ** 2))
    data = tmp_path / "field.csv"
    write_field_csv(data, f)
    man = tmp_path / "manifest.json"
    write_manifest(man, "solve", {"n": 256}, 7, {"field.csv": data},
                   wall_time=0.5, steps=10)
    loaded = json.loads(man.read_text())
    assert loaded["outputs"]["field.csv"] == content_hash(data)
    assert loaded["seed"] == 7
    assert loaded["steps"] == 10
    assert loaded["config"]["n"] == 256
