import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from baode import io
from baode.amalgam import AmalgamationInstance
from baode.bao import Morphism, Signature
from baode.errors import BaodeError, ParseError
from baode.frames import Frame, FrameMorphism, cylindric_set_frame
from baode.generators import random_frame, surjective_bounded_morphism
from baode.schema import Schema, default_schema

from conftest import random_complex_algebra

DATA = Path(__file__).parent / "data"
seeds = st.integers(0, 2**32 - 1)


def same_bao(a, b):
    return (
        a.n == b.n
        and a.sig == b.sig
        and np.array_equal(a.cyl, b.cyl)
        and all(np.array_equal(a.subst_images(t), b.subst_images(t)) for t in a.sig.transformations)
        and (a.diag is None) == (b.diag is None)
        and (a.diag is None or np.array_equal(a.diag, b.diag))
    )


def test_element_encoding():
    assert io.atoms_of(0b1011) == [0, 1, 3]
    assert io.element_of([0, 1, 3]) == 0b1011
    with pytest.raises(ParseError):
        io.element_of([4], 4)


@given(seeds, st.integers(1, 2), st.integers(1, 4), st.booleans())
def test_frame_round_trip(seed, dim, n, diagonals):
    rng = np.random.default_rng(seed)
    F = random_frame(rng, Signature(dim, with_diagonals=diagonals), n)
    assert io.loads(io.dumps(F)) == F


def test_frame_labels_and_restricted_signature_round_trip():
    F = cylindric_set_frame(2, 2, transformations=[(0, 1), (1, 0)])
    d = io.to_dict(F, "swapped")
    assert d["name"] == "swapped" and d["transformations"] == [[0, 1], [1, 0]]
    G = io.from_dict(json.loads(json.dumps(d)))
    assert G == F and G.labels == F.labels


@given(seeds, st.integers(1, 2), st.integers(1, 4))
def test_bao_round_trip(seed, dim, n):
    a = random_complex_algebra(seed, dim, n)
    assert same_bao(io.loads(io.dumps(a)), a)


@given(seeds, st.integers(1, 3))
def test_morphism_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    F = random_frame(rng, Signature(2), n)
    m = surjective_bounded_morphism(rng, F)
    back = io.loads(io.dumps(m))
    assert isinstance(back, FrameMorphism) and back.mapping == m.mapping and back.target == F
    a = random_complex_algebra(seed, 1, n)
    idm = Morphism.identity(a)
    back = io.loads(io.dumps(idm))
    assert back.atom_images.tolist() == idm.atom_images.tolist()


def test_schema_round_trip_by_name():
    s = io.loads(io.dumps(default_schema(), "mine"))
    assert isinstance(s, Schema) and s.names() == default_schema().names()


def test_instance_round_trip():
    inst = io.load(DATA / "two-four-four.json")
    again = io.loads(io.dumps(inst))
    assert isinstance(again, AmalgamationInstance)
    assert same_bao(again.left, inst.left)
    assert again.f.atom_images.tolist() == inst.f.atom_images.tolist()
    assert again.schema.names() == inst.schema.names()
    none = io.instance_from_dict(dict(io.to_dict(inst), schema="none"))
    assert none.schema == ()
    with pytest.raises(ParseError):
        io.instance_from_dict(dict(io.to_dict(inst), schema="elsewhere"))


@pytest.mark.parametrize(
    "text",
    [
        "[1, 2]",
        '{"kind": "widget"}',
        '{"kind": "frame", "dim": 1, "with_diagonals": false}',
        '{"kind": "frame", "dim": 1, "with_diagonals": false, "points": 2, "T": [[[0, 2]]]}',
        '{"kind": "frame", "dim": 1, "with_diagonals": false, "points": 2, "T": [[], []]}',
        '{"kind": "frame", "dim": 2, "with_diagonals": false, "points": 1, "T": [[], []], "S": []}',
        '{"kind": "bao", "dim": 1, "with_diagonals": false, "atoms": 1, "cyl": [[[3]]]}',
        '{"kind": "morphism", "level": "sideways", "source": "a", "target": "b", "map": []}',
        '{"kind": "morphism", "source": "a", "target": "b", "map": []}',
    ],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        io.loads(text)


def test_invalid_json_reports_position():
    with pytest.raises(ParseError) as exc:
        io.loads('{"kind": "frame",, }')
    assert exc.value.position == 17


def test_workspace(tmp_path):
    ws = io.Workspace().load_dir(DATA)
    assert isinstance(ws.resolve("noncommuting"), Frame)
    assert isinstance(ws.resolve(str(DATA / "commute-schema.json")), Schema)
    with pytest.raises(BaodeError, match="unbound name"):
        ws.resolve("nothing-here")
    with pytest.raises(ParseError):
        ws.load_file(DATA / "noncommuting.json")
    (tmp_path / "m.json").write_text(
        json.dumps({"kind": "morphism", "level": "frame", "source": "noncommuting", "target": "noncommuting", "map": [0, 1]})
    )
    m = ws.load_file(tmp_path / "m.json")
    assert m.source is ws.resolve("noncommuting")
    io.save(m, tmp_path / "copy.json", "copy")
    assert json.loads((tmp_path / "copy.json").read_text())["name"] == "copy"
    with pytest.raises(TypeError):
        io.to_dict(object())
