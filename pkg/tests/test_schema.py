import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from baode.bao import Signature, dimension_set
from baode.errors import ParseError, SignatureError
from baode.frames import complex_algebra, cylindric_set_frame
from baode.schema import (
    annotated_partition,
    check_schema,
    default_positive_schema,
    default_schema,
    dual_meet_schema,
    instantiate,
    load_schema,
    positive_partition,
    satisfies,
    schema_from_dict,
    schema_to_dict,
    small_elements,
    toolkit_schema,
)

from conftest import random_complex_algebra

DATA = __import__("pathlib").Path(__file__).parent / "data"
seeds = st.integers(0, 2**32 - 1)


def cs(dim, base):
    return complex_algebra(cylindric_set_frame(dim, base))


def test_default_schema_entries():
    s = default_schema()
    assert {"c-normal", "c-additive", "s-composition", "s-ij-diagonal", "fresh-rename", "spare-commute"} <= set(s.names())


def test_positive_split_agrees_with_annotations():
    assert positive_partition(default_schema()) == annotated_partition(default_schema())
    pos = default_positive_schema()
    assert set(pos.names()) == set(positive_partition(default_schema())[0])
    assert "s-complement" not in pos.names()


@pytest.mark.parametrize("dim, base", [(1, 2), (1, 3), (2, 2), (2, 3)])
def test_set_algebras_satisfy_default_schema(dim, base):
    rep = check_schema(cs(dim, base), default_schema())
    assert rep.valid, [i.label for i, _ in rep.failures()]


def test_small_dimension_failures_in_three_dimensions():
    rep = check_schema(cs(3, 2), default_schema(), small_dim=2)
    failing = sorted(i.label for i, _ in rep.failures())
    assert failing == [f"spare-commute[m=2,tau={t}]" for t in ("022", "122", "202", "212", "222")]
    labels = {i.label for i, _ in rep.results}
    assert {"fresh-rename[i=0,m=2]", "fresh-rename[i=1,m=2]"} <= labels


def test_instance_counts():
    s = default_schema()
    sig = Signature(2)
    inst = instantiate(s, sig)
    by = {}
    for i in inst:
        by[i.entry.name] = by.get(i.entry.name, 0) + 1
    assert by["c-normal"] == 2
    assert by["s-composition"] == 16
    assert by["s-ij-diagonal"] == 2
    assert "fresh-rename" not in by and "spare-commute" not in by
    inst3 = instantiate(s, Signature(3), small_dim=2)
    fixing = [dict(i.binding)["tau"] for i in inst3 if i.entry.name == "spare-commute"]
    assert len(fixing) == 9 and all(t[2] == 2 for t in fixing)
    with pytest.raises(SignatureError):
        instantiate(s, sig, small_dim=3)


def test_diagonal_entries_skipped_without_diagonals():
    s = schema_from_dict(
        {"equations": [{"name": "d", "lhs": "(d 0 0)", "rhs": "1", "requires_diagonals": True}, "x = x"]}
    )
    assert [i.label for i in instantiate(s, Signature(1, with_diagonals=False))] == ["eq1"]
    assert len(instantiate(s, Signature(1))) == 2


@pytest.mark.parametrize("dim, base, small", [(2, 2, 1), (3, 2, 2), (3, 2, 0)])
def test_small_elements_brute_force(dim, base, small):
    a = cs(dim, base)
    want = [x for x in range(a.top + 1) if dimension_set(a, x) <= set(range(small))]
    assert small_elements(a, small).tolist() == want


def test_schema_round_trip_and_file(tmp_path):
    s = default_schema()
    again = schema_from_dict(schema_to_dict(s))
    assert again.names() == s.names()
    assert [e.equation for e in again] == [e.equation for e in s]
    assert [(e.params, e.where, e.restrict, e.positive) for e in again] == [
        (e.params, e.where, e.restrict, e.positive) for e in s
    ]
    assert load_schema(DATA / "trivial-schema.json").names() == ["eq0"]


@pytest.mark.parametrize(
    "bad",
    [
        {"kind": "frame", "equations": []},
        {"equations": "x = x"},
        {"equations": [{"name": "e", "lhs": "x"}]},
        {"equations": [{"equation": "(c i x) = x", "params": {"i": "colour"}}]},
        {"equations": [{"equation": "(c i x) = x", "params": {"i": "index"}, "where": [["lt", "i", "i"]]}]},
        {"equations": ["(c 0 x = x"]},
    ],
)
def test_schema_errors(bad):
    with pytest.raises(ParseError):
        schema_from_dict(bad)


def test_toolkit_dual_join_counterexample():
    rep = check_schema(cs(1, 2), toolkit_schema())
    assert [(i.label, r.counterexample) for i, r in rep.failures()] == [("dual-c-join[m=0]", {"u": 1, "v": 2})]
    assert satisfies(cs(1, 2), dual_meet_schema())


@given(seeds, st.integers(1, 2), st.integers(1, 4))
def test_dual_cylindrifier_distributes_over_meets(seed, dim, n):
    a = random_complex_algebra(seed, dim, n)
    assert satisfies(a, dual_meet_schema())
    assert satisfies(a, toolkit_schema().select(["c-join"]))
    # brute force of the same law
    top = a.top
    for i in range(dim):
        dc = [top & ~a.c(i, top & ~x) for x in range(top + 1)]
        for u, v in itertools.product(range(top + 1), repeat=2):
            assert dc[u & v] == dc[u] & dc[v]
