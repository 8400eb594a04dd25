import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from baode.boolean import (
    FiniteBA,
    Filter,
    enumerate_ultrafilters,
    extend_to_ultrafilter,
    generated_filter,
    is_filter,
    is_proper,
    mk_finite_ba,
    principal_filter,
)
from baode.errors import PropernessError, SizeError


def brute_filter(ba, gens):
    """Upward closure of all finite meets, computed from the definition."""
    gens = [ba.top] + [int(g) for g in gens]
    meets = set()
    for r in range(1, len(gens) + 1):
        for combo in itertools.combinations(gens, r):
            m = ba.top
            for g in combo:
                m &= g
            meets.add(m)
    return {int(z) for z in ba.elements() if any(m & ~int(z) == 0 for m in meets)}


@pytest.mark.parametrize("n, size", [(1, 2), (2, 4), (3, 8)])
def test_mk_finite_ba_sizes(n, size):
    ba = mk_finite_ba(n)
    assert len(ba.elements()) == size
    assert ba.top == size - 1


@pytest.mark.parametrize("n", [0, -1, 21])
def test_mk_finite_ba_range(n):
    with pytest.raises(SizeError):
        mk_finite_ba(n)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_boolean_axioms_exhaustive(n):
    ba = FiniteBA(n)
    xs = [int(x) for x in ba.elements()]
    for x, y, z in itertools.product(xs, repeat=3):
        assert ba.join(x, ba.join(y, z)) == ba.join(ba.join(x, y), z)
        assert ba.meet(x, ba.join(y, z)) == ba.join(ba.meet(x, y), ba.meet(x, z))
        assert ba.join(x, ba.meet(y, z)) == ba.meet(ba.join(x, y), ba.join(x, z))
    for x in xs:
        assert ba.join(x, ba.complement(x)) == ba.top
        assert ba.meet(x, ba.complement(x)) == 0
        assert ba.complement(ba.complement(x)) == x


def test_generated_filter_examples():
    ba = FiniteBA(2)
    assert generated_filter(ba, []).members == {3}
    assert generated_filter(ba, [0]).members == {0, 1, 2, 3}
    assert not generated_filter(ba, [0]).proper
    assert generated_filter(ba, [0b01]).members == {0b01, 0b11}


def test_is_proper_examples():
    ba = FiniteBA(2)
    assert is_proper(generated_filter(ba, []))
    assert not is_proper(Filter(ba, 0))
    assert not is_proper(generated_filter(ba, [0b01, 0b10]))


def test_extend_to_ultrafilter_examples():
    ba = FiniteBA(2)
    assert extend_to_ultrafilter(ba, generated_filter(ba, [])).members == {0b01, 0b11}
    assert extend_to_ultrafilter(ba, principal_filter(ba, 0b10)) == principal_filter(ba, 0b10)
    assert extend_to_ultrafilter(ba, generated_filter(ba, [0b11])).least == 0b01
    with pytest.raises(PropernessError):
        extend_to_ultrafilter(ba, Filter(ba, 0))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_enumerate_ultrafilters(n):
    ba = FiniteBA(n)
    ufs = enumerate_ultrafilters(ba)
    assert [u.least for u in ufs] == [1 << i for i in range(n)]
    for u in ufs:
        assert is_filter(ba, u.members) and u.proper
        # maximal: for every x exactly one of x, -x
        for x in ba.elements():
            assert (int(x) in u) != (ba.complement(int(x)) in u)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(0, (1 << n) - 1), max_size=4))))
def test_generated_filter_matches_definition(case):
    n, gens = case
    ba = FiniteBA(n)
    f = generated_filter(ba, gens)
    assert f.members == brute_filter(ba, gens)
    assert is_filter(ba, f.members)
    # idempotent
    assert generated_filter(ba, f.members) == f


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, (1 << n) - 1))))
def test_ultrafilter_extension_contains_and_is_maximal(case):
    n, least = case
    ba = FiniteBA(n)
    f = Filter(ba, least)
    u = extend_to_ultrafilter(ba, f)
    fast = extend_to_ultrafilter(ba, f, literal=False)
    assert u == fast
    assert f.issubset(u)
    assert u.is_ultra()
    for x in ba.elements():
        assert (int(x) in u) != (ba.complement(int(x)) in u)
