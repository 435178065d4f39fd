from __future__ import annotations

from functools import reduce

from hypothesis import given
from hypothesis import strategies as st

from topocycles import gf2

vectors = st.lists(st.integers(0, 255), max_size=8)


def brute_span(vs):
    out = {0}
    for v in vs:
        out |= {x ^ v for x in out}
    return out


@given(vectors)
def test_span_matches_brute_force(vs):
    basis = gf2.reduce_basis(vs)
    assert set(gf2.span(basis)) == brute_span(vs)
    assert len(basis) == gf2.rank(vs)
    assert 2 ** len(basis) == len(brute_span(vs))


@given(vectors, st.integers(0, 255))
def test_in_span(vs, x):
    assert gf2.in_span(x, gf2.reduce_basis(vs)) == (x in brute_span(vs))


@given(vectors)
def test_orthogonal_complement(vs):
    comp = gf2.orthogonal_complement(vs, 8)
    expected = {x for x in range(256) if all(gf2.popcount(x & v) % 2 == 0 for v in vs)}
    assert brute_span(comp) == expected


def test_mask_round_trip():
    order = ["a", "b", "c", "d"]
    index = {x: i for i, x in enumerate(order)}
    m = gf2.mask_of({"b", "d"}, index)
    assert m == 0b1010
    assert gf2.items_of(m, order) == frozenset({"b", "d"})


def test_popcount():
    assert gf2.popcount(0) == 0
    assert gf2.popcount(reduce(lambda a, b: a | b, [1 << i for i in range(0, 40, 3)])) == 14
