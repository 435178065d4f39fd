from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topocycles.edgesets import CutExpr, EdgeSetExpr
from topocycles.ends import truncate
from topocycles.families import FAMILIES, InfiniteDegreeError, family, format_item, parse_item, with_finite_part
from topocycles.graph import named_graph


@pytest.mark.parametrize("name", list(FAMILIES))
def test_adjacency_is_symmetric(name):
    g = family(name)
    w = g.window(6)
    for v in w.vertices:
        for e, x in g.incident(v, 6):
            assert set(g.endpoints(e)) == {v, x}
            if x in w.vertices:
                assert v in g.neighbors(x, 6)


@pytest.mark.parametrize("name", list(FAMILIES))
def test_layers_partition_and_columns(name):
    g = family(name)
    seen = set()
    for c in range(6):
        layer = g.layer(c)
        assert all(g.col(v) == c for v in layer)
        assert not seen & set(layer)
        seen |= set(layer)
    assert g.exhaustion(6) == seen | g.hubs


def test_hub_needs_width():
    g = family("dominated-ladder")
    with pytest.raises(InfiniteDegreeError):
        g.incident("d")
    assert len(g.incident("d", 5)) == 5


def test_ladder_truncation_sizes():
    g = family("ladder")
    t2 = truncate(g, 2)
    assert len(t2.vertices) == 5 and len(t2.labels) == 1
    # 4 real vertices carry 2 rails edges + 2 rungs, plus the 2 edges into the tail
    assert len(t2.edges) == 6
    for n in range(1, 8):
        assert len(truncate(g, n).vertices) == 2 * n + 1


def test_dominated_ladder_keeps_hub():
    g = family("dominated-ladder")
    t1 = truncate(g, 1)
    assert {"d", ("u", 0), ("l", 0)} <= t1.vertices
    assert all("d" in g.exhaustion(n) for n in range(1, 6))


@pytest.mark.parametrize("tok, item", [("u3", ("u", 3)), ("h2,5", ("h", 2, 5)), ("d", "d"), ("7", 7), ("b", ("b",))])
def test_item_syntax(tok, item):
    assert parse_item(tok) == item
    assert parse_item(format_item(item)) == item


def test_with_finite_part():
    g = with_finite_part(family("ray"), named_graph("k3"), attach={"a": 0})
    w = g.window(3)
    # k3 edge order ab, ac, bc; vertex order a, b, c
    assert w.edges[("xe", 0)] == (0, ("x", 1))
    assert w.edges[("xe", 2)] == (("x", 1), ("x", 2))


# -- edge-set expressions ------------------------------------------------------------------


LADDER = family("ladder")


def test_expr_parse_and_membership():
    e = EdgeSetExpr.parse(LADDER, "{R0} + period(0, 1, {U0, L0})")
    assert e.contains(("R", 0)) and not e.contains(("R", 1))
    assert all(e.contains(("U", i)) and e.contains(("L", i)) for i in range(40))
    assert EdgeSetExpr.parse(LADDER, e.to_text()) == e
    assert not e.is_finite
    with pytest.raises(OverflowError):
        len(e)


def test_expr_rejects_bad_pattern():
    with pytest.raises(ValueError):
        EdgeSetExpr.parse(LADDER, "{} + period(0, 1, {U3})")
    with pytest.raises(ValueError):
        EdgeSetExpr.parse(family("grid"), "{} + period(0, 1, {h0,0})")


columns = st.integers(0, 3)
tags = st.sampled_from(["U", "L", "R"])


def exprs():
    edge = st.tuples(tags, st.integers(0, 5))

    @st.composite
    def build(draw):
        fin = draw(st.frozensets(edge, max_size=4))
        if draw(st.booleans()):
            start = draw(columns)
            period = draw(st.integers(1, 3))
            pat = draw(st.frozensets(st.tuples(tags, st.integers(start, start + period - 1)), min_size=1, max_size=4))
            return EdgeSetExpr(LADDER, fin, start, period, pat)
        return EdgeSetExpr(LADDER, fin)

    return build()


@settings(max_examples=150, deadline=None)
@given(exprs(), exprs())
def test_set_algebra_matches_materialised(a, b):
    h = 30
    ma, mb = a.materialize(h), b.materialize(h)
    assert (a ^ b).materialize(h) == ma ^ mb
    assert (a | b).materialize(h) == ma | mb
    assert (a & b).materialize(h) == ma & mb
    assert (a - b).materialize(h) == ma - mb
    k = a.intersection_size(b)
    if k != float("inf"):
        assert k == len(ma & mb)
    else:
        assert len((a & b).materialize(60)) > len(ma & mb)


@settings(max_examples=80, deadline=None)
@given(exprs())
def test_text_round_trip(a):
    assert EdgeSetExpr.parse(LADDER, a.to_text()) == a


def test_cut_expr_edges():
    star_l0 = CutExpr.parse(LADDER, "side {l0}")
    assert star_l0.edges() == EdgeSetExpr.parse(LADDER, "{L0, R0}")
    upper = CutExpr.parse(LADDER, "side {} + period(0, 1, {u0})")
    assert upper.edges() == EdgeSetExpr.parse(LADDER, "{} + period(0, 1, {R0})")
    dl = family("dominated-ladder")
    hub = CutExpr.parse(dl, "side {d} cover {d}")
    assert hub.is_covered()
    assert not CutExpr.parse(LADDER, "side {} + period(0, 1, {u0}) cover {u0}").is_covered()
