from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_bonds, brute_cuts, brute_cycles, crossing, multigraph_strategy
from topocycles.graph import (
    Multigraph,
    SizeLimitError,
    all_cuts,
    bonds,
    boundary,
    compose_maps,
    components,
    contract_to,
    cycle_edge_sets,
    cycle_graph,
    induced_cut,
    named_graph,
    path_graph,
    project,
)


def two_triangles():
    return Multigraph.from_edges({"ab": "ab", "bc": "bc", "ca": "ca", "de": "de", "ef": "ef", "fd": "fd"})


# -- components / cuts / boundary --------------------------------------------------------


def test_components_examples():
    assert sorted(len(c) for c in components(two_triangles())) == [3, 3]
    assert components(Multigraph(frozenset({"x"}), {})) == [frozenset({"x"})]
    assert len(components(named_graph("k4"))) == 1


def test_induced_cut_examples():
    k3 = named_graph("k3")
    assert induced_cut(k3, {"a"}).edges == {"ab", "ac"}
    assert induced_cut(k3, k3.vertices).edges == frozenset()
    c4 = named_graph("c4")
    assert induced_cut(c4, {"a", "c"}).edges == frozenset(c4.edges)
    with pytest.raises(ValueError):
        induced_cut(k3, {"z"})


def test_boundary_examples():
    k3 = named_graph("k3")
    assert boundary(k3, {"ab"}) == {"a", "b"}
    assert boundary(k3, set(k3.edges)) == frozenset()
    c4 = named_graph("c4")
    assert boundary(c4, {"ab", "cd"}) == {"a", "b", "c", "d"}


# -- bonds and cycles against brute force ------------------------------------------------


def test_bond_examples():
    assert sorted(len(c.edges) for c in bonds(named_graph("k3"))) == [2, 2, 2]
    k4 = sorted(len(c.edges) for c in bonds(named_graph("k4")))
    assert k4 == [3, 3, 3, 3, 4, 4, 4]
    assert [c.edges for c in bonds(named_graph("p2"))] == [frozenset({"ab"})]


def test_cycle_examples():
    assert [len(c) for c in cycle_edge_sets(named_graph("k3"))] == [3]
    par = Multigraph.from_edges({1: ("u", "v"), 2: ("u", "v")})
    assert cycle_edge_sets(par) == [frozenset({1, 2})]
    assert sorted(len(c) for c in cycle_edge_sets(named_graph("k4"))) == [3, 3, 3, 3, 4, 4, 4]
    assert cycle_edge_sets(named_graph("loop")) == [frozenset({"l"})]
    assert len(cycle_edge_sets(named_graph("theta"))) == 3


def test_size_limit():
    big = Multigraph.from_edges({i: (0, 1) for i in range(17)})
    with pytest.raises(SizeLimitError):
        cycle_edge_sets(big)
    with pytest.raises(SizeLimitError):
        bonds(big)


@settings(max_examples=150, deadline=None)
@given(multigraph_strategy(max_vertices=6, max_edges=9, connected=False))
def test_cycles_and_bonds_match_brute_force(g):
    assert set(cycle_edge_sets(g)) == brute_cycles(g)
    assert {c.edges for c in bonds(g)} == brute_bonds(g)
    assert {c.edges for c in all_cuts(g)} == brute_cuts(g)


@settings(max_examples=100, deadline=None)
@given(multigraph_strategy(max_vertices=6, max_edges=9, connected=False), st.data())
def test_cut_cycle_orthogonality(g, data):
    side = data.draw(st.sets(st.sampled_from(sorted(g.vertices))))
    cut = induced_cut(g, side).edges
    assert cut == crossing(g, side)
    for c in cycle_edge_sets(g):
        assert len(c & cut) % 2 == 0


@settings(max_examples=100, deadline=None)
@given(multigraph_strategy(max_vertices=6, max_edges=9))
def test_bond_sides_connected(g):
    for b in bonds(g):
        for side in (b.side, b.other):
            assert len(components(g.subgraph(side))) == 1


# -- contraction and projection ----------------------------------------------------------


def test_contract_path():
    p = path_graph(4)  # a-b-c-d
    h = contract_to(p, {"a", "b"})
    k = ("K", "c")
    assert h.vertices == {"a", "b", k}
    assert h.edges == {"ab": ("a", "b"), "bc": ("b", k)}
    assert h.labels == {k: frozenset({"c", "d"})}


def test_contract_identity():
    k4 = named_graph("k4")
    assert contract_to(k4, k4.vertices) == k4


def test_contract_c6_antipodal():
    h = contract_to(cycle_graph(6), {"a", "d"})
    assert len(h.vertices) == 4 and len(h.edges) == 4
    assert all(len({a, b} & {"a", "d"}) == 1 for a, b in h.edges.values())
    assert sorted(len(b) for b in h.labels.values()) == [2, 2]


def test_project_examples():
    p = path_graph(4)
    w = contract_to(p, {"a", "b"})
    same, ident = project(w, {"a", "b"})
    assert same == w and all(k == v for k, v in ident.items())
    u, f = project(w, {"a"})
    k = ("K", "b")
    assert u.vertices == {"a", k} and u.edges == {"ab": ("a", k)}
    assert u.labels[k] == {"b", "c", "d"}
    assert f["b"] == k and f[("K", "c")] == k
    with pytest.raises(ValueError):
        project(w, {"c"})


def test_project_functoriality_c6():
    c6 = cycle_graph(6)
    x = c6.vertices
    w, u = {"a", "d"}, {"a"}
    gx = contract_to(c6, x)
    gw, f_xw = project(gx, w)
    gu, f_wu = project(gw, u)
    direct, f_xu = project(gx, u)
    assert gu == direct
    assert compose_maps(f_wu, f_xw) == f_xu


@settings(max_examples=80, deadline=None)
@given(multigraph_strategy(max_vertices=6, max_edges=9), st.data())
def test_functoriality_random_chains(g, data):
    vs = sorted(g.vertices)
    x = data.draw(st.sets(st.sampled_from(vs), min_size=1))
    w = data.draw(st.sets(st.sampled_from(sorted(x))))
    u = data.draw(st.sets(st.sampled_from(sorted(w)))) if w else set()
    gx = contract_to(g, x)
    gw, f_xw = project(gx, w)
    gu, f_wu = project(gw, u)
    direct, f_xu = project(gx, u)
    assert gu == direct
    assert compose_maps(f_wu, f_xw) == f_xu
    assert contract_to(g, u) == direct


@settings(max_examples=80, deadline=None)
@given(multigraph_strategy(max_vertices=6, max_edges=9), st.data())
def test_contraction_keeps_parity_at_w(g, data):
    w = data.draw(st.sets(st.sampled_from(sorted(g.vertices)), min_size=1))
    s = data.draw(st.sets(st.sampled_from(sorted(g.edges)))) if g.edges else set()
    h = contract_to(g, w)
    kept = s & set(h.edges)
    for v in w:
        assert g.degree(v, s) % 2 == h.degree(v, kept) % 2


def test_contracted_labels_partition_outside():
    g = cycle_graph(6)
    h = contract_to(g, {"a"})
    assert set().union(*h.labels.values()) == g.vertices - {"a"}


# -- text and dot --------------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(multigraph_strategy())
def test_text_round_trip(g):
    assert Multigraph.from_text(g.to_text()) == g


def test_text_round_trip_labels_and_tuples():
    g = contract_to(path_graph(5), {"a", "b"})
    assert Multigraph.from_text(g.to_text()) == g
    t = Multigraph.from_edges({("e", 1): (("u", 0), ("l", 0))})
    assert Multigraph.from_text(t.to_text()) == t


def test_dot_mentions_every_edge():
    g = named_graph("k4")
    dot = g.to_dot(highlight={"ab"})
    assert dot.startswith("graph") and dot.count("--") == 6


def test_named_graphs():
    assert len(named_graph("k5").edges) == 10
    assert len(named_graph("k23").edges) == 6
    with pytest.raises(KeyError):
        named_graph("nope")
    for n in range(3, 7):
        g = cycle_graph(n)
        assert len(g.edges) == n and all(g.degree(v) == 2 for v in g.vertices)
    assert list(itertools.islice(path_graph(3).edge_order(), 2)) == ["ab", "bc"]
