from __future__ import annotations

import json
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_bonds, multigraph_strategy
from topocycles import gf2
from topocycles.edgesets import EdgeSetExpr
from topocycles.ends import end_approximations
from topocycles.families import family
from topocycles.graph import bonds, cycle_edge_sets, cycle_graph, cycle_space_basis, named_graph
from topocycles.matroid import CircuitSystem, finite_cycle_matroid
from topocycles.psi import components_meeting, meets_all_fc_cuts_evenly
from topocycles.tom import (
    COVECTOR,
    VECTOR,
    BinaryPresentation,
    NotBinaryError,
    PreVector,
    TreeOfPresentations,
    bond_to_precovector,
    build_tree_of_presentations,
    canonical_presentation,
    cycle_to_prevector,
    enumerate_prevectors,
    glued_matroid,
    graph_presentation,
    orthogonality_check,
    periodic_prevectors,
    psi_covectors,
    psi_vectors,
    underlying,
    window_presentations,
)
from topocycles.treedec import canonical_treedec, from_bags, random_treedec, single_part, two_part, virtual_edge

V_AC = virtual_edge(0, 1, "a", "c")


def fs(*sets):
    return {frozenset(s) for s in sets}


def c4_tree():
    g = cycle_graph(4)
    td = two_part(g)
    return g, td, build_tree_of_presentations(td, g)


# -- presentations -------------------------------------------------------------------------


def test_canonical_presentation_triangle():
    p = canonical_presentation(CircuitSystem(frozenset({1, 2, 3}), [{1, 2, 3}], [{1, 2}, {1, 3}, {2, 3}]))
    assert set(p.vectors()) == fs((), (1, 2, 3))
    assert set(p.covectors()) == fs((), (1, 2), (1, 3), (2, 3))
    assert p.is_complementary()


def test_canonical_presentation_loop_and_c4():
    p = canonical_presentation(finite_cycle_matroid(named_graph("loop")))
    assert set(p.vectors()) == fs((), ("l",)) and set(p.covectors()) == fs(())
    c4 = canonical_presentation(finite_cycle_matroid(cycle_graph(4)))
    assert len(c4.vectors()) == 2 and len(c4.covectors()) == 8


def test_not_binary():
    u24 = [{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}]
    with pytest.raises(NotBinaryError):
        canonical_presentation(CircuitSystem(frozenset(range(4)), u24, u24))


@settings(max_examples=80, deadline=None)
@given(multigraph_strategy(max_vertices=6, max_edges=9))
def test_graph_presentation_matches_canonical(g):
    a = graph_presentation(g)
    b = canonical_presentation(finite_cycle_matroid(g))
    assert set(a.vectors()) == set(b.vectors()) and set(a.covectors()) == set(b.covectors())
    assert a.circuit_system() == finite_cycle_matroid(g)


def test_presentation_json():
    p = graph_presentation(named_graph("k4"))
    q = BinaryPresentation.from_json(json.loads(json.dumps(p.to_json())))
    assert set(q.vectors()) == set(p.vectors()) and set(q.covectors()) == set(p.covectors())


# -- trees of presentations --------------------------------------------------------------------


def test_c4_tree_of_presentations():
    g, td, top = c4_tree()
    assert top.dummies == {(0, 1): frozenset({V_AC})}
    assert set(top.ground) == set(g.edges)
    assert all(len(top.presentations[t].ground) == 3 for t in (0, 1))
    assert top.check() is None


def test_single_part_tree():
    g = named_graph("k4")
    top = build_tree_of_presentations(single_part(g), g)
    assert set(top.ground) == set(g.edges) and not top.dummies


def test_ladder_window_is_a_path():
    top = window_presentations(canonical_treedec("ladder"), 4)
    assert top.parent == {0: None, 1: 0, 2: 1, 3: 2}
    assert top.check() is None and top.boundary


def test_tree_json_round_trip():
    _, _, top = c4_tree()
    back = TreeOfPresentations.from_json(json.loads(json.dumps(top.to_json())))
    assert back.parent == top.parent and back.ground == top.ground
    assert set(psi_vectors(back)) == set(psi_vectors(top))


# -- pre-vectors ------------------------------------------------------------------------------


def test_c4_prevectors():
    g, td, top = c4_tree()
    pv = enumerate_prevectors(top, 2)
    assert len(pv) == 1
    (p,) = pv
    assert p.support == {0, 1}
    assert underlying(p, top) == set(g.edges)
    cv = enumerate_prevectors(top, 2, COVECTOR)
    # the even cut {ab, bc, cd, da} splits into two single-node pieces, so only the bonds appear
    assert {underlying(p, top) for p in cv} == brute_bonds(g)


def test_single_node_not_allowed_with_nonzero_dummy():
    _, _, top = c4_tree()
    p = PreVector(VECTOR, {0: frozenset({"ab", "bc", V_AC})})
    assert "outside the subtree" in p.check(top)
    assert PreVector(VECTOR, {}).check(top) == "empty subtree"
    assert PreVector(VECTOR, {0: frozenset()}).check(top) == "all-zero assignment"


def test_zero_middle_restriction_rejected():
    g = cycle_graph(6)
    td = from_bags(g, [{"a", "b", "c"}, {"a", "c", "d", "f"}, {"d", "e", "f"}])
    top = build_tree_of_presentations(td, g)
    v01 = virtual_edge(0, 1, "a", "c")
    v12 = virtual_edge(1, 2, "d", "f")
    good = PreVector(VECTOR, {0: frozenset({"ab", "bc", v01}), 1: frozenset({"cd", "fa", v01, v12}), 2: frozenset({"de", "ef", v12})})
    assert good.check(top) is None and underlying(good, top) == set(g.edges)
    # zero on the middle node makes its restrictions vanish on internal tree edges
    bad = PreVector(VECTOR, {0: frozenset(), 1: frozenset(), 2: frozenset({"de", "ef", v12})})
    assert bad.check(top).startswith("zero restriction on internal tree edge")


def test_underlying_examples():
    g, td, top = c4_tree()
    assert underlying(PreVector(VECTOR, {0: frozenset({V_AC}), 1: frozenset({V_AC})}), top) == frozenset()
    k3 = named_graph("k3")
    t1 = build_tree_of_presentations(single_part(k3), k3)
    assert underlying(PreVector(VECTOR, {0: frozenset(k3.edges)}), t1) == set(k3.edges)


def test_psi_vectors_examples():
    g, td, top = c4_tree()
    assert set(psi_vectors(top)) == fs((), g.edges)
    assert set(psi_vectors(top, max_terms=2, max_subtree=2)) == fs((), g.edges)
    k3 = named_graph("k3")
    t1 = build_tree_of_presentations(single_part(k3), k3)
    assert set(psi_vectors(t1)) == set(graph_presentation(k3).vectors())


def test_ladder_window_vectors_are_the_cycle_space():
    ltd = canonical_treedec("ladder")
    td = ltd.restrict(4)
    w = ltd.family.window(4)
    top = build_tree_of_presentations(td, w)
    idx = {e: i for i, e in enumerate(w.edge_order())}
    space = {gf2.items_of(m, w.edge_order()) for m in gf2.span([gf2.mask_of(c, idx) for c in cycle_space_basis(w)])}
    assert set(psi_vectors(top)) == space
    assert set(psi_vectors(top, max_terms=4, max_subtree=4)) == space


# -- liftings -----------------------------------------------------------------------------------


def test_cycle_lift_c4():
    g, td, top = c4_tree()
    lifted = cycle_to_prevector(top, set(g.edges))
    assert lifted.ok
    assert lifted.prevector.assignment == {0: frozenset({"ab", "bc", V_AC}), 1: frozenset({"cd", "da", V_AC})}
    assert lifted.z_sizes == {(0, 1): 2}


def test_cycle_inside_one_part():
    g = named_graph("k4")
    td = from_bags(g, [{"a", "b", "c"}, {"a", "b", "c", "d"}])
    top = build_tree_of_presentations(td, g)
    lifted = cycle_to_prevector(top, {"ab", "bc", "ac"})
    assert lifted.ok and lifted.prevector.support == {0}


def test_six_cycle_over_three_parts():
    g = cycle_graph(6)
    td = from_bags(g, [{"a", "b", "c"}, {"a", "c", "d", "f"}, {"d", "e", "f"}])
    top = build_tree_of_presentations(td, g)
    lifted = cycle_to_prevector(top, set(g.edges))
    assert lifted.ok and lifted.z_sizes == {(0, 1): 2, (1, 2): 2}
    assert all(len(x & top.all_dummies) <= 2 for x in lifted.prevector.assignment.values())


def test_bond_lift_c4():
    g, td, top = c4_tree()
    lifted = bond_to_precovector(top, {"ab", "da"}, {"a"})
    assert lifted.ok
    assert lifted.prevector.assignment == {0: frozenset({"ab", V_AC}), 1: frozenset({"da", V_AC})}
    with pytest.raises(ValueError):
        bond_to_precovector(top, {"ab", "bc", "cd", "da"}, {"a", "c"})


def test_bond_lift_ladder_column():
    ltd = canonical_treedec("ladder")
    w = ltd.family.window(5)
    td = ltd.restrict(5)
    top = build_tree_of_presentations(td, w)
    side = {("u", 0), ("l", 0), ("u", 1), ("l", 1), ("u", 2), ("l", 2)}
    lifted = bond_to_precovector(top, {("U", 2), ("L", 2)}, side)
    assert lifted.ok and lifted.prevector.support == {2}
    rung_side = {("u", i) for i in range(5)}
    lifted = bond_to_precovector(top, {("R", i) for i in range(5)}, rung_side)
    assert lifted.ok and lifted.prevector.support == set(td.nodes)


@settings(max_examples=120, deadline=None)
@given(multigraph_strategy(max_vertices=6, max_edges=9), st.integers(0, 10_000))
def test_round_trips_random(g, seed):
    td = random_treedec(g, random.Random(seed))
    top = build_tree_of_presentations(td, g)
    for o in cycle_edge_sets(g):
        results = [cycle_to_prevector(top, o, p) for p in ("lex", "reverse", "nested")]
        assert all(r.ok for r in results), [r.complaint for r in results]
        assert all(k % 2 == 0 for r in results for k in r.z_sizes.values())
    for b in bonds(g):
        assert bond_to_precovector(top, b.edges, b.side).ok
    assert glued_matroid(top) == finite_cycle_matroid(g)


# -- glued matroid and orthogonality ---------------------------------------------------------------


def test_glued_c4():
    g, td, top = c4_tree()
    m = glued_matroid(top)
    assert m.circuits == fs(g.edges) and m == finite_cycle_matroid(g)
    assert glued_matroid(top, max_terms=3, max_subtree=2) == m


def test_glued_single_node():
    g = named_graph("k4")
    top = build_tree_of_presentations(single_part(g), g)
    assert glued_matroid(top) == graph_presentation(g).circuit_system()


def test_orthogonality_c4():
    g, td, top = c4_tree()
    v = orthogonality_check(top)
    assert v.ok and not v.violations
    c4 = frozenset(g.edges)
    sizes = sorted(len(c4 & w) for w in psi_covectors(top) if w)
    assert sizes == [2, 2, 2, 2, 2, 2, 4]
    assert all(len(frozenset() & w) == 0 for w in psi_covectors(top))


def test_orthogonality_ladder_bounded():
    ltd = canonical_treedec("ladder")
    top = window_presentations(ltd, 4)
    psi = end_approximations(ltd.tree, 6)
    v = orthogonality_check(top, psi, max_terms=4, max_subtree=4, lazy=ltd)
    assert v.ok and v.pairs > 0


def test_orthogonality_catches_a_bad_presentation():
    g, td, top = c4_tree()
    p0 = top.presentations[0]
    bad = BinaryPresentation(p0.ground, p0.vector_basis, tuple(p0.mask({e}) for e in p0.ground))
    broken = TreeOfPresentations(top.parent, {0: bad, 1: top.presentations[1]})
    assert broken.check() is not None


# -- periodic pre-vectors ----------------------------------------------------------------------------


def test_ladder_periodic_vector():
    ltd = canonical_treedec("ladder")
    vs = periodic_prevectors(ltd, VECTOR)
    fam = ltd.family
    assert any(p.expr == EdgeSetExpr.parse(fam, "{L0, R0, U0} + period(1, 1, {L1, U1})") for p in vs)


def test_periodic_vectors_are_in_f_psi():
    for name in ("ladder", "comb", "ray", "double-ray", "grid"):
        ltd = canonical_treedec(name)
        for p in periodic_prevectors(ltd, VECTOR):
            assert meets_all_fc_cuts_evenly(p.expr, 6), p.describe()
            assert all(components_meeting(p.expr, n) < math.inf for n in range(1, 6))


def test_periodic_covectors_are_cuts():
    for name in ("ladder", "comb", "ray"):
        ltd = canonical_treedec(name)
        w = ltd.family.window(10)
        cycles = cycle_space_basis(w)
        for p in periodic_prevectors(ltd, COVECTOR):
            d = p.expr.restrict(w)
            assert all(len(d & c) % 2 == 0 for c in cycles), p.describe()
