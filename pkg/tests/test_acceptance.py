"""The nine acceptance criteria, each at its stated scale and time limit.

Every test records a ``CRITERION n: PASS|FAIL`` line; ``conftest.py`` prints
them as a block at the end of the run, and each is also printed as the
test runs (visible with ``-s``).
"""

from __future__ import annotations

import random
import sys
import time

import networkx as nx
import numpy as np
import pytest

from oracles import connected_multigraphs, touched_connected
from topocycles import gf2
from topocycles.cli import figure1
from topocycles.ends import (
    Dominates,
    Separated,
    Unknown,
    ball,
    classify_ends,
    diameter,
    end_approximations,
    is_tree,
    spanning_tree_bounded_diameter,
    truncate,
    verify_fan,
)
from topocycles.families import FAMILIES, family
from topocycles.graph import (
    Multigraph,
    bonds,
    compose_maps,
    cycle_edge_sets,
    cycle_space_basis,
    project,
    random_multigraph,
)
from topocycles.matroid import check_axioms, finite_cycle_matroid
from topocycles.psi import CutTable, check_walk, euler_walk
from topocycles.tom import (
    bond_to_precovector,
    build_tree_of_presentations,
    cycle_to_prevector,
    glued_matroid,
    orthogonality_check,
    window_presentations,
)
from topocycles.treedec import canonical_treedec, random_treedec, single_part, two_part, verify_treedec

RESULTS = {}


def report(n: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)


def _multigraph(nv, pairs):
    return Multigraph(frozenset(range(nv)), dict(enumerate(pairs)))


# -- 1: axioms of the finite-cycle matroid --------------------------------------------

EXHAUSTIVE_EDGE_CAP = 8


def test_c1_finite_cycle_matroid_axioms():
    t0 = time.perf_counter()
    failures = []
    exhaustive = 0
    for nv, pairs in connected_multigraphs(4, EXHAUSTIVE_EDGE_CAP):
        g = _multigraph(nv, pairs)
        exhaustive += 1
        r = check_axioms(finite_cycle_matroid(g))
        if not r.ok:
            failures.append((pairs, r.failures()))
    rng = random.Random(20240601)
    for _ in range(250):
        g = random_multigraph(rng, max_vertices=7, max_edges=12)
        r = check_axioms(finite_cycle_matroid(g))
        if not r.ok:
            failures.append((g.edges, r.failures()))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed <= 120
    report(1, ok, f"{exhaustive} exhaustive classes (<=4 vertices, <={EXHAUSTIVE_EDGE_CAP} edges) + 250 random, {len(failures)} failures, {elapsed:.1f}s")
    assert not failures, failures[:3]
    assert elapsed <= 120


# -- 2: closed walks versus cuts on finite graphs -------------------------------------


def test_c2_sparse_walk_equivalence():
    t0 = time.perf_counter()
    graphs = sets = discrepancies = 0
    rng = random.Random(2)
    walk_samples = 0
    for G in nx.graph_atlas_g():
        if G.number_of_nodes() == 0 or not nx.is_connected(G):
            continue
        g = Multigraph.from_edges({i: e for i, e in enumerate(G.edges())}, G.nodes())
        order = g.edge_order()
        idx = {e: i for i, e in enumerate(order)}
        basis = [gf2.mask_of(c, idx) for c in cycle_space_basis(g)]
        # every even-degree edge set is in the cycle space
        masks = np.fromiter(gf2.span(basis), dtype=np.uint64, count=1 << len(basis))
        cut_side = CutTable(g).evaluate(masks)
        vid = {v: i for i, v in enumerate(g.vertex_order())}
        ends = [(idx[e], vid[a], vid[b]) for e, (a, b) in g.edges.items()]
        # Euler: an even edge set is one closed trail iff its edges form one component
        walk_side = touched_connected(masks, ends, len(vid))
        discrepancies += int((walk_side != cut_side).sum())
        graphs += 1
        sets += len(masks)
        # explicit trails on a sample
        for m in rng.sample(list(masks), min(3, len(masks))):
            o = gf2.items_of(int(m), order)
            w = euler_walk(g, o)
            walk_samples += 1
            if (w is not None and check_walk(g, o, w)) != bool(CutTable(g).evaluate(np.array([m], dtype=np.uint64))[0]):
                discrepancies += 1
    elapsed = time.perf_counter() - t0
    ok = discrepancies == 0 and elapsed <= 120
    report(2, ok, f"{graphs} connected graphs (<=7 vertices), {sets} even sets, {walk_samples} explicit walks, {discrepancies} discrepancies, {elapsed:.1f}s")
    assert discrepancies == 0
    assert elapsed <= 120


# -- 3 and 4: gluing finite decompositions ------------------------------------------


def _instances():
    """(graph, decomposition) pairs: small exhaustive graphs with fixed shapes plus random ones."""
    for nv, pairs in connected_multigraphs(4, 5):
        g = _multigraph(nv, pairs)
        yield g, single_part(g)
        if nv >= 3:
            yield g, two_part(g)
    rng = random.Random(49)
    for _ in range(200):
        g = random_multigraph(rng, max_vertices=6, max_edges=10)
        yield g, random_treedec(g, rng, max_nodes=5)


@pytest.fixture(scope="module")
def glue_instances():
    out = []
    for g, td in _instances():
        r = verify_treedec(g, td)
        assert all(r.passed(c) for c in ("tree", "coverage", "edge-unique", "connectivity")), r.to_text()
        out.append((g, td, build_tree_of_presentations(td, g)))
    return out


def test_c3_glued_matroid_equals_finite_cycle_matroid(glue_instances):
    t0 = time.perf_counter()
    bad = []
    multi_node = 0
    for g, td, top in glue_instances:
        multi_node += len(td.nodes) > 1
        if glued_matroid(top) != finite_cycle_matroid(g):
            bad.append(td.to_text())
    elapsed = time.perf_counter() - t0
    n = len(glue_instances)
    ok = not bad and n >= 100 and elapsed <= 300
    report(3, ok, f"{n} (graph, decomposition) pairs, {multi_node} with >=2 parts, {len(bad)} mismatches, {elapsed:.1f}s")
    assert not bad, bad[:2]
    assert n >= 100 and elapsed <= 300


def test_c4_lifting_round_trips(glue_instances):
    cycles = bonds_n = z_total = z_odd = 0
    bad = []
    for g, td, top in glue_instances:
        for o in cycle_edge_sets(g):
            cycles += 1
            for policy in ("lex", "reverse", "nested"):
                try:
                    lifted = cycle_to_prevector(top, o, policy)
                except ValueError as exc:
                    z_odd += 1
                    bad.append(("cycle", o, str(exc)))
                    continue
                z_total += len(lifted.z_sizes)
                z_odd += sum(k % 2 for k in lifted.z_sizes.values())
                if not lifted.ok:
                    bad.append(("cycle", o, policy, lifted.complaint))
        for cut in bonds(g):
            bonds_n += 1
            lifted = bond_to_precovector(top, cut.edges, cut.side)
            if not lifted.ok:
                bad.append(("bond", cut.edges, lifted.complaint))
    ok = not bad and z_odd == 0
    report(4, ok, f"{cycles} cycles x 3 matching policies, {bonds_n} bonds, {z_total} Z sets all even, {len(bad)} failures")
    assert not bad, bad[:3]
    assert z_odd == 0


# -- 5: Figure 1 -----------------------------------------------------------------------


def test_c5_figure1():
    t0 = time.perf_counter()
    with_end = figure1(12, "end")
    without = figure1(12, "none")
    elapsed = time.perf_counter() - t0
    d = with_end.data
    parts = {
        "a": d["even"]["holds"] and d["even"]["kind"] == "periodic" and d["connected"]["holds"] and d["in_C_psi"]["holds"],
        "b": d["end"] is not None and "DOMINATED" in d["end"] and "periodic fan" in d["end"],
        "c": isinstance(d["certificate"], dict),
        "d": d["rejected_without_psi"] and not without.data["in_C_psi"]["holds"],
    }
    ok = with_end.ok and without.ok and all(parts.values()) and elapsed <= 30
    report(5, ok, f"(a)(b)(c)(d) = {[parts[k] for k in 'abcd']}, {elapsed:.1f}s")
    assert all(parts.values()), parts
    assert with_end.ok and without.ok
    assert elapsed <= 30


# -- 6: bounded-diameter spanning trees -------------------------------------------------


def test_c6_spanning_tree_diameter():
    rng = random.Random(6)
    checked = 0
    bad = []
    for _ in range(60):
        g = random_multigraph(rng, max_vertices=14, max_edges=24)
        r = rng.choice(sorted(g.vertices))
        for k in range(6):
            tr = spanning_tree_bounded_diameter(g, r, k)
            checked += 1
            if not (is_tree(tr) and diameter(tr) <= 2 * k + 1 and tr.vertices == ball(g, r, k).vertices):
                bad.append((g.edges, r, k))
    for name in FAMILIES:
        fam = family(name)
        for r in [fam.root, *sorted(fam.layer(1), key=repr)[:2]]:
            for k in range(6):
                width = k + 4
                tr = spanning_tree_bounded_diameter(fam, r, k, width)
                checked += 1
                if not (is_tree(tr) and diameter(tr) <= 2 * k + 1 and tr.vertices == ball(fam, r, k, width).vertices):
                    bad.append((name, r, k))
    report(6, not bad, f"{checked} balls (60 random graphs + {len(FAMILIES)} families, k <= 5), {len(bad)} over 2k+1")
    assert not bad, bad[:3]


# -- 7: domination dichotomy ------------------------------------------------------------


def test_c7_domination_dichotomy():
    problems = []
    summary = []
    for name, want in [
        ("dominated-ladder", True),
        ("ladder", False),
        ("double-ray", False),
        ("grid", False),
        ("binary-tree", False),
    ]:
        fam = family(name)
        verdicts = classify_ends(fam)
        if not verdicts:
            problems.append((name, "no ends"))
        for v in verdicts:
            certs = list(v.certificates.values())
            if any(isinstance(c, Unknown) for c in certs):
                problems.append((name, "unknown"))
            if v.dominated is not want:
                problems.append((name, v.describe()))
            if want:
                fans = [c for c in certs if isinstance(c, Dominates)]
                if not fans or not fans[0].periodic or not verify_fan(fam, fans[0].vertex, v.ray, fans[0].fan):
                    problems.append((name, "fan"))
            elif not all(isinstance(c, Separated) and c.periodic for c in certs):
                problems.append((name, "separator"))
        summary.append(f"{name}: {len(verdicts)} end(s) {'Dominates' if want else 'Separated'}")
    report(7, not problems, "; ".join(summary))
    assert not problems, problems[:3]


# -- 8: orthogonality on the built-in trees -----------------------------------------------


def test_c8_orthogonality():
    t0 = time.perf_counter()
    problems = []
    pairs = 0
    for name in FAMILIES:
        ltd = canonical_treedec(name)
        top = window_presentations(ltd, 4)
        for psi in (end_approximations(ltd.tree, 6, max_chains=None), []):
            v = orthogonality_check(top, psi, lazy=ltd)
            pairs += v.pairs
            if not v.ok:
                problems.append((name, bool(psi), v.violations[:2]))
    elapsed = time.perf_counter() - t0
    ok = not problems and elapsed <= 300
    report(8, ok, f"{len(FAMILIES)} families x 2 psi choices, {pairs} pairs, {len(problems)} violations, {elapsed:.1f}s")
    assert not problems, problems
    assert elapsed <= 300


# -- 9: inverse-system coherence ----------------------------------------------------------


def test_c9_projection_functoriality():
    chains = 0
    bad = []
    top = 7
    for name in FAMILIES:
        fam = family(name)
        h = fam.default_horizon(top)
        for n in range(1, top + 1):
            for m in range(n, top + 1):
                tm = truncate(fam, m, h)
                pn, f_mn = project(tm, fam.exhaustion(n))
                if pn != truncate(fam, n, h):
                    bad.append((name, m, n))
                for k in range(m, top + 1):
                    chains += 1
                    tk = truncate(fam, k, h)
                    _, f_km = project(tk, fam.exhaustion(m))
                    _, f_kn = project(tk, fam.exhaustion(n))
                    if compose_maps(f_mn, f_km) != f_kn:
                        bad.append((name, k, m, n))
    report(9, not bad, f"{chains} chains n <= m <= k <= {top} over {len(FAMILIES)} families, {len(bad)} failures")
    assert not bad, bad[:3]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
