"""Command-line front end: ``topocycles <command> [options]``.

Exit status is 0 exactly when every verification a command ran succeeded.
``TOPOCYCLES_BOUND`` sets the default level bound.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import random
import sys
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

from .edgesets import CutExpr, EdgeSetExpr
from .ends import Dominates, classify_ends, end_approximations, truncate
from .families import FAMILIES, family as make_family
from .graph import Multigraph, named_graph, random_multigraph
from .matroid import CircuitSystem, check_axioms, find_circuit_within, finite_cycle_matroid, NoCircuitCertificate
from .psi import geometrically_connected, in_C_psi, in_D_psi, meets_all_fc_cuts_evenly, verify_peel
from .tom import build_tree_of_presentations, glued_matroid, orthogonality_check, periodic_prevectors, window_presentations
from .treedec import TreeDecomposition, canonical_treedec, random_treedec, single_part, two_part, verify_treedec

FORMATS = ("text", "json", "dot")
PSI_CHOICES = ("end", "all", "none", "undominated")


def default_bound() -> int:
    raw = os.environ.get("TOPOCYCLES_BOUND")
    if raw is None:
        return 12
    try:
        value = int(raw)
    except ValueError:
        raise SystemExit(f"TOPOCYCLES_BOUND must be an integer, got {raw!r}")
    return value


@dataclass
class RunConfig:
    command: str = "axioms"
    family: Optional[str] = None
    graph: Optional[str] = None
    system: Optional[str] = None
    decomp: Optional[str] = None
    random: bool = False
    n: int = 4
    bound: int = 12
    max_terms: Optional[int] = None
    max_subtree: Optional[int] = None
    psi: str = "end"
    format: str = "text"
    seed: int = 0
    edges: Optional[str] = None
    cut: Optional[str] = None

    def validate(self) -> None:
        for name in ("n", "bound"):
            if getattr(self, name) < 1:
                raise ValueError(f"--{name} must be positive")
        for name in ("max_terms", "max_subtree"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")
        if self.family is not None and self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if self.format not in FORMATS:
            raise ValueError(f"--format must be one of {', '.join(FORMATS)}")
        if self.psi not in PSI_CHOICES:
            raise ValueError(f"--psi must be one of {', '.join(PSI_CHOICES)}")


@dataclass
class Report:
    ok: bool
    text: str
    data: dict
    dot: Optional[str] = None

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps({"ok": self.ok, **self.data}, indent=2, default=str)
        if fmt == "dot":
            if self.dot is None:
                raise ValueError("this command has no DOT output")
            return self.dot
        return self.text


# -- helpers -----------------------------------------------------------------------------


def _finite_graph(cfg: RunConfig) -> Multigraph:
    if cfg.random:
        return random_multigraph(random.Random(cfg.seed), 6, 10)
    if cfg.graph:
        if os.path.exists(cfg.graph):
            with open(cfg.graph) as fh:
                return Multigraph.from_text(fh.read())
        return named_graph(cfg.graph)
    if cfg.family:
        return truncate(make_family(cfg.family), cfg.n)
    raise ValueError("give --graph, --family or --random")


def _psi(cfg: RunConfig, fam, bound: int):
    if cfg.psi == "none":
        return []
    ends = end_approximations(fam, bound, max_chains=64)
    if cfg.psi == "undominated":
        keep = {v.end.chain for v in classify_ends(fam, bound=bound) if v.dominated is False}
        return [e for e in ends if e.chain in keep]
    return ends


def _check_line(label: str, check) -> str:
    return f"{label:28s} {'PASS' if check else 'FAIL'}  [{check.kind}; {check.note}]"


# -- commands ------------------------------------------------------------------------------


def cmd_axioms(cfg: RunConfig) -> Report:
    if cfg.system:
        with open(cfg.system) as fh:
            system = CircuitSystem.from_json(json.load(fh))
        what = cfg.system
        g = None
    else:
        g = _finite_graph(cfg)
        system = finite_cycle_matroid(g)
        what = cfg.graph or (f"{cfg.family} truncated at n={cfg.n}" if cfg.family else f"random graph (seed {cfg.seed})")
    report = check_axioms(system)
    head = f"axioms for {what}: {len(system.ground)} elements, {len(system.circuits)} circuits, {len(system.cocircuits)} cocircuits"
    dot = g.to_dot() if g is not None else None
    return Report(report.ok, head + "\n" + report.to_text(), {"system": system.to_json(), "axioms": report.to_json()}, dot)


def cmd_ends(cfg: RunConfig) -> Report:
    fam = make_family(cfg.family or "dominated-ladder")
    verdicts = classify_ends(fam, bound=cfg.bound)
    lines = [f"{fam.name}: {len(verdicts)} end{'s' if len(verdicts) != 1 else ''} at bound {cfg.bound}"]
    data = []
    for v in verdicts:
        lines.append("  " + v.describe())
        status = {True: "DOMINATED", False: "UNDOMINATED", None: "UNKNOWN"}[v.dominated]
        cert = next((c for c in v.certificates.values() if isinstance(c, Dominates)), None)
        if cert is not None:
            for path in cert.fan[:4]:
                lines.append(f"    fan path {list(path)}")
        data.append({"end": v.end.name(), "status": status, "certificates": {repr(k): c.describe() if hasattr(c, "describe") else repr(c) for k, c in v.certificates.items()}})
    ok = all(v.dominated is not None for v in verdicts)
    return Report(ok, "\n".join(lines), {"family": fam.name, "ends": data})


GREY_CIRCUIT = "{D0, R0, L0, D1} + period(1, 1, {U1, L1})"
ELIMINATED_SET = "{D0, R0, L0} + period(1, 1, {D1, L1})"


def figure1(bound: int = 12, psi_mode: str = "end") -> Report:
    """The dominated-ladder elimination failure, checked end to end."""
    fam = make_family("dominated-ladder")
    c = EdgeSetExpr.parse(fam, GREY_CIRCUIT)
    allowed = EdgeSetExpr.parse(fam, ELIMINATED_SET)
    ends = end_approximations(fam, bound)
    psi = [] if psi_mode == "none" else ends
    lines = [f"dominated ladder, bound {bound}, psi = {'{the end}' if psi else 'empty'}", f"grey circuit C = {c.to_text()}"]
    even = meets_all_fc_cuts_evenly(c, bound)
    conn = geometrically_connected(c, bound)
    member = in_C_psi(c, psi, bound)
    lines += [_check_line("(a) even on fc cuts", even), _check_line("(a) geometrically connected", conn), _check_line("(a) C in C_psi", member)]

    verdicts = classify_ends(fam, bound=bound)
    dom = [v for v in verdicts if v.dominated]
    fan = next((cc for v in dom for cc in v.certificates.values() if isinstance(cc, Dominates)), None)
    lines.append(f"(b) end classification: {verdicts[0].describe() if verdicts else 'no end'}")
    if fan is not None:
        for path in fan.fan[:3]:
            lines.append(f"      fan path {list(path)}")

    tri = [f"{{D{i}, U{i}, D{i + 1}}}" for i in range(1, 4)]
    lines.append(f"triangles meeting C: {', '.join(tri)}, ... (one per upper-rail edge U_i, i >= 1)")
    lines.append(f"eliminated set (C plus triangles, minus every U_i) = {allowed.to_text()}")

    def is_circuit(x):
        return bool(in_C_psi(x, ends, bound))

    found = find_circuit_within(is_circuit, allowed, ("D", 0), bound)
    cert_ok = isinstance(found, NoCircuitCertificate) and verify_peel(allowed, found, bound)
    lines.append(f"(c) circuit through D0 inside the eliminated set: {'none, certificate re-verified' if cert_ok else repr(found)}")
    if isinstance(found, NoCircuitCertificate):
        lines.append(f"      parity fails at {found.vertex!r}; peeled {len(found.steps)} edges, periodic classes {found.periodic_classes}")

    rejected = in_C_psi(c, [], bound)
    lines.append(f"(d) with psi empty C is {'rejected' if not rejected else 'ACCEPTED'}: {rejected.note}")

    if psi_mode == "none":
        ok = (not member) and bool(dom) and cert_ok
    else:
        ok = bool(even) and even.kind == "periodic" and bool(conn) and bool(member) and fan is not None and cert_ok and not rejected
    data = {
        "circuit": c.to_text(),
        "allowed": allowed.to_text(),
        "even": even.to_json(),
        "connected": conn.to_json(),
        "in_C_psi": member.to_json(),
        "end": verdicts[0].describe() if verdicts else None,
        "certificate": found.to_json() if isinstance(found, NoCircuitCertificate) else repr(found),
        "rejected_without_psi": not rejected,
    }
    lines.append("dominated-ladder counterexample: " + ("REPRODUCED" if ok else "NOT REPRODUCED"))
    return Report(ok, "\n".join(lines), data)


def cmd_figure1(cfg: RunConfig) -> Report:
    return figure1(cfg.bound, cfg.psi)


def _finite_decomposition(cfg: RunConfig, g: Multigraph) -> TreeDecomposition:
    name = cfg.decomp or "random"
    if name == "single":
        return single_part(g)
    if name == "two-part":
        return two_part(g)
    if name == "random":
        return random_treedec(g, random.Random(cfg.seed))
    if os.path.exists(name):
        with open(name) as fh:
            return TreeDecomposition.from_text(fh.read())
    raise ValueError(f"unknown decomposition {name!r}; use single, two-part, random or a file")


def cmd_glue(cfg: RunConfig) -> Report:
    if cfg.family and not cfg.graph and not cfg.random:
        ltd = canonical_treedec(cfg.family)
        top = window_presentations(ltd, cfg.n)
        psi = [] if cfg.psi == "none" else end_approximations(ltd.tree, 6)
        verdict = orthogonality_check(top, psi, cfg.max_terms, cfg.max_subtree, lazy=ltd)
        kind = "vector" if psi else "covector"
        infinite = periodic_prevectors(ltd, kind)
        lines = [
            f"{cfg.family}: window of {len(top.parent)} tree nodes ({ltd.description}), psi = {'tree ends' if psi else 'empty'}",
            "partial enumeration: finite pre-vectors inside the window, periodic ones with support [a, oo) for a <= 2",
            verdict.to_text(),
        ]
        lines += [f"  {p.describe()}" for p in infinite[:6]]
        return Report(verdict.ok, "\n".join(lines), {"orthogonality": dataclasses.asdict(verdict), "periodic": [p.describe() for p in infinite]})
    g = _finite_graph(cfg)
    td = _finite_decomposition(cfg, g)
    check = verify_treedec(g, td)
    top = build_tree_of_presentations(td, g)
    glued = glued_matroid(top)
    oracle = finite_cycle_matroid(g)
    equal = glued == oracle
    lines = [
        f"graph: {len(g.vertices)} vertices, {len(g.edges)} edges; decomposition: {len(td.nodes)} nodes (seed {cfg.seed})",
        td.to_text().rstrip(),
        f"decomposition valid: {'yes' if all(check.passed(n) for n in ('tree', 'coverage', 'edge-unique', 'connectivity')) else 'NO'}",
        f"glued: {len(glued.circuits)} circuits, {len(glued.cocircuits)} cocircuits",
        "glued matroid vs finite-cycle matroid: " + ("EQUAL" if equal else "DIFFERENT"),
    ]
    return Report(equal, "\n".join(lines), {"equal": equal, "glued": glued.to_json(), "oracle": oracle.to_json(), "decomposition": td.to_text()})


def cmd_treedec(cfg: RunConfig) -> Report:
    if cfg.family:
        ltd = canonical_treedec(cfg.family)
        lines = [f"{cfg.family}: {ltd.description}"]
        ok = True
        rows = []
        for n in range(1, cfg.bound + 1):
            r = ltd.verify(n)
            ok &= r.ok
            rows.append({"n": n, **r.to_json()})
            if not r.ok:
                lines.append(f"  window n={n}: FAIL {r.first_violation()}")
        lines.append(f"  windows 1..{cfg.bound}: {'all checks pass' if ok else 'violations found'}")
        eb = min(cfg.bound, 6)
        tree_ends = ltd.tree_end_count(eb)
        undominated = sum(1 for v in classify_ends(ltd.family, bound=eb, max_chains=None) if v.dominated is False)
        lines.append(f"  tree end chains at bound {eb}: {tree_ends}; undominated end chains: {undominated}")
        ok &= tree_ends == undominated
        return Report(ok, "\n".join(lines), {"windows": rows, "tree_ends": tree_ends, "undominated": undominated})
    g = _finite_graph(cfg)
    td = _finite_decomposition(cfg, g)
    r = verify_treedec(g, td)
    return Report(r.ok, td.to_text() + r.to_text(), r.to_json())


def cmd_psi_check(cfg: RunConfig) -> Report:
    fam = make_family(cfg.family or "dominated-ladder")
    psi = _psi(cfg, fam, cfg.bound)
    if cfg.cut:
        d = CutExpr.parse(fam, cfg.cut)
        res = in_D_psi(d, psi, cfg.bound)
        text = f"cut {d.to_text()} with crossing edges {d.edges().to_text()}\n" + _check_line("in D_psi", res)
        return Report(bool(res), text, {"cut": d.to_text(), "in_D_psi": res.to_json()})
    o = EdgeSetExpr.parse(fam, cfg.edges or GREY_CIRCUIT)
    even = meets_all_fc_cuts_evenly(o, cfg.bound)
    conn = geometrically_connected(o, cfg.bound)
    member = in_C_psi(o, psi, cfg.bound)
    text = "\n".join([f"edge set {o.to_text()} on {fam.name}, psi = {cfg.psi}", _check_line("even on fc cuts", even), _check_line("geometrically connected", conn), _check_line("in C_psi", member)])
    return Report(bool(member), text, {"set": o.to_text(), "even": even.to_json(), "connected": conn.to_json(), "in_C_psi": member.to_json()})


def cmd_export(cfg: RunConfig) -> Report:
    g = _finite_graph(cfg)
    data = {"vertices": [repr(v) for v in g.vertex_order()], "edges": {repr(e): [repr(x) for x in g.ends(e)] for e in g.edge_order()}}
    return Report(True, g.to_text().rstrip(), data, g.to_dot())


COMMANDS: Dict[str, Callable[[RunConfig], Report]] = {
    "axioms": cmd_axioms,
    "ends": cmd_ends,
    "figure1": cmd_figure1,
    "glue": cmd_glue,
    "treedec": cmd_treedec,
    "psi-check": cmd_psi_check,
    "export": cmd_export,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="topocycles", description="Finite-scale checks for topological cycle matroids of infinite graphs.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON file with RunConfig fields; command-line flags override it")
    p.add_argument("--family", help=f"built-in family: {', '.join(FAMILIES)}")
    p.add_argument("--graph", help="named graph (k4, c4, p3, theta, loop, k23) or a graph text file")
    p.add_argument("--system", help="circuit system JSON file (axioms)")
    p.add_argument("--decomp", help="single, two-part, random, or a decomposition text file")
    p.add_argument("--random", action="store_true", default=None, help="use a random multigraph")
    p.add_argument("--n", type=int, help="truncation level / window size")
    p.add_argument("--bound", type=int, help="level bound (default $TOPOCYCLES_BOUND or 12)")
    p.add_argument("--max-terms", type=int, dest="max_terms")
    p.add_argument("--max-subtree", type=int, dest="max_subtree")
    p.add_argument("--psi", choices=PSI_CHOICES, help="ends allowed in circuits")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--seed", type=int)
    p.add_argument("--edges", help="edge-set expression for psi-check")
    p.add_argument("--cut", help="cut expression for psi-check")
    return p


def make_config(argv: Optional[List[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = {"bound": default_bound()}
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        known = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = set(loaded) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(loaded)
    for k, v in vars(args).items():
        if k != "config" and v is not None:
            values[k] = v
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def main(argv: Optional[List[str]] = None) -> int:
    try:
        cfg = make_config(argv)
        start = time.perf_counter()
        report = COMMANDS[cfg.command](cfg)
        out = report.render(cfg.format)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    if cfg.format == "text":
        print(f"[{cfg.command}: {'ok' if report.ok else 'FAILED'} in {time.perf_counter() - start:.2f}s, seed {cfg.seed}]")
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
