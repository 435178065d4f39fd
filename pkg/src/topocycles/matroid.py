"""Circuit/cocircuit systems and the (C1)(C2)(O1)(O2)(IM) axiom suite.

All checks are exhaustive over a finite ground set.  (O2) and (IM)
enumerate subsets with numpy over int bitsets, which keeps a 20-element
ground set within reach.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .graph import EdgeSet, Multigraph, bonds, cycle_edge_sets, edge_set_key, ordered

AXIOMS = ("C1", "C1*", "C2", "C2*", "O1", "O2", "IM")
MAX_GROUND = 20
EXHAUSTIVE_IM = 8


class GroundTooLargeError(ValueError):
    pass


def _family(sets) -> FrozenSet[EdgeSet]:
    return frozenset(frozenset(s) for s in sets)


@dataclass(frozen=True)
class CircuitSystem:
    ground: FrozenSet
    circuits: FrozenSet[EdgeSet]
    cocircuits: FrozenSet[EdgeSet]

    def __post_init__(self):
        object.__setattr__(self, "ground", frozenset(self.ground))
        object.__setattr__(self, "circuits", _family(self.circuits))
        object.__setattr__(self, "cocircuits", _family(self.cocircuits))
        for s in self.circuits | self.cocircuits:
            if not s <= self.ground:
                raise ValueError(f"member {sorted(map(repr, s))} is not a subset of the ground set")

    def to_json(self) -> dict:
        return {
            "ground": [_jsonable(e) for e in ordered(self.ground)],
            "circuits": [[_jsonable(e) for e in ordered(c)] for c in sorted(self.circuits, key=edge_set_key)],
            "cocircuits": [[_jsonable(e) for e in ordered(d)] for d in sorted(self.cocircuits, key=edge_set_key)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CircuitSystem":
        circuits = [frozenset(_unjson(e) for e in c) for c in data.get("circuits", [])]
        cocircuits = [frozenset(_unjson(e) for e in d) for d in data.get("cocircuits", [])]
        ground = data.get("ground")
        if ground is None:
            ground = frozenset().union(*circuits, *cocircuits)
        return cls(frozenset(_unjson(e) for e in ground), circuits, cocircuits)


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    return x


def _unjson(x):
    if isinstance(x, list):
        return tuple(_unjson(y) for y in x)
    return x


@dataclass
class Verdict:
    passed: bool
    witness: Optional[dict] = None
    note: str = ""


@dataclass
class AxiomReport:
    verdicts: Dict[str, Verdict] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v.passed for v in self.verdicts.values())

    def failures(self) -> List[str]:
        return [a for a in AXIOMS if a in self.verdicts and not self.verdicts[a].passed]

    def to_json(self) -> dict:
        out = {}
        for a in AXIOMS:
            v = self.verdicts[a]
            w = None
            if v.witness is not None:
                w = {k: _witness_json(x) for k, x in v.witness.items()}
            out[a] = {"passed": v.passed, "witness": w, "note": v.note}
        return out

    def to_text(self) -> str:
        lines = []
        for a in AXIOMS:
            v = self.verdicts[a]
            status = "PASS" if v.passed else "FAIL"
            line = f"{a:4s} {status}"
            if v.witness:
                parts = ", ".join(f"{k}={_fmt_set(x)}" for k, x in v.witness.items())
                line += f"  witness: {parts}"
            if v.note:
                line += f"  ({v.note})"
            lines.append(line)
        return "\n".join(lines)


def _witness_json(x):
    if isinstance(x, (frozenset, set)):
        return [_jsonable(e) for e in ordered(x)]
    return _jsonable(x)


def _fmt_set(x) -> str:
    if isinstance(x, (frozenset, set)):
        return "{" + ", ".join(str(e) for e in ordered(x)) + "}"
    return str(x)


# -- basic operations --------------------------------------------------------


def minimal_nonempty(family: Iterable[Iterable]) -> List[EdgeSet]:
    kept: List[EdgeSet] = []
    for s in sorted(_family(family), key=edge_set_key):
        if s and not any(t <= s for t in kept):
            kept.append(s)
    return kept


def dual(s: CircuitSystem) -> CircuitSystem:
    return CircuitSystem(s.ground, s.cocircuits, s.circuits)


def finite_cycle_matroid(g: Multigraph, edge_limit: Optional[int] = 16) -> CircuitSystem:
    """Circuits are the finite cycles, cocircuits the bonds."""
    circuits = cycle_edge_sets(g, edge_limit=edge_limit)
    cocircuits = [b.edges for b in bonds(g, edge_limit=edge_limit, vertex_limit=None)]
    return CircuitSystem(frozenset(g.edges), circuits, cocircuits)


def is_tame_and_binary(s: CircuitSystem) -> bool:
    return all(len(c & d) % 2 == 0 for c in s.circuits for d in s.cocircuits)


# -- axiom checks -------------------------------------------------------------


def _c1(family, starred) -> Verdict:
    if frozenset() in family:
        return Verdict(False, {"member": frozenset()})
    return Verdict(True)


def _c2(family) -> Verdict:
    members = sorted(family, key=edge_set_key)
    for a, b in combinations(members, 2):
        if a < b:
            return Verdict(False, {"smaller": a, "larger": b})
    return Verdict(True)


def _o1(s: CircuitSystem) -> Verdict:
    for c in sorted(s.circuits, key=edge_set_key):
        for d in sorted(s.cocircuits, key=edge_set_key):
            if len(c & d) == 1:
                return Verdict(False, {"circuit": c, "cocircuit": d})
    return Verdict(True)


def o2_violated(s: CircuitSystem, e, p: Iterable) -> bool:
    """Re-check a single (O2) instance ``E = P ⊔ Q ⊔ {e}``."""
    p = frozenset(p)
    q = s.ground - p - {e}
    has_c = any(e in c and c <= p | {e} for c in s.circuits)
    has_d = any(e in d and d <= q | {e} for d in s.cocircuits)
    return not (has_c or has_d)


def _o2(s: CircuitSystem, order: Sequence, index: Dict) -> Verdict:
    n = len(order)
    for i, e in enumerate(order):
        bit = 1 << i
        cs = [_mask(c, index) & ~bit for c in s.circuits if e in c]
        ds = [_mask(d, index) & ~bit for d in s.cocircuits if e in d]
        low = np.arange(1 << (n - 1), dtype=np.int64)
        # insert a zero at position i: P ranges over subsets of E - e
        p = (low & (bit - 1)) | ((low >> i) << (i + 1))
        good = np.zeros(p.shape, dtype=bool)
        for c in cs:
            good |= (p & c) == c
        for d in ds:
            good |= (p & d) == 0
        bad = np.flatnonzero(~good)
        if bad.size:
            pm = int(p[bad[0]])
            pset = frozenset(order[j] for j in range(n) if (pm >> j) & 1)
            return Verdict(False, {"e": e, "P": pset, "Q": s.ground - pset - {e}})
    return Verdict(True)


def _mask(items, index) -> int:
    m = 0
    for x in items:
        m |= 1 << index[x]
    return m


def independence_table(circuits_masks: Sequence[int], n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    indep = np.ones(masks.shape, dtype=bool)
    for c in circuits_masks:
        if c:
            indep &= (masks & c) != c
    return indep


def _greedy_base(indep, i_mask: int, x_mask: int, n: int) -> int:
    b = i_mask
    for j in range(n):
        bit = 1 << j
        if x_mask & bit and not b & bit and indep[b | bit]:
            b |= bit
    return b


def _is_base(indep, b: int, i_mask: int, x_mask: int, n: int) -> bool:
    if not indep[b] or b & ~x_mask or i_mask & ~b:
        return False
    return all(not indep[b | (1 << j)] for j in range(n) if x_mask >> j & 1 and not b >> j & 1)


def _im(s: CircuitSystem, order: Sequence, index: Dict) -> Verdict:
    n = len(order)
    indep = independence_table([_mask(c, index) for c in s.circuits], n)
    full = (1 << n) - 1

    def witness(i_mask, x_mask):
        to_set = lambda m: frozenset(order[j] for j in range(n) if m >> j & 1)
        return Verdict(False, {"I": to_set(i_mask), "X": to_set(x_mask)})

    if n <= EXHAUSTIVE_IM:
        for x in range(1 << n):
            sub = x
            while True:
                if indep[sub]:
                    b = _greedy_base(indep, sub, x, n)
                    if not _is_base(indep, b, sub, x, n):
                        return witness(sub, x)
                if sub == 0:
                    break
                sub = (sub - 1) & x
        return Verdict(True, note=f"exhaustive over all I ⊆ X, |E|={n}")
    for x in range(1 << n):
        b = _greedy_base(indep, 0, x, n)
        if not _is_base(indep, b, 0, x, n):
            return witness(0, x)
    for i_mask in np.flatnonzero(indep):
        i_mask = int(i_mask)
        b = _greedy_base(indep, i_mask, full, n)
        if not _is_base(indep, b, i_mask, full, n):
            return witness(i_mask, full)
    return Verdict(True, note=f"all X with I=∅ and all independent I with X=E, |E|={n}")


def check_axioms(s: CircuitSystem, max_ground: int = MAX_GROUND) -> AxiomReport:
    if len(s.ground) > max_ground:
        raise GroundTooLargeError(f"ground set of size {len(s.ground)} exceeds {max_ground}")
    order = ordered(s.ground)
    index = {e: i for i, e in enumerate(order)}
    r = AxiomReport()
    r.verdicts["C1"] = _c1(s.circuits, False)
    r.verdicts["C1*"] = _c1(s.cocircuits, True)
    r.verdicts["C2"] = _c2(s.circuits)
    r.verdicts["C2*"] = _c2(s.cocircuits)
    r.verdicts["O1"] = _o1(s)
    r.verdicts["O2"] = _o2(s, order, index) if order else Verdict(True)
    r.verdicts["IM"] = _im(s, order, index)
    return r


def recheck_witness(s: CircuitSystem, axiom: str, witness: dict) -> bool:
    """True iff ``witness`` really violates ``axiom`` for ``s``."""
    if axiom == "C1":
        return witness["member"] in s.circuits and not witness["member"]
    if axiom == "C1*":
        return witness["member"] in s.cocircuits and not witness["member"]
    if axiom in ("C2", "C2*"):
        fam = s.circuits if axiom == "C2" else s.cocircuits
        return witness["smaller"] in fam and witness["larger"] in fam and witness["smaller"] < witness["larger"]
    if axiom == "O1":
        c, d = witness["circuit"], witness["cocircuit"]
        return c in s.circuits and d in s.cocircuits and len(c & d) == 1
    if axiom == "O2":
        return o2_violated(s, witness["e"], witness["P"])
    if axiom == "IM":
        i, x = witness["I"], witness["X"]
        indep = lambda y: not any(c <= y for c in s.circuits if c)
        if not (i <= x and indep(i)):
            return False
        # brute force over supersets of I inside X
        rest = ordered(x - i)
        for k in range(len(rest) + 1):
            for extra in combinations(rest, k):
                b = i | frozenset(extra)
                if indep(b) and all(not indep(b | {y}) for y in x - b):
                    return False
        return True
    raise KeyError(axiom)


# -- elimination-failure search ---------------------------------------------


@dataclass
class NoCircuitCertificate:
    """Every candidate subset fails parity at ``vertex`` once ``removed`` edges are excluded."""

    vertex: object
    steps: List[Tuple[object, object]]
    periodic_classes: List[object]
    levels_checked: int
    periodic: bool

    def to_json(self) -> dict:
        return {
            "vertex": _jsonable(self.vertex),
            "steps": [[_jsonable(v), _jsonable(e)] for v, e in self.steps],
            "periodic_classes": [_jsonable(p) for p in self.periodic_classes],
            "levels_checked": self.levels_checked,
            "periodic": self.periodic,
        }


@dataclass
class Unknown:
    bound: int
    reason: str = ""


def find_circuit_within(
    family: Callable[[object], bool],
    allowed,
    through,
    bound: int = 12,
    max_enum: int = 16,
):
    """Search ``allowed`` for a member of ``family`` containing ``through``.

    ``allowed`` is a finite edge set or an :class:`~topocycles.edgesets.EdgeSetExpr`.
    Returns the circuit, a :class:`NoCircuitCertificate`, or :class:`Unknown`.
    """
    from .edgesets import EdgeSetExpr

    if isinstance(allowed, EdgeSetExpr):
        from .psi import parity_peel

        cert = parity_peel(allowed, through, bound)
        if isinstance(cert, NoCircuitCertificate):
            return cert
        reduced = cert
        if through in reduced.finite or reduced.contains(through):
            if family(reduced):
                return reduced
        window = ordered(reduced.materialize(reduced.family.default_horizon(bound)))
        if len(window) <= max_enum:
            found = _enumerate_finite(family, window, through, as_expr=reduced)
            if found is not None:
                return found
        return Unknown(bound, "no candidate accepted and no parity certificate")

    allowed = frozenset(allowed)
    if through not in allowed:
        return Unknown(bound, "through is not in allowed")
    if len(allowed) > max_enum:
        return Unknown(bound, f"{len(allowed)} allowed edges exceeds enumeration limit {max_enum}")
    found = _enumerate_finite(family, ordered(allowed), through)
    if found is None:
        return Unknown(bound, "exhausted all subsets without a member")
    return found


def _enumerate_finite(family, pool, through, as_expr=None):
    rest = [e for e in pool if e != through]
    for k in range(len(rest) + 1):
        for extra in combinations(rest, k):
            cand = frozenset(extra) | {through}
            if as_expr is not None:
                cand = as_expr.finite_only(cand)
            if family(cand):
                return cand
    return None
