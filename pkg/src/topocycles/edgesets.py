"""Finite and eventually periodic edge sets (and cuts) over a graph family.

An :class:`EdgeSetExpr` is ``finite ∪ {shift(e, j*period) : e in pattern, j >= 0}``
where every pattern edge has its column in ``[start, start + period)``.
Membership of a single edge is decided exactly by shifting it back into the
pattern window, so restricting an expression to any truncation is exact.

Text syntax::

    {R0, L0} + period(1, 1, {U1, L1})
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import FrozenSet, Hashable, Iterable, Iterator, Optional

from .families import LazyGraph, format_item, parse_item
from .graph import Multigraph, ordered

EdgeId = Hashable


@dataclass(frozen=True, eq=False)
class EdgeSetExpr:
    family: LazyGraph
    finite: FrozenSet[EdgeId] = frozenset()
    start: int = 0
    period: int = 0
    pattern: FrozenSet[EdgeId] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "finite", frozenset(self.finite))
        object.__setattr__(self, "pattern", frozenset(self.pattern))
        if self.period < 0:
            raise ValueError("period must be non-negative")
        if self.pattern:
            if not self.period:
                raise ValueError("a pattern needs a positive period")
            if self.family.shift is None:
                raise ValueError(f"{self.family.name} has no shift; periodic sets are unavailable")
            if self.start < self.family.shift_start:
                raise ValueError(f"periodic part must start at column >= {self.family.shift_start}")
            for e in self.pattern:
                c = self.family.edge_column(e)
                if not self.start <= c < self.start + self.period:
                    raise ValueError(f"pattern edge {e!r} has column {c} outside [{self.start}, {self.start + self.period})")
        else:
            object.__setattr__(self, "period", 0)
        if self.period:
            # union semantics: drop finite edges already produced by the pattern
            object.__setattr__(self, "finite", frozenset(e for e in self.finite if not self._in_periodic(e)))

    __hash__ = None

    # -- membership ---------------------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return not self.period

    def _in_periodic(self, e) -> bool:
        if not self.period:
            return False
        try:
            c = self.family.edge_column(e)
        except (KeyError, TypeError, ValueError):
            return False
        if c < self.start:
            return False
        j = (c - self.start) // self.period
        return self.family.shift(e, -j * self.period) in self.pattern

    def contains(self, e) -> bool:
        return e in self.finite or self._in_periodic(e)

    __contains__ = contains

    def translates(self, horizon: int) -> Iterator[EdgeId]:
        """Periodic edges with column ``< horizon``."""
        if not self.period:
            return
        j = 0
        while self.start + j * self.period < horizon:
            for e in ordered(self.pattern):
                f = self.family.shift(e, j * self.period)
                if self.family.edge_column(f) < horizon:
                    yield f
            j += 1

    def materialize(self, horizon: int) -> FrozenSet[EdgeId]:
        return self.finite | frozenset(self.translates(horizon))

    def restrict(self, g: Multigraph) -> FrozenSet[EdgeId]:
        return frozenset(e for e in g.edges if self.contains(e))

    def max_finite_column(self) -> int:
        return max((self.family.edge_column(e) for e in self.finite), default=-1)

    def stable_level(self) -> int:
        """First column from which the set is purely periodic."""
        lvl = self.max_finite_column() + 1
        if self.period:
            lvl = max(lvl, self.start)
        return lvl

    def finite_only(self, edges: Iterable[EdgeId]) -> "EdgeSetExpr":
        return EdgeSetExpr(self.family, frozenset(edges))

    # -- algebra ------------------------------------------------------------------

    def rebase(self, start: int, period: int) -> "EdgeSetExpr":
        """Same set, with the periodic window moved to ``[start, start+period)``."""
        if not self.period:
            return self
        if start < self.start or period % self.period:
            raise ValueError("can only rebase to a later start and a multiple of the period")
        fin = set(self.finite)
        pat = set()
        for e in self.translates(start + period):
            (pat if self.family.edge_column(e) >= start else fin).add(e)
        return EdgeSetExpr(self.family, frozenset(fin), start, period, frozenset(pat))

    def _aligned(self, other: "EdgeSetExpr"):
        if other.family is not self.family:
            raise ValueError("edge sets live on different families")
        if not self.period and not other.period:
            return self, other, 0, 0
        starts = [x.start for x in (self, other) if x.period]
        periods = [x.period for x in (self, other) if x.period]
        start = max(starts + [self.max_finite_column() + 1, other.max_finite_column() + 1])
        period = math.lcm(*periods)
        a = self.rebase(start, period) if self.period else self
        b = other.rebase(start, period) if other.period else other
        return a, b, start, period

    def _combine(self, other, op) -> "EdgeSetExpr":
        a, b, start, period = self._aligned(other)
        fin = op(a.finite, b.finite)
        if not period:
            return EdgeSetExpr(self.family, fin)
        pat = op(a.pattern, b.pattern)
        return EdgeSetExpr(self.family, fin, start, period, pat).compact()

    def compact(self) -> "EdgeSetExpr":
        """Move the periodic window as far left as the finite part allows."""
        out = self
        while out.period and out.start - out.period >= out.family.shift_start:
            lo = out.start - out.period
            back = frozenset(out.family.shift(e, -out.period) for e in out.pattern)
            if not back <= out.finite:
                break
            out = EdgeSetExpr(out.family, out.finite - back, lo, out.period, back)
        return out

    def __xor__(self, other):
        return self._combine(other, lambda x, y: x ^ y)

    def __or__(self, other):
        return self._combine(other, lambda x, y: x | y)

    def __and__(self, other):
        return self._combine(other, lambda x, y: x & y)

    def __sub__(self, other):
        return self._combine(other, lambda x, y: x - y)

    def __eq__(self, other):
        if not isinstance(other, EdgeSetExpr):
            return NotImplemented
        a, b, _, _ = self._aligned(other)
        return a.finite == b.finite and a.pattern == b.pattern

    def intersection_size(self, other: "EdgeSetExpr") -> float:
        """``|self ∩ other|``, or ``math.inf``."""
        both = self & other
        if both.pattern:
            return math.inf
        return len(both.finite)

    def __len__(self):
        if self.pattern:
            raise OverflowError("infinite edge set")
        return len(self.finite)

    # -- text ---------------------------------------------------------------------

    def to_text(self) -> str:
        parts = ["{" + ", ".join(format_item(e) for e in ordered(self.finite)) + "}"]
        if self.pattern:
            pat = ", ".join(format_item(e) for e in ordered(self.pattern))
            parts.append(f"period({self.start}, {self.period}, {{{pat}}})")
        return " + ".join(parts)

    def __repr__(self):
        return f"EdgeSetExpr({self.family.name}: {self.to_text()})"

    @classmethod
    def parse(cls, family: LazyGraph, text: str) -> "EdgeSetExpr":
        fin, start, period, pat = _parse_sets(text)
        return cls(family, fin, start, period, pat)


_PERIOD = re.compile(r"period\(\s*(-?\d+)\s*,\s*(\d+)\s*,\s*\{([^}]*)\}\s*\)")
_BRACES = re.compile(r"\{([^}]*)\}")


def _split_items(body: str):
    # items may contain commas ("h2,5"), so split on ", " or whitespace
    return [t for t in re.split(r"\s*[;\s]\s*|,\s+", body.strip()) if t]


def _parse_sets(text: str):
    start = period = 0
    pat = frozenset()
    m = _PERIOD.search(text)
    if m:
        start, period = int(m.group(1)), int(m.group(2))
        pat = frozenset(parse_item(t) for t in _split_items(m.group(3)))
        text = text[: m.start()] + text[m.end():]
    fin = set()
    for body in _BRACES.findall(text):
        fin.update(parse_item(t) for t in _split_items(body))
    rest = _BRACES.sub("", text).replace("+", "").strip()
    if rest:
        raise ValueError(f"cannot parse {rest!r}")
    return frozenset(fin), start, period, pat


@dataclass(frozen=True, eq=False)
class CutExpr:
    """Cut of a family given by the vertex side ``A``.

    ``A = side ∪ {shift(v, j*period) : v in side_pattern, j >= 0}`` where pattern
    vertices have column in ``[start, start+period)``.  Hubs in ``A`` must be
    listed in ``side``.  ``covering``, when given, is claimed to cover every
    crossing edge.
    """

    family: LazyGraph
    side: FrozenSet = frozenset()
    start: int = 0
    period: int = 0
    side_pattern: FrozenSet = frozenset()
    covering: Optional[FrozenSet] = None

    def __post_init__(self):
        object.__setattr__(self, "side", frozenset(self.side))
        object.__setattr__(self, "side_pattern", frozenset(self.side_pattern))
        if self.covering is not None:
            object.__setattr__(self, "covering", frozenset(self.covering))
        if self.side_pattern:
            if not self.period or self.family.shift is None:
                raise ValueError("a side pattern needs a period and a family shift")
            for v in self.side_pattern:
                if v in self.family.hubs or not self.start <= self.family.column(v) < self.start + self.period:
                    raise ValueError(f"pattern vertex {v!r} outside its window")

    __hash__ = None

    def in_side(self, v) -> bool:
        if v in self.side:
            return True
        if not self.side_pattern or v in self.family.hubs:
            return False
        c = self.family.column(v)
        if c < self.start:
            return False
        j = (c - self.start) // self.period
        return self.family.shift(v, -j * self.period) in self.side_pattern

    def crossing(self, g: Multigraph) -> FrozenSet:
        """Crossing edges among the real edges of ``g`` (a window of the family)."""
        return frozenset(e for e, (a, b) in g.edges.items() if self.in_side(a) != self.in_side(b))

    def edges(self) -> EdgeSetExpr:
        fam = self.family
        maxcol = max((fam.col(v) for v in self.side), default=-1)
        has_infinite_part = bool(self.side_pattern) or bool(self.side & fam.hubs)
        if not has_infinite_part:
            w = fam.window(maxcol + 3)
            return EdgeSetExpr(fam, self.crossing(w))
        if fam.shift is None:
            raise ValueError(f"{fam.name} has no shift; cannot describe this infinite cut")
        period = self.period or 1
        base = max(self.start if self.side_pattern else 0, maxcol + 1, fam.shift_start)
        # edges of column >= base have both ends in the periodic region
        s = base
        if self.side_pattern:
            s += (-(s - self.start)) % period
        w = fam.window(s + period + 2)
        cross = self.crossing(w)
        fin = frozenset(e for e in cross if fam.edge_column(e) < s)
        pat = frozenset(e for e in cross if s <= fam.edge_column(e) < s + period)
        return EdgeSetExpr(fam, fin, s, period, pat)

    def is_covered(self) -> bool:
        """Whether ``covering`` is finite and meets every crossing edge."""
        if self.covering is None:
            return False
        d = self.edges()
        cov = self.covering
        for e in d.finite | d.pattern:
            if not set(self.family.endpoints(e)) & cov:
                return False
        for e in d.pattern:
            # a translate escapes the cover unless the covering endpoint is a fixed hub
            if not set(self.family.endpoints(e)) & cov & self.family.hubs:
                return False
        return True

    def to_text(self) -> str:
        out = "side {" + ", ".join(format_item(v) for v in ordered(self.side)) + "}"
        if self.side_pattern:
            pat = ", ".join(format_item(v) for v in ordered(self.side_pattern))
            out += f" + period({self.start}, {self.period}, {{{pat}}})"
        if self.covering is not None:
            out += " cover {" + ", ".join(format_item(v) for v in ordered(self.covering)) + "}"
        return out

    def __repr__(self):
        return f"CutExpr({self.family.name}: {self.to_text()})"

    @classmethod
    def parse(cls, family: LazyGraph, text: str) -> "CutExpr":
        text = text.strip()
        covering = None
        if " cover " in f" {text} ":
            text, cov = re.split(r"\bcover\b", text, maxsplit=1)
            covering = frozenset(parse_item(t) for t in _split_items(cov.strip().strip("{}")))
        text = re.sub(r"^\s*side\b", "", text)
        fin, start, period, pat = _parse_sets(text)
        return cls(family, fin, start, period, pat, covering)
