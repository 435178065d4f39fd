"""Countable graphs given by an adjacency oracle, with the built-in families.

Every family comes with a *column* function on its vertices.  The canonical
exhaustion is ``W_n = hubs ∪ {v : column(v) < n}``; hubs are the
infinite-degree vertices (the dominating vertex of the dominated ladder,
the centre of the star, the apex of the apex grid), which sit in every
``W_n``.  Edges join vertices whose columns differ by at most one, so the
window of columns ``< H`` contains every edge at a vertex of column ``< H-1``.

Only hub adjacency needs a cutoff: ``incident(hub, width)`` lists the edges
to vertices of column ``< width``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Hashable, List, Optional, Tuple

from .graph import Multigraph, ordered

Vertex = Hashable
EdgeId = Hashable


class InfiniteDegreeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LazyGraph:
    name: str
    root: Vertex
    hubs: FrozenSet[Vertex]
    column: Callable[[Vertex], int]
    layer: Callable[[int], List[Vertex]]
    _incident: Callable[[Vertex, Optional[int]], List[Tuple[EdgeId, Vertex]]]
    endpoints: Callable[[EdgeId], Tuple[Vertex, Vertex]]
    # translation by k columns; column(shift(x, k)) == column(x) + k from ``shift_start`` on
    shift: Optional[Callable[[Hashable, int], Hashable]] = None
    shift_start: int = 0
    # graph embedding fixing the hubs, used to turn one fan path into an infinite fan
    fan_shift: Optional[Callable[[Vertex, int], Vertex]] = None
    fan_coord: Optional[Callable[[Vertex], int]] = None
    outward: Optional[Callable[[Vertex], Vertex]] = None
    # truncations beyond ``shift_start`` are translates of each other
    periodic_truncations: bool = False
    params: Dict = field(default_factory=dict)

    def __repr__(self):
        return f"LazyGraph({self.name!r})"

    # -- adjacency ------------------------------------------------------------

    def incident(self, v: Vertex, width: Optional[int] = None) -> List[Tuple[EdgeId, Vertex]]:
        if v in self.hubs and width is None:
            raise InfiniteDegreeError(f"{v!r} has infinite degree; pass a width cutoff")
        return self._incident(v, width)

    def neighbors(self, v: Vertex, width: Optional[int] = None) -> List[Vertex]:
        return [w for _, w in self.incident(v, width)]

    def is_hub(self, v: Vertex) -> bool:
        return v in self.hubs

    def col(self, v: Vertex) -> int:
        return -1 if v in self.hubs else self.column(v)

    def edge_column(self, e: EdgeId) -> int:
        """Smallest column of a non-hub end; ``G+[W_n]`` keeps exactly the edges of column ``< n``."""
        return min(self.col(x) for x in self.endpoints(e) if x not in self.hubs)

    def default_horizon(self, n: int) -> int:
        return n + self.params.get("horizon_pad", 2)

    # -- windows and exhaustion ----------------------------------------------------

    def exhaustion(self, n: int) -> FrozenSet[Vertex]:
        out = set(self.hubs)
        for c in range(n):
            out.update(self.layer(c))
        return frozenset(out)

    def window(self, horizon: int) -> Multigraph:
        """``G[W_horizon]`` with hub edges cut off at the horizon."""
        vs = self.exhaustion(horizon)
        edges = {}
        for v in vs:
            for e, w in self.incident(v, horizon):
                if w in vs:
                    edges[e] = self.endpoints(e)
        return Multigraph(vs, edges)

    def escapes(self, v: Vertex, horizon: int) -> bool:
        """Whether ``v`` has a non-hub neighbour at column ``>= horizon``."""
        if v in self.hubs:
            return False
        return any(w not in self.hubs and self.column(w) >= horizon for _, w in self.incident(v))


# -- compact item syntax: tag letters followed by comma-separated ints -------------

_ITEM = re.compile(r"^([A-Za-z_]*)(-?\d+(?:,-?\d+)*)?$")


def format_item(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, tuple) and x and isinstance(x[0], str) and all(isinstance(i, int) for i in x[1:]):
        return x[0] + ",".join(str(i) for i in x[1:])
    raise ValueError(f"no compact form for {x!r}")


def parse_item(tok: str):
    m = _ITEM.match(tok.strip())
    if not m:
        raise ValueError(f"cannot parse item {tok!r}")
    tag, nums = m.groups()
    if not tag:
        return int(nums)
    if nums is None:
        return tag if tag not in _TUPLE_TAGS else (tag,)
    return (tag,) + tuple(int(i) for i in nums.split(","))


# single-letter tags that are tuples even without numbers (binary tree root)
_TUPLE_TAGS = {"b"}


def _tshift(x, k):
    if isinstance(x, tuple) and len(x) == 2 and isinstance(x[1], int):
        return (x[0], x[1] + k)
    return x


# -- ladder variants --------------------------------------------------------------------


def ladder(dominated: bool = False, subdivided: bool = False) -> LazyGraph:
    """One-ended ladder: rails ``u_i``, ``l_i`` and rungs ``u_i l_i``.

    ``dominated`` adds the hub ``d`` adjacent to every upper vertex.
    ``subdivided`` puts a vertex ``m_i`` on every rung.
    """
    hubs = frozenset(["d"]) if dominated else frozenset()

    def column(v):
        return v[1]

    def layer(c):
        out = [("u", c), ("l", c)]
        if subdivided:
            out.append(("m", c))
        return out

    def endpoints(e):
        tag, i = e
        if tag == "U":
            return (("u", i), ("u", i + 1))
        if tag == "L":
            return (("l", i), ("l", i + 1))
        if tag == "R":
            return (("u", i), ("l", i))
        if tag == "Ra":
            return (("u", i), ("m", i))
        if tag == "Rb":
            return (("m", i), ("l", i))
        if tag == "D" and dominated:
            return ("d", ("u", i))
        raise KeyError(e)

    def incident(v, width):
        if v == "d":
            return [(("D", j), ("u", j)) for j in range(width)]
        side, i = v
        out = []
        if side in ("u", "l"):
            rail = side.upper()
            out.append(((rail, i), (side, i + 1)))
            if i > 0:
                out.append(((rail, i - 1), (side, i - 1)))
            if subdivided:
                out.append((("Ra", i), ("m", i)) if side == "u" else (("Rb", i), ("m", i)))
            else:
                out.append((("R", i), ("l", i) if side == "u" else ("u", i)))
            if side == "u" and dominated:
                out.append((("D", i), "d"))
        elif side == "m" and subdivided:
            out = [(("Ra", i), ("u", i)), (("Rb", i), ("l", i))]
        else:
            raise KeyError(v)
        return out

    def outward(v):
        return (v[0], v[1] + 1)

    name = "ladder"
    if subdivided:
        name = "subdivided-" + name
    if dominated:
        name = "dominated-" + name if not subdivided else "subdivided-dominated-ladder"
    return LazyGraph(
        name=name,
        root="d" if dominated else ("l", 0),
        hubs=hubs,
        column=column,
        layer=layer,
        _incident=incident,
        endpoints=endpoints,
        shift=_tshift,
        fan_shift=_tshift,
        fan_coord=column,
        outward=outward,
        periodic_truncations=True,
    )


def ray() -> LazyGraph:
    """One-way ray on ``0, 1, 2, ...``; edge ``("e", i)`` joins ``i`` and ``i+1``."""

    def incident(v, width):
        out = [(("e", v), v + 1)]
        if v > 0:
            out.append((("e", v - 1), v - 1))
        return out

    return LazyGraph(
        name="ray",
        root=0,
        hubs=frozenset(),
        column=lambda v: v,
        layer=lambda c: [c],
        _incident=incident,
        endpoints=lambda e: (e[1], e[1] + 1),
        shift=lambda x, k: x + k if isinstance(x, int) else (x[0], x[1] + k),
        fan_shift=lambda v, k: v + k,
        fan_coord=lambda v: v,
        outward=lambda v: v + 1,
        periodic_truncations=True,
    )


def double_ray() -> LazyGraph:
    """Vertices are the integers; edge ``("e", i)`` joins ``i`` and ``i+1``."""

    def column(v):
        return abs(v)

    def layer(c):
        return [0] if c == 0 else [-c, c]

    def endpoints(e):
        return (e[1], e[1] + 1)

    def incident(v, width):
        return [(("e", v), v + 1), (("e", v - 1), v - 1)]

    def shift(x, k):
        # outward translation: moves both tails away from 0
        if isinstance(x, int):
            return x + k if x > 0 else x - k if x < 0 else x
        tag, i = x
        return (tag, i + k) if i >= 0 else (tag, i - k)

    def outward(v):
        return v + 1 if v >= 0 else v - 1

    return LazyGraph(
        name="double-ray",
        root=0,
        hubs=frozenset(),
        column=column,
        layer=layer,
        _incident=incident,
        endpoints=endpoints,
        shift=shift,
        shift_start=1,
        outward=outward,
        periodic_truncations=True,
    )


def grid(apex: bool = False) -> LazyGraph:
    """Quarter-plane grid on ``("g", x, y)`` with ``x, y >= 0``; column is ``max(x, y)``.

    ``apex`` adds the hub ``a`` adjacent to the bottom row ``y = 0``.
    """
    hubs = frozenset(["a"]) if apex else frozenset()

    def column(v):
        return max(v[1], v[2])

    def layer(c):
        return [("g", c, y) for y in range(c + 1)] + [("g", x, c) for x in range(c)]

    def endpoints(e):
        tag, x, *rest = e
        if tag == "h":
            y = rest[0]
            return (("g", x, y), ("g", x + 1, y))
        if tag == "v":
            y = rest[0]
            return (("g", x, y), ("g", x, y + 1))
        if tag == "A" and apex:
            return ("a", ("g", x, 0))
        raise KeyError(e)

    def incident(v, width):
        if v == "a":
            return [(("A", x), ("g", x, 0)) for x in range(width)]
        _, x, y = v
        out = [(("h", x, y), ("g", x + 1, y)), (("v", x, y), ("g", x, y + 1))]
        if x > 0:
            out.append((("h", x - 1, y), ("g", x - 1, y)))
        if y > 0:
            out.append((("v", x, y - 1), ("g", x, y - 1)))
        if apex and y == 0:
            out.append((("A", x), "a"))
        return out

    def fan_shift(v, k):
        if isinstance(v, tuple) and v[0] == "g":
            return ("g", v[1] + k, v[2])
        return v

    def outward(v):
        return ("g", v[1] + 1, v[2])

    return LazyGraph(
        name="apex-grid" if apex else "grid",
        root=("g", 0, 0),
        hubs=hubs,
        column=column,
        layer=layer,
        _incident=incident,
        endpoints=endpoints,
        fan_shift=fan_shift,
        fan_coord=lambda v: v[1],
        outward=outward,
    )


def binary_tree() -> LazyGraph:
    """Rooted binary tree; vertex ``("b", *bits)``, edge ``("T", *bits)`` enters that vertex."""

    def column(v):
        return len(v) - 1

    def layer(c):
        out = [("b",)]
        for _ in range(c):
            out = [x + (bit,) for x in out for bit in (0, 1)]
        return out

    def endpoints(e):
        child = ("b",) + e[1:]
        return (child[:-1], child)

    def incident(v, width):
        out = [(("T",) + v[1:] + (bit,), v + (bit,)) for bit in (0, 1)]
        if len(v) > 1:
            out.append((("T",) + v[1:], v[:-1]))
        return out

    return LazyGraph(
        name="binary-tree",
        root=("b",),
        hubs=frozenset(),
        column=column,
        layer=layer,
        _incident=incident,
        endpoints=endpoints,
        outward=lambda v: v + (0,),
        params={"horizon_pad": 1},
    )


def star() -> LazyGraph:
    """Infinite star: hub ``c`` joined to leaves ``("x", i)`` by edges ``("s", i)``."""

    def incident(v, width):
        if v == "c":
            return [(("s", i), ("x", i)) for i in range(width)]
        return [(("s", v[1]), "c")]

    return LazyGraph(
        name="star",
        root="c",
        hubs=frozenset(["c"]),
        column=lambda v: v[1],
        layer=lambda c: [("x", c)],
        _incident=incident,
        endpoints=lambda e: ("c", ("x", e[1])),
        shift=_tshift,
        fan_shift=_tshift,
        fan_coord=lambda v: v[1],
        periodic_truncations=True,
    )


def comb() -> LazyGraph:
    """Spine ``("s", i)`` with a tooth ``("t", i)`` hanging from each spine vertex."""

    def endpoints(e):
        tag, i = e
        if tag == "S":
            return (("s", i), ("s", i + 1))
        return (("s", i), ("t", i))

    def incident(v, width):
        side, i = v
        if side == "t":
            return [(("T", i), ("s", i))]
        out = [(("S", i), ("s", i + 1)), (("T", i), ("t", i))]
        if i > 0:
            out.append((("S", i - 1), ("s", i - 1)))
        return out

    return LazyGraph(
        name="comb",
        root=("s", 0),
        hubs=frozenset(),
        column=lambda v: v[1],
        layer=lambda c: [("s", c), ("t", c)],
        _incident=incident,
        endpoints=endpoints,
        shift=_tshift,
        fan_shift=_tshift,
        fan_coord=lambda v: v[1],
        outward=lambda v: ("s", v[1] + 1),
        periodic_truncations=True,
    )


def with_finite_part(base: LazyGraph, g: Multigraph, attach: Optional[Dict] = None) -> LazyGraph:
    """Add a finite multigraph ``g`` in column 0; ``attach`` maps its vertices to base vertices it is glued to.

    Unglued vertices become ``("x", i)`` and edges ``("xe", j)``, numbered in
    the graph's vertex and edge order, so expressions over them keep the
    compact text syntax.
    """
    attach = attach or {}
    vname = {v: attach.get(v, ("x", i)) for i, v in enumerate(g.vertex_order())}
    ename = {e: ("xe", j) for j, e in enumerate(g.edge_order())}
    new_vertices = {vname[v] for v in g.vertices if v not in attach}
    extra: Dict[Vertex, List[Tuple[EdgeId, Vertex]]] = {}
    ends = {}
    for e, (a, b) in g.edges.items():
        eid = ename[e]
        ends[eid] = (vname[a], vname[b])
        extra.setdefault(vname[a], []).append((eid, vname[b]))
        if a != b:
            extra.setdefault(vname[b], []).append((eid, vname[a]))

    def column(v):
        return 0 if v in new_vertices else base.column(v)

    def layer(c):
        out = list(base.layer(c))
        if c == 0:
            out += ordered(new_vertices)
        return out

    def incident(v, width):
        out = [] if v in new_vertices else list(base._incident(v, width))
        return out + extra.get(v, [])

    def endpoints(e):
        return ends[e] if e in ends else base.endpoints(e)

    return LazyGraph(
        name=base.name + "+finite",
        root=base.root,
        hubs=base.hubs,
        column=column,
        layer=layer,
        _incident=incident,
        endpoints=endpoints,
        shift=base.shift,
        shift_start=max(base.shift_start, 1),
        fan_shift=base.fan_shift,
        fan_coord=base.fan_coord,
        outward=base.outward,
        periodic_truncations=base.periodic_truncations,
    )


FAMILIES: Dict[str, Callable[[], LazyGraph]] = {
    "ladder": lambda: ladder(),
    "dominated-ladder": lambda: ladder(dominated=True),
    "subdivided-dominated-ladder": lambda: ladder(dominated=True, subdivided=True),
    "ray": ray,
    "double-ray": double_ray,
    "grid": lambda: grid(),
    "apex-grid": lambda: grid(apex=True),
    "binary-tree": binary_tree,
    "star": star,
    "comb": comb,
}


def family(name: str) -> LazyGraph:
    try:
        return FAMILIES[name]()
    except KeyError:
        raise KeyError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}") from None
