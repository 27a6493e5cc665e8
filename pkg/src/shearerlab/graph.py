"""Finite simple graphs, vertex subsets as bitmasks, and graph families.

Vertex subsets are plain Python ints used as bitmasks (bit ``v`` set iff
``v`` is in the subset). Python ints are unbounded, so the same
representation serves 10-vertex windows and 128-vertex families alike.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CapExceeded, GraphError

# subset-exponential operations refuse graphs above this size
ENUM_CAP = 24
# non-exponential operations (families, bitmask bookkeeping)
MAX_VERTICES = 128


def mask_of(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def members(mask: int) -> list[int]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


@dataclass(frozen=True)
class Graph:
    """Finite simple undirected graph on vertices ``0..n-1``.

    ``adjacency[v]`` is the sorted tuple of neighbours of ``v``;
    ``nbr[v]`` the same set as a bitmask.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    nbr: tuple[int, ...] = field(repr=False, compare=False)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def closed(self, v: int) -> int:
        """Bitmask of the closed neighbourhood N(v) plus v."""
        return self.nbr[v] | (1 << v)

    def degree(self, v: int, within: int | None = None) -> int:
        if within is None:
            return len(self.adjacency[v])
        return popcount(self.nbr[v] & within)

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def is_independent(self, mask: int) -> bool:
        rest = mask
        while rest:
            v = lowest(rest)
            if self.nbr[v] & mask:
                return False
            rest &= rest - 1
        return True

    def closed_mask(self, mask: int) -> int:
        """Union of closed neighbourhoods of the vertices in ``mask``."""
        out = mask
        for v in members(mask):
            out |= self.nbr[v]
        return out

    def components(self, within: int | None = None) -> list[int]:
        """Connected components of the induced subgraph, as bitmasks."""
        rest = self.full if within is None else within
        comps = []
        while rest:
            seed = rest & -rest
            comp = seed
            frontier = seed
            while frontier:
                v = lowest(frontier)
                frontier &= frontier - 1
                new = self.nbr[v] & rest & ~comp
                comp |= new
                frontier |= new
            comps.append(comp)
            rest &= ~comp
        return comps

    def ball(self, v: int, radius: int) -> int:
        """Bitmask of vertices at graph distance at most ``radius`` from ``v``."""
        seen = 1 << v
        frontier = [v]
        for _ in range(radius):
            nxt = []
            for u in frontier:
                for w in self.adjacency[u]:
                    if not seen >> w & 1:
                        seen |= 1 << w
                        nxt.append(w)
            frontier = nxt
        return seen

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges()]}


def build_graph(n: int, edges) -> Graph:
    if n < 0:
        raise GraphError(f"negative vertex count {n}")
    if n > MAX_VERTICES:
        raise CapExceeded(f"{n} vertices exceeds the {MAX_VERTICES}-vertex limit")
    adj = [set() for _ in range(n)]
    for e in edges:
        u, v = (int(x) for x in e)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            raise GraphError(f"loop edge at vertex {u}")
        adj[u].add(v)
        adj[v].add(u)
    adjacency = tuple(tuple(sorted(a)) for a in adj)
    return Graph(n, adjacency, tuple(mask_of(a) for a in adjacency))


def induced_subgraph(g: Graph, w: int) -> tuple[Graph, list[int]]:
    """Subgraph induced by ``w``; ``remap[i]`` is the original index of new vertex ``i``."""
    remap = members(w)
    index = {v: i for i, v in enumerate(remap)}
    edges = [(index[u], index[v]) for u, v in g.edges() if u in index and v in index]
    return build_graph(len(remap), edges), remap


def enumerate_independent_sets(g: Graph, cap: int = ENUM_CAP) -> list[int]:
    """All independent vertex subsets (bitmasks), the empty set included."""
    check_cap(g.n, cap)
    out = []

    def rec(rest, chosen):
        if not rest:
            out.append(chosen)
            return
        v = lowest(rest)
        rest &= ~(1 << v)
        rec(rest, chosen)
        rec(rest & ~g.nbr[v], chosen | (1 << v))

    rec(g.full, 0)
    return out


def check_cap(n: int, cap: int = ENUM_CAP):
    if n > cap:
        raise CapExceeded(f"{n} vertices exceeds the enumeration cap of {cap}")


# --- families ---------------------------------------------------------------

def path(n: int) -> Graph:
    _positive(n=n)
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    _positive(n=n)
    return build_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star(n: int) -> Graph:
    """Star on ``n`` vertices: centre 0 joined to leaves ``1..n-1``."""
    _positive(n=n)
    return build_graph(n, [(0, i) for i in range(1, n)])


def empty(n: int) -> Graph:
    return build_graph(n, [])


def kfuzz_window(k: int, n: int) -> Graph:
    """Vertices ``0..n-1`` with an edge whenever ``0 < |i-j| <= k``."""
    _positive(k=k, n=n)
    return build_graph(n, [(i, j) for i in range(n) for j in range(i + 1, min(n, i + k + 1))])


def grid(rows: int, cols: int) -> Graph:
    """Rectangular piece of Z^2; cell ``(x, y)`` has index ``y * cols + x``."""
    _positive(rows=rows, cols=cols)
    edges = []
    for y in range(rows):
        for x in range(cols):
            v = y * cols + x
            if x + 1 < cols:
                edges.append((v, v + 1))
            if y + 1 < rows:
                edges.append((v, v + cols))
    return build_graph(rows * cols, edges)


def grid_box(N: int) -> Graph:
    return grid(N, N)


def tree_ball(D: int, r: int) -> Graph:
    """Ball of radius ``r`` around the root of the D-regular tree (BFS indexing)."""
    if D < 2 or r < 0:
        raise GraphError("tree_ball needs D >= 2 and r >= 0")
    edges = []
    frontier = [0]
    n = 1
    for depth in range(r):
        nxt = []
        for u in frontier:
            for _ in range(D if depth == 0 else D - 1):
                if n >= MAX_VERTICES:
                    raise CapExceeded(f"tree_ball({D}, {r}) exceeds {MAX_VERTICES} vertices")
                edges.append((u, n))
                nxt.append(n)
                n += 1
        frontier = nxt
    return build_graph(n, edges)


def _positive(**kw):
    for name, val in kw.items():
        if int(val) < 1:
            raise GraphError(f"{name} must be positive, got {val}")


FAMILIES = {
    "path": (path, ("n",)),
    "cycle": (cycle, ("n",)),
    "complete": (complete, ("n",)),
    "star": (star, ("n",)),
    "empty": (empty, ("n",)),
    "kfuzz": (kfuzz_window, ("k", "n")),
    "grid": (None, ()),
    "tree": (tree_ball, ("D", "r")),
}


def make_family(family: str) -> Graph:
    """Build a named family from a family string like ``"kfuzz:k=2,n=9"``.

    ``grid`` accepts either ``N=4`` (square box) or ``rows=2,cols=3``.
    """
    name, _, rest = family.partition(":")
    name = name.strip()
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise GraphError(f"bad family parameter {item!r} in {family!r}")
        try:
            params[key.strip()] = int(val)
        except ValueError:
            raise GraphError(f"non-integer parameter {item!r} in {family!r}") from None
    if name not in FAMILIES:
        raise GraphError(f"unknown family {name!r}; known: {sorted(FAMILIES)}")
    if name == "grid":
        if set(params) == {"N"}:
            return grid_box(params["N"])
        if set(params) == {"rows", "cols"}:
            return grid(params["rows"], params["cols"])
        raise GraphError("grid needs N=... or rows=...,cols=...")
    fn, names = FAMILIES[name]
    if set(params) != set(names):
        raise GraphError(f"family {name!r} takes parameters {names}, got {sorted(params)}")
    return fn(**params)


def load_graph(source) -> Graph:
    """Read a graph from a JSON object or a plain edge list.

    JSON: ``{"n": 3, "edges": [[0, 1], [1, 2]]}``. Edge list: first line
    ``n <count>``, then one ``u v`` pair per line; ``#`` starts a comment.
    """
    text = Path(source).read_text()
    return parse_graph(text)


def parse_graph(text: str) -> Graph:
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
            return build_graph(int(data["n"]), data.get("edges", []))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, GraphError):
                raise
            raise GraphError(f"bad graph JSON: {exc}") from None
    lines = [ln.split("#", 1)[0].strip() for ln in stripped.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("n"):
        raise GraphError("edge list must start with a line 'n <count>'")
    try:
        n = int(lines[0].split()[1])
        edges = [tuple(int(t) for t in ln.split()) for ln in lines[1:]]
    except (IndexError, ValueError):
        raise GraphError("malformed edge list") from None
    if any(len(e) != 2 for e in edges):
        raise GraphError("each edge line must hold exactly two indices")
    return build_graph(n, edges)


def as_params(p, n: int, backend: str) -> tuple:
    """Per-vertex parameter vector in ``[0, 1]``; a scalar means homogeneous."""
    from .numeric import coerce

    if isinstance(p, (list, tuple)) or hasattr(p, "__array__"):
        vals = tuple(coerce(x, backend) for x in p)
        if len(vals) != n:
            raise GraphError(f"parameter vector has length {len(vals)}, graph has {n} vertices")
    else:
        vals = (coerce(p, backend),) * n
    for v, x in enumerate(vals):
        if not 0 <= x <= 1:
            raise GraphError(f"parameter at vertex {v} is {x}, outside [0, 1]")
    return vals
