"""Port-labeled graph data model, validation, and PLG text serialization.

A port-labeled graph is a simple connected undirected graph in which every
node of degree d labels its incident edges with the distinct local port
numbers 0..d-1.  The two endpoints of an edge label it independently, so an
edge is a 4-tuple (u, p, v, q): port p at u, port q at v.

The PLG text format (one graph per file)::

    plg 1
    nodes <n>
    edge <u> <p> <v> <q>
    ...

`#` starts a comment; fields are whitespace-separated decimal integers.
Canonical serialization lists each edge once with its smaller endpoint
first, sorted by (min endpoint, port at that endpoint).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence


class GraphError(ValueError):
    """Base class for port-labeled graph violations."""


class SelfLoopError(GraphError):
    pass


class MultiEdgeError(GraphError):
    pass


class BadPortRangeError(GraphError):
    """Ports at some node are not exactly {0..deg-1}."""


class NonReciprocalError(GraphError):
    """adjacency[v][p] = (u, q) but adjacency[u][q] != (v, p)."""


class NotConnectedError(GraphError):
    pass


class PortOutOfRangeError(GraphError):
    pass


class PlgSyntaxError(GraphError):
    """Malformed PLG text; message carries the line number."""


@dataclass(frozen=True)
class PortLabeledGraph:
    """Immutable validated port-labeled graph.

    ``adjacency[v][p] == (u, q)`` means the edge at port p of v leads to u,
    arriving at u's port q.  Instances are only created through `validate`,
    `GraphBuilder.build`, or `parse_plg`, so the invariants (simple,
    connected, contiguous ports, reciprocity) always hold.
    """

    adjacency: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def n(self) -> int:
        return len(self.adjacency)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(row) for row in self.adjacency)

    @property
    def max_degree(self) -> int:
        return max(self.degrees)

    @property
    def edge_count(self) -> int:
        return sum(self.degrees) // 2

    def follow_port(self, v: int, p: int) -> tuple[int, int]:
        if not 0 <= v < self.n:
            raise PortOutOfRangeError(f"node {v} out of range (n={self.n})")
        if not 0 <= p < len(self.adjacency[v]):
            raise PortOutOfRangeError(
                f"port {p} out of range at node {v} (deg={len(self.adjacency[v])})"
            )
        return self.adjacency[v][p]

    def edges(self) -> Iterator[tuple[int, int, int, int]]:
        """Yield each edge once as (u, p, v, q) with u < v, sorted by (u, p)."""
        for u, row in enumerate(self.adjacency):
            for p, (v, q) in enumerate(row):
                if u < v:
                    yield (u, p, v, q)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(u for u, _ in self.adjacency[v])


def follow_port(g: PortLabeledGraph, v: int, p: int) -> tuple[int, int]:
    return g.follow_port(v, p)


def validate(
    raw_adjacency: Sequence[Sequence[tuple[int, int]] | Mapping[int, tuple[int, int]]],
) -> PortLabeledGraph:
    """Check raw adjacency data and freeze it into a PortLabeledGraph.

    Accepts per-node port maps either as sequences indexed by port or as
    {port: (neighbor, reciprocal_port)} mappings (which may expose gaps).
    """
    n = len(raw_adjacency)
    rows: list[tuple[tuple[int, int], ...]] = []
    for v, raw in enumerate(raw_adjacency):
        if isinstance(raw, Mapping):
            ports = sorted(raw)
            if ports != list(range(len(ports))):
                raise BadPortRangeError(
                    f"node {v}: ports {ports} are not exactly 0..{len(ports) - 1}"
                )
            row = tuple(raw[p] for p in ports)
        else:
            row = tuple((int(u), int(q)) for u, q in raw)
        rows.append(row)

    seen_pairs: set[tuple[int, int]] = set()
    for v, row in enumerate(rows):
        for p, (u, q) in enumerate(row):
            if not 0 <= u < n:
                raise GraphError(f"node {v} port {p}: neighbor {u} out of range")
            if u == v:
                raise SelfLoopError(f"self-loop at node {v} (port {p})")
            if not 0 <= q < len(rows[u]):
                raise BadPortRangeError(
                    f"node {v} port {p}: reciprocal port {q} out of range at node {u}"
                )
            if rows[u][q] != (v, p):
                raise NonReciprocalError(
                    f"edge ({v},{p})->({u},{q}) not mirrored: adjacency[{u}][{q}]={rows[u][q]}"
                )
            key = (min(u, v), max(u, v))
            if v < u:
                if key in seen_pairs:
                    raise MultiEdgeError(f"multiple edges between {v} and {u}")
                seen_pairs.add(key)

    if n > 0:
        seen = bytearray(n)
        seen[0] = 1
        stack = [0]
        count = 1
        while stack:
            x = stack.pop()
            for u, _ in rows[x]:
                if not seen[u]:
                    seen[u] = 1
                    count += 1
                    stack.append(u)
        if count != n:
            missing = next(i for i in range(n) if not seen[i])
            raise NotConnectedError(f"graph not connected: node {missing} unreachable from 0")

    return PortLabeledGraph(tuple(rows))


class GraphBuilder:
    """Mutable edge-at-a-time constructor for PortLabeledGraph.

    Duplicate port use and self-loops fail fast; contiguity, reciprocity
    and connectivity are checked at `build()`.
    """

    def __init__(self) -> None:
        self._ports: list[dict[int, tuple[int, int]]] = []

    @property
    def n(self) -> int:
        return len(self._ports)

    def add_node(self) -> int:
        self._ports.append({})
        return len(self._ports) - 1

    def add_nodes(self, count: int) -> range:
        start = len(self._ports)
        for _ in range(count):
            self._ports.append({})
        return range(start, start + count)

    def add_edge(self, u: int, pu: int, v: int, pv: int) -> None:
        if u == v:
            raise SelfLoopError(f"self-loop at node {u} (ports {pu},{pv})")
        for node, port in ((u, pu), (v, pv)):
            if port in self._ports[node]:
                raise BadPortRangeError(
                    f"port {port} already used at node {node} "
                    f"(-> {self._ports[node][port]})"
                )
        if any(nbr == v for nbr, _ in self._ports[u].values()):
            raise MultiEdgeError(f"multiple edges between {u} and {v}")
        self._ports[u][pu] = (v, pv)
        self._ports[v][pv] = (u, pu)

    def port_used(self, v: int, p: int) -> bool:
        return p in self._ports[v]

    def degree(self, v: int) -> int:
        return len(self._ports[v])

    def swap_ports(self, v: int, p1: int, p2: int) -> None:
        """Exchange the two port labels p1 and p2 at node v."""
        ports = self._ports[v]
        e1, e2 = ports.pop(p1), ports.pop(p2)
        ports[p1], ports[p2] = e2, e1
        u1, q1 = e1
        u2, q2 = e2
        self._ports[u1][q1] = (v, p2)
        self._ports[u2][q2] = (v, p1)

    def merge(self, other: "GraphBuilder") -> int:
        """Append a disjoint copy of `other`; returns the node-id offset."""
        offset = len(self._ports)
        for ports in other._ports:
            self._ports.append({p: (u + offset, q) for p, (u, q) in ports.items()})
        return offset

    def merge_graph(self, g: PortLabeledGraph) -> int:
        """Append a disjoint copy of a finished graph; returns the node-id offset."""
        offset = len(self._ports)
        for row in g.adjacency:
            self._ports.append({p: (u + offset, q) for p, (u, q) in enumerate(row)})
        return offset

    def build(self) -> PortLabeledGraph:
        return validate(self._ports)


def from_edges(n: int, edges: Iterable[tuple[int, int, int, int]]) -> PortLabeledGraph:
    """Build a validated graph on nodes 0..n-1 from (u, p, v, q) edges."""
    b = GraphBuilder()
    b.add_nodes(n)
    for u, p, v, q in edges:
        b.add_edge(u, p, v, q)
    return b.build()


def parse_plg(text: str) -> PortLabeledGraph:
    """Parse PLG text; raises PlgSyntaxError (with line number) or validation errors."""
    n: int | None = None
    header_seen = False
    edges: list[tuple[int, int, int, int]] = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if not header_seen:
            if fields != ["plg", "1"]:
                raise PlgSyntaxError(f"line {lineno}: expected 'plg 1' header, got {line!r}")
            header_seen = True
            continue
        if n is None:
            if len(fields) != 2 or fields[0] != "nodes":
                raise PlgSyntaxError(f"line {lineno}: expected 'nodes <n>', got {line!r}")
            try:
                n = int(fields[1])
            except ValueError:
                raise PlgSyntaxError(f"line {lineno}: bad node count {fields[1]!r}") from None
            if n < 0:
                raise PlgSyntaxError(f"line {lineno}: negative node count")
            continue
        if fields[0] != "edge" or len(fields) != 5:
            raise PlgSyntaxError(f"line {lineno}: expected 'edge <u> <p> <v> <q>', got {line!r}")
        try:
            u, p, v, q = (int(f) for f in fields[1:])
        except ValueError:
            raise PlgSyntaxError(f"line {lineno}: non-integer field in {line!r}") from None
        if min(u, p, v, q) < 0:
            raise PlgSyntaxError(f"line {lineno}: negative field in {line!r}")
        edges.append((u, p, v, q))
    if not header_seen:
        raise PlgSyntaxError("line 1: missing 'plg 1' header")
    if n is None:
        raise PlgSyntaxError("missing 'nodes <n>' line")

    ports: list[dict[int, tuple[int, int]]] = [{} for _ in range(n)]
    for u, p, v, q in edges:
        if u >= n or v >= n:
            raise GraphError(f"edge ({u},{p},{v},{q}): node id out of range (n={n})")
        if u == v:
            raise SelfLoopError(f"self-loop at node {u}")
        for a, pa, b, pb in ((u, p, v, q), (v, q, u, p)):
            if pa in ports[a] and ports[a][pa] != (b, pb):
                raise BadPortRangeError(f"port {pa} at node {a} assigned twice")
            ports[a][pa] = (b, pb)
    return validate(ports)


def serialize_plg(g: PortLabeledGraph) -> str:
    """Canonical PLG text: byte-stable for a given graph."""
    lines = ["plg 1", f"nodes {g.n}"]
    for u, p, v, q in sorted(g.edges()):
        lines.append(f"edge {u} {p} {v} {q}")
    return "\n".join(lines) + "\n"


def bfs_distances(g: PortLabeledGraph, sources: Iterable[int]) -> list[int]:
    """Distance from every node to the nearest source (-1 if unreachable)."""
    dist = [-1] * g.n
    frontier = []
    for s in sources:
        if dist[s] == -1:
            dist[s] = 0
            frontier.append(s)
    d = 0
    while frontier:
        d += 1
        nxt = []
        for x in frontier:
            for u, _ in g.adjacency[x]:
                if dist[u] == -1:
                    dist[u] = d
                    nxt.append(u)
        frontier = nxt
    return dist
