"""Truncated degree-augmented views and view-equivalence partitions.

The depth-h view from a node v is the tree of all (possibly backtracking)
port-labeled walks of length <= h starting at v, with every tree node
carrying the degree of the graph node it stands on.  Two nodes are
h-equivalent iff their depth-h views are equal; a deterministic node can
decide after h synchronous rounds exactly the things that are functions of
this view.

Explicit `ViewTree` objects grow like max_degree**h, so bulk comparisons go
through `refine_classes` / `refine_union`: iterated partition refinement
whose depth-h classes coincide exactly with depth-h view equality, within
one graph or across several.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import PortLabeledGraph

VIEW_NODE_BUDGET = 10_000_000


class DepthTooLargeError(ValueError):
    """Explicit view tree would exceed the node budget; use refinement instead."""


class TiedViewsError(ValueError):
    """lex_min_view candidates were expected to be pairwise distinct but are not."""


@dataclass(frozen=True)
class ViewTree:
    """Depth-`height` augmented view.

    `root` is a nested tuple (degree, children) where children is a tuple of
    (incoming_port, child) pairs indexed by outgoing port; nodes on the
    depth-`height` frontier have an empty children tuple regardless of their
    degree.
    """

    height: int
    root: tuple

    @property
    def degree(self) -> int:
        return self.root[0]

    def node_count(self) -> int:
        count = 0
        stack = [self.root]
        while stack:
            deg, children = stack.pop()
            count += 1
            for _, child in children:
                stack.append(child)
        return count


def build_view(
    g: PortLabeledGraph, v: int, h: int, max_nodes: int = VIEW_NODE_BUDGET
) -> ViewTree:
    """Explicit depth-h view from v.  Raises DepthTooLargeError over budget."""
    if h < 0:
        raise ValueError("view depth must be >= 0")
    budget = max_nodes
    adjacency = g.adjacency

    def expand(node: int, depth: int) -> tuple:
        nonlocal budget
        budget -= 1
        if budget < 0:
            raise DepthTooLargeError(
                f"depth-{h} view from node {v} exceeds {max_nodes} nodes"
            )
        row = adjacency[node]
        if depth == h:
            return (len(row), ())
        return (len(row), tuple((q, expand(u, depth + 1)) for u, q in row))

    return ViewTree(h, expand(v, 0))


def encode_varint(value: int, out: bytearray) -> None:
    """Unsigned varint: 7-bit little-endian groups, high bit = continuation."""
    if value < 0:
        raise ValueError("varint encodes non-negative integers")
    while True:
        group = value & 0x7F
        value >>= 7
        if value:
            out.append(group | 0x80)
        else:
            out.append(group)
            return


def read_varint(data: bytes, pos: int) -> tuple[int, int]:
    value = 0
    shift = 0
    while True:
        if pos >= len(data):
            raise ValueError("truncated varint")
        byte = data[pos]
        pos += 1
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, pos
        shift += 7


def canonical_encoding(view: ViewTree) -> bytes:
    """Injective byte encoding of a ViewTree; bytewise order is the total view order.

    Layout: varint(height) then enc(root) where
    enc(node) = varint(degree) then, below the frontier, for each outgoing
    port in increasing order: varint(incoming_port) enc(child).
    """
    out = bytearray()
    encode_varint(view.height, out)

    def emit(node: tuple) -> None:
        deg, children = node
        encode_varint(deg, out)
        for q, child in children:
            encode_varint(q, out)
            emit(child)

    emit(view.root)
    return bytes(out)


def decode_encoding(data: bytes) -> ViewTree:
    """Inverse of canonical_encoding; raises ValueError on malformed bytes."""
    h, pos = read_varint(data, 0)

    def parse(depth: int, pos: int) -> tuple[tuple, int]:
        deg, pos = read_varint(data, pos)
        if depth == h:
            return (deg, ()), pos
        children = []
        for _ in range(deg):
            q, pos = read_varint(data, pos)
            child, pos = parse(depth + 1, pos)
            children.append((q, child))
        return (deg, tuple(children)), pos

    root, pos = parse(0, pos)
    if pos != len(data):
        raise ValueError(f"trailing bytes after view encoding (at {pos})")
    return ViewTree(h, root)


@dataclass(frozen=True)
class Partition:
    """Per-depth view-equivalence classes of one graph.

    ``class_ids[d][v]`` is the dense class id of node v at depth d; ids are
    assigned in sorted signature order so they are stable across runs.  Equal
    ids at depth d mean equal depth-d views (within this partition's id
    namespace, which `refine_union` may share across graphs).
    """

    class_ids: tuple[tuple[int, ...], ...]

    @property
    def depth(self) -> int:
        return len(self.class_ids) - 1

    def at(self, d: int) -> tuple[int, ...]:
        return self.class_ids[d]

    def num_classes(self, d: int) -> int:
        return len(set(self.class_ids[d]))

    def classes_at(self, d: int) -> dict[int, list[int]]:
        groups: dict[int, list[int]] = {}
        for v, c in enumerate(self.class_ids[d]):
            groups.setdefault(c, []).append(v)
        return groups

    def singletons(self, d: int) -> set[int]:
        counts: dict[int, int] = {}
        for c in self.class_ids[d]:
            counts[c] = counts.get(c, 0) + 1
        return {v for v, c in enumerate(self.class_ids[d]) if counts[c] == 1}


def _refine_levels(
    adjacencies: Sequence[tuple[tuple[tuple[int, int], ...], ...]], h: int
) -> list[list[list[int]]]:
    """Shared-namespace refinement over several graphs.

    Returns levels[d][gi][v] = class id of node v of graph gi at depth d.
    Depth-0 classes are degrees (renamed densely); the depth-(d+1) signature
    of v is (class_d(v), ((q, class_d(u)) per port)).
    """
    degrees = sorted({len(row) for adj in adjacencies for row in adj})
    rank0 = {deg: i for i, deg in enumerate(degrees)}
    current = [[rank0[len(row)] for row in adj] for adj in adjacencies]
    levels = [current]
    for _ in range(h):
        signatures: list[list[tuple]] = []
        uniq: set[tuple] = set()
        for adj, ids in zip(adjacencies, current):
            sigs = [
                (ids[v], tuple((q, ids[u]) for u, q in adj[v]))
                for v in range(len(adj))
            ]
            signatures.append(sigs)
            uniq.update(sigs)
        rank = {sig: i for i, sig in enumerate(sorted(uniq))}
        current = [[rank[s] for s in sigs] for sigs in signatures]
        levels.append(current)
    return levels


def refine_union(graphs: Sequence[PortLabeledGraph], h: int) -> list[Partition]:
    """Partitions of several graphs with one shared class-id namespace per depth.

    Cross-graph id equality at depth d is exactly cross-graph depth-d view
    equality, so this subsumes pairwise explicit-tree comparison.
    """
    if h < 0:
        raise ValueError("depth must be >= 0")
    levels = _refine_levels([g.adjacency for g in graphs], h)
    parts = []
    for gi in range(len(graphs)):
        parts.append(Partition(tuple(tuple(level[gi]) for level in levels)))
    return parts


def refine_classes(g: PortLabeledGraph, h: int) -> Partition:
    return refine_union([g], h)[0]


def stabilized_partition(g: PortLabeledGraph) -> tuple[Partition, int]:
    """Refine until two consecutive depths induce the same partition.

    Returns (partition up to the stable depth, stable depth).  Because each
    level refines the previous one, equality of class counts at consecutive
    depths implies the groupings coincide; at most n-1 refinements happen.
    """
    part = refine_classes(g, 0)
    count = part.num_classes(0)
    depth = 0
    while True:
        nxt = refine_classes(g, depth + 1)
        nxt_count = nxt.num_classes(depth + 1)
        if nxt_count == count:
            return nxt, depth
        part, count, depth = nxt, nxt_count, depth + 1


def views_equal(
    g1: PortLabeledGraph, v1: int, g2: PortLabeledGraph, v2: int, h: int
) -> bool:
    """True iff the depth-h views of v1 in g1 and v2 in g2 are equal."""
    if g1 is g2:
        part = refine_classes(g1, h)
        return part.at(h)[v1] == part.at(h)[v2]
    p1, p2 = refine_union([g1, g2], h)
    return p1.at(h)[v1] == p2.at(h)[v2]


def unique_view_nodes(g: PortLabeledGraph, h: int) -> set[int]:
    """Nodes whose depth-h view is unique in g."""
    return refine_classes(g, h).singletons(h)


class ViewMatcher:
    """Locate which nodes of a graph have a given explicit depth-h view.

    Builds hash-consed per-depth view ids for the whole graph once; `match`
    folds an explicit ViewTree bottom-up through the same tables, so a query
    costs O(view size) and never materializes the graph's own trees.
    """

    def __init__(self, g: PortLabeledGraph, h: int):
        self.h = h
        adjacency = g.adjacency
        interns: list[dict] = [{}]
        ids: list[int] = []
        for v in range(g.n):
            deg = len(adjacency[v])
            kid = interns[0].setdefault(deg, len(interns[0]))
            ids.append(kid)
        for _ in range(h):
            table: dict = {}
            nxt = []
            for v in range(g.n):
                row = adjacency[v]
                key = (len(row), tuple((q, ids[u]) for u, q in row))
                nxt.append(table.setdefault(key, len(table)))
            interns.append(table)
            ids = nxt
        self._interns = interns
        groups: dict[int, list[int]] = {}
        for v, kid in enumerate(ids):
            groups.setdefault(kid, []).append(v)
        self._groups = groups

    def match(self, view: ViewTree) -> list[int]:
        """Nodes whose depth-h view equals `view` (empty list if none)."""
        if view.height != self.h:
            raise ValueError(f"view height {view.height} != matcher depth {self.h}")

        def fold(node: tuple, depth: int):
            d = self.h - depth
            deg, children = node
            if d == 0:
                return self._interns[0].get(deg)
            parts = []
            for q, child in children:
                kid = fold(child, depth + 1)
                if kid is None:
                    return None
                parts.append((q, kid))
            return self._interns[d].get((deg, tuple(parts)))

        kid = fold(view.root, 0)
        if kid is None:
            return []
        return list(self._groups.get(kid, []))


def lex_min_view(
    g: PortLabeledGraph,
    candidates: Iterable[int],
    h: int,
    max_nodes: int = VIEW_NODE_BUDGET,
) -> int:
    """The candidate whose depth-h canonical encoding is bytewise smallest.

    Candidates must have pairwise distinct views (TiedViewsError otherwise).
    """
    nodes = sorted(set(candidates))
    if not nodes:
        raise ValueError("empty candidate set")
    best_node = -1
    best_key: bytes | None = None
    for v in nodes:
        key = canonical_encoding(build_view(g, v, h, max_nodes=max_nodes))
        if best_key is None or key < best_key:
            best_node, best_key = v, key
        elif key == best_key:
            raise TiedViewsError(f"nodes {best_node} and {v} share a depth-{h} view")
    return best_node
