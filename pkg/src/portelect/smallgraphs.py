"""Exhaustive and random small port-labeled graphs for cross-validation.

`enumerate_port_labeled` walks all connected simple graphs up to a node
bound (one representative per isomorphism class, from the networkx atlas),
assigns ports in every possible way, and deduplicates by an exact
port-isomorphism invariant: the minimum over start nodes of the
port-ordered BFS code.  Two connected port-labeled graphs have equal codes
from corresponding start nodes iff they are port-isomorphic, so the minimum
is a canonical form.

For complete graphs the first node's ports are pinned to increasing
neighbor order before enumerating the rest; any port labeling of a complete
graph has an isomorphic image of that shape, so no class is lost, and K5
drops from 7.9M candidates to 331k.
"""

from __future__ import annotations

import random
from itertools import permutations, product
from typing import Iterator

from .graph import GraphBuilder, PortLabeledGraph, validate
from .tasks import is_feasible


def canonical_key(g: PortLabeledGraph) -> tuple[int, ...]:
    """Exact port-isomorphism invariant of a connected port-labeled graph."""
    best: tuple[int, ...] | None = None
    for start in range(g.n):
        ids = {start: 0}
        order = [start]
        code: list[int] = []
        for x in order:
            row = g.adjacency[x]
            code.append(len(row))
            for u, q in row:
                if u not in ids:
                    ids[u] = len(order)
                    order.append(u)
                code.append(q)
                code.append(ids[u])
        key = tuple(code)
        if best is None or key < best:
            best = key
    assert best is not None
    return best


def _connected_atlas(max_n: int) -> list[list[tuple[int, int]]]:
    """Edge lists of all connected graphs on 1..max_n nodes, one per iso class."""
    import networkx as nx

    out: list[list[tuple[int, int]]] = []
    for g in nx.graph_atlas_g():
        n = g.number_of_nodes()
        if n < 1 or n > max_n:
            continue
        if not nx.is_connected(g):
            continue
        mapping = {v: i for i, v in enumerate(sorted(g.nodes()))}
        out.append(sorted((min(mapping[a], mapping[b]), max(mapping[a], mapping[b]))
                          for a, b in g.edges()))
    return out


def _port_labelings(
    n: int, edges: list[tuple[int, int]]
) -> Iterator[PortLabeledGraph]:
    """All port assignments of one underlying labeled graph."""
    incident: list[list[int]] = [[] for _ in range(n)]
    for idx, (a, b) in enumerate(edges):
        incident[a].append(idx)
        incident[b].append(idx)
    degs = [len(inc) for inc in incident]
    complete = n > 1 and all(d == n - 1 for d in degs)

    per_node: list[list[tuple[int, ...]]] = []
    for v in range(n):
        perms = list(permutations(range(degs[v])))
        if complete and v == 0:
            perms = [tuple(range(degs[v]))]  # ports in increasing neighbor order
        per_node.append(perms)

    for combo in product(*per_node):
        # combo[v][i] = port at v of its i-th incident edge
        port_of = [
            {incident[v][i]: combo[v][i] for i in range(degs[v])} for v in range(n)
        ]
        rows = []
        for v in range(n):
            row: list[tuple[int, int]] = [(-1, -1)] * degs[v]
            for i, eidx in enumerate(incident[v]):
                a, b = edges[eidx]
                u = b if a == v else a
                row[combo[v][i]] = (u, port_of[u][eidx])
            rows.append(tuple(row))
        yield PortLabeledGraph(tuple(rows))


def enumerate_port_labeled(
    max_n: int, feasible_only: bool = False
) -> Iterator[PortLabeledGraph]:
    """All connected port-labeled graphs with <= max_n nodes, one per
    port-isomorphism class (canonical-key deduplication)."""
    for edges in _connected_atlas(max_n):
        n = max(max(e) for e in edges) + 1 if edges else 1
        seen: set[tuple[int, ...]] = set()
        for g in _port_labelings(n, edges):
            key = canonical_key(g)
            if key in seen:
                continue
            seen.add(key)
            if feasible_only and not is_feasible(g):
                continue
            yield g


def random_connected_graph(rng: random.Random, n: int, extra_edge_prob: float = 0.3) -> PortLabeledGraph:
    """Random spanning tree plus random extra edges, ports shuffled per node."""
    edges: set[tuple[int, int]] = set()
    for v in range(1, n):
        u = rng.randrange(v)
        edges.add((u, v))
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in edges and rng.random() < extra_edge_prob:
                edges.add((u, v))
    incident: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    ordered = sorted(edges)
    for idx, (a, b) in enumerate(ordered):
        incident[a].append(idx)
        incident[b].append(idx)
    port_of: list[dict[int, int]] = []
    for v in range(n):
        ports = list(range(len(incident[v])))
        rng.shuffle(ports)
        port_of.append({eidx: ports[i] for i, eidx in enumerate(incident[v])})
    b = GraphBuilder()
    b.add_nodes(n)
    for idx, (u, v) in enumerate(ordered):
        b.add_edge(u, port_of[u][idx], v, port_of[v][idx])
    return b.build()


def random_feasible_graph(
    rng: random.Random, min_n: int = 3, max_n: int = 8, max_tries: int = 1000
) -> PortLabeledGraph:
    for _ in range(max_tries):
        g = random_connected_graph(rng, rng.randint(min_n, max_n))
        if is_feasible(g):
            return g
    raise RuntimeError("could not sample a feasible graph")
