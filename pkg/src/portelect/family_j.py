"""Path-election family: chained gadgets with bit-encoded positions.

Construction pipeline, for branching factor mu >= 2 and round count k >= 4:

1. Layer graphs ``L_0..L_k``: L_0 a point, L_1 a mu-clique, L_{2j} two full
   mu-ary trees of height j glued at identified leaves ("middles"), L_{2j+1}
   two such trees joined leaf-to-leaf.
2. Component ``H``: layers L_0..L_{k-1} plus two copies of L_k, wired so
   every node sees all of H within distance k but misses some pair of
   corresponding last-layer nodes at distance k-1.
3. Gadget: four copies of H (indexed L,T,R,B) sharing one center of degree
   4*mu.
4. Template ``J``: 2**z gadgets (z = |L_k|) in a chain; the binary
   representation of a gadget's position is written into last-layer node
   degrees: self-edges in T (own index) and B (successor index), cross edges
   between neighboring gadgets' R and L.
5. Instance ``J_Y``: for each set bit y_i, the center ports of gadget i have
   their R/B ranges exchanged and those of gadget 2**z-1-i their L/T ranges.

The exchanges are invisible within distance k-1 but flip which port range
continues the chain, which is what makes complete-port-path outputs depend
on nearly the whole of Y.  `cppe_map_outputs` is the k-round map-based
algorithm solving the task on any instance.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .graph import GraphBuilder, PortLabeledGraph, bfs_distances, validate
from .tasks import LEADER, check_path_output
from .trees import (
    BadSequenceError,
    LemmaViolationError,
    NotAFamilyInstanceError,
    ParamOutOfRangeError,
    SizeGuardError,
)
from .views import refine_classes, refine_union

SIZE_GUARD = 300_000

COMPONENTS = ("L", "T", "R", "B")


class DecodeAmbiguityError(ValueError):
    """Observed last-layer degree pattern matches no position encoding."""


def layer_size(mu: int, m: int) -> int:
    """Closed-form node count of layer graph L_m."""
    if mu < 2:
        raise ParamOutOfRangeError(f"mu must be >= 2, got {mu}")
    if m < 0:
        raise ParamOutOfRangeError(f"layer index must be >= 0, got {m}")
    if m == 0:
        return 1
    if m == 1:
        return mu
    j = m // 2
    if m % 2 == 0:
        return (mu ** (j + 1) + mu**j - 2) // (mu - 1)
    return (2 * mu ** (j + 1) - 2) // (mu - 1)


def border_width(mu: int, k: int) -> int:
    """z: the number of nodes of L_k (bits per encoded gadget index)."""
    _check_params(mu, k)
    return layer_size(mu, k)


def class_size(mu: int, k: int) -> int:
    """2 ** (2 ** (z-1)) instances."""
    return 2 ** (2 ** (border_width(mu, k) - 1))


def _check_params(mu: int, k: int) -> None:
    if mu < 2:
        raise ParamOutOfRangeError(f"mu must be >= 2, got {mu}")
    if k < 4:
        raise ParamOutOfRangeError(f"k must be >= 4, got {k}")


# --------------------------------------------------------------------------
# Part 1: layer graphs


@dataclass
class Layer:
    m: int
    n: int
    # (side, path) -> local node id; even-layer middles appear under both sides
    nodes: dict[tuple[int, tuple[int, ...]], int]
    edges: list[tuple[int, int, int, int]]


def _tree_paths(mu: int, depth: int) -> list[tuple[int, ...]]:
    paths = [()]
    out = list(paths)
    for _ in range(depth):
        paths = [p + (c,) for p in paths for c in range(mu)]
        out.extend(paths)
    return out


def build_layer(mu: int, m: int) -> Layer:
    if mu < 2 or m < 0:
        raise ParamOutOfRangeError(f"bad layer parameters mu={mu}, m={m}")
    nodes: dict[tuple[int, tuple[int, ...]], int] = {}
    edges: list[tuple[int, int, int, int]] = []
    if m == 0:
        nodes[(0, ())] = 0
        return Layer(0, 1, nodes, edges)
    if m == 1:
        for i in range(mu):
            nodes[(0, (i,))] = i
        for i in range(mu):
            for jj in range(i + 1, mu):
                edges.append((i, jj - 1, jj, i))
        return Layer(1, mu, nodes, edges)

    j = m // 2
    even = m % 2 == 0
    counter = 0
    inner_depth = j - 1 if even else j
    for side in (0, 1):
        for path in _tree_paths(mu, inner_depth):
            nodes[(side, path)] = counter
            counter += 1
    if even:
        for path in _tree_paths(mu, j):
            if len(path) == j:
                nodes[(0, path)] = counter
                nodes[(1, path)] = counter
                counter += 1

    def parent_port(side: int, path: tuple[int, ...]) -> int:
        # port at the child end of its tree edge
        if len(path) < j:
            return mu
        if even:
            return side  # glued middle: 0 toward side 0, 1 toward side 1
        return 0  # leaf of an odd layer

    for side in (0, 1):
        for path in _tree_paths(mu, j):
            if not path:
                continue
            child = nodes[(side, path)]
            parent = nodes[(side, path[:-1])]
            edges.append((parent, path[-1], child, parent_port(side, path)))
    if even:
        # deduplicate: the middle rows were emitted once per side already
        pass
    else:
        for path in _tree_paths(mu, j):
            if len(path) == j:
                edges.append((nodes[(0, path)], 1, nodes[(1, path)], 1))

    expected = layer_size(mu, m)
    if counter != expected:
        raise AssertionError(f"L_{m}(mu={mu}): built {counter} nodes, formula {expected}")
    return Layer(m, counter, nodes, edges)


# --------------------------------------------------------------------------
# Part 2: the component graph H


@dataclass
class Component:
    mu: int
    k: int
    n: int
    root: int
    edges: list[tuple[int, int, int, int]]
    # w_1..w_z of the two last-layer copies, in prepend-side lexicographic order
    border1: tuple[int, ...]
    border2: tuple[int, ...]
    degrees: tuple[int, ...]  # degree of every node within H


def _interlayer_edges(
    mu: int,
    m: int,
    src: dict[tuple[int, tuple[int, ...]], int],
    dst: dict[tuple[int, tuple[int, ...]], int],
) -> list[tuple[int, int, int, int]]:
    """Edges between L_m and L_{m+1} for 2 <= m, with the prescribed ports."""
    out: list[tuple[int, int, int, int]] = []
    for b in (0, 1):
        out.append((src[(b, ())], mu + 1, dst[(b, ())], mu))
    for b in (0, 1):
        for length in range(1, m // 2):
            for path in _tree_paths(mu, length):
                if len(path) != length:
                    continue
                out.append((src[(b, path)], mu + 2, dst[(b, path)], mu + 1))
    if m % 2 == 0:
        lo = 3 if m == 2 else 4
        for path in _tree_paths(mu, m // 2):
            if len(path) != m // 2:
                continue
            mid = src[(0, path)]
            out.append((mid, lo, dst[(0, path)], 2))
            out.append((mid, lo + 1, dst[(1, path)], 2))
    else:
        half = (m - 1) // 2
        for b in (0, 1):
            for path in _tree_paths(mu, half):
                if len(path) != half:
                    continue
                leaf = src[(b, path)]
                out.append((leaf, 3, dst[(b, path)], mu + 1))
                for i in range(mu):
                    out.append((leaf, 4 + i, dst[(b, path + (i,))], 2 if b == 0 else 3))
    return out


def _border_order(layer: Layer) -> list[int]:
    """Distinct last-layer nodes ordered by their smallest (side, path) address."""
    best: dict[int, tuple] = {}
    for (b, path), lid in layer.nodes.items():
        key = (b,) + path
        if lid not in best or key < best[lid]:
            best[lid] = key
    return [lid for lid, _ in sorted(best.items(), key=lambda kv: kv[1])]


def build_component(mu: int, k: int) -> Component:
    _check_params(mu, k)
    layers = [build_layer(mu, m) for m in range(k)]
    last1, last2 = build_layer(mu, k), build_layer(mu, k)

    offsets: list[int] = []
    total = 0
    for layer in layers + [last1, last2]:
        offsets.append(total)
        total += layer.n
    off1, off2 = offsets[k], offsets[k + 1]

    def view(idx: int, layer: Layer) -> dict:
        off = offsets[idx]
        return {addr: off + lid for addr, lid in layer.nodes.items()}

    edges: list[tuple[int, int, int, int]] = []
    for idx, layer in enumerate(layers + [last1, last2]):
        off = offsets[idx]
        edges.extend((u + off, pu, v + off, pv) for u, pu, v, pv in layer.edges)

    views = [view(i, layer) for i, layer in enumerate(layers)]
    view_last1, view_last2 = view(k, last1), view(k + 1, last2)

    # L_0 -- L_1: center port i to clique node i, which answers with mu-1
    root = views[0][(0, ())]
    for i in range(mu):
        edges.append((root, i, views[1][(0, (i,))], mu - 1))
    # L_1 -- L_2
    for i in range(mu):
        edges.append((views[1][(0, (i,))], mu, views[2][(0, (i,))], 2))
    edges.append((views[1][(0, (0,))], mu + 1, views[2][(0, ())], mu))
    edges.append((views[1][(0, (mu - 1,))], mu + 1, views[2][(1, ())], mu))
    # general rules up to L_{k-1}
    for m in range(2, k - 1):
        edges.extend(_interlayer_edges(mu, m, views[m], views[m + 1]))
    # doubled last step: same rule to both L_k copies, second with shifted ports
    first = _interlayer_edges(mu, k - 1, views[k - 1], view_last1)
    used: dict[int, int] = {}
    for u, pu, _, _ in first:
        used[u] = used.get(u, 0) + 1
    second = [
        (u, pu + used[u], v, pv)
        for u, pu, v, pv in _interlayer_edges(mu, k - 1, views[k - 1], view_last2)
    ]
    edges.extend(first)
    edges.extend(second)

    degrees = [0] * total
    for u, _, v, _ in edges:
        degrees[u] += 1
        degrees[v] += 1

    border1 = tuple(off1 + lid for lid in _border_order(last1))
    border2 = tuple(off2 + lid for lid in _border_order(last2))
    return Component(mu, k, total, root, edges, border1, border2, tuple(degrees))


def component_graph(mu: int, k: int) -> tuple[PortLabeledGraph, Component]:
    """The component H as a standalone validated graph."""
    comp = build_component(mu, k)
    b = GraphBuilder()
    b.add_nodes(comp.n)
    for u, pu, v, pv in comp.edges:
        b.add_edge(u, pu, v, pv)
    return b.build(), comp


# --------------------------------------------------------------------------
# Parts 3-5: gadget, template, instances


@dataclass
class Gadget:
    mu: int
    k: int
    n: int
    edges: list[tuple[int, int, int, int]]
    # borders[component][copy-1][q-1] -> gadget-local node id
    borders: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    border_degs: tuple[int, ...]  # degree within H of w_q (same for all copies)


def build_gadget(mu: int, k: int) -> Gadget:
    comp = build_component(mu, k)
    root = comp.root
    size = comp.n - 1  # per-component share beyond the merged center

    def relocate(d: int, local: int) -> int:
        if local == root:
            return 0
        shifted = local if local < root else local - 1
        return 1 + d * size + shifted

    edges: list[tuple[int, int, int, int]] = []
    borders = []
    for d in range(4):
        for u, pu, v, pv in comp.edges:
            gu, gv = relocate(d, u), relocate(d, v)
            gpu = pu + d * mu if gu == 0 else pu
            gpv = pv + d * mu if gv == 0 else pv
            edges.append((gu, gpu, gv, gpv))
        borders.append(
            (
                tuple(relocate(d, w) for w in comp.border1),
                tuple(relocate(d, w) for w in comp.border2),
            )
        )
    border_degs = tuple(comp.degrees[w] for w in comp.border1)
    for q, w in enumerate(comp.border2):
        if comp.degrees[w] != border_degs[q]:
            raise AssertionError("corresponding last-layer copies must have equal degrees")
    return Gadget(mu, k, 1 + 4 * size, edges, tuple(borders), border_degs)


@dataclass(frozen=True)
class JInstance:
    graph: PortLabeledGraph
    mu: int
    k: int
    z: int
    y: tuple[int, ...] | None  # None for the bare template
    gadget_n: int
    rhos: tuple[int, ...]
    # gadget-local border ids per component/copy; add gadget offset to use
    borders: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    border_degs: tuple[int, ...]

    @property
    def gadget_count(self) -> int:
        return 1 << self.z

    def gadget_of(self, v: int) -> int:
        return v // self.gadget_n

    def component_of(self, v: int) -> int:
        """Build-time component index (0..3, `COMPONENTS` order); center = -1."""
        local = v % self.gadget_n
        if local == 0:
            return -1
        return (local - 1) // ((self.gadget_n - 1) // 4)

    def border_node(self, gadget: int, component: int, copy: int, q: int) -> int:
        return gadget * self.gadget_n + self.borders[component][copy - 1][q - 1]

    def sidecar(self) -> dict:
        return {
            "family": "j",
            "mu": self.mu,
            "k": self.k,
            "z": self.z,
            "y": "".join(map(str, self.y)) if self.y is not None else None,
            "gadget_count": self.gadget_count,
            "gadget_size": self.gadget_n,
            "rhos": list(self.rhos),
            "border_locals": {
                COMPONENTS[d]: {
                    "copy1": list(self.borders[d][0]),
                    "copy2": list(self.borders[d][1]),
                }
                for d in range(4)
            },
            "border_degrees_in_component": list(self.border_degs),
        }

    def sidecar_json(self) -> str:
        return json.dumps(self.sidecar(), indent=2, sort_keys=True) + "\n"


def _bit(value: int, q: int, z: int) -> int:
    """q-th bit (1-based, most significant first) of the z-bit representation."""
    return (value >> (z - q)) & 1


def build_template(mu: int, k: int, max_nodes: int = SIZE_GUARD) -> JInstance:
    _check_params(mu, k)
    z = border_width(mu, k)
    gadget = build_gadget(mu, k)
    count = 1 << z
    if count * gadget.n > max_nodes:
        raise SizeGuardError(
            f"template ({mu},{k}) needs {count}*{gadget.n} nodes, over {max_nodes}"
        )
    b = GraphBuilder()
    b.add_nodes(count * gadget.n)
    for i in range(count):
        off = i * gadget.n
        for u, pu, v, pv in gadget.edges:
            b.add_edge(u + off, pu, v + off, pv)

    def border(i: int, d: int, copy: int, q: int) -> int:
        return i * gadget.n + gadget.borders[d][copy - 1][q - 1]

    L, T, R, B = range(4)
    for i in range(1, count):
        for q in range(1, z + 1):
            if not _bit(i, q, z):
                continue
            port = gadget.border_degs[q - 1]
            b.add_edge(border(i - 1, B, 1, q), port, border(i - 1, B, 2, q), port)
            b.add_edge(border(i, T, 1, q), port, border(i, T, 2, q), port)
            b.add_edge(border(i - 1, R, 1, q), port, border(i, L, 2, q), port)
            b.add_edge(border(i - 1, R, 2, q), port, border(i, L, 1, q), port)

    rhos = tuple(i * gadget.n for i in range(count))
    return JInstance(
        b.build(), mu, k, z, None, gadget.n, rhos, gadget.borders, gadget.border_degs
    )


def build_instance(
    mu: int, k: int, y, max_nodes: int = SIZE_GUARD
) -> JInstance:
    """J_Y for a bit sequence y of length 2**(z-1)."""
    z = border_width(mu, k)
    y = tuple(int(bit) for bit in y)
    if len(y) != 1 << (z - 1) or any(bit not in (0, 1) for bit in y):
        raise BadSequenceError(f"y must be {1 << (z - 1)} bits")
    template = build_template(mu, k, max_nodes=max_nodes)
    b = GraphBuilder()
    b.merge_graph(template.graph)
    count = 1 << z
    for i, bit in enumerate(y):
        if not bit:
            continue
        for x in range(2 * mu, 3 * mu):
            b.swap_ports(template.rhos[i], x, x + mu)
        for x in range(mu):
            b.swap_ports(template.rhos[count - 1 - i], x, x + mu)
    return JInstance(
        b.build(),
        mu,
        k,
        z,
        y,
        template.gadget_n,
        template.rhos,
        template.borders,
        template.border_degs,
    )


def recover_instance(g: PortLabeledGraph, mu: int, k: int) -> JInstance:
    """Identify g as a generated instance and read off its bit sequence."""
    template = build_template(mu, k)
    tg = template.graph
    if g.n != tg.n:
        raise NotAFamilyInstanceError(f"node count {g.n} != template {tg.n}")
    z = template.z
    count = 1 << z
    rho_set = set(template.rhos)
    for v in range(g.n):
        if v in rho_set:
            continue
        for (ua, qa), (ub, qb) in zip(g.adjacency[v], tg.adjacency[v]):
            if ua != ub or (qa != qb and ub not in rho_set):
                raise NotAFamilyInstanceError(f"node {v} differs from the template")

    def swap_state(rho: int, base: int) -> bool:
        row_g, row_t = g.adjacency[rho], tg.adjacency[rho]
        if all(row_g[base + x] == row_t[base + x] for x in range(2 * mu)):
            return False
        ok = all(
            row_g[base + x] == row_t[base + mu + x]
            and row_g[base + mu + x] == row_t[base + x]
            for x in range(mu)
        )
        if not ok:
            raise NotAFamilyInstanceError(f"center {rho}: ports are not a clean range swap")
        return True

    y_bits = []
    for i in range(count // 2):
        low = swap_state(template.rhos[i], 2 * mu)
        high = swap_state(template.rhos[count - 1 - i], 0)
        if low != high:
            raise NotAFamilyInstanceError(f"bit {i}: the two mirrored centers disagree")
        if swap_state(template.rhos[i], 0) or swap_state(template.rhos[count - 1 - i], 2 * mu):
            raise NotAFamilyInstanceError(f"bit {i}: swap on the wrong port ranges")
        y_bits.append(1 if low else 0)
    return JInstance(
        g,
        mu,
        k,
        z,
        tuple(y_bits),
        template.gadget_n,
        template.rhos,
        template.borders,
        template.border_degs,
    )


# --------------------------------------------------------------------------
# The k-round map-based complete-port-path algorithm


@dataclass
class JContext:
    inst: JInstance
    dist_rho: list[int]
    # pair sequences of the chain hops center_x -> center_{x-1}, 1-based
    hop_pairs: list[tuple[tuple[int, int], ...] | None]
    hop_nodes: list[list[int] | None]
    hop_pos: list[dict[int, int] | None]
    # suffix[x] = hop x, then hop x-1, ..., then hop 1
    suffix: list[tuple[tuple[int, int], ...]]
    w_value: list[tuple[int, int, int, int]]  # decoded W per gadget and component
    range_of_comp: list[tuple[int, int, int, int]]  # component -> center port range index


def _census(inst: JInstance) -> None:
    g = inst.graph
    four_mu = {v for v in range(g.n) if g.degree(v) == 4 * inst.mu}
    if four_mu != set(inst.rhos):
        raise NotAFamilyInstanceError(
            "degree-4mu nodes are not exactly the gadget centers "
            f"({len(four_mu)} vs {len(inst.rhos)})"
        )


def _lex_shortest_to_source(
    g: PortLabeledGraph, v: int, dist: list[int]
) -> tuple[list[int], tuple[tuple[int, int], ...]]:
    """Lexicographically least shortest path from v to the nearest BFS source."""
    nodes = [v]
    pairs: list[tuple[int, int]] = []
    cur = v
    while dist[cur] > 0:
        target = dist[cur] - 1
        for p, (u, q) in enumerate(g.adjacency[cur]):
            if dist[u] == target:
                pairs.append((p, q))
                nodes.append(u)
                cur = u
                break
        else:
            raise NotAFamilyInstanceError(f"no distance-decreasing port at node {cur}")
    return nodes, tuple(pairs)


def _restricted_lex_shortest(
    g: PortLabeledGraph, start: int, goal: int, allowed: range
) -> tuple[list[int], tuple[tuple[int, int], ...]]:
    """Lex-least shortest start->goal path inside a contiguous id range."""
    dist = {goal: 0}
    frontier = [goal]
    while frontier and start not in dist:
        nxt = []
        for x in frontier:
            for u, _ in g.adjacency[x]:
                if u in allowed and u not in dist:
                    dist[u] = dist[x] + 1
                    nxt.append(u)
        frontier = nxt
    if start not in dist:
        raise NotAFamilyInstanceError(f"no path {start}->{goal} within the gadget pair")
    nodes = [start]
    pairs: list[tuple[int, int]] = []
    cur = start
    while cur != goal:
        for p, (u, q) in enumerate(g.adjacency[cur]):
            if dist.get(u, -1) == dist[cur] - 1:
                pairs.append((p, q))
                nodes.append(u)
                cur = u
                break
        else:
            raise AssertionError("BFS tree must provide a descent")
    return nodes, tuple(pairs)


def _decode_w(inst: JInstance, gadget: int, component: int) -> int:
    g = inst.graph
    value = 0
    for q in range(1, inst.z + 1):
        w1 = inst.border_node(gadget, component, 1, q)
        bump = g.degree(w1) - inst.border_degs[q - 1]
        if bump not in (0, 1):
            raise DecodeAmbiguityError(
                f"border node {w1} degree off by {bump} from its component degree"
            )
        value = (value << 1) | bump
    return value


def make_context(inst: JInstance) -> JContext:
    _census(inst)
    g = inst.graph
    count = inst.gadget_count
    dist_rho = bfs_distances(g, inst.rhos)

    hop_pairs: list = [None] * count
    hop_nodes: list = [None] * count
    hop_pos: list = [None] * count
    suffix: list = [()] * count
    for x in range(1, count):
        allowed = range((x - 1) * inst.gadget_n, (x + 1) * inst.gadget_n)
        nodes, pairs = _restricted_lex_shortest(
            g, inst.rhos[x], inst.rhos[x - 1], allowed
        )
        hop_nodes[x] = nodes
        hop_pairs[x] = pairs
        hop_pos[x] = {node: idx for idx, node in enumerate(nodes)}
        suffix[x] = pairs + suffix[x - 1]

    w_value = [
        tuple(_decode_w(inst, i, d) for d in range(4)) for i in range(count)
    ]

    identity = (0, 1, 2, 3)
    lt_swapped = (1, 0, 2, 3)
    rb_swapped = (0, 1, 3, 2)
    range_of_comp: list[tuple[int, int, int, int]] = []
    y = inst.y if inst.y is not None else tuple([0] * (count // 2))
    for i in range(count):
        if i < count // 2:
            range_of_comp.append(rb_swapped if y[i] else identity)
        else:
            range_of_comp.append(lt_swapped if y[count - 1 - i] else identity)
    return JContext(
        inst, dist_rho, hop_pairs, hop_nodes, hop_pos, suffix, w_value, range_of_comp
    )


def _decode_position(ctx: JContext, c: int, w: int) -> int:
    """Gadget index from (center port range c, decoded integer w)."""
    count = ctx.inst.gadget_count
    if c in (0, 1):
        return w
    return w - 1 if w >= 1 else count - 1


def cppe_output_for(ctx: JContext, v: int):
    """Complete-port-path output of one node after k rounds with the full map."""
    inst = ctx.inst
    g = inst.graph
    x_true = inst.gadget_of(v)
    if g.degree(v) == 4 * inst.mu:
        ws = sorted(ctx.w_value[x_true])
        count = inst.gadget_count
        if ws[0] == ws[1] == 0 and ws[2] == ws[3] == count - 1:
            x = count - 1
        elif ws[0] == ws[1] and ws[2] == ws[3] == ws[0] + 1:
            x = ws[0]
        else:
            raise DecodeAmbiguityError(f"center {v}: degree pattern {ws} undecodable")
        if x != x_true:
            raise DecodeAmbiguityError(f"center {v}: decoded {x}, actual {x_true}")
        return LEADER if x == 0 else ctx.suffix[x]

    comp = inst.component_of(v)
    c = ctx.range_of_comp[x_true][comp]
    w = ctx.w_value[x_true][comp]
    x = _decode_position(ctx, c, w)
    if x != x_true:
        raise DecodeAmbiguityError(f"node {v}: decoded gadget {x}, actual {x_true}")
    nodes, pairs = _lex_shortest_to_source(g, v, ctx.dist_rho)
    if nodes[-1] != inst.rhos[x]:
        raise NotAFamilyInstanceError(f"node {v}: nearest center is not its own")
    if x == 0:
        return pairs
    pos = ctx.hop_pos[x]
    join = next(idx for idx, node in enumerate(nodes) if node in pos)
    own = pairs[:join]
    rest = ctx.hop_pairs[x][pos[nodes[join]] :]
    return own + rest + ctx.suffix[x - 1]


def cppe_map_outputs(inst: JInstance, nodes=None, ctx: JContext | None = None):
    """Outputs of the k-round map-based algorithm.

    With `nodes` given, a dict for just those nodes; otherwise a full list
    (only sensible for instances far below the default size guard).
    """
    if ctx is None:
        ctx = make_context(inst)
    if nodes is None:
        return [cppe_output_for(ctx, v) for v in range(inst.graph.n)]
    return {v: cppe_output_for(ctx, v) for v in sorted(set(nodes))}


def sample_nodes(inst: JInstance, seed: int = 0, fraction: float = 0.01) -> list[int]:
    """Validation sample: all centers, all of gadgets 0, 1 and the last, plus
    a seeded random fraction of everything else."""
    chosen = set(inst.rhos)
    gn, count = inst.gadget_n, inst.gadget_count
    for gadget in (0, 1, count - 1):
        chosen.update(range(gadget * gn, (gadget + 1) * gn))
    rng = random.Random(seed)
    rest = [v for v in range(inst.graph.n) if inst.gadget_of(v) not in (0, 1, count - 1)]
    chosen.update(rng.sample(rest, max(1, int(len(rest) * fraction))))
    return sorted(chosen)


# --------------------------------------------------------------------------
# Structural checks


@dataclass(frozen=True)
class JFamilyReport:
    mu: int
    k: int
    z: int
    component_nodes: int
    ys_checked: int
    validated_nodes: int
    pair_break: dict

    def to_dict(self) -> dict:
        return {
            "family": "j",
            "mu": self.mu,
            "k": self.k,
            "z": self.z,
            "component_nodes": self.component_nodes,
            "ys_checked": self.ys_checked,
            "validated_nodes": self.validated_nodes,
            "pair_break": self.pair_break,
            "ok": True,
        }


def check_component_visibility(mu: int, k: int) -> int:
    """Distance structure of standalone H that the round bounds rest on.

    Returns |H|.  For every node v: (a) some border pair has both copies at
    distance >= k, so v cannot read that bit of the position encoding within
    k-1 rounds; (b) every border pair has at least one copy within distance
    k, and the two copies always carry equal degree bumps, so v can read
    every bit within k rounds; (c) the only pairs further apart than k are
    cross-copy border pairs, and even those are at distance exactly k+1.
    (b)+(c) replace the blanket "everything within distance k", which fails
    precisely at those cross-copy pairs.
    """
    g, comp = component_graph(mu, k)
    z = len(comp.border1)
    border_set = set(comp.border1) | set(comp.border2)
    copy1, copy2 = set(comp.border1), set(comp.border2)
    for v in range(g.n):
        dist = bfs_distances(g, [v])
        if not any(
            dist[comp.border1[q]] >= k and dist[comp.border2[q]] >= k for q in range(z)
        ):
            raise LemmaViolationError(
                f"H({mu},{k}): every border pair is within distance {k - 1} of {v}"
            )
        for q in range(z):
            if min(dist[comp.border1[q]], dist[comp.border2[q]]) > k:
                raise LemmaViolationError(
                    f"H({mu},{k}): border pair {q + 1} invisible at depth {k} from {v}"
                )
        for u in range(g.n):
            if dist[u] <= k:
                continue
            cross_copy = (v in copy1 and u in copy2) or (v in copy2 and u in copy1)
            if dist[u] > k + 1 or not (u in border_set and cross_copy):
                raise LemmaViolationError(
                    f"H({mu},{k}): unexpected far pair {v},{u} at distance {dist[u]}"
                )
    return g.n


def check_template_w_values(inst: JInstance, ctx: JContext) -> None:
    """Decoded per-component integers must match the chain wiring exactly."""
    count = inst.gadget_count
    for i in range(count):
        wl, wt, wr, wb = ctx.w_value[i]
        succ = i + 1 if i + 1 < count else 0
        if not (wl == wt == i and wr == wb == succ):
            raise LemmaViolationError(
                f"gadget {i}: decoded (L,T,R,B)=({wl},{wt},{wr},{wb}), "
                f"expected ({i},{i},{succ},{succ})"
            )


def trace_ports(
    g: PortLabeledGraph, start: int, pairs
) -> tuple[list[int], int | None, int | None]:
    """Follow outgoing ports from start; returns (nodes, revisit step, mismatch step)."""
    nodes = [start]
    seen = {start}
    cur = start
    for step, (p, q) in enumerate(pairs):
        nxt, q_actual = g.adjacency[cur][p]
        mismatch = step if q_actual != q else None
        if nxt in seen:
            return nodes + [nxt], step, mismatch
        seen.add(nxt)
        nodes.append(nxt)
        cur = nxt
        if mismatch is not None:
            return nodes, None, mismatch
    return nodes, None, None


def check_pair_break(
    inst_a: JInstance, inst_b: JInstance, ctx_a: JContext
) -> dict:
    """The two-instance separation at the shared extreme border node.

    The witness node (first border node of the L component of gadget 0) has
    equal depth-k views in both instances, yet the port sequence that walks
    from it to the center of gadget 2**(z-1) in instance a, traced in
    instance b, either revisits a node or never leaves the first half.
    """
    ga, gb = inst_a.graph, inst_b.graph
    va = inst_a.border_node(0, 0, 1, 1)
    vb = inst_b.border_node(0, 0, 1, 1)
    pa, pb = refine_union([ga, gb], inst_a.k)
    if pa.at(inst_a.k)[va] != pb.at(inst_b.k)[vb]:
        raise LemmaViolationError("witness border nodes differ at depth k across instances")

    half = inst_a.gadget_count // 2
    descent_nodes, descent_pairs = _lex_shortest_to_source(ga, va, ctx_a.dist_rho)
    if descent_nodes[-1] != inst_a.rhos[0]:
        raise AssertionError("witness node must descend to the center of gadget 0")
    rightward: list[tuple[int, int]] = list(descent_pairs)
    for x in range(1, half + 1):
        rightward.extend((q, p) for p, q in reversed(ctx_a.hop_pairs[x]))
    witness = tuple(rightward)

    nodes_a, revisit_a, mismatch_a = trace_ports(ga, va, witness)
    if revisit_a is not None or mismatch_a is not None:
        raise LemmaViolationError("witness sequence is not a clean simple path in instance a")
    if inst_a.gadget_of(nodes_a[-1]) != half:
        raise LemmaViolationError("witness sequence does not reach the middle gadget")

    nodes_b, revisit_b, mismatch_b = trace_ports(gb, vb, witness)
    reached_right = any(inst_b.gadget_of(u) >= half for u in nodes_b)
    if revisit_b is None and reached_right:
        raise LemmaViolationError(
            "traced sequence stays simple and reaches the right half in instance b"
        )
    return {
        "witness_node": va,
        "witness_length": len(witness),
        "instance_b_revisit_step": revisit_b,
        "instance_b_pair_mismatch_step": mismatch_b,
        "instance_b_stays_left": not reached_right,
    }


LEMMata = frozenset({"component", "w-values", "rho-sym", "twin", "cppe", "pair"})


def check_lemmas(
    mu: int,
    k: int,
    ys: list | None = None,
    seed: int = 0,
    fraction: float = 0.01,
    max_nodes: int = SIZE_GUARD,
    full_validate: bool = False,
    lemmas: frozenset[str] | None = None,
) -> JFamilyReport:
    """Verify the family's structural claims on concrete instances.

    Component level: every node of H sees all of H within distance k but
    misses some last-layer pair at distance k-1.  Template level: the
    decoded per-component integers match the chain wiring.  Per instance:
    the centers form one full depth-(k-1) class of size 2**z, no view is
    unique at depth k-1 (selection index >= k), and the k-round map
    algorithm's outputs validate on the sampled node set (so with the task
    hierarchy all three path-election indexes equal k).  Finally the
    two-instance separation of `check_pair_break` is verified on the first
    two bit sequences (defaults: all-zeros and 10...0).
    """
    _check_params(mu, k)
    if lemmas is None:
        lemmas = LEMMata
    unknown = lemmas - LEMMata
    if unknown:
        raise ValueError(f"unknown lemma names {sorted(unknown)}; known: {sorted(LEMMata)}")
    z = border_width(mu, k)
    component_nodes = check_component_visibility(mu, k) if "component" in lemmas else 0
    if ys is None:
        half = 1 << (z - 1)
        ys = [tuple([0] * half), tuple([1] + [0] * (half - 1))]
    ys = [tuple(int(b) for b in y) for y in ys]

    if "w-values" in lemmas:
        template = build_template(mu, k, max_nodes=max_nodes)
        check_template_w_values(template, make_context(template))
        if mu >= 3 and template.graph.max_degree != 4 * mu:
            raise LemmaViolationError(
                f"template max degree {template.graph.max_degree} != 4mu"
            )

    validated = 0
    contexts: dict[tuple, tuple[JInstance, JContext]] = {}
    shape = None
    for y in ys:
        inst = build_instance(mu, k, y, max_nodes=max_nodes)
        g = inst.graph
        if shape is None:
            shape = (g.n, g.edge_count)
        elif shape != (g.n, g.edge_count):
            raise LemmaViolationError("instances differ in node/edge counts")
        if "rho-sym" in lemmas or "twin" in lemmas:
            part = refine_classes(g, k - 1)
            ids = part.at(k - 1)
            if "rho-sym" in lemmas:
                rho_class = {ids[r] for r in inst.rhos}
                if len(rho_class) != 1:
                    raise LemmaViolationError(
                        f"J({mu},{k}): centers split at depth {k - 1}"
                    )
                cls = rho_class.pop()
                if sum(1 for c in ids if c == cls) != len(inst.rhos):
                    raise LemmaViolationError("center depth-(k-1) class contains non-centers")
            if "twin" in lemmas and part.singletons(k - 1):
                witness = sorted(part.singletons(k - 1))[0]
                raise LemmaViolationError(f"node {witness} unique at depth {k - 1}")

        if "cppe" in lemmas or "pair" in lemmas:
            ctx = make_context(inst)
            contexts[y] = (inst, ctx)
        if "cppe" in lemmas:
            wanted = (
                list(range(g.n)) if full_validate else sample_nodes(inst, seed, fraction)
            )
            leader = inst.rhos[0]
            for v in wanted:
                out = cppe_output_for(ctx, v)
                if v == leader:
                    if out != LEADER:
                        raise LemmaViolationError("center of gadget 0 did not elect itself")
                    continue
                if out == LEADER:
                    raise LemmaViolationError(f"second leader at node {v}")
                bad = check_path_output(g, v, out, leader, "cppe")
                if bad is not None:
                    raise LemmaViolationError(f"output of node {v} invalid: {bad}")
                validated += 1

    pair_break = {}
    if "pair" in lemmas and len(ys) >= 2:
        (inst_a, ctx_a), (inst_b, _) = contexts[ys[0]], contexts[ys[1]]
        pair_break = check_pair_break(inst_a, inst_b, ctx_a)

    return JFamilyReport(mu, k, z, component_nodes, len(ys), validated, pair_break)
