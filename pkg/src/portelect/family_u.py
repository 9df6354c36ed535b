"""Port-election family: every decorated tree once, on one long cycle.

The template places all `tree_class_size(delta, k)` attached trees of both
variants on a cycle through their roots, then hangs, for every index j, two
extra variant-1 copies (the "heavy" trees) off the cycle via length-(k+1)
connecting paths, and gives each heavy root delta-1 pendant paths of length
k+1.  An instance is the template with, per index j, the ports delta-1 and
delta-1+s_j exchanged at both heavy roots, for a sequence sigma with entries
in 1..delta-1.

The port swap is invisible in any depth-k view (all delta paths hanging off
a heavy root look alike for k steps) yet changes which port starts the
unique simple path from the heavy root to the cycle, which is exactly what
the port-election task asks of it.  `pe_map_outputs` is the k-round
algorithm that solves the task given the full map.

Node numbering: for j = 1, 2, ...: tree (j,1), tree (j,2), heavy trees
(j,1,1) and (j,1,2), then that j's connecting-path and pendant-path nodes;
roots are the first node of their tree block.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .graph import GraphBuilder, PortLabeledGraph, bfs_distances
from .trees import (
    BadSequenceError,
    LemmaViolationError,
    NotAFamilyInstanceError,
    ParamOutOfRangeError,
    SizeGuardError,
    attached_tree_size,
    emit_attached_tree,
    index_to_sequence,
    leaf_count,
    tree_class_size,
)
from .tasks import LEADER, validate_outputs
from .views import lex_min_view, refine_classes, refine_union

SIZE_GUARD = 2_000_000


def class_size(delta: int, k: int) -> int:
    """(delta-1) ** tree_class_size(delta, k) instances for one (delta, k)."""
    _check_params(delta, k)
    return (delta - 1) ** tree_class_size(delta, k)


def _check_params(delta: int, k: int) -> None:
    if delta < 4:
        raise ParamOutOfRangeError(f"delta must be >= 4, got {delta}")
    if k < 1:
        raise ParamOutOfRangeError(f"k must be >= 1, got {k}")


@dataclass(frozen=True)
class UInstance:
    graph: PortLabeledGraph
    delta: int
    k: int
    sigma: tuple[int, ...] | None  # None for the bare template
    cycle_roots: tuple[int, ...]  # root ids in cycle order (1,1),(1,2),(2,1),...
    heavy_roots: dict[tuple[int, int], int]  # (j, b) -> id of heavy root b of index j

    @property
    def tree_count(self) -> int:
        return len(self.cycle_roots) // 2

    def cycle_root(self, j: int, b: int) -> int:
        return self.cycle_roots[2 * (j - 1) + (b - 1)]

    def sidecar(self) -> dict:
        return {
            "family": "u",
            "delta": self.delta,
            "k": self.k,
            "sigma": list(self.sigma) if self.sigma is not None else None,
            "cycle_roots": list(self.cycle_roots),
            "heavy_roots": {f"{j},{b}": v for (j, b), v in sorted(self.heavy_roots.items())},
        }

    def sidecar_json(self) -> str:
        return json.dumps(self.sidecar(), indent=2, sort_keys=True) + "\n"


def build_template(delta: int, k: int, max_nodes: int = SIZE_GUARD) -> UInstance:
    _check_params(delta, k)
    count = tree_class_size(delta, k)
    worst_tree = attached_tree_size(delta, k, tuple([delta - 1] * leaf_count(delta, k)))
    estimate = count * (4 * worst_tree + 2 * k + 2 * (delta - 1) * (k + 1))
    if estimate > max_nodes:
        raise SizeGuardError(f"template ({delta},{k}) may exceed {max_nodes} nodes")

    b = GraphBuilder()
    cycle_roots: list[int] = []
    heavy_roots: dict[tuple[int, int], int] = {}
    for j in range(1, count + 1):
        xs = index_to_sequence(delta, k, j)
        for variant in (1, 2):
            cycle_roots.append(emit_attached_tree(b, delta, k, xs, variant).root)
        for copy in (1, 2):
            heavy_roots[(j, copy)] = emit_attached_tree(b, delta, k, xs, 1).root

    length = len(cycle_roots)
    for t in range(length):
        b.add_edge(cycle_roots[t], delta + 1, cycle_roots[(t + 1) % length], delta - 1)

    for j in range(1, count + 1):
        for copy in (1, 2):
            anchor = cycle_roots[2 * (j - 1) + (copy - 1)]
            heavy = heavy_roots[(j, copy)]
            path = [b.add_node() for _ in range(k)]
            prev, prev_port = anchor, delta
            for node in path:
                b.add_edge(prev, prev_port, node, 1)
                prev, prev_port = node, 0
            b.add_edge(prev, prev_port, heavy, delta - 1)
            for t in range(delta - 1):
                tip = [b.add_node() for _ in range(k + 1)]
                b.add_edge(heavy, delta + t, tip[0], 0)
                for s in range(k):
                    b.add_edge(tip[s], 1, tip[s + 1], 0)

    return UInstance(b.build(), delta, k, None, tuple(cycle_roots), heavy_roots)


def build_instance(
    delta: int, k: int, sigma: tuple[int, ...], max_nodes: int = SIZE_GUARD
) -> UInstance:
    count = tree_class_size(delta, k)
    if len(sigma) != count or any(not 1 <= s <= delta - 1 for s in sigma):
        raise BadSequenceError(
            f"sigma needs {count} entries in 1..{delta - 1}, got {len(sigma)}"
        )
    template = build_template(delta, k, max_nodes=max_nodes)
    b = GraphBuilder()
    b.merge_graph(template.graph)
    for j, s in enumerate(sigma, start=1):
        for copy in (1, 2):
            b.swap_ports(template.heavy_roots[(j, copy)], delta - 1, delta - 1 + s)
    return UInstance(
        b.build(), delta, k, tuple(sigma), template.cycle_roots, template.heavy_roots
    )


@dataclass
class UContext:
    """Precomputed map-side state for the k-round port-election algorithm."""

    inst: UInstance
    ids_k: tuple[int, ...]  # depth-k view class per node
    r_min: int  # cycle root with the lexicographically least depth-k view
    dist_cyc: list[int]  # distance to the nearest cycle root
    dist_heavy: list[int]  # distance to the nearest heavy root
    heavy_match: dict[int, int]  # depth-k class -> least heavy root in it


def _census_check(inst: UInstance) -> None:
    g, delta = inst.graph, inst.delta
    medium = [v for v in range(g.n) if g.degree(v) == delta + 2]
    heavy = [v for v in range(g.n) if g.degree(v) == 2 * delta - 1]
    if g.max_degree != 2 * delta - 1:
        raise NotAFamilyInstanceError(f"max degree {g.max_degree} != {2 * delta - 1}")
    if sorted(medium) != sorted(inst.cycle_roots):
        raise NotAFamilyInstanceError("degree-(delta+2) nodes are not exactly the cycle roots")
    if sorted(heavy) != sorted(inst.heavy_roots.values()):
        raise NotAFamilyInstanceError("degree-(2delta-1) nodes are not exactly the heavy roots")


def make_context(inst: UInstance) -> UContext:
    _census_check(inst)
    g, k = inst.graph, inst.k
    part = refine_classes(g, k)
    ids_k = part.at(k)
    r_min = lex_min_view(g, inst.cycle_roots, k)
    dist_cyc = bfs_distances(g, inst.cycle_roots)
    dist_heavy = bfs_distances(g, inst.heavy_roots.values())
    heavy_match: dict[int, int] = {}
    for h in sorted(inst.heavy_roots.values()):
        heavy_match.setdefault(ids_k[h], h)
    return UContext(inst, ids_k, r_min, dist_cyc, dist_heavy, heavy_match)


def _first_port_decreasing(g: PortLabeledGraph, v: int, dist: list[int]) -> int:
    """Least port whose edge steps one unit closer per `dist` (lex-least shortest path)."""
    target = dist[v] - 1
    for p, (u, _) in enumerate(g.adjacency[v]):
        if dist[u] == target:
            return p
    raise NotAFamilyInstanceError(f"node {v} has no distance-decreasing port")


def pe_output_for(ctx: UContext, v: int):
    """Port-election output of one node after k rounds with the full map."""
    g, delta, k = ctx.inst.graph, ctx.inst.delta, ctx.inst.k
    deg = g.degree(v)
    if deg == 1:
        return 0
    if deg == delta + 2:
        return LEADER if ctx.ids_k[v] == ctx.ids_k[ctx.r_min] else delta + 1
    if deg == 2 * delta - 1:
        match = ctx.heavy_match.get(ctx.ids_k[v])
        if match is None:
            raise NotAFamilyInstanceError(f"heavy node {v} matches no map node")
        return _first_port_decreasing(g, match, ctx.dist_cyc)
    if 0 <= ctx.dist_cyc[v] <= k:
        return _first_port_decreasing(g, v, ctx.dist_cyc)
    if 0 <= ctx.dist_heavy[v] <= k:
        return _first_port_decreasing(g, v, ctx.dist_heavy)
    raise NotAFamilyInstanceError(f"node {v} sees neither a cycle nor a heavy root")


def pe_map_outputs(inst: UInstance, nodes=None) -> list:
    """Outputs of the k-round map-based port-election algorithm, per node.

    With `nodes` given, returns a dict for just those nodes.
    """
    ctx = make_context(inst)
    if nodes is None:
        return [pe_output_for(ctx, v) for v in range(inst.graph.n)]
    return {v: pe_output_for(ctx, v) for v in sorted(set(nodes))}


def recover_instance(g: PortLabeledGraph, delta: int, k: int) -> UInstance:
    """Identify g as a generated instance and read off its swap sequence.

    The generator's node numbering does not depend on sigma, so g must match
    the regenerated template up to the per-index port swaps at heavy roots.
    """
    template = build_template(delta, k)
    if g.n != template.graph.n:
        raise NotAFamilyInstanceError(f"node count {g.n} != template {template.graph.n}")
    swapped: dict[int, set[tuple[int, int]]] = {}
    heavy_ids = set(template.heavy_roots.values())
    for v in range(g.n):
        row_g, row_t = g.adjacency[v], template.graph.adjacency[v]
        if row_g == row_t:
            continue
        if v not in heavy_ids:
            # mismatches may only be reciprocal-port updates at swap targets
            for (ug, qg), (ut, qt) in zip(row_g, row_t):
                if ug != ut or (qg != qt and ut not in heavy_ids):
                    raise NotAFamilyInstanceError(f"node {v} differs from the template")
            continue
        diffs = [p for p, (eg, et) in enumerate(zip(row_g, row_t)) if eg != et]
        if len(diffs) != 2 or diffs[0] != delta - 1:
            raise NotAFamilyInstanceError(f"heavy node {v}: unexpected port changes {diffs}")
        s = diffs[1] - (delta - 1)
        if not 1 <= s <= delta - 1:
            raise NotAFamilyInstanceError(f"heavy node {v}: swap offset {s} out of range")
        if row_g[delta - 1] != row_t[diffs[1]] or row_g[diffs[1]] != row_t[delta - 1]:
            raise NotAFamilyInstanceError(f"heavy node {v}: ports not a clean swap")
        swapped.setdefault(v, set()).add((delta - 1, s))
    sigma = []
    for j in range(1, template.tree_count + 1):
        s_vals = set()
        for copy in (1, 2):
            hv = template.heavy_roots[(j, copy)]
            marks = swapped.get(hv, set())
            if len(marks) != 1:
                raise NotAFamilyInstanceError(f"heavy root {hv}: no single swap found")
            s_vals.add(next(iter(marks))[1])
        if len(s_vals) != 1:
            raise NotAFamilyInstanceError(f"index {j}: the two heavy roots disagree")
        sigma.append(s_vals.pop())
    inst = UInstance(
        g, delta, k, tuple(sigma), template.cycle_roots, template.heavy_roots
    )
    _census_check(inst)
    return inst


@dataclass(frozen=True)
class UFamilyReport:
    delta: int
    k: int
    sigmas_checked: int
    fooling_pairs: tuple
    elected: dict

    def to_dict(self) -> dict:
        return {
            "family": "u",
            "delta": self.delta,
            "k": self.k,
            "sigmas_checked": self.sigmas_checked,
            "fooling_pairs": [
                {"coordinate": j, "ports": list(ports)} for j, ports in self.fooling_pairs
            ],
            "elected": {str(k_): v for k_, v in self.elected.items()},
            "ok": True,
        }


def _subtrees_identical(g: PortLabeledGraph, a: int, b: int, delta: int) -> bool:
    """Do the subtrees hanging off port delta at nodes a and b match port-for-port?"""
    (na, qa), (nb, qb) = g.adjacency[a][delta], g.adjacency[b][delta]
    stack = [(na, qa, a, nb, qb, b)]
    while stack:
        x, qx, back_x, y, qy, back_y = stack.pop()
        if qx != qy or g.degree(x) != g.degree(y):
            return False
        for p in range(g.degree(x)):
            (ux, wx), (uy, wy) = g.adjacency[x][p], g.adjacency[y][p]
            if (ux == back_x) != (uy == back_y):
                return False
            if ux == back_x:
                if wx != wy:
                    return False
                continue
            stack.append((ux, wx, x, uy, wy, y))
    return True


LEMMata = frozenset(
    {"census", "cycle-class", "twin", "singleton-k", "heavy-pair", "subtrees", "pe", "fooling"}
)


def check_lemmas(
    delta: int,
    k: int,
    sigmas: list[tuple[int, ...]] | None = None,
    fooling_coordinates: list[int] | None = None,
    max_nodes: int = SIZE_GUARD,
    validate: bool = True,
    lemmas: frozenset[str] | None = None,
) -> UFamilyReport:
    """Verify the family's structural claims on concrete instances.

    Per instance: cycle roots share one class at depth k-1; no depth-(k-1)
    view is unique anywhere (so the selection index is >= k); every cycle
    root is a depth-k singleton; the two heavy roots of each index have
    equal depth-k views; the two heavy subtrees are port-identical; the
    k-round map algorithm's outputs validate for port election and elect a
    cycle root (so the selection and port-election indexes are exactly k).
    Per fooling coordinate j: the all-1s instance and its one-coordinate
    variant give the heavy root identical depth-k views across the two
    graphs while requiring different output ports.
    """
    _check_params(delta, k)
    if lemmas is None:
        lemmas = LEMMata
    unknown = lemmas - LEMMata
    if unknown:
        raise ValueError(f"unknown lemma names {sorted(unknown)}; known: {sorted(LEMMata)}")
    count = tree_class_size(delta, k)
    if sigmas is None:
        sigmas = [tuple([1] * count), tuple([2] * count)]
    if fooling_coordinates is None:
        fooling_coordinates = [min(3, count)]

    elected: dict[tuple[int, ...], int] = {}
    for sigma in sigmas:
        inst = build_instance(delta, k, tuple(sigma), max_nodes=max_nodes)
        g = inst.graph
        if "census" in lemmas:
            _census_check(inst)
        part = refine_classes(g, k)
        ids_k, ids_k1 = part.at(k), part.at(k - 1)
        if "cycle-class" in lemmas and len({ids_k1[r] for r in inst.cycle_roots}) != 1:
            raise LemmaViolationError(f"U({delta},{k},{sigma}): cycle roots split at depth {k - 1}")
        if "twin" in lemmas and part.singletons(k - 1):
            witness = sorted(part.singletons(k - 1))[0]
            raise LemmaViolationError(
                f"U({delta},{k},{sigma}): node {witness} unique at depth {k - 1}"
            )
        if "singleton-k" in lemmas:
            singles_k = part.singletons(k)
            for r in inst.cycle_roots:
                if r not in singles_k:
                    raise LemmaViolationError(
                        f"U({delta},{k},{sigma}): cycle root {r} not unique at depth {k}"
                    )
        for j in range(1, count + 1):
            if "heavy-pair" in lemmas:
                h1, h2 = inst.heavy_roots[(j, 1)], inst.heavy_roots[(j, 2)]
                if ids_k[h1] != ids_k[h2]:
                    raise LemmaViolationError(
                        f"U({delta},{k},{sigma}): heavy roots of index {j} differ at depth {k}"
                    )
            if "subtrees" in lemmas:
                r1, r2 = inst.cycle_root(j, 1), inst.cycle_root(j, 2)
                if not _subtrees_identical(g, r1, r2, delta):
                    raise LemmaViolationError(
                        f"U({delta},{k},{sigma}): heavy subtrees of index {j} not identical"
                    )
        if "pe" in lemmas:
            ctx = make_context(inst)
            outputs = [pe_output_for(ctx, v) for v in range(g.n)]
            if ctx.r_min not in inst.cycle_roots:
                raise LemmaViolationError("elected node is not a cycle root")
            if validate:
                bad = validate_outputs(g, "pe", outputs)
                if bad is not None:
                    raise LemmaViolationError(f"U({delta},{k},{sigma}): pe outputs invalid: {bad}")
            elected[tuple(sigma)] = ctx.r_min

    fooling_results = []
    if "fooling" not in lemmas:
        fooling_coordinates = []
    for j in fooling_coordinates:
        if not 1 <= j <= count:
            raise ParamOutOfRangeError(f"fooling coordinate {j} outside 1..{count}")
        sigma_a = tuple([1] * count)
        sigma_b = tuple(2 if t == j else 1 for t in range(1, count + 1))
        inst_a = build_instance(delta, k, sigma_a, max_nodes=max_nodes)
        inst_b = build_instance(delta, k, sigma_b, max_nodes=max_nodes)
        pa, pb = refine_union([inst_a.graph, inst_b.graph], k)
        hv = inst_a.heavy_roots[(j, 1)]
        if pa.at(k)[hv] != pb.at(k)[inst_b.heavy_roots[(j, 1)]]:
            raise LemmaViolationError(
                f"fooling pair at {j}: heavy-root views differ across instances"
            )
        out_a = pe_output_for(make_context(inst_a), hv)
        out_b = pe_output_for(make_context(inst_b), inst_b.heavy_roots[(j, 1)])
        if out_a == out_b:
            raise LemmaViolationError(
                f"fooling pair at {j}: required ports coincide ({out_a})"
            )
        if {out_a, out_b} != {delta, delta + 1}:
            # all-1s swaps delta-1 with delta; the variant swaps with delta+1
            raise LemmaViolationError(
                f"fooling pair at {j}: ports {out_a},{out_b} not the expected swap targets"
            )
        fooling_results.append((j, (out_a, out_b)))

    return UFamilyReport(delta, k, len(sigmas), tuple(fooling_results), elected)
