"""Selection lower-bound family: one decorated tree per cycle node.

Instance i (1-based, up to `class_size(delta, k)`) hangs 4i-1 attached trees
off an odd cycle: two variant-1 copies for every sequence index j <= i, two
variant-2 copies for every j < i, and a single variant-2 copy for j = i.
That lone unpaired tree makes its root the only node with a unique depth-k
view, while every view at depth k-1 still has a twin, so the selection index
of every instance is exactly k.  Instances agree with each other on all
shared tree roots up to depth k, which is what forces large advice.

Node numbering: cycle nodes first (cycle position m-1 for m = 1..4i-1), then
the trees in cycle-attachment order, each laid out root-first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .graph import GraphBuilder, PortLabeledGraph
from .trees import (
    AttachedTree,
    LemmaViolationError,
    ParamOutOfRangeError,
    SizeGuardError,
    attached_tree_size,
    emit_attached_tree,
    index_to_sequence,
    leaf_count,
    tree_class_size,
)
from .views import refine_classes, refine_union

SIZE_GUARD = 2_000_000


def class_size(delta: int, k: int) -> int:
    """Number of instances for (delta, k): (delta-1)**((delta-2)(delta-1)**(k-1))."""
    return tree_class_size(delta, k)


@dataclass(frozen=True)
class GInstance:
    graph: PortLabeledGraph
    delta: int
    k: int
    i: int
    cycle: tuple[int, ...]  # ids of cycle positions 1..4i-1
    # (j, variant, copy) -> root node id; copy is 1 or 2
    roots: dict[tuple[int, int, int], int]
    # tail-path node ids of the unpaired variant-2 tree, root side first
    special_tail: tuple[int, ...]

    @property
    def special_root(self) -> int:
        """Root of the single unpaired variant-2 tree."""
        return self.roots[(self.i, 2, 1)]

    def sidecar(self) -> dict:
        return {
            "family": "g",
            "delta": self.delta,
            "k": self.k,
            "i": self.i,
            "cycle": list(self.cycle),
            "roots": {f"{j},{b},{c}": node for (j, b, c), node in sorted(self.roots.items())},
            "special_root": self.special_root,
            "special_tail": list(self.special_tail),
        }

    def sidecar_json(self) -> str:
        return json.dumps(self.sidecar(), indent=2, sort_keys=True) + "\n"


def _attachment_plan(i: int) -> list[tuple[int, int, int]]:
    """For cycle positions m = 1..4i-1: which (j, variant, copy) attaches there."""
    plan: list[tuple[int, int, int]] = []
    for m in range(1, 4 * i):
        r = m % 4
        if r == 1:
            plan.append(((m + 3) // 4, 1, 1))
        elif r == 2:
            plan.append(((m + 2) // 4, 1, 2))
        elif r == 3:
            plan.append(((m + 1) // 4, 2, 1))
        else:
            plan.append((m // 4, 2, 2))
    return plan


def build_instance(
    delta: int, k: int, i: int, max_nodes: int = SIZE_GUARD
) -> GInstance:
    total = class_size(delta, k)
    if not 1 <= i <= total:
        raise ParamOutOfRangeError(f"instance index {i} outside 1..{total}")
    worst_tree = attached_tree_size(delta, k, tuple([delta - 1] * leaf_count(delta, k)))
    if (4 * i - 1) * (worst_tree + 1) > max_nodes:
        raise SizeGuardError(
            f"instance ({delta},{k},{i}) may exceed {max_nodes} nodes"
        )

    b = GraphBuilder()
    cycle = list(b.add_nodes(4 * i - 1))
    length = len(cycle)
    for m in range(length):
        b.add_edge(cycle[m], 0, cycle[(m + 1) % length], 1)

    roots: dict[tuple[int, int, int], int] = {}
    special_tail: tuple[int, ...] = ()
    for m, (j, variant, copy) in enumerate(_attachment_plan(i), start=1):
        xs = index_to_sequence(delta, k, j)
        info: AttachedTree = emit_attached_tree(b, delta, k, xs, variant)
        roots[(j, variant, copy)] = info.root
        if (j, variant, copy) == (i, 2, 1):
            special_tail = info.tail
        b.add_edge(cycle[m - 1], 2, info.root, delta - 1)

    return GInstance(b.build(), delta, k, i, tuple(cycle), roots, special_tail)


@dataclass(frozen=True)
class GFamilyReport:
    delta: int
    k: int
    indices: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]
    instances_checked: int
    cross_checks: int
    # i=1 only: depth-k singletons beyond the special root (its tail nodes)
    extra_singletons: dict[int, tuple[int, ...]]

    def to_dict(self) -> dict:
        return {
            "family": "g",
            "delta": self.delta,
            "k": self.k,
            "indices": list(self.indices),
            "pairs": [list(p) for p in self.pairs],
            "instances_checked": self.instances_checked,
            "cross_checks": self.cross_checks,
            "extra_singletons": {str(i): list(v) for i, v in self.extra_singletons.items()},
            "ok": True,
        }


LEMMata = frozenset({"census", "singletons", "cross"})


def check_lemmas(
    delta: int,
    k: int,
    indices: list[int] | None = None,
    pairs: list[tuple[int, int]] | None = None,
    max_nodes: int = SIZE_GUARD,
    lemmas: frozenset[str] | None = None,
) -> GFamilyReport:
    """Verify the family's structural claims on concrete instances.

    Per instance: the unpaired variant-2 root is the only depth-k singleton,
    no depth-(k-1) singleton exists (so the selection index is exactly k),
    duplicated tree roots are depth-k twins, all cycle nodes share one
    depth-k class, degrees are as constructed.  Per (alpha, beta) pair with
    alpha <= beta: shared roots and cycle nodes have equal depth-k views
    across the two instances.  Raises LemmaViolationError with a witness.

    Instance 1 is a known counterexample to the two singleton claims: it is
    the only instance that contains a single variant-2 tree overall, so that
    tree's tail nodes (which can see the swapped port pair within distance
    k-1) have no twin anywhere.  For it, the checker instead verifies that
    the extra depth-k singletons are exactly tail nodes of the unpaired tree
    and that any depth-(k-1) singletons are among them; the observed extras
    are reported in `extra_singletons`.  From instance 2 on the exact claims
    are enforced.
    """
    if lemmas is None:
        lemmas = LEMMata
    unknown = lemmas - LEMMata
    if unknown:
        raise ValueError(f"unknown lemma names {sorted(unknown)}; known: {sorted(LEMMata)}")
    if indices is None:
        indices = list(range(1, min(class_size(delta, k), 4) + 1))
    built = {i: build_instance(delta, k, i, max_nodes=max_nodes) for i in sorted(set(indices))}
    extra_singletons: dict[int, tuple[int, ...]] = {}

    for i, inst in built.items():
        g = inst.graph
        if "census" in lemmas:
            if g.max_degree != delta:
                raise LemmaViolationError(
                    f"G({delta},{k},{i}): max degree {g.max_degree} != delta"
                )
            for (j, bvar, copy), r in inst.roots.items():
                if g.degree(r) != delta:
                    raise LemmaViolationError(
                        f"G({delta},{k},{i}): root ({j},{bvar},{copy}) degree != delta"
                    )
            for c in inst.cycle:
                if g.degree(c) != 3:
                    raise LemmaViolationError(f"G({delta},{k},{i}): cycle node {c} degree != 3")

        if "singletons" not in lemmas:
            continue
        part = refine_classes(g, k)
        singles_k = part.singletons(k)
        singles_k1 = part.singletons(k - 1)
        if i == 1:
            allowed = {inst.special_root} | set(inst.special_tail)
            if inst.special_root not in singles_k or not singles_k <= allowed:
                raise LemmaViolationError(
                    f"G({delta},{k},1): depth-{k} singletons {sorted(singles_k)} "
                    f"outside special root + its tail {sorted(allowed)}"
                )
            if not singles_k1 <= set(inst.special_tail):
                raise LemmaViolationError(
                    f"G({delta},{k},1): depth-{k - 1} singletons {sorted(singles_k1)} "
                    f"outside the unpaired tail"
                )
            extra_singletons[i] = tuple(sorted(singles_k - {inst.special_root}))
        else:
            if singles_k != {inst.special_root}:
                raise LemmaViolationError(
                    f"G({delta},{k},{i}): depth-{k} singletons {sorted(singles_k)} "
                    f"!= {{{inst.special_root}}}"
                )
            if singles_k1:
                witness = sorted(singles_k1)[0]
                raise LemmaViolationError(
                    f"G({delta},{k},{i}): node {witness} unique already at depth {k - 1}"
                )
        ids_k = part.at(k)
        cycle_classes = {ids_k[c] for c in inst.cycle}
        if len(cycle_classes) != 1:
            raise LemmaViolationError(f"G({delta},{k},{i}): cycle nodes split at depth {k}")
        for (j, bvar, copy), r in inst.roots.items():
            if copy == 2:
                twin = inst.roots[(j, bvar, 1)]
                if ids_k[r] != ids_k[twin]:
                    raise LemmaViolationError(
                        f"G({delta},{k},{i}): copies of root ({j},{bvar}) differ at depth {k}"
                    )

    if pairs is None:
        idx = sorted(built)
        pairs = [(a, bb) for ai, a in enumerate(idx) for bb in idx[ai + 1 :]]
    if "cross" not in lemmas:
        pairs = []
    cross = 0
    for alpha, beta in pairs:
        ga, gb = built[alpha], built[beta]
        pa, pb = refine_union([ga.graph, gb.graph], k)
        for j in range(1, alpha + 1):
            for bvar in (1, 2):
                ra, rb = ga.roots[(j, bvar, 1)], gb.roots[(j, bvar, 1)]
                if pa.at(k)[ra] != pb.at(k)[rb]:
                    raise LemmaViolationError(
                        f"root ({j},{bvar}) depth-{k} views differ between "
                        f"G_{alpha} and G_{beta} ({delta},{k})"
                    )
                cross += 1
        if pa.at(k)[ga.cycle[0]] != pb.at(k)[gb.cycle[0]]:
            raise LemmaViolationError(
                f"cycle views differ between G_{alpha} and G_{beta} ({delta},{k})"
            )
        cross += 1

    return GFamilyReport(
        delta, k, tuple(sorted(built)), tuple(pairs), len(built), cross, extra_singletons
    )
