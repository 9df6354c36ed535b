"""Synchronous LOCAL-model executor with full-information rounds.

Every node starts knowing only its own degree.  In each round every node
sends its entire accumulated knowledge to all neighbors; after k rounds a
node's knowledge is exactly its depth-k augmented view.  Outputs are then
produced by a pure function of (advice, own view), so the executor applies
the output function once per k-equivalence class.

Knowledge is stored hash-consed: one intern id per distinct knowledge tree
per round, which keeps memory linear in the graph instead of exponential in
the round count.  `SimResult.knowledge_view` unfolds an id back into an
explicit `ViewTree` for inspection and cross-checking.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from .graph import PortLabeledGraph
from .views import VIEW_NODE_BUDGET, DepthTooLargeError, ViewTree

ROUND_BUDGET = 10_000


class RoundBudgetExceededError(ValueError):
    pass


@dataclass(frozen=True)
class NodeProgram:
    """k-round node behavior: rounds plus output_fn(advice, depth-k view).

    output_fn must be deterministic; nodes with equal (advice, view) pairs
    always produce equal outputs.
    """

    rounds: int
    output_fn: Callable[[Any, ViewTree], Any]


@dataclass(frozen=True)
class RunTrace:
    """Per-round per-node knowledge digests (intern ids; equal id = equal knowledge)."""

    digests: tuple[tuple[int, ...], ...]

    def to_jsonl(self) -> str:
        lines = []
        for rnd, row in enumerate(self.digests):
            for node, digest in enumerate(row):
                lines.append(json.dumps({"round": rnd, "node": node, "digest": digest}))
        return "\n".join(lines) + "\n"


@dataclass
class SimResult:
    outputs: dict[int, Any]
    trace: RunTrace
    rounds: int
    _tables: list[list[tuple[int, tuple[tuple[int, int], ...]]]] = field(repr=False)

    def knowledge_id(self, v: int) -> int:
        return self.trace.digests[self.rounds][v]

    def knowledge_view(self, v: int, max_nodes: int = VIEW_NODE_BUDGET) -> ViewTree:
        """Unfold node v's final knowledge into an explicit ViewTree."""
        return _unfold(self._tables, self.rounds, self.knowledge_id(v), max_nodes)


def _unfold(
    tables: list[list[tuple[int, tuple[tuple[int, int], ...]]]],
    depth: int,
    kid: int,
    max_nodes: int,
) -> ViewTree:
    budget = max_nodes

    def go(d: int, kid: int) -> tuple:
        nonlocal budget
        budget -= 1
        if budget < 0:
            raise DepthTooLargeError(f"unfolded knowledge exceeds {max_nodes} nodes")
        deg, children = tables[d][kid]
        if d == 0:
            return (deg, ())
        return (deg, tuple((q, go(d - 1, child)) for q, child in children))

    return ViewTree(depth, go(depth, kid))


def run(
    g: PortLabeledGraph,
    program: NodeProgram,
    advice: Any = None,
    nodes: Iterable[int] | None = None,
    max_rounds: int = ROUND_BUDGET,
    max_view_nodes: int = VIEW_NODE_BUDGET,
) -> SimResult:
    """Simulate `program.rounds` full-information rounds, then apply output_fn.

    `nodes` restricts which nodes' outputs are produced (default: all); the
    round simulation itself always covers the whole graph.  Deterministic:
    identical inputs give identical traces and outputs.
    """
    k = program.rounds
    if k < 0:
        raise ValueError("rounds must be >= 0")
    if k > max_rounds:
        raise RoundBudgetExceededError(f"rounds {k} over budget {max_rounds}")
    adjacency = g.adjacency
    n = g.n

    # Round 0: knowledge = own degree.
    intern0: dict[int, int] = {}
    ids = []
    table0: list[tuple[int, tuple[tuple[int, int], ...]]] = []
    for v in range(n):
        deg = len(adjacency[v])
        kid = intern0.get(deg)
        if kid is None:
            kid = len(table0)
            intern0[deg] = kid
            table0.append((deg, ()))
        ids.append(kid)
    tables = [table0]
    digests = [tuple(ids)]

    for _ in range(k):
        prev = ids
        intern: dict[tuple, int] = {}
        table: list[tuple[int, tuple[tuple[int, int], ...]]] = []
        ids = []
        for v in range(n):
            row = adjacency[v]
            key = (len(row), tuple((q, prev[u]) for u, q in row))
            kid = intern.get(key)
            if kid is None:
                kid = len(table)
                intern[key] = kid
                table.append(key)
            ids.append(kid)
        tables.append(table)
        digests.append(tuple(ids))

    wanted = range(n) if nodes is None else sorted(set(nodes))
    rep_for_class: dict[int, int] = {}
    for v in wanted:
        rep_for_class.setdefault(ids[v], v)

    class_output: dict[int, Any] = {}
    for kid, rep in sorted(rep_for_class.items()):
        view = _unfold(tables, k, kid, max_view_nodes)
        class_output[kid] = program.output_fn(advice, view)

    outputs = {v: class_output[ids[v]] for v in wanted}
    return SimResult(outputs=outputs, trace=RunTrace(tuple(digests)), rounds=k, _tables=tables)
