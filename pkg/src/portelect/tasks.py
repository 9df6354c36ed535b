"""The four election tasks: output semantics, validation, and election indexes.

Tasks, weakest to strongest:

* ``s``     one node outputs the leader token, the rest output non-leader.
* ``pe``    non-leaders output the first port of some simple path to the leader.
* ``ppe``   non-leaders output the whole outgoing-port sequence of such a path.
* ``cppe``  non-leaders output the (outgoing, incoming) port pairs of such a path.

The election index of a feasible graph for a task is the least number of
rounds after which a valid output assignment exists that is constant on
depth-k view classes (a k-round deterministic algorithm with a map can
produce exactly those assignments).  `z_index_bruteforce` computes it by
direct search and is meant for small graphs only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

from .graph import PortLabeledGraph
from .views import Partition, refine_classes, stabilized_partition

LEADER = "leader"
NON_LEADER = "non-leader"

TASKS = ("s", "pe", "ppe", "cppe")
TASK_ORDER = {t: i for i, t in enumerate(TASKS)}


class InfeasibleError(ValueError):
    """Leader election is impossible on this graph (some views never separate)."""


class MaxKExceededError(ValueError):
    pass


class BudgetExceededError(ValueError):
    """Search aborted: result unknown (distinct from 'greater than max_k')."""


@dataclass(frozen=True)
class Violation:
    kind: str  # no-leader | multiple-leaders | bad-port | not-simple | wrong-endpoint | port-mismatch | bad-output
    node: int | None = None
    detail: str = ""


@dataclass(frozen=True)
class ElectionIndexReport:
    task: str
    k: int
    leader: int
    outputs: tuple
    expansions: int

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "k": self.k,
            "leader": self.leader,
            "outputs": [_output_json(o) for o in self.outputs],
        }


def _output_json(o: Any) -> Any:
    if isinstance(o, tuple):
        return [list(e) if isinstance(e, tuple) else e for e in o]
    return o


def is_feasible(g: PortLabeledGraph) -> bool:
    """True iff all (infinite) views are distinct: the stabilized partition is discrete."""
    part, depth = stabilized_partition(g)
    return part.num_classes(depth) == g.n


def s_index(g: PortLabeledGraph) -> int:
    """Least h such that some node has a unique depth-h view."""
    part, depth = stabilized_partition(g)
    if part.num_classes(depth) != g.n:
        raise InfeasibleError("graph has coinciding views; no task is solvable")
    for h in range(depth + 1):
        if part.singletons(h):
            return h
    raise AssertionError("discrete stabilized partition must contain a singleton")


class ReachabilityOracle:
    """Answers 'is `anchor` reachable from w when v is removed?' in ~O(log n).

    Built once per (graph, anchor) from a DFS tree rooted at the anchor with
    low-links; v separates w from the anchor iff v is an ancestor of w whose
    child on the w-path has no back edge above v.
    """

    def __init__(self, g: PortLabeledGraph, anchor: int):
        n = g.n
        adjacency = g.adjacency
        parent = [-1] * n
        depth = [0] * n
        tin = [-1] * n
        tout = [0] * n
        low = [0] * n
        order: list[int] = []
        timer = 0
        stack: list[tuple[int, int]] = [(anchor, 0)]
        tin[anchor] = timer
        low[anchor] = timer
        timer += 1
        order.append(anchor)
        while stack:
            v, idx = stack[-1]
            if idx < len(adjacency[v]):
                stack[-1] = (v, idx + 1)
                u = adjacency[v][idx][0]
                if tin[u] == -1:
                    parent[u] = v
                    depth[u] = depth[v] + 1
                    tin[u] = timer
                    low[u] = timer
                    timer += 1
                    order.append(u)
                    stack.append((u, 0))
                elif u != parent[v]:
                    low[v] = min(low[v], tin[u])
            else:
                stack.pop()
                tout[v] = timer
                timer += 1
                if parent[v] != -1:
                    p = parent[v]
                    low[p] = min(low[p], low[v])
        self.anchor = anchor
        self.tin, self.tout, self.low, self.depth = tin, tout, low, depth
        levels = max(1, n.bit_length())
        up = [parent]
        for _ in range(levels - 1):
            prev = up[-1]
            up.append([prev[x] if prev[x] == -1 else prev[prev[x]] for x in range(n)])
        self.up = up

    def _is_ancestor(self, a: int, b: int) -> bool:
        return self.tin[a] <= self.tin[b] and self.tout[b] <= self.tout[a]

    def _ancestor_at_depth(self, w: int, d: int) -> int:
        diff = self.depth[w] - d
        j = 0
        while diff:
            if diff & 1:
                w = self.up[j][w]
            diff >>= 1
            j += 1
        return w

    def reachable_without(self, banned: int, src: int) -> bool:
        """Is the anchor reachable from `src` in the graph minus `banned`?"""
        if src == self.anchor:
            return True
        if banned == src or banned == self.anchor:
            raise ValueError("banned node must differ from src and anchor")
        if not self._is_ancestor(banned, src):
            return True
        child = self._ancestor_at_depth(src, self.depth[banned] + 1)
        return self.low[child] < self.tin[banned]


def reachable_without_naive(
    g: PortLabeledGraph, banned: int, src: int, dst: int
) -> bool:
    """BFS reference for ReachabilityOracle (test oracle, small graphs)."""
    if src == dst:
        return True
    seen = {src}
    frontier = [src]
    while frontier:
        nxt = []
        for x in frontier:
            for u, _ in g.adjacency[x]:
                if u == banned or u in seen:
                    continue
                if u == dst:
                    return True
                seen.add(u)
                nxt.append(u)
        frontier = nxt
    return False


def check_path_output(
    g: PortLabeledGraph, v: int, out: Any, leader: int, task: str
) -> Violation | None:
    """Check one non-leader output against the task semantics; None means valid."""
    if task == "s":
        if out != NON_LEADER:
            return Violation("bad-output", v, f"expected non-leader token, got {out!r}")
        return None
    if task == "pe":
        if not isinstance(out, int) or isinstance(out, bool):
            return Violation("bad-output", v, f"expected a port, got {out!r}")
        if not 0 <= out < g.degree(v):
            return Violation("bad-port", v, f"port {out} out of range (deg={g.degree(v)})")
        w, _ = g.adjacency[v][out]
        if w == leader:
            return None
        oracle = ReachabilityOracle(g, leader)
        if oracle.reachable_without(v, w):
            return None
        return Violation("wrong-endpoint", v, f"no simple path via port {out} reaches the leader")
    # ppe / cppe: trace the walk
    if not isinstance(out, tuple):
        return Violation("bad-output", v, f"expected a sequence, got {out!r}")
    cur = v
    seen = {v}
    for step in out:
        if task == "cppe":
            if not (isinstance(step, tuple) and len(step) == 2):
                return Violation("bad-output", v, f"expected (out,in) pair, got {step!r}")
            p, q = step
        else:
            if not isinstance(step, int) or isinstance(step, bool):
                return Violation("bad-output", v, f"expected a port, got {step!r}")
            p, q = step, None
        if not 0 <= p < g.degree(cur):
            return Violation("bad-port", v, f"port {p} out of range at node {cur}")
        nxt, q_actual = g.adjacency[cur][p]
        if q is not None and q_actual != q:
            return Violation(
                "port-mismatch", v, f"arrived at node {nxt} via port {q_actual}, output said {q}"
            )
        if nxt in seen:
            return Violation("not-simple", v, f"node {nxt} revisited")
        seen.add(nxt)
        cur = nxt
    if cur != leader:
        return Violation("wrong-endpoint", v, f"path ends at {cur}, leader is {leader}")
    return None


def validate_outputs(
    g: PortLabeledGraph, task: str, outputs: Sequence[Any]
) -> Violation | None:
    """Validate one output per node against the task; None means Ok."""
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    if len(outputs) != g.n:
        raise ValueError(f"expected {g.n} outputs, got {len(outputs)}")
    leaders = [v for v in range(g.n) if outputs[v] == LEADER]
    if not leaders:
        return Violation("no-leader")
    if len(leaders) > 1:
        return Violation("multiple-leaders", leaders[1])
    leader = leaders[0]
    if task == "pe":
        # one shared oracle; check_path_output would rebuild it per node
        oracle = ReachabilityOracle(g, leader)
        for v in range(g.n):
            if v == leader:
                continue
            out = outputs[v]
            if not isinstance(out, int) or isinstance(out, bool):
                return Violation("bad-output", v, f"expected a port, got {out!r}")
            if not 0 <= out < g.degree(v):
                return Violation("bad-port", v, f"port {out} out of range (deg={g.degree(v)})")
            w, _ = g.adjacency[v][out]
            if w != leader and not oracle.reachable_without(v, w):
                return Violation(
                    "wrong-endpoint", v, f"no simple path via port {out} reaches the leader"
                )
        return None
    for v in range(g.n):
        if v == leader:
            continue
        bad = check_path_output(g, v, outputs[v], leader, task)
        if bad is not None:
            return bad
    return None


class _Budget:
    __slots__ = ("left",)

    def __init__(self, limit: int):
        self.left = limit

    def spend(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise BudgetExceededError("joint-path search budget exhausted")


def _common_sequence(
    g: PortLabeledGraph,
    members: list[int],
    leader: int,
    pairs: bool,
    max_len: int,
    budget: _Budget,
) -> tuple | None:
    """One output sequence tracing every member to the leader simultaneously.

    Depth-first over joint states, ports tried in increasing order, so the
    first hit is the lexicographically least common sequence.
    """
    adjacency = g.adjacency

    def extend(positions: tuple[int, ...], visited: tuple[frozenset, ...], depth: int):
        if depth >= max_len:
            return None
        budget.spend()
        min_deg = min(len(adjacency[x]) for x in positions)
        for p in range(min_deg):
            steps = [adjacency[x][p] for x in positions]
            if pairs:
                q = steps[0][1]
                if any(s[1] != q for s in steps):
                    continue
                token = (p, q)
            else:
                token = p
            nxts = [s[0] for s in steps]
            hits = sum(1 for x in nxts if x == leader)
            if hits == len(nxts):
                return (token,)
            if hits:
                continue  # leader may only be the common final endpoint
            if any(x in vis for x, vis in zip(nxts, visited)):
                continue
            tail = extend(
                tuple(nxts),
                tuple(vis | {x} for x, vis in zip(nxts, visited)),
                depth + 1,
            )
            if tail is not None:
                return (token,) + tail
        return None

    return extend(tuple(members), tuple(frozenset({m}) for m in members), 0)


def z_index_bruteforce(
    g: PortLabeledGraph,
    task: str,
    max_k: int | None = None,
    budget: int = 5_000_000,
) -> ElectionIndexReport:
    """Exact election index by search over (round count, leader, class outputs).

    Intended for small graphs (roughly n <= 12 for ppe/cppe, n <= 30 for
    s/pe).  Deterministic: least k, then least leader id, then lexicographic
    outputs.
    """
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    base = s_index(g)  # raises InfeasibleError
    if max_k is None:
        max_k = max(base, g.n - 1)
    if max_k < base:
        raise MaxKExceededError(f"max_k={max_k} below the depth-{base} selection bound")
    part = refine_classes(g, max_k)
    counter = _Budget(budget)

    for h in range(base, max_k + 1):
        singles = part.singletons(h)
        if not singles:
            continue
        groups = part.classes_at(h)
        for leader in sorted(singles):
            assignment = _try_leader(g, task, leader, groups, part, h, counter)
            if assignment is not None:
                expansions = budget - counter.left
                return ElectionIndexReport(task, h, leader, tuple(assignment), expansions)
    raise MaxKExceededError(f"task {task} unsolved up to k={max_k}")


def _try_leader(
    g: PortLabeledGraph,
    task: str,
    leader: int,
    groups: dict[int, list[int]],
    part: Partition,
    h: int,
    counter: _Budget,
) -> list | None:
    outputs: list[Any] = [None] * g.n
    outputs[leader] = LEADER
    leader_class = part.at(h)[leader]
    if task == "s":
        for v in range(g.n):
            if v != leader:
                outputs[v] = NON_LEADER
        return outputs
    oracle = ReachabilityOracle(g, leader) if task == "pe" else None
    for cid in sorted(groups):
        if cid == leader_class:
            continue
        members = groups[cid]
        if task == "pe":
            deg = g.degree(members[0])
            choice = None
            for p in range(deg):
                ok = True
                for m in members:
                    w, _ = g.adjacency[m][p]
                    if w != leader and not oracle.reachable_without(m, w):
                        ok = False
                        break
                if ok:
                    choice = p
                    break
            if choice is None:
                return None
            for m in members:
                outputs[m] = choice
        else:
            seq = _common_sequence(
                g, members, leader, pairs=(task == "cppe"), max_len=g.n - 1, budget=counter
            )
            if seq is None:
                return None
            for m in members:
                outputs[m] = seq
    return outputs
