"""Shared building blocks for the structured graph families.

The first two families hang decorated trees off a cycle.  The base tree of
height k has a root of degree delta-2 (child ports 1..delta-2) and internal
nodes of degree delta (parent port 0, child ports 1..delta-1).  An attached
tree adds, for a sequence X with entries in 1..delta-1, x_i pendant children
at the i-th leaf (leaves ordered by root-to-leaf port sequence), plus a tail
path of length k+1 at the root; variant 2 swaps the two ports at the
next-to-last tail node, which is the one bit of asymmetry the selection
family relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import GraphBuilder, PortLabeledGraph


class ParamOutOfRangeError(ValueError):
    pass


class SizeGuardError(ValueError):
    """Instance would exceed the configured node budget."""


class BadSequenceError(ValueError):
    pass


class LemmaViolationError(AssertionError):
    """A structural property expected of a family instance failed; carries the witness."""


class NotAFamilyInstanceError(ValueError):
    pass


def leaf_count(delta: int, k: int) -> int:
    """Number of leaves of the base tree: (delta-2) * (delta-1)**(k-1)."""
    _check_tree_params(delta, k)
    return (delta - 2) * (delta - 1) ** (k - 1)


def tree_class_size(delta: int, k: int) -> int:
    """Number of attachment sequences X, i.e. (delta-1)**leaf_count."""
    return (delta - 1) ** leaf_count(delta, k)


def _check_tree_params(delta: int, k: int) -> None:
    if delta < 3:
        raise ParamOutOfRangeError(f"delta must be >= 3, got {delta}")
    if k < 1:
        raise ParamOutOfRangeError(f"k must be >= 1, got {k}")


def index_to_sequence(delta: int, k: int, i: int) -> tuple[int, ...]:
    """The i-th (1-based) attachment sequence in lexicographic order."""
    z = leaf_count(delta, k)
    total = (delta - 1) ** z
    if not 1 <= i <= total:
        raise ParamOutOfRangeError(f"index {i} outside 1..{total}")
    digits = []
    m = i - 1
    for _ in range(z):
        digits.append(m % (delta - 1))
        m //= delta - 1
    return tuple(d + 1 for d in reversed(digits))


def sequence_to_index(delta: int, k: int, xs: tuple[int, ...]) -> int:
    z = leaf_count(delta, k)
    if len(xs) != z or any(not 1 <= x <= delta - 1 for x in xs):
        raise BadSequenceError(f"need {z} entries in 1..{delta - 1}, got {xs}")
    i = 0
    for x in xs:
        i = i * (delta - 1) + (x - 1)
    return i + 1


@dataclass(frozen=True)
class AttachedTree:
    """Node ids of one attached tree inside a GraphBuilder."""

    root: int
    leaves: tuple[int, ...]  # base-tree leaves in lexicographic port order
    tail: tuple[int, ...]  # the k+1 tail-path nodes, root side first
    size: int


def attached_tree_size(delta: int, k: int, xs: tuple[int, ...]) -> int:
    base = 1 + (delta - 2) * sum((delta - 1) ** d for d in range(k))
    return base + sum(xs) + (k + 1)


def emit_base_tree(b: GraphBuilder, delta: int, k: int) -> tuple[int, list[int]]:
    """Emit the base tree; returns (root id, leaves in lex port order).

    The root's ports 1..delta-2 stay as in the final constructions; port 0
    (tail) and delta-1 (cycle attachment) are claimed by callers.
    """
    _check_tree_params(delta, k)
    root = b.add_node()
    leaves: list[int] = []

    def grow(node: int, depth: int, child_ports: range) -> None:
        for p in child_ports:
            child = b.add_node()
            b.add_edge(node, p, child, 0)
            if depth + 1 == k:
                leaves.append(child)
            else:
                grow(child, depth + 1, range(1, delta))

    grow(root, 0, range(1, delta - 1))
    return root, leaves


def emit_attached_tree(
    b: GraphBuilder, delta: int, k: int, xs: tuple[int, ...], variant: int
) -> AttachedTree:
    """Emit one attached tree (variant 1 or 2) into the builder."""
    if variant not in (1, 2):
        raise BadSequenceError(f"variant must be 1 or 2, got {variant}")
    z = leaf_count(delta, k)
    if len(xs) != z or any(not 1 <= x <= delta - 1 for x in xs):
        raise BadSequenceError(f"need {z} entries in 1..{delta - 1}, got {xs}")
    start = b.n
    root, leaves = emit_base_tree(b, delta, k)
    for leaf, x in zip(leaves, xs):
        for p in range(1, x + 1):
            pendant = b.add_node()
            b.add_edge(leaf, p, pendant, 0)
    tail = [b.add_node() for _ in range(k + 1)]
    chain = [root] + tail  # chain[i] is the i-th tail node, chain[0] the root

    def ahead_port(i: int) -> int:
        # port at chain[i] toward chain[i+1]; variant 2 swaps the pair at i == k
        if variant == 2 and i == k:
            return 1
        return 0

    def back_port(i: int) -> int:
        # port at chain[i] toward chain[i-1]
        if i == k + 1:
            return 0
        if variant == 2 and i == k:
            return 0
        return 1

    for i in range(k + 1):
        b.add_edge(chain[i], ahead_port(i), chain[i + 1], back_port(i + 1))
    return AttachedTree(root, tuple(leaves), tuple(tail), b.n - start)


def build_attached_tree(
    delta: int, k: int, xs: tuple[int, ...], variant: int
) -> tuple[PortLabeledGraph, AttachedTree]:
    """Standalone attached tree (valid as a graph on its own)."""
    b = GraphBuilder()
    info = emit_attached_tree(b, delta, k, xs, variant)
    return b.build(), info
