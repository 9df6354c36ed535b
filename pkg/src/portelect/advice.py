"""Advice oracles, advice-consuming node programs, and counting arguments.

An advice scheme pairs an oracle (whole graph in, one bit string out) with a
node program that consumes the same string at every node.  The string's bit
length is the measured cost.  Three schemes are provided:

* `selection_scheme` elects, in the minimum possible number of rounds, the
  node whose minimal-depth unique view is lexicographically smallest, by
  broadcasting that view's canonical encoding.
* `pe_map_scheme` / `cppe_map_scheme` hand every node the serialized map of
  the graph itself and run the corresponding family's k-round algorithm.

`pigeonhole_budget` converts a class count into the largest advice length
that still forces two instances to share a string, and `fooling_demo`
exhibits such a collision together with the node pair it confuses.

Advice files are binary: payload bytes (bits packed most significant first,
zero-padded) followed by one trailer byte whose low 3 bits store the bit
length modulo 8.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from . import family_g, family_j, family_u
from .graph import PortLabeledGraph, parse_plg, serialize_plg
from .sim import NodeProgram
from .tasks import LEADER, NON_LEADER, s_index
from .trees import NotAFamilyInstanceError
from .views import (
    ViewMatcher,
    build_view,
    canonical_encoding,
    lex_min_view,
    read_varint,
    unique_view_nodes,
)

VERSION_SELECTION = 0x01
VERSION_MAP = 0x02


class UnknownAdviceVersionError(ValueError):
    pass


class NoCollisionError(ValueError):
    """The supplied oracle stub never repeated an advice string on the sample."""


@dataclass(frozen=True)
class Advice:
    """A finite bit string, stored byte-aligned with an explicit bit length."""

    payload: bytes
    bit_length: int

    @staticmethod
    def from_bytes(payload: bytes) -> "Advice":
        return Advice(payload, 8 * len(payload))

    @staticmethod
    def empty() -> "Advice":
        return Advice(b"", 0)

    @property
    def bits(self) -> int:
        return self.bit_length


def write_advice_file(path: str, advice: Advice) -> None:
    with open(path, "wb") as fh:
        fh.write(advice.payload)
        fh.write(bytes([advice.bit_length % 8]))


def read_advice_file(path: str) -> Advice:
    with open(path, "rb") as fh:
        blob = fh.read()
    if not blob:
        raise ValueError("advice file is empty (missing trailer byte)")
    trailer = blob[-1]
    if trailer & ~0x07:
        raise ValueError(f"advice trailer byte {trailer:#x} has high bits set")
    payload = blob[:-1]
    rem = trailer & 0x07
    bit_length = 8 * len(payload) - ((8 - rem) % 8)
    if bit_length < 0:
        raise ValueError("advice trailer inconsistent with payload length")
    return Advice(payload, bit_length)


@dataclass(frozen=True)
class AdviceScheme:
    """Oracle plus program family; `make_program` binds one advice string.

    The round count of the returned program is a function of the advice
    (for selection it is decoded from the encoded view), so programs exist
    per advice string rather than per scheme.
    """

    name: str
    task: str
    oracle: Callable[[PortLabeledGraph], Advice]
    make_program: Callable[[Advice], NodeProgram]


def selection_scheme() -> AdviceScheme:
    """Minimum-round selection on any feasible graph.

    The oracle encodes the depth-h view (h = the graph's selection index) of
    the lexicographically least among the nodes unique at that depth; every
    node then compares its own depth-h view to the advice.
    """

    def oracle(g: PortLabeledGraph) -> Advice:
        h = s_index(g)
        winner = lex_min_view(g, unique_view_nodes(g, h), h)
        payload = bytes([VERSION_SELECTION]) + canonical_encoding(build_view(g, winner, h))
        return Advice.from_bytes(payload)

    def make_program(advice: Advice) -> NodeProgram:
        if not advice.payload or advice.payload[0] != VERSION_SELECTION:
            raise UnknownAdviceVersionError("expected selection advice (version 1)")
        encoded = advice.payload[1:]
        rounds, _ = read_varint(encoded, 0)

        def output_fn(_advice: Any, view) -> str:
            return LEADER if canonical_encoding(view) == encoded else NON_LEADER

        return NodeProgram(rounds, output_fn)

    return AdviceScheme("selection", "s", oracle, make_program)


def _map_advice(g: PortLabeledGraph) -> Advice:
    return Advice.from_bytes(bytes([VERSION_MAP]) + serialize_plg(g).encode("ascii"))


def _decode_map(advice: Advice) -> PortLabeledGraph:
    if not advice.payload or advice.payload[0] != VERSION_MAP:
        raise UnknownAdviceVersionError("expected map advice (version 2)")
    return parse_plg(advice.payload[1:].decode("ascii"))


def pe_map_scheme(delta: int, k: int) -> AdviceScheme:
    """Port election in k rounds on the port-swap family, advice = the map."""

    def make_program(advice: Advice) -> NodeProgram:
        graph = _decode_map(advice)
        inst = family_u.recover_instance(graph, delta, k)
        ctx = family_u.make_context(inst)
        matcher = ViewMatcher(graph, k)

        def output_fn(_advice: Any, view):
            nodes = matcher.match(view)
            if not nodes:
                raise NotAFamilyInstanceError("own view does not occur on the map")
            return family_u.pe_output_for(ctx, min(nodes))

        return NodeProgram(k, output_fn)

    return AdviceScheme("pe-map", "pe", _map_advice, make_program)


def cppe_map_scheme(mu: int, k: int) -> AdviceScheme:
    """Complete port path election in k rounds on the chained-gadget family."""

    def make_program(advice: Advice) -> NodeProgram:
        graph = _decode_map(advice)
        inst = family_j.recover_instance(graph, mu, k)
        ctx = family_j.make_context(inst)
        matcher = ViewMatcher(graph, k)

        def output_fn(_advice: Any, view):
            nodes = matcher.match(view)
            if not nodes:
                raise NotAFamilyInstanceError("own view does not occur on the map")
            return family_j.cppe_output_for(ctx, min(nodes))

        return NodeProgram(k, output_fn)

    return AdviceScheme("cppe-map", "cppe", _map_advice, make_program)


def pigeonhole_budget(class_count: int) -> int:
    """Least L such that the 2**(L+1)-1 binary strings of length <= L could
    cover the class; any advice bounded strictly below L must collide."""
    if class_count < 2:
        raise ValueError("need at least two instances to force a collision")
    return class_count.bit_length() - 1


@dataclass(frozen=True)
class FoolingReport:
    family: str
    params: dict
    sample_size: int
    budget: int
    max_advice_bits: int
    collision: tuple
    detail: dict

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "params": self.params,
            "sample_size": self.sample_size,
            "pigeonhole_budget": self.budget,
            "max_advice_bits": self.max_advice_bits,
            "collision": list(self.collision),
            "detail": self.detail,
            "scope": (
                "demonstrates the indistinguishability core of the counting "
                "argument on sampled instances; it does not quantify over "
                "all algorithms"
            ),
            "ok": True,
        }


def _find_collision(ids: list, stub: Callable[[Any], Advice], budget: int):
    strings: dict[tuple[bytes, int], Any] = {}
    max_bits = 0
    for ident in ids:
        adv = stub(ident)
        max_bits = max(max_bits, adv.bit_length)
        if adv.bit_length >= budget:
            raise ValueError(
                f"oracle stub produced {adv.bit_length} bits; collisions are only "
                f"forced strictly below the budget of {budget}"
            )
        key = (adv.payload, adv.bit_length)
        if key in strings:
            return strings[key], ident, max_bits
        strings[key] = ident
    raise NoCollisionError(f"no two of the {len(ids)} sampled instances share advice")


def fooling_demo(
    family: str,
    params: dict,
    oracle_stub: Callable[[Any], Advice] | None = None,
    sample_cap: int = 8,
) -> FoolingReport:
    """Exhibit two same-advice instances and the node they jointly confuse.

    `oracle_stub` maps an instance id (an index, swap sequence, or bit
    sequence depending on the family) to an Advice whose length stays below
    the pigeonhole budget of the sample; default: no advice at all.
    """
    if oracle_stub is None:
        oracle_stub = lambda _ident: Advice.empty()

    if family == "g":
        delta, k = params["delta"], params["k"]
        total = family_g.class_size(delta, k)
        ids = list(range(1, min(total, sample_cap) + 1))
        budget = pigeonhole_budget(len(ids))
        alpha, beta, max_bits = _find_collision(ids, oracle_stub, budget)
        if alpha > beta:
            alpha, beta = beta, alpha
        ga = family_g.build_instance(delta, k, alpha)
        gb = family_g.build_instance(delta, k, beta)
        from .views import refine_union

        pa, pb = refine_union([ga.graph, gb.graph], k)
        root_a = ga.roots[(alpha, 2, 1)]
        root_b1 = gb.roots[(alpha, 2, 1)]
        root_b2 = gb.roots[(alpha, 2, 2)]
        if pa.at(k)[root_a] != pb.at(k)[root_b1]:
            raise AssertionError("collision pair lost cross-instance view equality")
        if pb.at(k)[root_b1] != pb.at(k)[root_b2]:
            raise AssertionError("duplicated tree roots must share a view")
        detail = {
            "confused_node": f"root of the unpaired tree of instance {alpha}",
            "cross_instance_view_equal_at": k,
            "duplicate_roots_in_larger_instance": [root_b1, root_b2],
            "consequence": "electing it in one instance elects two nodes in the other",
        }
        return FoolingReport(
            "g", params, len(ids), budget, max_bits, (alpha, beta), detail
        )

    if family == "u":
        delta, k = params["delta"], params["k"]
        count = family_u.tree_class_size(delta, k)
        coord = min(3, count)
        sigma_a = tuple([1] * count)
        sigma_b = tuple(2 if t == coord else 1 for t in range(1, count + 1))
        ids = [sigma_a, sigma_b]
        budget = pigeonhole_budget(len(ids))
        ia, ib, max_bits = _find_collision(ids, oracle_stub, budget)
        inst_a = family_u.build_instance(delta, k, ia)
        inst_b = family_u.build_instance(delta, k, ib)
        from .views import refine_union

        pa, pb = refine_union([inst_a.graph, inst_b.graph], k)
        heavy = inst_a.heavy_roots[(coord, 1)]
        if pa.at(k)[heavy] != pb.at(k)[inst_b.heavy_roots[(coord, 1)]]:
            raise AssertionError("heavy-root views differ across the collision pair")
        out_a = family_u.pe_output_for(family_u.make_context(inst_a), heavy)
        out_b = family_u.pe_output_for(
            family_u.make_context(inst_b), inst_b.heavy_roots[(coord, 1)]
        )
        if out_a == out_b:
            raise AssertionError("required ports coincide; no fooling")
        detail = {
            "confused_node": heavy,
            "coordinate": coord,
            "required_ports": [out_a, out_b],
            "consequence": "equal views and advice force one shared, hence wrong, port",
        }
        return FoolingReport(
            "u", params, len(ids), budget, max_bits, (list(ia), list(ib)), detail
        )

    if family == "j":
        mu, k = params["mu"], params["k"]
        half = 1 << (family_j.border_width(mu, k) - 1)
        y_a = tuple([0] * half)
        y_b = tuple([1] + [0] * (half - 1))
        ids = [y_a, y_b]
        budget = pigeonhole_budget(len(ids))
        ia, ib, max_bits = _find_collision(ids, oracle_stub, budget)
        inst_a = family_j.build_instance(mu, k, ia)
        inst_b = family_j.build_instance(mu, k, ib)
        ctx_a = family_j.make_context(inst_a)
        breakage = family_j.check_pair_break(inst_a, inst_b, ctx_a)
        detail = dict(breakage)
        detail["consequence"] = (
            "the shared output sequence cannot reach the far half in both instances"
        )
        return FoolingReport(
            "j",
            params,
            len(ids),
            budget,
            max_bits,
            ("".join(map(str, ia)), "".join(map(str, ib))),
            detail,
        )

    raise ValueError(f"unknown family {family!r}")
