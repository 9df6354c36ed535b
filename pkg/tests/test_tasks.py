import random

import pytest

from portelect import tasks
from portelect.graph import from_edges, parse_plg
from portelect.smallgraphs import random_connected_graph, random_feasible_graph
from portelect.tasks import (
    LEADER,
    NON_LEADER,
    InfeasibleError,
    MaxKExceededError,
    ReachabilityOracle,
    is_feasible,
    reachable_without_naive,
    s_index,
    validate_outputs,
    z_index_bruteforce,
)
from portelect.views import refine_classes

LINE3 = parse_plg("plg 1\nnodes 3\nedge 0 0 1 0\nedge 1 1 2 0\n")
K2 = parse_plg("plg 1\nnodes 2\nedge 0 0 1 0\n")
CYCLE4 = from_edges(4, [(0, 0, 1, 0), (1, 1, 2, 1), (2, 0, 3, 0), (3, 1, 0, 1)])


def test_feasibility_examples():
    assert is_feasible(LINE3)
    assert not is_feasible(K2)
    assert not is_feasible(CYCLE4)


def test_s_index_examples():
    assert s_index(LINE3) == 0
    with pytest.raises(InfeasibleError):
        s_index(K2)


def test_validate_spec_cppe_witness():
    outputs = [((0, 0),), LEADER, ((0, 1),)]
    assert validate_outputs(LINE3, "cppe", outputs) is None


def test_validate_violations():
    assert validate_outputs(LINE3, "s", [LEADER, LEADER, NON_LEADER]).kind == "multiple-leaders"
    assert validate_outputs(LINE3, "s", [NON_LEADER] * 3).kind == "no-leader"
    v = validate_outputs(LINE3, "cppe", [((0, 1),), LEADER, ((0, 1),)])
    assert v.kind == "port-mismatch" and v.node == 0
    v = validate_outputs(LINE3, "ppe", [(0,), LEADER, ()])
    assert v.kind == "wrong-endpoint" and v.node == 2
    v = validate_outputs(LINE3, "pe", [3, LEADER, 0])
    assert v.kind == "bad-port"
    # walking through the leader and back is never simple
    v = validate_outputs(LINE3, "ppe", [(0, 1, 0), LEADER, (0,)])
    assert v.kind == "not-simple"


def test_line3_indexes():
    ks = {t: z_index_bruteforce(LINE3, t).k for t in tasks.TASKS}
    assert ks == {"s": 0, "pe": 0, "ppe": 0, "cppe": 1}


def test_bruteforce_witnesses_validate():
    rng = random.Random(11)
    for _ in range(25):
        g = random_feasible_graph(rng, 3, 7)
        for task in tasks.TASKS:
            rep = z_index_bruteforce(g, task)
            assert validate_outputs(g, task, list(rep.outputs)) is None


def test_bruteforce_s_equals_s_index():
    rng = random.Random(17)
    for _ in range(25):
        g = random_feasible_graph(rng, 3, 8)
        assert z_index_bruteforce(g, "s").k == s_index(g)


def test_hierarchy_on_random_graphs():
    rng = random.Random(29)
    for _ in range(40):
        g = random_feasible_graph(rng, 3, 7)
        ks = [z_index_bruteforce(g, t).k for t in tasks.TASKS]
        assert ks[3] >= ks[2] >= ks[1] >= ks[0], ks


def test_witness_outputs_are_class_uniform():
    rng = random.Random(37)
    for _ in range(15):
        g = random_feasible_graph(rng, 3, 7)
        for task in tasks.TASKS:
            rep = z_index_bruteforce(g, task)
            ids = refine_classes(g, rep.k).at(rep.k)
            byclass = {}
            for v in range(g.n):
                byclass.setdefault(ids[v], set()).add(rep.outputs[v])
            assert all(len(outs) == 1 for outs in byclass.values())


def test_single_node_graph():
    single = parse_plg("plg 1\nnodes 1\n")
    assert is_feasible(single)
    for task in tasks.TASKS:
        rep = z_index_bruteforce(single, task)
        assert rep.k == 0 and rep.leader == 0
        assert validate_outputs(single, task, list(rep.outputs)) is None


def test_max_k_exceeded():
    with pytest.raises(MaxKExceededError):
        z_index_bruteforce(LINE3, "cppe", max_k=0)


def test_reachability_oracle_matches_naive():
    rng = random.Random(41)
    for _ in range(60):
        g = random_connected_graph(rng, rng.randint(3, 10))
        anchor = rng.randrange(g.n)
        oracle = ReachabilityOracle(g, anchor)
        for banned in range(g.n):
            if banned == anchor:
                continue
            for src in range(g.n):
                if src == banned:
                    continue
                assert oracle.reachable_without(banned, src) == reachable_without_naive(
                    g, banned, src, anchor
                ), (g.adjacency, anchor, banned, src)
