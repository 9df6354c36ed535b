import random

import pytest

from portelect.graph import from_edges, parse_plg
from portelect.smallgraphs import random_connected_graph
from portelect.views import (
    DepthTooLargeError,
    TiedViewsError,
    ViewMatcher,
    build_view,
    canonical_encoding,
    decode_encoding,
    lex_min_view,
    refine_classes,
    refine_union,
    stabilized_partition,
    unique_view_nodes,
    views_equal,
)

LINE3 = parse_plg("plg 1\nnodes 3\nedge 0 0 1 0\nedge 1 1 2 0\n")
# 4-cycle whose ports alternate 0/1 at every node: fully symmetric
CYCLE4 = from_edges(4, [(0, 0, 1, 0), (1, 1, 2, 1), (2, 0, 3, 0), (3, 1, 0, 1)])


def test_build_view_line3():
    v = build_view(LINE3, 1, 1)
    assert v.root == (2, ((0, (1, ())), (0, (1, ()))))
    assert build_view(LINE3, 0, 0).root == (1, ())


def test_depth0_views_carry_degree():
    for v in range(LINE3.n):
        assert build_view(LINE3, v, 0).degree == LINE3.degree(v)


def test_view_includes_backtracking():
    # depth-2 view from an endpoint walks back through the middle to itself
    v = build_view(LINE3, 0, 2)
    (q1, middle) = v.root[1][0]
    assert middle[0] == 2 and len(middle[1]) == 2


def test_symmetric_cycle_views_identical():
    trees = [build_view(CYCLE4, v, 2) for v in range(4)]
    assert all(t == trees[0] for t in trees)
    assert unique_view_nodes(CYCLE4, 3) == set()


def test_encoding_examples():
    assert canonical_encoding(build_view(LINE3, 1, 0)) == bytes([0x00, 0x02])
    e0 = canonical_encoding(build_view(LINE3, 0, 1))
    e2 = canonical_encoding(build_view(LINE3, 2, 1))
    assert e0 != e2  # incoming ports at the middle differ (0 vs 1)


def test_encoding_decode_round_trip_random():
    rng = random.Random(7)
    for _ in range(60):
        g = random_connected_graph(rng, rng.randint(2, 9))
        v = rng.randrange(g.n)
        h = rng.randint(0, 3)
        view = build_view(g, v, h)
        enc = canonical_encoding(view)
        assert decode_encoding(enc) == view
        assert canonical_encoding(build_view(g, v, h)) == enc  # deterministic


def test_varint_multibyte_round_trip():
    star = from_edges(
        201, [(0, p, v, 0) for p, v in enumerate(range(1, 201))]
    )  # degree 200 > 127 forces a 2-byte varint
    view = build_view(star, 0, 1)
    assert decode_encoding(canonical_encoding(view)) == view


def test_refine_line3():
    part = refine_classes(LINE3, 1)
    assert part.singletons(0) == {1}
    assert len(part.singletons(1)) == 3
    assert part.at(0)[0] == part.at(0)[2]


def test_refinement_matches_explicit_views():
    rng = random.Random(13)
    for _ in range(40):
        g = random_connected_graph(rng, rng.randint(2, 12))
        h = rng.randint(0, 3)
        part = refine_classes(g, h)
        trees = [build_view(g, v, h) for v in range(g.n)]
        for a in range(g.n):
            for b in range(a, g.n):
                assert (part.at(h)[a] == part.at(h)[b]) == (trees[a] == trees[b])


def test_refinement_monotone_and_stabilizes():
    rng = random.Random(5)
    for _ in range(30):
        g = random_connected_graph(rng, rng.randint(2, 14))
        part = refine_classes(g, g.n)
        for d in range(g.n):
            coarse = part.at(d)
            fine = part.at(d + 1)
            blocks = {}
            for v in range(g.n):
                blocks.setdefault(fine[v], set()).add(coarse[v])
            assert all(len(s) == 1 for s in blocks.values())  # refinement
        stable, depth = stabilized_partition(g)
        counts = [part.num_classes(d) for d in range(g.n + 1)]
        assert counts[depth] == counts[-1]  # no further splitting after stabilization


def test_views_equal_cross_graph():
    other = parse_plg("plg 1\nnodes 3\nedge 0 0 1 0\nedge 1 1 2 0\n")
    assert views_equal(LINE3, 0, other, 0, 2)
    assert not views_equal(LINE3, 0, other, 2, 1)
    assert views_equal(LINE3, 1, LINE3, 1, 3)


def test_refine_union_consistent_with_single():
    p1, p2 = refine_union([LINE3, CYCLE4], 2)
    single = refine_classes(LINE3, 2)
    for d in range(3):
        a = [p1.at(d)[v] for v in range(3)]
        b = [single.at(d)[v] for v in range(3)]
        # same grouping even if ids differ
        assert len(set(a)) == len(set(b))
        assert len({c4 for c4 in p2.at(d)}) == 1


def test_lex_min_view():
    assert lex_min_view(LINE3, [1], 0) == 1
    with pytest.raises(TiedViewsError):
        lex_min_view(CYCLE4, [0, 1], 2)


def test_lex_min_smaller_degree_wins_at_depth0():
    assert lex_min_view(LINE3, [0, 1], 0) == 0


def test_view_budget():
    with pytest.raises(DepthTooLargeError):
        build_view(CYCLE4, 0, 10, max_nodes=50)


def test_view_matcher():
    m = ViewMatcher(LINE3, 1)
    assert m.match(build_view(LINE3, 0, 1)) == [0]
    assert m.match(build_view(LINE3, 1, 1)) == [1]
    assert m.match(build_view(CYCLE4, 0, 1)) == []
    m4 = ViewMatcher(CYCLE4, 2)
    assert m4.match(build_view(CYCLE4, 2, 2)) == [0, 1, 2, 3]
