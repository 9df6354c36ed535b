import pytest

from portelect.graph import (
    BadPortRangeError,
    GraphBuilder,
    MultiEdgeError,
    NonReciprocalError,
    NotConnectedError,
    PlgSyntaxError,
    PortOutOfRangeError,
    SelfLoopError,
    bfs_distances,
    from_edges,
    parse_plg,
    serialize_plg,
    validate,
)

LINE3 = "plg 1\nnodes 3\nedge 0 0 1 0\nedge 1 1 2 0\n"


def test_parse_line3():
    g = parse_plg(LINE3)
    assert g.n == 3
    assert g.degrees == (1, 2, 1)
    assert g.adjacency[1] == ((0, 0), (2, 0))


def test_follow_port_examples():
    g = parse_plg(LINE3)
    assert g.follow_port(1, 1) == (2, 0)
    assert g.follow_port(2, 0) == (1, 1)
    with pytest.raises(PortOutOfRangeError):
        g.follow_port(0, 1)


def test_follow_port_involution():
    g = parse_plg(LINE3)
    for v in range(g.n):
        for p in range(g.degree(v)):
            u, q = g.follow_port(v, p)
            assert g.follow_port(u, q) == (v, p)


def test_serialize_canonical_round_trip():
    g = parse_plg(LINE3)
    text = serialize_plg(g)
    assert text == LINE3
    assert serialize_plg(parse_plg(text)) == text
    # same graph entered in scrambled order serializes identically
    scrambled = "plg 1\nnodes 3\n edge 1 1 2 0 # comment\nedge 1 0 0 0\n"
    assert serialize_plg(parse_plg(scrambled)) == text


def test_parse_errors():
    with pytest.raises(PlgSyntaxError):
        parse_plg("nodes 3\n")
    with pytest.raises(PlgSyntaxError):
        parse_plg("plg 1\nnodes x\n")
    with pytest.raises(PlgSyntaxError):
        parse_plg("plg 1\nnodes 2\nedge 0 0 1\n")
    with pytest.raises(SelfLoopError):
        parse_plg("plg 1\nnodes 2\nedge 0 0 0 1\n")


def test_validate_errors():
    with pytest.raises(NotConnectedError):
        parse_plg("plg 1\nnodes 4\nedge 0 0 1 0\nedge 2 0 3 0\n")
    with pytest.raises(BadPortRangeError):
        validate([{0: (1, 0), 2: (2, 0)}, {0: (0, 0)}, {0: (0, 2)}])
    with pytest.raises(NonReciprocalError):
        validate([[(1, 0)], [(0, 0), (0, 0)]])
    with pytest.raises(MultiEdgeError):
        b = GraphBuilder()
        b.add_nodes(2)
        b.add_edge(0, 0, 1, 0)
        b.add_edge(0, 1, 1, 1)
    with pytest.raises(SelfLoopError):
        b = GraphBuilder()
        b.add_nodes(1)
        b.add_edge(0, 0, 0, 1)


def test_builder_swap_ports():
    b = GraphBuilder()
    b.add_nodes(3)
    b.add_edge(0, 0, 1, 0)
    b.add_edge(0, 1, 2, 0)
    b.swap_ports(0, 0, 1)
    g = b.build()
    assert g.adjacency[0] == ((2, 0), (1, 0))
    assert g.adjacency[1] == ((0, 1),)
    assert g.adjacency[2] == ((0, 0),)


def test_handshake_and_single_node():
    g = from_edges(4, [(0, 0, 1, 0), (1, 1, 2, 1), (2, 0, 3, 0), (3, 1, 0, 1)])
    assert sum(g.degrees) == 2 * g.edge_count
    single = validate([[]])
    assert single.n == 1 and single.edge_count == 0


def test_bfs_distances():
    g = parse_plg(LINE3)
    assert bfs_distances(g, [0]) == [0, 1, 2]
    assert bfs_distances(g, [0, 2]) == [0, 1, 0]
