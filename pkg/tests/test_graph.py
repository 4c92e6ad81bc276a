import pytest
from hypothesis import given, settings, strategies as st

from qcpg.errors import DuplicateEdge, FrozenGraphError, UnknownNode
from qcpg.graph import PropertyGraph, SourceLocation
from qcpg.kinds import EdgeKind, NodeKind


def _chain(n):
    g = PropertyGraph()
    ids = [g.add_node(NodeKind.Reference, f"n{i}") for i in range(n)]
    for a, b in zip(ids, ids[1:]):
        g.add_edge(a, b, EdgeKind.DFG)
    return g, ids


def test_ids_are_dense_and_ordered():
    g, ids = _chain(4)
    assert ids == [0, 1, 2, 3]
    assert [n.id for n in g.nodes()] == ids
    assert len(g) == 4


def test_duplicate_edge_rejected():
    g, (a, b) = _chain(2)
    with pytest.raises(DuplicateEdge):
        g.add_edge(a, b, EdgeKind.DFG)
    assert g.ensure_edge(a, b, EdgeKind.DFG) is False


def test_indexed_edges_are_distinct():
    """Same endpoints with different operand slots are separate edges."""
    g = PropertyGraph()
    gate = g.add_node(NodeKind.QuantumGateGeneric, "swap")
    ref = g.add_node(NodeKind.QuantumBitReference, "q0")
    g.add_edge(gate, ref, EdgeKind.GATE_OPERAND, {"index": 0})
    g.add_edge(gate, ref, EdgeKind.GATE_OPERAND, {"index": 1})
    assert [e.index for e in g.out_edges(gate)] == [0, 1]


def test_unknown_node():
    g, _ = _chain(1)
    with pytest.raises(UnknownNode):
        g.add_edge(0, 7, EdgeKind.AST)
    with pytest.raises(UnknownNode):
        g.node(-1)


def test_frozen_graph_rejects_mutation():
    g, _ = _chain(2)
    g.freeze()
    with pytest.raises(FrozenGraphError):
        g.add_node(NodeKind.Reference)
    with pytest.raises(FrozenGraphError):
        g.add_edge(0, 1, EdgeKind.EOG)
    with pytest.raises(FrozenGraphError):
        g.set_prop(0, "x", 1)


def test_reachable_respects_min_hops_and_cycles():
    g, (a, b, c) = _chain(3)
    assert g.reachable(a, EdgeKind.DFG) == {b, c}
    assert g.reachable(a, EdgeKind.DFG, min_hops=2) == {c}
    assert g.reachable(a, EdgeKind.DFG, min_hops=0) == {a, b, c}
    assert a not in g.reachable(a, EdgeKind.DFG)
    g.add_edge(c, a, EdgeKind.DFG)
    assert a in g.reachable(a, EdgeKind.DFG)
    assert g.reachable(c, EdgeKind.DFG, direction="bwd") == {a, b, c}


def test_reachable_filters_by_kind():
    g, (a, b, c) = _chain(3)
    g.add_edge(a, c, EdgeKind.EOG)
    assert g.reachable(a, EdgeKind.EOG) == {c}
    with pytest.raises(ValueError):
        g.reachable(a, EdgeKind.EOG, direction="up")


def test_shortest_path_with_allowed_set():
    g, (a, b, c) = _chain(3)
    assert g.shortest_path(a, c, EdgeKind.DFG) == [a, b, c]
    assert g.shortest_path(a, c, EdgeKind.DFG, allowed={c}) is None
    assert g.shortest_path(c, a, EdgeKind.DFG) is None


def test_source_location_validation():
    loc = SourceLocation("f.py", 3, 5)
    assert str(loc) == "f.py:3:5"
    assert loc.span(SourceLocation("f.py", 4, 2)).end_line == 4
    with pytest.raises(ValueError):
        SourceLocation("f.py", 0, 1)
    with pytest.raises(ValueError):
        SourceLocation("f.py", 5, 5, end_line=4, end_column=1)


def test_labels_include_supertypes():
    assert NodeKind.QuantumGateH.labels == ("QuantumGateH", "QuantumGate", "QuantumNode")
    assert "QuantumPauliGate" in NodeKind.QuantumGateY.labels
    assert "QuantumPauliGate" not in NodeKind.QuantumGateH.labels
    assert "ArraySubscriptionExpression" in NodeKind.SubscriptExpression.labels
    assert "QuantumNode" in NodeKind.ClassicIf.labels


edges_strategy = st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), max_size=25)


@settings(max_examples=60, deadline=None)
@given(edges_strategy, st.integers(0, 3))
def test_forward_and_backward_reachability_agree(edges, hops):
    """m is forward-reachable from n iff n is backward-reachable from m."""
    g = PropertyGraph()
    for i in range(8):
        g.add_node(NodeKind.Reference, str(i))
    for a, b in set(edges):
        g.add_edge(a, b, EdgeKind.DFG)
    fwd = {n: g.reachable(n, EdgeKind.DFG, "fwd", hops) for n in range(8)}
    bwd = {n: g.reachable(n, EdgeKind.DFG, "bwd", hops) for n in range(8)}
    for n in range(8):
        for m in range(8):
            assert (m in fwd[n]) == (n in bwd[m])


@settings(max_examples=40, deadline=None)
@given(edges_strategy)
def test_reachable_matches_transitive_closure(edges):
    import networkx as nx
    g = PropertyGraph()
    d = nx.DiGraph()
    for i in range(8):
        g.add_node(NodeKind.Reference, str(i))
        d.add_node(i)
    for a, b in set(edges):
        g.add_edge(a, b, EdgeKind.DFG)
        d.add_edge(a, b)
    closure = nx.transitive_closure(d, reflexive=False)
    for n in range(8):
        assert g.reachable(n, EdgeKind.DFG) == set(closure.successors(n))
