import networkx as nx

from qcpg.kinds import EdgeKind, NodeKind
from qcpg.passes.quantum_flow import bitstring_index_to_clbit, fold_int
from qcpg.pipeline import analyze_source


def _graph(src, file="t.py"):
    a = analyze_source(src, file)
    return a.graph, a


def _refs(g, bit_name, kind=NodeKind.QuantumBitReference):
    return [n.id for n in g.nodes(kind) if n.name == bit_name]


def test_eog_chains_operations_in_order():
    g, a = _graph("qc = QuantumCircuit(2, 2)\nqc.h(0)\nqc.cx(0, 1)\nqc.measure([0, 1], [0, 1])\n")
    ops = [e.dst for e in g.out_edges(a.circuits[0].node, EdgeKind.AST) if e.props.get("role") == "operation"]
    for x, y in zip(ops, ops[1:]):
        assert g.successors(x, EdgeKind.EOG) == [y]


def test_classic_if_branches_around_body(complex_source):
    g, _ = _graph(complex_source)
    ci, = g.nodes(NodeKind.ClassicIf)
    cmp_ = g.child(ci.id, EdgeKind.CONDITION)
    x, = g.successors(ci.id, EdgeKind.BODY)
    succ = g.successors(cmp_, EdgeKind.EOG)
    assert x in succ and len(succ) == 2
    assert g.successors(ci.id, EdgeKind.EOG) == [cmp_]


def test_qubit_chain_follows_references():
    g, _ = _graph("qc = QuantumCircuit(1, 1)\nqc.h(0)\nqc.x(0)\nqc.measure(0, 0)\n")
    q0, = g.nodes(NodeKind.QuantumBit)
    r1, r2, r3 = _refs(g, "q0")
    assert g.successors(q0.id, EdgeKind.DFG) == [r1]
    assert r2 in g.successors(r1, EdgeKind.DFG)
    assert r3 in g.successors(r2, EdgeKind.DFG)


def test_cx_control_flows_into_target():
    g, _ = _graph("qc = QuantumCircuit(2)\nqc.cx(0, 1)\n")
    c, = _refs(g, "q0")
    t, = _refs(g, "q1")
    assert g.has_edge(c, t, EdgeKind.DFG)
    assert not g.has_edge(t, c, EdgeKind.DFG)


def test_measure_flows_into_clbit_reference():
    g, _ = _graph("qc = QuantumCircuit(1, 1)\nqc.measure(0, 0)\n")
    m, = g.nodes(NodeKind.QuantumMeasure)
    assert g.has_edge(g.child(m.id, EdgeKind.QU_BIT), g.child(m.id, EdgeKind.C_BIT), EdgeKind.DFG)


def test_reset_starts_a_fresh_chain():
    g, _ = _graph("qc = QuantumCircuit(1, 1)\nqc.h(0)\nqc.reset(0)\nqc.measure(0, 0)\n")
    q0, = g.nodes(NodeKind.QuantumBit)
    h_ref, reset_ref, m_ref = _refs(g, "q0")
    assert not g.has_edge(h_ref, reset_ref, EdgeKind.DFG)
    assert g.has_edge(q0.id, reset_ref, EdgeKind.DFG)
    assert g.has_edge(reset_ref, m_ref, EdgeKind.DFG)


def test_conditional_gate_has_two_incoming_paths(complex_source):
    """After the c_if, q1's measure sees both the X and the skipped path."""
    g, _ = _graph(complex_source)
    cx_ref, x_ref, m_ref = _refs(g, "q1")
    assert set(g.predecessors(m_ref, EdgeKind.DFG)) == {cx_ref, x_ref}


def test_clbit_chain_into_condition(complex_source):
    g, _ = _graph(complex_source)
    measured, read = _refs(g, "c2", NodeKind.ClassicBitReference)
    assert g.has_edge(measured, read, EdgeKind.DFG)


def test_unmeasured_condition_bit_reads_initial_value():
    g, _ = _graph("qc = QuantumCircuit(1, 1)\nqc.x(0).c_if(0, 1)\n")
    c0, = g.nodes(NodeKind.ClassicBit)
    read, = _refs(g, "c0", NodeKind.ClassicBitReference)
    assert g.predecessors(read, EdgeKind.DFG) == [c0.id]


def test_bridge_to_result_and_subscripts(complex_source):
    g, _ = _graph(complex_source)
    result, = [n.id for n in g.nodes(NodeKind.CallExpression) if n.name == "result"]
    targets = {}
    for m in g.nodes(NodeKind.QuantumMeasure):
        cref = g.child(m.id, EdgeKind.C_BIT)
        assert result in g.successors(cref, EdgeKind.DFG)
        targets[g[cref].name] = sorted(g[d].name for d in g.successors(cref, EdgeKind.DFG)
                                       if g[d].kind == NodeKind.SubscriptExpression)
    assert targets == {"c1": ["bitstring[-1-1]"], "c2": ["bitstring[-2-1]"], "c3": ["bitstring[-3-1]"]}


def test_overwritten_measure_is_not_live_out():
    src = ("qc = QuantumCircuit(2, 1)\nqc.measure(0, 0)\nqc.measure(1, 0)\n"
           "counts = run(qc).result().get_counts()\nfor s in counts:\n  v = s[-1]\n")
    g, _ = _graph(src)
    first, second = [g.child(m.id, EdgeKind.C_BIT) for m in g.nodes(NodeKind.QuantumMeasure)]
    sub, = [n.id for n in g.nodes(NodeKind.SubscriptExpression)]
    assert not g.has_edge(first, sub, EdgeKind.DFG)
    assert g.has_edge(second, sub, EdgeKind.DFG)


def test_listing1_qubit_reaches_result(fixture_path):
    g, _ = _graph(open(fixture_path("listing1.py")).read())
    q0, = g.nodes(NodeKind.QuantumBit)
    result, = [n.id for n in g.nodes(NodeKind.CallExpression) if n.name == "result"]
    assert result in g.reachable(q0.id, EdgeKind.DFG)


def test_warnings_for_unexecuted_and_dynamic_index():
    _, a = _graph("qc = QuantumCircuit(1, 1)\nqc.measure(0, 0)\n")
    assert a.diagnostics.codes() == ["CircuitNotExecuted"]
    _, a = _graph("qc = QuantumCircuit(1, 1)\nqc.measure(0, 0)\nk = 0\n"
                  "counts = run(qc).result().get_counts()\nfor s in counts:\n  v = s[k]\n")
    assert "NonConstantIndex" in a.diagnostics.codes()


def test_positive_bitstring_index():
    assert bitstring_index_to_clbit(-1, 4) == 0
    assert bitstring_index_to_clbit(-4, 4) == 3
    assert bitstring_index_to_clbit(0, 4) == 3
    assert bitstring_index_to_clbit(3, 4) == 0
    assert bitstring_index_to_clbit(4, 4) is None
    assert bitstring_index_to_clbit(-5, 4) is None


def test_fold_int(complex_source):
    g, _ = _graph(complex_source)
    values = {n.name: fold_int(g, g.child(n.id, EdgeKind.AST, role="index"))
              for n in g.nodes(NodeKind.SubscriptExpression)}
    assert values == {"bitstring[-0-1]": -1, "bitstring[-1-1]": -2,
                      "bitstring[-2-1]": -3, "bitstring[-3-1]": -4}


def test_quantum_dfg_is_acyclic(complex_source):
    g, _ = _graph(complex_source)
    d = nx.DiGraph()
    d.add_edges_from((e.src, e.dst) for e in g.edges(EdgeKind.DFG)
                     if g[e.src].kind.is_quantum and g[e.dst].kind.is_quantum)
    assert nx.is_directed_acyclic_graph(d)
