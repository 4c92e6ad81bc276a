import pytest

from qcpg.detectors import (
    CONSTANT_CLASSIC_BIT, CONSTANT_CONDITION, CONSTANT_RESULT_BIT,
    SUPERFLUOUS_OPERATION, RULES, detect_constant_classic_bit, detect_constant_condition,
    detect_result_bit_not_used, detect_superfluous_operation, run_all,
)
from qcpg.graph import PropertyGraph
from qcpg.kinds import NodeKind
from qcpg.pipeline import analyze_source


def _graph(src, file="t.py"):
    return analyze_source(src, file).graph


def _by_rule(findings):
    out = {}
    for f in findings:
        out.setdefault(f.rule_id, []).append(f)
    return out


def test_complex_superfluous(complex_source):
    g = _graph(complex_source)
    found = detect_superfluous_operation(g)
    assert sorted((g[f.nodes[0]].name, [g[n].name for n in f.nodes[1:]]) for f in found) == [
        ("cx", ["q0"]), ("h", ["q0"])]


def test_complex_constant_classic_bit(complex_source):
    g = _graph(complex_source)
    f, = detect_constant_classic_bit(g)
    assert [g[n].name for n in f.nodes[1:]] == ["q2", "c2"]
    assert f.location.line == 12


def test_complex_constant_condition(complex_source):
    g = _graph(complex_source)
    f, = detect_constant_condition(g)
    assert g[f.nodes[0]].kind == NodeKind.ClassicIf
    assert f.location.line == 13


def test_complex_constant_result_bit_evidence(complex_source):
    g = _graph(complex_source)
    f, = RULES[CONSTANT_RESULT_BIT](g)
    assert g[f.nodes[1]].name == "c2"
    evidence = [g[n] for n in f.evidence]
    assert any(n.kind == NodeKind.Reference and n.name == "b" for n in evidence)
    assert evidence[-1].kind == NodeKind.IfStatement
    assert "'b'" in f.message


def test_complex_all_rules(complex_source):
    g = _graph(complex_source)
    counts = {k: len(v) for k, v in _by_rule(run_all(g)).items()}
    assert counts == {SUPERFLUOUS_OPERATION: 2, CONSTANT_CLASSIC_BIT: 1, CONSTANT_CONDITION: 1,
                      CONSTANT_RESULT_BIT: 1}


def test_evidence_paths_follow_edges(complex_source):
    g = _graph(complex_source)
    for f in run_all(g):
        for a, b in zip(f.evidence, f.evidence[1:]):
            assert g.out_edges(a) and b in g.successors(a), (f.rule_id, a, b)


def test_rule_filter(complex_source):
    g = _graph(complex_source)
    assert len(run_all(g, [CONSTANT_CLASSIC_BIT])) == 1
    with pytest.raises(ValueError):
        run_all(g, ["NOPE"])


def test_run_all_needs_frozen_graph():
    with pytest.raises(ValueError):
        run_all(PropertyGraph())
    assert run_all(PropertyGraph().freeze()) == []


def test_findings_are_sorted(complex_source):
    g = _graph(complex_source)
    found = run_all(g)
    assert found == sorted(found, key=lambda f: f.sort_key())


def test_removing_c1_access(complex_source):
    g = _graph(complex_source.replace("  c1 = int(bitstring[-1-1])\n", ""))
    f, = detect_result_bit_not_used(g)
    assert g[f.nodes[0]].name == "c1"


def test_adding_h_on_q2_clears_constant_findings(complex_source):
    g = _graph(complex_source.replace("circuit.h(0); circuit.h(3)\n", "circuit.h(0); circuit.h(3)\ncircuit.h(2)\n"))
    rules = {f.rule_id for f in run_all(g)}
    assert rules == {SUPERFLUOUS_OPERATION}


def test_listing1_is_clean(fixture_path):
    assert run_all(_graph(open(fixture_path("listing1.py")).read())) == []


def test_no_measures_flags_every_gate():
    g = _graph("qc = QuantumCircuit(2)\nqc.h(0)\nqc.cx(0, 1)\n")
    found = detect_superfluous_operation(g)
    assert len(found) == 2
    cx = next(f for f in found if g[f.nodes[0]].name == "cx")
    assert len(cx.nodes) == 3


def test_gate_after_measure_is_superfluous():
    g = _graph("qc = QuantumCircuit(1, 1)\nqc.measure(0, 0)\nqc.h(0)\n")
    f, = detect_superfluous_operation(g)
    assert g[f.nodes[0]].name == "h"


def test_reset_makes_measure_constant():
    g = _graph("qc = QuantumCircuit(1, 1)\nqc.h(0)\nqc.reset(0)\nqc.measure(0, 0)\n")
    assert len(detect_constant_classic_bit(g)) == 1


def test_cx_control_counts_as_transformation():
    """Measuring a CX target whose control saw an H is not constant."""
    g = _graph("qc = QuantumCircuit(2, 1)\nqc.h(0)\nqc.cx(0, 1)\nqc.measure(1, 0)\n")
    assert detect_constant_classic_bit(g) == []


def test_conditioned_bit_after_h_is_not_constant():
    g = _graph("qc = QuantumCircuit(2, 1)\nqc.h(0)\nqc.measure(0, 0)\nqc.x(1).c_if(0, 1)\n")
    assert detect_constant_condition(g) == []


def test_qasm_condition_after_gate_is_not_constant():
    g = _graph("qreg q[2];\ncreg c[1];\nh q[0];\nmeasure q[0] -> c[0];\nif (c == 0) x q[1];\n", "d.qasm")
    assert detect_constant_condition(g) == []


def test_qasm_condition_on_untouched_bit_is_constant():
    g = _graph("qreg q[2];\ncreg c[1];\nmeasure q[0] -> c[0];\nif (c == 0) x q[1];\n", "d.qasm")
    assert len(detect_constant_condition(g)) == 1


def test_result_never_fetched_flags_all_measured_bits():
    g = _graph("qc = QuantumCircuit(2, 2)\nqc.h(0)\nqc.measure([0, 1], [0, 1])\n")
    found = detect_result_bit_not_used(g)
    assert sorted(g[f.nodes[0]].name for f in found) == ["c0", "c1"]
    assert all("never read" in f.message for f in found)


def test_qasm_circuits_skip_result_rule(fixture_path):
    g = _graph(open(fixture_path("listing2.qasm")).read(), "listing2.qasm")
    assert detect_result_bit_not_used(g) == []


def test_condition_without_result_bits_is_ignored():
    g = _graph("x = 1\nif x == 1:\n  act()\n")
    assert run_all(g, [CONSTANT_RESULT_BIT]) == []


def test_finding_serialization(complex_source):
    f = run_all(_graph(complex_source, "complex.py"), [CONSTANT_CLASSIC_BIT])[0]
    d = f.to_dict()
    assert d["rule"] == CONSTANT_CLASSIC_BIT and d["file"] == "complex.py" and d["line"] == 12
    assert str(f).startswith("complex.py:12:1: CONSTANT_CLASSIC_BIT")
