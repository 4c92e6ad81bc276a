import pytest

from qcpg.errors import Diagnostics
from qcpg.kinds import NodeKind
from qcpg.metrics import METRIC_KEYS, compute_all, compute_metrics
from qcpg.pipeline import analyze_source


def _reports(src, file="t.py", diags=None):
    return compute_all(analyze_source(src, file).graph, diags)


def test_listing1_and_listing2_agree(fixture_path):
    r1, = _reports(open(fixture_path("listing1.py")).read())
    r2, = _reports(open(fixture_path("listing2.qasm")).read(), "listing2.qasm")
    assert r1.values == r2.values
    assert (r1["Width"], r1["NoGates"], r1["NoH"], r1["Depth"], r1["PercentQubitsH"]) == (1, 1, 1, 1, 1.0)


def test_complex_metrics(complex_source):
    r, = _reports(complex_source)
    assert {k: r[k] for k in METRIC_KEYS if k != "PercentQubitsH"} == {
        "Width": 4, "Depth": 2, "NoGates": 4, "NoP-X": 1, "NoP-Y": 0, "NoP-Z": 0, "TNo-P": 1, "NoH": 2}
    assert r["PercentQubitsH"] == pytest.approx(0.5, abs=1e-9)


def test_no_gates():
    r, = _reports("qc = QuantumCircuit(3, 3)\nqc.measure(0, 0)\n")
    assert r["NoGates"] == 0 and r["Depth"] == 0 and r["PercentQubitsH"] == 0.0


def test_empty_circuit_warns():
    diags = Diagnostics()
    r, = _reports("qc = QuantumCircuit(0)\n", diags=diags)
    assert r["Width"] == 0 and r["PercentQubitsH"] == 0
    assert diags.codes() == ["EmptyCircuit"]


def test_h_counted_once_per_qubit():
    r, = _reports("qc = QuantumCircuit(2)\nqc.h(0)\nqc.h(0)\nqc.y(1)\nqc.z(1)\n")
    assert r["NoH"] == 2 and r["PercentQubitsH"] == 0.5
    assert r["TNo-P"] == r["NoP-X"] + r["NoP-Y"] + r["NoP-Z"] == 2
    assert r["Depth"] == 2


def test_gates_inside_classic_if_are_counted():
    r, = _reports("qc = QuantumCircuit(1, 1)\nqc.x(0).c_if(0, 1)\n")
    assert r["NoGates"] == 1 and r["NoP-X"] == 1


def test_table_labels_depth():
    r, = _reports("qc = QuantumCircuit(1)\nqc.h(0)\n")
    assert "Depth(paper)" in r.table()
    assert list(r.to_dict())[1:] == list(METRIC_KEYS)


def test_metrics_per_circuit():
    reports = _reports("a = QuantumCircuit(1)\nb = QuantumCircuit(2)\na.h(0)\nb.x(1)\n")
    assert [(r.name, r["Width"], r["NoH"]) for r in reports] == [("a", 1, 1), ("b", 2, 0)]


def test_compute_metrics_single_circuit():
    g = analyze_source("a = QuantumCircuit(1)\n", "x.py").graph
    circuit, = [n.id for n in g.nodes(NodeKind.QuantumCircuit)]
    assert compute_metrics(g, circuit)["Width"] == 1
