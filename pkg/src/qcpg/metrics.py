"""Circuit complexity metrics computed from the quantum subgraph."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from qcpg.errors import Diagnostics
from qcpg.graph import NodeId, PropertyGraph
from qcpg.kinds import EdgeKind, NodeKind

METRIC_KEYS = ("Width", "Depth", "NoGates", "NoP-X", "NoP-Y", "NoP-Z", "TNo-P", "NoH", "PercentQubitsH")


@dataclass(frozen=True)
class MetricReport:
    circuit: NodeId
    name: str
    values: dict

    def __getitem__(self, key: str):
        return self.values[key]

    def to_dict(self) -> dict:
        return {"circuit": self.name, **{k: self.values[k] for k in METRIC_KEYS}}

    def table(self) -> str:
        rows = [(("Depth(paper)" if k == "Depth" else k), self.values[k]) for k in METRIC_KEYS]
        width = max(len(k) for k, _ in rows)
        lines = [f"circuit {self.name}"]
        for k, v in rows:
            shown = f"{v:.4f}" if isinstance(v, float) else str(v)
            lines.append(f"  {k:<{width}}  {shown}")
        return "\n".join(lines)


def compute_metrics(graph: PropertyGraph, circuit: NodeId,
                    diagnostics: Optional[Diagnostics] = None) -> MetricReport:
    """Width, per-qubit gate depth, gate counts and the share of qubits receiving H."""
    g = graph
    node = g[circuit]
    mine = [n for n in g.nodes() if n.props.get("circuit") == circuit]
    qubits = [n.id for n in mine if n.kind == NodeKind.QuantumBit]
    gates = [n for n in mine if n.has_label("QuantumGate")]
    count = {k: sum(1 for n in gates if n.kind == k) for k in
             (NodeKind.QuantumGateX, NodeKind.QuantumGateY, NodeKind.QuantumGateZ, NodeKind.QuantumGateH)}
    width = len(qubits)
    depth = max((len(g.out_edges(q, EdgeKind.RELEVANT_FOR_GATES)) for q in qubits), default=0)
    h_qubits = set()
    for n in gates:
        if n.kind != NodeKind.QuantumGateH:
            continue
        for e in g.out_edges(n.id, EdgeKind.GATE_OPERAND):
            if e.index == 0:
                h_qubits.update(g.successors(e.dst, EdgeKind.REFERS_TO))
    if width == 0:
        if diagnostics is not None:
            diagnostics.warn("EmptyCircuit", f"circuit '{node.name}' has no qubits", node.location)
        ratio = 0.0
    else:
        ratio = len(h_qubits) / width
    px, py, pz = count[NodeKind.QuantumGateX], count[NodeKind.QuantumGateY], count[NodeKind.QuantumGateZ]
    values = {
        "Width": width,
        "Depth": depth,
        "NoGates": len(gates),
        "NoP-X": px,
        "NoP-Y": py,
        "NoP-Z": pz,
        "TNo-P": px + py + pz,
        "NoH": count[NodeKind.QuantumGateH],
        "PercentQubitsH": ratio,
    }
    return MetricReport(circuit, node.name, values)


def compute_all(graph: PropertyGraph, diagnostics: Optional[Diagnostics] = None) -> list[MetricReport]:
    return [compute_metrics(graph, n.id, diagnostics) for n in graph.nodes(NodeKind.QuantumCircuit)]
