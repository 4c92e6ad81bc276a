"""Bug-pattern detectors: native traversals over a frozen QCPG."""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from qcpg.graph import NodeId, PropertyGraph, SourceLocation
from qcpg.kinds import EdgeKind, NodeKind

log = logging.getLogger(__name__)

SUPERFLUOUS_OPERATION = "SUPERFLUOUS_OPERATION"
CONSTANT_CLASSIC_BIT = "CONSTANT_CLASSIC_BIT"
CONSTANT_CONDITION = "CONSTANT_CONDITION"
RESULT_BIT_NOT_USED = "RESULT_BIT_NOT_USED"
CONSTANT_RESULT_BIT = "CONSTANT_RESULT_BIT"

# nodes a qubit's state can pass through inside the quantum part
_QUBIT_STATE = frozenset({NodeKind.QuantumBit, NodeKind.QuantumBitReference})
_BIT_STATE = _QUBIT_STATE | {NodeKind.ClassicBit, NodeKind.ClassicBitReference}


@dataclass(frozen=True)
class Finding:
    rule_id: str
    message: str
    nodes: tuple[NodeId, ...]
    location: SourceLocation
    evidence: tuple[NodeId, ...] = field(default=())

    def sort_key(self):
        loc = self.location
        return (self.rule_id, loc.file, loc.line, loc.column, self.nodes)

    def to_dict(self) -> dict:
        return {
            "rule": self.rule_id,
            "message": self.message,
            "file": self.location.file,
            "line": self.location.line,
            "col": self.location.column,
            "nodes": list(self.nodes),
            "evidence": list(self.evidence),
        }

    def __str__(self) -> str:
        return f"{self.location}: {self.rule_id}: {self.message}"


def _closure(g: PropertyGraph, start: NodeId, kinds: frozenset, direction: str = "bwd") -> set[NodeId]:
    """DFG closure from ``start`` (inclusive) that only passes through nodes of ``kinds``."""
    step = g.predecessors if direction == "bwd" else g.successors
    seen = {start}
    queue = deque([start])
    while queue:
        n = queue.popleft()
        for m in step(n, EdgeKind.DFG):
            if m not in seen and g[m].kind in kinds:
                seen.add(m)
                queue.append(m)
    return seen


def _gate_operand_refs(g: PropertyGraph) -> set[NodeId]:
    return {e.dst for e in g.edges(EdgeKind.GATE_OPERAND) if g[e.src].has_label("QuantumGate")}


def _measure_qrefs(g: PropertyGraph) -> set[NodeId]:
    return {e.dst for e in g.edges(EdgeKind.QU_BIT)}


def _bit(g: PropertyGraph, ref: NodeId) -> NodeId:
    return g.successors(ref, EdgeKind.REFERS_TO)[0]


def _gates(g: PropertyGraph) -> list[NodeId]:
    return [n.id for n in g.nodes(label="QuantumGate")]


def _measures(g: PropertyGraph) -> list[NodeId]:
    return [n.id for n in g.nodes(NodeKind.QuantumMeasure)]


def _path_from_roots(g: PropertyGraph, target: NodeId, closure: set[NodeId], roots: Iterable[NodeId]):
    for r in sorted(roots):
        path = g.shortest_path(r, target, EdgeKind.DFG, allowed=closure)
        if path:
            return path
    return [target]


def detect_superfluous_operation(graph: PropertyGraph) -> list[Finding]:
    """Gates with an operand whose state never reaches a measurement."""
    g = graph
    sinks = _measure_qrefs(g)
    out = []
    for gate in _gates(g):
        refs = [e.dst for e in sorted(g.out_edges(gate, EdgeKind.GATE_OPERAND), key=lambda e: e.index)]
        dead = [r for r in refs if not (g.reachable(r, EdgeKind.DFG) & sinks)]
        if not dead:
            continue
        names = ", ".join(g[r].name for r in dead)
        node = g[gate]
        out.append(Finding(
            SUPERFLUOUS_OPERATION,
            f"gate '{node.name}' does not affect any measurement through {names}",
            (gate, *dead), node.location, (gate, dead[0])))
    return out


def _measured_untouched(g: PropertyGraph, qref: NodeId, gate_refs: set[NodeId]) -> Optional[set[NodeId]]:
    """Backward qubit-state closure of ``qref`` if no gate operand lies on it."""
    closure = _closure(g, qref, _QUBIT_STATE)
    if closure & gate_refs:
        return None
    return closure


def detect_constant_classic_bit(graph: PropertyGraph) -> list[Finding]:
    """Measurements of qubits that no gate has touched."""
    g = graph
    gate_refs = _gate_operand_refs(g)
    out = []
    for m in _measures(g):
        qref = g.child(m, EdgeKind.QU_BIT)
        cref = g.child(m, EdgeKind.C_BIT)
        closure = _measured_untouched(g, qref, gate_refs)
        if closure is None:
            continue
        path = _path_from_roots(g, qref, closure, [_bit(g, qref)])
        out.append(Finding(
            CONSTANT_CLASSIC_BIT,
            f"measurement of {g[qref].name} into {g[cref].name} reads a qubit no gate has changed",
            (m, qref, cref), g[m].location, (*path, cref)))
    return out


def constant_cref(g: PropertyGraph, cref: NodeId, gate_refs: Optional[set[NodeId]] = None):
    """Return the backward bit-state closure of ``cref`` when its value is fixed, else None.

    Fixed means every qubit feeding it has no gate at all and no gate operand
    lies on the way. A bit that is never measured is fixed too.
    """
    gate_refs = _gate_operand_refs(g) if gate_refs is None else gate_refs
    closure = _closure(g, cref, _BIT_STATE)
    if closure & gate_refs:
        return None
    for n in closure:
        if g[n].kind == NodeKind.QuantumBit and g.out_edges(n, EdgeKind.RELEVANT_FOR_GATES):
            return None
    return closure


def _roots(g: PropertyGraph, closure: set[NodeId]) -> list[NodeId]:
    return [n for n in closure if g[n].kind in (NodeKind.QuantumBit, NodeKind.ClassicBit)]


def detect_constant_condition(graph: PropertyGraph) -> list[Finding]:
    """Classic-if conditions that only read bits with a fixed value."""
    g = graph
    gate_refs = _gate_operand_refs(g)
    out = []
    for n in g.nodes(NodeKind.ClassicIf):
        cmp_ = g.child(n.id, EdgeKind.CONDITION)
        crefs = [e.dst for e in sorted(g.out_edges(cmp_, EdgeKind.LHS), key=lambda e: e.index or 0)]
        closures = [constant_cref(g, c, gate_refs) for c in crefs]
        if not crefs or any(c is None for c in closures):
            continue
        # prefer a root that is a qubit, so the path shows where the value came from
        roots = sorted(_roots(g, closures[0]), key=lambda r: (g[r].kind != NodeKind.QuantumBit, r))
        path = _path_from_roots(g, crefs[0], closures[0], roots)
        names = ", ".join(g[c].name for c in crefs)
        out.append(Finding(
            CONSTANT_CONDITION,
            f"condition only depends on {names}, which no operation affects",
            (n.id, *crefs), n.location, tuple(path)))
    return out


def _circuit_of(g: PropertyGraph, nid: NodeId) -> Optional[NodeId]:
    c = g[nid].props.get("circuit")
    return int(c) if c is not None else None


def detect_result_bit_not_used(graph: PropertyGraph) -> list[Finding]:
    """Measured bits that are never read from the result bitstring.

    Applies to Qiskit circuits. If the result is never fetched every
    measured bit is reported. If it is fetched but no bitstring index is
    ever read, the program consumes results as whole keys and nothing is
    reported.
    """
    g = graph
    by_circuit: dict[NodeId, list[NodeId]] = {}
    for m in _measures(g):
        by_circuit.setdefault(_circuit_of(g, m), []).append(m)
    out = []
    for circuit, measures in sorted(by_circuit.items()):
        if g[circuit].props.get("frontend") != "qiskit":
            continue
        crefs = [(m, g.child(m, EdgeKind.C_BIT)) for m in measures]
        fetched = any(g[d].kind == NodeKind.CallExpression and g[d].name == "result"
                      for _, c in crefs for d in g.successors(c, EdgeKind.DFG))
        used = {c: [d for d in g.successors(c, EdgeKind.DFG) if g[d].kind == NodeKind.SubscriptExpression]
                for _, c in crefs}
        if fetched and not any(used.values()):
            continue
        for m, c in crefs:
            if used[c]:
                continue
            why = "the result is never read" if not fetched else "no bitstring access reads it"
            qref = g.child(m, EdgeKind.QU_BIT)
            out.append(Finding(
                RESULT_BIT_NOT_USED,
                f"measured bit {g[c].name} is unused: {why}",
                (c, m), g[m].location, (qref, c)))
    return out


def _origin_chain(g: PropertyGraph, start: NodeId) -> list[NodeId]:
    """Follow first DFG predecessors back from ``start``; oldest node first."""
    chain = [start]
    seen = {start}
    while True:
        preds = [p for p in g.predecessors(chain[-1], EdgeKind.DFG) if p not in seen]
        if not preds:
            break
        chain.append(preds[0])
        seen.add(preds[0])
    return chain[::-1]


def _classical_backward(g: PropertyGraph, start: NodeId) -> set[NodeId]:
    seen = {start}
    queue = deque([start])
    while queue:
        n = queue.popleft()
        for m in g.predecessors(n, EdgeKind.DFG):
            if m not in seen and not g[m].kind.is_quantum:
                seen.add(m)
                queue.append(m)
    return seen


def _guards_call(g: PropertyGraph, stmt: NodeId) -> bool:
    blocks = [b for b in (g.child(stmt, EdgeKind.BODY), g.child(stmt, EdgeKind.AST, role="else")) if b is not None]
    return any(g[d].kind == NodeKind.CallExpression for b in blocks for d in g.descendants(b))


def detect_constant_result_bit(graph: PropertyGraph) -> list[Finding]:
    """Classical branches decided by a result bit whose qubit no gate changed."""
    g = graph
    gate_refs = _gate_operand_refs(g)
    out = []
    for stmt in g.nodes(NodeKind.IfStatement):
        if not _guards_call(g, stmt.id):
            continue
        cond = g.child(stmt.id, EdgeKind.CONDITION)
        back = _classical_backward(g, cond)
        subscripts = sorted(n for n in back if g[n].kind == NodeKind.SubscriptExpression)
        seen: set[NodeId] = set()
        for sub in subscripts:
            for cref in g.predecessors(sub, EdgeKind.DFG):
                if g[cref].kind != NodeKind.ClassicBitReference or cref in seen:
                    continue
                seen.add(cref)
                closure = constant_cref(g, cref, gate_refs)
                if closure is None:
                    continue
                roots = sorted(_roots(g, closure), key=lambda r: (g[r].kind != NodeKind.QuantumBit, r))
                quantum = _path_from_roots(g, cref, closure, roots)
                origin = _origin_chain(g, quantum[0])[:-1]
                classical = g.shortest_path(sub, stmt.id, EdgeKind.DFG, allowed=back | {stmt.id}) or [sub]
                path = (*origin, *quantum, *classical)
                source = next((g[n].name for n in origin if g[n].kind == NodeKind.Reference), None)
                detail = f"; its value comes from '{source}'" if source else ""
                out.append(Finding(
                    CONSTANT_RESULT_BIT,
                    f"branch depends on result bit {g[cref].name}, which is never changed by any gate"
                    f" operation{detail}",
                    (stmt.id, cref, sub), stmt.location, path))
    return out


RULES: dict[str, Callable[[PropertyGraph], list[Finding]]] = {
    SUPERFLUOUS_OPERATION: detect_superfluous_operation,
    CONSTANT_CLASSIC_BIT: detect_constant_classic_bit,
    CONSTANT_CONDITION: detect_constant_condition,
    RESULT_BIT_NOT_USED: detect_result_bit_not_used,
    CONSTANT_RESULT_BIT: detect_constant_result_bit,
}


def run_all(graph: PropertyGraph, rules: Optional[Iterable[str]] = None) -> list[Finding]:
    """Run the selected detectors (all by default) and sort their findings."""
    if not graph.frozen:
        raise ValueError("detectors need a frozen graph")
    selected = list(RULES) if rules is None else list(rules)
    unknown = [r for r in selected if r not in RULES]
    if unknown:
        raise ValueError(f"unknown rule(s): {', '.join(unknown)}")
    findings = []
    for rule in selected:
        found = RULES[rule](graph)
        log.debug("%s: %d finding(s)", rule, len(found))
        findings.extend(found)
    return sorted(findings, key=Finding.sort_key)
