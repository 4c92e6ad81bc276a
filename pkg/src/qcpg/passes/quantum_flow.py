"""Quantum evaluation order, qubit/clbit dataflow, and the classical/quantum bridge."""
from __future__ import annotations

import logging
from collections import deque
from typing import Callable, Iterable, Optional

from qcpg.errors import Diagnostics
from qcpg.graph import NodeId, PropertyGraph
from qcpg.kinds import EdgeKind, NodeKind
from qcpg.passes.quantum_builder import Circuit, bit_of

log = logging.getLogger(__name__)

# walk verdicts
HIT_STOP = "stop"
HIT_PASS = "pass"


def _body(g: PropertyGraph, classic_if: NodeId) -> list[NodeId]:
    edges = sorted(g.out_edges(classic_if, EdgeKind.BODY), key=lambda e: e.index)
    return [e.dst for e in edges]


def add_quantum_eog(graph: PropertyGraph, circuit: Circuit) -> None:
    """Chain operations in source order; a ClassicIf branches around its body."""
    g = graph
    exits: list[NodeId] = []
    for op in circuit.operations:
        for x in exits:
            g.ensure_edge(x, op, EdgeKind.EOG)
        if g[op].kind == NodeKind.ClassicIf:
            cmp_ = g.child(op, EdgeKind.CONDITION)
            g.ensure_edge(op, cmp_, EdgeKind.EOG)
            body = _body(g, op)
            prev = cmp_
            for b in body:
                g.ensure_edge(prev, b, EdgeKind.EOG)
                prev = b
            exits = [cmp_] if not body else [cmp_, body[-1]]
        else:
            exits = [op]


def add_intra_operation_dfg(graph: PropertyGraph, circuits: Iterable[Circuit] = ()) -> None:
    """Flows inside one operation: control to target, qubit to clbit on measure.

    Unrecognized multi-qubit gates are treated like controlled gates: each
    operand flows into every later operand. This keeps the DFG acyclic.
    """
    g = graph
    wanted = {c.node for c in circuits} or None
    for node in list(g.nodes()):
        if wanted is not None and node.props.get("circuit") not in wanted:
            continue
        if node.kind == NodeKind.QuantumMeasure:
            g.ensure_edge(g.child(node.id, EdgeKind.QU_BIT), g.child(node.id, EdgeKind.C_BIT), EdgeKind.DFG)
        elif node.kind in (NodeKind.QuantumGateCX, NodeKind.QuantumGateGeneric):
            refs = [e.dst for e in sorted(g.out_edges(node.id, EdgeKind.GATE_OPERAND), key=lambda e: e.index)]
            for i, a in enumerate(refs):
                for b in refs[i + 1:]:
                    g.ensure_edge(a, b, EdgeKind.DFG)


def _walk(g: PropertyGraph, starts: Iterable[NodeId],
          classify: Callable[[NodeId], Optional[str]]) -> tuple[list[NodeId], bool]:
    """Follow EOG from ``starts``; return hit nodes and whether the end was reachable
    without passing a stopping hit."""
    hits: list[NodeId] = []
    seen: set[NodeId] = set()
    queue = deque(starts)
    reached_end = not queue
    while queue:
        n = queue.popleft()
        if n in seen:
            continue
        seen.add(n)
        verdict = classify(n)
        if verdict is not None:
            hits.append(n)
            if verdict == HIT_STOP:
                continue
        succ = g.successors(n, EdgeKind.EOG)
        if not succ:
            reached_end = True
        queue.extend(succ)
    return hits, reached_end


def _qubit_refs_at(g: PropertyGraph, op: NodeId, qubit: NodeId) -> list[NodeId]:
    kind = g[op].kind
    if kind == NodeKind.QuantumMeasure:
        refs = g.successors(op, EdgeKind.QU_BIT)
    elif kind.is_gate or kind == NodeKind.QuantumResetGeneric:
        refs = g.successors(op, EdgeKind.GATE_OPERAND)
    else:
        return []
    return [r for r in refs if bit_of(g, r) == qubit]


def _clbit_writes_at(g: PropertyGraph, op: NodeId, clbit: NodeId) -> list[NodeId]:
    if g[op].kind != NodeKind.QuantumMeasure:
        return []
    return [r for r in g.successors(op, EdgeKind.C_BIT) if bit_of(g, r) == clbit]


def _clbit_reads_at(g: PropertyGraph, op: NodeId, clbit: NodeId) -> list[NodeId]:
    if g[op].kind != NodeKind.ClassicIf:
        return []
    cmp_ = g.child(op, EdgeKind.CONDITION)
    return [r for r in g.successors(cmp_, EdgeKind.LHS) if bit_of(g, r) == clbit]


def _entry(circuit: Circuit) -> list[NodeId]:
    return circuit.operations[:1]


def add_qubit_chain_dfg(graph: PropertyGraph, circuit: Circuit) -> None:
    """Link each qubit's successive references along every EOG path.

    A reset does not consume the previous state: the reset reference is fed
    from the QuantumBit itself. The same walk links clbit writes (measure)
    to later reads (ClassicIf comparisons).
    """
    g = graph
    for q in circuit.qubits:
        def at(n, q=q):
            return HIT_STOP if _qubit_refs_at(g, n, q) else None

        def link(src: NodeId, hits: list[NodeId]):
            for h in hits:
                if g[h].kind == NodeKind.QuantumResetGeneric:
                    continue
                for r in _qubit_refs_at(g, h, q):
                    g.ensure_edge(src, r, EdgeKind.DFG)

        first, _ = _walk(g, _entry(circuit), at)
        link(q, first)
        for ref in g.predecessors(q, EdgeKind.REFERS_TO):
            node = _owner(g, ref)
            if g[node].kind == NodeKind.QuantumResetGeneric:
                g.ensure_edge(q, ref, EdgeKind.DFG)
            hits, _ = _walk(g, g.successors(node, EdgeKind.EOG), at)
            link(ref, hits)

    for c in circuit.clbits:
        def touch(n, c=c):
            if _clbit_writes_at(g, n, c):
                return HIT_STOP
            if _clbit_reads_at(g, n, c):
                return HIT_PASS
            return None

        def link_reads(src: NodeId, hits: list[NodeId]):
            for h in hits:
                for r in _clbit_reads_at(g, h, c):
                    g.ensure_edge(src, r, EdgeKind.DFG)

        first, _ = _walk(g, _entry(circuit), touch)
        link_reads(c, first)
        for m in _measures(g, circuit):
            for w in _clbit_writes_at(g, m, c):
                hits, _ = _walk(g, g.successors(m, EdgeKind.EOG), touch)
                link_reads(w, hits)


def _owner(g: PropertyGraph, ref: NodeId) -> NodeId:
    return g.predecessors(ref, (EdgeKind.GATE_OPERAND, EdgeKind.QU_BIT))[0]


def _measures(g: PropertyGraph, circuit: Circuit) -> list[NodeId]:
    return [n.id for n in g.nodes(NodeKind.QuantumMeasure) if n.props.get("circuit") == circuit.node]


def live_out_writes(graph: PropertyGraph, circuit: Circuit, clbit: NodeId) -> list[NodeId]:
    """Measure clbit references whose value can survive to the end of the circuit."""
    g = graph
    out = []
    for m in _measures(g, circuit):
        for w in _clbit_writes_at(g, m, clbit):
            _, end = _walk(g, g.successors(m, EdgeKind.EOG),
                           lambda n: HIT_STOP if _clbit_writes_at(g, n, clbit) else None)
            if end:
                out.append(w)
    return out


def fold_int(graph: PropertyGraph, nid: NodeId) -> Optional[int]:
    """Constant-fold an integer index expression (literals, unary and binary +/-)."""
    g = graph
    n = g[nid]
    if n.kind == NodeKind.IntLiteral:
        return int(n.props["value"])
    if n.kind == NodeKind.UnaryOperator:
        operand = g.children(nid)
        v = fold_int(g, operand[0]) if operand else None
        if v is None:
            return None
        return {"-": -v, "+": v}.get(str(n.props.get("operator", n.name)))
    if n.kind == NodeKind.BinaryOperator:
        lhs, rhs = g.child(nid, EdgeKind.LHS), g.child(nid, EdgeKind.RHS)
        if lhs is None or rhs is None:
            return None
        a, b = fold_int(g, lhs), fold_int(g, rhs)
        if a is None or b is None:
            return None
        op = str(n.props.get("operator", n.name))
        if op == "+":
            return a + b
        if op == "-":
            return a - b
    return None


def bitstring_index_to_clbit(k: int, clbit_count: int) -> Optional[int]:
    """Map an index into a counts key to a clbit index.

    Keys are little-endian strings: the last character is clbit 0.
    """
    bit = -k - 1 if k < 0 else clbit_count - 1 - k
    return bit if 0 <= bit < clbit_count else None


def _classical_forward(g: PropertyGraph, starts: Iterable[NodeId]) -> set[NodeId]:
    seen: set[NodeId] = set()
    stack = list(starts)
    while stack:
        n = stack.pop()
        for m in g.successors(n, EdgeKind.DFG):
            if m not in seen and not g[m].kind.is_quantum:
                seen.add(m)
                stack.append(m)
    return seen


def bridge_classic_quantum(graph: PropertyGraph, circuit: Circuit,
                           diagnostics: Optional[Diagnostics] = None) -> None:
    """Connect classical values into qubits (initialize) and results back out."""
    g = graph
    diags = diagnostics if diagnostics is not None else Diagnostics()
    for expr, q in circuit.initializations:
        g.ensure_edge(expr, circuit.qubits[q], EdgeKind.DFG)
    if circuit.frontend != "qiskit":
        return

    reach = _classical_forward(g, [circuit.site.declaration])
    results = sorted(n for n in reach if g[n].kind == NodeKind.CallExpression and g[n].name == "result")
    if not results:
        diags.warn("CircuitNotExecuted", f"results of circuit '{g[circuit.node].name}' are never fetched",
                   g[circuit.node].location)
        return
    crefs = [r for m in _measures(g, circuit) for r in g.successors(m, EdgeKind.C_BIT)]
    for r in crefs:
        for call in results:
            g.ensure_edge(r, call, EdgeKind.DFG)

    after_result = _classical_forward(g, results)
    counts = [n for n in sorted(after_result)
              if g[n].kind == NodeKind.CallExpression and g[n].name == "get_counts"]
    if not counts:
        return
    holders = _classical_forward(g, counts) | set(counts)
    nclbits = len(circuit.clbits)
    for n in g.nodes(NodeKind.SubscriptExpression):
        base = g.child(n.id, EdgeKind.AST, role="base")
        if base not in holders or n.props.get("access") == "write":
            continue
        index = g.child(n.id, EdgeKind.AST, role="index")
        k = fold_int(g, index) if index is not None else None
        if k is None:
            diags.warn("NonConstantIndex", f"cannot resolve result bit index in '{n.name}'", n.location)
            continue
        bit = bitstring_index_to_clbit(k, nclbits)
        if bit is None:
            diags.warn("IndexOutOfRange", f"'{n.name}' addresses no clbit of a {nclbits}-bit result",
                       n.location)
            continue
        for w in live_out_writes(g, circuit, circuit.clbits[bit]):
            g.ensure_edge(w, n.id, EdgeKind.DFG)
        log.debug("%s reads clbit %d", n.name, bit)
