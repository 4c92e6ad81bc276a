"""Materialize quantum nodes (circuits, bits, gates, measures) from the classical CPG."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from qcpg.errors import BadOperand, Diagnostics, NonConstantSize
from qcpg.graph import NodeId, PropertyGraph, SourceLocation
from qcpg.kinds import EdgeKind, NodeKind

SINGLE_QUBIT_GATES = {
    "h": NodeKind.QuantumGateH,
    "x": NodeKind.QuantumGateX,
    "y": NodeKind.QuantumGateY,
    "z": NodeKind.QuantumGateZ,
}
TWO_QUBIT_GATES = {
    "cx": NodeKind.QuantumGateCX,
    "cnot": NodeKind.QuantumGateCX,
    "CX": NodeKind.QuantumGateCX,
}
# circuit methods that neither touch qubits nor deserve a warning
NON_OPERATIONS = frozenset({
    "barrier", "draw", "depth", "size", "width", "copy", "count_ops", "qasm",
    "decompose", "to_gate", "to_instruction", "num_qubits", "num_clbits",
    "add_register", "assign_parameters", "bind_parameters", "name",
})


@dataclass
class CircuitSite:
    """Where a circuit is created in the classical CPG."""

    frontend: str  # "qiskit" | "qasm"
    declaration: NodeId  # variable target, or the translation unit for QASM
    call: Optional[NodeId]  # QuantumCircuit(...) call; None for QASM
    name: str
    location: SourceLocation
    qregs: list[tuple[str, int, Optional[NodeId]]]
    cregs: list[tuple[str, int, Optional[NodeId]]]
    program: object = None

    @property
    def qubit_count(self) -> int:
        return sum(size for _, size, _ in self.qregs)

    @property
    def clbit_count(self) -> int:
        return sum(size for _, size, _ in self.cregs)


@dataclass
class Circuit:
    node: NodeId
    site: CircuitSite
    qubits: list[NodeId] = field(default_factory=list)
    clbits: list[NodeId] = field(default_factory=list)
    operations: list[NodeId] = field(default_factory=list)  # top level, source order
    initializations: list[tuple[NodeId, int]] = field(default_factory=list)

    @property
    def frontend(self) -> str:
        return self.site.frontend


def _initializer(g: PropertyGraph, target: NodeId) -> Optional[NodeId]:
    for e in g.in_edges(target, EdgeKind.LHS):
        if g[e.src].kind == NodeKind.Assignment:
            return g.child(e.src, EdgeKind.RHS)
    return None


def _int_literal(g: PropertyGraph, nid: NodeId) -> Optional[int]:
    n = g[nid]
    if n.kind == NodeKind.IntLiteral:
        return int(n.props["value"])
    return None


def _positional_args(g: PropertyGraph, call: NodeId) -> list[NodeId]:
    edges = [e for e in g.out_edges(call, EdgeKind.ARGUMENT) if "name" not in e.props]
    return [e.dst for e in sorted(edges, key=lambda e: e.index)]


def _keyword_args(g: PropertyGraph, call: NodeId) -> dict[str, NodeId]:
    return {str(e.props["name"]): e.dst for e in g.out_edges(call, EdgeKind.ARGUMENT) if "name" in e.props}


def find_circuits(graph: PropertyGraph, program) -> list[CircuitSite]:
    """Locate circuit constructions in one translation unit."""
    g = graph
    if program.frontend == "qasm":
        qregs, cregs = [], []
        for s in program.statements:
            n = g[s]
            if n.kind == NodeKind.QuantumRegisterDeclaration:
                qregs.append((n.name, int(n.props["size"]), s))
            elif n.kind == NodeKind.ClassicRegisterDeclaration:
                cregs.append((n.name, int(n.props["size"]), s))
        if not qregs and not cregs:
            return []
        stem = program.file.rsplit("/", 1)[-1].rsplit(".", 1)[0]
        return [CircuitSite("qasm", program.unit, None, stem, g[program.unit].location,
                            qregs, cregs, program)]

    sites = []
    for nid in program.node_ids:
        if g[nid].kind != NodeKind.Assignment:
            continue
        rhs = g.child(nid, EdgeKind.RHS)
        target = g.child(nid, EdgeKind.LHS)
        call = g[rhs]
        if call.kind != NodeKind.CallExpression or call.name != "QuantumCircuit":
            continue
        if g[target].kind not in (NodeKind.VariableDeclaration, NodeKind.Reference):
            continue
        sizes = []
        for arg in _positional_args(g, rhs)[:2]:
            value = _int_literal(g, arg)
            if value is None or value < 0:
                raise NonConstantSize(g[arg].location,
                                      "QuantumCircuit sizes must be non-negative integer literals")
            sizes.append(value)
        if len(_positional_args(g, rhs)) > 2:
            raise NonConstantSize(call.location, "QuantumCircuit takes at most two integer sizes")
        nq = sizes[0] if sizes else 0
        nc = sizes[1] if len(sizes) > 1 else 0
        qregs = [("q", nq, None)] if nq else []
        cregs = [("c", nc, None)] if nc else []
        sites.append(CircuitSite("qiskit", target, rhs, g[target].name, call.location,
                                 qregs, cregs, program))
    return sites


class _Builder:
    def __init__(self, g: PropertyGraph, site: CircuitSite, diags: Diagnostics):
        self.g = g
        self.site = site
        self.diags = diags
        self.qreg_offset: dict[str, tuple[int, int]] = {}
        self.creg_offset: dict[str, tuple[int, int]] = {}

    def new(self, kind: NodeKind, name: str, loc: Optional[SourceLocation], **props) -> NodeId:
        props["circuit"] = self.circuit.node
        return self.g.add_node(kind, name, loc, props)

    def build(self) -> Circuit:
        g, site = self.g, self.site
        cnode = g.add_node(NodeKind.QuantumCircuit, site.name, site.location, {
            "qubitCount": site.qubit_count,
            "clbitCount": site.clbit_count,
            "frontend": site.frontend,
            "declaration": site.declaration,
        })
        self.circuit = Circuit(cnode, site)
        self._registers(site.qregs, NodeKind.QuantumRegister, NodeKind.QuantumBit,
                        self.circuit.qubits, self.qreg_offset)
        self._registers(site.cregs, NodeKind.ClassicRegister, NodeKind.ClassicBit,
                        self.circuit.clbits, self.creg_offset)
        if site.frontend == "qasm":
            self._qasm_operations()
        else:
            self._qiskit_operations()
        for i, op in enumerate(self.circuit.operations):
            g.add_edge(cnode, op, EdgeKind.AST, {"index": i, "role": "operation"})
        return self.circuit

    def _registers(self, regs, reg_kind, bit_kind, bits, offsets):
        g = self.g
        for name, size, decl in regs:
            loc = g[decl].location if decl is not None else self.site.location
            reg = self.new(reg_kind, name, loc, size=size)
            g.add_edge(self.circuit.node, reg, EdgeKind.AST, {"role": "register"})
            offsets[name] = (len(bits), size)
            for i in range(size):
                bit = self.new(bit_kind, f"{name}{i}", loc, index=len(bits), register=name)
                g.add_edge(reg, bit, EdgeKind.AST, {"index": i})
                bits.append(bit)

    # -- shared node construction ------------------------------------------

    def qubit_ref(self, index: int, loc) -> NodeId:
        bit = self.circuit.qubits[index]
        ref = self.new(NodeKind.QuantumBitReference, self.g[bit].name, loc, index=index)
        self.g.add_edge(ref, bit, EdgeKind.REFERS_TO)
        return ref

    def clbit_ref(self, index: int, loc) -> NodeId:
        bit = self.circuit.clbits[index]
        ref = self.new(NodeKind.ClassicBitReference, self.g[bit].name, loc, index=index)
        self.g.add_edge(ref, bit, EdgeKind.REFERS_TO)
        return ref

    def gate(self, kind: NodeKind, name: str, call: NodeId, operands: list[tuple[int, SourceLocation]]) -> NodeId:
        g = self.g
        loc = g[call].location
        seen = [q for q, _ in operands]
        if len(set(seen)) != len(seen):
            raise BadOperand(loc, f"gate '{name}' uses the same qubit twice")
        node = self.new(kind, name, loc, call=call)
        for i, (q, oloc) in enumerate(operands):
            ref = self.qubit_ref(q, oloc)
            g.add_edge(node, ref, EdgeKind.GATE_OPERAND, {"index": i})
            g.ensure_edge(self.circuit.qubits[q], node, EdgeKind.RELEVANT_FOR_GATES)
        return node

    def measure(self, call: NodeId, q: int, qloc, c: int, cloc) -> NodeId:
        g = self.g
        node = self.new(NodeKind.QuantumMeasure, "measure", g[call].location, call=call)
        g.add_edge(node, self.qubit_ref(q, qloc), EdgeKind.QU_BIT)
        g.add_edge(node, self.clbit_ref(c, cloc), EdgeKind.C_BIT)
        return node

    def reset(self, call: NodeId, q: int, qloc) -> NodeId:
        node = self.new(NodeKind.QuantumResetGeneric, "reset", self.g[call].location, call=call)
        self.g.add_edge(node, self.qubit_ref(q, qloc), EdgeKind.GATE_OPERAND, {"index": 0})
        return node

    def classic_if(self, anchor: NodeId, operator: str, bits: list[tuple[int, SourceLocation]],
                   value: NodeId, body: list[NodeId]) -> NodeId:
        g = self.g
        loc = g[anchor].location
        node = self.new(NodeKind.ClassicIf, "if", loc, call=anchor)
        cmp_ = self.new(NodeKind.BinaryOperator, operator, loc, operator=operator)
        g.add_edge(node, cmp_, EdgeKind.CONDITION)
        for i, (c, cloc) in enumerate(bits):
            g.add_edge(cmp_, self.clbit_ref(c, cloc), EdgeKind.LHS, {"index": i})
        g.add_edge(cmp_, value, EdgeKind.RHS)
        for i, op in enumerate(body):
            g.add_edge(node, op, EdgeKind.BODY, {"index": i})
        return node

    def check_qubit(self, index: int, loc) -> int:
        if not 0 <= index < len(self.circuit.qubits):
            raise BadOperand(loc, f"qubit index {index} out of range for {len(self.circuit.qubits)} qubit(s)")
        return index

    def check_clbit(self, index: int, loc) -> int:
        if not 0 <= index < len(self.circuit.clbits):
            raise BadOperand(loc, f"clbit index {index} out of range for {len(self.circuit.clbits)} clbit(s)")
        return index

    # -- Qiskit ---------------------------------------------------------------

    def _indices(self, arg: NodeId, what: str) -> list[tuple[int, SourceLocation]]:
        """An integer literal or a list of them."""
        g = self.g
        n = g[arg]
        value = _int_literal(g, arg)
        if value is not None:
            return [(value, n.location)]
        if n.kind == NodeKind.ListLiteral:
            out = []
            for e in g.successors(arg, EdgeKind.AST):
                v = _int_literal(g, e)
                if v is None:
                    raise BadOperand(g[e].location, f"{what} must be an integer literal")
                out.append((v, g[e].location))
            return out
        raise BadOperand(n.location, f"{what} must be an integer literal or a list of them")

    def _qubits(self, arg: NodeId) -> list[tuple[int, SourceLocation]]:
        return [(self.check_qubit(i, loc), loc) for i, loc in self._indices(arg, "qubit operand")]

    def _clbits(self, arg: NodeId) -> list[tuple[int, SourceLocation]]:
        return [(self.check_clbit(i, loc), loc) for i, loc in self._indices(arg, "clbit operand")]

    def _circuit_calls(self) -> list[NodeId]:
        g, site = self.g, self.site
        calls = []
        for nid in site.program.node_ids:
            n = g[nid]
            if n.kind != NodeKind.CallExpression:
                continue
            base = g.child(nid, EdgeKind.AST, role="base")
            if base is None or g[base].kind != NodeKind.Reference:
                continue
            if site.declaration in g.predecessors(base, EdgeKind.DFG):
                calls.append(nid)
        return calls

    def _qiskit_operations(self):
        g = self.g
        for call in self._circuit_calls():
            ops = self._qiskit_call(call)
            wrapper = next((p for p in g.predecessors(call, EdgeKind.AST)
                            if g[p].kind == NodeKind.CallExpression and g[p].name == "c_if"
                            and g.child(p, EdgeKind.AST, role="base") == call), None)
            if wrapper is not None and ops:
                args = _positional_args(g, wrapper)
                if len(args) != 2:
                    raise BadOperand(g[wrapper].location, "c_if expects (clbit, value)")
                bits = self._clbits(args[0])
                if _int_literal(g, args[1]) is None:
                    raise BadOperand(g[args[1]].location, "c_if value must be an integer literal")
                ops = [self.classic_if(wrapper, "==", bits, args[1], ops)]
            self.circuit.operations.extend(ops)

    def _qiskit_call(self, call: NodeId) -> list[NodeId]:
        g = self.g
        name = g[call].name
        args = _positional_args(g, call)
        loc = g[call].location
        if name in SINGLE_QUBIT_GATES:
            if len(args) != 1:
                raise BadOperand(loc, f"gate '{name}' expects 1 qubit operand, got {len(args)}")
            return [self.gate(SINGLE_QUBIT_GATES[name], name, call, [q]) for q in self._qubits(args[0])]
        if name in TWO_QUBIT_GATES:
            if len(args) != 2:
                raise BadOperand(loc, f"gate '{name}' expects 2 qubit operands, got {len(args)}")
            ctrl, tgt = self._qubits(args[0]), self._qubits(args[1])
            if len(ctrl) != len(tgt):
                raise BadOperand(loc, f"gate '{name}' operand lists differ in length")
            return [self.gate(TWO_QUBIT_GATES[name], name, call, [c, t]) for c, t in zip(ctrl, tgt)]
        if name == "measure":
            if len(args) != 2:
                raise BadOperand(loc, "measure expects (qubits, clbits)")
            qs, cs = self._qubits(args[0]), self._clbits(args[1])
            if len(qs) != len(cs):
                raise BadOperand(loc, "measure qubit and clbit lists differ in length")
            return [self.measure(call, q, ql, c, cl) for (q, ql), (c, cl) in zip(qs, cs)]
        if name == "reset":
            if len(args) != 1:
                raise BadOperand(loc, "reset expects one qubit operand")
            return [self.reset(call, q, ql) for q, ql in self._qubits(args[0])]
        if name == "initialize":
            self._initialize(call, args)
            return []
        if name in NON_OPERATIONS or name == "c_if":
            return []
        return [self._generic(call, name, args)]

    def _initialize(self, call: NodeId, args: list[NodeId]):
        g = self.g
        kwargs = _keyword_args(g, call)
        params = args[0] if args else kwargs.get("params")
        if params is None:
            raise BadOperand(g[call].location, "initialize expects a state argument")
        target = args[1] if len(args) > 1 else kwargs.get("qubits")
        if target is None:
            qubits = list(range(len(self.circuit.qubits)))
        else:
            qubits = [q for q, _ in self._qubits(target)]
        for q in qubits:
            self.circuit.initializations.append((params, q))

    def _generic(self, call: NodeId, name: str, args: list[NodeId]) -> NodeId:
        g = self.g
        self.diags.warn("UnknownOperation", f"unrecognized circuit operation '{name}'", g[call].location)
        operands = []
        for a in args:
            n = g[a]
            if n.kind == NodeKind.IntLiteral or (
                    n.kind == NodeKind.ListLiteral
                    and all(_int_literal(g, e) is not None for e in g.successors(a, EdgeKind.AST))):
                operands.extend(self._qubits(a))
        return self.gate(NodeKind.QuantumGateGeneric, name, call, operands)

    # -- OpenQASM -------------------------------------------------------------

    def _qasm_operand(self, arg: NodeId, quantum: bool) -> list[tuple[int, SourceLocation]]:
        g = self.g
        n = g[arg]
        offsets = self.qreg_offset if quantum else self.creg_offset
        what = "qubit" if quantum else "clbit"
        if n.kind == NodeKind.SubscriptExpression:
            base = g.child(arg, EdgeKind.AST, role="base")
            index = _int_literal(g, g.child(arg, EdgeKind.AST, role="index"))
            reg = g[base].name
        elif n.kind == NodeKind.Reference:
            reg, index = n.name, None
        else:
            raise BadOperand(n.location, f"{what} operand must be a register or register element")
        if reg not in offsets:
            raise BadOperand(n.location, f"'{reg}' is not a {'quantum' if quantum else 'classical'} register")
        offset, size = offsets[reg]
        if index is None:
            return [(offset + i, n.location) for i in range(size)]
        if not 0 <= index < size:
            raise BadOperand(n.location, f"index {index} out of range for register '{reg}' of size {size}")
        return [(offset + index, n.location)]

    def _broadcast(self, call: NodeId, operands: list[list[tuple[int, SourceLocation]]]):
        sizes = {len(o) for o in operands if len(o) != 1}
        if len(sizes) > 1:
            raise BadOperand(self.g[call].location, "register operands differ in size")
        width = sizes.pop() if sizes else 1
        return [[o[0] if len(o) == 1 else o[k] for o in operands] for k in range(width)]

    def _qasm_call(self, call: NodeId) -> list[NodeId]:
        g = self.g
        name = g[call].name
        args = _positional_args(g, call)
        loc = g[call].location
        if name == "measure":
            qs = self._qasm_operand(args[0], True)
            cs = self._qasm_operand(args[1], False)
            if len(qs) != len(cs):
                raise BadOperand(loc, "measure operands differ in size")
            return [self.measure(call, q, ql, c, cl) for (q, ql), (c, cl) in zip(qs, cs)]
        if name == "reset":
            return [self.reset(call, q, ql) for q, ql in self._qasm_operand(args[0], True)]
        operands = [self._qasm_operand(a, True) for a in args]
        if name in SINGLE_QUBIT_GATES or name in TWO_QUBIT_GATES:
            kind = SINGLE_QUBIT_GATES.get(name) or TWO_QUBIT_GATES[name]
            arity = 1 if name in SINGLE_QUBIT_GATES else 2
            if len(operands) != arity:
                raise BadOperand(loc, f"gate '{name}' expects {arity} qubit operand(s), got {len(operands)}")
        else:
            kind = NodeKind.QuantumGateGeneric
            self.diags.warn("UnknownOperation", f"unrecognized gate '{name}'", loc)
        return [self.gate(kind, name, call, ops) for ops in self._broadcast(call, operands)]

    def _qasm_operations(self):
        g = self.g
        for s in self.site.program.statements:
            n = g[s]
            if n.kind == NodeKind.CallExpression:
                self.circuit.operations.extend(self._qasm_call(s))
            elif n.kind == NodeKind.IfStatement:
                self.circuit.operations.append(self._qasm_if(s))

    def _qasm_if(self, stmt: NodeId) -> NodeId:
        g = self.g
        cond = g.child(stmt, EdgeKind.CONDITION)
        lhs, rhs = g.child(cond, EdgeKind.LHS), g.child(cond, EdgeKind.RHS)
        if _int_literal(g, rhs) is None:
            raise BadOperand(g[rhs].location, "classic-if comparison value must be an integer literal")
        bits = self._qasm_operand(lhs, False)
        body = []
        for s in g.successors(g.child(stmt, EdgeKind.BODY), EdgeKind.AST):
            if g[s].kind == NodeKind.CallExpression:
                body.extend(self._qasm_call(s))
        return self.classic_if(stmt, str(g[cond].props.get("operator", "==")), bits, rhs, body)


def build_quantum_nodes(graph: PropertyGraph, site: CircuitSite,
                        diagnostics: Optional[Diagnostics] = None) -> Circuit:
    """Create the quantum subgraph for one circuit site."""
    return _Builder(graph, site, diagnostics if diagnostics is not None else Diagnostics()).build()


def operands_of(graph: PropertyGraph, op: NodeId, kind: EdgeKind = None) -> list[NodeId]:
    """Bit references owned by an operation, in operand order."""
    kinds = (EdgeKind.GATE_OPERAND, EdgeKind.QU_BIT, EdgeKind.C_BIT) if kind is None else (kind,)
    edges = graph.out_edges(op, kinds)
    return [e.dst for e in sorted(edges, key=lambda e: (e.kind != EdgeKind.GATE_OPERAND, e.index or 0))]


def bit_of(graph: PropertyGraph, ref: NodeId) -> NodeId:
    return graph.successors(ref, EdgeKind.REFERS_TO)[0]


def circuit_nodes(graph: PropertyGraph, circuit: NodeId, kind=None, label: Optional[str] = None):
    return [n for n in graph.nodes(kind, label) if n.props.get("circuit") == circuit]
