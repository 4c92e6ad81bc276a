"""Evaluation order (EOG) and dataflow (DFG) over the classical CPG fragment."""
from __future__ import annotations

from collections import defaultdict
from typing import Optional

from qcpg.graph import NodeId, PropertyGraph
from qcpg.kinds import EdgeKind, NodeKind

# node kinds that define a name for reaching-definition purposes
DEFINITION_KINDS = frozenset({
    NodeKind.VariableDeclaration,
    NodeKind.ImportDeclaration,
    NodeKind.QuantumRegisterDeclaration,
    NodeKind.ClassicRegisterDeclaration,
})

_Segment = tuple[NodeId, list[NodeId]]  # (entry, exits)


def _is_write(g: PropertyGraph, nid: NodeId) -> bool:
    n = g[nid]
    return n.kind == NodeKind.Reference and n.props.get("access") == "write"


def _is_definition(g: PropertyGraph, nid: NodeId) -> bool:
    return g[nid].kind in DEFINITION_KINDS or _is_write(g, nid)


class _EogBuilder:
    def __init__(self, g: PropertyGraph):
        self.g = g

    def link(self, exits: list[NodeId], entry: NodeId):
        for x in exits:
            self.g.ensure_edge(x, entry, EdgeKind.EOG)

    def chain(self, nodes: list[NodeId]) -> Optional[_Segment]:
        for a, b in zip(nodes, nodes[1:]):
            self.g.ensure_edge(a, b, EdgeKind.EOG)
        return (nodes[0], [nodes[-1]]) if nodes else None

    def evaluation_order(self, expr: NodeId) -> list[NodeId]:
        """Post-order over syntactic children: operands before operators."""
        order = []
        for child in self.g.children(expr):
            order.extend(self.evaluation_order(child))
        order.append(expr)
        return order

    def sequence(self, stmts: list[NodeId]) -> Optional[_Segment]:
        entry, exits = None, []
        for s in stmts:
            seg = self.statement(s)
            if seg is None:
                continue
            if entry is None:
                entry = seg[0]
            else:
                self.link(exits, seg[0])
            exits = seg[1]
        return (entry, exits) if entry is not None else None

    def block(self, blk: Optional[NodeId]) -> Optional[_Segment]:
        if blk is None:
            return None
        return self.sequence(self.g.successors(blk, EdgeKind.AST))

    def statement(self, s: NodeId) -> Optional[_Segment]:
        g = self.g
        kind = g[s].kind
        if kind in (NodeKind.Barrier, NodeKind.Block):
            return self.block(s) if kind == NodeKind.Block else None
        if kind == NodeKind.Assignment:
            rhs = g.child(s, EdgeKind.RHS)
            lhs = g.child(s, EdgeKind.LHS)
            return self.chain(self.evaluation_order(rhs) + self.evaluation_order(lhs) + [s])
        if kind == NodeKind.IfStatement:
            return self.if_statement(s)
        if kind == NodeKind.ForEachStatement:
            return self.for_statement(s)
        return self.chain(self.evaluation_order(s))

    def if_statement(self, s: NodeId) -> _Segment:
        g = self.g
        cond = g.child(s, EdgeKind.CONDITION)
        cond_order = self.evaluation_order(cond)
        self.chain([s] + cond_order)
        decision = cond_order[-1]
        exits: list[NodeId] = []
        then_seg = self.block(g.child(s, EdgeKind.BODY))
        if then_seg is None:
            exits.append(decision)
        else:
            self.link([decision], then_seg[0])
            exits.extend(then_seg[1])
        else_seg = self.block(g.child(s, EdgeKind.AST, role="else"))
        if else_seg is None:
            if decision not in exits:
                exits.append(decision)
        else:
            self.link([decision], else_seg[0])
            exits.extend(else_seg[1])
        return s, exits

    def for_statement(self, s: NodeId) -> _Segment:
        g = self.g
        iterable = g.child(s, EdgeKind.AST, role="iterable")
        var = g.child(s, EdgeKind.AST, role="variable")
        entry, _ = self.chain(self.evaluation_order(iterable) + [var])
        body = self.block(g.child(s, EdgeKind.BODY))
        if body is None:
            self.link([var], s)
        else:
            self.link([var], body[0])
            self.link(body[1], s)
        # next iteration, and loop exit through the ForEach node
        g.ensure_edge(s, var, EdgeKind.EOG)
        return entry, [s]


def add_classical_eog(graph: PropertyGraph, program) -> None:
    """Chain the statements of ``program`` (a parsed translation unit) in evaluation order."""
    _EogBuilder(graph).sequence(program.statements)


def _eog_nodes(g: PropertyGraph, program) -> list[NodeId]:
    return [n for n in program.node_ids
            if g.in_edges(n, EdgeKind.EOG) or g.out_edges(n, EdgeKind.EOG)]


def reaching_definitions(graph: PropertyGraph, program) -> dict[NodeId, frozenset[NodeId]]:
    """Definitions reaching the entry of each EOG node (path-insensitive, flow-sensitive)."""
    g = graph
    nodes = _eog_nodes(g, program)
    defs_by_name: dict[str, set[NodeId]] = defaultdict(set)
    for n in nodes:
        if _is_definition(g, n):
            defs_by_name[g[n].name].add(n)
    reach_in: dict[NodeId, frozenset[NodeId]] = {n: frozenset() for n in nodes}
    reach_out: dict[NodeId, frozenset[NodeId]] = {n: frozenset() for n in nodes}
    work = list(nodes)
    queued = set(work)
    while work:
        n = work.pop(0)
        queued.discard(n)
        inn = frozenset().union(*(reach_out[p] for p in g.predecessors(n, EdgeKind.EOG)))
        reach_in[n] = inn
        if _is_definition(g, n):
            out = (inn - defs_by_name[g[n].name]) | {n}
        else:
            out = inn
        if out != reach_out[n]:
            reach_out[n] = out
            for m in g.successors(n, EdgeKind.EOG):
                if m not in queued:
                    work.append(m)
                    queued.add(m)
    return reach_in


def add_classical_dfg(graph: PropertyGraph, program) -> None:
    """Expression-level dataflow plus reaching-definition flows into reads."""
    g = graph
    for nid in program.node_ids:
        node = g[nid]
        kind = node.kind
        if kind == NodeKind.Assignment:
            g.ensure_edge(g.child(nid, EdgeKind.RHS), g.child(nid, EdgeKind.LHS), EdgeKind.DFG)
        elif kind == NodeKind.ForEachStatement:
            iterable = g.child(nid, EdgeKind.AST, role="iterable")
            var = g.child(nid, EdgeKind.AST, role="variable")
            g.ensure_edge(iterable, var, EdgeKind.DFG)
        elif kind == NodeKind.IfStatement:
            g.ensure_edge(g.child(nid, EdgeKind.CONDITION), nid, EdgeKind.DFG)
        elif kind in (NodeKind.CallExpression, NodeKind.MemberAccess, NodeKind.SubscriptExpression,
                      NodeKind.BinaryOperator, NodeKind.UnaryOperator, NodeKind.ListLiteral):
            if kind == NodeKind.SubscriptExpression and node.props.get("access") == "write":
                continue
            for child in g.children(nid):
                g.ensure_edge(child, nid, EdgeKind.DFG)

    reach = reaching_definitions(g, program)
    for nid in program.node_ids:
        node = g[nid]
        if node.kind != NodeKind.Reference or _is_write(g, nid) or nid not in reach:
            continue
        sources = sorted(d for d in reach[nid] if g[d].name == node.name)
        if not sources and "refersTo" in node.props:
            # textually declared but no EOG path delivers it: fall back to the declaration
            sources = [int(node.props["refersTo"])]
        for d in sources:
            g.ensure_edge(d, nid, EdgeKind.DFG)
