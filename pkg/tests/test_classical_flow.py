from qcpg.frontends.python import parse_python, resolve_references
from qcpg.graph import PropertyGraph
from qcpg.kinds import EdgeKind, NodeKind
from qcpg.passes.classical_flow import add_classical_dfg, add_classical_eog, reaching_definitions


def _build(src):
    prog = parse_python(src, "t.py")
    resolve_references(prog.graph, prog)
    add_classical_eog(prog.graph, prog)
    add_classical_dfg(prog.graph, prog)
    return prog.graph, prog


def _named(g, kind, name):
    return [n.id for n in g.nodes(kind) if n.name == name]


def test_assignment_evaluates_rhs_before_target():
    g, prog = _build("x = f(1)\n")
    lit, = [n.id for n in g.nodes(NodeKind.IntLiteral)]
    call, = _named(g, NodeKind.CallExpression, "f")
    decl, = _named(g, NodeKind.VariableDeclaration, "x")
    stmt = prog.statements[0]
    assert g.shortest_path(lit, stmt, EdgeKind.EOG) == [lit, call, decl, stmt]


def test_statements_are_chained():
    g, prog = _build("a = 1\nb = 2\n")
    first, second = prog.statements
    assert second in g.reachable(first, EdgeKind.EOG)


def test_if_without_else_can_skip_body():
    g, prog = _build("c = 1\nif c == 1:\n  act()\nafter()\n")
    act, = _named(g, NodeKind.CallExpression, "act")
    after, = _named(g, NodeKind.CallExpression, "after")
    cmp_, = [n.id for n in g.nodes(NodeKind.BinaryOperator)]
    assert act in g.successors(cmp_, EdgeKind.EOG)
    assert after in g.successors(cmp_, EdgeKind.EOG)
    assert after in g.successors(act, EdgeKind.EOG) or \
        g.shortest_path(act, after, EdgeKind.EOG) is not None


def test_for_loop_has_back_edge():
    g, prog = _build("for k in xs:\n  use(k)\n")
    loop = prog.statements[0]
    var = g.child(loop, EdgeKind.AST, role="variable")
    use, = _named(g, NodeKind.CallExpression, "use")
    assert var in g.successors(loop, EdgeKind.EOG)
    assert loop in g.reachable(use, EdgeKind.EOG)


def test_later_definition_kills_earlier():
    g, prog = _build("x = 1\nx = 2\ny = x\n")
    first, = _named(g, NodeKind.VariableDeclaration, "x")
    write = [n.id for n in g.nodes(NodeKind.Reference) if n.name == "x" and n.props.get("access") == "write"]
    read = [n.id for n in g.nodes(NodeKind.Reference) if n.name == "x" and n.props.get("access") != "write"]
    assert g.predecessors(read[0], EdgeKind.DFG) == write
    assert first not in g.predecessors(read[0], EdgeKind.DFG)


def test_branch_definitions_merge():
    g, prog = _build("x = 1\nif c:\n  x = 2\ny = x\n")
    read = [n.id for n in g.nodes(NodeKind.Reference) if n.name == "x" and n.props.get("access") != "write"]
    assert len(g.predecessors(read[-1], EdgeKind.DFG)) == 2


def test_loop_carried_definition_reaches_loop_body():
    g, prog = _build("t = 0\nfor k in xs:\n  u = t\n  t = k\n")
    reads = [n.id for n in g.nodes(NodeKind.Reference) if n.name == "t" and n.props.get("access") != "write"]
    assert len(g.predecessors(reads[0], EdgeKind.DFG)) == 2


def test_reaching_definitions_direct():
    g, prog = _build("a = 1\nb = a\n")
    reach = reaching_definitions(g, prog)
    decl_a, = _named(g, NodeKind.VariableDeclaration, "a")
    read, = [n.id for n in g.nodes(NodeKind.Reference) if n.name == "a"]
    assert decl_a in reach[read]


def test_complex_result_chain(complex_source):
    """The circuit value flows through transpile/run/result/get_counts into the subscripts."""
    g, prog = _build(complex_source)
    decl, = _named(g, NodeKind.VariableDeclaration, "circuit")
    reach = g.reachable(decl, EdgeKind.DFG)
    names = {g[n].name for n in reach if g[n].kind == NodeKind.CallExpression}
    assert {"transpile", "run", "result", "get_counts", "int"} <= names
    subs = {g[n].name for n in reach if g[n].kind == NodeKind.SubscriptExpression}
    assert subs == {"bitstring[-0-1]", "bitstring[-1-1]", "bitstring[-2-1]", "bitstring[-3-1]"}


def test_empty_program():
    g = PropertyGraph()
    prog = parse_python("", "e.py", g)
    add_classical_eog(g, prog)
    add_classical_dfg(g, prog)
    assert list(g.edges(EdgeKind.EOG)) == []
