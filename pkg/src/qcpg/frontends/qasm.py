"""OpenQASM 2 / core OpenQASM 3 subset -> classical CPG fragment.

Gate applications, ``measure`` and ``reset`` all become ``CallExpression``
nodes whose ARGUMENT edges point at register references, so the quantum
builder treats both frontends uniformly.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from qcpg.errors import LexError, ParseError, UnsupportedConstruct
from qcpg.graph import NodeId, PropertyGraph, SourceLocation
from qcpg.kinds import EdgeKind, NodeKind

KEYWORDS = frozenset("""
OPENQASM include qreg creg qubit bit measure reset barrier if else
gate def opaque defcal cal for while box delay let const input output extern
return break continue switch case default int uint float angle bool duration
stretch complex array ctrl negctrl inv pow end
""".split())

# statements introduced by these keywords are outside the supported subset
UNSUPPORTED = frozenset("""
gate def opaque defcal cal for while box delay let const input output extern
return break continue switch int uint float angle bool duration stretch complex
array ctrl negctrl inv pow end
""".split())

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<open_comment>/\*)
  | (?P<string>"[^"\n]*"|'[^'\n]*')
  | (?P<open_string>["'])
  | (?P<float>(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<integer>\d+)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<symbol>->|==|!=|<=|>=|&&|\|\||\+\+|[\[\]{}();,=+\-*/<>!:.@%^&|~])
""", re.VERBOSE | re.DOTALL)


@dataclass(frozen=True)
class Token:
    kind: str  # identifier | integer | float | string | keyword | symbol
    text: str
    location: SourceLocation
    offset: int

    def __str__(self) -> str:
        return repr(self.text)


def lex(source: str, file: str = "<qasm>") -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        col = pos - line_start + 1
        if m is None:
            raise LexError(SourceLocation(file, line, col), f"illegal character {source[pos]!r}")
        group = m.lastgroup
        text = m.group()
        if group == "open_comment":
            raise LexError(SourceLocation(file, line, col), "unterminated block comment")
        if group == "open_string":
            raise LexError(SourceLocation(file, line, col), "unterminated string")
        if group not in ("ws", "line_comment", "block_comment"):
            kind = group
            if group == "word":
                kind = "keyword" if text in KEYWORDS else "identifier"
            loc = SourceLocation(file, line, col, line, col + len(text) - 1)
            tokens.append(Token(kind, text, loc, pos))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    return tokens


@dataclass
class QasmProgram:
    graph: PropertyGraph
    unit: NodeId
    statements: list[NodeId]
    file: str
    version: Optional[str] = None
    includes: list[str] = field(default_factory=list)
    first_node: NodeId = 0
    end_node: NodeId = 0
    frontend = "qasm"

    @property
    def node_ids(self) -> range:
        return range(self.first_node, self.end_node)


_EOF = "end of input"


class _Parser:
    def __init__(self, tokens: list[Token], graph: PropertyGraph, file: str):
        self.toks = tokens
        self.i = 0
        self.g = graph
        self.file = file
        self.registers: dict[str, NodeId] = {}

    # -- token helpers ----------------------------------------------------

    def peek(self, k: int = 0) -> Optional[Token]:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def at(self, text: str) -> bool:
        t = self.peek()
        return t is not None and t.text == text and t.kind != "string"

    def next(self) -> Token:
        t = self.peek()
        if t is None:
            raise ParseError(self._eof_loc(), "more input", _EOF)
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t is None or t.text != text or t.kind == "string":
            raise ParseError(self._loc(t), repr(text), _found(t))
        self.i += 1
        return t

    def expect_kind(self, kind: str, what: str) -> Token:
        t = self.peek()
        if t is None or t.kind != kind:
            raise ParseError(self._loc(t), what, _found(t))
        self.i += 1
        return t

    def _loc(self, t: Optional[Token]) -> SourceLocation:
        return t.location if t is not None else self._eof_loc()

    def _eof_loc(self) -> SourceLocation:
        if self.toks:
            last = self.toks[-1].location
            return SourceLocation(self.file, last.line, (last.end_column or last.column) + 1)
        return SourceLocation(self.file, 1, 1)

    def node(self, kind: NodeKind, name: str, first: Token, last: Optional[Token] = None, **props) -> NodeId:
        loc = first.location.span((last or first).location)
        return self.g.add_node(kind, name, loc, props)

    # -- grammar ----------------------------------------------------------

    def program(self) -> QasmProgram:
        first = self.g.add_node(NodeKind.TranslationUnit, self.file,
                                SourceLocation(self.file, 1, 1))
        prog = QasmProgram(self.g, first, [], self.file, first_node=first)
        if self.at("OPENQASM"):
            self.next()
            ver = self.next()
            if ver.kind not in ("float", "integer"):
                raise ParseError(ver.location, "version number", _found(ver))
            self.expect(";")
            prog.version = ver.text
            self.g.set_prop(first, "version", ver.text)
        while self.peek() is not None:
            if self.at("include"):
                self.next()
                path = self.expect_kind("string", "include path")
                self.expect(";")
                prog.includes.append(path.text[1:-1])
                continue
            if self.at("OPENQASM"):
                raise ParseError(self.peek().location, "statement", "misplaced version header")
            for stmt in self.statement():
                self.g.add_edge(first, stmt, EdgeKind.AST, {"index": len(prog.statements)})
                prog.statements.append(stmt)
        if prog.includes:
            self.g.set_prop(first, "includes", ",".join(prog.includes))
        prog.end_node = len(self.g)
        return prog

    def statement(self) -> list[NodeId]:
        t = self.peek()
        assert t is not None
        if t.kind == "keyword" and t.text in UNSUPPORTED:
            raise UnsupportedConstruct(t.location, f"'{t.text}' is outside the supported OpenQASM subset")
        if t.text in ("qreg", "creg"):
            return [self.old_register()]
        if t.text in ("qubit", "bit"):
            return self.new_register()
        if t.text == "measure":
            return [self.measure()]
        if t.text == "reset":
            start = self.next()
            arg = self.operand()
            end = self.expect(";")
            return [self.call("reset", start, end, [arg])]
        if t.text == "barrier":
            return [self.barrier()]
        if t.text == "if":
            return [self.if_statement()]
        if t.text == "else":
            raise UnsupportedConstruct(t.location, "'else' branches are outside the supported subset")
        if t.kind == "identifier":
            if self._is_assignment():
                return [self.measure_assignment()]
            return [self.gate_call()]
        raise ParseError(t.location, "statement", _found(t))

    def _is_assignment(self) -> bool:
        # `c = measure q;` or `c[0] = measure q[0];`
        j = 1
        if self.peek(j) is not None and self.peek(j).text == "[":
            j += 3
        t = self.peek(j)
        return t is not None and t.text == "="

    def old_register(self) -> NodeId:
        start = self.next()
        name = self.expect_kind("identifier", "register name")
        self.expect("[")
        size = self.expect_kind("integer", "register size")
        self.expect("]")
        end = self.expect(";")
        return self.declare(start.text == "qreg", name, int(size.text), start, end)

    def new_register(self) -> list[NodeId]:
        start = self.next()
        size = 1
        if self.at("["):
            self.next()
            size = int(self.expect_kind("integer", "register size").text)
            self.expect("]")
        name = self.expect_kind("identifier", "register name")
        quantum = start.text == "qubit"
        if not quantum and self.at("="):
            # `bit[n] c = measure q;`
            decl = self.declare(False, name, size, start, name)
            self.next()
            mstart = self.expect("measure")
            qarg = self.operand()
            end = self.expect(";")
            carg = self.g.add_node(NodeKind.Reference, name.text, name.location, {"refersTo": decl})
            return [decl, self.call("measure", mstart, end, [qarg, carg])]
        end = self.expect(";")
        return [self.declare(quantum, name, size, start, end)]

    def declare(self, quantum: bool, name: Token, size: int, start: Token, end: Token) -> NodeId:
        if size < 1:
            raise ParseError(name.location, "positive register size", str(size))
        if name.text in self.registers:
            raise ParseError(name.location, "a fresh register name", f"redeclared {name.text!r}")
        kind = NodeKind.QuantumRegisterDeclaration if quantum else NodeKind.ClassicRegisterDeclaration
        decl = self.node(kind, name.text, start, end, size=size)
        self.registers[name.text] = decl
        return decl

    def measure(self) -> NodeId:
        start = self.next()
        qarg = self.operand()
        self.expect("->")
        carg = self.operand()
        end = self.expect(";")
        return self.call("measure", start, end, [qarg, carg])

    def measure_assignment(self) -> NodeId:
        start = self.peek()
        carg = self.operand()
        self.expect("=")
        self.expect("measure")
        qarg = self.operand()
        end = self.expect(";")
        return self.call("measure", start, end, [qarg, carg])

    def barrier(self) -> NodeId:
        start = self.next()
        names = []
        while not self.at(";"):
            if self.peek() is None:
                break
            names.append(self.next().text)
        end = self.expect(";")
        return self.node(NodeKind.Barrier, "barrier", start, end, operands="".join(names))

    def gate_call(self) -> NodeId:
        name = self.expect_kind("identifier", "gate name")
        params: list[NodeId] = []
        if self.at("("):
            self.next()
            if not self.at(")"):
                params.append(self.expr())
                while self.at(","):
                    self.next()
                    params.append(self.expr())
            self.expect(")")
        args = [self.operand()]
        while self.at(","):
            self.next()
            args.append(self.operand())
        end = self.expect(";")
        return self.call(name.text, name, end, args, params)

    def call(self, name: str, start: Token, end: Token, args: list[NodeId],
             params: tuple | list = ()) -> NodeId:
        call = self.node(NodeKind.CallExpression, name, start, end, callee=name)
        for p in params:
            self.g.add_edge(call, p, EdgeKind.AST, {"role": "param"})
        for i, a in enumerate(args):
            self.g.add_edge(call, a, EdgeKind.ARGUMENT, {"index": i})
        return call

    def register_ref(self) -> NodeId:
        name = self.expect_kind("identifier", "register name")
        decl = self.registers.get(name.text)
        if decl is None:
            raise ParseError(name.location, "a declared register", repr(name.text))
        return self.g.add_node(NodeKind.Reference, name.text, name.location, {"refersTo": decl})

    def operand(self) -> NodeId:
        first = self.peek()
        ref = self.register_ref()
        if not self.at("["):
            return ref
        self.next()
        idx_tok = self.expect_kind("integer", "integer index")
        end = self.expect("]")
        idx = self.g.add_node(NodeKind.IntLiteral, idx_tok.text, idx_tok.location, {"value": int(idx_tok.text)})
        sub = self.node(NodeKind.SubscriptExpression, f"{first.text}[{idx_tok.text}]", first, end)
        self.g.add_edge(sub, ref, EdgeKind.AST, {"role": "base"})
        self.g.add_edge(sub, idx, EdgeKind.AST, {"role": "index"})
        return sub

    def if_statement(self) -> NodeId:
        start = self.next()
        self.expect("(")
        lhs = self.condition_operand()
        op = self.next()
        if op.text not in ("==", "!=", "<", ">", "<=", ">="):
            raise ParseError(op.location, "comparison operator", _found(op))
        rhs = self.expr()
        self.expect(")")
        cmp_ = self.g.add_node(NodeKind.BinaryOperator, op.text,
                               self.g[lhs].location.span(self.g[rhs].location), {"operator": op.text})
        self.g.add_edge(cmp_, lhs, EdgeKind.LHS)
        self.g.add_edge(cmp_, rhs, EdgeKind.RHS)
        body_start = self.peek()
        stmts: list[NodeId] = []
        if self.at("{"):
            self.next()
            while not self.at("}"):
                if self.peek() is None:
                    raise ParseError(self._eof_loc(), "'}'", _EOF)
                stmts.extend(self._body_statement())
            end = self.next()
        else:
            if body_start is None:
                raise ParseError(self._eof_loc(), "statement", _EOF)
            stmts.extend(self._body_statement())
            end = self.toks[self.i - 1]
        if self.at("else"):
            raise UnsupportedConstruct(self.peek().location, "'else' branches are outside the supported subset")
        block = self.node(NodeKind.Block, "", body_start or start, end)
        for i, s in enumerate(stmts):
            self.g.add_edge(block, s, EdgeKind.AST, {"index": i})
        node = self.node(NodeKind.IfStatement, "if", start, end)
        self.g.add_edge(node, cmp_, EdgeKind.CONDITION)
        self.g.add_edge(node, block, EdgeKind.BODY)
        return node

    def _body_statement(self) -> list[NodeId]:
        t = self.peek()
        if t.text in ("qreg", "creg", "qubit", "bit"):
            raise UnsupportedConstruct(t.location, "declarations inside if bodies are not supported")
        if t.text == "if":
            raise UnsupportedConstruct(t.location, "nested if statements are not supported")
        return self.statement()

    def condition_operand(self) -> NodeId:
        t = self.peek()
        if t is not None and t.kind == "identifier" and t.text in self.registers:
            return self.operand()
        return self.expr()

    # -- arithmetic expressions (gate parameters, comparison rhs) ------------

    def expr(self) -> NodeId:
        left = self.term()
        while self.at("+") or self.at("-"):
            op = self.next()
            right = self.term()
            left = self.binary(op, left, right)
        return left

    def term(self) -> NodeId:
        left = self.unary()
        while self.at("*") or self.at("/"):
            op = self.next()
            right = self.unary()
            left = self.binary(op, left, right)
        return left

    def unary(self) -> NodeId:
        if self.at("-") or self.at("+"):
            op = self.next()
            operand = self.unary()
            node = self.g.add_node(NodeKind.UnaryOperator, op.text,
                                   op.location.span(self.g[operand].location), {"operator": op.text})
            self.g.add_edge(node, operand, EdgeKind.AST, {"role": "operand"})
            return node
        return self.atom()

    def atom(self) -> NodeId:
        t = self.next()
        if t.kind == "integer":
            return self.g.add_node(NodeKind.IntLiteral, t.text, t.location, {"value": int(t.text)})
        if t.kind == "float":
            return self.g.add_node(NodeKind.FloatLiteral, t.text, t.location, {"value": float(t.text)})
        if t.kind == "identifier":
            props = {}
            if t.text in self.registers:
                props["refersTo"] = self.registers[t.text]
            return self.g.add_node(NodeKind.Reference, t.text, t.location, props)
        if t.text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(t.location, "expression", _found(t))

    def binary(self, op: Token, left: NodeId, right: NodeId) -> NodeId:
        loc = self.g[left].location.span(self.g[right].location)
        node = self.g.add_node(NodeKind.BinaryOperator, op.text, loc, {"operator": op.text})
        self.g.add_edge(node, left, EdgeKind.LHS)
        self.g.add_edge(node, right, EdgeKind.RHS)
        return node


def _found(t: Optional[Token]) -> str:
    return _EOF if t is None else repr(t.text)


def parse(tokens: list[Token], graph: Optional[PropertyGraph] = None,
          file: Optional[str] = None) -> QasmProgram:
    """Build the classical CPG fragment for a token stream produced by :func:`lex`."""
    if graph is None:
        graph = PropertyGraph()
    if file is None:
        file = tokens[0].location.file if tokens else "<qasm>"
    return _Parser(tokens, graph, file).program()


def parse_qasm(source: str, file: str = "<qasm>", graph: Optional[PropertyGraph] = None) -> QasmProgram:
    return parse(lex(source, file), graph, file)
