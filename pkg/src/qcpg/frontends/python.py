"""Recursive-descent parser for the Python subset used by Qiskit programs.

Only straight-line module code is accepted: assignments, expression
statements, ``if``/``elif``/``else``, ``for .. in`` loops and import name
capture. Everything else raises :class:`UnsupportedConstruct`.
"""
from __future__ import annotations

import io
import keyword
import tokenize
from dataclasses import dataclass
from typing import Optional

from qcpg.errors import Diagnostics, LexError, ParseError, UnsupportedConstruct
from qcpg.graph import NodeId, PropertyGraph, SourceLocation
from qcpg.kinds import EdgeKind, NodeKind

_UNSUPPORTED_STMTS = frozenset({
    "def", "class", "while", "with", "try", "async", "await", "return", "yield",
    "global", "nonlocal", "del", "assert", "raise", "break", "continue", "lambda",
    "match",
})
_COMPARE = ("==", "!=", "<", ">", "<=", ">=")
_AUGMENTED = frozenset({"+=", "-=", "*=", "/=", "//=", "%=", "**=", "&=", "|=", "^=", ">>=", "<<=", "@="})


@dataclass(frozen=True)
class PyToken:
    type: int
    text: str
    location: SourceLocation

    @property
    def name(self) -> str:
        return tokenize.tok_name[self.type]

    def is_op(self, text: str) -> bool:
        return self.type == tokenize.OP and self.text == text

    def is_kw(self, text: str) -> bool:
        return self.type == tokenize.NAME and self.text == text


def lex_python(source: str, file: str = "<python>") -> list[PyToken]:
    """Tokenize with the stdlib tokenizer, dropping comments and blank-line NL tokens."""
    out: list[PyToken] = []
    try:
        for tok in tokenize.generate_tokens(io.StringIO(source).readline):
            if tok.type in (tokenize.COMMENT, tokenize.NL, tokenize.ENCODING):
                continue
            (sl, sc), (el, ec) = tok.start, tok.end
            if tok.type in (tokenize.NEWLINE, tokenize.DEDENT, tokenize.ENDMARKER, tokenize.INDENT):
                loc = SourceLocation(file, max(sl, 1), sc + 1)
            else:
                loc = SourceLocation(file, sl, sc + 1, el, max(ec, sc + 1))
            if tok.type == tokenize.ERRORTOKEN:
                if tok.string.isspace():
                    continue
                what = "unterminated string" if tok.string in ("'", '"') else f"illegal character {tok.string!r}"
                raise LexError(loc, what)
            out.append(PyToken(tok.type, tok.string, loc))
    except tokenize.TokenError as exc:
        line, col = exc.args[1] if len(exc.args) > 1 else (1, 0)
        raise LexError(SourceLocation(file, max(line, 1), col + 1), exc.args[0]) from None
    except IndentationError as exc:
        raise LexError(SourceLocation(file, exc.lineno or 1, (exc.offset or 0) + 1), exc.msg) from None
    return out


@dataclass
class PyProgram:
    graph: PropertyGraph
    unit: NodeId
    statements: list[NodeId]
    file: str
    first_node: NodeId = 0
    end_node: NodeId = 0
    frontend = "qiskit"

    @property
    def node_ids(self) -> range:
        return range(self.first_node, self.end_node)


class _Parser:
    def __init__(self, tokens: list[PyToken], graph: PropertyGraph, file: str, source: str):
        self.toks = tokens
        self.i = 0
        self.g = graph
        self.file = file
        self.lines = source.splitlines()
        self.declared: set[str] = set()

    # -- helpers ----------------------------------------------------------

    @property
    def tok(self) -> PyToken:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> PyToken:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> PyToken:
        t = self.toks[self.i]
        if t.type != tokenize.ENDMARKER:
            self.i += 1
        return t

    def at_op(self, text: str) -> bool:
        return self.tok.is_op(text)

    def at_kw(self, text: str) -> bool:
        return self.tok.is_kw(text)

    def expect_op(self, text: str) -> PyToken:
        if not self.at_op(text):
            raise ParseError(self.tok.location, repr(text), _describe(self.tok))
        return self.advance()

    def expect_type(self, ttype: int, what: str) -> PyToken:
        if self.tok.type != ttype:
            raise ParseError(self.tok.location, what, _describe(self.tok))
        return self.advance()

    def expect_name(self) -> PyToken:
        t = self.tok
        if t.type != tokenize.NAME or keyword.iskeyword(t.text):
            raise ParseError(t.location, "identifier", _describe(t))
        return self.advance()

    def loc(self, first: SourceLocation, last: SourceLocation) -> SourceLocation:
        return first.span(last)

    def text(self, loc: SourceLocation) -> str:
        if loc.end_line == loc.line and loc.end_column is not None and loc.line <= len(self.lines):
            return self.lines[loc.line - 1][loc.column - 1:loc.end_column]
        return ""

    def node(self, kind: NodeKind, name: str, loc: SourceLocation, **props) -> NodeId:
        return self.g.add_node(kind, name, loc, props)

    def L(self, nid: NodeId) -> SourceLocation:
        return self.g[nid].location

    def unsupported(self, t: PyToken, what: Optional[str] = None):
        raise UnsupportedConstruct(t.location, what or f"'{t.text}' is outside the supported Python subset")

    # -- statements -------------------------------------------------------

    def file_input(self) -> PyProgram:
        tu = self.node(NodeKind.TranslationUnit, self.file, SourceLocation(self.file, 1, 1))
        prog = PyProgram(self.g, tu, [], self.file, first_node=tu)
        while self.tok.type != tokenize.ENDMARKER:
            if self.tok.type == tokenize.NEWLINE:
                self.advance()
                continue
            if self.tok.type == tokenize.INDENT:
                raise ParseError(self.tok.location, "statement", "unexpected indent")
            for s in self.statement():
                self.g.add_edge(tu, s, EdgeKind.AST, {"index": len(prog.statements)})
                prog.statements.append(s)
        prog.end_node = len(self.g)
        return prog

    def statement(self) -> list[NodeId]:
        t = self.tok
        if t.is_kw("if"):
            return [self.if_statement()]
        if t.is_kw("for"):
            return [self.for_statement()]
        if t.type == tokenize.NAME and t.text in _UNSUPPORTED_STMTS:
            self.unsupported(t)
        if t.is_op("@"):
            self.unsupported(t, "decorators are outside the supported Python subset")
        return self.simple_statements()

    def simple_statements(self) -> list[NodeId]:
        out = []
        while True:
            s = self.small_statement()
            if s is not None:
                out.append(s)
            if self.at_op(";"):
                self.advance()
                if self.tok.type in (tokenize.NEWLINE, tokenize.ENDMARKER):
                    break
                continue
            break
        if self.tok.type == tokenize.ENDMARKER:
            return out
        self.expect_type(tokenize.NEWLINE, "end of statement")
        return out

    def small_statement(self) -> Optional[NodeId]:
        t = self.tok
        if t.is_kw("pass"):
            self.advance()
            return None
        if t.is_kw("import") or t.is_kw("from"):
            return self.import_statement()
        if t.type == tokenize.NAME and t.text in _UNSUPPORTED_STMTS:
            self.unsupported(t)
        if t.type == tokenize.NAME and not keyword.iskeyword(t.text) and self.peek().is_op("="):
            return self.name_assignment()
        start = t.location
        expr = self.expression()
        if self.tok.type == tokenize.OP and self.tok.text in _AUGMENTED:
            self.unsupported(self.tok, "augmented assignment is outside the supported Python subset")
        if self.at_op(","):
            self.unsupported(self.tok, "tuple expressions and unpacking are outside the supported Python subset")
        if self.at_op("="):
            kind = self.g[expr].kind
            if kind not in (NodeKind.SubscriptExpression, NodeKind.MemberAccess):
                raise ParseError(self.L(expr), "assignable target", kind.value)
            self.advance()
            self.g.set_prop(expr, "access", "write")
            rhs = self.expression()
            if self.at_op("="):
                self.unsupported(self.tok, "chained assignment is outside the supported Python subset")
            return self.assignment(expr, rhs, start)
        stmt = self.node(NodeKind.ExpressionStatement, "", self.loc(start, self.L(expr)))
        self.g.add_edge(stmt, expr, EdgeKind.AST)
        return stmt

    def name_assignment(self) -> NodeId:
        name = self.advance()
        self.advance()  # '='
        rhs = self.expression()
        if self.at_op("="):
            self.unsupported(self.tok, "chained assignment is outside the supported Python subset")
        if self.at_op(","):
            self.unsupported(self.tok, "tuple expressions and unpacking are outside the supported Python subset")
        target = self.bind(name)
        return self.assignment(target, rhs, name.location)

    def bind(self, name: PyToken) -> NodeId:
        """Declaration on first textual assignment, write reference afterwards."""
        if name.text in self.declared:
            return self.node(NodeKind.Reference, name.text, name.location, access="write")
        self.declared.add(name.text)
        return self.node(NodeKind.VariableDeclaration, name.text, name.location)

    def assignment(self, target: NodeId, rhs: NodeId, start: SourceLocation) -> NodeId:
        stmt = self.node(NodeKind.Assignment, "=", self.loc(start, self.L(rhs)))
        self.g.add_edge(stmt, target, EdgeKind.LHS)
        self.g.add_edge(stmt, rhs, EdgeKind.RHS)
        return stmt

    def import_statement(self) -> NodeId:
        first = self.advance()
        names: list[tuple[PyToken, str]] = []
        if first.text == "import":
            while True:
                head = self.expect_name()
                module = self.dotted(head)
                bound = head
                if self.at_kw("as"):
                    self.advance()
                    bound = self.expect_name()
                names.append((bound, module))
                if not self.at_op(","):
                    break
                self.advance()
            module_name = ",".join(m for _, m in names)
        else:
            while self.at_op("."):
                self.advance()
            module_name = self.dotted(self.expect_name()) if not self.at_kw("import") else ""
            if not self.at_kw("import"):
                raise ParseError(self.tok.location, "'import'", _describe(self.tok))
            self.advance()
            paren = self.at_op("(")
            if paren:
                self.advance()
            if self.at_op("*"):
                self.unsupported(self.tok, "wildcard imports are outside the supported Python subset")
            while True:
                name = self.expect_name()
                bound = name
                if self.at_kw("as"):
                    self.advance()
                    bound = self.expect_name()
                names.append((bound, f"{module_name}.{name.text}"))
                if not self.at_op(","):
                    break
                self.advance()
                if paren and self.at_op(")"):
                    break
            if paren:
                self.expect_op(")")
        last = self.toks[self.i - 1].location
        stmt_loc = self.loc(first.location, last)
        decls = []
        for bound, qualified in names:
            self.declared.add(bound.text)
            decls.append(self.node(NodeKind.ImportDeclaration, bound.text, bound.location, module=qualified))
        stmt = self.node(NodeKind.ImportStatement, module_name, stmt_loc)
        for i, d in enumerate(decls):
            self.g.add_edge(stmt, d, EdgeKind.AST, {"index": i})
        return stmt

    def dotted(self, head: PyToken) -> str:
        parts = [head.text]
        while self.at_op("."):
            self.advance()
            parts.append(self.expect_name().text)
        return ".".join(parts)

    def block(self) -> NodeId:
        colon = self.expect_op(":")
        stmts: list[NodeId] = []
        if self.tok.type == tokenize.NEWLINE:
            self.advance()
            self.expect_type(tokenize.INDENT, "indented block")
            while self.tok.type not in (tokenize.DEDENT, tokenize.ENDMARKER):
                if self.tok.type == tokenize.NEWLINE:
                    self.advance()
                    continue
                stmts.extend(self.statement())
            if self.tok.type == tokenize.DEDENT:
                self.advance()
        else:
            stmts.extend(self.simple_statements())
        start = self.L(stmts[0]) if stmts else colon.location
        end = self.L(stmts[-1]) if stmts else colon.location
        blk = self.node(NodeKind.Block, "", self.loc(start, end))
        for i, s in enumerate(stmts):
            self.g.add_edge(blk, s, EdgeKind.AST, {"index": i})
        return blk

    def if_statement(self) -> NodeId:
        first = self.advance()  # 'if' or 'elif'
        cond = self.expression()
        body = self.block()
        orelse = None
        if self.at_kw("elif"):
            nested = self.if_statement()
            orelse = self.node(NodeKind.Block, "", self.L(nested))
            self.g.add_edge(orelse, nested, EdgeKind.AST, {"index": 0})
        elif self.at_kw("else"):
            self.advance()
            orelse = self.block()
        end = self.L(orelse if orelse is not None else body)
        stmt = self.node(NodeKind.IfStatement, "if", self.loc(first.location, end))
        self.g.add_edge(stmt, cond, EdgeKind.CONDITION)
        self.g.add_edge(stmt, body, EdgeKind.BODY)
        if orelse is not None:
            self.g.add_edge(stmt, orelse, EdgeKind.AST, {"role": "else"})
        return stmt

    def for_statement(self) -> NodeId:
        first = self.advance()
        name = self.expect_name()
        if self.at_op(","):
            self.unsupported(self.tok, "tuple loop targets are outside the supported Python subset")
        if not self.at_kw("in"):
            raise ParseError(self.tok.location, "'in'", _describe(self.tok))
        self.advance()
        iterable = self.expression()
        var = self.bind(name)
        body = self.block()
        if self.at_kw("else"):
            self.unsupported(self.tok, "for-else is outside the supported Python subset")
        stmt = self.node(NodeKind.ForEachStatement, "for", self.loc(first.location, self.L(body)))
        self.g.add_edge(stmt, var, EdgeKind.AST, {"role": "variable"})
        self.g.add_edge(stmt, iterable, EdgeKind.AST, {"role": "iterable"})
        self.g.add_edge(stmt, body, EdgeKind.BODY)
        return stmt

    # -- expressions ------------------------------------------------------

    def expression(self) -> NodeId:
        if self.at_kw("lambda"):
            self.unsupported(self.tok)
        node = self.or_test()
        if self.at_kw("if"):
            self.unsupported(self.tok, "conditional expressions are outside the supported Python subset")
        if self.at_kw("for"):
            self.unsupported(self.tok, "comprehensions are outside the supported Python subset")
        return node

    def or_test(self) -> NodeId:
        left = self.and_test()
        while self.at_kw("or"):
            self.advance()
            left = self.binary("or", left, self.and_test())
        return left

    def and_test(self) -> NodeId:
        left = self.not_test()
        while self.at_kw("and"):
            self.advance()
            left = self.binary("and", left, self.not_test())
        return left

    def not_test(self) -> NodeId:
        if self.at_kw("not"):
            t = self.advance()
            return self.unary("not", t, self.not_test())
        return self.comparison()

    def comparison(self) -> NodeId:
        left = self.arith()
        while True:
            t = self.tok
            if t.type == tokenize.OP and t.text in _COMPARE:
                op = self.advance().text
            elif t.is_kw("in"):
                self.advance()
                op = "in"
            elif t.is_kw("is"):
                self.advance()
                op = "is"
                if self.at_kw("not"):
                    self.advance()
                    op = "is not"
            elif t.is_kw("not") and self.peek().is_kw("in"):
                self.advance()
                self.advance()
                op = "not in"
            else:
                return left
            left = self.binary(op, left, self.arith())

    def arith(self) -> NodeId:
        left = self.term()
        while self.at_op("+") or self.at_op("-"):
            op = self.advance().text
            left = self.binary(op, left, self.term())
        return left

    def term(self) -> NodeId:
        left = self.factor()
        while any(self.at_op(o) for o in ("*", "/", "//", "%", "@")):
            op = self.advance().text
            left = self.binary(op, left, self.factor())
        return left

    def factor(self) -> NodeId:
        if self.at_op("-") or self.at_op("+") or self.at_op("~"):
            t = self.advance()
            return self.unary(t.text, t, self.factor())
        base = self.primary()
        if self.at_op("**"):
            self.advance()
            return self.binary("**", base, self.factor())
        return base

    def unary(self, op: str, tok: PyToken, operand: NodeId) -> NodeId:
        loc = self.loc(tok.location, self.L(operand))
        node = self.node(NodeKind.UnaryOperator, op, loc, operator=op)
        self.g.add_edge(node, operand, EdgeKind.AST, {"role": "operand"})
        return node

    def binary(self, op: str, left: NodeId, right: NodeId) -> NodeId:
        loc = self.loc(self.L(left), self.L(right))
        node = self.node(NodeKind.BinaryOperator, op, loc, operator=op)
        self.g.add_edge(node, left, EdgeKind.LHS)
        self.g.add_edge(node, right, EdgeKind.RHS)
        return node

    def primary(self) -> NodeId:
        first = self.tok
        if first.type == tokenize.NAME and not keyword.iskeyword(first.text) and self.peek().is_op("("):
            # plain function call: the callee is a name, not a value reference
            name = self.advance()
            node = self.call(None, name.text, name.text, name.location)
        else:
            node = self.atom()
        while True:
            if self.at_op("."):
                self.advance()
                attr = self.expect_name()
                path = _path(self.g, node)
                dotted = f"{path}.{attr.text}" if path else attr.text
                if self.at_op("("):
                    node = self.call(node, attr.text, dotted, first.location)
                else:
                    loc = self.loc(first.location, attr.location)
                    member = self.node(NodeKind.MemberAccess, attr.text, loc, path=dotted)
                    self.g.add_edge(member, node, EdgeKind.AST, {"role": "base"})
                    node = member
            elif self.at_op("["):
                self.advance()
                if self.at_op(":") or self.at_op("]"):
                    self.unsupported(self.tok, "slices are outside the supported Python subset")
                index = self.expression()
                if self.at_op(":") or self.at_op(","):
                    self.unsupported(self.tok, "slices and multi-indexing are outside the supported Python subset")
                end = self.expect_op("]")
                loc = self.loc(first.location, end.location)
                sub = self.node(NodeKind.SubscriptExpression, self.text(loc) or "[]", loc)
                self.g.add_edge(sub, node, EdgeKind.AST, {"role": "base"})
                self.g.add_edge(sub, index, EdgeKind.AST, {"role": "index"})
                node = sub
            elif self.at_op("("):
                self.unsupported(self.tok, "calling a computed value is outside the supported Python subset")
            else:
                return node

    def call(self, base: Optional[NodeId], name: str, callee: str, start: SourceLocation) -> NodeId:
        self.expect_op("(")
        args: list[tuple[NodeId, Optional[str]]] = []
        while not self.at_op(")"):
            if self.at_op("*") or self.at_op("**"):
                self.unsupported(self.tok, "star arguments are outside the supported Python subset")
            kw = None
            if self.tok.type == tokenize.NAME and self.peek().is_op("="):
                kw = self.advance().text
                self.advance()
            value = self.expression()
            args.append((value, kw))
            if not self.at_op(","):
                break
            self.advance()
        end = self.expect_op(")")
        node = self.node(NodeKind.CallExpression, name, self.loc(start, end.location), callee=callee)
        if base is not None:
            self.g.add_edge(node, base, EdgeKind.AST, {"role": "base"})
        for i, (value, kw) in enumerate(args):
            props = {"index": i}
            if kw is not None:
                props["name"] = kw
            self.g.add_edge(node, value, EdgeKind.ARGUMENT, props)
        return node

    def atom(self) -> NodeId:
        t = self.tok
        if t.type == tokenize.NUMBER:
            self.advance()
            text = t.text.replace("_", "")
            if text[-1] in "jJ":
                self.unsupported(t, "complex literals are outside the supported Python subset")
            try:
                return self.node(NodeKind.IntLiteral, t.text, t.location, value=int(text, 0))
            except ValueError:
                return self.node(NodeKind.FloatLiteral, t.text, t.location, value=float(text))
        if t.type == tokenize.STRING:
            first = self.advance()
            last = first
            while self.tok.type == tokenize.STRING:
                last = self.advance()
            loc = self.loc(first.location, last.location)
            return self.node(NodeKind.StringLiteral, self.text(loc) or first.text, loc)
        if t.type == tokenize.NAME:
            if t.text in ("True", "False"):
                self.advance()
                return self.node(NodeKind.BoolLiteral, t.text, t.location, value=t.text == "True")
            if t.text == "None":
                self.advance()
                return self.node(NodeKind.NoneLiteral, t.text, t.location)
            if keyword.iskeyword(t.text):
                if t.text in _UNSUPPORTED_STMTS:
                    self.unsupported(t)
                raise ParseError(t.location, "expression", _describe(t))
            self.advance()
            return self.node(NodeKind.Reference, t.text, t.location)
        if t.is_op("("):
            self.advance()
            if self.at_op(")"):
                self.unsupported(self.tok, "tuples are outside the supported Python subset")
            inner = self.expression()
            if self.at_op(","):
                self.unsupported(self.tok, "tuples are outside the supported Python subset")
            self.expect_op(")")
            return inner
        if t.is_op("["):
            return self.list_literal()
        if t.is_op("{"):
            self.unsupported(t, "dict and set displays are outside the supported Python subset")
        raise ParseError(t.location, "expression", _describe(t))

    def list_literal(self) -> NodeId:
        first = self.advance()
        elems: list[NodeId] = []
        while not self.at_op("]"):
            elems.append(self.expression())
            if not self.at_op(","):
                break
            self.advance()
        end = self.expect_op("]")
        loc = self.loc(first.location, end.location)
        node = self.node(NodeKind.ListLiteral, self.text(loc) or "[]", loc)
        for i, e in enumerate(elems):
            self.g.add_edge(node, e, EdgeKind.AST, {"index": i})
        return node


def _describe(t: PyToken) -> str:
    if t.type == tokenize.ENDMARKER:
        return "end of input"
    if t.type == tokenize.NEWLINE:
        return "end of line"
    if t.type == tokenize.INDENT:
        return "indent"
    if t.type == tokenize.DEDENT:
        return "dedent"
    return repr(t.text)


def _path(g: PropertyGraph, nid: NodeId) -> str:
    node = g[nid]
    if node.kind == NodeKind.Reference:
        return node.name
    if node.kind == NodeKind.MemberAccess:
        return str(node.props.get("path", node.name))
    if node.kind == NodeKind.CallExpression:
        return f"{node.props.get('callee', node.name)}()"
    return ""


def parse_python(source: str, file: str = "<python>", graph: Optional[PropertyGraph] = None) -> PyProgram:
    if graph is None:
        graph = PropertyGraph()
    tokens = lex_python(source, file)
    return _Parser(tokens, graph, file, source).file_input()


def resolve_references(graph: PropertyGraph, program, diagnostics: Optional[Diagnostics] = None):
    """Link every Reference to the declaration textually preceding it.

    Walks the program's nodes in creation order, which follows the textual
    order of assignment targets (the target is created after its right-hand
    side). Names with no earlier declaration are left unresolved and reported.
    """
    if diagnostics is None:
        diagnostics = Diagnostics()
    scope: dict[str, NodeId] = {}
    for nid in program.node_ids:
        node = graph[nid]
        if node.kind in (NodeKind.VariableDeclaration, NodeKind.ImportDeclaration):
            scope.setdefault(node.name, nid)
        elif node.kind == NodeKind.Reference:
            decl = scope.get(node.name)
            if decl is None:
                graph.set_prop(nid, "unresolved", True)
                diagnostics.warn("UnresolvedReference", f"name {node.name!r} is not assigned before use",
                                 node.location)
            else:
                graph.set_prop(nid, "refersTo", decl)
    return program
