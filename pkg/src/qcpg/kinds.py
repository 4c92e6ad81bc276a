"""Node and edge kinds, and the label closure used by exports and queries."""
from __future__ import annotations

from enum import Enum


class NodeKind(str, Enum):
    # classical
    TranslationUnit = "TranslationUnit"
    Block = "Block"
    ImportStatement = "ImportStatement"
    ImportDeclaration = "ImportDeclaration"
    VariableDeclaration = "VariableDeclaration"
    Assignment = "Assignment"
    ExpressionStatement = "ExpressionStatement"
    IfStatement = "IfStatement"
    ForEachStatement = "ForEachStatement"
    CallExpression = "CallExpression"
    MemberAccess = "MemberAccess"
    SubscriptExpression = "SubscriptExpression"
    ListLiteral = "ListLiteral"
    IntLiteral = "IntLiteral"
    FloatLiteral = "FloatLiteral"
    StringLiteral = "StringLiteral"
    BoolLiteral = "BoolLiteral"
    NoneLiteral = "NoneLiteral"
    UnaryOperator = "UnaryOperator"
    BinaryOperator = "BinaryOperator"
    Reference = "Reference"
    QuantumRegisterDeclaration = "QuantumRegisterDeclaration"
    ClassicRegisterDeclaration = "ClassicRegisterDeclaration"
    Barrier = "Barrier"
    # quantum
    QuantumCircuit = "QuantumCircuit"
    QuantumGateH = "QuantumGateH"
    QuantumGateX = "QuantumGateX"
    QuantumGateY = "QuantumGateY"
    QuantumGateZ = "QuantumGateZ"
    QuantumGateCX = "QuantumGateCX"
    QuantumGateGeneric = "QuantumGateGeneric"
    QuantumBit = "QuantumBit"
    QuantumBitReference = "QuantumBitReference"
    QuantumRegister = "QuantumRegister"
    QuantumMeasure = "QuantumMeasure"
    QuantumResetGeneric = "QuantumResetGeneric"
    ClassicBit = "ClassicBit"
    ClassicBitReference = "ClassicBitReference"
    ClassicRegister = "ClassicRegister"
    ClassicIf = "ClassicIf"

    def __str__(self) -> str:
        return self.value

    @property
    def is_quantum(self) -> bool:
        return self in QUANTUM_KINDS

    @property
    def is_gate(self) -> bool:
        return self in GATE_KINDS

    @property
    def is_pauli(self) -> bool:
        return self in PAULI_KINDS

    @property
    def labels(self) -> tuple[str, ...]:
        """The kind followed by all of its supertypes."""
        return (self.value,) + _SUPERTYPES.get(self, ())


class EdgeKind(str, Enum):
    AST = "AST"
    EOG = "EOG"
    DFG = "DFG"
    QU_BIT = "QU_BIT"
    C_BIT = "C_BIT"
    CONDITION = "CONDITION"
    LHS = "LHS"
    RHS = "RHS"
    RELEVANT_FOR_GATES = "RELEVANT_FOR_GATES"
    GATE_OPERAND = "GATE_OPERAND"
    ARGUMENT = "ARGUMENT"
    BODY = "BODY"
    REFERS_TO = "REFERS_TO"

    def __str__(self) -> str:
        return self.value


GATE_KINDS = frozenset({
    NodeKind.QuantumGateH,
    NodeKind.QuantumGateX,
    NodeKind.QuantumGateY,
    NodeKind.QuantumGateZ,
    NodeKind.QuantumGateCX,
    NodeKind.QuantumGateGeneric,
})
PAULI_KINDS = frozenset({NodeKind.QuantumGateX, NodeKind.QuantumGateY, NodeKind.QuantumGateZ})
OPERATION_KINDS = GATE_KINDS | {NodeKind.QuantumMeasure, NodeKind.QuantumResetGeneric}
QUANTUM_KINDS = OPERATION_KINDS | {
    NodeKind.QuantumCircuit,
    NodeKind.QuantumBit,
    NodeKind.QuantumBitReference,
    NodeKind.QuantumRegister,
    NodeKind.ClassicBit,
    NodeKind.ClassicBitReference,
    NodeKind.ClassicRegister,
    NodeKind.ClassicIf,
}

# edges that express syntactic containment (parent -> child)
STRUCTURAL_EDGES = frozenset({
    EdgeKind.AST,
    EdgeKind.LHS,
    EdgeKind.RHS,
    EdgeKind.CONDITION,
    EdgeKind.ARGUMENT,
    EdgeKind.BODY,
    EdgeKind.GATE_OPERAND,
    EdgeKind.QU_BIT,
    EdgeKind.C_BIT,
})

_STATEMENT = ("Statement",)
_EXPRESSION = ("Expression",)
_LITERAL = ("Literal", "Expression")
_SUPERTYPES: dict[NodeKind, tuple[str, ...]] = {
    NodeKind.ImportDeclaration: ("Declaration",),
    NodeKind.VariableDeclaration: ("Declaration",),
    NodeKind.QuantumRegisterDeclaration: ("Declaration", "Statement"),
    NodeKind.ClassicRegisterDeclaration: ("Declaration", "Statement"),
    NodeKind.ImportStatement: _STATEMENT,
    NodeKind.Assignment: _STATEMENT,
    NodeKind.ExpressionStatement: _STATEMENT,
    NodeKind.IfStatement: _STATEMENT,
    NodeKind.ForEachStatement: _STATEMENT,
    NodeKind.Barrier: _STATEMENT,
    NodeKind.Block: _STATEMENT,
    NodeKind.CallExpression: _EXPRESSION,
    NodeKind.MemberAccess: _EXPRESSION,
    NodeKind.SubscriptExpression: ("ArraySubscriptionExpression", "Expression"),
    NodeKind.ListLiteral: _LITERAL,
    NodeKind.IntLiteral: _LITERAL,
    NodeKind.FloatLiteral: _LITERAL,
    NodeKind.StringLiteral: _LITERAL,
    NodeKind.BoolLiteral: _LITERAL,
    NodeKind.NoneLiteral: _LITERAL,
    NodeKind.UnaryOperator: _EXPRESSION,
    NodeKind.BinaryOperator: _EXPRESSION,
    NodeKind.Reference: _EXPRESSION,
}
for _k in QUANTUM_KINDS:
    extra: tuple[str, ...] = ()
    if _k in GATE_KINDS:
        extra += ("QuantumGate",)
    if _k in PAULI_KINDS:
        extra += ("QuantumPauliGate",)
    _SUPERTYPES[_k] = extra + ("QuantumNode",)
del _k, extra
