"""Typed, append-only property graph shared by every pass."""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Iterable, Iterator, Mapping, Optional, Union

from qcpg.errors import DuplicateEdge, FrozenGraphError, UnknownNode
from qcpg.kinds import EdgeKind, NodeKind, STRUCTURAL_EDGES

NodeId = int
EdgeId = int
Scalar = Union[str, int, float, bool, None]
KindSpec = Union[EdgeKind, Iterable[EdgeKind], None]


@dataclass(frozen=True, order=True)
class SourceLocation:
    file: str
    line: int
    column: int
    end_line: Optional[int] = None
    end_column: Optional[int] = None

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise ValueError(f"line/column are 1-based, got {self.line}:{self.column}")
        if self.end_line is not None:
            end = (self.end_line, self.end_column or 0)
            if end < (self.line, self.column):
                raise ValueError("location end precedes start")

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"

    def span(self, other: "SourceLocation") -> "SourceLocation":
        """Location starting here and ending where ``other`` ends."""
        end_line = other.end_line if other.end_line is not None else other.line
        end_col = other.end_column if other.end_column is not None else other.column
        return SourceLocation(self.file, self.line, self.column, end_line, end_col)


@dataclass
class Node:
    id: NodeId
    kind: NodeKind
    name: str
    location: Optional[SourceLocation]
    props: dict[str, Scalar] = field(default_factory=dict)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.kind.labels

    def has_label(self, label: str) -> bool:
        return label in self.kind.labels

    def __repr__(self) -> str:
        return f"<{self.kind.value}#{self.id} {self.name!r}>"


@dataclass(frozen=True)
class Edge:
    id: EdgeId
    src: NodeId
    dst: NodeId
    kind: EdgeKind
    props: Mapping[str, Scalar] = field(default_factory=lambda: MappingProxyType({}))

    @property
    def index(self) -> Optional[int]:
        return self.props.get("index")  # type: ignore[return-value]


def _kinds(kind: KindSpec) -> Optional[frozenset]:
    if kind is None:
        return None
    if isinstance(kind, EdgeKind):
        return frozenset((kind,))
    return frozenset(kind)


class PropertyGraph:
    """Nodes and ordered, typed multi-edges.

    The graph only grows. Once :meth:`freeze` is called every mutating
    method raises :class:`FrozenGraphError`, so a frozen graph may be
    shared between threads.
    """

    def __init__(self):
        self._nodes: list[Node] = []
        self._edges: list[Edge] = []
        self._out: dict[NodeId, list[Edge]] = defaultdict(list)
        self._in: dict[NodeId, list[Edge]] = defaultdict(list)
        self._keys: set[tuple] = set()
        self._frozen = False

    # -- mutation ---------------------------------------------------------

    def add_node(self, kind: NodeKind, name: str = "", location: Optional[SourceLocation] = None,
                 props: Optional[Mapping[str, Scalar]] = None) -> NodeId:
        self._check_mutable()
        node = Node(len(self._nodes), NodeKind(kind), name, location, dict(props or {}))
        self._nodes.append(node)
        return node.id

    def add_edge(self, src: NodeId, dst: NodeId, kind: EdgeKind,
                 props: Optional[Mapping[str, Scalar]] = None) -> EdgeId:
        self._check_mutable()
        self.node(src)
        self.node(dst)
        kind = EdgeKind(kind)
        props = dict(props or {})
        key = (src, dst, kind, props.get("index"))
        if key in self._keys:
            raise DuplicateEdge(f"edge {src}->{dst} [{kind}] index={key[3]} already exists")
        edge = Edge(len(self._edges), src, dst, kind, MappingProxyType(props))
        self._keys.add(key)
        self._edges.append(edge)
        self._out[src].append(edge)
        self._in[dst].append(edge)
        return edge.id

    def ensure_edge(self, src: NodeId, dst: NodeId, kind: EdgeKind,
                    props: Optional[Mapping[str, Scalar]] = None) -> bool:
        """Add the edge unless an identical one exists; return whether it was added."""
        if self.has_edge(src, dst, kind, (props or {}).get("index")):
            return False
        self.add_edge(src, dst, kind, props)
        return True

    def set_prop(self, node_id: NodeId, key: str, value: Scalar) -> None:
        self._check_mutable()
        self.node(node_id).props[key] = value

    def freeze(self) -> "PropertyGraph":
        self._frozen = True
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    def _check_mutable(self):
        if self._frozen:
            raise FrozenGraphError("graph is frozen")

    # -- lookup -----------------------------------------------------------

    def node(self, node_id: NodeId) -> Node:
        if not isinstance(node_id, int) or not 0 <= node_id < len(self._nodes):
            raise UnknownNode(node_id)
        return self._nodes[node_id]

    def __getitem__(self, node_id: NodeId) -> Node:
        return self.node(node_id)

    def __contains__(self, node_id) -> bool:
        return isinstance(node_id, int) and 0 <= node_id < len(self._nodes)

    def __len__(self) -> int:
        return len(self._nodes)

    def edge(self, edge_id: EdgeId) -> Edge:
        return self._edges[edge_id]

    def nodes(self, kind: Union[NodeKind, Iterable[NodeKind], None] = None,
              label: Optional[str] = None) -> Iterator[Node]:
        kinds = None
        if isinstance(kind, NodeKind):
            kinds = {kind}
        elif kind is not None:
            kinds = set(kind)
        for node in self._nodes:
            if kinds is not None and node.kind not in kinds:
                continue
            if label is not None and label not in node.kind.labels:
                continue
            yield node

    def edges(self, kind: KindSpec = None) -> Iterator[Edge]:
        kinds = _kinds(kind)
        return (e for e in self._edges if kinds is None or e.kind in kinds)

    def out_edges(self, node_id: NodeId, kind: KindSpec = None) -> list[Edge]:
        self.node(node_id)
        kinds = _kinds(kind)
        return [e for e in self._out.get(node_id, ()) if kinds is None or e.kind in kinds]

    def in_edges(self, node_id: NodeId, kind: KindSpec = None) -> list[Edge]:
        self.node(node_id)
        kinds = _kinds(kind)
        return [e for e in self._in.get(node_id, ()) if kinds is None or e.kind in kinds]

    def successors(self, node_id: NodeId, kind: KindSpec = None) -> list[NodeId]:
        return [e.dst for e in self.out_edges(node_id, kind)]

    def predecessors(self, node_id: NodeId, kind: KindSpec = None) -> list[NodeId]:
        return [e.src for e in self.in_edges(node_id, kind)]

    def has_edge(self, src: NodeId, dst: NodeId, kind: EdgeKind, index: Optional[int] = None) -> bool:
        return (src, dst, EdgeKind(kind), index) in self._keys

    def children(self, node_id: NodeId) -> list[NodeId]:
        """Syntactic children in insertion order."""
        return self.successors(node_id, STRUCTURAL_EDGES)

    def child(self, node_id: NodeId, kind: EdgeKind, role: Optional[str] = None) -> Optional[NodeId]:
        for e in self.out_edges(node_id, kind):
            if role is None or e.props.get("role") == role:
                return e.dst
        return None

    def descendants(self, node_id: NodeId) -> list[NodeId]:
        out, stack = [], list(reversed(self.children(node_id)))
        while stack:
            n = stack.pop()
            out.append(n)
            stack.extend(reversed(self.children(n)))
        return out

    def reachable(self, start: NodeId, kind: KindSpec, direction: str = "fwd",
                  min_hops: int = 1) -> set[NodeId]:
        """Nodes reachable from ``start`` over ``kind`` edges in at least ``min_hops`` steps.

        Cycles count: ``start`` itself is included when a cycle of sufficient
        length returns to it.
        """
        self.node(start)
        if direction not in ("fwd", "bwd"):
            raise ValueError(f"direction must be 'fwd' or 'bwd', not {direction!r}")
        if min_hops < 0:
            raise ValueError("min_hops must be non-negative")
        step = self.successors if direction == "fwd" else self.predecessors
        seen = {(start, 0)}
        queue = deque(seen)
        while queue:
            n, h = queue.popleft()
            nh = min(h + 1, min_hops)
            for m in step(n, kind):
                if (m, nh) not in seen:
                    seen.add((m, nh))
                    queue.append((m, nh))
        return {n for n, h in seen if h == min_hops}

    def shortest_path(self, src: NodeId, dst: NodeId, kind: KindSpec,
                      allowed: Optional[set[NodeId]] = None) -> Optional[list[NodeId]]:
        """Forward BFS path ``src`` .. ``dst``; ties broken by edge insertion order."""
        prev: dict[NodeId, Optional[NodeId]] = {src: None}
        queue = deque([src])
        while queue:
            n = queue.popleft()
            if n == dst:
                path = [n]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return path[::-1]
            for m in self.successors(n, kind):
                if m not in prev and (allowed is None or m in allowed):
                    prev[m] = n
                    queue.append(m)
        return None

    def summary(self) -> dict[str, Any]:
        counts: dict[str, int] = defaultdict(int)
        for n in self._nodes:
            counts[n.kind.value] += 1
        return dict(sorted(counts.items()))
