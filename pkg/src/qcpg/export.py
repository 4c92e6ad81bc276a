"""Serialize a QCPG to JSON, Graphviz DOT, or a Cypher script."""
from __future__ import annotations

import json
import re
from typing import Any

from qcpg.graph import Edge, PropertyGraph, SourceLocation
from qcpg.kinds import EdgeKind, NodeKind

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _location_fields(loc) -> dict:
    if loc is None:
        return {"file": None, "line": None, "col": None}
    return {"file": loc.file, "line": loc.line, "col": loc.column}


def to_json(graph: PropertyGraph) -> str:
    """Compact JSON document, nodes and edges ordered by id."""
    nodes = [{
        "id": n.id,
        "kind": n.kind.value,
        "labels": list(n.labels),
        "name": n.name,
        **_location_fields(n.location),
        "props": n.props,
    } for n in graph.nodes()]
    edges = [{"src": e.src, "dst": e.dst, "kind": e.kind.value, "props": dict(e.props)}
             for e in graph.edges()]
    return json.dumps({"nodes": nodes, "edges": edges}, separators=(",", ":"), ensure_ascii=False)


def from_json(text: str) -> PropertyGraph:
    """Rebuild a graph written by :func:`to_json`."""
    doc = json.loads(text)
    g = PropertyGraph()
    for i, n in enumerate(doc["nodes"]):
        if n["id"] != i:
            raise ValueError(f"node ids must be contiguous from 0; got {n['id']} at position {i}")
        loc = SourceLocation(n["file"], n["line"], n["col"]) if n.get("file") is not None else None
        g.add_node(NodeKind(n["kind"]), n["name"], loc, n.get("props") or {})
    for e in doc["edges"]:
        g.add_edge(e["src"], e["dst"], EdgeKind(e["kind"]), e.get("props") or {})
    return g


# -- Cypher -------------------------------------------------------------------

def _cypher_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_cypher_value(x) for x in v) + "]"
    return json.dumps(str(v), ensure_ascii=False)


def _cypher_key(k: str) -> str:
    return k if _IDENT.match(k) else "`" + k.replace("`", "``") + "`"


def _cypher_map(props: dict) -> str:
    items = [f"{_cypher_key(k)}: {_cypher_value(v)}" for k, v in props.items() if v is not None]
    return "{" + ", ".join(items) + "}"


def relationship_type(edge: Edge) -> str:
    if edge.kind == EdgeKind.GATE_OPERAND:
        return f"QUANTUM_BIT_{edge.index}"
    return edge.kind.value


def to_cypher(graph: PropertyGraph) -> str:
    """One CREATE per node (labels include supertypes), then one MATCH..CREATE per edge."""
    lines = []
    for n in graph.nodes():
        props = {"id": n.id, "kind": n.kind.value, "name": n.name}
        if n.location is not None:
            props.update(file=n.location.file, line=n.location.line, col=n.location.column)
        props.update(n.props)
        lines.append(f"CREATE (:{':'.join(n.labels)} {_cypher_map(props)});")
    for e in graph.edges():
        props = f" {_cypher_map(dict(e.props))}" if e.props else ""
        lines.append(f"MATCH (a {{id: {e.src}}}), (b {{id: {e.dst}}}) "
                     f"CREATE (a)-[:{relationship_type(e)}{props}]->(b);")
    return "\n".join(lines) + ("\n" if lines else "")


# -- DOT ------------------------------------------------------------------------

EDGE_STYLE = {
    EdgeKind.AST: 'color="gray50"',
    EdgeKind.EOG: 'color="red3", penwidth=1.5',
    EdgeKind.DFG: 'color="blue3", style="dashed"',
    EdgeKind.REFERS_TO: 'color="gray70", style="dotted"',
    EdgeKind.RELEVANT_FOR_GATES: 'color="darkgreen", style="dotted"',
}
DEFAULT_EDGE_STYLE = 'color="black"'


def _dot_str(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _dot_label(graph: PropertyGraph, nid: int) -> str:
    n = graph[nid]
    return _dot_str(f"{n.kind.value}\n{n.name}" if n.name else n.kind.value)


def to_dot(graph: PropertyGraph, scope: str = "full") -> str:
    """Graphviz digraph. ``scope="quantum"`` keeps the quantum part only: registers
    become clusters and measurement references fold into their measure node."""
    if scope not in ("full", "quantum"):
        raise ValueError(f"scope must be 'full' or 'quantum', not {scope!r}")
    g = graph
    rep = {n.id: n.id for n in g.nodes()}
    clusters: dict[int, list[int]] = {}
    if scope == "quantum":
        keep = {n.id for n in g.nodes() if n.kind == NodeKind.QuantumCircuit or "circuit" in n.props}
        for n in g.nodes((NodeKind.QuantumRegister, NodeKind.ClassicRegister)):
            if n.id in keep:
                keep.discard(n.id)
                clusters[n.id] = [b for b in g.successors(n.id, EdgeKind.AST)]
        for e in g.edges((EdgeKind.QU_BIT, EdgeKind.C_BIT)):
            rep[e.dst] = e.src
            keep.discard(e.dst)
    else:
        keep = {n.id for n in g.nodes()}

    lines = ["digraph qcpg {", '  node [shape=box, fontname="Helvetica"];']
    clustered = {b for bits in clusters.values() for b in bits}
    for reg, bits in clusters.items():
        lines.append(f"  subgraph cluster_{reg} {{")
        lines.append(f"    label={_dot_label(g, reg)};")
        for b in bits:
            lines.append(f"    n{b} [label={_dot_label(g, b)}];")
        lines.append("  }")
    for nid in sorted(keep - clustered):
        shape = ', shape=ellipse' if g[nid].kind.is_quantum else ''
        lines.append(f"  n{nid} [label={_dot_label(g, nid)}{shape}];")
    seen = set()
    for e in g.edges():
        a, b = rep.get(e.src, e.src), rep.get(e.dst, e.dst)
        if a == b or a not in keep or b not in keep:
            continue
        key = (a, b, e.kind, e.index)
        if key in seen:
            continue
        seen.add(key)
        label = relationship_type(e)
        style = EDGE_STYLE.get(e.kind, DEFAULT_EDGE_STYLE)
        lines.append(f"  n{a} -> n{b} [label={_dot_str(label)}, {style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
