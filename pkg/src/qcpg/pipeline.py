"""Run the frontends and passes that build a frozen QCPG for one or more files."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from qcpg.errors import Diagnostics
from qcpg.frontends.python import parse_python, resolve_references
from qcpg.frontends.qasm import parse_qasm
from qcpg.graph import PropertyGraph
from qcpg.passes.classical_flow import add_classical_dfg, add_classical_eog
from qcpg.passes.quantum_builder import Circuit, build_quantum_nodes, find_circuits
from qcpg.passes.quantum_flow import (
    add_intra_operation_dfg, add_quantum_eog, add_qubit_chain_dfg, bridge_classic_quantum,
)

log = logging.getLogger(__name__)

EXTENSIONS = {".py": "qiskit", ".qasm": "qasm"}


@dataclass
class Analysis:
    graph: PropertyGraph
    circuits: list[Circuit] = field(default_factory=list)
    diagnostics: Diagnostics = field(default_factory=Diagnostics)
    files: list[str] = field(default_factory=list)


def detect_format(path: str, fmt: str = "auto") -> str:
    if fmt != "auto":
        return fmt
    suffix = Path(path).suffix.lower()
    if suffix not in EXTENSIONS:
        raise ValueError(f"cannot infer frontend for '{path}'; pass --format")
    return EXTENSIONS[suffix]


def add_source(analysis: Analysis, source: str, file: str, fmt: str) -> list[Circuit]:
    """Parse one translation unit into ``analysis.graph`` and run every pass on it."""
    g, diags = analysis.graph, analysis.diagnostics
    if fmt == "qasm":
        program = parse_qasm(source, file, g)
    elif fmt == "qiskit":
        program = parse_python(source, file, g)
        resolve_references(g, program, diags)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    add_classical_eog(g, program)
    add_classical_dfg(g, program)
    circuits = [build_quantum_nodes(g, site, diags) for site in find_circuits(g, program)]
    add_intra_operation_dfg(g, circuits)
    for c in circuits:
        add_quantum_eog(g, c)
        add_qubit_chain_dfg(g, c)
        bridge_classic_quantum(g, c, diags)
    analysis.circuits.extend(circuits)
    analysis.files.append(file)
    log.debug("%s: %d circuit(s), graph now %d nodes", file, len(circuits), len(g))
    return circuits


def analyze_sources(sources: Iterable[tuple[str, str, str]]) -> Analysis:
    """Build one frozen graph from ``(source, file, format)`` triples."""
    analysis = Analysis(PropertyGraph())
    for source, file, fmt in sources:
        add_source(analysis, source, file, fmt)
    analysis.graph.freeze()
    return analysis


def analyze_source(source: str, file: str = "<input>", fmt: Optional[str] = None) -> Analysis:
    return analyze_sources([(source, file, fmt or detect_format(file))])


def analyze_paths(paths: Iterable[str], fmt: str = "auto") -> Analysis:
    triples = []
    for p in paths:
        triples.append((Path(p).read_text(encoding="utf-8"), str(p), detect_format(str(p), fmt)))
    return analyze_sources(triples)
