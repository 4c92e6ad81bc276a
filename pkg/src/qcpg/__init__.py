"""Code property graphs for hybrid quantum programs (Qiskit and OpenQASM)."""

__version__ = "0.1.0"

from qcpg.detectors import Finding, run_all  # noqa: E402
from qcpg.graph import PropertyGraph, SourceLocation  # noqa: E402
from qcpg.metrics import MetricReport, compute_metrics  # noqa: E402
from qcpg.pipeline import Analysis, analyze_paths, analyze_source  # noqa: E402

__all__ = [
    "Analysis", "Finding", "MetricReport", "PropertyGraph", "SourceLocation",
    "analyze_paths", "analyze_source", "compute_metrics", "run_all",
]
