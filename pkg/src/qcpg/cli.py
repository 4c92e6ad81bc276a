"""Command-line driver: ``qcpg analyze|export|metrics``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Optional, Sequence, TextIO

from qcpg import __version__
from qcpg.detectors import RULES, run_all
from qcpg.errors import SourceError
from qcpg.export import to_cypher, to_dot, to_json
from qcpg.metrics import compute_all
from qcpg.pipeline import Analysis, analyze_paths

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_PARSE = 2
EXIT_USAGE = 64
EXIT_IO = 66
REPORT_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _color(stream: TextIO) -> bool:
    if os.environ.get("QCPG_COLOR") == "0":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _style(text: str, code: str, on: bool) -> str:
    return f"\033[{code}m{text}\033[0m" if on else text


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qcpg", description="Static analysis of hybrid quantum programs.")
    p.add_argument("--version", action="version", version=f"qcpg {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log pass progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("paths", nargs="+", help="Python (Qiskit) or OpenQASM source files")
        sp.add_argument("--format", choices=("auto", "qiskit", "qasm"), default="auto",
                        help="frontend to use (default: by file extension)")

    a = sub.add_parser("analyze", help="run bug-pattern detectors")
    common(a)
    a.add_argument("--rules", help="comma-separated rule ids (default: all)")
    a.add_argument("--output", choices=("text", "json"), default="text")
    a.add_argument("--fail-on-findings", action="store_true", help="exit 1 if anything is reported")

    e = sub.add_parser("export", help="write the graph as JSON, DOT or Cypher")
    common(e)
    e.add_argument("--to", choices=("json", "dot", "cypher"), required=True)
    e.add_argument("--out", help="output file (default: stdout)")
    e.add_argument("--scope", choices=("full", "quantum"), default="full", help="DOT only")

    m = sub.add_parser("metrics", help="print circuit complexity metrics")
    common(m)
    m.add_argument("--output", choices=("text", "json"), default="text")
    return p


def _parse_rules(spec: Optional[str]) -> Optional[list[str]]:
    if spec is None:
        return None
    rules = [r.strip().upper() for r in spec.split(",") if r.strip()]
    unknown = [r for r in rules if r not in RULES]
    if unknown or not rules:
        raise UsageError(f"unknown rule(s): {', '.join(unknown) or '(none given)'}; "
                         f"choose from {', '.join(RULES)}")
    return rules


def _analyze(args) -> Analysis:
    try:
        return analyze_paths(args.paths, args.format)
    except ValueError as exc:  # frontend could not be inferred
        raise UsageError(str(exc)) from None


def _write(text: str, out: TextIO):
    out.write(text)
    if text and not text.endswith("\n"):
        out.write("\n")


def _warnings(analysis: Analysis) -> list[dict]:
    return [{"code": d.code, "message": d.message,
             "file": d.location.file if d.location else None,
             "line": d.location.line if d.location else None,
             "col": d.location.column if d.location else None}
            for d in analysis.diagnostics]


def cmd_analyze(args, out: TextIO, err: TextIO) -> int:
    rules = _parse_rules(args.rules)
    analysis = _analyze(args)
    findings = run_all(analysis.graph, rules)
    metrics = compute_all(analysis.graph, analysis.diagnostics)
    if args.output == "json":
        report = {
            "version": REPORT_VERSION,
            "files": analysis.files,
            "findings": [f.to_dict() for f in findings],
            "metrics": {f"{analysis.graph[r.circuit].location.file}:{r.name}": r.to_dict() for r in metrics},
            "warnings": _warnings(analysis),
        }
        _write(json.dumps(report, indent=2, ensure_ascii=False), out)
    else:
        color = _color(out)
        for d in analysis.diagnostics:
            err.write(f"{d}\n")
        for f in findings:
            out.write(f"{f.location}: {_style(f.rule_id, '1;33', color)}: {f.message}\n")
        n = len(findings)
        summary = f"{n} finding{'s' if n != 1 else ''} in {len(analysis.files)} file(s)"
        out.write(_style(summary, "1", color) + "\n")
    return EXIT_FINDINGS if findings and args.fail_on_findings else EXIT_OK


def cmd_export(args, out: TextIO, err: TextIO) -> int:
    analysis = _analyze(args)
    g = analysis.graph
    if args.to == "json":
        text = to_json(g) + "\n"
    elif args.to == "cypher":
        text = to_cypher(g)
    else:
        text = to_dot(g, args.scope)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_metrics(args, out: TextIO, err: TextIO) -> int:
    analysis = _analyze(args)
    reports = compute_all(analysis.graph, analysis.diagnostics)
    if args.output == "json":
        _write(json.dumps({"version": REPORT_VERSION, "files": analysis.files,
                           "metrics": [dict(file=analysis.graph[r.circuit].location.file, **r.to_dict())
                                       for r in reports]}, indent=2), out)
    elif not reports:
        out.write("no circuits found\n")
    else:
        out.write("\n".join(r.table() for r in reports) + "\n")
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "export": cmd_export, "metrics": cmd_metrics}


def main(argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=err)
    try:
        return COMMANDS[args.command](args, out, err)
    except UsageError as exc:
        err.write(f"qcpg: error: {exc}\n")
        return EXIT_USAGE
    except SourceError as exc:
        where = f"{exc.location}: " if exc.location else ""
        err.write(f"{where}error[{type(exc).__name__}]: {exc.message}\n")
        return EXIT_PARSE
    except OSError as exc:
        err.write(f"qcpg: error: {exc.filename or ''}: {exc.strerror or exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
