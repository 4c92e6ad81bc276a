"""A tiny in-memory stand-in for a Cypher store.

It loads the CREATE/MATCH script written by ``to_cypher`` and evaluates
single-path ``MATCH p=... [WHERE NOT EXISTS {...} [AND NOT EXISTS {...}]] RETURN p``
queries: labels, relationship types, direction and ``*min..max`` hops.
That is enough for the superfluous-operation and constant-bit queries.
"""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Optional

_NODE_STMT = re.compile(r"^CREATE \(:([\w:]+) \{id: (\d+)[,}]")
_EDGE_STMT = re.compile(r"^MATCH \(a \{id: (\d+)\}\), \(b \{id: (\d+)\}\) CREATE \(a\)-\[:(\w+)[^\]]*\]->\(b\);$")


class Store:
    def __init__(self):
        self.labels: dict[int, set[str]] = {}
        self.out: dict[int, list[tuple[str, int]]] = defaultdict(list)
        self.inn: dict[int, list[tuple[str, int]]] = defaultdict(list)

    @classmethod
    def load(cls, script: str) -> "Store":
        s = cls()
        for line in script.splitlines():
            if not line.strip():
                continue
            m = _NODE_STMT.match(line)
            if m:
                s.labels[int(m.group(2))] = set(m.group(1).split(":"))
                continue
            m = _EDGE_STMT.match(line)
            if not m:
                raise ValueError(f"unrecognized statement: {line}")
            a, b, t = int(m.group(1)), int(m.group(2)), m.group(3)
            s.out[a].append((t, b))
            s.inn[b].append((t, a))
        return s


@dataclass
class NodePat:
    var: Optional[str]
    labels: list[str]


@dataclass
class RelPat:
    type: Optional[str]
    direction: str  # "out" | "in" | "any"
    lo: int = 1
    hi: Optional[int] = 1


_TOKEN = re.compile(r"""
    (?P<node>\((?P<nvar>\w*)(?P<nlabels>(?::\w+)*)\))
  | (?P<rel>(?P<left><)?-(?:\[(?::(?P<rtype>\w+))?(?P<star>\*(?P<lo>\d+)?(?P<dots>\.\.)?(?P<hi>\d+)?)?\])?-(?P<right>>)?)
""", re.X)


def parse_pattern(text: str):
    text = re.sub(r"\s+", "", text)
    items, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse pattern at {text[pos:]!r}")
        if m.group("node"):
            items.append(NodePat(m.group("nvar") or None, [l for l in m.group("nlabels").split(":") if l]))
        else:
            direction = "in" if m.group("left") else "out" if m.group("right") else "any"
            lo, hi = 1, 1
            if m.group("star"):
                lo = int(m.group("lo")) if m.group("lo") else 1
                if m.group("dots"):
                    hi = int(m.group("hi")) if m.group("hi") else None
                else:
                    hi = lo if m.group("lo") else None
            items.append(RelPat(m.group("rtype"), direction, lo, hi))
        pos = m.end()
    return items


def parse_query(query: str):
    q = " ".join(query.split())
    m = re.match(r"^MATCH p=(.*?)(?: WHERE (.*))? RETURN p$", q)
    if not m:
        raise ValueError("unsupported query shape")
    negs = []
    if m.group(2):
        for part in re.findall(r"NOT EXISTS ?\{(.*?)\}", m.group(2)):
            negs.append(parse_pattern(part))
    return parse_pattern(m.group(1)), negs


class Evaluator:
    def __init__(self, store: Store):
        self.s = store

    def _node_ok(self, pat: NodePat, n: int, binding: dict) -> bool:
        if pat.var and pat.var in binding and binding[pat.var] != n:
            return False
        return all(l in self.s.labels[n] for l in pat.labels)

    def _step(self, n: int, rel: RelPat):
        pairs = []
        if rel.direction in ("out", "any"):
            pairs += self.s.out.get(n, [])
        if rel.direction in ("in", "any"):
            pairs += self.s.inn.get(n, [])
        return [m for t, m in pairs if rel.type is None or t == rel.type]

    def _hops(self, n: int, rel: RelPat) -> set[int]:
        """Endpoints reachable in lo..hi hops (walks; fine for existence checks)."""
        cap = rel.hi if rel.hi is not None else len(self.s.labels) + 1
        found, frontier, seen = set(), {n}, set()
        for depth in range(1, cap + 1):
            frontier = {m for x in frontier for m in self._step(x, rel)} - (seen if rel.hi is None else set())
            if rel.hi is None:
                seen |= frontier
            if depth >= rel.lo:
                found |= frontier
            if not frontier:
                break
        return found

    def match(self, items, binding=None):
        binding = dict(binding or {})
        starts = list(self.s.labels) if not (items[0].var and items[0].var in binding) else [binding[items[0].var]]
        results = []
        for n in sorted(starts):
            if self._node_ok(items[0], n, binding):
                b = dict(binding)
                if items[0].var:
                    b[items[0].var] = n
                self._extend(items, 1, [n], b, results)
        return results

    def _extend(self, items, i, path, binding, results):
        if i >= len(items):
            results.append((tuple(path), binding))
            return
        rel, pat = items[i], items[i + 1]
        nxt = self._hops(path[-1], rel) if (rel.lo, rel.hi) != (1, 1) else set(self._step(path[-1], rel))
        for m in sorted(nxt):
            if self._node_ok(pat, m, binding):
                b = dict(binding)
                if pat.var:
                    b[pat.var] = m
                self._extend(items, i + 2, path + [m], b, results)

    def run(self, query: str) -> list[tuple[int, ...]]:
        main, negs = parse_query(query)
        out = []
        for path, binding in self.match(main):
            if any(self.match(neg, binding) for neg in negs):
                continue
            out.append(path)
        return out
