"""Line-oriented text formats for instances, solutions and certificates.

Instance::

    dsn 3 2 1 bidirected class=planar
    v 0 s            # optional vertex label
    e 0 1 7/2
    e 1 0 7/2
    d 0 1

``scss`` instances may replace the demand lines by one ``r v1 v2 ...`` line,
in which case the header's last count is the number of terminals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from .errors import ContractViolation, ParseError
from .graph import Edge, Graph, Instance, Pattern, Solution, SolutionClass, is_bidirected

_WEIGHT = re.compile(r"^(-?\d+)(?:/(-?\d+))?$")


def format_weight(w: Fraction) -> str:
    return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"


def parse_weight(token: str, line: int) -> Fraction:
    m = _WEIGHT.match(token)
    if not m:
        raise ParseError(line, f"malformed weight {token!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den <= 0:
        raise ParseError(line, f"non-positive denominator in {token!r}")
    w = Fraction(num, den)
    if w < 0:
        raise ParseError(line, f"negative weight {token!r}")
    return w


def _lines(text: str | bytes) -> list[tuple[int, list[str]]]:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            out.append((no, body.split()))
    return out


def _int(tok: str, line: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(line, f"expected integer {what}, got {tok!r}") from None


def parse_instance(text: str | bytes) -> Instance:
    rows = _lines(text)
    if not rows:
        raise ParseError(1, "empty instance")
    hline, head = rows[0]
    if len(head) < 4 or head[0] not in ("dsn", "scss"):
        raise ParseError(hline, "malformed header; expected '<dsn|scss> <n> <m> <k> [flags]'")
    variant = head[0]
    n = _int(head[1], hline, "n")
    m = _int(head[2], hline, "m")
    k = _int(head[3], hline, "k")
    if n < 0 or m < 0 or k < 0:
        raise ParseError(hline, "negative count in header")
    bidirected = False
    cls = SolutionClass()
    for flag in head[4:]:
        if flag == "bidirected":
            bidirected = True
        elif flag.startswith("class="):
            try:
                cls = SolutionClass.from_token(flag[6:])
            except (ContractViolation, ValueError):
                raise ParseError(hline, f"unknown solution class {flag[6:]!r}") from None
        else:
            raise ParseError(hline, f"unknown header flag {flag!r}")

    labels: list[str | None] = [None] * n
    edges: list[Edge] = []
    demands: list[tuple[int, int]] = []
    terminals: list[int] | None = None

    def vertex(tok: str, line: int) -> int:
        v = _int(tok, line, "vertex")
        if not 0 <= v < n:
            raise ParseError(line, f"dangling vertex reference {v}")
        return v

    for line, toks in rows[1:]:
        kind = toks[0]
        if kind == "v":
            if len(toks) != 3:
                raise ParseError(line, "expected 'v <id> <label>'")
            labels[vertex(toks[1], line)] = toks[2]
        elif kind == "e":
            if len(toks) != 4:
                raise ParseError(line, "expected 'e <tail> <head> <weight>'")
            if demands or terminals is not None:
                raise ParseError(line, "edge line after demand lines")
            u, v = vertex(toks[1], line), vertex(toks[2], line)
            if u == v:
                raise ParseError(line, "self-loop")
            edges.append(Edge(u, v, parse_weight(toks[3], line), len(edges)))
        elif kind == "d":
            if len(toks) != 3:
                raise ParseError(line, "expected 'd <s> <t>'")
            s, t = vertex(toks[1], line), vertex(toks[2], line)
            if s == t:
                raise ParseError(line, "demand with equal endpoints")
            if (s, t) in demands:
                raise ParseError(line, f"duplicate demand ({s},{t})")
            demands.append((s, t))
        elif kind == "r":
            if variant != "scss":
                raise ParseError(line, "terminal line only allowed for scss")
            if terminals is not None:
                raise ParseError(line, "second terminal line")
            terminals = [vertex(t, line) for t in toks[1:]]
            if len(set(terminals)) != len(terminals):
                raise ParseError(line, "repeated terminal")
        else:
            raise ParseError(line, f"unknown line type {kind!r}")

    last = rows[-1][0]
    if len(edges) != m:
        raise ParseError(last, f"header declares {m} edges, found {len(edges)}")
    if terminals is not None and demands:
        raise ParseError(last, "scss instance mixes 'r' and 'd' lines")
    count = len(terminals) if terminals is not None else len(demands)
    if count != k:
        raise ParseError(last, f"header declares k={k}, found {count}")

    g = Graph(n, tuple(edges), tuple(labels))
    if bidirected and not is_bidirected(g):
        raise ParseError(hline, "header declares bidirected but some edge lacks an equal-weight reverse")

    if variant == "scss":
        if terminals is None:
            pattern = Pattern.from_demands(demands)
        else:
            pattern = Pattern.strongly_connect(terminals)
        return Instance(g, pattern, "scss", bidirected, cls)
    return Instance(g, Pattern.from_demands(demands), "dsn", bidirected, cls)


def serialize_instance(inst: Instance) -> str:
    g = inst.graph
    scss_terminal_line = inst.variant == "scss" and inst.pattern == Pattern.strongly_connect(inst.pattern.terminals)
    k = len(inst.pattern.terminals) if scss_terminal_line else inst.pattern.k
    head = [inst.variant, str(g.vertex_count), str(g.m), str(k)]
    if inst.bidirected_required:
        head.append("bidirected")
    if inst.solution_class.kind != "any":
        head.append("class=" + inst.solution_class.token())
    out = [" ".join(head)]
    for v, lab in enumerate(g.labels):
        if lab is not None:
            out.append(f"v {v} {lab}")
    for e in g.edges:
        out.append(f"e {e.tail} {e.head} {format_weight(e.weight)}")
    if scss_terminal_line:
        out.append("r " + " ".join(map(str, inst.pattern.terminals)))
    else:
        out.extend(f"d {s} {t}" for s, t in inst.pattern.demands)
    return "\n".join(out) + "\n"


def serialize_solution(sol: Solution) -> str:
    lines = [f"cost {format_weight(sol.cost)}"]
    lines.extend(f"e {i}" for i in sol.sorted_ids())
    return "\n".join(lines) + "\n"


def parse_solution(text: str | bytes, g: Graph) -> tuple[Fraction | None, frozenset[int]]:
    """Returns the declared cost (if any) and the edge ids."""
    declared = None
    ids: set[int] = set()
    for line, toks in _lines(text):
        if toks[0] == "cost" and len(toks) == 2:
            declared = parse_weight(toks[1], line)
        elif toks[0] == "e" and len(toks) == 2:
            eid = _int(toks[1], line, "edge id")
            if not 0 <= eid < g.m:
                raise ParseError(line, f"edge id {eid} does not exist")
            if eid in ids:
                raise ParseError(line, f"duplicate edge id {eid}")
            ids.add(eid)
        else:
            raise ParseError(line, "expected 'cost <w>' or 'e <id>'")
    return declared, frozenset(ids)


@dataclass(frozen=True)
class Certificate:
    budget: Fraction
    witness: frozenset[int] | None = None


def serialize_certificate(cert: Certificate) -> str:
    lines = [f"budget {format_weight(cert.budget)}"]
    if cert.witness is not None:
        lines.append("witness " + " ".join(map(str, sorted(cert.witness))))
    return "\n".join(lines) + "\n"


def parse_certificate(text: str | bytes) -> Certificate:
    budget = None
    witness = None
    for line, toks in _lines(text):
        if toks[0] == "budget" and len(toks) == 2:
            budget = parse_weight(toks[1], line)
        elif toks[0] == "witness":
            witness = frozenset(_int(t, line, "edge id") for t in toks[1:])
        else:
            raise ParseError(line, "expected 'budget <w>' or 'witness <ids>'")
    if budget is None:
        raise ParseError(1, "certificate without budget line")
    return Certificate(budget, witness)
