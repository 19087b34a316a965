"""Text format for graphs: ``c`` comments, a ``p cut n m`` header, ``e u v cap`` lines."""

from __future__ import annotations

import math

from .graph import Graph, GraphError


class ParseError(GraphError):
    def __init__(self, lineno, msg):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def _number(tok, lineno, what):
    try:
        x = float(tok)
    except ValueError:
        raise ParseError(lineno, f"{what} {tok!r} is not a number") from None
    if not math.isfinite(x):
        raise ParseError(lineno, f"{what} must be finite")
    return x


def _vertex(tok, n, lineno):
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(lineno, f"vertex {tok!r} is not an integer") from None
    if not 1 <= v <= n:
        raise ParseError(lineno, f"vertex {v} out of range 1..{n}")
    return v - 1


def parse_graph(text, max_ratio=None):
    """Parse the edge-list format; vertices are 1-based in the text, 0-based in the result."""
    n = m = None
    edges = []
    last = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        last = lineno
        tok = line.split()
        if tok[0] == "p":
            if n is not None:
                raise ParseError(lineno, "duplicate header")
            if len(tok) != 4 or tok[1] != "cut":
                raise ParseError(lineno, "header must read 'p cut <n> <m>'")
            try:
                n, m = int(tok[2]), int(tok[3])
            except ValueError:
                raise ParseError(lineno, "header counts must be integers") from None
            if n < 1 or m < 0:
                raise ParseError(lineno, "header counts out of range")
        elif tok[0] == "e":
            if n is None:
                raise ParseError(lineno, "edge before header")
            if len(tok) != 4:
                raise ParseError(lineno, "edge line must read 'e <u> <v> <cap>'")
            u, v = _vertex(tok[1], n, lineno), _vertex(tok[2], n, lineno)
            cap = _number(tok[3], lineno, "capacity")
            if cap <= 0:
                raise ParseError(lineno, "capacity must be positive")
            if len(edges) == m:
                raise ParseError(lineno, f"more than the declared {m} edges")
            edges.append((u, v, cap))
        else:
            raise ParseError(lineno, f"unknown line type {tok[0]!r}")
    if n is None:
        raise ParseError(max(last, 1), "missing header")
    if len(edges) != m:
        raise ParseError(last, f"expected {m} edges, found {len(edges)}")
    try:
        return Graph.from_edges(n, edges, max_ratio=max_ratio, check_ratio=True)
    except ParseError:
        raise
    except GraphError as err:
        raise ParseError(last, str(err)) from None


def serialize_graph(g, comment=None):
    lines = []
    if comment:
        lines += [f"c {row}" for row in comment.splitlines()]
    lines.append(f"p cut {g.n} {g.m}")
    lines += [f"e {u + 1} {v + 1} {c!r}" for u, v, c in g.edges()]
    return "\n".join(lines) + "\n"
