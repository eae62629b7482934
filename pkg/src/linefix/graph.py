"""Symbol graph over source tokens and diagnostic-argument tokens.

Nodes are (a) message tokens that are diagnostic arguments, (b) code
tokens matching any argument, and (c) all remaining code identifiers.
Edges connect every pair of nodes with the same surface form, so the
edge set is a disjoint union of per-symbol cliques.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .diagnostics import Feedback
from .lang import SourceProgram, TokenKind

GRAPH_FORMAT_VERSION = 1


class GraphParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        super().__init__(message if position is None
                         else f"{message} (at byte {position})")
        self.position = position


@dataclass(frozen=True)
class NodeRef:
    origin: str   # "code" | "msg"
    line: int     # 1-based for code nodes, 0 for message nodes
    index: int    # token index within its line / within the message
    symbol: str


@dataclass(frozen=True)
class ProgramFeedbackGraph:
    nodes: tuple[NodeRef, ...]
    adjacency: tuple[tuple[int, ...], ...]   # node id -> sorted neighbor ids

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, adj in enumerate(self.adjacency)
                for v in adj if u < v]

    def cliques(self) -> list[list[int]]:
        """Node-id groups by symbol, in first-appearance order."""
        groups: dict[str, list[int]] = {}
        for i, node in enumerate(self.nodes):
            groups.setdefault(node.symbol, []).append(i)
        return list(groups.values())


def build_graph(program: SourceProgram, feedback: Feedback | None) -> ProgramFeedbackGraph:
    args = set(feedback.arguments) if feedback is not None else set()
    nodes: list[NodeRef] = []
    for li, line in enumerate(program.lines):
        for tok in line:
            if tok.text in args or tok.kind == TokenKind.IDENTIFIER:
                nodes.append(NodeRef("code", li + 1, tok.col, tok.text))
    if feedback is not None:
        for mi, tok in enumerate(feedback.m_err):
            if tok.text in args:
                nodes.append(NodeRef("msg", 0, mi, tok.text))

    by_symbol: dict[str, list[int]] = {}
    for i, node in enumerate(nodes):
        by_symbol.setdefault(node.symbol, []).append(i)
    adjacency = []
    for i, node in enumerate(nodes):
        adjacency.append(tuple(j for j in by_symbol[node.symbol] if j != i))
    return ProgramFeedbackGraph(tuple(nodes), tuple(adjacency))


def neighbors(g: ProgramFeedbackGraph, node_id: int) -> tuple[int, ...]:
    if not 0 <= node_id < len(g.nodes):
        raise KeyError(f"unknown node id {node_id}")
    return g.adjacency[node_id]


def serialize_graph(g: ProgramFeedbackGraph) -> bytes:
    payload = {
        "format_version": GRAPH_FORMAT_VERSION,
        "nodes": [[n.origin, n.line, n.index, n.symbol] for n in g.nodes],
        "edges": g.edges(),
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def parse_graph(data: bytes) -> ProgramFeedbackGraph:
    try:
        payload = json.loads(data.decode())
    except json.JSONDecodeError as exc:
        raise GraphParseError(f"invalid graph dump: {exc.msg}", exc.pos) from exc
    if not isinstance(payload, dict) or "nodes" not in payload or "edges" not in payload:
        raise GraphParseError("graph dump missing nodes/edges", 0)
    if payload.get("format_version") != GRAPH_FORMAT_VERSION:
        raise GraphParseError(
            f"unsupported graph format_version {payload.get('format_version')!r}", 0)
    try:
        nodes = tuple(NodeRef(o, int(l), int(i), s)
                      for o, l, i, s in payload["nodes"])
        adj: list[set[int]] = [set() for _ in nodes]
        for u, v in payload["edges"]:
            adj[int(u)].add(int(v))
            adj[int(v)].add(int(u))
    except (ValueError, TypeError, IndexError) as exc:
        raise GraphParseError(f"malformed graph record: {exc}", 0) from exc
    return ProgramFeedbackGraph(nodes, tuple(tuple(sorted(a)) for a in adj))
