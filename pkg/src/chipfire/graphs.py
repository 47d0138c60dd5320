"""Simple connected graphs for the parallel chip-firing game.

Graphs are immutable. Vertices are dense 0-based integers; for the
multipartite families the canonical order lists the parts one after the
other, ascending index inside each part.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Sequence


class GraphSpecError(ValueError):
    """A graph specifier string could not be parsed."""


class GraphValidationError(ValueError):
    """A graph violates one or more of the simple/connected invariants."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("invalid graph: " + "; ".join(self.problems))


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected graph given by per-vertex neighbor tuples.

    ``parts`` holds the part sizes of a complete multipartite graph (in
    canonical order) and ``part_order`` maps each canonical part back to its
    position in the specifier the user wrote.
    """

    adjacency: tuple[tuple[int, ...], ...]
    parts: Optional[tuple[int, ...]] = None
    part_order: Optional[tuple[int, ...]] = None
    spec: Optional[str] = None
    _hash: int = field(init=False, repr=False, compare=False, default=0)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.adjacency, self.parts)))

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Graph):
            return NotImplemented
        return self.adjacency == other.adjacency and self.parts == other.parts

    def __hash__(self):
        return self._hash

    @property
    def vertex_count(self) -> int:
        return len(self.adjacency)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(nbrs) for nbrs in self.adjacency)

    @cached_property
    def edge_count(self) -> int:
        return sum(self.degrees) // 2

    @cached_property
    def part_of(self) -> Optional[tuple[int, ...]]:
        if self.parts is None:
            return None
        return tuple(i for i, size in enumerate(self.parts) for _ in range(size))

    def part_vertices(self, i: int) -> range:
        if self.parts is None:
            raise ValueError("graph has no part structure")
        start = sum(self.parts[:i])
        return range(start, start + self.parts[i])

    def edges(self) -> list[tuple[int, int]]:
        return [(v, w) for v, nbrs in enumerate(self.adjacency) for w in nbrs if v < w]

    def __repr__(self):
        label = self.spec or f"{self.vertex_count} vertices"
        return f"Graph({label!r})"


def degree(g: Graph, v: int) -> int:
    if not 0 <= v < g.vertex_count:
        raise IndexError(f"vertex {v} out of range for {g.vertex_count} vertices")
    return g.degrees[v]


def validate(g: Graph) -> list[str]:
    """Return every violated invariant of ``g``; an empty list means valid."""
    problems = []
    n = g.vertex_count
    if n == 0:
        return ["graph has no vertices"]
    for v, nbrs in enumerate(g.adjacency):
        if v in nbrs:
            problems.append(f"self-loop at vertex {v}")
        if len(set(nbrs)) != len(nbrs):
            problems.append(f"duplicate edge at vertex {v}")
        for w in nbrs:
            if not 0 <= w < n:
                problems.append(f"vertex {v} has out-of-range neighbor {w}")
            elif w != v and v not in g.adjacency[w]:
                problems.append(f"asymmetric edge {v}-{w}")

    seen = {0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for w in g.adjacency[v]:
            if 0 <= w < n and w not in seen:
                seen.add(w)
                queue.append(w)
    if len(seen) != n:
        problems.append(f"disconnected: {n - len(seen)} vertices unreachable from vertex 0")

    if g.parts is not None:
        if any(size < 1 for size in g.parts):
            problems.append("empty part")
        elif sum(g.parts) != n:
            problems.append("part sizes do not sum to the vertex count")
        else:
            part_of = g.part_of
            total = sum(g.parts)
            for v in range(n):
                expected = {w for w in range(n) if part_of[w] != part_of[v]}
                if set(g.adjacency[v]) != expected:
                    problems.append(f"vertex {v} adjacency is not complete multipartite")
                    break
                if g.degrees[v] != total - g.parts[part_of[v]]:
                    problems.append(f"vertex {v} degree does not match its part")
                    break
    return problems


def _checked(g: Graph) -> Graph:
    problems = validate(g)
    if problems:
        raise GraphValidationError(problems)
    return g


def _adjacency_from_edges(n: int, edges: Iterable[tuple[int, int]]) -> tuple[tuple[int, ...], ...]:
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        nbrs[u].append(v)
        if u != v:
            nbrs[v].append(u)
    return tuple(tuple(sorted(x)) for x in nbrs)


def from_edges(n: int, edges: Iterable[tuple[int, int]], spec: Optional[str] = None) -> Graph:
    """Build a validated graph on vertices ``0..n-1`` from an edge list."""
    return _checked(Graph(_adjacency_from_edges(n, edges), spec=spec))


def complete(n: int) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    return from_edges(n, edges, spec=f"complete:{n}")


def cycle(n: int) -> Graph:
    edges = [(i, (i + 1) % n) for i in range(n)]
    return from_edges(n, edges, spec=f"cycle:{n}")


def path(n: int) -> Graph:
    return from_edges(n, [(i, i + 1) for i in range(n - 1)], spec=f"path:{n}")


def _multipartite(sizes: Sequence[int], spec: str, sort_parts: bool) -> Graph:
    if any(a < 1 for a in sizes):
        raise GraphValidationError(["empty part"])
    order = list(range(len(sizes)))
    if sort_parts:
        # stable: equal sizes keep their declared order
        order.sort(key=lambda i: -sizes[i])
    parts = tuple(sizes[i] for i in order)
    part_of = [i for i, size in enumerate(parts) for _ in range(size)]
    n = len(part_of)
    adjacency = tuple(
        tuple(w for w in range(n) if part_of[w] != part_of[v]) for v in range(n)
    )
    return _checked(Graph(adjacency, parts=parts, part_order=tuple(order), spec=spec))


def complete_bipartite(a: int, b: int) -> Graph:
    """K_{a,b} with the ``a`` side first; sides are kept in declared order."""
    return _multipartite((a, b), f"complete_bipartite:{a},{b}", sort_parts=False)


def complete_multipartite(sizes: Sequence[int]) -> Graph:
    """Complete multipartite graph with parts sorted to non-increasing size."""
    sizes = tuple(sizes)
    return _multipartite(sizes, "complete_multipartite:" + ",".join(map(str, sizes)), sort_parts=True)


def read_edge_list(path: str | Path, spec: Optional[str] = None) -> Graph:
    """Read a ``u v`` per line edge list; ``#`` starts a comment.

    Vertex ids may be any integers; they are remapped densely in ascending
    order.
    """
    raw = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise GraphSpecError(f"{path}:{lineno}: expected 'u v', got {line!r}")
        try:
            raw.append((int(fields[0]), int(fields[1])))
        except ValueError:
            raise GraphSpecError(f"{path}:{lineno}: non-integer vertex id in {line!r}") from None
    if not raw:
        raise GraphSpecError(f"{path}: no edges")
    ids = sorted({x for e in raw for x in e})
    index = {x: i for i, x in enumerate(ids)}
    return from_edges(len(ids), [(index[u], index[v]) for u, v in raw], spec=spec or f"file:{path}")


def _sizes(text: str, spec: str) -> list[int]:
    try:
        sizes = [int(x) for x in text.split(",")]
    except ValueError:
        raise GraphSpecError(f"malformed size list in {spec!r}") from None
    if any(x < 1 for x in sizes):
        raise GraphSpecError(f"sizes must be >= 1 in {spec!r}")
    return sizes


def build_graph(spec: str) -> Graph:
    """Build a graph from a textual specifier.

    Accepted forms: ``complete:n``, ``complete_bipartite:a,b``,
    ``complete_multipartite:a1,...,ac``, ``cycle:n``, ``path:n`` and
    ``file:PATH``.
    """
    kind, sep, arg = spec.strip().partition(":")
    if not sep or not arg:
        raise GraphSpecError(f"malformed graph spec {spec!r}")
    if kind == "file":
        return read_edge_list(arg, spec=spec)
    sizes = _sizes(arg, spec)
    if kind in ("complete", "cycle", "path"):
        if len(sizes) != 1:
            raise GraphSpecError(f"{kind} takes one size, got {arg!r}")
        return {"complete": complete, "cycle": cycle, "path": path}[kind](sizes[0])
    if kind == "complete_bipartite":
        if len(sizes) != 2:
            raise GraphSpecError(f"complete_bipartite takes two sizes, got {arg!r}")
        return complete_bipartite(*sizes)
    if kind == "complete_multipartite":
        return complete_multipartite(sizes)
    raise GraphSpecError(f"unknown graph family {kind!r}")
