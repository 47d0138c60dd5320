"""Positions and the parallel step operator.

Every vertex holding at least ``deg(v)`` chips sends one chip to each
neighbor; all vertices fire at once. Chip counts follow unsigned 64-bit
semantics: a position whose total exceeds ``MAX_CHIPS`` is rejected, and
because a step conserves the total no step can overflow afterwards.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Sequence

from .graphs import Graph

MAX_CHIPS = 2**64 - 1
DEFAULT_STEP_CAP = 10**7


class ChipOverflowError(OverflowError):
    pass


class StepCapExceeded(RuntimeError):
    def __init__(self, steps: int, cap: int):
        self.steps = steps
        self.cap = cap
        super().__init__(f"step cap {cap} exceeded after {steps} steps")


def step_cap(cap: Optional[int] = None) -> int:
    """Resolve a step cap: explicit value, else $CHIPFIRE_STEP_CAP, else 10**7."""
    if cap is not None:
        return cap
    env = os.environ.get("CHIPFIRE_STEP_CAP")
    return int(env) if env else DEFAULT_STEP_CAP


@dataclass(frozen=True)
class Position:
    graph: Graph
    chips: tuple[int, ...]

    def __post_init__(self):
        chips = tuple(int(c) for c in self.chips)
        object.__setattr__(self, "chips", chips)
        if len(chips) != self.graph.vertex_count:
            raise ValueError(
                f"expected {self.graph.vertex_count} chip counts, got {len(chips)}"
            )
        for v, c in enumerate(chips):
            if c < 0:
                raise ValueError(f"vertex {v} has negative chip count {c}")
        if sum(chips) > MAX_CHIPS:
            raise ChipOverflowError(f"total chip count {sum(chips)} exceeds {MAX_CHIPS}")

    def __getitem__(self, v: int) -> int:
        return self.chips[v]

    def __len__(self):
        return len(self.chips)


def zeros(g: Graph) -> Position:
    return Position(g, (0,) * g.vertex_count)


# Tuple-level kernels. The orbit and enumeration code runs these on raw
# chip tuples to avoid re-validating a Position on every step.

def fire_flags(chips: Sequence[int], degrees: Sequence[int]) -> list[bool]:
    return [c >= d for c, d in zip(chips, degrees)]


def step_chips(chips: Sequence[int], degrees: Sequence[int], adjacency) -> tuple[int, ...]:
    fires = [c >= d for c, d in zip(chips, degrees)]
    out = []
    for v, c in enumerate(chips):
        gained = 0
        for w in adjacency[v]:
            if fires[w]:
                gained += 1
        out.append(c + gained - degrees[v] if fires[v] else c + gained)
    return tuple(out)


def _check_vertex(p: Position, v: int):
    if not 0 <= v < len(p.chips):
        raise IndexError(f"vertex {v} out of range for {len(p.chips)} vertices")


def phi(p: Position, v: int) -> int:
    """Number of neighbors of ``v`` that fire in ``p``."""
    _check_vertex(p, v)
    degs = p.graph.degrees
    return sum(1 for w in p.graph.adjacency[v] if p.chips[w] >= degs[w])


def firing_set(p: Position) -> frozenset[int]:
    degs = p.graph.degrees
    return frozenset(v for v, c in enumerate(p.chips) if c >= degs[v])


def step(p: Position) -> Position:
    g = p.graph
    return Position(g, step_chips(p.chips, g.degrees, g.adjacency))


@dataclass(frozen=True)
class StepTrace:
    """Firing history of ``steps`` steps starting at ``initial``.

    ``states[t]`` is the chip tuple after ``t`` steps, ``firing_sets[t]`` the
    vertices firing in that state, and ``fire_counts[t][v]`` the number of
    times ``v`` fired during the first ``t`` steps.
    """

    initial: Position
    states: tuple[tuple[int, ...], ...]
    firing_sets: tuple[frozenset[int], ...]
    fire_counts: tuple[tuple[int, ...], ...]

    @property
    def steps(self) -> int:
        return len(self.firing_sets)

    def fired(self, v: int, t: int) -> int:
        return int(v in self.firing_sets[t])

    def u(self, t: int, v: int) -> int:
        return self.fire_counts[t][v]

    def position(self, t: int) -> Position:
        return Position(self.initial.graph, self.states[t])


def trace(p: Position, steps: int) -> StepTrace:
    g = p.graph
    degs, adj = g.degrees, g.adjacency
    chips = p.chips
    states = [chips]
    firing_sets = []
    counts = [(0,) * len(chips)]
    for _ in range(steps):
        fires = frozenset(v for v, c in enumerate(chips) if c >= degs[v])
        firing_sets.append(fires)
        counts.append(tuple(u + (v in fires) for v, u in enumerate(counts[-1])))
        chips = step_chips(chips, degs, adj)
        states.append(chips)
    return StepTrace(p, tuple(states), tuple(firing_sets), tuple(counts))


def advance(p: Position, t: int, record: bool = False, cap: Optional[int] = None):
    """Apply ``t`` steps; returns ``(position, trace)`` with ``trace`` None unless recording."""
    if t < 0:
        raise ValueError("step count must be nonnegative")
    limit = step_cap(cap)
    if t > limit:
        raise StepCapExceeded(0, limit)
    if record:
        tr = trace(p, t)
        return tr.position(t), tr
    g = p.graph
    chips = p.chips
    for _ in range(t):
        chips = step_chips(chips, g.degrees, g.adjacency)
    return Position(g, chips), None


def is_confined(p: Position) -> bool:
    """True when every vertex has Phi(v) <= chips(v) <= Phi(v) + deg(v) - 1.

    Phi is taken in ``p`` itself. Positions on a periodic orbit generally
    satisfy the bounds only against their predecessor; see
    :func:`confined_after`.
    """
    return confined_against(p, p)


def confined_against(p: Position, prev: Position) -> bool:
    """Check ``p`` against the bounds with Phi evaluated on ``prev``."""
    g = p.graph
    degs = g.degrees
    fires = fire_flags(prev.chips, degs)
    for v, c in enumerate(p.chips):
        f = sum(1 for w in g.adjacency[v] if fires[w])
        if not f <= c <= f + degs[v] - 1:
            return False
    return True


def confined_after(prev: Position) -> bool:
    """Whether ``step(prev)`` satisfies the confinement bounds relative to ``prev``."""
    return confined_against(step(prev), prev)


def within_double_degree(p: Position) -> bool:
    degs = p.graph.degrees
    return all(c <= 2 * d - 1 for c, d in zip(p.chips, degs))


def complement(p: Position) -> Position:
    """Replace each ``chips(v)`` by ``2 deg(v) - 1 - chips(v)``."""
    degs = p.graph.degrees
    for v, (c, d) in enumerate(zip(p.chips, degs)):
        if c > 2 * d - 1:
            raise ValueError(
                f"complement undefined: vertex {v} holds {c} > 2*deg-1 = {2 * d - 1}"
            )
    return Position(p.graph, tuple(2 * d - 1 - c for c, d in zip(p.chips, degs)))


def total_chips(p: Position) -> int:
    return sum(p.chips)
