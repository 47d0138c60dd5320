"""Transient length and period of a position.

Two detectors share one contract. ``detect_period`` remembers every visited
state; ``detect_period_lowmem`` runs Brent's cycle finder and keeps only a
constant number of states (plus the orbit it reports). They serve as
oracles for each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .engine import Position, StepCapExceeded, step_chips, step_cap


@dataclass(frozen=True)
class PeriodResult:
    position: Position
    transient: int
    period: int
    orbit: tuple[tuple[int, ...], ...]
    fires_per_period: tuple[int, ...]
    method: str

    @property
    def k(self) -> int:
        return self.fires_per_period[0] if self.fires_per_period else 0

    @property
    def activity(self) -> Fraction:
        return activity(self)

    def orbit_positions(self) -> list[Position]:
        g = self.position.graph
        return [Position(g, s) for s in self.orbit]

    def to_dict(self) -> dict:
        act = self.activity
        return {
            "transient": self.transient,
            "period": self.period,
            "fires_per_period": self.k,
            "activity": f"{act.numerator}/{act.denominator}",
            "method": self.method,
        }


def _replay(p: Position, start: tuple[int, ...], period: int, transient: int, method: str) -> PeriodResult:
    """Walk one period from ``start``, collecting the orbit and fire counts."""
    g = p.graph
    degs, adj = g.degrees, g.adjacency
    counts = [0] * len(start)
    orbit = []
    chips = start
    for _ in range(period):
        orbit.append(chips)
        for v, c in enumerate(chips):
            if c >= degs[v]:
                counts[v] += 1
        chips = step_chips(chips, degs, adj)
    if chips != start:
        raise AssertionError("replayed orbit does not close")
    if len(set(counts)) > 1:
        raise AssertionError(f"closed orbit with unequal fire counts {counts}")
    return PeriodResult(p, transient, period, tuple(orbit), tuple(counts), method)


def orbit_entry(chips: tuple[int, ...], degrees, adjacency, cap: int) -> tuple[int, int, tuple[int, ...]]:
    """Stored-state kernel on a raw chip tuple: ``(transient, period, first orbit state)``."""
    seen = {}
    t = 0
    while chips not in seen:
        if t > cap:
            raise StepCapExceeded(t, cap)
        seen[chips] = t
        chips = step_chips(chips, degrees, adjacency)
        t += 1
    t0 = seen[chips]
    return t0, t - t0, chips


def detect_period(p: Position, cap: Optional[int] = None) -> PeriodResult:
    """Stored-state detection: map every visited state to its step index."""
    limit = step_cap(cap)
    if limit < 1:
        raise ValueError("cap must be >= 1")
    g = p.graph
    t0, period, start = orbit_entry(p.chips, g.degrees, g.adjacency, limit)
    return _replay(p, start, period, t0, "stored-state")


def detect_period_lowmem(p: Position, cap: Optional[int] = None) -> PeriodResult:
    """Constant-memory detection with Brent's algorithm."""
    limit = step_cap(cap)
    if limit < 1:
        raise ValueError("cap must be >= 1")
    g = p.graph
    degs, adj = g.degrees, g.adjacency

    def f(x):
        return step_chips(x, degs, adj)

    x0 = p.chips
    power = lam = 1
    tortoise = x0
    hare = f(x0)
    steps = 1
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = f(hare)
        lam += 1
        steps += 1
        if steps > limit:
            raise StepCapExceeded(steps, limit)

    tortoise = hare = x0
    for _ in range(lam):
        hare = f(hare)
    mu = 0
    while tortoise != hare:
        tortoise = f(tortoise)
        hare = f(hare)
        mu += 1
    return _replay(p, tortoise, lam, mu, "constant-memory")


def fires_per_period(r: PeriodResult) -> tuple[int, ...]:
    return r.fires_per_period


def activity(r: PeriodResult) -> Fraction:
    """Fires per vertex per step over the periodic regime, exactly."""
    n = len(r.fires_per_period)
    return Fraction(sum(r.fires_per_period), n * r.period) if n else Fraction(0)
