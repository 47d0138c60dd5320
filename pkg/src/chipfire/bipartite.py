"""Side-by-side fire accounting on complete bipartite graphs.

The two sides are called L and R, with L the smaller one (the first side on
ties). ``alpha(t, m)`` counts fires of a side during steps ``m .. m+t-1`` and
``d(v, t, m)`` the same for a single vertex.

The check functions run a structural claim about fire counts over a trace
and return a :class:`CheckReport`. Claims with a hypothesis count how often
the hypothesis actually occurred, so a vacuous pass shows up as
``hypothesis_count == 0`` rather than silently passing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .engine import Position, StepTrace, is_confined, trace
from .graphs import Graph
from .period import detect_period


class NotCompleteBipartiteError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class SideAccount:
    label: str
    vertices: tuple[int, ...]
    degree: int
    firing_counts: tuple[int, ...]  # fires of this side in each recorded state
    trace: StepTrace = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.vertices)

    def alpha(self, t: int, m: int = 0) -> int:
        u = self.trace.fire_counts
        return sum(u[m + t][v] - u[m][v] for v in self.vertices)

    def d(self, v: int, t: int, m: int = 0) -> int:
        u = self.trace.fire_counts
        return u[m + t][v] - u[m][v]


@dataclass
class Violation:
    check: str
    step: int
    vertices: tuple[int, ...]
    values: dict

    def to_dict(self) -> dict:
        return {"check": self.check, "step": self.step, "vertices": list(self.vertices), "values": self.values}


@dataclass
class CheckReport:
    check: str
    hypothesis_count: int = 0
    checked: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def merge(self, other: "CheckReport") -> "CheckReport":
        if other.check != self.check:
            raise ValueError(f"cannot merge {other.check} into {self.check}")
        self.hypothesis_count += other.hypothesis_count
        self.checked += other.checked
        self.violations.extend(other.violations)
        return self

    def summary(self) -> str:
        status = "all passed" if self.ok else f"{len(self.violations)} violations"
        return f"{self.check}: hypothesis met {self.hypothesis_count} times, {status}"

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "hypothesis_count": self.hypothesis_count,
            "checked": self.checked,
            "violation_count": len(self.violations),
            "violations": [v.to_dict() for v in self.violations[:20]],
        }


def sides(g: Graph) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Vertex tuples of (L, R), L being the smaller side."""
    if g.parts is None or len(g.parts) != 2:
        raise NotCompleteBipartiteError(f"{g!r} is not a complete bipartite graph")
    first, second = tuple(g.part_vertices(0)), tuple(g.part_vertices(1))
    return (second, first) if len(second) < len(first) else (first, second)


def side_accounts(tr: StepTrace, g: Optional[Graph] = None) -> tuple[SideAccount, SideAccount]:
    g = g or tr.initial.graph
    left, right = sides(g)
    out = []
    for label, verts in (("L", left), ("R", right)):
        members = set(verts)
        counts = tuple(len(fs & members) for fs in tr.firing_sets)
        out.append(SideAccount(label, verts, g.degrees[verts[0]], counts, tr))
    return out[0], out[1]


def is_side_confined(p: Position) -> bool:
    """Admissibility for the fire-count lemmas on K_{a,b}.

    Every vertex holds at most ``2 deg - 1`` chips and the chip counts on each
    side span at most ``deg - 1``. This is exactly what one step produces from
    any position inside the ``2 deg - 1`` box, and it is implied by
    :func:`chipfire.engine.is_confined`.
    """
    left, right = sides(p.graph)
    degs = p.graph.degrees
    for verts in (left, right):
        vals = [p.chips[v] for v in verts]
        d = degs[verts[0]]
        if max(vals) > 2 * d - 1 or max(vals) - min(vals) > d - 1:
            return False
    return True


def _require(p: Position):
    sides(p.graph)
    if not is_side_confined(p):
        raise PreconditionError(f"position {p.chips} is not confined")


def check_balance(p: Position, horizon: int) -> CheckReport:
    """Chip change of a vertex equals chips received minus ``deg`` per own fire."""
    tr = trace(p, horizon)
    L, R = side_accounts(tr)
    rep = CheckReport("fire-balance")
    for own, other in ((L, R), (R, L)):
        for t in range(horizon + 1):
            received = other.alpha(t, 0)
            for v in own.vertices:
                rep.hypothesis_count += 1
                rep.checked += 1
                lhs = tr.states[t][v] - p.chips[v]
                rhs = received - own.degree * tr.u(t, v)
                if lhs != rhs:
                    rep.violations.append(Violation(rep.check, t, (v,), {"lhs": lhs, "rhs": rhs}))
    return rep


def check_lemma_diff1(p: Position, horizon: int) -> CheckReport:
    """Same-side vertices keep their fire counts within one of each other.

    If ``chips(v) <= chips(w)`` then ``u_t(v) <= u_t(w) <= u_t(v) + 1`` for all
    ``t <= horizon``.
    """
    _require(p)
    tr = trace(p, horizon)
    rep = CheckReport("fire-count-spread")
    for side in sides(p.graph):
        for v in side:
            for w in side:
                if v == w or p.chips[v] > p.chips[w]:
                    continue
                for t in range(horizon + 1):
                    rep.hypothesis_count += 1
                    rep.checked += 1
                    uv, uw = tr.u(t, v), tr.u(t, w)
                    if not uv <= uw <= uv + 1:
                        rep.violations.append(Violation(rep.check, t, (v, w), {"u_v": uv, "u_w": uw}))
    return rep


def check_divisibility_lemmas(p: Position, horizon: int) -> list[CheckReport]:
    """Window claims for every window ``(m, t)`` with ``m + t + 1 <= horizon``.

    When one side's fires in the window are a multiple of its size, say
    ``k * size``, every vertex on that side fired exactly ``k`` times
    (``equal-side-counts``). If additionally ``k >= 1``, every vertex on the
    other side fires exactly ``k`` times in the window shifted by one step
    (``cross-side-window``).
    """
    _require(p)
    tr = trace(p, horizon)
    L, R = side_accounts(tr)
    equal = CheckReport("equal-side-counts")
    cross = CheckReport("cross-side-window")
    for own, other in ((L, R), (R, L)):
        for m in range(horizon):
            for t in range(1, horizon - m):
                total = own.alpha(t, m)
                equal.checked += 1
                if total % own.size:
                    continue
                k = total // own.size
                equal.hypothesis_count += 1
                bad = [v for v in own.vertices if own.d(v, t, m) != k]
                if bad:
                    equal.violations.append(
                        Violation(equal.check, m, tuple(bad), {"t": t, "k": k, "side": own.label})
                    )
                if k >= 1:
                    cross.hypothesis_count += 1
                    cross.checked += 1
                    bad = [w for w in other.vertices if other.d(w, t, m + 1) != k]
                    if bad:
                        cross.violations.append(
                            Violation(cross.check, m, tuple(bad), {"t": t, "k": k, "side": own.label})
                        )
    return [equal, cross]


def check_window_parity(p: Position, horizon: int) -> CheckReport:
    """``F(m) + F(m+1) == F(m+t) + F(m+t+1)`` for even ``m`` when the windows at ``m`` and ``m+2`` both hold ``k * size`` fires, ``k >= 1``."""
    _require(p)
    tr = trace(p, horizon)
    rep = CheckReport("window-parity")
    for side in side_accounts(tr):
        for m in range(0, horizon, 2):
            for t in range(1, horizon - m - 1):
                a0, a2 = side.alpha(t, m), side.alpha(t, m + 2)
                if a0 != a2 or a0 == 0 or a0 % side.size:
                    continue
                rep.hypothesis_count += 1
                for v in side.vertices:
                    rep.checked += 1
                    lhs = tr.fired(v, m) + tr.fired(v, m + 1)
                    rhs = tr.fired(v, m + t) + tr.fired(v, m + t + 1)
                    if lhs != rhs:
                        rep.violations.append(Violation(rep.check, m, (v,), {"t": t, "lhs": lhs, "rhs": rhs}))
    return rep


def check_period_sufficiency(p: Position, horizon: int, cap: Optional[int] = None) -> CheckReport:
    """The smallest window that is a whole multiple of a side and repeats that side's firing pattern is the period.

    For each start ``m`` the smallest ``t >= 1`` with ``alpha(t, m) = k * size``
    (``k >= 1``) and ``F_v(m) == F_v(m+t)`` on the side is found. Then the period
    divides ``t``, and equals it once ``m`` is on the periodic orbit.
    """
    _require(p)
    res = detect_period(p, cap)
    tr = trace(p, horizon)
    rep = CheckReport("period-sufficiency")
    for side in side_accounts(tr):
        for m in range(horizon):
            for t in range(1, horizon - m):
                total = side.alpha(t, m)
                if total == 0 or total % side.size:
                    continue
                if any(tr.fired(v, m) != tr.fired(v, m + t) for v in side.vertices):
                    continue
                rep.hypothesis_count += 1
                rep.checked += 1
                ok = t % res.period == 0 and (m < res.transient or t == res.period)
                if not ok:
                    rep.violations.append(
                        Violation(rep.check, m, (), {"t": t, "period": res.period, "side": side.label})
                    )
                break
    return rep


def check_period_dichotomy(p: Position, cap: Optional[int] = None) -> list[CheckReport]:
    """Period versus the first balanced window, plus the size bounds.

    For every orbit state that is confined in the strict sense of
    :func:`chipfire.engine.is_confined`, take the smallest ``t`` at which a
    side has fired a positive multiple of its size; the period must be ``t``
    or ``2t``. Orbit states that are only confined relative to their
    predecessor do not qualify: on ``K_{2,2}`` the orbit through
    ``(2,3 | 1,2)`` has period 4 but fires all of L in its first step.

    Independently of any hypothesis, an odd period is at most ``min(a, b)``
    and an even one at most ``2 min(a, b)``.
    """
    left, right = sides(p.graph)
    res = detect_period(p, cap)
    small = min(len(left), len(right))
    dich = CheckReport("period-dichotomy")
    bounds = CheckReport("period-bounds", hypothesis_count=1, checked=1)
    limit = small if res.period % 2 else 2 * small
    if res.period > limit:
        bounds.violations.append(Violation(bounds.check, res.transient, (), {"period": res.period, "limit": limit}))

    horizon = 2 * res.period + 1  # always contains one full period
    for offset, state in enumerate(res.orbit_positions()):
        dich.checked += 1
        if not is_confined(state):
            continue
        tr = trace(state, horizon)
        for side in side_accounts(tr):
            for t in range(1, horizon):
                total = side.alpha(t, 0)
                if total and total % side.size == 0:
                    dich.hypothesis_count += 1
                    if res.period not in (t, 2 * t):
                        dich.violations.append(
                            Violation(
                                dich.check,
                                res.transient + offset,
                                (),
                                {"t": t, "period": res.period, "side": side.label},
                            )
                        )
                    break
    return [dich, bounds]


def run_lemma_suite(p: Position, horizon: int, cap: Optional[int] = None) -> list[CheckReport]:
    """Every fire-count check on one admissible position."""
    reports = [check_balance(p, horizon), check_lemma_diff1(p, horizon)]
    reports += check_divisibility_lemmas(p, horizon)
    reports.append(check_window_parity(p, horizon))
    reports.append(check_period_sufficiency(p, horizon, cap))
    reports += check_period_dichotomy(p, cap)
    return reports
