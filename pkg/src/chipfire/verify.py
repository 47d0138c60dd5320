"""Desk-scale verification sweeps.

Exhaustive sweeps walk every start position inside a per-vertex chip box
(by default ``0 .. 2 deg(v) - 1``, which contains every orbit of period
greater than one). The start space is cut into contiguous index ranges, one
per worker, and the per-range period counters are summed, so the result
does not depend on the worker count.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import graphs
from .bipartite import CheckReport, Violation, is_side_confined, run_lemma_suite, sides
from .constructions import admissible_periods
from .engine import (
    Position,
    StepCapExceeded,
    complement,
    confined_against,
    firing_set,
    is_confined,
    step,
    step_cap,
    trace,
    within_double_degree,
)
from .graphs import Graph
from .period import PeriodResult, detect_period, orbit_entry

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class PeriodSetReport:
    graph: str
    mode: str
    bound: tuple[int, ...]
    periods: Counter
    expected: Optional[frozenset[int]] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    starts: int = 0
    states_visited: int = 0
    cap_exceeded: list[tuple[int, ...]] = field(default_factory=list)
    bound_violations: list[int] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def period_set(self) -> set[int]:
        return set(self.periods)

    @property
    def missing(self) -> list[int]:
        return sorted(self.expected - self.period_set) if self.expected is not None else []

    @property
    def extra(self) -> list[int]:
        return sorted(self.period_set - self.expected) if self.expected is not None else []

    @property
    def verdict(self) -> str:
        if self.expected is None:
            return "unchecked"
        if self.missing and self.extra:
            return "missing and extra periods"
        if self.missing:
            return "missing periods"
        if self.extra:
            return "extra periods"
        return "match"

    @property
    def ok(self) -> bool:
        return self.verdict in ("match", "unchecked") and not self.cap_exceeded and not self.bound_violations

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "graph": self.graph,
            "mode": self.mode,
            "bound": list(self.bound),
            "state_count": self.starts,
            "states_visited": self.states_visited,
            "periods": {str(p): n for p, n in sorted(self.periods.items())},
            "expected": sorted(self.expected) if self.expected is not None else None,
            "missing": self.missing,
            "extra": self.extra,
            "verdict": self.verdict,
            "cap_exceeded": len(self.cap_exceeded),
            "bound_violations": self.bound_violations,
        }
        if self.mode == "random":
            out["samples"] = self.samples
            out["seed"] = self.seed
        if timing:
            out["wall_time"] = round(self.wall_time, 3)
        return out

    def csv_rows(self) -> list[dict]:
        bound = " ".join(map(str, self.bound))
        return [
            {"graph": self.graph, "mode": self.mode, "bound": bound, "period": p, "count": n}
            for p, n in sorted(self.periods.items())
        ]


def default_bound(g: Graph, unconfined: bool = False) -> tuple[int, ...]:
    if unconfined:
        return tuple(4 * d for d in g.degrees)
    return tuple(max(2 * d - 1, 0) for d in g.degrees)


def box_size(bound: Sequence[int]) -> int:
    return math.prod(b + 1 for b in bound)


def expected_periods(g: Graph) -> Optional[frozenset[int]]:
    """The known period set for complete bipartite graphs, otherwise None."""
    if g.parts is not None and len(g.parts) == 2:
        return frozenset(admissible_periods(*g.parts))
    return None


def _scan(args) -> tuple[Counter, int, list]:
    degrees, adjacency, starts, cap = args
    periods: Counter = Counter()
    visited = 0
    failed = []
    for chips in starts:
        try:
            t0, p, _ = orbit_entry(chips, degrees, adjacency, cap)
        except StepCapExceeded:
            failed.append(chips)
            continue
        periods[p] += 1
        visited += t0 + p
    return periods, visited, failed


def _scan_range(args) -> tuple[Counter, int, list]:
    degrees, adjacency, bound, lo, hi, cap = args
    box = itertools.product(*[range(b + 1) for b in bound])
    return _scan((degrees, adjacency, itertools.islice(box, lo, hi), cap))


def _run(tasks: list, fn, jobs: int) -> tuple[Counter, int, list]:
    periods: Counter = Counter()
    visited = 0
    failed = []
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(fn, tasks))
    else:
        results = [fn(t) for t in tasks]
    for c, v, f in results:  # merge in task order
        periods.update(c)
        visited += v
        failed.extend(f)
    return periods, visited, failed


def random_position(g: Graph, rng: random.Random, bound: Optional[Sequence[int]] = None) -> Position:
    bound = bound or default_bound(g)
    return Position(g, tuple(rng.randint(0, b) for b in bound))


def enumerate_periods(
    g: Graph,
    mode: str = "exhaustive",
    bound: Optional[Sequence[int]] = None,
    samples: int = 1000,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    jobs: int = 1,
    unconfined: bool = False,
    cap: Optional[int] = None,
    expected: Optional[Iterable[int]] = None,
) -> PeriodSetReport:
    """Period multiset over every (or a random sample of) start position in the chip box."""
    started = time.perf_counter()
    bound = tuple(bound) if bound is not None else default_bound(g, unconfined)
    if len(bound) != g.vertex_count:
        raise ValueError("bound needs one entry per vertex")
    limit = step_cap(cap)
    degs, adj = g.degrees, g.adjacency
    exp = frozenset(expected) if expected is not None else expected_periods(g)
    jobs = max(1, jobs)

    if mode == "exhaustive":
        total = box_size(bound)
        if total > budget:
            raise BudgetExceeded(f"{total} start positions exceed the budget of {budget}")
        chunks = max(1, min(total, jobs * 4))
        edges = [total * i // chunks for i in range(chunks + 1)]
        tasks = [(degs, adj, bound, lo, hi, limit) for lo, hi in zip(edges, edges[1:]) if hi > lo]
        periods, visited, failed = _run(tasks, _scan_range, jobs)
        starts = total
    elif mode == "random":
        rng = random.Random(seed)
        pool = [tuple(rng.randint(0, b) for b in bound) for _ in range(samples)]
        chunks = max(1, jobs * 4)
        tasks = [(degs, adj, pool[i::chunks], limit) for i in range(chunks) if pool[i::chunks]]
        periods, visited, failed = _run(tasks, _scan, jobs)
        starts = samples
    else:
        raise ValueError(f"unknown enumeration mode {mode!r}")

    report = PeriodSetReport(
        graph=g.spec or repr(g),
        mode=mode,
        bound=bound,
        periods=periods,
        expected=exp,
        samples=samples if mode == "random" else None,
        seed=seed if mode == "random" else None,
        starts=starts,
        states_visited=visited,
        cap_exceeded=failed,
    )
    if g.parts is not None and len(g.parts) == 2:
        small = min(g.parts)
        report.bound_violations = sorted(
            p for p in periods if (p % 2 and p > small) or (p % 2 == 0 and p > 2 * small)
        )
    report.wall_time = time.perf_counter() - started
    return report


def verify_bipartite_theorem(a: int, b: int, budget: int = DEFAULT_BUDGET, jobs: int = 1, cap=None) -> PeriodSetReport:
    """Exhaustively compare the period set of ``K_{a,b}`` with ``{1..m} U {2,..,2m}``."""
    g = graphs.complete_bipartite(a, b)
    return enumerate_periods(g, "exhaustive", budget=budget, jobs=jobs, cap=cap, expected=admissible_periods(a, b))


# ---------------------------------------------------------------------------
# per-result checks


def check_orbit_confinement(r: PeriodResult) -> CheckReport:
    """Each orbit state lies inside the ``2 deg - 1`` box and within the bounds set by its predecessor's firing."""
    rep = CheckReport("orbit-confinement")
    if r.period <= 1:
        return rep
    rep.hypothesis_count = 1
    states = r.orbit_positions()
    for i, cur in enumerate(states):
        prev = states[i - 1]
        rep.checked += 1
        if not within_double_degree(cur) or not confined_against(cur, prev):
            rep.violations.append(Violation(rep.check, r.transient + i, (), {"chips": list(cur.chips)}))
    return rep


def check_minimality(r: PeriodResult) -> CheckReport:
    """Scan for a shorter transient or a shorter cycle than the one reported."""
    rep = CheckReport("minimality", hypothesis_count=1, checked=1)
    tr = trace(r.position, r.transient + 2 * r.period)
    s = tr.states
    for t in range(r.transient):
        if s[t + r.period] == s[t]:
            rep.violations.append(Violation(rep.check, t, (), {"shorter_transient": t}))
            break
    for q in range(1, r.period):
        if s[r.transient + q] == s[r.transient]:
            rep.violations.append(Violation(rep.check, r.transient, (), {"shorter_period": q}))
            break
    return rep


def check_fire_count_characterization(p: Position, cap: Optional[int] = None) -> CheckReport:
    """``U^t(p) == p`` exactly when every vertex has fired equally often in ``t`` steps, for ``t <= t0 + 2 period``."""
    res = detect_period(p, cap)
    horizon = res.transient + 2 * res.period
    tr = trace(p, horizon)
    rep = CheckReport("returns-iff-equal-fires")
    for t in range(1, horizon + 1):
        rep.checked += 1
        returned = tr.states[t] == p.chips
        equal = len(set(tr.fire_counts[t])) == 1
        if returned:
            rep.hypothesis_count += 1
        if returned != equal:
            rep.violations.append(Violation(rep.check, t, (), {"returned": returned, "equal_fires": equal}))
    return rep


def check_complement(p: Position, steps: int = 100, cap: Optional[int] = None) -> CheckReport:
    """Stepping commutes with complementing, firing flips, and both have one period."""
    rep = CheckReport("complement", hypothesis_count=1)
    x, y = p, complement(p)
    for t in range(steps):
        rep.checked += 1
        fx, fy = firing_set(x), firing_set(y)
        if fx & fy or len(fx | fy) != len(x.chips):
            rep.violations.append(Violation(rep.check, t, (), {"firing_flip": False}))
        nx, ny = step(x), step(y)
        if ny != complement(nx):
            rep.violations.append(Violation(rep.check, t, (), {"chips": list(x.chips)}))
            break
        x, y = nx, ny
    pa, pb = detect_period(p, cap).period, detect_period(complement(p), cap).period
    if pa != pb:
        rep.violations.append(Violation(rep.check, 0, (), {"period": pa, "complement_period": pb}))
    return rep


# ---------------------------------------------------------------------------
# class sweeps


@dataclass
class ClassReport:
    cls: str
    samples: int
    seed: int
    periods: Counter = field(default_factory=Counter)
    checked: int = 0
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "class": self.cls,
            "samples": self.samples,
            "seed": self.seed,
            "checked": self.checked,
            "periods": {str(p): n for p, n in sorted(self.periods.items())},
            "violation_count": len(self.violations),
            "violations": self.violations[:20],
        }


def random_tree(n: int, rng: random.Random) -> Graph:
    """Tree from a random attachment sequence under a random relabelling."""
    labels = list(range(n))
    rng.shuffle(labels)
    edges = [(labels[i], labels[rng.randrange(i)]) for i in range(1, n)]
    return graphs.from_edges(n, edges, spec=f"tree:{n}")


COMPLEMENT_GRAPHS = ("complete_bipartite:3,3", "complete:5", "cycle:6", "path:5")
POOL_GRAPHS = ("complete_bipartite:2,2", "complete_bipartite:3,3", "complete:5", "cycle:6", "path:5")


def abundance_threshold(g: Graph) -> int:
    return 4 * g.edge_count - g.vertex_count


def random_confined(g: Graph, rng: random.Random, tries: int = 100_000) -> Position:
    """Uniform sample from the confined positions of the ``2 deg - 1`` box, by rejection."""
    for _ in range(tries):
        p = random_position(g, rng)
        if is_confined(p):
            return p
    raise RuntimeError(f"no confined position found on {g!r} in {tries} tries")


def verify_class_properties(
    cls: str,
    samples: int = 1000,
    seed: int = 0,
    max_n: Optional[int] = None,
    unconfined: bool = False,
    graph_specs: Optional[Sequence[str]] = None,
    cap: Optional[int] = None,
) -> ClassReport:
    """Check a known structural fact over random instances.

    ``trees``: periods are 1 or 2. ``complete``: the period on ``K_n`` is at
    most ``n``. ``abundant``: at least ``4|E| - |V|`` chips give period 1.
    ``complement``: stepping commutes with complementing and periods agree.
    ``confinement``: orbit states of period > 1 stay confined.
    """
    rng = random.Random(seed)
    rep = ClassReport(cls, samples, seed)

    def bound_for(g):
        return default_bound(g, unconfined)

    if cls == "trees":
        top = max_n or 8
        for _ in range(samples):
            g = random_tree(rng.randint(2, top), rng)
            p = random_position(g, rng, bound_for(g))
            period = detect_period(p, cap).period
            rep.periods[period] += 1
            rep.checked += 1
            if period not in (1, 2):
                rep.violations.append({"graph": g.edges(), "chips": list(p.chips), "period": period})
    elif cls == "complete":
        top = max_n or 6
        for _ in range(samples):
            n = rng.randint(2, top)
            g = graphs.complete(n)
            p = random_position(g, rng, bound_for(g))
            period = detect_period(p, cap).period
            rep.periods[period] += 1
            rep.checked += 1
            if period > n:
                rep.violations.append({"graph": g.spec, "chips": list(p.chips), "period": period})
    elif cls == "abundant":
        pool = [graphs.build_graph(s) for s in (graph_specs or POOL_GRAPHS)]
        for _ in range(samples):
            g = rng.choice(pool)
            chips = list(random_position(g, rng, bound_for(g)).chips)
            need = abundance_threshold(g) - sum(chips)
            for _ in range(max(need, 0)):
                chips[rng.randrange(len(chips))] += 1
            p = Position(g, chips)
            period = detect_period(p, cap).period
            rep.periods[period] += 1
            rep.checked += 1
            if period != 1:
                rep.violations.append({"graph": g.spec, "chips": chips, "period": period})
    elif cls == "complement":
        pool = [graphs.build_graph(s) for s in (graph_specs or COMPLEMENT_GRAPHS)]
        for i in range(samples):
            g = pool[i % len(pool)]
            p = random_confined(g, rng)
            r = check_complement(p, cap=cap)
            rep.checked += 1
            rep.periods[detect_period(p, cap).period] += 1
            if not r.ok:
                rep.violations.append({"graph": g.spec, "chips": list(p.chips), "detail": r.violations[0].values})
    elif cls == "confinement":
        pool = [graphs.build_graph(s) for s in (graph_specs or POOL_GRAPHS)]
        for _ in range(samples):
            g = rng.choice(pool)
            p = random_position(g, rng, default_bound(g, unconfined=True))
            res = detect_period(p, cap)
            rep.periods[res.period] += 1
            rep.checked += 1
            r = check_orbit_confinement(res)
            if not r.ok:
                rep.violations.append({"graph": g.spec, "chips": list(p.chips), "period": res.period})
    else:
        raise ValueError(f"unknown class {cls!r}")
    return rep


def verify_bipartite_lemmas(
    a: int,
    b: int,
    mode: str = "exhaustive",
    samples: int = 1000,
    seed: int = 0,
    horizon: int = 20,
    budget: int = DEFAULT_BUDGET,
    cap: Optional[int] = None,
) -> list[CheckReport]:
    """Run the fire-count lemma suite over confined positions of ``K_{a,b}``.

    Exhaustive mode takes every position in the ``2 deg - 1`` box that meets
    :func:`chipfire.bipartite.is_side_confined`; random mode samples
    confined positions uniformly (see :func:`random_confined`).
    """
    g = graphs.complete_bipartite(a, b)
    sides(g)
    if mode == "exhaustive":
        bound = default_bound(g)
        if box_size(bound) > budget:
            raise BudgetExceeded(f"{box_size(bound)} start positions exceed the budget of {budget}")
        starts = (Position(g, s) for s in itertools.product(*[range(x + 1) for x in bound]))
        starts = (p for p in starts if is_side_confined(p))
    elif mode == "random":
        rng = random.Random(seed)
        starts = (random_confined(g, rng) for _ in range(samples))
    else:
        raise ValueError(f"unknown mode {mode!r}")

    merged: dict[str, CheckReport] = {}
    for p in starts:
        for r in run_lemma_suite(p, horizon, cap):
            if r.check in merged:
                merged[r.check].merge(r)
            else:
                merged[r.check] = r
    return list(merged.values())
