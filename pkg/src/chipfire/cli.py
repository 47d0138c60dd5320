"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 step cap exceeded, 4 invalid
construction target, 5 verification failure. JSON output uses sorted keys so
identical runs give byte-identical output.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import sys
from pathlib import Path
from typing import Optional

import click

from . import constructions, graphs, verify
from .bipartite import NotCompleteBipartiteError
from .engine import ChipOverflowError, Position, StepCapExceeded, firing_set, step_cap, trace
from .period import detect_period, detect_period_lowmem

EXIT_INPUT = 2
EXIT_CAP = 3
EXIT_TARGET = 4
EXIT_VERIFY = 5


class Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        self.code = code
        self.message = message
        super().__init__(message)


def _guard(fn):
    """Translate library errors into the exit-code contract."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Exit as e:
            if e.message:
                click.echo(e.message, err=True)
            sys.exit(e.code)
        except StepCapExceeded as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_CAP)
        except constructions.InvalidTargetError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_TARGET)
        except constructions.InfeasibleScheduleError as e:
            click.echo(f"error: {e}", err=True)
            click.echo(json.dumps(e.report, sort_keys=True), err=True)
            sys.exit(EXIT_VERIFY)
        except (
            graphs.GraphSpecError,
            graphs.GraphValidationError,
            ChipOverflowError,
            NotCompleteBipartiteError,
            verify.BudgetExceeded,
            ValueError,
            OSError,
        ) as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_INPUT)

    return wrapper


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue().rstrip("\n")


def _ints(text: str, what: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise Exit(EXIT_INPUT, f"error: malformed {what} list {text!r}") from None


def _position(graph_spec: Optional[str], chips: Optional[str], chips_file: Optional[str]) -> Position:
    if chips and chips_file:
        raise Exit(EXIT_INPUT, "error: give either --chips or --chips-file, not both")
    if chips_file:
        try:
            doc = json.loads(Path(chips_file).read_text())
        except json.JSONDecodeError as e:
            raise Exit(EXIT_INPUT, f"error: {chips_file}: {e}") from None
        if not isinstance(doc, dict) or "chips" not in doc:
            raise Exit(EXIT_INPUT, f"error: {chips_file}: expected an object with 'graph' and 'chips'")
        spec = doc.get("graph")
        if graph_spec and spec and graph_spec != spec:
            raise Exit(EXIT_INPUT, f"error: --graph {graph_spec} disagrees with file graph {spec}")
        spec = graph_spec or spec
        if not spec:
            raise Exit(EXIT_INPUT, "error: no graph given")
        values = doc["chips"]
        if not isinstance(values, list) or not all(isinstance(x, int) for x in values):
            raise Exit(EXIT_INPUT, f"error: {chips_file}: chips must be a list of integers")
        return Position(graphs.build_graph(spec), tuple(values))
    if not graph_spec:
        raise Exit(EXIT_INPUT, "error: --graph is required")
    g = graphs.build_graph(graph_spec)
    if chips is None:
        raise Exit(EXIT_INPUT, "error: give --chips or --chips-file")
    return Position(g, tuple(_ints(chips, "chip")))


def _position_doc(p: Position) -> dict:
    return {"graph": p.graph.spec, "chips": list(p.chips)}


def _plot_note(path):
    click.echo(f"wrote {path}", err=True)


format_option = click.option(
    "--format", "fmt", type=click.Choice(["json", "csv", "text"]), default="json", show_default=True
)
cap_option = click.option("--cap", type=int, default=None, help="Step cap (default $CHIPFIRE_STEP_CAP or 10^7).")
plot_option = click.option(
    "--plot-dir", type=click.Path(file_okay=False), default=None, help="Also render figures into this directory."
)
chips_options = [
    click.option("--graph", "graph_spec", default=None, help="Graph spec, e.g. complete_bipartite:2,3."),
    click.option("--chips", default=None, help="Comma list of chips in canonical vertex order."),
    click.option("--chips-file", type=click.Path(dir_okay=False), default=None, help="Position JSON document."),
]


def with_chips(fn):
    for opt in reversed(chips_options):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Simulate and analyse the parallel chip-firing game."""


@main.command()
@with_chips
@click.option("--steps", type=int, required=True)
@format_option
@plot_option
@_guard
def simulate(graph_spec, chips, chips_file, steps, fmt, plot_dir):
    """Print the chips and firing set at every step."""
    p = _position(graph_spec, chips, chips_file)
    if steps < 0:
        raise Exit(EXIT_INPUT, "error: --steps must be nonnegative")
    if steps > step_cap():
        raise StepCapExceeded(0, step_cap())
    tr = trace(p, steps)
    rows = []
    for t, state in enumerate(tr.states):
        fires = tr.firing_sets[t] if t < steps else firing_set(Position(p.graph, state))
        rows.append({"step": t, "chips": list(state), "firing": sorted(fires)})
    returned = [t for t in range(1, steps + 1) if tr.states[t] == p.chips]
    if fmt == "json":
        click.echo(_dump({"graph": p.graph.spec, "steps": steps, "trace": rows, "returns_at": returned}))
    elif fmt == "csv":
        flat = [
            {"step": r["step"], "chips": " ".join(map(str, r["chips"])), "firing": " ".join(map(str, r["firing"]))}
            for r in rows
        ]
        click.echo(_csv(flat, ["step", "chips", "firing"]))
    else:
        click.echo(f"# {p.graph.spec}")
        for r in rows:
            click.echo(f"{r['step']:>4}  {' '.join(map(str, r['chips']))}  fire={{{','.join(map(str, r['firing']))}}}")
    if plot_dir:
        from .plotting import plot_spacetime

        _plot_note(plot_spacetime(tr, Path(plot_dir) / "simulate.png", p.graph.spec))


@main.command()
@with_chips
@click.option("--method", type=click.Choice(["stored", "lowmem", "both"]), default="stored", show_default=True)
@cap_option
@format_option
@plot_option
@_guard
def period(graph_spec, chips, chips_file, method, cap, fmt, plot_dir):
    """Transient length, period and activity of a position."""
    p = _position(graph_spec, chips, chips_file)
    if method == "stored":
        res = detect_period(p, cap)
        doc = res.to_dict()
    elif method == "lowmem":
        res = detect_period_lowmem(p, cap)
        doc = res.to_dict()
    else:
        res = detect_period(p, cap)
        other = detect_period_lowmem(p, cap)
        if (res.transient, res.period, res.k) != (other.transient, other.period, other.k):
            click.echo(_dump({"stored-state": res.to_dict(), "constant-memory": other.to_dict()}))
            raise Exit(EXIT_VERIFY, "error: detection methods disagree")
        doc = res.to_dict()
        doc["method"] = "both"
    if fmt == "json":
        click.echo(_dump(doc))
    elif fmt == "csv":
        click.echo(_csv([doc], ["transient", "period", "fires_per_period", "activity", "method"]))
    else:
        click.echo(
            f"transient={doc['transient']} period={doc['period']} "
            f"fires_per_period={doc['fires_per_period']} activity={doc['activity']} ({doc['method']})"
        )
    if plot_dir:
        from .plotting import plot_spacetime

        tr = trace(p, res.transient + 2 * res.period)
        title = f"{p.graph.spec}: transient {res.transient}, period {res.period}"
        _plot_note(plot_spacetime(tr, Path(plot_dir) / "period.png", title))


@main.group()
def construct():
    """Build a position with a prescribed period."""


def _emit_construction(p: Position, check: bool, cap, extra: dict):
    doc = _position_doc(p)
    doc.update(extra)
    if check:
        res = detect_period(p, cap)
        doc["measured_period"] = res.period
        doc["measured_transient"] = res.transient
        doc["fires_per_period"] = res.k
    click.echo(_dump(doc))
    if check and "target_period" in extra and doc["measured_period"] != extra["target_period"]:
        raise Exit(EXIT_VERIFY, f"error: measured period {doc['measured_period']} != target {extra['target_period']}")


@construct.command("bipartite")
@click.option("--a", "a", type=int, required=True)
@click.option("--b", "b", type=int, required=True)
@click.option("--period", "target", type=int, required=True)
@click.option("--check", is_flag=True, help="Run the detector and embed the measured period.")
@cap_option
@_guard
def construct_bipartite(a, b, target, check, cap):
    """Position on K_{a,b} with period exactly PERIOD."""
    if a < 1 or b < 1:
        raise Exit(EXIT_INPUT, "error: side sizes must be >= 1")
    p = constructions.construct_bipartite_period(a, b, target)
    _emit_construction(p, check, cap, {"target_period": target})


@construct.command("cpartite")
@click.option("--parts", required=True, help="Part sizes, e.g. 6,5,5,4.")
@click.option("--j", "j", type=int, required=True)
@click.option("--k", "k", type=int, required=True)
@click.option("--check", is_flag=True, help="Run the detector and embed the measured period.")
@cap_option
@_guard
def construct_cpartite(parts, j, k, check, cap):
    """Complete multipartite position with period (c-j)*a_c - k + 1."""
    sizes = sorted(_ints(parts, "part"), reverse=True)
    if len(sizes) < 2 or min(sizes) < 1:
        raise Exit(EXIT_INPUT, "error: need at least two nonempty parts")
    c, ac = len(sizes), sizes[-1]
    if not (0 <= j <= c - 1 and 1 <= k <= ac):
        raise Exit(EXIT_TARGET, f"error: need 0 <= j <= {c - 1} and 1 <= k <= {ac}, got j={j} k={k}")
    target = (c - j) * ac - k + 1
    p = constructions.construct_cpartite_period(sizes, j, k)
    _emit_construction(p, check, cap, {"target_period": target})


def _report_exit(ok: bool):
    if not ok:
        raise Exit(EXIT_VERIFY)


@main.command("enumerate")
@click.option("--graph", "graph_spec", required=True)
@click.option("--mode", type=click.Choice(["exhaustive", "random"]), default="exhaustive", show_default=True)
@click.option("--bound", default=None, help="Per-vertex chip cap: one integer or a comma list.")
@click.option("--samples", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--budget", type=int, default=verify.DEFAULT_BUDGET, show_default=True)
@click.option("--unconfined", is_flag=True, help="Widen the default box to 0..4deg(v).")
@click.option("--timing", is_flag=True, help="Include wall time in JSON output.")
@cap_option
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]), default="csv", show_default=True)
@plot_option
@_guard
def enumerate_cmd(graph_spec, mode, bound, samples, seed, jobs, budget, unconfined, timing, cap, fmt, plot_dir):
    """Period distribution over start positions inside a chip box."""
    g = graphs.build_graph(graph_spec)
    box = None
    if bound is not None:
        vals = _ints(bound, "bound")
        box = vals * g.vertex_count if len(vals) == 1 else vals
    rep = verify.enumerate_periods(
        g, mode, bound=box, samples=samples, seed=seed, budget=budget, jobs=jobs, unconfined=unconfined, cap=cap
    )
    _emit_period_reports([rep], fmt, timing)
    if plot_dir:
        from .plotting import plot_period_histogram

        _plot_note(plot_period_histogram(rep.periods, Path(plot_dir) / "enumerate.png", rep.graph, rep.expected))
    if rep.cap_exceeded:
        raise Exit(EXIT_CAP, f"error: step cap exceeded on {len(rep.cap_exceeded)} starts")
    _report_exit(rep.ok)


def _emit_period_reports(reps, fmt, timing=False):
    if fmt == "json":
        docs = [r.to_dict(timing) for r in reps]
        click.echo(_dump(docs[0] if len(docs) == 1 else docs))
    elif fmt == "csv":
        rows = [row for r in reps for row in r.csv_rows()]
        click.echo(_csv(rows, ["graph", "mode", "bound", "period", "count"]))
    else:
        for r in reps:
            head = f"# {r.graph} mode={r.mode}"
            if r.mode == "random":
                head += f" seed={r.seed} samples={r.samples}"
            click.echo(head)
            click.echo(f"periods: {', '.join(f'{p}x{n}' for p, n in sorted(r.periods.items()))}")
            exp = "-" if r.expected is None else "{" + ",".join(map(str, sorted(r.expected))) + "}"
            click.echo(f"expected: {exp}  verdict: {r.verdict}  starts: {r.starts}")


@main.group("verify")
def verify_group():
    """Run verification sweeps; exit 5 on any failure."""


@verify_group.command("bipartite-theorem")
@click.option("--max-a", type=int, default=3, show_default=True)
@click.option("--max-b", type=int, default=3, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--budget", type=int, default=verify.DEFAULT_BUDGET, show_default=True)
@click.option("--timing", is_flag=True)
@cap_option
@format_option
@plot_option
@_guard
def verify_theorem(max_a, max_b, jobs, budget, timing, cap, fmt, plot_dir):
    """Exhaustive period sets of K_{a,b} for 1 <= a <= b, a <= MAX_A, b <= MAX_B."""
    if max_a < 1 or max_b < 1:
        raise Exit(EXIT_INPUT, "error: sizes must be >= 1")
    reps = []
    for a in range(1, max_a + 1):
        for b in range(a, max_b + 1):
            reps.append(verify.verify_bipartite_theorem(a, b, budget=budget, jobs=jobs, cap=cap))
    if fmt == "json":
        click.echo(_dump({"reports": [r.to_dict(timing) for r in reps], "all_match": all(r.ok for r in reps)}))
    else:
        _emit_period_reports(reps, fmt)
    if plot_dir:
        from .plotting import plot_period_histogram

        for r in reps:
            name = r.graph.replace(":", "_").replace(",", "_") + ".png"
            _plot_note(plot_period_histogram(r.periods, Path(plot_dir) / name, r.graph, r.expected))
    _report_exit(all(r.ok for r in reps))


@verify_group.command("class")
@click.option(
    "--class", "cls", type=click.Choice(["trees", "complete", "abundant", "complement", "confinement"]), required=True
)
@click.option("--samples", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-n", type=int, default=None, help="Largest vertex count for trees / complete graphs.")
@click.option("--unconfined", is_flag=True)
@cap_option
@format_option
@plot_option
@_guard
def verify_class(cls, samples, seed, max_n, unconfined, cap, fmt, plot_dir):
    """Check a known structural fact over random instances."""
    rep = verify.verify_class_properties(cls, samples=samples, seed=seed, max_n=max_n, unconfined=unconfined, cap=cap)
    doc = rep.to_dict()
    if fmt == "json":
        click.echo(_dump(doc))
    elif fmt == "csv":
        rows = [{"class": cls, "seed": seed, "period": p, "count": n} for p, n in sorted(rep.periods.items())]
        click.echo(_csv(rows, ["class", "seed", "period", "count"]))
    else:
        click.echo(f"# class={cls} seed={seed} samples={samples}")
        click.echo(f"checked: {rep.checked}  violations: {len(rep.violations)}")
    if plot_dir:
        from .plotting import plot_period_histogram

        _plot_note(plot_period_histogram(rep.periods, Path(plot_dir) / f"class_{cls}.png", cls))
    _report_exit(rep.ok)


@verify_group.command("lemmas")
@click.option("--a", "a", type=int, required=True)
@click.option("--b", "b", type=int, required=True)
@click.option("--mode", type=click.Choice(["exhaustive", "random"]), default="exhaustive", show_default=True)
@click.option("--samples", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--horizon", type=int, default=20, show_default=True)
@click.option("--budget", type=int, default=verify.DEFAULT_BUDGET, show_default=True)
@cap_option
@format_option
@plot_option
@_guard
def verify_lemmas(a, b, mode, samples, seed, horizon, budget, cap, fmt, plot_dir):
    """Fire-count lemma suite over confined positions of K_{a,b}."""
    reps = verify.verify_bipartite_lemmas(
        a, b, mode=mode, samples=samples, seed=seed, horizon=horizon, budget=budget, cap=cap
    )
    rows = [r.to_dict() for r in reps]
    if fmt == "json":
        head = {"graph": f"complete_bipartite:{a},{b}", "mode": mode, "horizon": horizon}
        if mode == "random":
            head.update(seed=seed, samples=samples)
        click.echo(_dump({**head, "checks": rows}))
    elif fmt == "csv":
        click.echo(_csv(rows, ["check", "hypothesis_count", "violation_count"]))
    else:
        if mode == "random":
            click.echo(f"# seed={seed} samples={samples}")
        for r in reps:
            click.echo(r.summary())
    if plot_dir:
        from .plotting import plot_check_counts

        _plot_note(plot_check_counts(rows, Path(plot_dir) / f"lemmas_{a}_{b}.png", f"K_{{{a},{b}}}"))
    _report_exit(all(r.ok for r in reps))


if __name__ == "__main__":
    main()
