import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from chipfire import constructions, graphs
from chipfire.bipartite import (
    NotCompleteBipartiteError,
    PreconditionError,
    check_balance,
    check_divisibility_lemmas,
    check_lemma_diff1,
    check_period_dichotomy,
    check_period_sufficiency,
    check_window_parity,
    is_side_confined,
    run_lemma_suite,
    side_accounts,
    sides,
)
from chipfire.engine import Position, is_confined, step, trace, zeros
from chipfire.period import detect_period


def pos(spec, chips):
    return Position(graphs.build_graph(spec), chips)


def first_window(side, horizon):
    return next(t for t in range(1, horizon) if side.alpha(t) and side.alpha(t) % side.size == 0)


def test_sides_smaller_first():
    assert sides(graphs.complete_bipartite(3, 2)) == ((3, 4), (0, 1, 2))
    assert sides(graphs.complete_bipartite(2, 2)) == ((0, 1), (2, 3))
    with pytest.raises(NotCompleteBipartiteError):
        sides(graphs.complete(4))


def test_side_account_examples():
    L, R = side_accounts(trace(pos("complete_bipartite:2,2", (1, 2, 1, 2)), 4))
    assert L.firing_counts[0] == R.firing_counts[0] == 1
    L, R = side_accounts(trace(zeros(graphs.complete_bipartite(2, 3)), 4))
    assert set(L.firing_counts) == set(R.firing_counts) == {0}
    L, R = side_accounts(trace(pos("complete_bipartite:2,2", (2, 2, 2, 2)), 4))
    assert set(L.firing_counts) == set(R.firing_counts) == {2}


def test_account_identities():
    tr = trace(constructions.sigma_k(3, 4, 3), 12)
    for side in side_accounts(tr):
        for m in range(6):
            for t in range(6):
                assert side.alpha(t, m) == sum(side.d(v, t, m) for v in side.vertices) >= 0


def test_diff1_examples():
    assert check_lemma_diff1(constructions.sigma_k(3, 4, 3), 50).ok
    rep = check_lemma_diff1(pos("complete_bipartite:1,3", (2, 1, 1, 1)), 10)
    assert rep.ok


def test_divisibility_sigma_orbits():
    for a in range(1, 5):
        for b in range(a, 5):
            for k in range(1, a + 1):
                for p in (constructions.sigma_k(a, b, k), constructions.sigma_2k(a, b, k)):
                    assert all(r.ok for r in check_divisibility_lemmas(p, 4 * k + 4))


def test_horizon_zero_vacuous():
    p = pos("complete_bipartite:2,2", (1, 2, 1, 2))
    reps = check_divisibility_lemmas(p, 0)
    assert all(r.ok and r.hypothesis_count == 0 for r in reps)


def test_sigma_2k_window_on_k33():
    p = constructions.sigma_2k(3, 3, 2)
    tr = trace(p, 12)
    L, R = side_accounts(tr)
    assert detect_period(p).period == 4
    assert first_window(L, 12) == 4
    # the R window closes at 3, and 4 is neither 3 nor 6; the start is not
    # confined in the strict sense, so the dichotomy does not apply to it
    assert first_window(R, 12) == 3
    assert not is_confined(p)
    dich, bounds = check_period_dichotomy(p)
    assert dich.ok and bounds.ok


def test_dichotomy_counterexample_without_strict_confinement():
    p = pos("complete_bipartite:2,2", (2, 3, 1, 2))
    r = detect_period(p)
    assert r.period == 4
    L, _ = side_accounts(trace(p, 10))
    assert first_window(L, 10) == 1
    assert check_period_dichotomy(p)[0].ok


def test_all_zero_bounds():
    dich, bounds = check_period_dichotomy(zeros(graphs.complete_bipartite(2, 3)))
    assert bounds.ok and dich.ok


def test_exhaustive_k22_dichotomy_and_bounds():
    g = graphs.complete_bipartite(2, 2)
    met = 0
    for chips in itertools.product(range(4), repeat=4):
        dich, bounds = check_period_dichotomy(Position(g, chips))
        assert dich.ok and bounds.ok
        met += dich.hypothesis_count
    assert met > 0


def test_precondition():
    p = pos("complete_bipartite:2,2", (0, 3, 0, 0))
    assert not is_side_confined(p)
    with pytest.raises(PreconditionError):
        check_lemma_diff1(p, 5)


def test_report_summary():
    rep = check_window_parity(constructions.sigma_2k(3, 4, 2), 20)
    assert rep.summary().startswith("window-parity: hypothesis met ")
    assert rep.to_dict()["violation_count"] == 0


def test_random_k33_suite():
    g = graphs.complete_bipartite(3, 3)
    rng = random.Random(3)
    for _ in range(100):
        p = step(Position(g, [rng.randint(0, 5) for _ in range(6)]))
        assert all(r.ok for r in run_lemma_suite(p, 30))


@settings(max_examples=100)
@given(st.sampled_from([(2, 3), (3, 3), (2, 4)]), st.data())
def test_balance_and_sufficiency(ab, data):
    g = graphs.complete_bipartite(*ab)
    chips = [data.draw(st.integers(0, 2 * d - 1)) for d in g.degrees]
    p = step(Position(g, chips))
    assert check_balance(p, 20).ok
    assert check_period_sufficiency(p, 20).ok
    assert check_window_parity(p, 20).ok
