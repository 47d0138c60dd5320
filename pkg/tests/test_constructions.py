import itertools

import pytest
from hypothesis import given, settings, strategies as st

from chipfire import constructions as C, graphs
from chipfire.engine import trace
from chipfire.period import detect_period


def sides_of(p, a):
    return p.chips[:a], p.chips[a:]


def test_sigma3_on_k57():
    p = C.construct_bipartite_period(5, 7, 3)
    assert sides_of(p, 5) == ((1, 2, 7, 7, 7), (1, 2, 5, 5, 5, 5, 5))


def test_sigma_2k_on_k22():
    p = C.construct_bipartite_period(2, 2, 4)
    assert sides_of(p, 2) == ((0, 1), (1, 2))
    assert detect_period(p).period == 4


def test_invalid_target_lists_set():
    with pytest.raises(C.InvalidTargetError, match=r"\{1,2,3,4,6\}"):
        C.construct_bipartite_period(3, 3, 7)


def test_swapped_sides():
    p = C.construct_bipartite_period(7, 5, 3)
    assert sides_of(p, 7) == ((1, 2, 5, 5, 5, 5, 5), (1, 2, 7, 7, 7))
    assert detect_period(p).period == 3


def test_bipartite_sweep():
    for a in range(1, 9):
        for b in range(1, 9):
            for p in C.admissible_periods(a, b):
                r = detect_period(C.construct_bipartite_period(a, b, p))
                assert r.period == p, (a, b, p)


@pytest.mark.parametrize("a,b,k", [(3, 4, 3), (5, 7, 3), (4, 4, 4), (2, 5, 2)])
def test_sigma_k_threshold_walk(a, b, k):
    # at step t the only threshold vertices are the (k-t)-th of each side
    tr = trace(C.sigma_k(a, b, k), k)
    for t in range(1, k):
        s = tr.states[t]
        assert [i + 1 for i in range(a) if s[i] == b] == [k - t]
        assert [i + 1 for i in range(b) if s[a + i] == a] == [k - t]


def test_k6554_from_schedule():
    s = C.cpartite_schedule((6, 5, 5, 4), 1, 2)
    assert s.length == 11 and s.problems() == []
    p = C.position_from_schedule(s)
    assert p.chips == (0, 3, 6, 7, 7, 7, 1, 4, 7, 10, 10, 3, 6, 15, 15, 15, 3, 6, 16, 16)
    assert detect_period(p).period == 11


def test_degenerate_all_fire():
    s = C.cpartite_schedule((2, 2), 1, 2)
    assert s.length == 1 and s.firing_sets[0] == frozenset(range(4))
    assert detect_period(C.position_from_schedule(s)).period == 1


def test_k222_j0_k1():
    s = C.cpartite_schedule((2, 2, 2), 0, 1)
    assert s.length == 6 and s.problems() == []
    assert detect_period(C.position_from_schedule(s)).period == 6
    assert detect_period(C.construct_cpartite_period((2, 2, 2), 2, 2)).period == 1


def test_hand_schedules():
    g = graphs.path(2)
    p = C.position_from_schedule(C.Schedule(g, (frozenset({0, 1}),)))
    assert p.chips == (1, 1) and detect_period(p).period == 1
    g = graphs.complete_bipartite(2, 2)
    p = C.position_from_schedule(C.Schedule(g, (frozenset({1, 3}), frozenset({0, 2}))))
    assert p.chips == (1, 2, 1, 2) and detect_period(p).period == 2


def test_infeasible_schedule_report():
    g = graphs.complete_bipartite(2, 2)
    with pytest.raises(C.InfeasibleScheduleError) as e:
        C.position_from_schedule(C.Schedule(g, (frozenset({1}), frozenset({0}), frozenset({2, 3}))))
    assert "step" in e.value.report
    with pytest.raises(C.InfeasibleScheduleError):
        C.position_from_schedule(C.Schedule(g, (frozenset({0, 1, 2}),)))


def test_k322_full_sweep():
    for j in range(3):
        for k in range(1, 3):
            r = detect_period(C.construct_cpartite_period((3, 2, 2), j, k))
            assert r.period == (3 - j) * 2 - k + 1
            assert set(r.fires_per_period) == {1}


def _parts(c, lo, hi):
    return [p for p in itertools.combinations_with_replacement(range(hi, lo - 1, -1), c)]


def test_cpartite_sweep_three_or_more_parts():
    for c in (3, 4):
        for parts in _parts(c, 1, 5 if c == 3 else 4):
            for j in range(c):
                for k in range(1, parts[-1] + 1):
                    p = C.construct_cpartite_period(parts, j, k)
                    r = detect_period(p)
                    assert r.period == (c - j) * parts[-1] - k + 1, (parts, j, k)
                    assert set(r.fires_per_period) == {1}


def test_two_parts_even_periods_and_small_odd():
    for parts in _parts(2, 1, 6):
        ac = parts[-1]
        for j in range(2):
            for k in range(1, ac + 1):
                target = (2 - j) * ac - k + 1
                if target % 2 and target > ac:
                    continue
                assert detect_period(C.construct_cpartite_period(parts, j, k)).period == target


def test_two_parts_odd_long_periods_impossible():
    # such targets fall outside the admissible bipartite set, so the schedule must be rejected
    parts = (3, 2)
    assert 3 not in C.admissible_periods(*parts)
    with pytest.raises(C.InfeasibleScheduleError):
        C.construct_cpartite_period(parts, 0, 2)


def test_schedule_argument_checks():
    with pytest.raises(ValueError):
        C.cpartite_schedule((2, 3), 0, 1)
    with pytest.raises(ValueError):
        C.cpartite_schedule((3, 2), 2, 1)
    with pytest.raises(ValueError):
        C.cpartite_schedule((3, 2), 0, 3)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(2, 5), min_size=3, max_size=4), st.data())
def test_schedule_round_trip(sizes, data):
    parts = tuple(sorted(sizes, reverse=True))
    j = data.draw(st.integers(0, len(parts) - 1))
    k = data.draw(st.integers(1, parts[-1]))
    s = C.cpartite_schedule(parts, j, k)
    p = C.position_from_schedule(s)
    tr = trace(p, s.length)
    assert tr.firing_sets == s.firing_sets
    assert tr.states[-1] == p.chips
