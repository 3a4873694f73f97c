import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multisecretary.core_math import myopic_regret, myopic_regret_min, offline_value
from multisecretary.dp import (DpTables, solve_myopic, solve_optimal, solve_value_direct,
                               tables_from_csv, tables_to_csv)

from .oracles import exact_bellman, exact_offline


def test_small_optimal_values():
    tab = solve_optimal(3)
    assert tab.regret(2, 1) == pytest.approx(1 / 24, abs=1e-15)
    assert tab.hire_prob(2, 1) == pytest.approx(1 / 2, abs=1e-15)
    assert tab.regret(3, 1) == pytest.approx(7 / 128, abs=1e-15)
    assert tab.hire_prob(3, 1) == pytest.approx(3 / 8, abs=1e-15)


def test_small_myopic_values():
    tab = solve_myopic(3)
    assert tab.regret(3, 1) == pytest.approx(1 / 18, abs=1e-15)
    assert tab.regret(2, 1) == pytest.approx(1 / 24, abs=1e-15)
    for n in range(1, 4):
        np.testing.assert_allclose(tab.p_row(n)[1:n], np.arange(1, n) / n)


def test_small_direct_values():
    tab = solve_value_direct(3)
    assert tab.v_row(2)[1] == pytest.approx(5 / 8, abs=1e-15)
    assert tab.v_row(3)[1] == pytest.approx(89 / 128, abs=1e-15)
    for n in range(1, 4):
        assert tab.v_row(n)[n] == n / 2


def test_matches_exact_rational_bellman():
    n_max = 12
    v, p = exact_bellman(n_max)
    opt = solve_optimal(n_max)
    direct = solve_value_direct(n_max)
    for t in range(n_max + 1):
        for w in range(t + 1):
            r_exact = float(exact_offline(t, w) - v[t, w])
            assert opt.regret(t, w) == pytest.approx(r_exact, abs=1e-14)
            assert opt.hire_prob(t, w) == pytest.approx(float(p[t, w]), abs=1e-14)
            assert direct.v_row(t)[w] == pytest.approx(float(v[t, w]), abs=1e-13)


def test_boundaries(opt512, myo512):
    for tab in (opt512, myo512):
        for t in (1, 2, 17, 512):
            assert tab.regret(t, 0) == 0.0 and tab.regret(t, t) == 0.0
            assert tab.hire_prob(t, 0) == 0.0 and tab.hire_prob(t, t) == 1.0


def test_table_invariants(opt512, myo512):
    for tab in (opt512, myo512):
        assert tab.r.min() >= 0.0
        assert tab.p.min() >= 0.0 and tab.p.max() <= 1.0


def test_value_plus_regret_is_offline(direct512):
    for t in range(0, 513, 7):
        total = direct512.v_row(t) + direct512.r_row(t)
        np.testing.assert_allclose(total, offline_value(t, np.arange(t + 1)), atol=1e-9)


def test_cross_formulation_agreement(opt512, direct512):
    for t in range(513):
        r_direct = offline_value(t, np.arange(t + 1)) - direct512.v_row(t)
        assert np.abs(r_direct - opt512.r_row(t)).max() <= 1e-9
        assert np.abs(direct512.p_row(t) - opt512.p_row(t)).max() <= 1e-9


def test_optimal_no_worse_than_myopic(opt512, myo512):
    assert np.all(opt512.r <= myo512.r + 1e-15)


def test_choice_probability_symmetry(opt512):
    for t in range(1, 513):
        p = opt512.p_row(t)
        assert np.abs(p + p[::-1] - 1.0).max() <= 1e-9


def test_hire_probability_nondecreasing_in_w(opt512):
    for t in range(1, 513):
        assert np.all(np.diff(opt512.p_row(t)) >= -1e-12)


def test_regret_at_least_myopic_floor(opt512):
    for t in range(2, 513):
        w = np.arange(1, t)
        assert np.all(opt512.r_row(t)[1:t] >= myopic_regret_min(t, w) - 1e-15)


def test_regret_recursion_holds(opt512):
    for t in range(2, 513, 11):
        p, prev = opt512.p_row(t)[1:t], opt512.r_row(t - 1)
        w = np.arange(1, t)
        rhs = myopic_regret(t, w, p) + p * prev[:-1] + (1 - p) * prev[1:]
        np.testing.assert_allclose(opt512.r_row(t)[1:t], rhs, atol=1e-14)


def test_streaming_rows_match_full(opt512):
    keep = (16, 64, 512)
    small = solve_optimal(512, keep=keep)
    assert not small.full and small.r.size == sum(t + 1 for t in keep)
    for t in keep:
        np.testing.assert_array_equal(small.r_row(t), opt512.r_row(t))
        np.testing.assert_array_equal(small.p_row(t), opt512.p_row(t))
    with pytest.raises(KeyError):
        small.r_row(100)


def test_large_horizon_streams_by_default(monkeypatch):
    import multisecretary.dp as dp
    monkeypatch.setattr(dp, "FULL_TABLE_LIMIT", 64)
    tab = dp.solve_optimal(100)
    assert tab.rows == (100,)
    assert tab.regret(100, 50) == pytest.approx(solve_optimal(100).regret(100, 50), abs=0)


@pytest.mark.parametrize("solver", [solve_optimal, solve_myopic, solve_value_direct])
def test_rejects_bad_horizon(solver):
    for bad in (0, -3, 2.5):
        with pytest.raises(ValueError):
            solver(bad)


def test_tables_are_read_only(opt512):
    with pytest.raises(ValueError):
        opt512.r[3] = 1.0


def test_csv_round_trip():
    for tab in (solve_optimal(20), solve_myopic(9), solve_value_direct(7),
                solve_optimal(30, keep=(5, 30))):
        text = tables_to_csv(tab)
        back = tables_from_csv(text, tab.policy_kind)
        assert back.n_max == tab.n_max and back.rows == tab.rows
        np.testing.assert_array_equal(back.r, tab.r)
        np.testing.assert_array_equal(back.p, tab.p)
        if tab.v is not None:
            np.testing.assert_array_equal(back.v, tab.v)


def test_csv_layout():
    text = tables_to_csv(solve_optimal(2))
    lines = text.strip().splitlines()
    assert lines[0] == "t,w,p,r"
    assert [tuple(map(int, ln.split(",")[:2])) for ln in lines[1:]] == [
        (0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2)]
    buf = io.StringIO()
    tables_to_csv(solve_optimal(2), buf)
    assert buf.getvalue() == text


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 300))
def test_regret_positive_inside(n):
    tab = solve_optimal(n, keep=(n,))
    assert np.all(tab.r_row(n)[1:n] > 0)
    assert isinstance(tab, DpTables)
