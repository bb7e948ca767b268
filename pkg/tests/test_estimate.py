import math

import pytest

from madim.carpet import closed_form_dims, spectrum_closed_form
from madim.errors import CapExceeded, DegenerateGrid, EmptyTable, ScaleOrder, ThetaOutOfRange
from madim.estimate import (
    bilipschitz_check,
    check_bounds,
    estimate_madim,
    estimate_spectrum,
    fit_dimension,
    madim_grid,
    order_exchange_check,
    pair_grid,
    stilde_estimate,
    subadditivity_check,
    theta_grid,
    uniform_scale_grid,
    wandering_demo,
    wandering_verdicts,
)

LOG2, LOG3 = math.log(2), math.log(3)


# ----------------------------------------------------------------------- fits

def test_fit_exact_line():
    pts = [(x, 2.0 * x + 0.3) for x in (0.5, 1.0, 2.0, 3.5)]
    rep = fit_dimension(pts)
    assert rep.slope == pytest.approx(2.0, abs=1e-12)
    assert rep.intercept == pytest.approx(0.3, abs=1e-12)
    assert rep.residual == pytest.approx(0.0, abs=1e-12)


def test_fit_degenerate():
    with pytest.raises(DegenerateGrid):
        fit_dimension([(1.0, 2.0), (1.0, 3.0)])
    with pytest.raises(DegenerateGrid):
        fit_dimension([(1.0, 2.0)])


def test_fit_reports_residual():
    rep = fit_dimension([(0.0, 0.0), (1.0, 1.0), (2.0, 2.5)])
    assert rep.residual > 0


# ----------------------------------------------------------------------- grids

def test_grid_validation():
    with pytest.raises(ScaleOrder):
        pair_grid([(0.5, 0.6)])
    with pytest.raises(ScaleOrder):
        pair_grid([(1.5, 0.5)])
    with pytest.raises(ThetaOutOfRange):
        theta_grid(1.2, [0.5])


def test_default_grids_are_valid(four_pair_carpet):
    for grid in (madim_grid(four_pair_carpet), uniform_scale_grid(four_pair_carpet)):
        assert all(0 < rho < r <= 1 for r, rho in grid.pairs)
        assert len(grid.pairs) == 19  # k = 2..20


# ------------------------------------------------------------------ estimators

def test_stilde_power_structure(full_carpet):
    # for the full product the per-pair values reconstruct exact integer
    # logs: S * N = log(count) bit-for-bit
    from madim.carpet import sup_cover_count

    est = stilde_estimate(full_carpet, 1 / 9, 1 / 81, (1, 2, 4))
    for n, value in est.per_n:
        cc, _ = sup_cover_count(full_carpet, n, 1 / 9, 1 / 81)
        assert value * n == pytest.approx(math.log(cc.count), abs=1e-12)


def test_estimate_madim_four_pair(four_pair_carpet):
    rep = estimate_madim(four_pair_carpet)
    assert rep.closed_form == pytest.approx(2.0, abs=1e-9)
    assert abs(rep.slope - 2.0) < 0.05
    assert rep.abs_error < 0.05


def test_estimate_madim_full_product(full_carpet):
    rep = estimate_madim(full_carpet)
    assert abs(rep.slope - 2.0) < 0.05


def test_estimate_madim_single_pair(single_carpet):
    rep = estimate_madim(single_carpet)
    assert rep.slope == pytest.approx(0.0, abs=1e-9)


def test_uniform_grid_recovers_mmdim(four_pair_carpet):
    # fixed coarse scale sweeps the global box-counting regime
    dims = closed_form_dims(four_pair_carpet)
    uniform = estimate_madim(four_pair_carpet, uniform_scale_grid(four_pair_carpet))
    assert abs(uniform.slope - dims.mmdim) < 0.05
    madim = estimate_madim(four_pair_carpet, madim_grid(four_pair_carpet))
    assert madim.slope > uniform.slope + 0.25  # strictly above the mmdim fit


def test_estimate_spectrum(four_pair_carpet):
    curve = estimate_spectrum(four_pair_carpet, (0.5, 0.8))
    assert curve.transition_theta == pytest.approx(LOG2 / LOG3, abs=1e-12)
    for point in curve.points:
        assert abs(point.estimated - point.closed_form) < 0.05


# --------------------------------------------------------------------- bounds

def closed_spectrum_samples(system, thetas):
    dims = closed_form_dims(system)
    return dims, [(t, spectrum_closed_form(system, t, dims)) for t in thetas]


def test_check_bounds_closed_forms_pass(four_pair_carpet, full_carpet):
    thetas = [k / 100 for k in range(1, 100)]
    for system in (four_pair_carpet, full_carpet):
        dims, samples = closed_spectrum_samples(system, thetas)
        verdicts = check_bounds(dims.mmdim, samples, dims.madim, slack=0.0)
        assert verdicts and all(v.passed for v in verdicts)


def test_check_bounds_estimates_pass(four_pair_carpet):
    dims = closed_form_dims(four_pair_carpet)
    curve = estimate_spectrum(four_pair_carpet, (0.3, 0.5, 0.8))
    samples = [(p.theta, p.estimated) for p in curve.points]
    verdicts = check_bounds(dims.mmdim, samples, dims.madim, slack=0.1)
    assert all(v.passed for v in verdicts)


def test_check_bounds_flags_corruption(four_pair_carpet):
    dims, samples = closed_spectrum_samples(four_pair_carpet, [0.3, 0.5, 0.8])
    corrupted = [(t, v) for t, v in samples[:-1]] + [(0.8, 3.0)]  # 3 > madim 2
    verdicts = check_bounds(dims.mmdim, corrupted, dims.madim, slack=0.0)
    failed = [v for v in verdicts if not v.passed]
    assert any(v.check == "spectrum_upper" and "0.8" in v.instance for v in failed)


# -------------------------------------------------------------- subadditivity

def test_subadditivity_fixtures(four_pair_carpet, golden_carpet, full_carpet):
    scales = ((1 / 3, 1 / 27), (0.5, 1 / 32))
    for system in (four_pair_carpet, golden_carpet, full_carpet):
        verdicts = subadditivity_check(system, ((1, 1), (1, 2), (2, 3)), scales)
        assert verdicts and all(v.passed for v in verdicts)


def test_subadditivity_equality_for_full_product(full_carpet):
    # exact power structure: equality, so lhs == rhs in log terms
    verdicts = subadditivity_check(full_carpet, ((2, 3),), ((1 / 3, 1 / 27),))
    v = verdicts[0]
    assert v.passed and v.lhs == pytest.approx(v.rhs, abs=1e-9)


# ------------------------------------------------------------- order exchange

def test_order_exchange_constant_table():
    table = {(x, m): 1.5 for x in "ab" for m in (1, 2, 3)}
    v = order_exchange_check(table)
    assert v.passed and v.lhs == v.rhs == 1.5


def test_order_exchange_separable_table():
    f = {"a": 0.0, "b": 1.0, "c": 2.0}
    g = {1: 0.0, 2: 0.5}
    table = {(x, m): f[x] + g[m] for x in f for m in g}
    v = order_exchange_check(table)
    # max-min = max f + min g, min-max = min g + max f: equality for
    # separable tables, with the inequality direction guaranteed
    assert v.passed
    assert v.lhs <= v.rhs


def test_order_exchange_generic_gap():
    table = {("a", 1): 0.0, ("a", 2): 1.0, ("b", 1): 1.0, ("b", 2): 0.0}
    v = order_exchange_check(table)
    assert v.passed and v.lhs == 0.0 and v.rhs == 1.0


def test_order_exchange_carpet_tables(four_pair_carpet, golden_carpet):
    from madim.carpet import cover_count_formula, scale_indices
    from madim.symbolic import enumerate_words

    for system in (four_pair_carpet, golden_carpet):
        r, rho = 1 / 3, 1 / 9
        need = scale_indices(r, system.a, system.b).l2
        table = {}
        words_by_depth = {m: enumerate_words(system.omega, m).words for m in range(1, 7)}
        n_centers = min(4, min(len(w) for w in words_by_depth.values()))
        for m, words in words_by_depth.items():
            for i in range(n_centers):
                cc = cover_count_formula(system, m, (words[i],) * need, r, rho)
                table[(i, m)] = cc.log_count / m
        assert order_exchange_check(table).passed


def test_order_exchange_empty():
    with pytest.raises(EmptyTable):
        order_exchange_check({})


# ----------------------------------------------------------------- bilipschitz

def test_bilipschitz_identity(four_pair_carpet):
    v = bilipschitz_check(four_pair_carpet, c=1.0)
    assert v.passed and v.lhs == v.rhs


def test_bilipschitz_power_of_a(four_pair_carpet, full_carpet):
    for system in (four_pair_carpet, full_carpet):
        v = bilipschitz_check(system, c=1.0 / system.a)
        assert v.passed
        assert abs(v.lhs - v.rhs) <= 1e-9


def test_bilipschitz_generic_factor(four_pair_carpet):
    v = bilipschitz_check(four_pair_carpet, c=0.7)
    assert v.passed
    assert abs(v.lhs - v.rhs) <= 0.05


# ------------------------------------------------------------------- wandering

def test_wandering_empty_system_is_zero():
    rows = wandering_demo(0, (4, 8, 16), 16, 0.5, 1 / 32)
    assert all(row.bound == 0.0 for row in rows)


def test_wandering_decay_and_envelope():
    rows = wandering_demo(8, (16, 32, 64, 128), 16, 0.5, 1 / 32)
    bounds = [row.bound for row in rows]
    assert bounds == sorted(bounds, reverse=True)
    verdicts = wandering_verdicts(rows, 8, 16)
    assert verdicts and all(v.passed for v in verdicts)
    # doubling inequality in explicit form
    by_depth = {row.depth: row.bound for row in rows}
    for m in (16, 32, 64):
        envelope = math.log(2 * m * 8 * 33) / (2 * m)
        assert by_depth[2 * m] <= by_depth[m] / 2 + envelope


def test_wandering_caps():
    with pytest.raises(CapExceeded):
        wandering_demo(100, (16,), 16, 0.5, 1 / 32)
    with pytest.raises(CapExceeded):
        wandering_demo(8, (16,), 60, 0.5, 1 / 32)
    with pytest.raises(CapExceeded):
        # window too narrow: truncation slack swallows rho
        wandering_demo(8, (16,), 2, 0.5, 1 / 32)
    with pytest.raises(ScaleOrder):
        wandering_demo(8, (16,), 16, 1 / 32, 0.5)


def test_spectrum_thetas_must_increase(four_pair_carpet):
    with pytest.raises(ThetaOutOfRange):
        estimate_spectrum(four_pair_carpet, (0.5, 0.3))


def test_slopes_within_dimension_window(four_pair_carpet):
    dims = closed_form_dims(four_pair_carpet)
    for grid in (madim_grid(four_pair_carpet), uniform_scale_grid(four_pair_carpet)):
        slope = estimate_madim(four_pair_carpet, grid).slope
        assert 0.0 <= slope <= 2.0
        assert dims.mmdim - 0.1 <= slope <= dims.madim + 0.1
