"""Acceptance suite: one test per criterion, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -v -s` to see the PASS lines.
"""

import json
import math
import random
import time

import pytest

from conftest import CARPET_FIXTURES, four_pair_sft, full_product_sft
from madim import CarpetSystem
from madim.carpet import (
    closed_form_dims,
    cover_count_formula,
    cover_count_oracle,
    oracle_sweep,
    scale_indices,
    spectrum_closed_form,
    transition_theta,
)
from madim.cli import main
from madim.estimate import (
    bilipschitz_check,
    check_bounds,
    estimate_madim,
    estimate_spectrum,
    fit_dimension,
    madim_grid,
    order_exchange_check,
    subadditivity_check,
    uniform_scale_grid,
    wandering_demo,
)
from madim.fullshift import (
    f_lambda_alphabet,
    interval_cover_count,
    interval_pack_count,
    make_alphabet,
    sinfty_curve,
)
from madim.symbolic import enumerate_words, fiber_blocks

LOG2, LOG3 = math.log(2), math.log(3)


def report_line(number, text):
    print(f"ACCEPTANCE {number:>2} PASS: {text}")


def carpet_systems():
    return {name: CarpetSystem(3, 2, fn()) for name, fn in CARPET_FIXTURES.items()}


def test_criterion_01_oracle_equivalence():
    """Formula equals brute force on every fixture, N <= 3, indices <= 4."""
    start = time.time()
    total = 0
    for name, system in carpet_systems().items():
        records = oracle_sweep(system, n_max=3, l_max=4)
        assert records, f"{name}: sweep produced no instances"
        mismatches = [r for r in records if not r["match"]]
        assert not mismatches, f"{name}: {mismatches[:3]}"
        total += len(records)

    # center choices outside the counted middle blocks must not matter:
    # vary the x-parts and the padding blocks on sampled instances
    system = CarpetSystem(3, 2, four_pair_sft())
    r, rho = 1 / 3, 1 / 27  # indices (1,2) -> (3,5): case 1
    words = enumerate_words(system.omega, 2).words
    reference = None
    for pad in (words[0], words[-1]):
        for middle in fiber_blocks(system.omega, (0, 0))[:3]:
            center = (pad, middle)
            got = (
                cover_count_formula(system, 2, center, r, rho).count,
                cover_count_oracle(system, 2, center, r, rho).count,
            )
            assert got[0] == got[1]
            if reference is None:
                reference = got[0]
            assert got[0] == reference

    elapsed = time.time() - start
    assert elapsed < 60, f"sweep took {elapsed:.1f}s"
    report_line(1, f"{total} formula-vs-oracle instances, zero mismatches, {elapsed:.1f}s")


def test_criterion_02_full_pair_closed_forms():
    """Full product carpet: madim = mmdim = 2, uniform fibres, flat spectrum."""
    system = CarpetSystem(3, 2, full_product_sft())
    dims = closed_form_dims(system)
    assert dims.madim == pytest.approx(2.0, abs=1e-9)
    assert dims.mmdim == pytest.approx(2.0, abs=1e-9)
    assert dims.uniform_fibres is True
    for k in range(1, 100):
        assert spectrum_closed_form(system, k / 100, dims) == pytest.approx(2.0, abs=1e-9)
    report_line(2, "full pair carpet: madim = mmdim = 2, spectrum constant on 99-point grid")


def test_criterion_03_four_pair_closed_forms():
    """Non-uniform fixture: exact dimensions, spectrum values, transition."""
    system = CarpetSystem(3, 2, four_pair_sft())
    dims = closed_form_dims(system)
    assert dims.madim == pytest.approx(2.0, abs=1e-9)
    assert dims.mmdim == pytest.approx(1 + LOG2 / LOG3, abs=1e-9)
    assert dims.uniform_fibres is False
    assert spectrum_closed_form(system, 0.5, dims) == pytest.approx(1.84682, abs=1e-5)

    tstar = transition_theta(system)
    # both branches at the transition: increasing branch equals the cap
    k_slope = (1 / LOG3 - 1 / LOG2) * dims.h_conditional + dims.h_omega / LOG2
    branch = (dims.mmdim - tstar * k_slope) / (1 - tstar)
    assert branch == pytest.approx(dims.madim, abs=1e-9)
    for theta in (tstar + 1e-6, 0.7, 0.8, 0.95):
        assert spectrum_closed_form(system, theta, dims) == pytest.approx(dims.madim, abs=1e-9)
    report_line(3, "4-pair carpet: madim 2, mmdim 1+log2/log3, spectrum(0.5) = 1.84682")


def test_criterion_04_estimator_convergence():
    """Default-grid estimates land within 0.05 of the closed forms."""
    start = time.time()
    systems = carpet_systems()
    for name in ("full_product", "four_pair"):
        system = systems[name]
        rep = estimate_madim(system, madim_grid(system, 20))
        assert rep.closed_form is not None
        assert abs(rep.slope - rep.closed_form) < 0.05, f"{name}: {rep.slope}"
        curve = estimate_spectrum(system, (0.3, 0.5, 0.63093, 0.8))
        for point in curve.points:
            assert abs(point.estimated - point.closed_form) < 0.05, (
                f"{name} theta={point.theta}: {point.estimated} vs {point.closed_form}"
            )
    elapsed = time.time() - start
    assert elapsed < 300, f"estimators took {elapsed:.1f}s"
    report_line(4, f"madim and spectrum estimates within 0.05 on both carpets, {elapsed:.1f}s")


def test_criterion_05_inequality_suite():
    """Spectrum sandwich: slack 0 on closed forms, slack 0.1 on estimates."""
    thetas = [k / 100 for k in range(1, 100)]
    for name, system in carpet_systems().items():
        if name == "golden_pair":
            continue  # conditional entropy has no stabilized exact value
        dims = closed_form_dims(system)
        closed = [(t, spectrum_closed_form(system, t, dims)) for t in thetas]
        verdicts = check_bounds(dims.mmdim, closed, dims.madim, slack=0.0)
        bad = [v for v in verdicts if not v.passed]
        assert not bad, f"{name} closed-form: {bad[:3]}"

        est_madim = estimate_madim(system, madim_grid(system)).slope
        est_mmdim = estimate_madim(system, uniform_scale_grid(system)).slope
        curve = estimate_spectrum(system, (0.3, 0.5, 0.63093, 0.8))
        samples = [(p.theta, p.estimated) for p in curve.points]
        verdicts = check_bounds(est_mmdim, samples, est_madim, slack=0.1)
        bad = [v for v in verdicts if not v.passed]
        assert not bad, f"{name} estimates: {bad[:3]}"
    report_line(5, "sandwich bounds: slack 0 closed forms, slack 0.1 estimates, zero failures")


def test_criterion_06_subadditivity_and_order_exchange():
    """Exact integer subadditivity and finite max-min ordering on all fixtures."""
    scales = ((1 / 3, 1 / 27), (0.5, 1 / 32), (0.25, 1 / 64))
    n_pairs = ((1, 1), (1, 2), (2, 2), (2, 3), (1, 3))
    checked = 0
    for name, system in carpet_systems().items():
        verdicts = subadditivity_check(system, n_pairs, scales)
        bad = [v for v in verdicts if not v.passed]
        assert not bad, f"{name}: {bad[:3]}"
        checked += len(verdicts)

        r, rho = 1 / 3, 1 / 9
        need = scale_indices(r, 3, 2).l2
        words_by_depth = {m: enumerate_words(system.omega, m).words for m in range(1, 7)}
        n_centers = min(4, min(len(w) for w in words_by_depth.values()))
        table = {}
        for m, words in words_by_depth.items():
            for i in range(n_centers):
                cc = cover_count_formula(system, m, (words[i],) * need, r, rho)
                table[(i, m)] = cc.log_count / m
        verdict = order_exchange_check(table)
        assert verdict.passed, f"{name}: max-min {verdict.lhs} > min-max {verdict.rhs}"
        checked += 1
    report_line(6, f"{checked} subadditivity/order-exchange verdicts, zero failures")


def test_criterion_07_bilipschitz_invariance():
    """Rescaling by 1/3 reproduces slopes exactly; by 0.7 within 0.05."""
    for name, system in carpet_systems().items():
        v_exact = bilipschitz_check(system, c=1.0 / 3.0)
        diff = abs(v_exact.lhs - v_exact.rhs)
        assert v_exact.passed and diff <= 1e-9, f"{name}: c=1/3 diff {diff}"
        v_generic = bilipschitz_check(system, c=0.7)
        diff = abs(v_generic.lhs - v_generic.rhs)
        assert v_generic.passed and diff <= 0.05, f"{name}: c=0.7 diff {diff}"
    report_line(7, "slope invariance: c=1/3 within 1e-9, c=0.7 within 0.05, all fixtures")


def test_criterion_08_full_shift_spectrum():
    """Truncated 1/n alphabet: windowed slopes near the reference curve,
    plus the covering/separation bracket on 1000 random alphabets."""
    alphabet = f_lambda_alphabet(1.0, 64)
    floor = 12.0 * alphabet.min_gap  # truncation-artifact margin
    for theta in (0.25, 0.5, 0.75):
        lo, hi = floor ** theta, 0.5
        r_list = [lo * (hi / lo) ** (i / 11) for i in range(12)]
        curve = [p for p in sinfty_curve(alphabet, theta, r_list) if p.faithful]
        assert len(curve) >= 10
        slope = fit_dimension([(p.log_ratio, p.s_upper) for p in curve]).slope
        target = min(1.0 / (2 * (1 - theta)), 1.0)
        assert abs(slope - target) <= 0.15, f"theta={theta}: slope {slope} vs {target}"

    rng = random.Random(987654321)
    for trial in range(1000):
        pts = sorted({rng.random() for _ in range(rng.randint(2, 40))})
        if len(pts) < 2:
            continue
        alpha = make_alphabet(pts)
        x = rng.choice(alpha.points)
        r = rng.uniform(0.05, 1.0)
        rho = r * rng.uniform(0.01, 0.99)
        cover = interval_cover_count(alpha, x, r, rho)
        assert cover <= interval_pack_count(alpha, x, r, rho / 4.0), f"trial {trial}"
    report_line(8, "windowed slopes within 0.15 of min(1/(2(1-theta)), 1); bracket held 1000x")


def test_criterion_09_wandering_decay():
    """Class-decomposition bound decreases toward zero through depth 128."""
    rows = wandering_demo(8, (16, 32, 64, 128), 16, 0.5, 1 / 32)
    bounds = {row.depth: row.bound for row in rows}
    ordered = [bounds[m] for m in (16, 32, 64, 128)]
    assert all(x > y for x, y in zip(ordered, ordered[1:])), f"not decreasing: {ordered}"
    envelope = math.log(128 * 8 * 33) / 128
    assert bounds[128] < bounds[32] / 2 + envelope
    report_line(
        9,
        "bound decay "
        + " > ".join(f"{bounds[m]:.4f}" for m in (16, 32, 64, 128))
        + f", depth-128 below half of depth-32 plus envelope {envelope:.4f}",
    )


def test_criterion_10_determinism(tmp_path):
    """verify emits byte-identical CSV under --jobs 1 and --jobs 8."""
    config = {
        "system": {
            "kind": "carpet",
            "a": 3,
            "b": 2,
            "subshift": {
                "a_size": 3,
                "b_size": 2,
                "pairs": [[0, 0], [1, 0], [2, 0], [0, 1]],
                "transitions": "full",
            },
        }
    }
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps(config))
    out1, out8 = tmp_path / "jobs1", tmp_path / "jobs8"
    assert main(["verify", "--config", str(cfg), "--out", str(out1), "--jobs", "1", "--no-figures"]) == 0
    assert main(["verify", "--config", str(cfg), "--out", str(out8), "--jobs", "8", "--no-figures"]) == 0
    bytes1 = (out1 / "verify.csv").read_bytes()
    bytes8 = (out8 / "verify.csv").read_bytes()
    assert bytes1 == bytes8
    report_line(10, f"verify CSV byte-identical across --jobs 1/8 ({len(bytes1)} bytes)")
