"""Ground-state tracking: closed-form branch, EP location, regressions."""

import numpy as np
import pytest

from qcpchain.eigensolver import SolverError, eig_full
from qcpchain.groundstate import (GroundStateRecord, MethodsDisagreeError,
                                  find_crossing_hermitian, find_gamma_c,
                                  select_ground, solve_point, sweep)
from qcpchain.models import ModelParams, build_heff
from qcpchain.oracle import l2_ep, l2_spectrum


def test_l2_tracked_branch_matches_closed_form_through_ep():
    grid = np.arange(0.2, 10.01, 0.2)
    trace = sweep(ModelParams(L=2), grid)
    for rec in trace.records:
        sol = l2_spectrum(1.0, rec.gamma)
        assert abs(rec.energy - sol.energies[sol.ground_index]) < 1e-10
    rules = [rec.rule for rec in trace.records]
    gammas = [rec.gamma.imag for rec in trace.records]
    # the rule flips from min-real-part to continuity across the EP and
    # never flips back
    flip = rules.index("continuity")
    assert gammas[flip - 1] < l2_ep() < gammas[flip]
    assert all(r == "continuity" for r in rules[flip:])
    assert all(r == "min-real-part" for r in rules[:flip])


def test_select_ground_cold_start_semantics():
    # Below the EP a fresh start picks the minimum real part; past it the
    # slowest-decaying (dark) state wins, so sweeps that should continue
    # the physical branch must approach from below.
    h = build_heff(ModelParams(L=2, gamma=4.0j))
    spec = eig_full(h)
    i, rule, ov = select_ground(spec.values, spec.right)
    assert rule == "min-real-part"
    assert spec.values[i].real == spec.values.real.min()

    h = build_heff(ModelParams(L=2, gamma=8.0j))
    spec = eig_full(h)
    i, rule, _ = select_ground(spec.values, spec.right)
    assert rule == "continuity"
    assert abs(spec.values[i]) < 1e-12  # dark state


def test_select_ground_policy_validation():
    h = build_heff(ModelParams(L=2, gamma=4.0j))
    spec = eig_full(h)
    with pytest.raises(ValueError, match="policy"):
        select_ground(spec.values, spec.right, policy="bogus")


def test_select_ground_policies_differ_above_ep():
    params = ModelParams(L=2)
    below = sweep(params, np.array([5.0, 5.5])).records[-1]
    h = build_heff(ModelParams(L=2, gamma=8.0j))
    spec = eig_full(h)
    i_min, _, _ = select_ground(spec.values, spec.right, prev=below,
                                policy="min-im")
    i_max, _, _ = select_ground(spec.values, spec.right, prev=below,
                                policy="max-im")
    assert spec.values[i_min].imag <= spec.values[i_max].imag


def test_sweep_grid_validation():
    p = ModelParams(L=2)
    with pytest.raises(ValueError, match="increasing"):
        sweep(p, np.array([1.0, 1.0]))
    with pytest.raises(ValueError, match="increasing"):
        sweep(p, np.array([2.0, 1.0]))
    with pytest.raises(ValueError, match="axis"):
        sweep(p, np.array([1.0, 2.0]), axis="diagonal")


def test_sweep_overlap_continuity_below_ep():
    trace = sweep(ModelParams(L=4), np.arange(1.0, 13.0, 0.5))
    for rec in trace.records[1:]:
        assert rec.overlap_prev > 0.99


def test_l8_tracked_branch_ignores_reopened_excited_pair():
    # Regression: just above the L=8 ground EP an excited pair re-opens a
    # small negative real part near Gamma ~ 14.05.  The tracked branch
    # must stay on its closed continuation instead of grabbing it.
    grid = np.arange(13.5, 14.2001, 0.01)
    trace = sweep(ModelParams(L=8), grid)
    gc = find_gamma_c(8, lo=13.5, hi=14.0)
    for rec in trace.records:
        if rec.gamma.imag > gc.gamma_c + 0.02:
            assert rec.rule == "continuity"
            assert abs(rec.energy.real) < 1e-8
            assert rec.overlap_prev > 0.9


def test_find_gamma_c_l2_matches_ep():
    cp = find_gamma_c(2, tol=1e-6)
    assert cp.L == 2
    assert cp.method == "spectral"
    assert abs(cp.gamma_c - l2_ep()) < 1e-4
    assert cp.bracket_width <= 1e-6


def test_find_gamma_c_scales_with_omega():
    cp = find_gamma_c(2, omega=2.0, tol=1e-6)
    assert abs(cp.gamma_c - l2_ep(2.0)) < 1e-4


def test_find_gamma_c_validation():
    with pytest.raises(ValueError, match="tol"):
        find_gamma_c(2, tol=0.0)
    with pytest.raises(SolverError, match="never closes"):
        find_gamma_c(2, lo=1.0, hi=2.0)


def test_solve_point_targeted_needs_predecessor():
    with pytest.raises(SolverError, match="predecessor"):
        solve_point(ModelParams(L=4, gamma=4.0j), prev=None,
                    solver="targeted")


def test_hermitian_sweep_matches_closed_form_and_jumps():
    grid = np.arange(-4.0, 0.01, 0.05)
    trace = sweep(ModelParams(L=2), grid, axis="re")
    for rec in trace.records:
        sol = l2_spectrum(1.0, rec.gamma)
        want = sol.energies[sol.ground_index]
        assert abs(rec.energy - want) < 1e-10
        assert rec.rule == "min-real-part"
    # the level crossing at Gamma_re = -2 separates dark ground (E = 0)
    # from the hybridized branch (E < 0)
    for rec in trace.records:
        if rec.gamma.real < -2.0 - 1e-9:
            assert abs(rec.energy) < 1e-12
        elif rec.gamma.real > -2.0 + 1e-9:
            assert rec.energy.real < 0.0


def test_find_crossing_hermitian_l2():
    got = find_crossing_hermitian(2, tol=1e-8)
    assert got.method == "level-crossing"
    assert abs(got.gamma_c - (-2.0)) < 1e-6
