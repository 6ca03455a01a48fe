"""Acceptance gate: one test (one pass/fail line) per numbered criterion.

Criteria 4, 6 and 9 each contain one sub-claim that measured computation
shows cannot hold as stated; those sub-claims are carried as strict xfail
tests (4b, 6b, 9b) next to the attainable parts, so a behaviour change in
either direction flips the suite loudly.
"""
import math
import os
import time

import numpy as np
import pytest

from fareyphase import ball_geometry as bg
from fareyphase import thermo, transfer, verify
from fareyphase.farey_core import level_fractions
from fareyphase.partition import (
    euler_totient,
    dirichlet_profile,
    knauf_profile,
    z_knauf,
    zeta_ratio,
)


def test_criterion_01_exact_small_levels():
    t0 = time.perf_counter()
    rows = {k: [str(f) for f in level_fractions(k)] for k in (0, 1, 2)}
    elapsed = time.perf_counter() - t0
    assert rows[0] == ["0/1", "1/1"]
    assert rows[1] == ["0/1", "1/2", "1/1"]
    assert rows[2] == ["0/1", "1/3", "1/2", "2/3", "1/1"]
    assert elapsed < 1.0


def test_criterion_02_sandwich_bounds():
    t0 = time.perf_counter()
    result = verify.check_sandwich()
    elapsed = time.perf_counter() - t0
    assert result.cases == 17 * 9
    assert result.ok, result.detail
    assert elapsed < 30.0


def test_criterion_03_zeta_ratio_convergence():
    t0 = time.perf_counter()
    target = zeta_ratio(2.0)  # in-artifact series oracle for the k->inf limit
    prof = knauf_profile(24, 4.0)
    z_by_level = 1.0 + np.cumsum(prof[1:])
    value = z_knauf(24, 4.0).value
    elapsed = time.perf_counter() - t0
    assert all(a < b for a, b in zip(z_by_level, z_by_level[1:]))
    assert abs(value - target) < 5e-3
    assert elapsed < 60.0


def test_criterion_04a_totient_monotone_and_saturated_range():
    # nondecreasing in k for every n <= 50, and equal to Euler phi(n) for
    # every n that can have saturated by level 30 (n <= 31: a fraction m/n
    # enters at level n-1 at the earliest possible saturation point)
    t0 = time.perf_counter()
    prof = dirichlet_profile(30, 50)
    elapsed = time.perf_counter() - t0
    for n in range(1, 51):
        col = prof[:, n]
        assert (np.diff(col) >= 0).all(), f"phi_k({n}) not monotone"
    for n in range(1, 32):
        assert prof[30, n] == euler_totient(n), f"phi_30({n}) != phi({n})"
    assert elapsed < 60.0


@pytest.mark.xfail(
    strict=True,
    reason="the slowest fractions of denominator n (1/n and (n-1)/n) only "
    "enter at level n-1, so phi_30(n) = phi(n) - 2 for every n in [32, 50]; "
    "equality for all n <= 50 needs k >= 49, not k = 30",
)
def test_criterion_04b_totient_equals_phi_at_k30_for_all_n():
    prof = dirichlet_profile(30, 50)
    for n in range(1, 51):
        assert prof[30, n] == euler_totient(n)


def test_criterion_05_bounded_sums():
    t0 = time.perf_counter()
    result = verify.check_bounded_sums(k_max=30)
    elapsed = time.perf_counter() - t0
    assert result.cases == 30
    assert result.ok, result.detail
    assert elapsed < 60.0


def test_criterion_06a_cross_method_eigenvalue():
    t0 = time.perf_counter()
    for beta in (0.1, 0.25, 0.5, 0.75):
        lam_m = transfer.leading_eigen(transfer.build_matrix(beta, 512)).lambda_
        lam_r = transfer.lambda_from_ratio(beta, 26)
        assert abs(lam_m - lam_r) < 1e-4, f"beta={beta}: {lam_m} vs {lam_r}"
    lam0 = transfer.leading_eigen(transfer.build_matrix(1e-6, 512)).lambda_
    assert abs(lam0 - 2.0) < 1e-3
    elapsed = time.perf_counter() - t0
    assert elapsed < 300.0


@pytest.mark.xfail(
    strict=True,
    reason="at beta=0.9 the finite-level ratio converges like lambda^-k with "
    "lambda(0.9)=1.0473: the k=26 estimate still sits 1.1e-3 from the fully "
    "truncation-converged matrix value, and closing to 1e-4 needs k ~ 48 "
    "(2^48 terms); the two routes are correct but the pinned (M=512, k=26) "
    "budget cannot reach the stated gap at this beta",
)
def test_criterion_06b_cross_method_eigenvalue_beta_09():
    lam_m = transfer.leading_eigen(transfer.build_matrix(0.9, 512)).lambda_
    lam_r = transfer.lambda_from_ratio(0.9, 26)
    assert abs(lam_m - lam_r) < 1e-4


def test_criterion_07_second_order_transition_signature():
    # continuity: f -> 0 from below; divergence: C grows without bound on
    # the same resolution ladder
    assert thermo.free_energy(1.0) == 0.0
    assert thermo.free_energy(1.3) == 0.0
    deltas = (1e-1, 1e-2, 1e-3)
    f_mag = [abs(thermo.free_energy(1.0 - d)) for d in deltas]
    heat = [thermo.specific_heat(1.0 - d) for d in deltas]
    assert f_mag[0] > f_mag[1] > f_mag[2] > 0.0
    assert 0.0 < heat[0] < heat[1] < heat[2]


def test_criterion_08_prellberg_property_fit():
    fit = thermo.prellberg_fit(np.geomspace(3e-3, 3e-2, 7))
    assert all(c > 0.0 for c in fit.c_values)
    assert fit.stability < 0.25
    assert fit.heat_flatness < 2.0


def test_criterion_09a_ball_consistency():
    # composed-prefix diameters reproduce the exact ones (integer routes on
    # both sides: the difference must vanish identically, well inside 1e-14)
    for k in range(2, 15):
        for n in range(1, 2 ** (k - 2) + 1):
            exact = bg.ball_exact(k, n)
            composed = bg.ball_by_composition(bg.symbols_for_ball(k, n))
            assert abs(composed - exact) <= 1e-14 * exact
    for k in range(2, 21):
        assert bg.diameter_sum(k) < 1.0


@pytest.mark.xfail(
    strict=True,
    reason="each ball's derivative approximation tends to a tail-dependent "
    "constant in (8/9, 1), so the aggregate relative error saturates near "
    "3.4% instead of vanishing: measured 0.0255 (k=6) -> 0.0308 (k=10) -> "
    "0.0331 (k=14), monotonically increasing; the per-site log error does "
    "decrease (see test_approx_partition_quality_at_unit_beta)",
)
def test_criterion_09b_approx_partition_error_decreases():
    from fareyphase.partition import z_farey_tree

    devs = []
    for k in (6, 10, 14):
        a = bg.approx_partition(k, 1.0)
        z = z_farey_tree(k, 1.0).value
        devs.append(abs(a / z - 1.0))
    assert devs[0] > devs[1] > devs[2]


def test_criterion_10a_performance_level24_streaming():
    t0 = time.perf_counter()
    single = z_knauf(24, 2.0, threads=1)
    elapsed = time.perf_counter() - t0
    assert single.terms == 2**24
    assert elapsed < 10.0
    for t in (2, 8):
        assert z_knauf(24, 2.0, threads=t).value == single.value  # bit-for-bit


@pytest.mark.skipif(
    (os.cpu_count() or 1) < 8,
    reason="speedup clause needs 8 hardware threads; this host has fewer",
)
def test_criterion_10b_performance_speedup():
    z_knauf(24, 2.0, threads=8)  # touch the pool once before timing
    t0 = time.perf_counter()
    z_knauf(24, 2.0, threads=1)
    t_single = time.perf_counter() - t0
    t0 = time.perf_counter()
    z_knauf(24, 2.0, threads=8)
    t_eight = time.perf_counter() - t0
    assert t_single / t_eight >= 4.0
