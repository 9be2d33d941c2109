import math

import numpy as np
import pytest

from qtm.core import Bath, MachineConfig, SystemKind
from qtm.direct_cycle import ALPHA, Y_STAR, cycle_performance, v_term
from qtm.errors import DomainError, RegimeError
from qtm.oracle import oracle_collision
from qtm.otto_compare import (
    REFERENCE_STA_TARGETS,
    figure_of_merit_chi,
    ideal_otto_power,
    match_target_power,
    oscillator_stability,
    peaks_curve,
)

QUBIT = SystemKind.qubit()
OSC = SystemKind.oscillator()


class TestIdealOttoPower:
    def test_direct_cycle_sits_a_factor_below_at_half_swap_phases(self):
        omega_c, omega_h, temp_c, temp_h, g = 1.0, 5.0, 1.0, 10.0, 0.7
        cfg = MachineConfig(omega_c, omega_h, Bath(temp_c), Bath(temp_h), g)
        k = cfg.k
        for m in range(4):
            tau = (math.pi / 2 + m * math.pi) / k
            direct = cycle_performance(cfg, tau).power
            ceiling = ideal_otto_power(omega_c, omega_h, temp_c, temp_h, tau)
            assert direct == pytest.approx((g / k) ** 2 * ceiling, rel=1e-12)

    def test_ceiling_dominates_everywhere(self, rng):
        omega_c, omega_h, temp_c, temp_h = 1.0, 5.0, 1.0, 10.0
        for _ in range(200):
            g = rng.uniform(0.05, 5.0)
            tau = rng.uniform(0.01, 20.0)
            direct = v_term(g, 0.5 * (omega_h - omega_c), tau)
            assert direct <= 1.0 / tau + 1e-15

    def test_long_cycle_vanishes(self):
        assert ideal_otto_power(1.0, 5.0, 1.0, 10.0, 1e9) < 1e-8

    def test_rejects_zero_time(self):
        with pytest.raises(DomainError):
            ideal_otto_power(1.0, 5.0, 1.0, 10.0, 0.0)


class TestPeaksCurve:
    def test_every_point_sits_at_y_star(self):
        points = peaks_curve(np.geomspace(0.01, 10.0, 25), 1.0, 5.0, 1.0, 10.0)
        for pt in points:
            assert pt.k * pt.tau_star == pytest.approx(Y_STAR, rel=1e-12)
            assert pt.v_max == pytest.approx(ALPHA * pt.g ** 2 / pt.k, rel=1e-12)

    def test_large_coupling_asymptote_is_linear(self):
        delta = 2.0
        points = peaks_curve([1e4], 1.0, 5.0, 1.0, 10.0)
        assert points[0].v_max == pytest.approx(ALPHA * 1e4, rel=1e-6)

    def test_small_coupling_scales_quadratically(self):
        delta = 2.0
        points = peaks_curve([1e-3, 2e-3], 1.0, 5.0, 1.0, 10.0)
        assert points[1].v_max / points[0].v_max == pytest.approx(4.0, rel=1e-5)

    def test_power_monotone_in_coupling(self):
        points = peaks_curve(np.geomspace(0.01, 10.0, 40), 1.0, 5.0, 1.0, 10.0)
        values = [pt.power_max for pt in points]
        assert all(b > a for a, b in zip(values, values[1:]))


class TestChi:
    def test_ratio_of_rate_terms_at_half_swap(self):
        omega_c, omega_h, temp_c, temp_h, g = 1.0, 20.0, 1.0, 10.0, 0.8
        delta = 0.5 * (omega_h - omega_c)
        k = math.hypot(g, delta)
        tau = (math.pi / 2) / k
        chi_ideal = figure_of_merit_chi(omega_c, omega_h, temp_c, temp_h, tau,
                                        lambda t: 1.0 / t, OSC)
        chi_direct = figure_of_merit_chi(omega_c, omega_h, temp_c, temp_h, tau,
                                         lambda t: v_term(g, delta, t), OSC)
        assert chi_ideal / chi_direct == pytest.approx((k / g) ** 2, rel=1e-12)

    def test_vanishes_at_regime_boundary(self):
        chi = figure_of_merit_chi(1.0, 10.0 + 1e-9, 1.0, 10.0, 1.0,
                                  lambda t: 1.0 / t, OSC)
        assert chi == pytest.approx(0.0, abs=1e-9)

    def test_regime_guard(self):
        with pytest.raises(RegimeError):
            figure_of_merit_chi(1.0, 5.0, 1.0, 10.0, 1.0, lambda t: 1.0 / t)

    def test_non_negative_with_oracle_certified_heat(self, rng):
        # sign certified against the exact-evolution heat on the cold side
        for _ in range(5):
            omega_c = 1.4
            omega_h = rng.uniform(15.0, 25.0)
            g = rng.uniform(0.1, 0.8) * math.sqrt(omega_c * omega_h)
            tau = rng.uniform(0.2, 2.0)
            cfg = MachineConfig(omega_c, omega_h, Bath(1.0), Bath(10.0), g,
                                kind_c=OSC, kind_h=OSC)
            chi = figure_of_merit_chi(omega_c, omega_h, 1.0, 10.0, tau,
                                      lambda t: v_term(g, cfg.delta, t), OSC)
            assert chi >= 0.0
            res = oracle_collision(cfg, tau)
            assert res.certified
            assert res.outcome.heat_c >= -1e-12


class TestOscillatorStability:
    def test_unstable_boundary_example(self):
        rep = oscillator_stability(1.0, 4.0, 2.0)
        assert rep.lambda_minus == pytest.approx(0.0, abs=1e-12)
        assert not rep.stable

    def test_stable_example(self):
        rep = oscillator_stability(1.0, 4.0, 1.0)
        assert rep.lambda_minus == pytest.approx(2.5 - math.sqrt(3.25), rel=1e-12)
        assert rep.stable

    def test_reported_low_frequency_refrigerator_bound(self):
        # refrigerator comparison frequencies: bound sqrt(w_c w_h) ~ 0.224 nu_c
        rep = oscillator_stability(0.02, 2.5, 0.1)
        assert rep.coupling_limit == pytest.approx(0.2236, abs=1e-3)

    def test_eigenvalue_order_and_monotonicity(self):
        gs = np.linspace(0.0, 3.0, 50)
        lams = [oscillator_stability(1.0, 4.0, float(g)).lambda_minus for g in gs]
        assert all(l2 < l1 for l1, l2 in zip(lams, lams[1:]))
        for g in gs:
            rep = oscillator_stability(1.0, 4.0, float(g))
            assert rep.lambda_plus >= rep.lambda_minus

    def test_truncation_grows_near_instability(self):
        # certified truncation sizes increase toward the coupling limit
        from qtm.oracle import TruncationPolicy

        cfg_far = MachineConfig(1.0, 4.0, Bath(0.8), Bath(2.0), 0.4,
                                kind_c=OSC, kind_h=OSC)
        cfg_near = MachineConfig(1.0, 4.0, Bath(0.8), Bath(2.0), 1.9,
                                 kind_c=OSC, kind_h=OSC)
        res_far = oracle_collision(cfg_far, 1.0)
        res_near = oracle_collision(cfg_near, 1.0, TruncationPolicy(level_count=16))
        assert res_far.certified
        # starved fixed truncation near the bound fails certification
        assert not res_near.certified


class TestTargetMatcher:
    def test_round_trip_power(self):
        target = 1e-3
        match = match_target_power(target, 1.0, 5.0, 1.0, 10.0)
        assert match.achieved == pytest.approx(target, rel=1e-10)
        points = peaks_curve([match.g], 1.0, 5.0, 1.0, 10.0)
        assert points[0].power_max == pytest.approx(target, rel=1e-10)

    def test_round_trip_chi(self):
        target = 5e-3
        match = match_target_power(target, 1.0, 20.0, 1.0, 10.0, OSC, merit="chi")
        assert match.achieved == pytest.approx(target, rel=1e-10)
        assert match.merit == "chi"

    def test_stability_flagging(self):
        big = match_target_power(1e3, 1.0, 5.0, 1.0, 10.0)
        assert not big.stable
        small = match_target_power(1e-5, 1.0, 5.0, 1.0, 10.0)
        assert small.stable

    def test_regime_guards(self):
        with pytest.raises(RegimeError):
            match_target_power(1.0, 1.0, 50.0, 1.0, 10.0)  # fridge, not engine
        with pytest.raises(RegimeError):
            match_target_power(1.0, 1.0, 5.0, 1.0, 10.0, merit="chi")
        with pytest.raises(DomainError):
            match_target_power(-1.0, 1.0, 5.0, 1.0, 10.0)

    def test_reference_targets_recorded(self):
        assert REFERENCE_STA_TARGETS["qubit_engine_power"] == 9.68e-4
        assert REFERENCE_STA_TARGETS["oscillator_chi"] == 19.77e-3
