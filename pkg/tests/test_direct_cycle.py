import math

import numpy as np
import pytest

from qtm.core import Bath, MachineConfig, Regime, SystemKind
from qtm.direct_cycle import (
    ALPHA,
    Y_STAR,
    cycle_performance,
    maximize_power_over_frequencies,
    optimal_phase,
    optimize_tau,
    oscillator_gap_profile,
    oscillator_high_t_power,
    oscillator_power_curve,
    power_frontier,
    power_prefactor,
    swap_comparison,
    swap_v_term,
    swap_window,
    v_max_over_tau,
    v_term,
)
from qtm.errors import DomainError
from qtm.search import golden_max

QUBIT = SystemKind.qubit()


def machine(omega_c=1.0, omega_h=5.0, temp_c=1.0, temp_h=10.0, g=1.0, t_wait=0.0):
    return MachineConfig(omega_c, omega_h, Bath(temp_c), Bath(temp_h), g, t_wait)


class TestConstants:
    def test_y_star_solves_phase_condition(self):
        # stationarity of sin^2(y)/y: tan(y) = 2y. A derivative-free search
        # localizes a quadratic maximum only to ~sqrt(eps) in the argument.
        assert math.tan(Y_STAR) == pytest.approx(2.0 * Y_STAR, abs=1e-5)

    def test_alpha_is_the_maximum(self):
        assert ALPHA == pytest.approx(math.sin(Y_STAR) ** 2 / Y_STAR, rel=1e-12)
        for y in np.linspace(1e-3, math.pi - 1e-3, 2000):
            assert math.sin(y) ** 2 / y <= ALPHA + 1e-12


class TestVTerm:
    def test_peak_value_at_optimal_phase(self):
        g, delta = 1.3, 0.7
        k = math.hypot(g, delta)
        assert v_term(g, delta, Y_STAR / k) == pytest.approx(ALPHA * g * g / k, rel=1e-10)

    def test_vanishes_at_full_period(self):
        g, delta = 1.0, 0.5
        k = math.hypot(g, delta)
        assert v_term(g, delta, math.pi / k) == pytest.approx(0.0, abs=1e-25)

    def test_vanishes_without_coupling(self):
        assert v_term(0.0, 1.0, 2.0) == 0.0
        assert v_term(1.0, 1.0, 0.0) == 0.0  # tau = 0 limit

    def test_rejects_negative_inputs(self):
        with pytest.raises(DomainError):
            v_term(1.0, 0.0, -1.0)
        with pytest.raises(DomainError):
            v_term(1.0, 0.0, 1.0, t_wait=-0.1)

    def test_upper_bounds(self, rng):
        # V <= (g/k)^2 / (tau + t_w) <= 1/(tau + t_w), equality at k tau = pi/2
        for _ in range(300):
            g, delta = rng.uniform(0.01, 5.0, size=2)
            tau = rng.uniform(0.01, 20.0)
            t_wait = rng.uniform(0.0, 5.0)
            k = math.hypot(g, delta)
            v = v_term(g, delta, tau, t_wait)
            assert v <= (g / k) ** 2 / (tau + t_wait) + 1e-15
            assert v <= 1.0 / (tau + t_wait) + 1e-15
        g = delta = 1.0
        k = math.hypot(g, delta)
        tau = (math.pi / 2) / k
        assert v_term(g, delta, tau) == pytest.approx((g / k) ** 2 / tau, rel=1e-12)


class TestOptimizeTau:
    def test_zero_wait_phase(self):
        rep = optimize_tau(1.0, 0.5, 0.0)
        assert rep.argmax["k_tau"] == pytest.approx(Y_STAR, abs=1e-4)

    def test_large_wait_approaches_half_swap(self):
        k = math.hypot(1.0, 0.5)
        rep = optimize_tau(1.0, 0.5, 1e3 / k)
        assert rep.argmax["k_tau"] == pytest.approx(math.pi / 2, abs=1e-3)

    def test_swap_time_power_loss_at_small_wait(self):
        res = optimal_phase(0.01)
        loss = 1.0 - (1.0 / (math.pi / 2 + 0.01)) / res.fx
        assert loss == pytest.approx(0.12, abs=0.01)

    def test_scaling_covariance(self, rng):
        for _ in range(50):
            g = rng.uniform(0.05, 5.0)
            delta = rng.uniform(-3.0, 3.0)
            t_wait = rng.uniform(0.0, 3.0)
            c = rng.uniform(0.1, 10.0)
            base = optimize_tau(g, delta, t_wait)
            scaled = optimize_tau(c * g, c * delta, t_wait / c)
            assert scaled.argmax["k_tau"] == pytest.approx(base.argmax["k_tau"], rel=1e-6)
            assert scaled.objective == pytest.approx(c * base.objective, rel=1e-10)

    def test_global_maximum_in_first_lobe(self, rng):
        for _ in range(30):
            g = rng.uniform(0.05, 3.0)
            delta = rng.uniform(-2.0, 2.0)
            t_wait = rng.uniform(0.0, 2.0)
            k = math.hypot(g, delta)
            rep = optimize_tau(g, delta, t_wait)
            assert rep.argmax["k_tau"] < math.pi
            taus = np.linspace(1e-4, 5 * math.pi / k, 4000)
            dense = max(v_term(g, delta, float(t), t_wait) for t in taus)
            assert rep.objective >= dense - 1e-9 * rep.objective

    def test_resilience_to_time_errors(self, rng):
        # 5% timing errors cost at most 2% of the peak rate
        for _ in range(200):
            g = rng.uniform(0.05, 5.0)
            delta = rng.uniform(-3.0, 3.0)
            t_wait = rng.uniform(0.0, 5.0)
            tau_star, v_max = v_max_over_tau(g, delta, t_wait)
            for sign in (+1, -1):
                v = v_term(g, delta, tau_star * (1 + 0.05 * sign), t_wait)
                assert v >= 0.98 * v_max

    def test_objective_dominates_probes(self):
        rep = maximize_power_over_frequencies(QUBIT, 1.0, 10.0, g=1.0, eta=0.5)
        assert rep.probes
        assert all(rep.objective * (1 + 1e-12) >= f for _, f in rep.probes)

    def test_requires_positive_coupling(self):
        with pytest.raises(DomainError):
            optimize_tau(0.0, 1.0, 0.0)


class TestCyclePerformance:
    def test_engine_power_factorizes(self):
        cfg = machine()
        perf = cycle_performance(cfg, 0.9)
        report, prefactor = power_prefactor(QUBIT, 1.0, 5.0, 1.0, 10.0)
        assert report.regime is Regime.ENGINE
        assert perf.power == pytest.approx(prefactor * perf.rate, rel=1e-12)
        assert perf.power > 0

    def test_degenerate_frequencies_give_zero_power(self):
        cfg = machine(omega_c=1.0, omega_h=10.0)  # omega_h/T_h == omega_c/T_c
        perf = cycle_performance(cfg, 0.9)
        assert perf.power == 0.0
        assert perf.regime.regime is Regime.DEGENERATE

    def test_long_wait_suppresses_power(self):
        short = cycle_performance(machine(t_wait=0.0), 0.9)
        long = cycle_performance(machine(t_wait=1e6), 0.9)
        assert long.power < 1e-5 * short.power

    def test_refrigerator_and_accelerator_power_signs(self):
        fridge = cycle_performance(machine(omega_h=20.0), 0.4)
        assert fridge.regime.regime is Regime.REFRIGERATOR
        assert fridge.power > 0
        accel = cycle_performance(machine(omega_h=0.5), 0.4)
        assert accel.regime.regime is Regime.THERMAL_ACCELERATOR
        assert accel.power > 0


class TestFrequencyMaximization:
    def test_fixed_efficiency_report(self):
        rep = maximize_power_over_frequencies(QUBIT, 1.0, 10.0, g=1.0, eta=0.5)
        assert rep.argmax["omega_h"] == pytest.approx(rep.argmax["omega_c"] / 0.5, rel=1e-12)
        assert rep.objective > 0
        assert rep.status == "converged"

    def test_vanishing_efficiency_kills_power(self):
        tiny = maximize_power_over_frequencies(QUBIT, 1.0, 10.0, g=1.0, eta=1e-4)
        mid = maximize_power_over_frequencies(QUBIT, 1.0, 10.0, g=1.0, eta=0.5)
        assert tiny.objective < 1e-3 * mid.objective

    def test_grid_scan_agrees_with_nested_search(self):
        # independent oracle: dense brute-force scan over (omega_c, tau)
        g, eta, temp_c, temp_h = 0.1, 0.4, 1.0, 10.0
        best = 0.0
        from qtm.core import thermal_occupation

        for omega_c in np.geomspace(1e-2, 60.0, 400):
            omega_h = omega_c / (1.0 - eta)
            pref = (omega_h - omega_c) * (
                thermal_occupation(QUBIT, omega_h, temp_h)
                - thermal_occupation(QUBIT, omega_c, temp_c))
            delta = 0.5 * (omega_h - omega_c)
            k = math.hypot(g, delta)
            for y in np.linspace(1e-3, math.pi - 1e-3, 300):
                best = max(best, pref * (g * g / k) * math.sin(y) ** 2 / y)
        rep = maximize_power_over_frequencies(QUBIT, temp_c, temp_h, g=g, eta=eta)
        assert rep.objective == pytest.approx(best, rel=2e-3)
        assert rep.objective >= best - 1e-9

    def test_free_efficiency_brackets_curzon_ahlborn(self):
        eta_ca = 1.0 - math.sqrt(0.1)
        hi = maximize_power_over_frequencies(QUBIT, 1.0, 10.0, g=1000.0)
        lo = maximize_power_over_frequencies(QUBIT, 1.0, 10.0, g=0.01)
        assert hi.argmax["eta"] > eta_ca
        assert lo.argmax["eta"] < eta_ca

    def test_peak_efficiency_increases_with_coupling(self):
        etas = [maximize_power_over_frequencies(QUBIT, 1.0, 10.0, g=g).argmax["eta"]
                for g in (0.01, 0.1, 1.0, 10.0, 1000.0)]
        assert all(b > a for a, b in zip(etas, etas[1:]))

    def test_oscillator_kind_rejected(self):
        with pytest.raises(DomainError):
            maximize_power_over_frequencies(SystemKind.oscillator(), 1.0, 10.0, g=1.0)

    def test_frontier_rows_are_fixed_eta_maxima(self):
        rows = power_frontier(QUBIT, 1.0, 10.0, g=1.0, n_eta=9)
        assert len(rows) == 9
        assert all(r.objective > 0 for r in rows)
        etas = [r.argmax["eta"] for r in rows]
        assert etas == sorted(etas)


class TestOscillatorLimit:
    def test_curzon_ahlborn_maximizer(self):
        eta_carnot = 0.9
        res = golden_max(lambda e: oscillator_high_t_power(e, eta_carnot, 1.0),
                         1e-9, eta_carnot - 1e-9, rel_tol=1e-12)
        assert res.x == pytest.approx(1.0 - math.sqrt(0.1), abs=1e-5)

    def test_local_dominance_of_curzon_ahlborn(self):
        eta_carnot = 0.9
        eta_ca = 1.0 - math.sqrt(1.0 - eta_carnot)
        center = oscillator_high_t_power(eta_ca, eta_carnot, 1.0)
        for shift in (-1e-3, 1e-3):
            assert center > oscillator_high_t_power(eta_ca + shift, eta_carnot, 1.0)

    def test_carnot_point_has_zero_power_limit(self):
        assert oscillator_high_t_power(0.9 - 1e-12, 0.9, 1.0) == pytest.approx(0.0, abs=1e-10)
        with pytest.raises(DomainError):
            oscillator_high_t_power(0.9, 0.9, 1.0)

    def test_gap_profile_small_x_limits(self):
        for l in (0.1, 0.5, 0.9):
            f, b = oscillator_gap_profile(1e-9, l)
            assert f == pytest.approx(1.0 / l - 1.0, rel=1e-6)
            assert b == pytest.approx(2.0 / 3.0 * 1e-9, rel=1e-6)

    def test_gap_profile_matches_naive_forms_at_moderate_x(self):
        for x in (0.2, 1.0, 5.0, 20.0):
            for l in (0.1, 0.5, 0.9):
                f, b = oscillator_gap_profile(x, l)
                coth = lambda y: math.cosh(y) / math.sinh(y)
                assert f == pytest.approx(x * (coth(l * x) - coth(x)), rel=1e-12)
                naive_b = (math.sinh(x) * math.cosh(x) - x) / math.sinh(x) ** 2
                assert b == pytest.approx(naive_b, rel=1e-10)

    def test_gap_profile_decreases_by_finite_differences(self):
        # central finite differences as the sign oracle for f'(x) < 0
        for l in (0.1, 0.5, 0.9):
            for x in np.geomspace(1e-3, 1e2, 60):
                h = 1e-5 * x
                f_plus, _ = oscillator_gap_profile(x + h, l)
                f_minus, _ = oscillator_gap_profile(x - h, l)
                assert f_plus - f_minus < 0

    def test_witness_is_increasing(self):
        xs = np.geomspace(1e-3, 8.0, 200)
        bs = [oscillator_gap_profile(float(x), 0.5)[1] for x in xs]
        assert all(b2 > b1 for b1, b2 in zip(bs, bs[1:]))
        # saturates at 1 from below once exp(-2x) underflows the comparison
        tail = [oscillator_gap_profile(float(x), 0.5)[1] for x in np.geomspace(8.0, 100.0, 40)]
        assert all(b2 >= b1 for b1, b2 in zip(tail, tail[1:]))
        assert all(b <= 1.0 for b in tail)

    def test_power_curve_strictly_decreasing_in_x(self):
        xs = np.geomspace(1e-3, 10.0, 60)
        for t_wait in (0.0, 0.5):
            for eta in (0.3, 1.0 - math.sqrt(0.1), 0.85):
                values = [oscillator_power_curve(float(x), eta, 0.9, g=1.0,
                                                 t_wait=t_wait) for x in xs]
                assert all(v2 < v1 for v1, v2 in zip(values, values[1:]))


class TestSwapComparison:
    def test_full_swap_rate(self):
        assert swap_v_term(2.0, 2.0) == pytest.approx(0.5, rel=1e-12)

    def test_double_swap_time_vanishes(self):
        assert swap_v_term(4.0, 2.0) == pytest.approx(0.0, abs=1e-25)

    def test_optimized_swap_phase(self):
        # change of variable maps onto the sin^2(y)/y maximization
        t_swap = 2.0
        rate = 0.5 * math.pi / t_swap
        res = golden_max(lambda t: swap_v_term(t, t_swap), 1e-9, 2 * t_swap,
                         rel_tol=1e-12)
        assert res.fx == pytest.approx(rate * ALPHA, rel=1e-9)

    def test_rejects_bad_times(self):
        with pytest.raises(DomainError):
            swap_v_term(1.0, 0.0)

    def test_threshold_and_ratio_constants(self):
        assert math.sqrt(2.0 / (ALPHA * math.pi - 2.0)) == pytest.approx(2.6898, abs=1e-3)
        assert 0.5 * ALPHA * math.pi == pytest.approx(1.1382, abs=1e-3)

    def test_high_coupling_branch_closed_forms(self):
        omega_c, omega_h = 1.0, 4.0
        delta = 1.5
        g = 3.0  # > sqrt(omega_c*omega_h) = 2: spread set by k
        comp = swap_comparison(omega_c, omega_h, g)
        k = math.hypot(g, delta)
        assert comp.spread_from_k
        assert comp.t_swap == pytest.approx(math.pi / (2 * k), rel=1e-12)
        assert comp.ratio == pytest.approx(0.5 * ALPHA * math.pi * (g / k) ** 2, rel=1e-9)
        assert comp.threshold_g == pytest.approx(2.6898 * delta, abs=2e-3 * delta)
        assert comp.exchange_wins == (g > comp.threshold_g)

    def test_low_coupling_branch_threshold(self):
        omega_c, omega_h = 1.0, 1.5
        comp = swap_comparison(omega_c, omega_h, g=1.0)
        assert not comp.spread_from_k
        omega_bar = 1.25
        assert comp.t_swap == pytest.approx(math.pi / (2 * omega_bar), rel=1e-12)
        delta = 0.25
        root = math.sqrt(omega_bar ** 2 + (ALPHA * math.pi * delta) ** 2)
        expected = math.sqrt(2 * omega_bar * (omega_bar + root)) / (ALPHA * math.pi)
        assert comp.threshold_g == pytest.approx(expected, rel=1e-12)

    def test_threshold_crossing_flips_the_verdict(self):
        omega_c, omega_h = 1.0, 4.0
        thr = swap_comparison(omega_c, omega_h, g=3.0).threshold_g
        lose = swap_comparison(omega_c, omega_h, g=thr * 0.99)
        win = swap_comparison(omega_c, omega_h, g=thr * 1.01)
        assert not lose.exchange_wins and win.exchange_wins

    def test_time_optimized_swap_always_wins(self, rng):
        for _ in range(200):
            omega_c = rng.uniform(0.2, 3.0)
            omega_h = rng.uniform(0.2, 3.0)
            if omega_c == omega_h:
                continue
            g = rng.uniform(0.01, 5.0)
            t_wait = rng.uniform(0.0, 2.0)
            comp = swap_comparison(omega_c, omega_h, g, t_wait)
            assert comp.v_swap_max >= comp.v_max * (1 - 1e-12)

    def test_window_matches_reported_interval(self):
        lo, hi = swap_window()
        assert lo == pytest.approx(0.4832, abs=1e-3)
        assert hi == pytest.approx(2.0697, abs=1e-3)
