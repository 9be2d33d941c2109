"""Direct (no-mediator) cycle: rate term, power, and its maximization.

The per-regime power factorizes into a thermodynamic prefactor, fixed by
frequencies and temperatures, and a rate term

    V = (1 - A) / (tau + t_wait) = (g^2/k^2) sin^2(k tau) / (tau + t_wait),

so optimizing over the collision time is a one-dimensional problem in the
phase y = k*tau. At zero waiting time the optimum is the argmax of
sin^2(y)/y; with waiting it drifts toward the half-swap phase pi/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.optimize import brentq

from .core import (
    MachineConfig,
    Regime,
    RegimeReport,
    SystemKind,
    classify_regime,
    collide,
    thermal_occupation,
)
from .errors import DomainError
from .search import SearchResult, golden_max, grid_then_golden

_PHASE_FLOOR = 1e-9  # open (0, pi) bracket without touching the removable zero


def _phase_objective(c):
    return lambda y: math.sin(y) ** 2 / (y + c)


# Phase maximizing sin^2(y)/y (zero-wait optimum) and the maximum itself.
_BASE = golden_max(_phase_objective(0.0), _PHASE_FLOOR, math.pi, rel_tol=1e-13)
Y_STAR = _BASE.x
ALPHA = _BASE.fx


def optimal_phase(kt_wait: float, rel_tol: float = 1e-12) -> SearchResult:
    """Argmax of sin^2(y)/(y + k*t_wait) over the first lobe y in (0, pi)."""
    if kt_wait < 0:
        raise DomainError("k*t_wait must be >= 0")
    if kt_wait == 0.0:
        return _BASE
    return golden_max(_phase_objective(kt_wait), _PHASE_FLOOR, math.pi, rel_tol=rel_tol)


def v_term(g: float, delta: float, tau: float, t_wait: float = 0.0) -> float:
    """Rate term V = (g^2/k^2) sin^2(k tau) / (tau + t_wait); 0 at tau = 0."""
    if tau < 0 or t_wait < 0:
        raise DomainError("tau and t_wait must be >= 0")
    if g < 0:
        raise DomainError("coupling must be >= 0")
    if tau == 0.0:
        return 0.0
    k = math.hypot(g, delta)
    if k == 0.0:
        return 0.0
    ratio = g / k
    s = math.sin(k * tau)
    return ratio * ratio * s * s / (tau + t_wait)


def v_max_over_tau(g: float, delta: float, t_wait: float = 0.0) -> tuple[float, float]:
    """(tau_star, V_max) of the rate term; lean path without a report."""
    k = math.hypot(g, delta)
    if k == 0.0 or g == 0.0:
        return 0.0, 0.0
    res = optimal_phase(k * t_wait)
    return res.x / k, (g * g / k) * res.fx


@dataclass(frozen=True)
class OptimizationReport:
    """Result of a derivative-free maximization with its diagnostics."""

    argmax: dict[str, float]
    objective: float
    iterations: int
    tolerance: float
    bracket: tuple[float, float]
    status: str = "converged"
    probes: tuple[tuple[float, float], ...] = ()
    checks: dict[str, bool] = field(default_factory=dict)


def optimize_tau(g: float, delta: float, t_wait: float = 0.0) -> OptimizationReport:
    """Maximize V over the collision time at fixed coupling and detuning.

    The global maximum lies in the first lobe k*tau in (0, pi): later lobes
    repeat the same sin^2 peaks over a strictly larger denominator.
    """
    if not g > 0:
        raise DomainError("coupling must be > 0 to optimize the collision time")
    if t_wait < 0:
        raise DomainError("t_wait must be >= 0")
    k = math.hypot(g, delta)
    res = optimal_phase(k * t_wait)
    return OptimizationReport(
        argmax={"tau": res.x / k, "k_tau": res.x},
        objective=(g * g / k) * res.fx,
        iterations=res.iterations,
        tolerance=res.tol,
        bracket=(res.bracket[0] / k, res.bracket[1] / k),
        probes=res.probes,
    )


# ---------------------------------------------------------------------------
# Power of one cycle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CyclePerformance:
    """Per-cycle energetics plus the regime-selected power."""

    regime: RegimeReport
    work: float
    heat_c: float
    heat_h: float
    power: float
    rate: float
    cycle_time: float


def power_prefactor(kind: SystemKind, omega_c: float, omega_h: float,
                    temp_c: float, temp_h: float) -> tuple[RegimeReport, float]:
    """Thermodynamic factor multiplying the rate term in the per-regime power.

    Engine: (w_h - w_c)(n_h - n_c); refrigerator: w_c (n_c - n_h);
    thermal accelerator: w_c (n_h - n_c); degenerate: 0. Positive inside each
    regime's own region.
    """
    report = classify_regime(omega_c, omega_h, temp_c, temp_h)
    if report.regime is Regime.DEGENERATE:
        return report, 0.0
    n_c = thermal_occupation(kind, omega_c, temp_c)
    n_h = thermal_occupation(kind, omega_h, temp_h)
    if report.regime is Regime.ENGINE:
        return report, (omega_h - omega_c) * (n_h - n_c)
    if report.regime is Regime.REFRIGERATOR:
        return report, omega_c * (n_c - n_h)
    return report, omega_c * (n_h - n_c)


def cycle_performance(config: MachineConfig, tau: float, *,
                      approximate: bool = False,
                      allow_unstable: bool = False) -> CyclePerformance:
    """Work, heats, rate term, and regime-selected power for one cycle."""
    outcome = collide(config, tau, approximate=approximate, allow_unstable=allow_unstable)
    report = classify_regime(config.omega_c, config.omega_h, config.temp_c, config.temp_h)
    cycle_time = tau + config.t_wait
    rate = v_term(config.g, config.delta, tau, config.t_wait)
    if cycle_time == 0.0 or report.regime is Regime.DEGENERATE:
        power = 0.0
    elif report.regime is Regime.ENGINE:
        power = -outcome.work / cycle_time
    elif report.regime is Regime.REFRIGERATOR:
        power = outcome.heat_c / cycle_time
    else:
        power = -outcome.heat_c / cycle_time
    return CyclePerformance(
        regime=report,
        work=outcome.work, heat_c=outcome.heat_c, heat_h=outcome.heat_h,
        power=power, rate=rate, cycle_time=cycle_time,
    )


# ---------------------------------------------------------------------------
# Maximization over frequencies (qubits)
# ---------------------------------------------------------------------------

def _engine_power_at(kind, temp_c, temp_h, g, t_wait, eta, omega_c):
    """(power, tau_star) of the engine at fixed efficiency and cold frequency."""
    omega_h = omega_c / (1.0 - eta)
    n_c = thermal_occupation(kind, omega_c, temp_c)
    n_h = thermal_occupation(kind, omega_h, temp_h)
    prefactor = (omega_h - omega_c) * (n_h - n_c)
    delta = 0.5 * (omega_h - omega_c)
    tau_star, v_max = v_max_over_tau(g, delta, t_wait)
    return prefactor * v_max, tau_star


def _log_grid(lo, hi, count):
    step = (math.log(hi) - math.log(lo)) / (count - 1)
    return [math.exp(math.log(lo) + i * step) for i in range(count)]


def maximize_power_over_frequencies(kind: SystemKind, temp_c: float, temp_h: float,
                                    g: float, t_wait: float = 0.0,
                                    eta: float | None = None, *,
                                    n_eta: int = 200, n_omega: int = 64,
                                    omega_box: tuple[float, float] | None = None,
                                    ) -> OptimizationReport:
    """Maximize engine power over the cold frequency (and optionally efficiency).

    The hot frequency is slaved to omega_h = omega_c / (1 - eta), so fixing
    eta fixes the engine efficiency. With eta=None, an interior grid over
    (0, eta_carnot) is scanned and the best point refined; the report then
    carries the efficiency at maximum power in ``argmax["eta"]``.

    Search box: omega_c in [1e-3, 10 * T_h/T_c] * nu_c (nu_c = T_c), log
    grid of ``n_omega`` starts refined by golden-section; hitting the box
    edge is reported as status "boundary" instead of an interior maximum.
    """
    if kind.levels != 2:
        raise DomainError(
            "frequency maximization applies to qubit collections; the oscillator "
            "optimum is a zero-frequency limit point (see oscillator_high_t_power)"
        )
    if not (temp_h > temp_c > 0):
        raise DomainError("need temp_h > temp_c > 0")
    if not g > 0:
        raise DomainError("coupling must be > 0")
    eta_carnot = 1.0 - temp_c / temp_h
    nu_c = temp_c
    box = omega_box or (1e-3 * nu_c, 10.0 * (temp_h / temp_c) * nu_c)
    omega_grid = _log_grid(box[0], box[1], n_omega)

    def best_over_omega(eta_value):
        res, on_boundary, grid_probes = grid_then_golden(
            lambda w: _engine_power_at(kind, temp_c, temp_h, g, t_wait, eta_value, w)[0],
            omega_grid, rel_tol=1e-10,
        )
        return res, on_boundary, grid_probes

    if eta is not None:
        if not 0.0 < eta < eta_carnot:
            raise DomainError(f"eta must lie in (0, {eta_carnot}) for an engine")
        res, on_boundary, grid_probes = best_over_omega(eta)
        omega_c = res.x
        power, tau_star = _engine_power_at(kind, temp_c, temp_h, g, t_wait, eta, omega_c)
        return OptimizationReport(
            argmax={"omega_c": omega_c, "omega_h": omega_c / (1.0 - eta),
                    "tau": tau_star, "eta": eta},
            objective=power,
            iterations=res.iterations,
            tolerance=res.tol,
            bracket=res.bracket,
            status="boundary" if on_boundary else "converged",
            probes=grid_probes,
        )

    eta_grid = [eta_carnot * (i + 1) / (n_eta + 1) for i in range(n_eta)]
    cache: dict[float, tuple] = {}

    def power_of_eta(eta_value):
        if eta_value not in cache:
            cache[eta_value] = best_over_omega(eta_value)
        return cache[eta_value][0].fx

    res_eta, eta_boundary, eta_probes = grid_then_golden(power_of_eta, eta_grid, rel_tol=1e-9)
    eta_star = res_eta.x
    res_w, w_boundary, _ = cache[eta_star] if eta_star in cache else (best_over_omega(eta_star))
    omega_c = res_w.x
    power, tau_star = _engine_power_at(kind, temp_c, temp_h, g, t_wait, eta_star, omega_c)
    status = "boundary" if (eta_boundary or w_boundary) else "converged"
    return OptimizationReport(
        argmax={"omega_c": omega_c, "omega_h": omega_c / (1.0 - eta_star),
                "tau": tau_star, "eta": eta_star},
        objective=power,
        iterations=res_eta.iterations,
        tolerance=res_eta.tol,
        bracket=res_eta.bracket,
        status=status,
        probes=eta_probes,
    )


def power_frontier(kind: SystemKind, temp_c: float, temp_h: float, g: float,
                   t_wait: float = 0.0, *, n_eta: int = 200, n_omega: int = 64):
    """Engine power maximized at each fixed efficiency over (0, eta_carnot).

    Returns a list of per-efficiency OptimizationReport rows, uniform in eta,
    for frontier curves normalized by the caller.
    """
    eta_carnot = 1.0 - temp_c / temp_h
    rows = []
    for i in range(n_eta):
        eta = eta_carnot * (i + 1) / (n_eta + 1)
        rows.append(maximize_power_over_frequencies(
            kind, temp_c, temp_h, g, t_wait, eta, n_omega=n_omega))
    return rows


# ---------------------------------------------------------------------------
# Oscillator collections
# ---------------------------------------------------------------------------

def oscillator_high_t_power(eta: float, eta_carnot: float, v: float) -> float:
    """High-temperature oscillator engine power in units of k_B * T_c.

    Equals eta (eta_C - eta) / [(1 - eta)(1 - eta_C)] * V; its maximizer over
    eta is the Curzon-Ahlborn efficiency 1 - sqrt(1 - eta_C).
    """
    if not 0.0 < eta < eta_carnot < 1.0:
        raise DomainError("need 0 < eta < eta_carnot < 1")
    return eta * (eta_carnot - eta) / ((1.0 - eta) * (1.0 - eta_carnot)) * v


def oscillator_gap_profile(x: float, l: float) -> tuple[float, float]:
    """Occupation-gap profile f(x) and its monotonicity witness b(x).

    f(x) = x [coth(l x) - coth(x)] is 2x times the thermal occupation gap of
    two oscillators at matched ratios; b(x) = (sinh x cosh x - x)/sinh^2 x is
    increasing, which forces f' = b(lx) - b(x) < 0 for l < 1. Both use
    cancellation-free forms with exact small-x limits f -> 1/l - 1, b -> 2x/3.
    """
    if not x > 0:
        raise DomainError("x must be > 0")
    if not 0.0 < l <= 1.0:
        raise DomainError("l must lie in (0, 1]")

    def inv_expm1(y):
        return 0.0 if y >= 1400.0 else 1.0 / math.expm1(y)

    f = 2.0 * x * (inv_expm1(2.0 * l * x) - inv_expm1(2.0 * x))

    def b_witness(y):
        if y < 0.05:
            return (2.0 / 3.0) * y - (4.0 / 45.0) * y ** 3
        e2 = math.exp(-2.0 * y)
        e4 = e2 * e2
        return (1.0 - e4 - 4.0 * y * e2) / (1.0 - e2) ** 2

    return f, b_witness(x)


def oscillator_power_curve(x: float, eta: float, eta_carnot: float, g: float,
                           t_wait: float = 0.0, temp_c: float = 1.0) -> float:
    """Frequency-resolved oscillator engine power at x = omega_c / (2 T_c).

    Strictly decreasing in x at fixed (eta, eta_carnot, g, t_wait): lowering
    the frequencies always raises the power, so the oscillator optimum is the
    x -> 0 limit where the high-temperature form takes over.
    """
    if not x > 0:
        raise DomainError("x must be > 0")
    if not 0.0 < eta < eta_carnot < 1.0:
        raise DomainError("need 0 < eta < eta_carnot < 1")
    l = (1.0 - eta_carnot) / (1.0 - eta)
    f, _ = oscillator_gap_profile(x, l)
    omega_c = 2.0 * temp_c * x
    delta = 0.5 * omega_c * eta / (1.0 - eta)
    _, v_max = v_max_over_tau(g, delta, t_wait)
    return temp_c * eta / (1.0 - eta) * f * v_max


# ---------------------------------------------------------------------------
# Swap-Hamiltonian comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SwapComparison:
    """Exchange vs dedicated-swap interaction at matched spectral spread.

    ``t_swap`` is the fair swap duration (equal eigenvalue spread);
    ``threshold_g`` is the coupling above which the time-optimized exchange
    beats the full swap (closed form, valid at zero waiting time).
    """

    t_swap: float
    v_max: float
    v_swap_max: float
    v_full_swap: float
    ratio: float
    threshold_g: float
    spread_from_k: bool
    exchange_wins: bool


def swap_v_term(tau_swap: float, t_swap: float, t_wait: float = 0.0) -> float:
    """Rate term of the dedicated swap Hamiltonian: sin^2(pi tau/(2 t_S))/(tau + t_w)."""
    if not t_swap > 0:
        raise DomainError("t_swap must be > 0")
    if tau_swap < 0 or t_wait < 0:
        raise DomainError("tau_swap and t_wait must be >= 0")
    if tau_swap == 0.0:
        return 0.0
    s = math.sin(0.5 * math.pi * tau_swap / t_swap)
    return s * s / (tau_swap + t_wait)


def swap_comparison(omega_c: float, omega_h: float, g: float,
                    t_wait: float = 0.0) -> SwapComparison:
    """Compare the exchange interaction against a fair dedicated swap.

    Fairness matches the spread between extreme eigenvalues of the two
    collision Hamiltonians: t_swap = pi/(2 w_bar) when g <= sqrt(w_c w_h)
    (spread 2 w_bar) and pi/(2 k) otherwise (spread 2 k). With the swap time
    free, the swap always wins; against the *full* swap (tau = t_swap) the
    exchange wins above ``threshold_g``.
    """
    if not (omega_c > 0 and omega_h > 0):
        raise DomainError("frequencies must be > 0")
    if not g > 0:
        raise DomainError("coupling must be > 0")
    if t_wait < 0:
        raise DomainError("t_wait must be >= 0")
    omega_bar = 0.5 * (omega_c + omega_h)
    delta = 0.5 * (omega_h - omega_c)
    k = math.hypot(g, delta)
    spread_from_k = g > math.sqrt(omega_c * omega_h)  # then k > omega_bar
    t_swap = math.pi / (2.0 * k) if spread_from_k else math.pi / (2.0 * omega_bar)
    swap_rate = 0.5 * math.pi / t_swap  # k or omega_bar
    v_max = (g * g / k) * optimal_phase(k * t_wait).fx
    v_swap_max = swap_rate * optimal_phase(swap_rate * t_wait).fx
    v_full = 1.0 / (t_swap + t_wait)
    if spread_from_k:
        threshold = math.sqrt(2.0 / (ALPHA * math.pi - 2.0)) * abs(delta)
    else:
        root = math.sqrt(omega_bar ** 2 + (ALPHA * math.pi * delta) ** 2)
        threshold = math.sqrt(2.0 * omega_bar * (omega_bar + root)) / (ALPHA * math.pi)
    return SwapComparison(
        t_swap=t_swap,
        v_max=v_max,
        v_swap_max=v_swap_max,
        v_full_swap=v_full,
        ratio=v_max / v_full,
        threshold_g=threshold,
        spread_from_k=spread_from_k,
        exchange_wins=v_max > v_full,
    )


def swap_window() -> tuple[float, float]:
    """Frequency-ratio window where beating the full swap is compatible with
    g <= sqrt(w_c w_h); roughly [0.483, 2.070]."""

    def gap(ratio):
        omega_bar = 0.5 * (1.0 + ratio)
        delta = 0.5 * (ratio - 1.0)
        root = math.sqrt(omega_bar ** 2 + (ALPHA * math.pi * delta) ** 2)
        threshold_sq = 2.0 * omega_bar * (omega_bar + root) / (ALPHA * math.pi) ** 2
        return threshold_sq - ratio  # negative inside the window

    lo = brentq(gap, 0.05, 1.0, xtol=1e-12)
    hi = brentq(gap, 1.0, 20.0, xtol=1e-12)
    return lo, hi
