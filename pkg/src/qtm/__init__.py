"""Two-stroke quantum thermal machines: exact collision cycles and their power."""

from .core import (
    Bath,
    CollisionOutcome,
    MachineConfig,
    Regime,
    RegimeReport,
    SystemKind,
    classify_regime,
    collide,
    collision_coefficient,
    thermal_occupation,
)
from .direct_cycle import (
    ALPHA,
    Y_STAR,
    CyclePerformance,
    OptimizationReport,
    SwapComparison,
    cycle_performance,
    maximize_power_over_frequencies,
    optimize_tau,
    oscillator_gap_profile,
    oscillator_high_t_power,
    swap_comparison,
    swap_v_term,
    v_term,
)
from .mediator_cycle import (
    MediatorConfig,
    SteadyCycleState,
    advantage_analysis,
    optimize_mediator,
    steady_cycle,
    stroke_update,
    v_m_general,
    v_m_single,
)
from .oracle import TruncationPolicy, build_total_hamiltonian, evolve_mean_occupation, oracle_collision
from .otto_compare import (
    StabilityReport,
    figure_of_merit_chi,
    ideal_otto_power,
    oscillator_stability,
    peaks_curve,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHA",
    "Bath",
    "CollisionOutcome",
    "CyclePerformance",
    "MachineConfig",
    "MediatorConfig",
    "OptimizationReport",
    "Regime",
    "RegimeReport",
    "StabilityReport",
    "SteadyCycleState",
    "SwapComparison",
    "SystemKind",
    "TruncationPolicy",
    "Y_STAR",
    "__version__",
    "advantage_analysis",
    "build_total_hamiltonian",
    "classify_regime",
    "collide",
    "collision_coefficient",
    "cycle_performance",
    "evolve_mean_occupation",
    "figure_of_merit_chi",
    "ideal_otto_power",
    "maximize_power_over_frequencies",
    "optimize_mediator",
    "optimize_tau",
    "oracle_collision",
    "oscillator_gap_profile",
    "oscillator_high_t_power",
    "oscillator_stability",
    "peaks_curve",
    "steady_cycle",
    "stroke_update",
    "swap_comparison",
    "swap_v_term",
    "thermal_occupation",
    "v_m_general",
    "v_m_single",
    "v_term",
]
