"""Command-line front end: experiment runners and dataset emission.

Usage: ``qtm <experiment> [--config FILE] [--set key=value]... [--out DIR]
[--threads N] [--seed S]``. Emitted quantities use the nu_c-based unit system
(nu_c = k_B T_c / hbar = machine.T_c in working units): times in 1/nu_c,
rates and frequencies in nu_c, energies in hbar*nu_c, powers in hbar*nu_c^2.

Exit codes: 0 success, 1 configuration or validation error, 2 numerical
non-convergence (diagnostics in a sidecar .log), 3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    EXPERIMENTS,
    ExperimentConfig,
    config_reference,
    grid_values,
    parse_config_text,
)
from .core import (
    Bath,
    MachineConfig,
    SystemKind,
    classify_regime,
    collide,
    collision_coefficient,
    exact_closed_form_pair,
)
from .datasets import Column, Dataset, write_csv, write_summary
from .direct_cycle import (
    ALPHA,
    Y_STAR,
    cycle_performance,
    maximize_power_over_frequencies,
    optimal_phase,
    optimize_tau,
    oscillator_gap_profile,
    oscillator_power_curve,
    power_prefactor,
    swap_comparison,
    swap_window,
    v_term,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DatasetError,
    DomainError,
    NoContractionError,
    RegimeError,
    ResourceLimitError,
    UnstableCouplingError,
    UnsupportedPairError,
)
from .mediator_cycle import (
    advantage_analysis,
    frequency_maximized_comparison,
    v_m_single,
)
from .oracle import TruncationPolicy, oracle_collision, random_collision_parameters
from .otto_compare import (
    REFERENCE_STA_TARGETS,
    figure_of_merit_chi,
    match_target_power,
    peaks_curve,
)
from .search import golden_max


@dataclass
class RunResult:
    datasets: list[tuple[str, Dataset]] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    table: str = ""
    exit_code: int = 0
    log_lines: list[str] = field(default_factory=list)


def pmap(fn, items, threads):
    """Order-preserving map, optionally over a thread pool."""
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _machine(params) -> MachineConfig:
    return MachineConfig(
        omega_c=params["machine.omega_c"],
        omega_h=params["machine.omega_h"],
        bath_c=Bath(params["machine.T_c"]),
        bath_h=Bath(params["machine.T_h"]),
        g=params["machine.g"],
        t_wait=params.get("machine.t_wait", 0.0),
        kind_c=params["machine.kind"],
        kind_h=params["machine.kind"],
    )


def _check_pair_flags(params):
    kind = params["machine.kind"]
    if not exact_closed_form_pair(kind, kind) and not params.get("machine.approximate"):
        raise ConfigError(
            f"key 'machine.kind': the closed form is approximate for {kind}; "
            f"set machine.approximate = true to proceed"
        )
    if (kind.is_oscillator and not params.get("machine.allow_unstable")
            and params["machine.g"] >= math.sqrt(
                params["machine.omega_c"] * params["machine.omega_h"])):
        raise ConfigError(
            "key 'machine.g': oscillator pair beyond the stability bound "
            "sqrt(omega_c*omega_h); set machine.allow_unstable = true to override"
        )


def _new_dataset(cfg: ExperimentConfig, columns) -> Dataset:
    return Dataset(
        experiment=cfg.kind,
        columns=[Column(*c) for c in columns],
        config_items=cfg.items(),
        seed=cfg.seed,
        threads=cfg.threads,
    )


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------

def run_sweep_tau(cfg: ExperimentConfig) -> RunResult:
    p = cfg.params
    _check_pair_flags(p)
    machine = _machine(p)
    nu = p["machine.T_c"]
    ds = _new_dataset(cfg, [
        ("tau", "1/nu_c"), ("k_tau", "1"), ("coefficient", "1"),
        ("v", "nu_c"), ("v_norm", "1"),
        ("work", "hbar*nu_c"), ("heat_c", "hbar*nu_c"), ("heat_h", "hbar*nu_c"),
        ("power", "hbar*nu_c^2"),
    ])
    if machine.g > 0:
        rep = optimize_tau(machine.g, machine.delta, machine.t_wait)
        tau_star, v_max = rep.argmax["tau"], rep.objective
    else:
        tau_star, v_max = 0.0, 0.0
    flags = {"approximate": p["machine.approximate"],
             "allow_unstable": p["machine.allow_unstable"]}
    for tau in grid_values(p, "tau"):
        perf = cycle_performance(machine, tau, **flags)
        a = collision_coefficient(machine.g, machine.delta, tau)
        ds.append(tau * nu, machine.k * tau, a,
                  perf.rate / nu, perf.rate / v_max if v_max > 0 else 0.0,
                  perf.work / nu, perf.heat_c / nu, perf.heat_h / nu,
                  perf.power / nu ** 2)
    regime = classify_regime(machine.omega_c, machine.omega_h,
                             machine.temp_c, machine.temp_h)
    summary = {
        "tau_star": tau_star * nu,
        "v_max": v_max / nu,
        "regime": regime.regime.value,
        "merit": regime.merit,
    }
    return RunResult(datasets=[("", ds)], summary=summary)


def run_optimal_time_curve(cfg: ExperimentConfig) -> RunResult:
    p = cfg.params
    ds = _new_dataset(cfg, [
        ("k_t_wait", "1"), ("k_tau_star", "1"),
        ("v_max_scaled", "1"), ("v_swap_scaled", "1"), ("swap_loss", "1"),
    ])
    grid = grid_values(p, "k_t_wait")
    rows = pmap(lambda c: (c, optimal_phase(c)), grid, cfg.threads)
    for c, res in rows:
        swap = 1.0 / (0.5 * math.pi + c)
        ds.append(c, res.x, res.fx, swap, 1.0 - swap / res.fx)
    summary = {
        "y_star": Y_STAR,
        "alpha": ALPHA,
        "k_tau_star_first": rows[0][1].x,
        "k_tau_star_last": rows[-1][1].x,
    }
    return RunResult(datasets=[("", ds)], summary=summary)


def run_frontier(cfg: ExperimentConfig) -> RunResult:
    p = cfg.params
    temp_c, temp_h = p["machine.T_c"], p["machine.T_h"]
    kind, g, t_wait = p["machine.kind"], p["machine.g"], p["machine.t_wait"]
    if kind.levels != 2:
        raise ConfigError("key 'machine.kind': frontier maximization needs qubits")
    if not g > 0:
        raise ConfigError("key 'machine.g': must be > 0")
    nu = temp_c
    n_omega = p["search.n_omega"]
    eta_carnot = 1.0 - temp_c / temp_h
    n_eta = p["grid.eta.count"]
    etas = [eta_carnot * (i + 1) / (n_eta + 1) for i in range(n_eta)]
    reports = pmap(
        lambda eta: maximize_power_over_frequencies(
            kind, temp_c, temp_h, g, t_wait, eta, n_omega=n_omega),
        etas, cfg.threads)
    peak = maximize_power_over_frequencies(
        kind, temp_c, temp_h, g, t_wait, None,
        n_eta=max(n_eta, 64), n_omega=n_omega)
    ds = _new_dataset(cfg, [
        ("eta", "1"), ("power", "hbar*nu_c^2"), ("power_norm", "1"),
        ("omega_c", "nu_c"), ("omega_h", "nu_c"), ("tau", "1/nu_c"),
        ("boundary", "1"),
    ])
    for eta, rep in zip(etas, reports):
        ds.append(eta, rep.objective / nu ** 2, rep.objective / peak.objective,
                  rep.argmax["omega_c"] / nu, rep.argmax["omega_h"] / nu,
                  rep.argmax["tau"] * nu, rep.status == "boundary")
    summary = {
        "eta_at_max_power": peak.argmax["eta"],
        "power_max": peak.objective / nu ** 2,
        "omega_c_at_max": peak.argmax["omega_c"] / nu,
        "tau_at_max": peak.argmax["tau"] * nu,
        "eta_curzon_ahlborn": 1.0 - math.sqrt(temp_c / temp_h),
        "eta_carnot": eta_carnot,
        "status": peak.status,
    }
    return RunResult(datasets=[("", ds)], summary=summary)


def run_freq_maximize(cfg: ExperimentConfig) -> RunResult:
    p = cfg.params
    temp_c, temp_h = p["machine.T_c"], p["machine.T_h"]
    kind = p["machine.kind"]
    if kind.levels != 2:
        raise ConfigError("key 'machine.kind': frequency maximization needs qubits")
    if not p["machine.g"] > 0:
        raise ConfigError("key 'machine.g': must be > 0")
    nu = temp_c
    rep = maximize_power_over_frequencies(
        kind, temp_c, temp_h, p["machine.g"], p["machine.t_wait"], None,
        n_eta=p["search.n_eta"], n_omega=p["search.n_omega"])
    ds = _new_dataset(cfg, [
        ("eta", "1"), ("omega_c", "nu_c"), ("omega_h", "nu_c"),
        ("tau", "1/nu_c"), ("power", "hbar*nu_c^2"),
        ("eta_curzon_ahlborn", "1"), ("eta_carnot", "1"),
    ])
    eta_ca = 1.0 - math.sqrt(temp_c / temp_h)
    eta_carnot = 1.0 - temp_c / temp_h
    ds.append(rep.argmax["eta"], rep.argmax["omega_c"] / nu,
              rep.argmax["omega_h"] / nu, rep.argmax["tau"] * nu,
              rep.objective / nu ** 2, eta_ca, eta_carnot)
    summary = {
        "eta_at_max_power": rep.argmax["eta"],
        "power_max": rep.objective / nu ** 2,
        "omega_c_at_max": rep.argmax["omega_c"] / nu,
        "omega_h_at_max": rep.argmax["omega_h"] / nu,
        "tau_at_max": rep.argmax["tau"] * nu,
        "eta_curzon_ahlborn": eta_ca,
        "eta_carnot": eta_carnot,
        "status": rep.status,
        "iterations": rep.iterations,
        "exceeds_curzon_ahlborn": rep.argmax["eta"] > eta_ca,
    }
    return RunResult(datasets=[("", ds)], summary=summary)


def run_mediator_compare(cfg: ExperimentConfig) -> RunResult:
    p = cfg.params
    nu = p["machine.T_c"]
    delta_m = 0.25 * abs(p["machine.omega_h"] - p["machine.omega_c"])
    phases = grid_values(p, "phase")
    ds = _new_dataset(cfg, [
        ("g_ratio", "1"), ("g_m", "nu_c"), ("u", "1"), ("k_tau", "1"),
        ("tau", "1/nu_c"), ("v_m", "nu_c"), ("v_m_norm", "1"),
    ])
    summary_peaks = {}
    for ratio in p["mediator.g_ratios"]:
        g_m = ratio * delta_m
        k_m = math.hypot(g_m, delta_m)
        peak = golden_max(lambda y: v_m_single(g_m, delta_m, y / k_m),
                          1e-9, math.pi, rel_tol=1e-12)
        for u in p["mediator.u_values"]:
            for phase in phases:
                tau = phase / k_m
                a = collision_coefficient(g_m, delta_m, tau)
                a_u = a ** u
                v = (1.0 - a_u) / (2.0 * u * tau * (1.0 + a_u))
                ds.append(ratio, g_m / nu, u, phase, tau * nu,
                          v / nu, v / peak.fx)
        summary_peaks[repr(float(ratio))] = {
            "tau_star": peak.x / k_m * nu,
            "v_m_max": peak.fx / nu,
        }
    return RunResult(datasets=[("", ds)],
                     summary={"delta_m": delta_m / nu, "peaks": summary_peaks})


def run_advantage(cfg: ExperimentConfig) -> RunResult:
    p = cfg.params
    if not exact_closed_form_pair(p["machine.kind"], p["machine.kind"]):
        raise ConfigError("key 'machine.kind': the advantage comparison supports "
                          "qubit or oscillator collections")
    machine = _machine(p)
    nu = p["machine.T_c"]
    rows = advantage_analysis(
        machine.omega_c, machine.omega_h, machine.temp_c, machine.temp_h,
        machine.g, grid_values(p, "t_wait"), kind=p["machine.kind"])
    ds = _new_dataset(cfg, [
        ("t_wait", "1/nu_c"), ("v_max_direct", "nu_c"), ("tau_star_direct", "1/nu_c"),
        ("v_m_max", "nu_c"), ("tau_m_star", "1/nu_c"),
        ("power_direct", "hbar*nu_c^2"), ("power_mediator", "hbar*nu_c^2"),
        ("mediator_wins", "1"), ("within_validity", "1"), ("advantage", "1"),
    ])
    for r in rows:
        ds.append(r.t_wait * nu, r.v_max_direct / nu, r.tau_star_direct * nu,
                  r.v_m_max / nu, r.tau_m_star * nu,
                  r.power_direct / nu ** 2, r.power_mediator / nu ** 2,
                  r.mediator_wins, r.within_validity, r.advantage)
    window = [r.t_wait * nu for r in rows if r.advantage]
    summary = {
        "tau_m_star": rows[0].tau_m_star * nu if rows else None,
        "advantage_window": [min(window), max(window)] if window else None,
    }
    datasets = [("", ds)]
    if p["advantage.freq_maximized"]:
        gs = grid_values(p, "g")
        comps = pmap(
            lambda g: frequency_maximized_comparison(
                machine.temp_c, machine.temp_h, g, kind=p["machine.kind"],
                n_eta=p["search.n_eta"], n_omega=p["search.n_omega"]),
            gs, cfg.threads)
        ds2 = _new_dataset(cfg, [
            ("g", "nu_c"), ("eta_direct", "1"), ("eta_mediator", "1"),
            ("power_direct", "hbar*nu_c^2"), ("power_mediator", "hbar*nu_c^2"),
            ("power_ratio", "1"), ("tau_m_star", "1/nu_c"),
        ])
        for g, comp in zip(gs, comps):
            ds2.append(g / nu, comp.direct.argmax["eta"], comp.mediator.argmax["eta"],
                       comp.direct.objective / nu ** 2, comp.mediator.objective / nu ** 2,
                       comp.power_ratio, comp.tau_m_star * nu)
        datasets.append(("_freq", ds2))
    return RunResult(datasets=datasets, summary=summary)


def run_otto_compare(cfg: ExperimentConfig) -> RunResult:
    p = cfg.params
    if not exact_closed_form_pair(p["machine.kind"], p["machine.kind"]):
        raise ConfigError("key 'machine.kind': otto-compare supports qubit or "
                          "oscillator collections")
    machine = _machine(p)
    nu = p["machine.T_c"]
    kind, merit = p["machine.kind"], p["otto.merit"]
    delta = machine.delta
    stability_limit = math.sqrt(machine.omega_c * machine.omega_h)
    if merit == "power":
        _, prefactor = power_prefactor(kind, machine.omega_c, machine.omega_h,
                                       machine.temp_c, machine.temp_h)

        def value(rate_term):
            return prefactor * rate_term
    else:
        def value(rate_term):
            return figure_of_merit_chi(machine.omega_c, machine.omega_h,
                                       machine.temp_c, machine.temp_h,
                                       1.0, lambda _tau: rate_term, kind)

    ds = _new_dataset(cfg, [
        ("g", "nu_c"), ("tau", "1/nu_c"),
        ("value_direct", "hbar*nu_c^2"), ("value_ideal", "hbar*nu_c^2"),
        ("stable", "1"),
    ])
    taus = grid_values(p, "tau")
    for g in p["otto.couplings"]:
        stable = (not kind.is_oscillator) or g < stability_limit
        for tau in taus:
            ds.append(g / nu, tau * nu,
                      value(v_term(g, delta, tau, machine.t_wait)) / nu ** 2,
                      value(1.0 / tau) / nu ** 2, stable)
    points = peaks_curve(grid_values(p, "g"), machine.omega_c, machine.omega_h,
                         machine.temp_c, machine.temp_h, kind)
    ds_peaks = _new_dataset(cfg, [
        ("g", "nu_c"), ("tau_star", "1/nu_c"), ("v_max", "nu_c"),
        ("value_max", "hbar*nu_c^2"), ("stable", "1"),
    ])
    for pt in points:
        peak_value = pt.power_max if merit == "power" else value(pt.v_max)
        ds_peaks.append(pt.g / nu, pt.tau_star * nu, pt.v_max / nu,
                        peak_value / nu ** 2,
                        (not kind.is_oscillator) or pt.g < stability_limit)
    summary = {
        "merit": merit,
        "stability_limit": stability_limit / nu,
        "reference_sta_targets": dict(REFERENCE_STA_TARGETS),
    }
    if p["otto.target"] > 0:
        match = match_target_power(
            p["otto.target"] * nu ** 2, machine.omega_c, machine.omega_h,
            machine.temp_c, machine.temp_h, kind, merit=merit)
        summary["target_match"] = {
            "target": p["otto.target"],
            "g": match.g / nu,
            "achieved": match.achieved / nu ** 2,
            "tau_star": match.tau_star * nu,
            "stable": match.stable,
        }
    return RunResult(datasets=[("", ds), ("_peaks", ds_peaks)], summary=summary)


def run_swap_compare(cfg: ExperimentConfig) -> RunResult:
    p = cfg.params
    nu = p["machine.T_c"]
    omega_c, omega_h = p["machine.omega_c"], p["machine.omega_h"]
    t_wait = p["machine.t_wait"]
    ds = _new_dataset(cfg, [
        ("g", "nu_c"), ("t_swap", "1/nu_c"), ("v_max", "nu_c"),
        ("v_swap_max", "nu_c"), ("v_full_swap", "nu_c"), ("ratio", "1"),
        ("threshold_g", "nu_c"), ("spread_from_k", "1"), ("exchange_wins", "1"),
    ])
    for g in grid_values(p, "g"):
        comp = swap_comparison(omega_c, omega_h, g, t_wait)
        ds.append(g / nu, comp.t_swap * nu, comp.v_max / nu, comp.v_swap_max / nu,
                  comp.v_full_swap / nu, comp.ratio, comp.threshold_g / nu,
                  comp.spread_from_k, comp.exchange_wins)
    lo, hi = swap_window()
    summary = {
        "threshold_coefficient": math.sqrt(2.0 / (ALPHA * math.pi - 2.0)),
        "ratio_prefactor": 0.5 * ALPHA * math.pi,
        "frequency_ratio_window": [lo, hi],
    }
    return RunResult(datasets=[("", ds)], summary=summary)


_PAIR_DEFAULTS = {
    # (kind_c, kind_h, x_range, tolerance)
    "qubit": (SystemKind.qubit(), SystemKind.qubit(), (0.1, 10.0), 1e-10),
    "oscillator": (SystemKind.oscillator(), SystemKind.oscillator(), (1.0, 10.0), 1e-6),
    "qubit-oscillator": (SystemKind.qubit(), SystemKind.oscillator(), (0.5, 5.0), 0.0),
}


def run_validate_oracle(cfg: ExperimentConfig) -> RunResult:
    p = cfg.params
    kind_c, kind_h, x_default, tol_default = _PAIR_DEFAULTS[p["validate.pair"]]
    x_lo = p["validate.x_min"] or x_default[0]
    x_hi = p["validate.x_max"] or x_default[1]
    tolerance = p["validate.tolerance"]
    if tolerance < 0:
        tolerance = tol_default
    any_osc = kind_c.is_oscillator or kind_h.is_oscillator
    trunc = TruncationPolicy(
        level_count=p["oracle.levels"] or None,
        tail_mass_tolerance=p["oracle.tail_tolerance"],
        dim_cap=p["oracle.dim_cap"],
    )
    rng = np.random.default_rng(cfg.seed)
    points = [random_collision_parameters(
        rng, x_range=(x_lo, x_hi),
        g_cap=p["validate.g_cap"] if any_osc else None,
    ) for _ in range(p["validate.points"])]

    def evaluate(point):
        machine = MachineConfig(
            omega_c=point["omega_c"], omega_h=point["omega_h"],
            bath_c=Bath(point["temp_c"]), bath_h=Bath(point["temp_h"]),
            g=point["g"], kind_c=kind_c, kind_h=kind_h,
        )
        res = oracle_collision(machine, point["tau"], trunc)
        out = collide(machine, point["tau"], approximate=True, allow_unstable=True)
        return res, out

    results = pmap(evaluate, points, cfg.threads)
    ds = _new_dataset(cfg, [
        ("omega_h", "1"), ("g", "1"), ("tau", "1"),
        ("temp_c", "1"), ("temp_h", "1"),
        ("n_h_formula", "1"), ("n_h_oracle", "1"), ("abs_diff", "1"),
        ("certified", "1"), ("levels_c", "1"), ("levels_h", "1"),
    ])
    max_diff = 0.0
    uncertified = 0
    log_lines = []
    for point, (res, out) in zip(points, results):
        diff = abs(out.n_h_post - res.outcome.n_h_post)
        ds.append(point["omega_h"], point["g"], point["tau"],
                  point["temp_c"], point["temp_h"],
                  out.n_h_post, res.outcome.n_h_post, diff,
                  res.certified, res.levels_c, res.levels_h)
        if res.certified:
            max_diff = max(max_diff, diff)
        else:
            uncertified += 1
            log_lines.append(
                f"uncertified point: omega_h={point['omega_h']!r} g={point['g']!r} "
                f"tau={point['tau']!r} doubling_delta={res.doubling_delta!r} "
                f"tail_mass={res.tail_mass!r}"
            )
    certified = len(points) - uncertified
    if uncertified:
        status = "UNCONVERGED"
        exit_code = 2
    elif tolerance > 0:
        status = "PASS" if max_diff <= tolerance else "FAIL"
        exit_code = 0 if status == "PASS" else 1
    else:
        status = "INFO"
        exit_code = 0
    header = f"{'pair':<18}{'points':>8}{'certified':>11}{'max|dn_h|':>14}{'tolerance':>12}  status"
    line = (f"{p['validate.pair']:<18}{len(points):>8}{certified:>11}"
            f"{max_diff:>14.3e}{tolerance:>12.1e}  {status}")
    summary = {
        "pair": p["validate.pair"],
        "points": len(points),
        "certified": certified,
        "max_abs_diff": max_diff,
        "tolerance": tolerance,
        "status": status,
    }
    return RunResult(datasets=[("", ds)], summary=summary,
                     table=header + "\n" + line, exit_code=exit_code,
                     log_lines=log_lines)


def run_oscillator_profile(cfg: ExperimentConfig) -> RunResult:
    p = cfg.params
    nu = p["machine.T_c"]
    eta = p["profile.eta"]
    eta_carnot = 1.0 - p["machine.T_c"] / p["machine.T_h"]
    xs = grid_values(p, "x")
    ds = _new_dataset(cfg, [
        ("l", "1"), ("x", "1"), ("f", "1"), ("b", "1"), ("p_tilde", "hbar*nu_c^2"),
    ])
    for l in p["profile.l_values"]:
        for x in xs:
            f, b = oscillator_gap_profile(x, l)
            power = oscillator_power_curve(
                x, eta, eta_carnot, p["machine.g"], p["machine.t_wait"],
                temp_c=p["machine.T_c"])
            ds.append(l, x, f, b, power / nu ** 2)
    summary = {
        "eta": eta,
        "eta_carnot": eta_carnot,
        "l_for_power_column": (1.0 - eta_carnot) / (1.0 - eta),
    }
    return RunResult(datasets=[("", ds)], summary=summary)


RUNNERS = {
    "sweep-tau": run_sweep_tau,
    "optimal-time-curve": run_optimal_time_curve,
    "frontier": run_frontier,
    "freq-maximize": run_freq_maximize,
    "mediator-compare": run_mediator_compare,
    "advantage": run_advantage,
    "otto-compare": run_otto_compare,
    "swap-compare": run_swap_compare,
    "validate-oracle": run_validate_oracle,
    "oscillator-profile": run_oscillator_profile,
}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtm",
        description="Two-stroke quantum thermal machine experiments. "
                    "Datasets are CSV files with '# '-prefixed provenance headers; "
                    "quantities are emitted in nu_c-based units (nu_c = machine.T_c).",
    )
    parser.add_argument("experiment", choices=sorted(EXPERIMENTS),
                        help="experiment kind")
    parser.add_argument("--config", type=Path, default=None,
                        help="key = value configuration file")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override one configuration key")
    parser.add_argument("--out", type=Path, default=Path("."),
                        help="output directory (default: current)")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: QTM_THREADS or 1)")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for randomized experiments (default 0)")
    parser.add_argument("--help-config", action="store_true",
                        help="print the experiment's configuration keys and exit")
    parser.add_argument("--version", action="version", version=f"qtm {__version__}")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.help_config:
        print(config_reference(args.experiment))
        return 0
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("QTM_THREADS", "1"))
    if threads < 1:
        print("error: thread count must be >= 1", file=sys.stderr)
        return 1
    basename = ""
    out_dir = args.out
    try:
        text = ""
        if args.config is not None:
            text = args.config.read_text(encoding="utf-8")
        cfg = parse_config_text(args.experiment, text, args.overrides)
        cfg.seed = args.seed
        cfg.threads = threads
        basename = cfg.params.get("output.basename") or cfg.kind
        result = RUNNERS[cfg.kind](cfg)
        out_dir.mkdir(parents=True, exist_ok=True)
        for suffix, ds in result.datasets:
            write_csv(ds, out_dir / f"{basename}{suffix}.csv")
        if cfg.params.get("output.summary", True):
            write_summary(out_dir / f"{basename}.json", cfg.kind, cfg.seed,
                          cfg.threads, cfg.items(), result.summary)
        if result.table:
            print(result.table)
        if result.log_lines:
            log_path = out_dir / f"{basename}.log"
            log_path.write_text("\n".join(result.log_lines) + "\n", encoding="utf-8")
            print(f"diagnostics written to {log_path}", file=sys.stderr)
        return result.exit_code
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except (UnsupportedPairError, UnstableCouplingError, DomainError,
            RegimeError, NoContractionError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except (ConvergenceError, ResourceLimitError, DatasetError) as exc:
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            log_path = out_dir / f"{basename or args.experiment}.log"
            diag = getattr(exc, "diagnostics", {})
            lines = [f"{type(exc).__name__}: {exc}"]
            lines += [f"{k} = {v!r}" for k, v in diag.items()]
            log_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            print(f"numerical failure, diagnostics in {log_path}", file=sys.stderr)
        except OSError:
            print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
