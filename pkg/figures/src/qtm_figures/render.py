"""Figure builders, one per supported dataset kind.

Rendering is read-only: curves come straight from dataset columns, and the
only arithmetic allowed is the pair of efficiency markers on the frontier
figure, whose positions are analytically forced by the temperatures in the
provenance header (eta_CA = 1 - sqrt(T_c/T_h), eta_C = 1 - T_c/T_h). Peak
annotations, when requested, are read from the run's JSON summary. Output is
pixel-stable: fixed style, fixed dpi, and scrubbed PNG metadata.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .io import DatasetFile, SchemaError, read_dataset  # noqa: E402

_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
}
_METADATA = {"Software": "qtm-fig"}


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    data_paths: tuple
    out_path: str
    summary_path: str | None = None


@dataclass
class RenderReport:
    out_path: str
    markers: dict = field(default_factory=dict)


def _check_kind(spec: FigureSpec, ds: DatasetFile):
    if ds.experiment != spec.kind:
        raise SchemaError(
            f"{ds.path}: dataset of kind {ds.experiment!r} cannot feed the "
            f"{spec.kind!r} figure"
        )


def _load_summary(spec: FigureSpec):
    if spec.summary_path is None:
        return None
    with open(spec.summary_path, "r", encoding="utf-8") as fh:
        return json.load(fh).get("summary", {})


def _render_optimal_time_curve(spec, datasets, report):
    ds = datasets[0]
    ds.require_columns(["k_t_wait", "k_tau_star", "v_max_scaled", "v_swap_scaled"])
    fig, ax = plt.subplots()
    ax.set_xscale("log")
    ax.plot(ds.columns["k_t_wait"], ds.columns["k_tau_star"], color="black",
            label="optimal phase")
    ax.axhline(math.pi / 2, color="gray", linestyle=":", linewidth=0.9)
    ax.set_xlabel("dimensionless waiting time")
    ax.set_ylabel("optimal collision phase")
    ax2 = ax.twinx()
    ax2.plot(ds.columns["k_t_wait"], ds.columns["v_max_scaled"], color="tab:blue",
             linestyle="--", label="peak rate (scaled)")
    ax2.plot(ds.columns["k_t_wait"], ds.columns["v_swap_scaled"], color="tab:red",
             linestyle=":", label="half-swap rate (scaled)")
    ax2.set_ylabel("scaled rate term")
    ax2.grid(False)
    handles, labels = ax.get_legend_handles_labels()
    h2, l2 = ax2.get_legend_handles_labels()
    ax.legend(handles + h2, labels + l2, loc="center right")
    report.markers["half_swap_phase"] = math.pi / 2
    return fig


def _render_sweep_tau(spec, datasets, report):
    ds = datasets[0]
    ds.require_columns(["k_tau", "v_norm"])
    fig, ax = plt.subplots()
    ax.plot(ds.columns["k_tau"], ds.columns["v_norm"], color="tab:blue")
    ax.set_xlabel("collision phase")
    ax.set_ylabel("rate term / peak")
    ax.set_ylim(0.0, 1.05)
    return fig


def _render_frontier(spec, datasets, report):
    ds = datasets[0]
    ds.require_columns(["eta", "power_norm"])
    temp_c = ds.config_float("machine.T_c")
    temp_h = ds.config_float("machine.T_h")
    eta_ca = 1.0 - math.sqrt(temp_c / temp_h)
    eta_carnot = 1.0 - temp_c / temp_h
    fig, ax = plt.subplots()
    ax.plot(ds.columns["eta"], ds.columns["power_norm"], color="tab:blue")
    ax.axvline(eta_ca, color="gray", linestyle="--", linewidth=1.0)
    ax.axvline(eta_carnot, color="black", linestyle="-", linewidth=1.0)
    summary = _load_summary(spec)
    if summary and "eta_at_max_power" in summary:
        ax.plot([summary["eta_at_max_power"]], [1.0], marker="o",
                color="tab:red", markersize=4)
        report.markers["eta_at_max_power"] = summary["eta_at_max_power"]
    ax.set_xlabel("engine efficiency")
    ax.set_ylabel("normalized maximum power")
    report.markers["eta_curzon_ahlborn"] = eta_ca
    report.markers["eta_carnot"] = eta_carnot
    return fig


def _render_mediator_compare(spec, datasets, report):
    ds = datasets[0]
    ds.require_columns(["g_ratio", "u", "k_tau", "v_m_norm"])
    fig, ax = plt.subplots()
    styles = {1: "-", 2: "--", 4: ":"}
    ratios = sorted(set(ds.columns["g_ratio"]))
    colors = plt.cm.viridis([i / max(len(ratios) - 1, 1) for i in range(len(ratios))])
    for color, ratio in zip(colors, ratios):
        for u in sorted(set(ds.columns["u"])):
            mask = (ds.columns["g_ratio"] == ratio) & (ds.columns["u"] == u)
            if not mask.any():
                continue
            ax.plot(ds.columns["k_tau"][mask], ds.columns["v_m_norm"][mask],
                    color=color, linestyle=styles.get(int(u), "-."),
                    label=f"coupling ratio {ratio:g}, {int(u)} collision(s)")
    ax.set_xlabel("stroke phase")
    ax.set_ylabel("mediator rate term / peak")
    ax.legend(fontsize=6)
    return fig


def _render_advantage(spec, datasets, report):
    ds = datasets[0]
    ds.require_columns(["t_wait", "v_max_direct", "v_m_max", "tau_m_star"])
    fig, ax = plt.subplots()
    ax.set_xscale("log")
    ax.plot(ds.columns["t_wait"], ds.columns["v_max_direct"], color="tab:blue",
            label="direct cycle peak rate")
    v_m = float(ds.columns["v_m_max"][0])
    tau_m = float(ds.columns["tau_m_star"][0])
    ax.axhline(v_m, color="tab:red", linestyle="--", label="mediator peak rate")
    ax.axvline(tau_m, color="gray", linestyle=":", label="mediator optimal time")
    ax.set_xlabel("waiting time")
    ax.set_ylabel("rate term")
    ax.legend(fontsize=7)
    report.markers["v_m_max"] = v_m
    report.markers["tau_m_star"] = tau_m
    return fig


def _render_otto_compare(spec, datasets, report):
    ds = datasets[0]
    ds.require_columns(["g", "tau", "value_direct", "value_ideal"])
    fig, ax = plt.subplots()
    gs = sorted(set(ds.columns["g"]))
    colors = plt.cm.plasma([i / max(len(gs) - 1, 1) for i in range(len(gs))])
    for color, g in zip(colors, gs):
        mask = ds.columns["g"] == g
        ax.plot(ds.columns["tau"][mask], ds.columns["value_direct"][mask],
                color=color, label=f"coupling {g:g}")
    mask0 = ds.columns["g"] == gs[0]
    ax.plot(ds.columns["tau"][mask0], ds.columns["value_ideal"][mask0],
            color="black", linestyle=":", label="adiabatic ceiling")
    for extra in datasets[1:]:
        extra.require_columns(["tau_star", "value_max"])
        ax.plot(extra.columns["tau_star"], extra.columns["value_max"],
                color="tab:blue", linestyle="--", label="peaks curve")
    ax.set_xlabel("cycle time")
    ax.set_ylabel("power" if "chi" not in ds.config.get("otto.merit", "power")
                  else "figure of merit")
    ax.set_xlim(left=0.0)
    top = float(max(ds.columns["value_direct"])) * 3.0
    if top > 0:
        ax.set_ylim(0.0, top)
    ax.legend(fontsize=7)
    return fig


FIGURE_KINDS = {
    "optimal-time-curve": _render_optimal_time_curve,
    "sweep-tau": _render_sweep_tau,
    "frontier": _render_frontier,
    "mediator-compare": _render_mediator_compare,
    "advantage": _render_advantage,
    "otto-compare": _render_otto_compare,
}


def render(spec: FigureSpec) -> RenderReport:
    """Render one figure kind from its dataset file(s) into a PNG."""
    if spec.kind not in FIGURE_KINDS:
        raise SchemaError(
            f"unknown figure kind {spec.kind!r}; choose from "
            f"{', '.join(sorted(FIGURE_KINDS))}"
        )
    if not spec.data_paths:
        raise SchemaError("at least one dataset file is required")
    datasets = [read_dataset(p) for p in spec.data_paths]
    _check_kind(spec, datasets[0])
    report = RenderReport(out_path=spec.out_path)
    with plt.rc_context(_STYLE):
        fig = FIGURE_KINDS[spec.kind](spec, datasets, report)
        try:
            fig.savefig(spec.out_path, format="png", metadata=_METADATA)
        finally:
            plt.close(fig)
    return report
