"""Machine model shared by both cycles.

Working units: hbar = k_B = 1, so frequencies, temperatures, couplings and
rates share a single energy unit. Species with evenly spaced levels are
described by a single frequency; ladder operators carry a hard cutoff at the
top level, which reduces to the usual qubit and harmonic-oscillator algebra
for 2 levels and for no cutoff, respectively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, UnstableCouplingError, UnsupportedPairError

_EXP_MAX = 700.0  # exp() overflow guard; beyond this every occupation is 0


@dataclass(frozen=True)
class SystemKind:
    """Working-substance species: finite evenly spaced ladder or ideal oscillator.

    ``levels`` is the Hilbert-space dimension for a finite ladder and None for
    the ideal harmonic oscillator. A two-level ladder is a qubit; equality of
    SystemKind values makes ``finite(2) == qubit()`` hold by construction.
    """

    levels: int | None

    def __post_init__(self):
        if self.levels is not None and (not isinstance(self.levels, int) or self.levels < 2):
            raise DomainError(f"level count must be an integer >= 2, got {self.levels!r}")

    @classmethod
    def qubit(cls) -> "SystemKind":
        return cls(2)

    @classmethod
    def oscillator(cls) -> "SystemKind":
        return cls(None)

    @classmethod
    def finite(cls, levels: int) -> "SystemKind":
        return cls(levels)

    @property
    def is_oscillator(self) -> bool:
        return self.levels is None

    @property
    def boundary_dim(self) -> int:
        """The d value in [a, a+] = 1 - d |d-1><d-1|: the dimension, 0 for oscillators."""
        return 0 if self.levels is None else self.levels

    def __str__(self) -> str:
        if self.levels is None:
            return "oscillator"
        if self.levels == 2:
            return "qubit"
        return f"finite:{self.levels}"

    @classmethod
    def parse(cls, text: str) -> "SystemKind":
        t = text.strip().lower()
        if t == "qubit":
            return cls.qubit()
        if t == "oscillator":
            return cls.oscillator()
        if t.startswith("finite:"):
            try:
                return cls.finite(int(t.split(":", 1)[1]))
            except ValueError as exc:
                raise DomainError(f"bad level count in {text!r}") from exc
        raise DomainError(f"unknown system kind {text!r} (qubit | oscillator | finite:N)")


@dataclass(frozen=True)
class Bath:
    """Ideal reset bath; repeatedly restores its system to the Gibbs state."""

    temperature: float

    def __post_init__(self):
        if not self.temperature > 0:
            raise DomainError(f"bath temperature must be > 0, got {self.temperature}")


@dataclass(frozen=True)
class MachineConfig:
    """Full parameter point of the direct two-stroke machine."""

    omega_c: float
    omega_h: float
    bath_c: Bath
    bath_h: Bath
    g: float
    t_wait: float = 0.0
    kind_c: SystemKind = SystemKind.qubit()
    kind_h: SystemKind = SystemKind.qubit()

    def __post_init__(self):
        if not (self.omega_c > 0 and self.omega_h > 0):
            raise DomainError("frequencies must be > 0")
        if self.g < 0:
            raise DomainError("coupling must be >= 0")
        if self.t_wait < 0:
            raise DomainError("waiting time must be >= 0")

    @property
    def delta(self) -> float:
        """Half detuning (omega_h - omega_c) / 2."""
        return 0.5 * (self.omega_h - self.omega_c)

    @property
    def k(self) -> float:
        """Generalized Rabi rate sqrt(delta^2 + g^2)."""
        return math.hypot(self.delta, self.g)

    @property
    def temp_c(self) -> float:
        return self.bath_c.temperature

    @property
    def temp_h(self) -> float:
        return self.bath_h.temperature


class Regime(Enum):
    ENGINE = "engine"
    REFRIGERATOR = "refrigerator"
    HEAT_PUMP = "heat-pump"
    THERMAL_ACCELERATOR = "thermal-accelerator"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class RegimeReport:
    """Working regime and its figure of merit (efficiency or COP).

    ``merit`` is None in the degenerate case where the usual ratios are 0/0.
    In the refrigerator region the same cycle also acts as a heat pump, so its
    alternative COP omega_h / (omega_h - omega_c) is carried alongside.
    """

    regime: Regime
    merit: float | None
    cop_heat_pump: float | None = None


@dataclass(frozen=True)
class CollisionOutcome:
    """First moments and energy bookkeeping of one collision + rethermalization.

    Signs: ``work`` is the external switching work (negative when extracted),
    ``heat_c``/``heat_h`` are positive when energy flows from the bath into
    the system during rethermalization.
    """

    coefficient: float
    n_c_th: float
    n_h_th: float
    n_c_post: float
    n_h_post: float
    work: float
    heat_c: float
    heat_h: float


# ---------------------------------------------------------------------------
# Thermal occupations
# ---------------------------------------------------------------------------

def thermal_occupation(kind: SystemKind, omega: float, temperature: float) -> float:
    """Mean excitation number of the Gibbs state at the given frequency/temperature.

    Qubit: 1/(e^x + 1); oscillator: 1/(e^x - 1); N-level ladder: truncated
    Gibbs average, all with x = omega/temperature.
    """
    if not omega > 0:
        raise DomainError(f"frequency must be > 0, got {omega}")
    if not temperature > 0:
        raise DomainError(f"temperature must be > 0, got {temperature}")
    x = omega / temperature
    if kind.is_oscillator:
        if x >= _EXP_MAX:
            return 0.0
        return 1.0 / math.expm1(x)
    if x >= _EXP_MAX:
        return 0.0
    if kind.levels == 2:
        return 1.0 / (math.exp(x) + 1.0)
    n = np.arange(kind.levels, dtype=float)
    weights = np.exp(-n * x)
    return float(np.average(n, weights=weights))


def thermal_weights(levels: int, omega: float, temperature: float) -> np.ndarray:
    """Normalized Gibbs populations over the lowest ``levels`` ladder states."""
    if levels < 2:
        raise DomainError("levels must be >= 2")
    if not (omega > 0 and temperature > 0):
        raise DomainError("frequency and temperature must be > 0")
    n = np.arange(levels, dtype=float)
    w = np.exp(-n * (omega / temperature))
    return w / w.sum()


# ---------------------------------------------------------------------------
# Collision map
# ---------------------------------------------------------------------------

def collision_coefficient(g: float, delta: float, tau: float) -> float:
    """Mixing coefficient of one excitation-conserving collision.

    A = 1 - (g^2/k^2) sin^2(k tau) with k = sqrt(delta^2 + g^2); lies in
    [delta^2/k^2, 1] and is pi/k-periodic in tau.
    """
    if tau < 0:
        raise DomainError(f"collision time must be >= 0, got {tau}")
    if g < 0:
        raise DomainError(f"coupling must be >= 0, got {g}")
    k = math.hypot(g, delta)
    if k == 0.0:
        return 1.0
    ratio = g / k  # (g/k)^2 avoids underflow of k*k at denormal scales
    s = math.sin(k * tau)
    return 1.0 - ratio * ratio * (s * s)


def exact_closed_form_pair(kind_c: SystemKind, kind_h: SystemKind) -> bool:
    """True when the closed-form collision map is exact: both qubits or both oscillators."""
    pair = (kind_c.levels, kind_h.levels)
    return pair == (2, 2) or pair == (None, None)


def collide(config: MachineConfig, tau: float, *, approximate: bool = False,
            allow_unstable: bool = False) -> CollisionOutcome:
    """Apply the closed-form collision map and book work and heats for one cycle.

    The map is exact for qubit-qubit and oscillator-oscillator pairs; any
    other pairing requires ``approximate=True`` because the operator algebra
    does not close there. Oscillator pairs at couplings g >= sqrt(w_c w_h)
    have an unbounded total Hamiltonian and are refused unless
    ``allow_unstable=True``.
    """
    if tau < 0:
        raise DomainError(f"collision time must be >= 0, got {tau}")
    if not exact_closed_form_pair(config.kind_c, config.kind_h) and not approximate:
        raise UnsupportedPairError(
            f"closed-form collision map is exact only for qubit-qubit or "
            f"oscillator-oscillator pairs, not {config.kind_c}-{config.kind_h}; "
            f"pass approximate=True to apply it anyway"
        )
    if (config.kind_c.is_oscillator and config.kind_h.is_oscillator
            and not allow_unstable
            and config.g >= math.sqrt(config.omega_c * config.omega_h)):
        raise UnstableCouplingError(
            f"oscillator pair with g = {config.g} >= sqrt(w_c w_h) = "
            f"{math.sqrt(config.omega_c * config.omega_h)} has a normal frequency "
            f"<= 0; pass allow_unstable=True to override"
        )
    n_c_th = thermal_occupation(config.kind_c, config.omega_c, config.temp_c)
    n_h_th = thermal_occupation(config.kind_h, config.omega_h, config.temp_h)
    a = collision_coefficient(config.g, config.delta, tau)
    # Mean excitations handed to the hot side; every other quantity derives
    # from this single number so the energy bookkeeping stays consistent.
    transfer = (n_c_th - n_h_th) * (1.0 - a)
    return CollisionOutcome(
        coefficient=a,
        n_c_th=n_c_th, n_h_th=n_h_th,
        n_c_post=n_c_th - transfer, n_h_post=n_h_th + transfer,
        work=(config.omega_h - config.omega_c) * transfer,
        heat_c=config.omega_c * transfer,
        heat_h=-config.omega_h * transfer,
    )


# ---------------------------------------------------------------------------
# Working regimes
# ---------------------------------------------------------------------------

def classify_regime(omega_c: float, omega_h: float, temp_c: float, temp_h: float) -> RegimeReport:
    """Label the working regime from frequencies and temperatures alone.

    Valid for equal species on both sides; the boundary equalities
    omega_h == omega_c and omega_h == omega_c * T_h/T_c give the degenerate
    (zero-throughput) label rather than an arbitrary tie-break.
    """
    if not (omega_c > 0 and omega_h > 0 and temp_c > 0 and temp_h > 0):
        raise DomainError("frequencies and temperatures must be > 0")
    if temp_h < temp_c:
        raise DomainError("hot bath must be at least as warm as the cold one")
    boundary = omega_c * temp_h / temp_c
    if omega_h == omega_c or omega_h == boundary:
        return RegimeReport(Regime.DEGENERATE, None)
    if omega_c < omega_h < boundary:
        return RegimeReport(Regime.ENGINE, 1.0 - omega_c / omega_h)
    if omega_h > boundary:
        return RegimeReport(
            Regime.REFRIGERATOR,
            omega_c / (omega_h - omega_c),
            cop_heat_pump=omega_h / (omega_h - omega_c),
        )
    return RegimeReport(Regime.THERMAL_ACCELERATOR, omega_c / (omega_c - omega_h))
