"""Brute-force validation of the collision map by exact unitary evolution.

Everything here works on dense matrices over the product basis
|n_c> ⊗ |n_h> (index n_c * N_h + n_h) and evolves them through a Hermitian
eigendecomposition, which is uniformly accurate in the collision time at the
tiny dimensions involved. Oscillators are represented by hard-truncated
ladders; a result is *certified* only when the thermal tail above the
truncation is below tolerance and doubling the level count leaves the
evolved occupation unchanged to the same tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    CollisionOutcome,
    MachineConfig,
    SystemKind,
    thermal_weights,
)
from .errors import ConvergenceError, DomainError, ResourceLimitError

DEFAULT_DIM_CAP = 4096

# Parameter ranges for randomized validation grids: they straddle weak and
# strong coupling, all collision phases, and degenerate-to-dilute occupations.
RANDOM_G_OVER_DELTA = (1e-2, 1e2)
RANDOM_PHASE = (0.0, 2.0 * math.pi)   # k*tau, lower end exclusive
RANDOM_X = (0.1, 10.0)                # omega/T


@dataclass(frozen=True)
class TruncationPolicy:
    """Oscillator truncation rule for the oracle.

    ``level_count`` fixes the ladder length used for every oscillator side;
    when None the count is chosen per side so the thermal tail mass above the
    cutoff stays below ``tail_mass_tolerance``. ``dim_cap`` bounds the product
    dimension (including the doubled certification run).
    """

    level_count: int | None = None
    tail_mass_tolerance: float = 1e-8
    dim_cap: int = DEFAULT_DIM_CAP

    def __post_init__(self):
        if self.level_count is not None and self.level_count < 2:
            raise DomainError("level_count must be >= 2")
        if not self.tail_mass_tolerance > 0:
            raise DomainError("tail_mass_tolerance must be > 0")

    def levels_for(self, x_min: float) -> int:
        """Ladder length for an oscillator side given the smaller omega/T of the pair.

        The exchange conserves total excitation, so a sector is represented
        exactly only when *both* cutoffs exceed it; the joint weight of
        sector s decays like exp(-s * x_min). Aim one decade below the
        certification tolerance since the evolved-occupation error carries an
        O(N) amplification over the raw sector tail.
        """
        if self.level_count is not None:
            return self.level_count
        n = math.ceil(-math.log(0.1 * self.tail_mass_tolerance) / x_min) + 2
        return max(8, n)


@dataclass(frozen=True)
class OracleOutcome:
    """Collision outcome computed by exact evolution, with certification data."""

    outcome: CollisionOutcome
    certified: bool
    levels_c: int
    levels_h: int
    doubling_delta: float
    tail_mass: float


def ladder_lowering(levels: int) -> np.ndarray:
    """Lowering operator with hard cutoff: a|n> = sqrt(n)|n-1>, a+|N-1> = 0."""
    a = np.zeros((levels, levels))
    for n in range(1, levels):
        a[n - 1, n] = math.sqrt(n)
    return a


def number_op(levels: int) -> np.ndarray:
    return np.diag(np.arange(levels, dtype=float))


def _levels_of(kind: SystemKind, requested: int) -> int:
    if kind.is_oscillator:
        if requested < 2:
            raise DomainError("oscillator truncation needs at least 2 levels")
        return requested
    if requested != kind.levels:
        raise DomainError(
            f"level count {requested} does not match the {kind} dimension "
            f"{kind.levels}; only oscillators are truncated"
        )
    return kind.levels


def build_total_hamiltonian(kind_c: SystemKind, kind_h: SystemKind,
                            levels_c: int, levels_h: int,
                            omega_c: float, omega_h: float, g: float,
                            dim_cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """Dense two-body Hamiltonian w_c n_c + w_h n_h + g (a_c+ a_h + a_c a_h+).

    Block-diagonal in the total excitation number; Hermitian (in fact real
    symmetric) by construction.
    """
    n_c = _levels_of(kind_c, levels_c)
    n_h = _levels_of(kind_h, levels_h)
    if n_c * n_h > dim_cap:
        raise ResourceLimitError(
            f"product dimension {n_c * n_h} exceeds the cap {dim_cap}"
        )
    a_c = ladder_lowering(n_c)
    a_h = ladder_lowering(n_h)
    eye_c = np.eye(n_c)
    eye_h = np.eye(n_h)
    h = (omega_c * np.kron(number_op(n_c), eye_h)
         + omega_h * np.kron(eye_c, number_op(n_h))
         + g * (np.kron(a_c.T, a_h) + np.kron(a_c, a_h.T)))
    return h


def total_number_op(levels_c: int, levels_h: int) -> np.ndarray:
    return (np.kron(number_op(levels_c), np.eye(levels_h))
            + np.kron(np.eye(levels_c), number_op(levels_h)))


def thermal_product_state(levels_c: int, levels_h: int,
                          omega_c: float, omega_h: float,
                          temp_c: float, temp_h: float) -> np.ndarray:
    """Density matrix of the uncorrelated Gibbs ⊗ Gibbs initial state."""
    p = np.kron(thermal_weights(levels_c, omega_c, temp_c),
                thermal_weights(levels_h, omega_h, temp_h))
    return np.diag(p)


def evolve_mean_occupation(hamiltonian: np.ndarray, rho0: np.ndarray,
                           tau: float, observable: np.ndarray) -> float:
    """Tr[O e^{-iHt} rho e^{+iHt}] through the eigenbasis of H.

    Validates hermiticity of H and O to 1e-12 and that rho0 is a unit-trace
    positive density matrix to 1e-10; the returned expectation must be real
    to 1e-10 of its magnitude.
    """
    h = np.asarray(hamiltonian)
    rho = np.asarray(rho0, dtype=complex)
    obs = np.asarray(observable, dtype=complex)
    scale = max(float(np.abs(h).max()), 1.0)
    if float(np.abs(h - h.conj().T).max()) > 1e-12 * scale:
        raise DomainError("Hamiltonian is not Hermitian to 1e-12")
    if float(np.abs(obs - obs.conj().T).max()) > 1e-12 * max(float(np.abs(obs).max()), 1.0):
        raise DomainError("observable is not Hermitian to 1e-12")
    if abs(np.trace(rho).real - 1.0) > 1e-10 or float(np.abs(rho - rho.conj().T).max()) > 1e-10:
        raise DomainError("rho0 is not a unit-trace Hermitian density matrix")
    if float(np.linalg.eigvalsh(rho).min()) < -1e-10:
        raise DomainError("rho0 is not positive semidefinite to 1e-10")
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(
            "eigendecomposition of the Hamiltonian failed",
            diagnostics={"dim": h.shape[0], "norm": scale},
        ) from exc
    rho_e = v.conj().T @ rho @ v
    obs_e = v.conj().T @ obs @ v
    phase = np.exp(-1j * w * tau)
    evolved = phase[:, None] * rho_e * phase.conj()[None, :]
    value = complex(np.einsum("ab,ba->", obs_e, evolved))
    if abs(value.imag) > 1e-10 * max(abs(value), 1.0):
        raise ConvergenceError(
            "evolved expectation has a non-negligible imaginary part",
            diagnostics={"imag": value.imag, "real": value.real},
        )
    return value.real


def _evolved_occupations(levels_c, levels_h, omega_c, omega_h, g, tau,
                         temp_c, temp_h):
    """(⟨n_c⟩, ⟨n_h⟩) after one collision from the thermal product state.

    Fast path used by the oracle: the initial state and both observables are
    diagonal, so only |U_ij|^2 enters and the whole evaluation needs two real
    matrix products after the eigendecomposition.
    """
    h = build_total_hamiltonian(
        SystemKind.finite(levels_c), SystemKind.finite(levels_h),
        levels_c, levels_h, omega_c, omega_h, g,
        dim_cap=2**62,
    )
    w, v = np.linalg.eigh(h)
    cos_part = (v * np.cos(w * tau)) @ v.T
    sin_part = (v * np.sin(w * tau)) @ v.T
    prob = cos_part * cos_part + sin_part * sin_part  # |<i|U|j>|^2
    p0 = np.kron(thermal_weights(levels_c, omega_c, temp_c),
                 thermal_weights(levels_h, omega_h, temp_h))
    n_c_diag = np.repeat(np.arange(levels_c, dtype=float), levels_h)
    n_h_diag = np.tile(np.arange(levels_h, dtype=float), levels_c)
    pj = prob @ p0
    return float(n_c_diag @ pj), float(n_h_diag @ pj)


def oracle_collision(config: MachineConfig, tau: float,
                     trunc: TruncationPolicy | None = None) -> OracleOutcome:
    """Exact-evolution counterpart of ``core.collide``.

    Starts from the (truncated) thermal product state, evolves it unitarily
    under the full two-body Hamiltonian, and books the same work/heat
    quantities from the evolved occupations. Oscillator sides are truncated
    per the policy and certified by doubling; finite species need no
    truncation and are certified trivially.
    """
    if tau < 0:
        raise DomainError(f"collision time must be >= 0, got {tau}")
    trunc = trunc or TruncationPolicy()
    # Both oscillator cutoffs are sized from the smaller omega/T of the pair:
    # the exchange can hand the hotter side's population to the other one.
    x_min = min(config.omega_c / config.temp_c, config.omega_h / config.temp_h)
    n_lv_c = trunc.levels_for(x_min) if config.kind_c.is_oscillator else config.kind_c.levels
    n_lv_h = trunc.levels_for(x_min) if config.kind_h.is_oscillator else config.kind_h.levels
    any_osc = config.kind_c.is_oscillator or config.kind_h.is_oscillator

    def run(lv_c, lv_h):
        if lv_c * lv_h > trunc.dim_cap:
            raise ResourceLimitError(
                f"oracle dimension {lv_c * lv_h} exceeds cap {trunc.dim_cap}"
            )
        return _evolved_occupations(
            lv_c, lv_h, config.omega_c, config.omega_h, config.g, tau,
            config.temp_c, config.temp_h,
        )

    if not any_osc:
        lv_c, lv_h = n_lv_c, n_lv_h
        n_c_tau, n_h_tau = run(lv_c, lv_h)
        certified, delta, tail = True, 0.0, 0.0
    else:
        base = run(n_lv_c, n_lv_h)
        lv_c = 2 * n_lv_c if config.kind_c.is_oscillator else n_lv_c
        lv_h = 2 * n_lv_h if config.kind_h.is_oscillator else n_lv_h
        n_c_tau, n_h_tau = run(lv_c, lv_h)
        delta = abs(n_h_tau - base[1])
        osc_cutoffs = [lv for kind, lv in ((config.kind_c, n_lv_c), (config.kind_h, n_lv_h))
                       if kind.is_oscillator]
        tail = math.exp(-min(osc_cutoffs) * x_min)  # joint sector tail
        certified = delta < trunc.tail_mass_tolerance and tail < trunc.tail_mass_tolerance

    # Occupations of the state actually evolved, for self-consistent bookkeeping.
    n_c_th = float(np.arange(lv_c) @ thermal_weights(lv_c, config.omega_c, config.temp_c))
    n_h_th = float(np.arange(lv_h) @ thermal_weights(lv_h, config.omega_h, config.temp_h))
    outcome = CollisionOutcome(
        coefficient=(n_h_tau - n_c_th) / (n_h_th - n_c_th) if n_h_th != n_c_th else float("nan"),
        n_c_th=n_c_th, n_h_th=n_h_th,
        n_c_post=n_c_tau, n_h_post=n_h_tau,
        work=(config.omega_h - config.omega_c) * (n_h_tau - n_h_th),
        heat_c=config.omega_c * (n_c_th - n_c_tau),
        heat_h=config.omega_h * (n_h_th - n_h_tau),
    )
    return OracleOutcome(
        outcome=outcome, certified=certified,
        levels_c=n_lv_c, levels_h=n_lv_h,
        doubling_delta=delta, tail_mass=tail,
    )


def heisenberg_coefficients(levels_c: int, levels_h: int,
                            omega_c: float, omega_h: float, g: float,
                            tau: float) -> tuple[float, float, float, complex]:
    """Expansion of the evolved hot number operator over {n_h, n_c, A+, A-}.

    Extracted from matrix elements of U+ n_h U in the single-excitation
    sector, where the expansion is exact for any ladder lengths. Returns
    (f_h, f_c, f_plus, f_minus); f_minus is purely imaginary.
    """
    h = build_total_hamiltonian(
        SystemKind.finite(levels_c), SystemKind.finite(levels_h),
        levels_c, levels_h, omega_c, omega_h, g,
    )
    w, v = np.linalg.eigh(h)
    u = (v * np.exp(-1j * w * tau)) @ v.T
    n_h_full = np.kron(np.eye(levels_c), number_op(levels_h))
    m = u.conj().T @ n_h_full @ u
    i01 = 0 * levels_h + 1   # |n_c=0, n_h=1>
    i10 = 1 * levels_h + 0   # |n_c=1, n_h=0>
    f_h = m[i01, i01].real
    f_c = m[i10, i10].real
    f_plus = 0.5 * (m[i10, i01] + m[i01, i10])
    f_minus = 0.5 * (m[i10, i01] - m[i01, i10])
    return f_h, f_c, complex(f_plus).real, complex(f_minus)


def random_collision_parameters(rng: np.random.Generator,
                                x_range=RANDOM_X,
                                ratio_range=RANDOM_G_OVER_DELTA,
                                omega_h_range=(0.2, 5.0),
                                g_cap: float | None = None) -> dict:
    """Draw one randomized parameter point for formula-vs-oracle validation.

    omega_c is the unit; the hot frequency, the coupling-to-detuning ratio
    and both omega/T values are log-uniform over their ranges. ``g_cap``
    optionally truncates the coupling (used to stay below the oscillator
    stability bound).
    """
    def log_uniform(lo, hi):
        return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))

    omega_c = 1.0
    omega_h = log_uniform(*omega_h_range)
    if omega_h == omega_c:
        omega_h *= 1.0 + 1e-9
    delta = 0.5 * (omega_h - omega_c)
    g = abs(delta) * log_uniform(*ratio_range)
    if g_cap is not None:
        g = min(g, g_cap * math.sqrt(omega_c * omega_h))
    k = math.hypot(g, delta)
    phase = rng.uniform(*RANDOM_PHASE)
    if phase == 0.0:
        phase = 1e-6
    return {
        "omega_c": omega_c,
        "omega_h": omega_h,
        "g": g,
        "tau": phase / k,
        "temp_c": omega_c / log_uniform(*x_range),
        "temp_h": omega_h / log_uniform(*x_range),
    }
