"""Experiment configuration: flat typed key-value text with section prefixes.

Syntax: one ``key = value`` pair per line; blank lines and '#' comments are
skipped. Keys are dotted lowercase identifiers (machine.*, grid.*, output.*,
...), values are parsed per the experiment's key schema, and unknown keys
are rejected. ``--set key=value`` overrides are applied after the file.

The canonical serialization of a resolved configuration (every key, defaults
included, sorted) is embedded in dataset headers and round-trips through
``parse_items`` exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import SystemKind
from .errors import ConfigError

_POSITIVE = ("must be > 0", lambda v: v > 0)
_NON_NEGATIVE = ("must be >= 0", lambda v: v >= 0)
_COUNT = ("must be >= 2", lambda v: v >= 2)
_ANY = ("", lambda v: True)


@dataclass(frozen=True)
class Key:
    name: str
    kind: str  # float | int | bool | str | kind | floats | ints
    default: object
    help: str
    check: tuple = _ANY
    choices: tuple = ()


def _parse_scalar(key: Key, text: str):
    text = text.strip()
    try:
        if key.kind == "float":
            return float(text)
        if key.kind == "int":
            return int(text)
        if key.kind == "bool":
            if text.lower() in ("true", "1", "yes"):
                return True
            if text.lower() in ("false", "0", "no"):
                return False
            raise ValueError(text)
        if key.kind == "str":
            if key.choices and text not in key.choices:
                raise ConfigError(
                    f"key '{key.name}': {text!r} is not one of {'|'.join(key.choices)}"
                )
            return text
        if key.kind == "kind":
            return SystemKind.parse(text)
        if key.kind == "floats":
            return tuple(float(t) for t in text.split(",") if t.strip())
        if key.kind == "ints":
            return tuple(int(t) for t in text.split(",") if t.strip())
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"key '{key.name}': cannot parse {text!r} as {key.kind}") from exc
    raise ConfigError(f"key '{key.name}': unknown type {key.kind}")


def serialize_value(key: Key, value) -> str:
    if key.kind == "float":
        return repr(float(value))
    if key.kind == "int":
        return str(int(value))
    if key.kind == "bool":
        return "true" if value else "false"
    if key.kind in ("str",):
        return str(value)
    if key.kind == "kind":
        return str(value)
    if key.kind == "floats":
        return ",".join(repr(float(v)) for v in value)
    if key.kind == "ints":
        return ",".join(str(int(v)) for v in value)
    raise ConfigError(f"key '{key.name}': unknown type {key.kind}")


def machine_keys(*, omegas: bool = True, coupling: bool = True,
                 waiting: bool = True, kind: bool = True) -> list[Key]:
    keys = []
    if omegas:
        keys += [
            Key("machine.omega_c", "float", 1.0, "cold-side frequency", _POSITIVE),
            Key("machine.omega_h", "float", 5.0, "hot-side frequency", _POSITIVE),
        ]
    keys += [
        Key("machine.T_c", "float", 1.0, "cold bath temperature (sets nu_c)", _POSITIVE),
        Key("machine.T_h", "float", 10.0, "hot bath temperature", _POSITIVE),
    ]
    if coupling:
        keys.append(Key("machine.g", "float", 1.0, "collision coupling", _NON_NEGATIVE))
    if waiting:
        keys.append(Key("machine.t_wait", "float", 0.0, "waiting time between collisions",
                        _NON_NEGATIVE))
    if kind:
        keys.append(Key("machine.kind", "kind", SystemKind.qubit(),
                        "species: qubit | oscillator | finite:N"))
    return keys


def grid_keys(name: str, lo: float, hi: float, count: int, scale: str) -> list[Key]:
    return [
        Key(f"grid.{name}.min", "float", lo, f"{name} grid lower edge"),
        Key(f"grid.{name}.max", "float", hi, f"{name} grid upper edge"),
        Key(f"grid.{name}.count", "int", count, f"{name} grid point count", _COUNT),
        Key(f"grid.{name}.scale", "str", scale, f"{name} grid spacing", choices=("lin", "log")),
    ]


OUTPUT_KEYS = [
    Key("output.basename", "str", "", "output file stem (default: experiment name)"),
    Key("output.summary", "bool", True, "also write a JSON summary"),
]


def grid_values(params: dict, name: str) -> list[float]:
    lo = params[f"grid.{name}.min"]
    hi = params[f"grid.{name}.max"]
    count = params[f"grid.{name}.count"]
    scale = params[f"grid.{name}.scale"]
    if not hi > lo:
        raise ConfigError(f"key 'grid.{name}.max': must exceed grid.{name}.min")
    if scale == "log":
        if not lo > 0:
            raise ConfigError(f"key 'grid.{name}.min': must be > 0 for a log grid")
        step = (math.log(hi) - math.log(lo)) / (count - 1)
        return [math.exp(math.log(lo) + i * step) for i in range(count)]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    help: str
    keys: dict[str, Key]
    validate: object = None  # optional cross-key hook: params -> None

    def key(self, name: str) -> Key:
        return self.keys[name]


@dataclass
class ExperimentConfig:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    threads: int = 1

    def items(self) -> list[tuple[str, str]]:
        """Canonical (key, value) serialization: every key, sorted."""
        spec = EXPERIMENTS[self.kind]
        return [(name, serialize_value(spec.keys[name], self.params[name]))
                for name in sorted(self.params)]


def _spec(name, help_text, keys, validate=None) -> ExperimentSpec:
    table = {}
    for key in keys:
        if key.name in table:
            raise ValueError(f"duplicate key {key.name} in {name}")
        table[key.name] = key
    return ExperimentSpec(name, help_text, table, validate)


def _require_temps(params):
    if params["machine.T_h"] < params["machine.T_c"]:
        raise ConfigError("key 'machine.T_h': hot bath must be at least as warm "
                          "as machine.T_c")


def _require_distinct_omegas(params):
    if params["machine.omega_h"] == params["machine.omega_c"]:
        raise ConfigError("key 'machine.omega_h': must differ from machine.omega_c "
                          "for this experiment")


def _validate_machine(params):
    _require_temps(params)


def _validate_mediator_compare(params):
    _require_distinct_omegas(params)
    for u in params["mediator.u_values"]:
        if u < 1:
            raise ConfigError("key 'mediator.u_values': collision counts must be >= 1")
    for r in params["mediator.g_ratios"]:
        if r <= 0:
            raise ConfigError("key 'mediator.g_ratios': ratios must be > 0")


def _validate_oracle(params):
    if params["validate.points"] < 1:
        raise ConfigError("key 'validate.points': must be >= 1")
    if params["oracle.levels"] and params["oracle.levels"] < 2:
        raise ConfigError("key 'oracle.levels': must be >= 2 (0 = automatic)")


def _validate_profile(params):
    _require_temps(params)
    eta_carnot = 1.0 - params["machine.T_c"] / params["machine.T_h"]
    if not 0.0 < params["profile.eta"] < eta_carnot:
        raise ConfigError(
            f"key 'profile.eta': must lie in (0, {eta_carnot}) for an engine"
        )
    for l in params["profile.l_values"]:
        if not 0.0 < l <= 1.0:
            raise ConfigError("key 'profile.l_values': entries must lie in (0, 1]")


def _validate_otto(params):
    _require_temps(params)
    for g in params["otto.couplings"]:
        if g < 0:
            raise ConfigError("key 'otto.couplings': couplings must be >= 0")
    if params["otto.merit"] == "chi":
        boundary = params["machine.omega_c"] * params["machine.T_h"] / params["machine.T_c"]
        if not params["machine.omega_h"] > boundary:
            raise ConfigError(
                "key 'otto.merit': chi needs the refrigerator regime "
                f"(machine.omega_h > {boundary})"
            )


EXPERIMENTS: dict[str, ExperimentSpec] = {}

for spec in [
    _spec(
        "sweep-tau",
        "rate term, energetics and power over a collision-time grid",
        machine_keys()
        + grid_keys("tau", 1e-3, 10.0, 400, "lin")
        + [Key("machine.approximate", "bool", False,
               "apply the closed form to species pairs where it is approximate"),
           Key("machine.allow_unstable", "bool", False,
               "allow oscillator couplings beyond the stability bound")]
        + OUTPUT_KEYS,
        _validate_machine,
    ),
    _spec(
        "optimal-time-curve",
        "optimal collision phase and rate-term levels vs dimensionless waiting time",
        grid_keys("k_t_wait", 1e-2, 1e2, 200, "log") + OUTPUT_KEYS,
    ),
    _spec(
        "frontier",
        "engine power maximized at each fixed efficiency (qubits)",
        machine_keys(omegas=False)
        + [Key("grid.eta.count", "int", 200, "efficiency grid size", _COUNT),
           Key("search.n_omega", "int", 64, "frequency multi-start count", _COUNT)]
        + OUTPUT_KEYS,
        _validate_machine,
    ),
    _spec(
        "freq-maximize",
        "global engine power maximum over frequencies and collision time (qubits)",
        machine_keys(omegas=False)
        + [Key("search.n_eta", "int", 200, "efficiency scan size", _COUNT),
           Key("search.n_omega", "int", 64, "frequency multi-start count", _COUNT)]
        + OUTPUT_KEYS,
        _validate_machine,
    ),
    _spec(
        "mediator-compare",
        "mediator rate-term curves for several couplings and collision counts",
        [Key("machine.omega_c", "float", 1.0, "cold-side frequency", _POSITIVE),
         Key("machine.omega_h", "float", 5.0, "hot-side frequency", _POSITIVE),
         Key("machine.T_c", "float", 1.0, "cold bath temperature (sets nu_c)", _POSITIVE),
         Key("mediator.g_ratios", "floats", (0.01, 1.0, 100.0),
             "couplings as multiples of the stroke detuning (w_h - w_c)/4"),
         Key("mediator.u_values", "ints", (1, 2, 4), "collisions per stroke")]
        + grid_keys("phase", 0.02, 2.0 * math.pi, 300, "lin")
        + OUTPUT_KEYS,
        _validate_mediator_compare,
    ),
    _spec(
        "advantage",
        "direct vs mediator cycle over the direct cycle's waiting time",
        machine_keys()
        + grid_keys("t_wait", 1e-2, 10.0, 200, "log")
        + [Key("advantage.freq_maximized", "bool", False,
               "add the frequency-maximized comparison over a coupling grid")]
        + grid_keys("g", 0.05, 5.0, 9, "log")
        + [Key("search.n_eta", "int", 96, "efficiency scan size (freq variant)", _COUNT),
           Key("search.n_omega", "int", 48, "frequency multi-start count (freq variant)",
               _COUNT)]
        + OUTPUT_KEYS,
        _validate_machine,
    ),
    _spec(
        "otto-compare",
        "direct-cycle power or chi vs the adiabatic Otto ceiling, plus the peaks curve",
        machine_keys()
        + [Key("otto.couplings", "floats", (0.1, 0.3, 1.0), "couplings for the curves"),
           Key("otto.merit", "str", "power", "compared quantity", choices=("power", "chi")),
           Key("otto.target", "float", 0.0,
               "external peak value to match by tuning g (0 = off)", _NON_NEGATIVE)]
        + grid_keys("tau", 0.05, 20.0, 400, "lin")
        + grid_keys("g", 1e-2, 10.0, 200, "log")
        + OUTPUT_KEYS,
        _validate_otto,
    ),
    _spec(
        "swap-compare",
        "exchange interaction vs a fair dedicated swap over a coupling grid",
        [Key("machine.omega_c", "float", 1.0, "cold-side frequency", _POSITIVE),
         Key("machine.omega_h", "float", 5.0, "hot-side frequency", _POSITIVE),
         Key("machine.T_c", "float", 1.0, "cold bath temperature (sets nu_c)", _POSITIVE),
         Key("machine.t_wait", "float", 0.0, "waiting time", _NON_NEGATIVE)]
        + grid_keys("g", 0.02, 20.0, 200, "log")
        + OUTPUT_KEYS,
    ),
    _spec(
        "validate-oracle",
        "formula vs exact-evolution discrepancies over randomized parameters",
        [Key("validate.pair", "str", "qubit", "species pairing",
             choices=("qubit", "oscillator", "qubit-oscillator")),
         Key("validate.points", "int", 1000, "number of randomized points"),
         Key("validate.tolerance", "float", -1.0,
             "pass/fail threshold on |d n_h|; -1 = per-pair default, 0 = report only"),
         Key("validate.x_min", "float", 0.0, "lower omega/T bound (0 = per-pair default)"),
         Key("validate.x_max", "float", 0.0, "upper omega/T bound (0 = per-pair default)"),
         Key("validate.g_cap", "float", 0.85,
             "coupling cap as a fraction of the oscillator stability bound", _POSITIVE),
         Key("oracle.tail_tolerance", "float", 1e-8,
             "truncation certification tolerance", _POSITIVE),
         Key("oracle.dim_cap", "int", 4096, "product-dimension cap", _COUNT),
         Key("oracle.levels", "int", 0, "fixed oscillator level count (0 = automatic)")]
        + OUTPUT_KEYS,
        _validate_oracle,
    ),
    _spec(
        "oscillator-profile",
        "frequency-scaling profile of the oscillator engine power",
        [Key("machine.T_c", "float", 1.0, "cold bath temperature (sets nu_c)", _POSITIVE),
         Key("machine.T_h", "float", 10.0, "hot bath temperature", _POSITIVE),
         Key("machine.g", "float", 1.0, "collision coupling", _POSITIVE),
         Key("machine.t_wait", "float", 0.0, "waiting time", _NON_NEGATIVE),
         Key("profile.eta", "float", 0.5, "engine efficiency for the power column"),
         Key("profile.l_values", "floats", (0.1, 0.5, 0.9),
             "temperature-frequency ratio values for the gap profile")]
        + grid_keys("x", 1e-3, 10.0, 160, "log")
        + OUTPUT_KEYS,
        _validate_profile,
    ),
]:
    EXPERIMENTS[spec.name] = spec


def parse_items(kind: str, items: list[tuple[str, str, int]]) -> ExperimentConfig:
    """Build a validated config from (key, value, line_number) triples."""
    if kind not in EXPERIMENTS:
        raise ConfigError(
            f"unknown experiment {kind!r}; choose from {', '.join(sorted(EXPERIMENTS))}"
        )
    spec = EXPERIMENTS[kind]
    params = {name: key.default for name, key in spec.keys.items()}
    for name, raw, line in items:
        where = f" (line {line})" if line else ""
        if name not in spec.keys:
            raise ConfigError(f"unknown key {name!r} for experiment '{kind}'{where}")
        params[name] = _parse_scalar(spec.keys[name], raw)
    for name, key in spec.keys.items():
        message, predicate = key.check
        value = params[name]
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            if not predicate(value):
                raise ConfigError(f"key '{name}': {message}, got {value}")
    if spec.validate is not None:
        spec.validate(params)
    cfg = ExperimentConfig(kind=kind, params=params)
    return cfg


def parse_config_text(kind: str, text: str, overrides: list[str] = ()) -> ExperimentConfig:
    """Parse a config file body plus --set overrides into a validated config."""
    items: list[tuple[str, str, int]] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"parse error at line {line_no}: expected 'key = value', "
                              f"got {stripped!r}")
        name, _, raw = stripped.partition("=")
        items.append((name.strip(), raw.strip(), line_no))
    for text_item in overrides:
        if "=" not in text_item:
            raise ConfigError(f"bad --set override {text_item!r}: expected key=value")
        name, _, raw = text_item.partition("=")
        items.append((name.strip(), raw.strip(), 0))
    return parse_items(kind, items)


def config_reference(kind: str) -> str:
    """Human-readable key table with types and defaults."""
    spec = EXPERIMENTS[kind]
    lines = [f"{kind}: {spec.help}", ""]
    width = max(len(n) for n in spec.keys)
    for name in sorted(spec.keys):
        key = spec.keys[name]
        default = serialize_value(key, key.default) if key.default is not None else "(required)"
        kind_text = key.kind + (f" ({'|'.join(key.choices)})" if key.choices else "")
        lines.append(f"  {name.ljust(width)}  {kind_text:<22} default={default}  {key.help}")
    return "\n".join(lines)
