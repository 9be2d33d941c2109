"""Reader for qtm dataset CSVs.

Only files carrying the full provenance header block are accepted: the
format tag, the experiment kind, seed/threads, the resolved configuration
(``# config:`` lines) and per-column units. Rendering never recomputes
physics, so the header is the sole source of any annotation values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FORMAT_TAG = "qtm-dataset v1"


class SchemaError(ValueError):
    """Dataset is missing provenance or does not match the figure schema."""


@dataclass
class DatasetFile:
    path: str
    experiment: str
    seed: int
    threads: int
    config: dict[str, str] = field(default_factory=dict)
    units: dict[str, str] = field(default_factory=dict)
    columns: dict[str, np.ndarray] = field(default_factory=dict)

    def require_columns(self, names):
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise SchemaError(
                f"{self.path}: expected columns {sorted(names)}, "
                f"found {sorted(self.columns)} (missing {sorted(missing)})"
            )

    def config_float(self, key: str) -> float:
        if key not in self.config:
            raise SchemaError(f"{self.path}: provenance header lacks config key {key!r}")
        return float(self.config[key])


def read_dataset(path) -> DatasetFile:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != f"# {FORMAT_TAG}":
        raise SchemaError(f"{path}: missing '{FORMAT_TAG}' provenance header")
    meta = {"experiment": None, "seed": 0, "threads": 1}
    config: dict[str, str] = {}
    units: dict[str, str] = {}
    body_start = None
    for i, line in enumerate(lines[1:], start=1):
        if not line.startswith("#"):
            body_start = i
            break
        text = line[1:].strip()
        if text.startswith("experiment:"):
            meta["experiment"] = text.split(":", 1)[1].strip()
        elif text.startswith("seed:"):
            meta["seed"] = int(text.split(":", 1)[1])
        elif text.startswith("threads:"):
            meta["threads"] = int(text.split(":", 1)[1])
        elif text.startswith("config:"):
            key, _, value = text.split(":", 1)[1].partition("=")
            config[key.strip()] = value.strip()
        elif text.startswith("column:"):
            name_unit = text.split(":", 1)[1].strip()
            name, _, unit = name_unit.partition("[")
            units[name.strip()] = unit.rstrip("]").strip()
    if meta["experiment"] is None or not config:
        raise SchemaError(f"{path}: incomplete provenance header")
    if body_start is None or body_start >= len(lines):
        raise SchemaError(f"{path}: no data rows")
    names = lines[body_start].split(",")
    rows = [line.split(",") for line in lines[body_start + 1:] if line]
    if not rows:
        raise SchemaError(f"{path}: dataset has a header but no rows")
    data = np.array([[float(v) for v in row] for row in rows])
    if data.shape[1] != len(names):
        raise SchemaError(f"{path}: ragged rows")
    return DatasetFile(
        path=str(path),
        experiment=meta["experiment"],
        seed=meta["seed"],
        threads=meta["threads"],
        config=config,
        units=units,
        columns={name: data[:, i] for i, name in enumerate(names)},
    )
