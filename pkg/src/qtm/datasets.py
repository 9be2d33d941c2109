"""Row-oriented datasets with provenance headers.

CSV layout: '# '-prefixed header block (format version, experiment kind,
seed, thread count, and the full resolved configuration, one ``# config:``
line per key), a plain column-name row, then data rows. UTF-8, LF endings,
'.' decimal separator, floats printed in shortest round-trip form. The
header is sufficient to re-run the experiment exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import DatasetError

FORMAT_TAG = "qtm-dataset v1"


@dataclass(frozen=True)
class Column:
    name: str
    unit: str  # "1" for dimensionless


@dataclass
class Dataset:
    experiment: str
    columns: list[Column]
    rows: list[tuple] = field(default_factory=list)
    config_items: list[tuple[str, str]] = field(default_factory=list)
    seed: int = 0
    threads: int = 1

    def append(self, *values):
        if len(values) != len(self.columns):
            raise DatasetError(
                f"row width {len(values)} != column count {len(self.columns)}"
            )
        self.rows.append(tuple(values))

    def column(self, name: str) -> list:
        try:
            i = [c.name for c in self.columns].index(name)
        except ValueError:
            raise DatasetError(f"no column named {name!r}") from None
        return [row[i] for row in self.rows]


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    x = float(value)
    if not math.isfinite(x):
        raise DatasetError(f"non-finite value {x} in dataset row")
    return repr(x)


def render_csv(ds: Dataset) -> str:
    lines = [f"# {FORMAT_TAG}",
             f"# experiment: {ds.experiment}",
             f"# seed: {ds.seed}",
             f"# threads: {ds.threads}"]
    for key, value in ds.config_items:
        lines.append(f"# config: {key} = {value}")
    for col in ds.columns:
        lines.append(f"# column: {col.name} [{col.unit}]")
    lines.append(",".join(col.name for col in ds.columns))
    for row in ds.rows:
        lines.append(",".join(_format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(ds: Dataset, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_csv(ds))


def write_summary(path, experiment: str, seed: int, threads: int,
                  config_items: list[tuple[str, str]], summary: dict):
    payload = {
        "format": FORMAT_TAG,
        "experiment": experiment,
        "seed": seed,
        "threads": threads,
        "config": dict(config_items),
        "summary": summary,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
