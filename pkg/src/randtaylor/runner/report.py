"""CSV tables and the JSON summary of one experiment run."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class ReportRow:
    tag: str
    params: str  # "key=value; ..." echo of what the row measured
    observed: object
    predicted: object
    deviation: object
    passed: bool
    rule: str  # the acceptance rule that set ``passed``
    reason: str = ""  # why a row failed without a measurement (precision cap, validation)


ROW_COLUMNS = ["tag", "params", "observed", "predicted", "deviation", "pass", "rule", "reason"]


def fmt(v) -> str:
    """Stable text for CSV cells: floats via repr, booleans lower-case."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return repr(v) if math.isfinite(v) else str(v)
    if isinstance(v, (complex, np.complexfloating)):
        return f"{fmt(v.real)}{'+' if math.copysign(1.0, v.imag) > 0 else '-'}{fmt(abs(v.imag))}j"
    if v is None:
        return ""
    return str(v)


def params(**kw) -> str:
    return "; ".join(f"{k}={fmt(v)}" for k, v in kw.items())


class Report:
    """Collects rows and data tables for one experiment; nothing is written until :meth:`close`."""

    def __init__(self, tag: str, out_dir):
        self.tag = tag
        self.dir = Path(out_dir) / tag
        self.rows: list[ReportRow] = []
        self.tables: dict[str, tuple[list[str], list[list]]] = {}
        self.info: dict = {}

    def row(self, params: str, observed, predicted, deviation, passed: bool, rule: str, reason: str = "") -> ReportRow:
        r = ReportRow(self.tag, params, observed, predicted, deviation, bool(passed), rule, reason)
        self.rows.append(r)
        return r

    def table(self, name: str, header: list[str], rows) -> None:
        if name in self.tables:
            raise ValueError(f"table {name} written twice")
        self.tables[name] = (list(header), [list(r) for r in rows])

    @property
    def all_pass(self) -> bool:
        return bool(self.rows) and all(r.passed for r in self.rows)

    def close(self, wall_time: float, config_path: str | None = None, threads: int = 1) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        with open(self.dir / "rows.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(ROW_COLUMNS)
            for r in self.rows:
                w.writerow([r.tag, r.params, fmt(r.observed), fmt(r.predicted), fmt(r.deviation), fmt(r.passed),
                            r.rule, r.reason])
        for name, (header, rows) in self.tables.items():
            with open(self.dir / f"{name}.csv", "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(header)
                for row in rows:
                    w.writerow([fmt(v) for v in row])
        summary = {
            "tag": self.tag,
            "all_pass": self.all_pass,
            "rows": len(self.rows),
            "failed": [{"params": r.params, "rule": r.rule, "reason": r.reason} for r in self.rows if not r.passed],
            "tables": sorted(f"{n}.csv" for n in self.tables),
            "config": config_path,
            "threads": threads,
            "wall_time_s": round(wall_time, 3),
            **self.info,
        }
        path = self.dir / "summary.json"
        path.write_text(json.dumps(summary, indent=2, sort_keys=True, default=_json_default) + "\n")
        return path


def _json_default(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.bool_):
        return bool(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")
