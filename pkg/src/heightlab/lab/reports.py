"""Report types and their JSON / CSV persistence.

Files are written with sorted keys and repr-exact floats, so a rerun with
the same configuration produces identical bytes.  Nothing time-dependent
goes into a report.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

SCHEMA = "heightlab.report/1"
KINDS = ("inequality", "degree_growth", "silverman_limit", "torsion_growth")

CSV_COLUMNS = {
    "inequality": ["section", "lambda", "h_base", "h_naive", "nt_height", "tail_bound", "ratio"],
    "degree_growth": ["section", "lambda", "N", "h_P", "h_2NP", "ratio", "scaled", "nt_height"],
    "silverman_limit": ["section", "lambda", "h_base", "nt_height", "tail_bound", "ratio"],
    "torsion_growth": ["N", "N0", "count", "volume_estimate", "c_lower", "c_upper"],
}


@dataclass(frozen=True)
class HeightSample:
    # `lambda` is reserved, hence the trailing underscore
    lambda_: Fraction
    h_base: float
    h_naive: float
    nt_height: float
    tail_bound: float

    def __post_init__(self):
        if self.nt_height < -self.tail_bound:
            raise ValueError("canonical height below its own error bar")

    @property
    def ratio(self) -> float:
        return self.h_naive / (1 + self.nt_height)


@dataclass
class ExperimentReport:
    kind: str
    samples: list
    headline_constant: float
    convergence_table: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown report kind {self.kind!r}")

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": self.kind,
            "headline_constant": self.headline_constant,
            "samples": self.samples,
            "convergence_table": self.convergence_table,
            "summary": self.summary,
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentReport":
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        return cls(
            data["kind"],
            data["samples"],
            data["headline_constant"],
            data.get("convergence_table", []),
            data.get("provenance", {}),
            data.get("summary", {}),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1, default=_default) + "\n"

    def csv_text(self, extra_columns: dict = None) -> str:
        cols = CSV_COLUMNS[self.kind] + sorted(extra_columns or {})
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for row in self.samples:
            merged = {**row, **(extra_columns or {})}
            w.writerow([_cell(merged.get(c, "")) for c in cols])
        return buf.getvalue()


def _default(v):
    if isinstance(v, Fraction):
        return str(v)
    raise TypeError(f"not serializable: {type(v).__name__}")


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def sample_row(section_label: str, s: HeightSample) -> dict:
    row = {k: v for k, v in asdict(s).items() if k != "lambda_"}
    row.update({"section": section_label, "lambda": str(s.lambda_), "ratio": s.ratio})
    return row


def recompute_headline(report: ExperimentReport) -> float:
    """The headline constant from the persisted samples alone."""
    rows = report.samples
    if report.kind == "inequality":
        return max(r["h_naive"] / (1 + r["nt_height"]) for r in rows)
    if report.kind == "degree_growth":
        floor = report.summary["h_floor"]
        top = report.summary["N_max"]
        return min((r["ratio"] for r in rows if r["N"] == top and r["h_P"] >= floor), default=float("nan"))
    if report.kind == "silverman_limit":
        tail = rows[len(rows) // 2 :]
        return sum(r["ratio"] for r in tail) / len(tail)
    return min(r["count"] / r["N"] ** 2 for r in rows)


def report_paths(out_dir, kind: str, config_hash: str) -> tuple[Path, Path]:
    out = Path(out_dir)
    stem = f"report-{kind}-{config_hash}"
    return out / f"{stem}.json", out / f"{stem}.csv"


def write_report(report: ExperimentReport, out_dir, config_hash: str) -> tuple[Path, Path]:
    jpath, cpath = report_paths(out_dir, report.kind, config_hash)
    jpath.parent.mkdir(parents=True, exist_ok=True)
    jpath.write_text(report.dumps(), encoding="utf-8")
    cpath.write_text(report.csv_text(), encoding="utf-8")
    return jpath, cpath


def read_report(path) -> ExperimentReport:
    return ExperimentReport.from_json(json.loads(Path(path).read_text(encoding="utf-8")))
