"""Structured experiment output: rows plus metadata, emitted as CSV or JSON."""

import csv
import io
import json
from dataclasses import asdict, dataclass, field


@dataclass(frozen=True)
class ReportRow:
    experiment: str
    quantity: str
    params: str
    value: float
    tolerance: float
    status: str  # pass | fail | info | error
    runtime_ms: int = 0


@dataclass(frozen=True)
class Report:
    rows: tuple
    version: str = "0.1.0"
    config_hash: str = ""
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))

    def has_failures(self):
        return any(r.status == "fail" for r in self.rows)


def params_string(**kwargs):
    """Canonical 'k=v;k=v' encoding with sorted keys."""
    return ";".join(f"{k}={kwargs[k]!r}" for k in sorted(kwargs))


CSV_COLUMNS = ["experiment", "quantity", "params", "value", "tolerance", "status", "runtime_ms"]


def _row_record(row):
    rec = asdict(row)
    rec["value"] = repr(float(row.value))
    rec["tolerance"] = repr(float(row.tolerance))
    return rec


def report_to_csv(report):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in report.rows:
        writer.writerow(_row_record(row))
    return buf.getvalue()


def report_to_json(report):
    payload = {
        "metadata": {
            "version": report.version,
            "config_hash": report.config_hash,
            "seed": report.seed,
        },
        "rows": [asdict(r) for r in report.rows],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def report_from_json(text):
    payload = json.loads(text)
    meta = payload["metadata"]
    rows = tuple(ReportRow(**r) for r in payload["rows"])
    return Report(
        rows=rows,
        version=meta["version"],
        config_hash=meta["config_hash"],
        seed=meta["seed"],
    )


def emit_report(report, path, fmt="csv"):
    """Write the report; deterministic bytes for a given report object."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    text = report_to_csv(report) if fmt == "csv" else report_to_json(report)
    with open(path, "w") as fh:
        fh.write(text)
    return path
