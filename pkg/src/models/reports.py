"""Report models for experiment results."""

import hashlib
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
from pydantic import BaseModel, Field

ROW_STATUSES = ("pass", "fail", "info", "infeasible", "inconclusive")

BASE_COLUMNS = [
    "experiment",
    "quantity",
    "parameter",
    "value",
    "reference",
    "tolerance",
    "status",
    "passed",
]


class ReportRow(BaseModel):
    """One measured quantity at one parameter value."""

    quantity: str = Field(..., min_length=1, description="Name of the measured quantity")
    parameter: float = Field(..., description="Scale parameter of the row (t_n, n, R, ...)")
    value: float = Field(..., description="Measured value")
    reference: Optional[float] = Field(None, description="Bound or expected value")
    tolerance: float = Field(default=0.0, ge=0.0, description="Declared tolerance")
    status: str = Field(default="info", description="pass | fail | info | infeasible | inconclusive")
    extras: Dict[str, float] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """Infeasible, inconclusive and informational rows are not failures."""
        return self.status != "fail"

    @classmethod
    def info(cls, quantity: str, parameter: float, value: float, **extras: float) -> "ReportRow":
        return cls(quantity=quantity, parameter=parameter, value=value, extras=extras)

    @classmethod
    def at_most(
        cls, quantity: str, parameter: float, value: float, bound: float, tolerance: float, **extras: float
    ) -> "ReportRow":
        ok = value <= bound + tolerance
        return cls(
            quantity=quantity,
            parameter=parameter,
            value=value,
            reference=bound,
            tolerance=tolerance,
            status="pass" if ok else "fail",
            extras=extras,
        )

    @classmethod
    def at_least(
        cls, quantity: str, parameter: float, value: float, bound: float, tolerance: float, **extras: float
    ) -> "ReportRow":
        ok = value >= bound - tolerance
        return cls(
            quantity=quantity,
            parameter=parameter,
            value=value,
            reference=bound,
            tolerance=tolerance,
            status="pass" if ok else "fail",
            extras=extras,
        )

    @classmethod
    def within(
        cls, quantity: str, parameter: float, value: float, reference: float, tolerance: float, **extras: float
    ) -> "ReportRow":
        ok = abs(value - reference) <= tolerance
        return cls(
            quantity=quantity,
            parameter=parameter,
            value=value,
            reference=reference,
            tolerance=tolerance,
            status="pass" if ok else "fail",
            extras=extras,
        )

    @classmethod
    def flagged(cls, quantity: str, parameter: float, status: str, **extras: float) -> "ReportRow":
        """A row that could not be measured (infeasible) or resolved (inconclusive)."""
        if status not in ("infeasible", "inconclusive"):
            raise ValueError(f"Flagged rows are infeasible or inconclusive, got {status}")
        return cls(quantity=quantity, parameter=parameter, value=math.nan, status=status, extras=extras)


class ExperimentReport(BaseModel):
    """Rows plus run metadata; serializes to CSV."""

    experiment: str
    seed: int
    resolution: float
    spec_hash: str = ""
    rows: List[ReportRow] = Field(default_factory=list)
    processing_time: float = Field(default=0.0, description="Processing time in seconds")

    def add(self, row: ReportRow) -> None:
        self.rows.append(row)

    def extend(self, rows: List[ReportRow]) -> None:
        self.rows.extend(rows)

    @property
    def all_passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def status_counts(self) -> Dict[str, int]:
        counts = {status: 0 for status in ROW_STATUSES}
        for row in self.rows:
            counts[row.status] += 1
        return counts

    def rows_for(self, quantity: str) -> List[ReportRow]:
        return [row for row in self.rows if row.quantity == quantity]

    def to_frame(self) -> pd.DataFrame:
        extra_keys = sorted({key for row in self.rows for key in row.extras})
        records: List[Dict[str, Any]] = []
        for row in self.rows:
            record: Dict[str, Any] = {
                "experiment": self.experiment,
                "quantity": row.quantity,
                "parameter": row.parameter,
                "value": row.value,
                "reference": row.reference,
                "tolerance": row.tolerance,
                "status": row.status,
                "passed": row.passed,
            }
            for key in extra_keys:
                record[key] = row.extras.get(key)
            record["seed"] = self.seed
            record["resolution"] = self.resolution
            record["spec_hash"] = self.spec_hash
            records.append(record)
        columns = BASE_COLUMNS + extra_keys + ["seed", "resolution", "spec_hash"]
        return pd.DataFrame.from_records(records, columns=columns)

    def write_csv(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.9g")
        return path


def spec_hash(config: Dict[str, Any]) -> str:
    """SHA-256 of the canonical JSON of a configuration mapping."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
