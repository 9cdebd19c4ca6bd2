"""Tabular experiment reports with named verdicts and file serialisation.

Every verdict carries its measured margin and the claim it checks, and a
report embeds the exact parameters needed to re-run it.  A verdict may be
``passed=None`` ("untested"), which is how unconverged inputs are recorded:
an unconverged cell never counts as a failure.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["Verdict", "ExperimentReport"]


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool | None  # None = untested
    margin: float
    claim: str  # what inequality/identity was checked, in words

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "margin": self.margin,
            "claim": self.claim,
        }


@dataclass
class ExperimentReport:
    name: str
    parameters: dict
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    verdicts: list[Verdict] = field(default_factory=list)

    def add_row(self, **kwargs) -> None:
        missing = set(self.columns) - set(kwargs)
        if missing:
            raise ValueError(f"row missing columns: {sorted(missing)}")
        self.rows.append({c: kwargs[c] for c in self.columns})

    def add_verdict(
        self, name: str, passed: bool | None, margin: float, claim: str
    ) -> None:
        self.verdicts.append(Verdict(name, passed, float(margin), claim))

    @property
    def all_ok(self) -> bool:
        """True when no verdict failed (untested verdicts do not fail)."""
        return all(v.passed is not False for v in self.verdicts)

    def write(self, out_dir) -> tuple[Path, Path]:
        """Write ``<name>.csv`` (rows) and ``<name>.verdicts.json``."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / f"{self.name}.csv"
        with open(csv_path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=self.columns)
            writer.writeheader()
            writer.writerows(self.rows)
        json_path = out / f"{self.name}.verdicts.json"
        payload = {
            "name": self.name,
            "parameters": self.parameters,
            "verdicts": [v.as_dict() for v in self.verdicts],
            "all_ok": self.all_ok,
        }
        with open(json_path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return csv_path, json_path
