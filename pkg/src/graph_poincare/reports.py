"""Verification records and their line-delimited JSON / CSV encodings."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from typing import IO, Any, Iterable

__all__ = ["VerificationReport", "ReportSink", "write_csv"]


@dataclass(frozen=True)
class VerificationReport:
    check_name: str
    parameters: dict[str, Any] = field(default_factory=dict)
    measured: float = 0.0
    theoretical: float = 0.0
    passed: bool = False
    seed: int | None = None
    runtime_ms: int = 0

    @property
    def margin(self) -> float:
        return self.theoretical - self.measured

    def to_json(self) -> str:
        d = asdict(self)
        return json.dumps(_finite(d), sort_keys=False, separators=(", ", ": "))

    @classmethod
    def from_json(cls, line: str) -> "VerificationReport":
        return cls(**json.loads(line))


def _finite(obj):
    # JSON has no inf/nan; encode them as strings
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


class ReportSink:
    """Serialized writer for report records; remembers whether any failed."""

    def __init__(self, stream: IO[str]):
        self.stream = stream
        self.records: list[VerificationReport] = []

    def emit(self, report: VerificationReport) -> None:
        self.records.append(report)
        self.stream.write(report.to_json() + "\n")
        self.stream.flush()

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.records)


def write_csv(path, header: list[str], rows: Iterable[Iterable[Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])
