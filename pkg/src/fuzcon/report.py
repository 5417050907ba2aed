"""Verdict records and their JSON-shaped serialization.

Every check produces a :class:`CheckResult`.  The serialized form is a flat
document (schema ``fuzcon.report/1``) described in ``docs/report-schema.md``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

SCHEMA = "fuzcon.report/1"


class Verdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    PRECONDITION_FAILED = "precondition_failed"


def jsonable(obj):
    """Convert numpy scalars/arrays, enums and tuples into plain JSON types."""
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


@dataclass
class CheckResult:
    law_id: str
    verdict: Verdict
    witness: Optional[dict] = None
    details: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    message: str = ""

    def __post_init__(self):
        self.verdict = Verdict(self.verdict)
        if self.verdict is Verdict.FAILS and self.witness is None:
            raise ValueError(f"{self.law_id}: a failing verdict needs a witness")

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    @property
    def fails(self) -> bool:
        return self.verdict is Verdict.FAILS

    def to_dict(self) -> dict:
        return jsonable({
            "schema": SCHEMA,
            "law_id": self.law_id,
            "verdict": self.verdict,
            "message": self.message,
            "witness": self.witness,
            "details": self.details,
            "config": self.config,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "CheckResult":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        return cls(d["law_id"], Verdict(d["verdict"]), d.get("witness"),
                   d.get("details") or {}, d.get("config") or {}, d.get("message", ""))

    def __str__(self):
        s = f"{self.law_id}: {self.verdict.value}"
        if self.message:
            s += f" ({self.message})"
        if self.witness:
            s += f" witness={jsonable(self.witness)}"
        return s


def make_witness(point: dict, values: dict) -> dict:
    return {"point": jsonable(point), "values": jsonable(values)}


def holds(law_id, cfg, message="", **details) -> CheckResult:
    return CheckResult(law_id, Verdict.HOLDS, None, details, cfg.to_dict(), message)


def fails(law_id, cfg, point, values, message="", **details) -> CheckResult:
    return CheckResult(law_id, Verdict.FAILS, make_witness(point, values), details,
                       cfg.to_dict(), message)


def precondition_failed(law_id, cfg, missing, **details) -> CheckResult:
    return CheckResult(law_id, Verdict.PRECONDITION_FAILED, None,
                       dict(details, missing_hypothesis=missing), cfg.to_dict(),
                       f"hypothesis not satisfied: {missing}")
