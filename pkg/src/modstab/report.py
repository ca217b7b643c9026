"""JSON-lines run reports.

One record per line.  The first line is a header (schema version, tool
version, config hash, seed, kernel backend, timestamp); every following
line is a self-describing record with a scenario name, a stage tag
(config / iterate / check), a pass bit, and a stage-specific payload.
Payload lines are deterministic for a fixed config; only the header
carries the timestamp.
"""

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

SCHEMA = "modstab-report/1"


@dataclass(frozen=True)
class ReportRecord:
    scenario: str
    stage: str  # "config" | "iterate" | "check"
    payload: dict
    passed: bool
    advisory: bool = field(default=False)

    def to_json(self):
        doc = {
            "scenario": self.scenario,
            "stage": self.stage,
            "pass": bool(self.passed),
            "payload": self.payload,
        }
        if self.advisory:
            doc["advisory"] = True
        return json.dumps(doc, sort_keys=True, allow_nan=True)


def config_hash(config):
    return hashlib.sha256(
        json.dumps(config, sort_keys=True).encode("utf-8")
    ).hexdigest()[:16]


def header_record(config, seed, version, backend):
    return {
        "schema": SCHEMA,
        "tool": "modstab",
        "version": version,
        "config_hash": config_hash(config),
        "seed": seed,
        "backend": backend,
        "created_at": datetime.now(timezone.utc).isoformat(),
    }


def exit_code_from_records(records):
    """0 iff every asserted record passes, else 1."""
    for r in records:
        if not r.advisory and not r.passed:
            return 1
    return 0


def write_report(header, records, stream):
    stream.write(json.dumps(header, sort_keys=True) + "\n")
    for r in records:
        stream.write(r.to_json() + "\n")
