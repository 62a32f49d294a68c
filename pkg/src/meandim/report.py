"""Canonical machine-readable run reports.

Reports serialize deterministically (sorted keys, fixed separators, trailing
newline) so identical inputs and seeds produce byte-identical output. Wall
time is volatile, so it stays None unless timing is requested explicitly.
Exact rationals appear as 'p/q' strings; every float carries a stated
tolerance in the `tolerances` map.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

SCHEMA = "meandim/1"


def digest(payload) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    assertions: list = field(default_factory=list)
    seed: int | None = None
    tolerances: dict = field(default_factory=dict)
    wall_time_ms: float | None = None

    def check(self, name: str, passed: bool, detail=None) -> bool:
        entry = {"name": name, "passed": bool(passed)}
        if detail is not None:
            entry["detail"] = detail
        self.assertions.append(entry)
        return passed

    @property
    def all_passed(self) -> bool:
        return all(a["passed"] for a in self.assertions)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "inputs_digest": digest(self.inputs),
            "results": self.results,
            "assertions": self.assertions,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "wall_time_ms": self.wall_time_ms,
        }

    def render(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"
