"""Verification reports and their JSON form."""

from __future__ import annotations

import datetime
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

SCHEMA_VERSION = 1


@dataclass
class Check:
    name: str
    passed: bool
    counterexample: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {"name": self.name, "pass": bool(self.passed)}
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        return d


@dataclass
class Report:
    spec: Dict[str, Any]
    degree: Optional[int] = None
    window: Optional[List[List[int]]] = None
    classes: List[str] = field(default_factory=list)
    checks: List[Check] = field(default_factory=list)
    extra: Dict[str, Any] = field(default_factory=dict)

    def add(self, name: str, passed: bool, counterexample: Optional[str] = None) -> Check:
        c = Check(name, bool(passed), None if passed else counterexample)
        self.checks.append(c)
        return c

    def extend(self, other: "Report", prefix: str = ""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.counterexample))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self, timestamp: bool = True) -> Dict[str, Any]:
        d: Dict[str, Any] = {
            "schema": SCHEMA_VERSION,
            "spec": self.spec,
            "degree": self.degree,
            "window": self.window,
            "classes": list(self.classes),
            "checks": [c.to_dict() for c in self.checks],
            "summary": {
                "total": len(self.checks),
                "failed": len(self.failures),
                "pass": self.passed,
            },
        }
        d.update(self.extra)
        if timestamp:
            d["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
        return d

    def to_json(self, timestamp: bool = True) -> str:
        return dumps(self.to_dict(timestamp))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)


def strip_timestamp(text: str) -> str:
    """Canonical JSON text with every ``timestamp`` key removed."""

    def walk(x):
        if isinstance(x, dict):
            return {k: walk(v) for k, v in x.items() if k != "timestamp"}
        if isinstance(x, list):
            return [walk(v) for v in x]
        return x

    return dumps(walk(json.loads(text)))
