"""Validation reports shared by the category, topology, and site checkers."""
from __future__ import annotations

from dataclasses import dataclass, field

FAIL = "fail"
UNVERIFIED = "unverified"


@dataclass(frozen=True)
class Finding:
    """One violated (or unverifiable) condition instance.

    condition  short machine-readable condition id, e.g. "associativity"
    witness    the objects/morphisms that exhibit the instance
    message    human-readable explanation
    severity   FAIL for a genuine counterexample, UNVERIFIED when a window
               truncation prevented the existential search from concluding
    """

    condition: str
    witness: tuple
    message: str
    severity: str = FAIL


@dataclass
class ValidationReport:
    """Outcome of a layered validation pass.

    level: which layer was checked (category | e | semi-localizing | b | y |
    presheaf | grid | pregrid | topology).  The report passes iff it records
    no FAIL finding; UNVERIFIED findings come from window truncations and
    leave the report in an inconclusive-but-not-failed state.
    """

    level: str
    findings: list[Finding] = field(default_factory=list)
    object_status: dict[str, str] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not any(f.severity == FAIL for f in self.findings)

    @property
    def unverified_only(self) -> bool:
        return self.passed and any(f.severity == UNVERIFIED for f in self.findings)

    @property
    def clean(self) -> bool:
        return not self.findings

    def add(self, condition: str, witness: tuple, message: str, severity: str = FAIL):
        self.findings.append(Finding(condition, tuple(witness), message, severity))

    def extend(self, other: "ValidationReport"):
        self.findings.extend(other.findings)
        self.notes.extend(other.notes)
        for obj, status in other.object_status.items():
            if self.object_status.get(obj) != FAIL:
                self.object_status[obj] = status

    def fail_findings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == FAIL]

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "pass": self.passed,
            "unverified_only": self.unverified_only,
            "findings": [
                {
                    "condition": f.condition,
                    "witness": list(f.witness),
                    "message": f.message,
                    "severity": f.severity,
                }
                for f in self.findings
            ],
            "object_status": dict(sorted(self.object_status.items())),
            "notes": list(self.notes),
        }
