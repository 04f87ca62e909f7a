"""Verdicts shared by the VASS checks and the end-to-end pipeline."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import CapExceeded
from .words import show


class Status(str, Enum):
    INCLUDED = "INCLUDED"
    NOT_INCLUDED = "NOT_INCLUDED"
    INDETERMINATE = "INDETERMINATE"


class Kind(str, Enum):
    OV = "OV"
    DV = "DV"
    MV = "MV"
    NON_TAME = "NON_TAME"


EXIT_CODES = {Status.INCLUDED: 0, Status.NOT_INCLUDED: 1, Status.INDETERMINATE: 2}


@dataclass(frozen=True)
class CapHit:
    stage: str
    cap: int
    detail: str = ""

    @classmethod
    def of(cls, err: CapExceeded) -> "CapHit":
        return cls(err.stage, err.cap, err.detail)

    def to_json(self) -> dict:
        return {"stage": self.stage, "cap": self.cap, "detail": self.detail}


@dataclass(frozen=True)
class Witness:
    trace: tuple
    run: tuple = ()  # human readable scheduler steps

    def to_json(self) -> dict:
        return {"trace": show(self.trace), "run": list(self.run)}


@dataclass
class Verdict:
    status: Status
    kind: Optional[Kind] = None
    witness: Optional[Witness] = None
    cap_report: list = field(default_factory=list)
    detail: str = ""
    timings: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status is Status.NOT_INCLUDED and self.kind is None:
            raise ValueError("NOT_INCLUDED verdict needs a kind")

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "verdict": self.status.value,
            "kind": self.kind.value if self.kind else None,
            "witness": self.witness.to_json() if self.witness else None,
            "cap_report": [c.to_json() for c in self.cap_report],
            "detail": self.detail,
        }
        if timings:
            out["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return out

    def __str__(self) -> str:
        head = self.status.value + (f" ({self.kind.value})" if self.kind else "")
        lines = [head]
        if self.detail:
            lines.append(f"  {self.detail}")
        if self.witness:
            lines.append(f"  witness trace: {show(self.witness.trace)}")
            lines.extend(f"    {step}" for step in self.witness.run)
        for c in self.cap_report:
            lines.append(f"  cap hit: {c.stage} (cap {c.cap}) {c.detail}".rstrip())
        return "\n".join(lines)
