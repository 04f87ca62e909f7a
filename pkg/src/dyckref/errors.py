"""Exceptions shared across modules."""
from __future__ import annotations


class CapExceeded(RuntimeError):
    """A configured budget was exhausted before an exact answer was reached."""

    def __init__(self, stage: str, cap: int, detail: str = ""):
        self.stage = stage
        self.cap = cap
        self.detail = detail
        msg = f"{stage}: cap {cap} exceeded"
        super().__init__(msg + (f" ({detail})" if detail else ""))

    def report(self) -> dict:
        return {"stage": self.stage, "cap": self.cap, "detail": self.detail}


class InputError(ValueError):
    """Malformed program text or structurally invalid input."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(where + message)
