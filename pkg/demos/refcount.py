"""Check the reference-counting program and its two-decrement mutation."""
from pathlib import Path

from dyckref import load_program, verify

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

for name in ("refcount", "refcount_bug"):
    print(f"== {name}")
    print(verify(load_program(CORPUS / f"{name}.ap")))
