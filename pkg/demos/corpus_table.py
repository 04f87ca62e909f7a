"""Verdict, kind and witness for every program in the corpus."""
from pathlib import Path

from dyckref import InputError, load_program, verify
from dyckref.words import show

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

for f in sorted(CORPUS.glob("*.ap")):
    try:
        v = verify(load_program(f))
    except InputError as err:
        print(f"{f.stem:14} input error {err}")
        continue
    kind = v.kind.value if v.kind else ""
    wit = show(v.witness.trace) if v.witness else ""
    print(f"{f.stem:14} {v.status.value:14} {kind:9} {wit}")
