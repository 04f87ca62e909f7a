"""Command line entry point: ``dyckref {check,oracle,cross-validate,dump,stats}``.

Exit codes: 0 included, 1 not included, 2 indeterminate or budget exhausted,
3 input error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time

from .downclosure import ap_to_vass, closure_nfa
from .errors import CapExceeded, InputError
from .oracle import BudgetExceeded, OracleBudget, oracle_dyck_inclusion
from .parser import load_program
from .pipeline import Caps, body_cnf, verify
from .program import build_aux, restrict_to_useful
from .verdict import Status
from .words import show

INPUT_ERROR = 3


def _caps(args) -> Caps:
    return Caps(dip=args.cap_dip, offset=args.cap_offset, states=args.cap_states, steps=args.budget_steps)


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def cmd_check(args) -> int:
    p = load_program(args.file)
    v = verify(p, _caps(args))
    _emit(args, {"file": args.file, **v.to_json(timings=args.timings)}, str(v))
    return v.exit_code


def _oracle_budget(args) -> OracleBudget:
    return OracleBudget(max_len=args.oracle_len, max_steps=args.budget_steps)


def cmd_oracle(args) -> int:
    p = load_program(args.file)
    try:
        res = oracle_dyck_inclusion(p, _oracle_budget(args))
    except BudgetExceeded as err:
        _emit(args, {"file": args.file, "verdict": "BUDGET", "detail": str(err)}, f"BUDGET {err}")
        return 2
    if res.found:
        payload = {"file": args.file, "verdict": "NOT_INCLUDED", "kind": res.violation,
                   "witness": {"trace": show(res.witness.trace), "run": list(res.witness.steps)}}
        text = "\n".join([f"NOT_INCLUDED ({res.violation})", f"  witness trace: {show(res.witness.trace)}",
                          *(f"    {s}" for s in res.witness.steps)])
        _emit(args, payload, text)
        return 1
    payload = {"file": args.file, "verdict": "NO_VIOLATION_WITHIN_BUDGET", "exhausted": res.exhausted}
    _emit(args, payload, "NO_VIOLATION_WITHIN_BUDGET" + (" (search was cut by the budget)" if res.exhausted else ""))
    return 0


def cross_validate(p, caps: Caps, budget: OracleBudget) -> dict:
    """Verdict of the pipeline next to the oracle's bounded search."""
    v = verify(p, caps)
    try:
        o = oracle_dyck_inclusion(p, budget)
        oracle = o.violation or "NONE"
    except BudgetExceeded:
        oracle = "BUDGET"
    problems = []
    if v.status is Status.INCLUDED and oracle in ("OV", "DV", "MV"):
        problems.append("pipeline says INCLUDED but the oracle found a violation")
    if v.status is Status.NOT_INCLUDED and v.witness is None and oracle == "NONE":
        problems.append("NOT_INCLUDED without witness and no oracle violation")
    return {"verdict": v.status.value, "kind": v.kind.value if v.kind else None,
            "witness": show(v.witness.trace) if v.witness else None,
            "oracle": oracle, "agree": not problems, "problems": problems}


def cmd_cross_validate(args) -> int:
    caps, budget = _caps(args), _oracle_budget(args)
    reports = []
    for f in args.files:
        reports.append({"file": f, **cross_validate(load_program(f), caps, budget)})
    if args.random:
        from .generate import random_program
        rng = random.Random(args.seed)
        for i in range(args.random):
            reports.append({"file": f"random#{i}", **cross_validate(random_program(rng), caps, budget)})
    lines = [f"{r['file']}: {r['verdict']}{' (' + r['kind'] + ')' if r['kind'] else ''} "
             f"oracle={r['oracle']} {'ok' if r['agree'] else 'DISAGREE: ' + '; '.join(r['problems'])}"
             for r in reports]
    _emit(args, {"reports": reports}, "\n".join(lines))
    return 0 if all(r["agree"] for r in reports) else 1


def cmd_dump(args) -> int:
    p = load_program(args.file)
    caps = _caps(args)
    try:
        if args.what == "cnf":
            out = str(body_cnf(restrict_to_useful(p, caps.basis)))
        elif args.what == "aux":
            out = str(build_aux(restrict_to_useful(p, caps.basis), args.variant))
        elif args.what == "nfa":
            q = restrict_to_useful(p, caps.basis)
            parts = []
            for a in q.body_nonterminals():
                parts.append(f"// closure automaton of {a}\n{closure_nfa(q.grammar.with_start(a), caps.dip, caps.states)}")
            out = "\n".join(parts)
        else:
            aux = build_aux(restrict_to_useful(p, caps.basis), args.variant)
            out = str(ap_to_vass(aux, caps.dip, caps.states))
    except CapExceeded as err:
        print(f"cap exhausted: {err}", file=sys.stderr)
        return 2
    print(out)
    return 0


def cmd_stats(args) -> int:
    p = load_program(args.file)
    caps = _caps(args)
    stats: dict = {"states": len(p.states), "rules": len(p.rules), "productions": len(p.grammar.productions),
                   "size": p.size}
    try:
        t0 = time.perf_counter()
        q = restrict_to_useful(p, caps.basis)
        stats["useful_nonterminals"] = len(q.grammar.nonterminals) if q.rules else 0
        stats["cnf_productions"] = len(body_cnf(q).productions)
        for which in "ODM":
            aux = build_aux(q, which)
            v = ap_to_vass(aux, caps.dip, caps.states)
            stats[f"aux_{which}_size"] = aux.size
            stats[f"vass_{which}"] = {"states": len(v.states), "edges": len(v.edges), "counters": len(v.counters)}
        if args.timings:
            stats["seconds"] = round(time.perf_counter() - t0, 6)
    except CapExceeded as err:
        stats["cap_report"] = [err.report()]
    text = "\n".join(f"{k}: {v}" for k, v in stats.items())
    _emit(args, {"file": args.file, **stats}, text)
    return 2 if "cap_report" in stats else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap-dip", type=int, default=Caps.dip, help="largest effect value tracked in closures")
    common.add_argument("--cap-offset", type=int, default=Caps.offset, help="counter range of the trackers")
    common.add_argument("--cap-states", type=int, default=Caps.states, help="closure automaton state budget")
    common.add_argument("--budget-steps", type=int, default=Caps.steps, help="scheduler steps for witness and oracle searches")
    common.add_argument("--oracle-len", type=int, default=OracleBudget.max_len, help="trace length bound of the oracle")
    common.add_argument("--seed", type=int, default=0, help="seed for randomly generated programs")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--timings", action="store_true", help="include per-stage timings in the report")

    ap = argparse.ArgumentParser(prog="dyckref", description="Dyck inclusion checker for asynchronous programs.")
    sub = ap.add_subparsers(dest="command", required=True)
    s = sub.add_parser("check", parents=[common], help="decide whether every trace is a Dyck word")
    s.add_argument("file")
    s.set_defaults(run=cmd_check)
    s = sub.add_parser("oracle", parents=[common], help="bounded brute-force search for a violation")
    s.add_argument("file")
    s.set_defaults(run=cmd_oracle)
    s = sub.add_parser("cross-validate", parents=[common], help="compare check against the oracle")
    s.add_argument("files", nargs="*")
    s.add_argument("--random", type=int, default=0, help="also compare on N random programs")
    s.set_defaults(run=cmd_cross_validate)
    s = sub.add_parser("dump", parents=[common], help="print an intermediate artifact")
    s.add_argument("what", choices=("cnf", "aux", "nfa", "vass"))
    s.add_argument("file")
    s.add_argument("--variant", choices=("O", "D", "M"), default="O", help="auxiliary program for aux/vass")
    s.set_defaults(run=cmd_dump)
    s = sub.add_parser("stats", parents=[common], help="sizes of the intermediate artifacts")
    s.add_argument("file")
    s.set_defaults(run=cmd_stats)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except InputError as err:
        print(f"{getattr(args, 'file', '')}:{err}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
