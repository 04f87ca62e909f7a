"""End-to-end Dyck inclusion check for asynchronous programs.

The stages run in order: useful-nonterminal elimination, the tame-pumping
check, the three auxiliary programs, their closure VASS, and the offset and
marked-factor checks.  A definite violation stops the pipeline; a cap hit turns
the answer into INDETERMINATE with a report of the exhausted cap.
"""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Optional

from .analysis import DEFAULT_NODE_BUDGET, check_tame_pumping
from .downclosure import DEFAULT_NFA_BUDGET, DEFAULT_PROFILE_CAP, ap_to_vass
from .errors import CapExceeded
from .grammar import Grammar, Production, _Fresh, to_cnf, trim
from .program import (AsyncProgram, Configuration, build_aux, handler_bodies,
                      initial_configuration, restrict_to_useful)
from .vass import DEFAULT_BASIS_BUDGET, DEFAULT_TRACK_BOUND, decide_variants
from .verdict import CapHit, Kind, Status, Verdict, Witness
from .words import Violation, classify_violation, effect, show


@dataclass(frozen=True)
class Caps:
    dip: int = DEFAULT_PROFILE_CAP        # effect values tracked while building closures
    offset: int = DEFAULT_TRACK_BOUND     # counter range of the offset and marked-factor trackers
    states: int = DEFAULT_NFA_BUDGET      # closure automaton states per body
    basis: int = DEFAULT_BASIS_BUDGET     # coverability basis elements
    tame_nodes: int = DEFAULT_NODE_BUDGET # branch-and-bound nodes of the tame check
    steps: int = 12                       # scheduler steps of the witness search
    body: int = 8                         # handler body length of the witness search
    configs: int = 200_000                # configurations of the witness search


_TARGETS: dict = {
    Kind.OV: lambda w, t: effect(w, t).offset != 0,
    Kind.DV: lambda w, t: effect(w, t).dip > 0,
    Kind.MV: lambda w, t: classify_violation(w, t) is Violation.MV,
    Kind.NON_TAME: lambda w, t: classify_violation(w, t) is not Violation.NONE,
}


@dataclass
class WitnessSearch:
    witness: Optional[Witness]
    exhausted: bool


def witness_search(p: AsyncProgram, kind: Kind, caps: Caps = Caps()) -> WitnessSearch:
    """Shortest accepted trace showing a violation of ``kind`` within the step and body caps.

    Runs are explored breadth first; among the violating traces of the first
    depth that has any, the least one (by length, then symbols) is returned.
    """
    wanted: Callable = _TARGETS[kind]
    table = p.table
    exhausted = False
    try:
        bodies = handler_bodies(p, caps.body, caps.configs)
    except CapExceeded:
        return WitnessSearch(None, True)
    start = (initial_configuration(p), ())
    layer = {start: ()}
    seen = {start}
    for depth in range(caps.steps + 1):
        hits = sorted(((len(t), t), run) for (c, t), run in layer.items()
                      if c.state == p.final and wanted(t, table))
        if hits:
            (_, trace), run = hits[0]
            return WitnessSearch(Witness(trace, run), exhausted)
        if depth == caps.steps:
            return WitnessSearch(None, exhausted or bool(layer))
        nxt = {}
        for (conf, trace), run in sorted(layer.items(), key=lambda kv: (kv[0][1], str(kv[0][0]))):
            for rule in p.rules:
                if rule.src != conf.state or conf.count(rule.handler) < 1:
                    continue
                for (emitted, posted), body in bodies[rule.nonterminal]:
                    bag = Counter(dict(conf.pending))
                    bag[rule.handler] -= 1
                    bag.update(dict(posted))
                    item = (Configuration.of(rule.dst, bag), trace + emitted)
                    if item in seen:
                        continue
                    if len(seen) >= caps.configs:
                        return WitnessSearch(None, True)
                    seen.add(item)
                    nxt[item] = run + (f"{conf} --{rule.handler}/{rule.nonterminal}--> "
                                       f"{rule.dst}  body: {show(body)}",)
        if not nxt:
            return WitnessSearch(None, exhausted)
        layer = nxt
    return WitnessSearch(None, exhausted)


def body_cnf(p: AsyncProgram) -> Grammar:
    """CNF of the grammar rooted at a fresh start deriving every rule body nonterminal."""
    g = p.grammar
    top = _Fresh([*g.nonterminals, *g.terminals])("ROOT")
    roots = [Production(top, (a,)) for a in p.body_nonterminals()]
    return to_cnf(trim(Grammar((top, *g.nonterminals), g.terminals, (*g.productions, *roots), top)))


class _Clock:
    def __init__(self):
        self.timings: dict = {}

    def run(self, stage: str, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        finally:
            self.timings[stage] = self.timings.get(stage, 0.0) + time.perf_counter() - t0


def _violation(p: AsyncProgram, kind: Kind, caps: Caps, clock: _Clock, detail: str,
               cap_report: list) -> Verdict:
    """NOT_INCLUDED verdict with a concrete witness when the bounded search finds one."""
    found = clock.run("witness", witness_search, p, kind, caps)
    if found.witness is None:
        note = "no witness within the search caps"
        return Verdict(Status.NOT_INCLUDED, kind, None, cap_report, f"{detail}; {note}", clock.timings)
    trace = found.witness.trace
    actual = classify_violation(trace, p.table)
    if actual is Violation.NONE:
        raise AssertionError(f"witness {show(trace)} is a Dyck word")
    if kind is not Kind.NON_TAME and actual.value != kind.value:
        detail = f"{detail}; the shortest violating trace is a {actual.value} violation"
        kind = Kind(actual.value)
    return Verdict(Status.NOT_INCLUDED, kind, found.witness, cap_report, detail, clock.timings)


def verify(p: AsyncProgram, caps: Caps = Caps()) -> Verdict:
    """Decide whether every trace of ``p`` is a Dyck word."""
    clock = _Clock()

    def indeterminate(err: CapExceeded, stage: str) -> Verdict:
        return Verdict(Status.INDETERMINATE, cap_report=[CapHit.of(err)],
                       detail=f"cap exhausted during {stage}", timings=clock.timings)

    try:
        q = clock.run("useful", restrict_to_useful, p, caps.basis)
    except CapExceeded as err:
        return indeterminate(err, "useful-nonterminal elimination")
    if not q.rules:
        return Verdict(Status.INCLUDED, detail="the program accepts no trace", timings=clock.timings)

    tame = clock.run("tame", check_tame_pumping, body_cnf(q), q.table, caps.tame_nodes)
    if tame.status == "INDETERMINATE":
        return Verdict(Status.INDETERMINATE, cap_report=[CapHit("tame check", caps.tame_nodes, tame.detail)],
                       detail="tame-pumping check did not finish", timings=clock.timings)
    if tame.status == "NOT_TAME":
        pump = tame.pump
        detail = f"pump {pump.nonterminal} =>+ {show(pump.left)} {pump.nonterminal} {show(pump.right)} is not tame"
        return _violation(q, Kind.NON_TAME, caps, clock, detail, [])

    try:
        aux = [clock.run("aux", build_aux, q, which) for which in "ODM"]
        vs = [clock.run("vass", ap_to_vass, a, caps.dip, caps.states) for a in aux]
    except CapExceeded as err:
        return indeterminate(err, "closure construction")
    verdict = clock.run("check", decide_variants, *vs, caps.offset, caps.offset, caps.basis, traced=False)
    if verdict.status is Status.NOT_INCLUDED:
        return _violation(q, verdict.kind, caps, clock, verdict.detail, verdict.cap_report)
    verdict.timings = clock.timings
    if verdict.status is Status.INDETERMINATE:
        verdict.detail = verdict.detail or "a tracker or coverability cap was exhausted"
    return verdict
