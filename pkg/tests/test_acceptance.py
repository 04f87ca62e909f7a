"""The ten acceptance criteria, each timed against its runtime limit.

Every criterion prints one PASS/FAIL line; the lines are repeated in the
pytest terminal summary.
"""
import random
from pathlib import Path

import checks
from acceptance_log import criterion
from dyckref.analysis import check_tame_pumping, pump_is_tame
from dyckref.generate import random_cnf_grammar, random_program, random_uniform_grammar, random_vass
from dyckref.grammar import NonUniform, mindip, nonterminal_offsets, parse_grammar, to_cnf, trim
from dyckref.oracle import (BudgetExceeded, OracleBudget, oracle_coverability, oracle_dyck_inclusion,
                            pump_is_untame, untame_pump)
from dyckref.parser import load_program
from dyckref.pipeline import verify
from dyckref.verdict import Kind, Status
from dyckref.words import SymbolTable, Violation, classify_violation, composite_leq, composite_leq_prime, word

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
XY = SymbolTable(frozenset({"x", "y"}))


def test_c1_violation_examples():
    with criterion("C1 violation classification examples", 1, {}):
        assert classify_violation(word("x ~x ~x x")) is Violation.DV
        assert classify_violation(word("x x ~x")) is Violation.OV
        assert classify_violation(word("x x ~x ~y"), XY) is Violation.MV


def test_c2_order_examples():
    with criterion("C2 order examples", 1, {}):
        assert composite_leq_prime(word("a ~x x c"), word("x a b c ~x"))
        assert composite_leq(word("a ~x x c # a"), word("x a b c ~x # a b"))


def test_c3_tame_pumping():
    note = {}
    with criterion("C3 tame pumping vs pump enumeration", 300, note):
        for text in ("S -> x S | eps", "S -> ~x S x | eps", "S -> a x S | eps"):
            g = to_cnf(parse_grammar(text))
            r = check_tame_pumping(g)
            assert r.status == "NOT_TAME" and not pump_is_tame(r.pump) and pump_is_untame(g, r.pump)
        assert check_tame_pumping(to_cnf(parse_grammar("S -> x S ~x | eps"))).status == "TAME"
        rng = random.Random(1)
        checked = disagree = 0
        while checked < 200:
            g = trim(random_cnf_grammar(rng))
            if g.empty:
                continue
            checked += 1
            r = check_tame_pumping(g)
            found = untame_pump(g, 6)
            if r.status == "TAME":
                disagree += found is not None
            else:
                disagree += not (r.status == "NOT_TAME" and pump_is_untame(g, r.pump))
        note.update(grammars=checked, disagreements=disagree)
        assert disagree == 0


def test_c4_mindip():
    note = {}
    with criterion("C4 mindip vs stabilized enumeration", 120, note):
        rng = random.Random(4)
        checked = disagree = skipped = 0
        while checked < 100:
            g = trim(random_uniform_grammar(rng))
            if g.empty or isinstance(nonterminal_offsets(g), NonUniform):
                continue
            got = mindip(g)
            expected = {a: checks.stabilized_min_dip(g, a) for a in g.nonterminals}
            if any(v is None for v in expected.values()):
                skipped += 1
                continue
            checked += 1
            disagree += got != expected
        note.update(grammars=checked, unstable_skipped=skipped, disagreements=disagree)
        assert disagree == 0


def test_c5_coverability():
    note = {}
    with criterion("C5 coverability vs forward search", 300, note):
        rng = random.Random(5)
        disagree = unknown = 0
        for _ in range(500):
            v = random_vass(rng)
            rep = oracle_coverability(v)
            if rep.agree is None:
                unknown += 1
            elif not rep.agree:
                disagree += 1
        note.update(vass=500, oracle_unknown=unknown, disagreements=disagree)
        assert disagree == 0


def _trials(rng, make, trial, want):
    conclusive = disagree = bad_witness = 0
    while conclusive < want:
        try:
            t = trial(make(rng))
        except BudgetExceeded:
            continue
        bad_witness += t.witness_ok is False
        if t.conclusive:
            conclusive += 1
            disagree += not t.agree
    return conclusive, disagree, bad_witness


def test_c6_vass_checks():
    note = {}
    with criterion("C6 offset and marked-factor checks vs bounded slices", 300, note):
        rng = random.Random(6)
        oc, od, ow = _trials(rng, lambda r: random_vass(r, alphabet=("x", "~x")), checks.offset_trial, 200)
        mc, md, mw = _trials(rng, lambda r: random_vass(r, alphabet=("x", "~x", "#", "~#"), max_edges=9),
                             checks.marked_trial, 200)
        note.update(offset_conclusive=oc, offset_disagreements=od, marked_conclusive=mc,
                    marked_disagreements=md, bad_witnesses=ow + mw)
        assert od == md == ow + mw == 0


HAND_CASES = ["S -> a x S ~x | eps", "S -> x S ~x | #", "S -> a x S ~x a | b x S ~x b | ~x ~x # x x"]


def test_c7_closure_equivalence():
    note = {}
    with criterion("C7 closure automata vs grammar closure slices", 600, note):
        results = [checks.closure_agrees(parse_grammar(t)) for t in HAND_CASES]
        rng = random.Random(7)
        n = 0
        while n < 50:
            g = checks.tame_sample(rng)
            if g is None:
                continue
            n += 1
            results.append(checks.closure_agrees(g))
        note.update(grammars=len(results), agree=results.count(True), disagree=results.count(False),
                    inconclusive=results.count(None))
        assert results.count(True) == len(results)


def test_c8_end_to_end():
    note = {}
    with criterion("C8 verify vs oracle on random programs and the corpus", 600, note):
        rng = random.Random(8)
        programs = [random_program(rng) for _ in range(60)]
        programs += [load_program(f) for f in sorted(CORPUS.glob("*.ap")) if f.stem != "malformed"]
        budget = OracleBudget(max_steps=10, max_len=10)
        unsound = bad_witness = no_witness = oracle_budget = 0
        statuses = {s: 0 for s in Status}
        for p in programs:
            v = verify(p)
            statuses[v.status] += 1
            try:
                o = oracle_dyck_inclusion(p, budget)
            except BudgetExceeded:
                o = None
                oracle_budget += 1
            if v.status is Status.INCLUDED and o is not None and o.found:
                unsound += 1
            if v.status is Status.NOT_INCLUDED:
                if v.witness is None:
                    no_witness += 1
                elif not checks.witness_validates(p, v.witness):
                    bad_witness += 1
        note.update(programs=len(programs), **{s.value.lower(): n for s, n in statuses.items()},
                    unsound=unsound, bad_witnesses=bad_witness, without_witness=no_witness,
                    oracle_budget_hits=oracle_budget)
        assert unsound == bad_witness == 0


def test_c9_reference_counting():
    note = {}
    with criterion("C9 reference counting example", 30, note):
        good = verify(load_program(CORPUS / "refcount.ap"))
        p = load_program(CORPUS / "refcount_bug.ap")
        bad = verify(p)
        note.update(refcount=good.status.value, mutation=f"{bad.status.value}({bad.kind.value if bad.kind else '-'})")
        assert good.status is Status.INCLUDED
        assert bad.status is Status.NOT_INCLUDED and bad.kind is Kind.DV
        assert checks.witness_validates(p, bad.witness)


def test_c10_exhaustive_properties():
    note = {}
    with criterion("C10 exhaustive word and order properties", 300, note):
        found = {
            "classify": checks.classify_counterexamples(8),
            "soundness": checks.soundness_counterexamples(8, 6),
            "compatibility": checks.compatibility_counterexamples(3),
            "admissibility": checks.admissibility_counterexamples(7),
            "preorder": checks.order_counterexamples(3),
        }
        note.update({k: len(v) for k, v in found.items()})
        assert all(not v for v in found.values())
