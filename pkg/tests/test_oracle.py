from pathlib import Path

import pytest

from dyckref.automata import Nfa
from dyckref.grammar import parse_grammar, to_cnf
from dyckref.oracle import (BudgetExceeded, Cover, OracleBudget, admissible, admissible_by_embedding,
                            below, closure_slice, forward_cover, grammar_words, min_dip, nfa_words,
                            oracle_classify, oracle_closure, oracle_dyck_inclusion, oracle_effect,
                            program_runs, pump_offsets, untame_pump, vass_words)
from dyckref.parser import load_program, parse_program
from dyckref.vass import VassBuilder

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
BUDGET = OracleBudget(max_steps=10, max_len=10)


# ---------------------------------------------------------------- words and orders

def test_effect_examples():
    assert oracle_effect(("x", "~x", "~x", "x")) == (1, 0)
    assert oracle_effect(("a", "#", "~#")) == (0, 0)
    assert oracle_effect(("y", "~y"), ("x",)) == (0, 0)


@pytest.mark.parametrize("w,kind", [(("~x", "x"), "DV"), (("x",), "OV"), (("x", "~y"), "MV"),
                                    (("x", "y", "~y", "~x"), None), (("x", "~x", "~y"), "DV")])
def test_classify_examples(w, kind):
    assert oracle_classify(w, {"x", "y"}) == kind


def test_admissible_agrees_with_embedding():
    for z in [("#", "x", "~x", "~#"), ("#", "~x"), ("x", "~x", "~x", "~#"), ("#", "x", "~#"), ("~x", "~x")]:
        assert admissible(z) == admissible_by_embedding(z)


def test_below_examples():
    assert below(("a",), ("a", "x", "~x"))
    assert below(("x",), ("x", "x", "~x"))
    assert not below(("x", "x"), ("x",))
    assert below(("#", "~#"), ("#", "x", "~x", "~#"))


def test_closure_slice_example():
    got = closure_slice([("a", "x", "~x")], 2)
    assert got == {(), ("a",), ("x", "~x"), ("~x", "x")}


# ---------------------------------------------------------------- languages

def test_grammar_words_examples():
    g = parse_grammar("S -> x S ~x | eps")
    assert grammar_words(g, 4) == {(), ("x", "~x"), ("x", "x", "~x", "~x")}
    assert grammar_words(parse_grammar("S -> a\nT -> b"), 2, start="T") == {("b",)}


def test_grammar_words_cap():
    with pytest.raises(BudgetExceeded):
        grammar_words(parse_grammar("S -> a S | b S | eps"), 12, cap=50)


def test_nfa_words_example():
    n = Nfa(("p", "q"), "p", {"q"}, (("p", "a", "q"), ("q", None, "p")))
    assert nfa_words(n, 3) == {("a",), ("a", "a"), ("a", "a", "a")}


def test_vass_words_counter_cap():
    b = VassBuilder(("c",))
    b.state("s")
    b.edge("s", "x", "s", {"c": 1})
    v = b.build("s", ["s"])
    lang = vass_words(v, 4, counter_cap=2)
    assert lang.words == {(), ("x",), ("x", "x")} and not lang.complete
    assert vass_words(v, 4, counter_cap=8).complete


def test_forward_cover_unknown_when_cut():
    b = VassBuilder(("c",))
    for q in ("s", "f"):
        b.state(q)
    b.edge("s", None, "s", {"c": 1})
    b.edge("s", None, "f", {"c": -20})
    assert forward_cover(b.build("s", ["f"]), counter_cap=8) is Cover.UNKNOWN


# ---------------------------------------------------------------- pumps and dips

def test_pump_offsets_example():
    assert pump_offsets(to_cnf(parse_grammar("S -> x S | eps")), "S", 4) == {(1, 0): 2, (2, 0): 4}


def test_untame_pump_example():
    g = to_cnf(parse_grammar("S -> x S | eps"))
    assert untame_pump(g, 6) == ("S", 1, 0)
    assert untame_pump(to_cnf(parse_grammar("S -> x S ~x | eps")), 6) is None


def test_min_dip_example():
    assert min_dip(parse_grammar("S -> ~x S x | ~x x"), "S", 8) == 1
    assert min_dip(parse_grammar("S -> S a"), "S", 8) is None


# ---------------------------------------------------------------- programs

@pytest.mark.parametrize("name,kind,trace", [("refcount", None, None),
                                             ("refcount_bug", "DV", ("x", "~x", "~x")),
                                             ("single_x", "OV", ("x",)),
                                             ("dip", "DV", ("~x", "x")),
                                             ("mismatch", "MV", ("x", "~y"))])
def test_inclusion_on_corpus(name, kind, trace):
    r = oracle_dyck_inclusion(load_program(CORPUS / f"{name}.ap"), BUDGET)
    assert r.violation == kind
    assert (r.witness.trace if r.witness else None) == trace


def test_program_runs_shortest_first():
    p = parse_program("states: q0\ninit: q0\nfinal: q0\nevents: x\nhandlers: a\nstart: a\n"
                      "prod A -> x a\nrule q0 a A q0\n")
    traces = [t for t, _ in program_runs(p, OracleBudget(max_steps=3, max_len=3))]
    assert traces == [(), ("x",), ("x", "x"), ("x", "x", "x")]


def test_budget_rejects_negative():
    with pytest.raises(ValueError):
        OracleBudget(max_len=-1)


# ---------------------------------------------------------------- closures

def test_oracle_closure_of_callable():
    c = oracle_closure(lambda n: {("x",) * k + ("~x",) * k for k in range(n)}, 2)
    assert c.stable and c.words == {(), ("x", "~x"), ("~x", "x")}


def test_oracle_closure_grammar_and_nfa_agree():
    g = parse_grammar("S -> a x S ~x | eps")
    n = Nfa(("p",), "p", {"p"}, (("p", "a", "p"),))
    assert oracle_closure(g, 4).words == oracle_closure(n, 4).words
