import random

import pytest
from hypothesis import given, settings, strategies as st

import checks
from dyckref.downclosure import (Ideal, Profile, PumpAbstraction, almost_pumpfree, ap_to_vass,
                                 build_pump_transducer, closure_nfa, flatten_N0_subtrees, join_profiles,
                                 leaf_only_violations, padding, skeleton_runs, track_pump_transducer,
                                 undivided_pump_abstractions)
from dyckref.errors import CapExceeded
from dyckref.grammar import enumerate_pumps, parse_grammar, to_cnf
from dyckref.oracle import nfa_words, oracle_closure, vass_words
from dyckref.parser import parse_program
from dyckref.words import Effect, Shape, WordError

seeds = st.integers(min_value=0, max_value=10 ** 6)
LINEAR = "S -> a T\nT -> U ~x\nU -> S b | c\nS -> d S | x"


def cnf(text):
    return to_cnf(parse_grammar(text))


# ---------------------------------------------------------------- profiles and padding

def test_padding_examples():
    assert padding(Effect(0, 0)) == ()
    assert padding(Effect(1, 0)) == ("~x", "x")
    assert padding(Effect(2, -1)) == ("~x", "~x", "x")


def test_join_profiles_marked():
    h = Profile(Shape.HASH, Effect(0, 1), Effect(0, 0))
    b = Profile(Shape.BARHASH, Effect(1, -1), Effect(0, 0))
    assert join_profiles(h, b) == Profile(Shape.BOTH, Effect(0, 0), Effect(0, 0))
    with pytest.raises(WordError):
        join_profiles(b, h)


# ---------------------------------------------------------------- closure automata

@pytest.mark.parametrize("text", ["S -> a x S ~x | eps", "S -> x S ~x | #", "S -> a",
                                  "S -> a x S ~x a | b x S ~x b | ~x ~x # x x"])
def test_closure_examples(text):
    assert checks.closure_agrees(parse_grammar(text)) is True


def test_closure_erases_balanced_brackets():
    assert sorted(nfa_words(closure_nfa(parse_grammar("S -> a x S ~x | eps")), 3)) == [
        (), ("a",), ("a", "a"), ("a", "a", "a")]


def test_closure_keeps_dip():
    assert nfa_words(closure_nfa(parse_grammar("S -> ~x x")), 4) == {("~x", "x")}


def test_closure_of_empty_grammar():
    g = parse_grammar("S -> S a")
    assert nfa_words(closure_nfa(g), 4) == set()


def test_closure_profile_cap():
    with pytest.raises(CapExceeded):
        closure_nfa(parse_grammar("S -> x x x x x x"), cap=4)


def test_closure_rejects_other_brackets():
    with pytest.raises(WordError):
        closure_nfa(parse_grammar("S -> y ~y"))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_closure_matches_grammar(seed):
    g = checks.tame_sample(random.Random(seed))
    if g is None:
        return
    assert checks.closure_agrees(g) is not False


# ---------------------------------------------------------------- almost-pumpfree form

def test_almost_pumpfree_structure():
    e = almost_pumpfree(parse_grammar("S -> a x S ~x | eps"))
    assert leaf_only_violations(e) == []
    assert oracle_closure(e, 5).words == oracle_closure(parse_grammar("S -> a x S ~x | eps"), 5).words


def test_flatten_single_letter():
    assert nfa_words(flatten_N0_subtrees(cnf("S -> a | x S ~x"), "S"), 4) == {("a",)}


def test_flatten_balanced_closure():
    g = cnf("A -> x A ~x | eps")
    assert oracle_closure(flatten_N0_subtrees(g, "A"), 6).words == oracle_closure(g, 6).words


def test_flatten_zero_pump_spawns():
    words = nfa_words(flatten_N0_subtrees(cnf("A -> b A | c"), "A"), 6)
    assert [max(w.count("b") for w in words if len(w) <= n) for n in range(1, 6)] == [0, 1, 2, 3, 4]


def test_flatten_rejects_markers():
    with pytest.raises(ValueError):
        flatten_N0_subtrees(cnf("S -> a #"), "S")


# ---------------------------------------------------------------- pump abstractions

def test_abstraction_letters_and_dips():
    abs_ = undivided_pump_abstractions(cnf("S -> a x S ~x | eps"), "S")
    assert PumpAbstraction(0, 0) in abs_
    assert PumpAbstraction(0, 1, frozenset({"a"}), frozenset(), True) in abs_
    assert all(p.gamma_right == frozenset() for p in abs_)


def test_abstraction_increasing():
    abs_ = undivided_pump_abstractions(cnf("S -> x S ~x | eps"), "S", max_dip=1)
    assert PumpAbstraction(0, 1, increasing=True) in abs_
    assert all(p.increasing for p in abs_ if p != PumpAbstraction(0, 0))


def test_abstraction_without_pumps():
    assert undivided_pump_abstractions(cnf("S -> a b"), "S") == {PumpAbstraction(0, 0)}


def test_abstraction_replacement():
    r = PumpAbstraction(1, 0, frozenset({"a"})).replacement(("c",))
    assert r == ("~x", "x", ("star", frozenset({"a"})), "c", ("star", frozenset()))


# ---------------------------------------------------------------- pump transducers

def test_transducer_right_tape_is_outermost_first():
    t = build_pump_transducer(cnf(LINEAR), "S")
    assert (("a",), ("~x", "b")) in t.pairs(3)


def test_transducer_matches_pumps_on_linear_grammar():
    g = cnf(LINEAR)
    got = {(u, tuple(reversed(v))) for u, v in build_pump_transducer(g, "S").pairs(3)}
    want = {(p.left, p.right) for p in enumerate_pumps(g, "S", 12)
            if len(p.left) <= 3 and len(p.right) <= 3}
    assert got == want


def test_tracked_transducer_targets():
    t = build_pump_transducer(cnf("S -> x S ~x | eps"), "S")
    assert track_pump_transducer(t, (0, 1, 1, -1), 4).pairs(3) == {(("x",), ("~x",))}
    assert track_pump_transducer(t, (0, 2, 2, -2), 4).pairs(3) == {(("x", "x"), ("~x", "~x"))}
    assert track_pump_transducer(t, (1, 1, 0, 0), 4).pairs(3) == set()
    with pytest.raises(ValueError):
        track_pump_transducer(t, (5, 0, 0, 0), 4)


# ---------------------------------------------------------------- ideals and skeleton runs

def test_ideal_membership():
    i = Ideal((("star", frozenset({"a"})), ("letter", "b")))
    assert ("a", "a", "b") in i and () in i
    assert ("b", "a") not in i
    assert i.words(2) == {(), ("a",), ("b",), ("a", "a"), ("a", "b")}


def test_ideal_normalization():
    i = Ideal((("star", frozenset()), ("star", {"a"}), ("star", {"b"}), ("letter", "c"))).normalized()
    assert i.atoms == (("star", frozenset({"a", "b"})), ("letter", "c"))


def test_skeleton_runs_cover_pairs():
    t = track_pump_transducer(build_pump_transducer(cnf(LINEAR), "S"), (0, 0, 1, -1), 4)
    runs = skeleton_runs(t)
    assert runs
    for u, v in t.pairs(4):
        assert any(u in r.left and tuple(reversed(v)) in r.right for r in runs)


# ---------------------------------------------------------------- programs to VASS

PROGRAM = "states: q0 q1\ninit: q0\nfinal: q1\nevents: x\nhandlers: a b\nstart: a\n"


def test_ap_to_vass_balanced_body():
    p = parse_program(PROGRAM + "prod A -> x ~x\nrule q0 a A q1\n")
    assert vass_words(ap_to_vass(p), 6).words == {()}


def test_ap_to_vass_keeps_dip():
    p = parse_program(PROGRAM + "prod A -> ~x x\nrule q0 a A q1\n")
    assert vass_words(ap_to_vass(p), 6).words == {("~x", "x")}


def test_ap_to_vass_spawns():
    p = parse_program("states: q0 q1 q2\ninit: q0\nfinal: q2\nevents: x\nhandlers: a b\nstart: a\n"
                      "prod A -> b\nprod B -> ~x\nrule q0 a A q1\nrule q1 b B q2\n")
    assert vass_words(ap_to_vass(p), 4).words == {("~x",)}


def test_ap_to_vass_unposted_handler():
    p = parse_program("states: q0 q1 q2\ninit: q0\nfinal: q2\nevents: x\nhandlers: a b\nstart: a\n"
                      "prod A -> x\nprod B -> ~x\nrule q0 a A q1\nrule q1 b B q2\n")
    assert vass_words(ap_to_vass(p), 4).words == set()
