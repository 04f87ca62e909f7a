import itertools
import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from dyckref.analysis import check_tame_pumping
from dyckref.generate import random_program
from dyckref.oracle import OracleBudget, program_runs
from dyckref.parser import load_program, parse_program
from dyckref.pipeline import body_cnf
from dyckref.program import (Configuration, Rule, StepError, Transducer, TransductionError,
                             apply_transduction, build_aux, dip_transducer, enumerate_traces,
                             initial_configuration, mismatch_transducer, rho_transducer, step,
                             useful_nonterminals)
from dyckref.words import BARHASH, HASH, Shape, SymbolTable, is_dyck, marker_shape, offset, rho, split_marked

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
XY = SymbolTable(frozenset({"x", "y"}))
seeds = st.integers(min_value=0, max_value=10 ** 6)


def single(body: str, events: str = "x", extra: str = "") -> object:
    """One handler ``a`` whose body nonterminal A derives ``body`` alternatives."""
    alts = "\n".join(f"prod A -> {'' if alt.strip() == 'eps' else alt.strip()}" for alt in body.split("|"))
    return parse_program(f"states: q0 q1\ninit: q0\nfinal: q1\nevents: {events}\nhandlers: a b\n"
                         f"start: a\n{alts}\n{extra}rule q0 a A q1\n")


def traces(p, steps=4, word=4):
    return enumerate_traces(p, steps, word)


# ---------------------------------------------------------------- semantics

def test_step_emits_and_posts():
    p = single("x b")
    c, out = step(p, initial_configuration(p), Rule("q0", "a", "A", "q1"), ["x", "b"])
    assert c == Configuration.of("q1", ["b"]) and out == ("x",)


def test_step_with_empty_body():
    p = single("eps")
    c, out = step(p, Configuration.of("q0", ["a", "b"]), Rule("q0", "a", "A", "q1"), [])
    assert c == Configuration.of("q1", ["b"]) and out == ()


def test_step_spawns_twice():
    p = single("b b")
    c, _ = step(p, initial_configuration(p), Rule("q0", "a", "A", "q1"), ["b", "b"])
    assert c.count("b") == 2 and c.count("a") == 0


@pytest.mark.parametrize("conf,body", [(Configuration.of("q0", ["b"]), ["x", "b"]),
                                       (Configuration.of("q0", ["a"]), ["b", "x"])])
def test_step_errors(conf, body):
    p = single("x b")
    with pytest.raises(StepError):
        step(p, conf, Rule("q0", "a", "A", "q1"), body)


def test_configuration_rejects_negative():
    with pytest.raises(StepError):
        Configuration.of("q0", {"a": -1})


def test_traces_two_steps():
    p = parse_program("states: q0 q1 q2\ninit: q0\nfinal: q2\nevents: x\nhandlers: a b\nstart: a\n"
                      "prod A -> x b\nprod B -> ~x\nrule q0 a A q1\nrule q1 b B q2\n")
    assert traces(p) == {("x", "~x")}


def test_traces_unreachable_final():
    p = parse_program("states: q0 q1 q2\ninit: q0\nfinal: q2\nevents: x\nhandlers: a\nstart: a\n"
                      "prod A -> x\nrule q0 a A q1\n")
    assert traces(p) == set()


def test_traces_empty_word():
    assert traces(single("eps")) == {()}


# ---------------------------------------------------------------- useful nonterminals

def test_useful_excludes_unmentioned():
    p = parse_program("states: q0 q1\ninit: q0\nfinal: q1\nevents: x\nhandlers: a\nstart: a\n"
                      "prod A -> x\nprod Z -> ~x\nrule q0 a A q1\n")
    assert useful_nonterminals(p) == {"A"}


def test_useful_includes_start_body():
    assert "A" in useful_nonterminals(single("x ~x"))


def test_useful_excludes_unproductive_sibling():
    p = single("x B | eps", extra="prod B -> B x\n")
    assert useful_nonterminals(p) == {"A"}


def test_useful_needs_accepting_run():
    p = parse_program("states: q0 q1 q2\ninit: q0\nfinal: q2\nevents: x\nhandlers: a b\nstart: a\n"
                      "prod A -> x\nprod B -> ~x\nrule q0 a A q1\nrule q1 b B q2\n")
    # b is never posted, so q2 is unreachable
    assert useful_nonterminals(p) == set()


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_useful_matches_enumerated_runs(seed):
    p = random_program(random.Random(seed))
    useful = useful_nonterminals(p)
    seen = set()
    for _, steps in program_runs(p, OracleBudget(max_steps=6, max_len=6)):
        seen.update(s.split("/")[1].split("-->")[0] for s in steps)
    # every body of a bounded accepting run is useful
    assert seen <= useful


# ---------------------------------------------------------------- transductions

def identity(events):
    letters = [*events, *("~" + e for e in events)]
    return Transducer(("t",), "t", {"t"}, tuple(("t", s, s, "t") for s in letters))


def test_identity_transduction():
    p = load_program(CORPUS / "handshake.ap")
    q = apply_transduction(p, identity(sorted(p.events)), out_events=p.events)
    assert traces(q, 5, 5) == traces(p, 5, 5)


def test_rho_transduction():
    p = single("x y ~y ~x", events="x y")
    assert traces(apply_transduction(p, rho_transducer(p.table), out_events={"x"})) == {("x", "x", "~x", "~x")}


def test_rejects_offset_changing_transducer():
    p = single("x")
    bad = Transducer(("t",), "t", {"t"}, (("t", "x", "~x", "t"),))
    with pytest.raises(TransductionError):
        apply_transduction(p, bad)


def test_aux_dip():
    assert traces(build_aux(single("~x x"), "D")) == {(HASH, BARHASH, "~x", "x")}


def test_aux_mismatch():
    assert traces(build_aux(single("x ~y", events="x y"), "M")) == {(HASH, BARHASH)}
    assert traces(build_aux(single("x ~x"), "M")) == set()


def corpus_programs():
    return [load_program(f) for f in sorted(CORPUS.glob("*.ap")) if f.stem != "malformed"]


def random_programs(n, seed=3):
    rng = random.Random(seed)
    return [random_program(rng) for _ in range(n)]


@pytest.mark.parametrize("p", corpus_programs() + random_programs(15))
def test_aux_o_is_rho_image(p):
    expected = {rho(w, p.table) for w in traces(p, 4, 4) if len(w) <= 6}
    got = {w for w in traces(build_aux(p, "O"), 4, 4) if len(w) <= 6}
    assert got == expected


@pytest.mark.parametrize("which", ["D", "M"])
@pytest.mark.parametrize("p", corpus_programs() + random_programs(15, seed=4))
def test_aux_markers_are_images(p, which):
    t = (dip_transducer if which == "D" else mismatch_transducer)(p.table)
    aux = build_aux(p, which)
    small = traces(p, 3, 3)
    large = traces(p, 3, 5)
    got = traces(aux, 3, 5)
    images_small = set().union(*(t.outputs(w) for w in small)) if small else set()
    images_large = set().union(*(t.outputs(w) for w in large)) if large else set()
    assert images_small <= got <= images_large
    for z in got:
        assert marker_shape(z) is Shape.BOTH


def test_dip_outputs_mark_a_barred_letter():
    t = dip_transducer(XY)
    for w in itertools.product(["x", "~x", "y", "~y"], repeat=4):
        for z in t.outputs(w):
            i = z.index(BARHASH)
            assert i + 1 < len(z) and z[i + 1].startswith("~")
            assert tuple(s for s in z if s not in (HASH, BARHASH)) == rho(w, XY)


LETTERS = ["x", "~x", "y", "~y"]


def has_marked_dyck_factor(t, w) -> bool:
    return any(is_dyck(split_marked(z)[0]) for z in t.outputs(w))


def test_word_level_correspondence():
    d, m = dip_transducer(XY), mismatch_transducer(XY)
    for n in range(7):
        for w in itertools.product(LETTERS, repeat=n):
            decomposed = (offset(rho(w, XY)) == 0 and not has_marked_dyck_factor(d, w)
                          and not has_marked_dyck_factor(m, w))
            assert decomposed == is_dyck(w, XY), w


@pytest.mark.parametrize("text", ["handshake.ap", "nested.ap", "refcount.ap"])
def test_transduction_keeps_tame(text):
    p = load_program(CORPUS / text)
    assert check_tame_pumping(body_cnf(p), p.table).status == "TAME"
    for which in "ODM":
        aux = build_aux(p, which)
        assert check_tame_pumping(body_cnf(aux), aux.table).status == "TAME"
