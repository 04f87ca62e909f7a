import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from dyckref import cli
from dyckref.errors import InputError
from dyckref.generate import random_program
from dyckref.oracle import BudgetExceeded, OracleBudget, oracle_dyck_inclusion
from dyckref.parser import format_program, load_program, parse_program
from dyckref.pipeline import Caps, body_cnf, verify, witness_search
from dyckref.verdict import Kind, Status
from dyckref.words import classify_violation, Violation

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
seeds = st.integers(min_value=0, max_value=10 ** 6)
HEAD = "states: q0 q1\ninit: q0\nfinal: q1\nevents: x\nhandlers: a\nstart: a\n"


def corpus(name):
    return load_program(CORPUS / f"{name}.ap")


# ---------------------------------------------------------------- parser

@pytest.mark.parametrize("text,where", [
    (HEAD + "prod A -> x # ~x\nrule q0 a A q1\n", (7, 13)),
    (HEAD + "prod A -> x\nrule q0 b A q1\n", (8, 9)),
    (HEAD + "prod A -> x\nrule q0 a A q9\n", (8, 13)),
    (HEAD.replace("init: q0\n", "") + "prod A -> x\nrule q0 a A q1\n", (1, 1)),
    (HEAD + "bogus\n", (7, 1)),
])
def test_parse_errors_have_positions(text, where):
    with pytest.raises(InputError) as err:
        parse_program(text)
    assert (err.value.line, err.value.column) == where


def test_malformed_corpus_file():
    with pytest.raises(InputError) as err:
        corpus("malformed")
    assert str(err.value).startswith("7:13:")


def test_missing_file():
    with pytest.raises(InputError):
        load_program(CORPUS / "does_not_exist.ap")


@pytest.mark.parametrize("name", ["refcount", "refcount_bug", "handshake", "nested", "mismatch"])
def test_format_round_trip(name):
    p = corpus(name)
    assert parse_program(format_program(p)) == p


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_format_round_trip_random(seed):
    p = random_program(random.Random(seed))
    assert parse_program(format_program(p)) == p


# ---------------------------------------------------------------- verdicts

@pytest.mark.parametrize("name,status,kind,trace", [
    ("refcount", Status.INCLUDED, None, None),
    ("handshake", Status.INCLUDED, None, None),
    ("nested", Status.INCLUDED, None, None),
    ("refcount_bug", Status.NOT_INCLUDED, Kind.DV, ("x", "~x", "~x")),
    ("single_x", Status.NOT_INCLUDED, Kind.OV, ("x",)),
    ("dip", Status.NOT_INCLUDED, Kind.DV, ("~x", "x")),
    ("mismatch", Status.NOT_INCLUDED, Kind.MV, ("x", "~y")),
    ("nontame", Status.NOT_INCLUDED, Kind.NON_TAME, ("x",)),
])
def test_corpus_verdicts(name, status, kind, trace):
    v = verify(corpus(name))
    assert (v.status, v.kind) == (status, kind)
    assert (v.witness.trace if v.witness else None) == trace


def test_witness_is_a_run_of_the_program():
    p = corpus("refcount_bug")
    v = verify(p)
    assert classify_violation(v.witness.trace, p.table) is Violation.DV
    assert len(v.witness.run) == 5 and v.witness.run[0].startswith("(r0, [init])")


def test_witness_search_kinds():
    p = corpus("refcount_bug")
    assert witness_search(p, Kind.DV).witness.trace == ("x", "~x", "~x")
    assert witness_search(p, Kind.MV).witness is None


def test_witness_search_exhausts_caps():
    p = parse_program(HEAD.replace("final: q1", "final: q0") + "prod A -> x a\nrule q0 a A q0\n")
    r = witness_search(p, Kind.DV, Caps(steps=3))
    assert r.witness is None and r.exhausted


def test_empty_program_is_included():
    p = parse_program(HEAD.replace("handlers: a", "handlers: a b") + "prod B -> x\nrule q0 b B q1\n")
    assert verify(p).status is Status.INCLUDED


def test_tame_cap_is_indeterminate():
    v = verify(corpus("refcount"), Caps(tame_nodes=0))
    assert v.status is Status.INDETERMINATE and v.cap_report


def test_closure_cap_is_indeterminate():
    v = verify(corpus("nested"), Caps(dip=0))
    assert v.status is Status.INDETERMINATE
    assert v.cap_report and v.cap_report[0].stage


def test_body_cnf_is_rooted():
    g = body_cnf(corpus("refcount"))
    assert g.is_cnf()


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_verify_matches_oracle(seed):
    p = random_program(random.Random(seed))
    v = verify(p)
    try:
        o = oracle_dyck_inclusion(p, OracleBudget(max_steps=8, max_len=8))
    except BudgetExceeded:
        o = None
    if v.status is Status.NOT_INCLUDED:
        assert classify_violation(v.witness.trace, p.table) is not Violation.NONE
    if v.status is Status.INCLUDED and o is not None:
        assert not o.found
    if o is not None and o.found:
        assert v.status is not Status.INCLUDED


# ---------------------------------------------------------------- command line

def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name,code", [("refcount", 0), ("refcount_bug", 1)])
def test_cli_exit_codes(capsys, name, code):
    assert run_cli(capsys, "check", str(CORPUS / f"{name}.ap"))[0] == code


def test_cli_input_error(capsys):
    code, _, err = run_cli(capsys, "check", str(CORPUS / "malformed.ap"))
    assert code == 3 and "7:13" in err


def test_cli_json_report(capsys):
    code, out, _ = run_cli(capsys, "check", str(CORPUS / "refcount_bug.ap"), "--format", "json", "--timings")
    report = json.loads(out)
    assert code == 1
    assert report["verdict"] == "NOT_INCLUDED" and report["kind"] == "DV"
    assert report["witness"]["trace"] == "x ~x ~x"
    assert set(report) == {"file", "verdict", "kind", "witness", "cap_report", "detail", "timings"}


def test_cli_oracle(capsys):
    code, out, _ = run_cli(capsys, "oracle", str(CORPUS / "single_x.ap"))
    assert code == 1 and out.startswith("NOT_INCLUDED (OV)")


def test_cli_cross_validate(capsys):
    code, out, _ = run_cli(capsys, "cross-validate", str(CORPUS / "refcount.ap"), str(CORPUS / "dip.ap"),
                           "--random", "3")
    assert code == 0 and out.count(" ok") == 5


@pytest.mark.parametrize("what", ["cnf", "aux", "nfa", "vass"])
def test_cli_dump(capsys, what):
    code, out, _ = run_cli(capsys, "dump", what, str(CORPUS / "handshake.ap"))
    assert code == 0 and out.strip()


def test_cli_stats(capsys):
    code, out, _ = run_cli(capsys, "stats", str(CORPUS / "refcount.ap"), "--format", "json")
    stats = json.loads(out)
    assert code == 0 and stats["rules"] == 11 and "vass_O" in stats
