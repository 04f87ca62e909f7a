"""Exhaustive property checks shared by the module tests and the acceptance suite.

Each check returns its counterexamples; an empty list means the property held
on every input within the bound.
"""
from __future__ import annotations

import itertools
import random
from typing import NamedTuple

from dyckref import oracle
from dyckref.analysis import check_tame_pumping
from dyckref.downclosure import closure_nfa
from dyckref.errors import CapExceeded
from dyckref.generate import random_grammar, tame_shaped_grammar
from dyckref.grammar import to_cnf, trim
from dyckref.pipeline import Caps
from dyckref.words import (SymbolTable, Violation, classify_violation, composite_leq, is_admissible,
                           is_dyck, is_marked, syn_leq)
from dyckref.vass import Answer, labels, marked_dyck_factor, uniform_offset_zero

BRACKETS = ("x", "~x")
MARKED = ("x", "~x", "a", "#", "~#")


def words(alphabet, max_len: int):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


def classify_counterexamples(max_len: int = 10) -> list:
    """classify_violation is NONE exactly on Dyck words and matches the oracle's kind (two letters)."""
    table = SymbolTable(frozenset({"x", "y"}))
    bad = []
    for w in words(("x", "~x", "y", "~y"), max_len):
        kind = classify_violation(w, table)
        expected = oracle.oracle_classify(w, {"x", "y"})
        if (kind is Violation.NONE) != is_dyck(w, table) or (expected or "NONE") != kind.value:
            bad.append(w)
    return bad


def soundness_counterexamples(max_len: int = 8, max_v: int = 6) -> list:
    """u ⊴ v and r u s Dyck imply r v s Dyck."""
    dyck = [w for w in words(BRACKETS, max_len) if oracle.oracle_classify(w, {"x"}) is None]
    vs = list(words(BRACKETS, max_v))
    bad = []
    for w in dyck:
        for i in range(len(w) + 1):
            for j in range(i, len(w) + 1):
                r, u, s = w[:i], w[i:j], w[j:]
                for v in vs:
                    if syn_leq(u, v) and oracle.oracle_classify(r + v + s, {"x"}) is not None:
                        bad.append((r, u, s, v))
    return bad


def compatibility_counterexamples(max_len: int = 3) -> list:
    """u1 ⊑ v1 and u2 ⊑ v2 imply u1u2 ⊑ v1v2 whenever both concatenations are admissible."""
    admissible = [w for w in words(MARKED, max_len) if is_marked(w) and is_admissible(w)]
    below = [(u, v) for u in admissible for v in admissible if composite_leq(u, v)]
    bad = []
    for (u1, v1), (u2, v2) in itertools.product(below, repeat=2):
        u, v = u1 + u2, v1 + v2
        if not (is_marked(u) and is_marked(v) and is_admissible(u) and is_admissible(v)):
            continue
        if not composite_leq(u, v):
            bad.append((u1, u2, v1, v2))
    return bad


def admissibility_counterexamples(max_len: int = 7) -> list:
    """The closed-form admissibility test agrees with the embedding search."""
    return [z for z in words(MARKED, max_len)
            if is_marked(z) and is_admissible(z) != oracle.admissible_by_embedding(z)]


def order_counterexamples(max_len: int = 3) -> list:
    """⊑ agrees with the oracle's definition-level comparison and is a preorder."""
    admissible = [w for w in words(MARKED, max_len) if is_marked(w) and is_admissible(w)]
    bad = []
    rel = {(u, v): composite_leq(u, v) for u in admissible for v in admissible}
    for (u, v), holds in rel.items():
        if holds != oracle.below(u, v):
            bad.append(("oracle", u, v))
    for u in admissible:
        if not rel[u, u]:
            bad.append(("reflexive", u))
    by_left: dict = {}
    for (u, v), holds in rel.items():
        if holds:
            by_left.setdefault(u, []).append(v)
    for u, mids in by_left.items():
        for m in mids:
            for v in by_left.get(m, ()):
                if not rel[u, v]:
                    bad.append(("transitive", u, m, v))
    return bad


def stabilized_min_dip(g, a: str, lengths=range(4, 40, 4)):
    """Least enumerated dip of ``a`` once two consecutive length bounds agree; None if the
    enumeration budget runs out first."""
    prev = None
    for n in lengths:
        try:
            m = oracle.min_dip(g, a, n)
        except oracle.BudgetExceeded:
            return None
        if m is not None and m == prev:
            return m
        prev = m
    return prev


def marked_factor(w) -> bool:
    """w = u # v ~# z with v a one-letter Dyck word."""
    if w.count("#") != 1 or w.count("~#") != 1:
        return False
    i, j = w.index("#"), w.index("~#")
    return i < j and oracle.oracle_classify(w[i + 1:j], {"x"}) is None


class SliceTrial(NamedTuple):
    conclusive: bool      # the length-8 slice decides the question
    agree: bool           # the checker's answer matches the slice (only meaningful if conclusive)
    witness_ok: bool | None  # None when the checker produced no witness


def _slice(v):
    """Accepted words up to 8 and whether the language has no words of length 9 or 10."""
    lang = oracle.vass_words(v, 10)
    short = {w for w in lang.words if len(w) <= 8}
    return short, lang.complete and short == lang.words


def _witness_ok(v, run, good) -> bool:
    return v.is_run(run) and bool(run) and run[-1].dst in v.finals and good(labels(run))


def offset_trial(v, bound: int = 16) -> SliceTrial:
    """uniform_offset_zero against the bounded slice; raises BudgetExceeded on huge slices."""
    short, finite = _slice(v)
    bad = any(oracle.oracle_effect(w)[1] != 0 for w in short)
    r = uniform_offset_zero(v, bound)
    wit = None
    if r.answer is Answer.NO:
        wit = _witness_ok(v, r.source_run, lambda w: oracle.oracle_effect(w)[1] != 0)
    return SliceTrial(bad or finite, (r.answer is Answer.NO) == bad and r.answer is not Answer.INDETERMINATE, wit)


def marked_trial(v, bound: int = 16) -> SliceTrial:
    """marked_dyck_factor against the bounded slice."""
    short, finite = _slice(v)
    bad = any(marked_factor(w) for w in short)
    r = marked_dyck_factor(v, bound)
    wit = None
    if r.answer is Answer.FOUND:
        wit = _witness_ok(v, r.source_run, marked_factor)
    return SliceTrial(bad or finite, (r.answer is Answer.FOUND) == bad and r.answer is not Answer.INDETERMINATE, wit)


def tame_sample(rng: random.Random):
    """A random tame grammar with no short untame pump, or None."""
    if rng.random() < 0.5:
        g = tame_shaped_grammar(rng, markers=rng.random() < 0.4)
    else:
        g = trim(random_grammar(rng, terminals=("x", "~x", "a", "b")))
    if g.empty:
        return None
    c = to_cnf(g)
    if check_tame_pumping(c).status != "TAME" or oracle.untame_pump(c, 6) is not None:
        return None
    return g


def closure_agrees(g, max_len: int = 6):
    """Closure slices of g and of closure_nfa(g) agree; None when either side is inconclusive."""
    try:
        a = oracle.oracle_closure(g, max_len)
        b = oracle.oracle_closure(closure_nfa(g), max_len)
    except (CapExceeded, oracle.BudgetExceeded):
        return None
    if not (a.stable and b.stable):
        return None
    return a.words == b.words


def witness_validates(p, witness) -> bool:
    """The trace is a non-Dyck trace of an accepting run found by the oracle's own search."""
    trace = witness.trace
    if oracle.oracle_classify(trace, set(p.events)) is None:
        return False
    # bodies may post handlers, so they can be longer than the events they emit
    budget = oracle.OracleBudget(max_steps=len(witness.run), max_len=len(trace) + Caps().body)
    return trace in oracle.program_traces(p, budget)
