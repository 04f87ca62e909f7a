import pytest
from hypothesis import given, strategies as st

import checks
from dyckref.oracle import below, oracle_effect
from dyckref.words import (CANONICAL, Shape, SymbolTable, Violation, WordError, classify_violation,
                           composite_leq, composite_leq_prime, dip, effect, is_admissible, is_dyck,
                           offset, project, rho, split_marked, subword_leq, syn_leq, word)

XY = SymbolTable(frozenset({"x", "y"}))
w = word


# ---------------------------------------------------------------- offsets and dips

def test_offset_examples():
    assert offset(w("x x ~x")) == 1
    assert offset(()) == 0
    assert offset(w("a ~x x c")) == 0


def test_dip_examples():
    assert dip(w("x ~x ~x x")) == 1
    assert dip(()) == 0
    assert dip(w("~x ~x x x")) == 2


def test_is_dyck_examples():
    assert is_dyck(w("x y ~y ~x"), XY)
    assert not is_dyck(w("x x ~x ~y"), XY)
    assert is_dyck((), XY)


def test_is_dyck_rejects_markers_and_handlers():
    with pytest.raises(WordError):
        is_dyck(w("x # ~x"))
    with pytest.raises(WordError):
        is_dyck(w("x a ~x"))


def test_classify_examples():
    assert classify_violation(w("x ~x ~x x")) is Violation.DV
    assert classify_violation(w("x x ~x")) is Violation.OV
    assert classify_violation(w("x x ~x ~y"), XY) is Violation.MV
    assert classify_violation(w("x y ~y ~x"), XY) is Violation.NONE


def test_project_examples():
    assert project(w("a ~x x c"), {"x", "~x"}) == w("~x x")
    assert project(w("a ~x x c"), {"a", "c"}) == w("a c")
    assert project((), {"x"}) == ()


def test_rho_examples():
    assert rho(w("x y ~y"), XY) == w("x x ~x")
    assert rho((), XY) == ()
    assert rho(w("# y ~#"), XY) == w("# x ~#")


# ---------------------------------------------------------------- orders

def test_subword_examples():
    assert subword_leq(w("a c"), w("a b c"))
    assert subword_leq((), w("a b"))
    assert not subword_leq(w("a b"), w("b a"))


def test_syn_leq_examples():
    assert syn_leq(w("~x x"), w("x ~x"))
    assert syn_leq(w("x ~x x"), w("x ~x x"))
    assert not syn_leq(w("x"), w("x x"))
    # equal offsets and equal dips
    assert syn_leq(w("x"), w("x x ~x"))


def test_syn_leq_rejects_other_letters():
    with pytest.raises(WordError):
        syn_leq(w("y"), w("x"))


def test_composite_leq_prime_examples():
    assert composite_leq_prime(w("a ~x x c"), w("x a b c ~x"))
    assert composite_leq_prime(w("a x"), w("a x"))
    assert not composite_leq_prime(w("a"), w("b"))


def test_split_marked_examples():
    assert split_marked(w("u # v ~# z")) == (w("v"), w("u z"), Shape.BOTH)
    assert split_marked(w("v")) == (w("v"), (), Shape.NONE)
    assert split_marked(w("a # b")) == (w("b"), w("a"), Shape.HASH)
    assert split_marked(w("a ~# b")) == (w("a"), w("b"), Shape.BARHASH)


@pytest.mark.parametrize("bad", ["# # x", "~# x #", "~# ~#"])
def test_split_marked_rejects_bad_patterns(bad):
    with pytest.raises(WordError):
        split_marked(w(bad))


def test_admissible_examples():
    assert is_admissible(w("# x ~x ~#"))
    assert not is_admissible(w("# ~x"))
    assert is_admissible(w("~x ~x"))
    assert is_admissible(w("x ~x ~x ~#"))
    assert not is_admissible(w("# x ~#"))


def test_composite_leq_examples():
    assert composite_leq(w("a ~x x c # a"), w("x a b c ~x # a b"))
    assert composite_leq(w("x # a"), w("x # a"))
    assert composite_leq(w("# ~#"), w("# x ~x ~#"))
    assert not composite_leq(w("# a"), w("a #"))


def test_composite_leq_rejects_inadmissible():
    with pytest.raises(WordError):
        composite_leq(w("# ~x"), w("# ~x"))


# ---------------------------------------------------------------- properties

letters = st.sampled_from(["x", "~x", "a", "b"])
bracket_words = st.lists(st.sampled_from(["x", "~x"]), max_size=12).map(tuple)
mixed_words = st.lists(letters, max_size=12).map(tuple)


@given(mixed_words)
def test_effect_invariants(u):
    e = effect(u)
    assert e.dip >= max(0, -e.offset)
    assert e == oracle_effect(u)


@given(bracket_words)
def test_dyck_iff_zero_effect(u):
    assert is_dyck(u) == (effect(u) == (0, 0))


@given(mixed_words, mixed_words)
def test_effect_composes(u, v):
    from dyckref.words import compose
    assert compose(effect(u), effect(v)) == effect(u + v)


@given(bracket_words, bracket_words, bracket_words)
def test_syn_leq_preorder(u, v, z):
    assert syn_leq(u, u)
    if syn_leq(u, v) and syn_leq(v, z):
        assert syn_leq(u, z)


@given(mixed_words, mixed_words, mixed_words)
def test_composite_leq_prime_preorder(u, v, z):
    assert composite_leq_prime(u, u)
    if composite_leq_prime(u, v) and composite_leq_prime(v, z):
        assert composite_leq_prime(u, z)


marked_words = st.tuples(mixed_words, st.sampled_from(["", "#", "~#", "# ~#"]), mixed_words, mixed_words)


def _assemble(parts):
    left, markers, mid, right = parts
    ms = markers.split()
    if len(ms) == 2:
        return left + ("#",) + mid + ("~#",) + right
    if ms:
        return left + (ms[0],) + right
    return left


@given(marked_words, marked_words)
def test_composite_leq_matches_oracle(p1, p2):
    z1, z2 = _assemble(p1), _assemble(p2)
    if is_admissible(z1) and is_admissible(z2):
        assert composite_leq(z1, z2) == below(z1, z2)
        assert composite_leq(z1, z1)


def test_classification_exhaustive():
    assert checks.classify_counterexamples(8) == []


def test_syntactic_soundness_exhaustive():
    assert checks.soundness_counterexamples(8, 6) == []


def test_concatenation_compatibility_exhaustive():
    assert checks.compatibility_counterexamples(3) == []


def test_admissibility_matches_embedding_search():
    assert checks.admissibility_counterexamples(7) == []


def test_marked_order_is_a_preorder():
    assert checks.order_counterexamples(3) == []


def test_canonical_table_has_one_letter():
    assert CANONICAL.dyck_letters == frozenset({"x"})
