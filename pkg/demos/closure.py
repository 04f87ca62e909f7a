"""Closure automaton of a tame grammar next to a bounded slice of both closures."""
from dyckref.downclosure import closure_nfa
from dyckref.grammar import parse_grammar
from dyckref.oracle import oracle_closure
from dyckref.words import show

g = parse_grammar("S -> a x S ~x a | b x S ~x b | ~x ~x # x x")
nfa = closure_nfa(g)
print(f"closure automaton: {len(nfa.states)} states, {len(nfa.edges)} edges")
left, right = oracle_closure(g, 5), oracle_closure(nfa, 5)
print(f"closure slices up to length 5 agree: {left.words == right.words} ({len(left.words)} words)")
for w in sorted(left.words, key=lambda w: (len(w), w))[:12]:
    print("  " + (show(w) or "ε"))
