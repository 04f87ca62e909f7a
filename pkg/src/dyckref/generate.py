"""Seeded random grammars, VASS and programs for cross-validation runs."""
from __future__ import annotations

import random

from .grammar import Grammar, Production, grammar, trim
from .parser import parse_program
from .program import AsyncProgram
from .vass import Vass, VassBuilder


def random_cnf_grammar(rng: random.Random, max_nonterminals: int = 6, terminals=("x", "~x"),
                       max_productions: int = 10) -> Grammar:
    """CNF grammar: A -> B C, A -> t, and possibly S -> eps with S off every right-hand side."""
    n = rng.randint(1, max_nonterminals)
    nts = [f"N{i}" for i in range(n)]
    prods = []
    for a in nts:
        prods.append(Production(a, (rng.choice(terminals),)))
    for _ in range(rng.randint(n, max(n, max_productions - n))):
        a = rng.choice(nts)
        if rng.random() < 0.65:
            prods.append(Production(a, (rng.choice(nts), rng.choice(nts))))
        else:
            prods.append(Production(a, (rng.choice(terminals),)))
    start = "S"
    prods.append(Production(start, (nts[0],)))
    # unit start production folded away to stay in CNF
    body = [Production(start, q.rhs) for q in prods if q.lhs == nts[0]]
    prods = [q for q in prods if q.lhs != start] + body
    if rng.random() < 0.3:
        prods.append(Production(start, ()))
    return grammar(start, prods[:max_productions + 2], nonterminals=[start, *nts])


def random_uniform_grammar(rng: random.Random, max_nonterminals: int = 5,
                           max_productions: int = 10) -> Grammar:
    """CNF grammar where each nonterminal gets a target offset and every production respects it."""
    n = rng.randint(1, max_nonterminals)
    nts = [f"N{i}" for i in range(n)]
    target = {a: rng.choice((-2, -1, 0, 0, 1, 2)) for a in nts}
    leaf = {1: "x", -1: "~x", 0: "a"}
    prods = [Production(a, (leaf[target[a]],)) for a in nts if target[a] in leaf]
    pairs = [(a, b, c) for a in nts for b in nts for c in nts if target[b] + target[c] == target[a]]
    rng.shuffle(pairs)
    for a, b, c in pairs[:rng.randint(1, max(1, max_productions - n))]:
        prods.append(Production(a, (b, c)))
    if rng.random() < 0.5:
        a = rng.choice(nts)
        if target[a] == 0:
            prods.append(Production(a, ("~x", "x")) if rng.random() < 0.5 else Production(a, ("x", "~x")))
    return grammar(nts[0], prods, terminals=("x", "~x", "a"), nonterminals=nts)


def random_grammar(rng: random.Random, max_nonterminals: int = 3, terminals=("x", "~x", "a"),
                   max_productions: int = 6, max_rhs: int = 3) -> Grammar:
    """Small grammar with arbitrary right-hand sides; the first nonterminal is the start."""
    nts = [f"N{i}" for i in range(rng.randint(1, max_nonterminals))]
    prods = []
    for a in nts:
        prods.append(Production(a, tuple(rng.choice(terminals) for _ in range(rng.randint(0, 2)))))
    for _ in range(rng.randint(0, max_productions - len(nts))):
        rhs = tuple(rng.choice(nts + list(terminals)) for _ in range(rng.randint(1, max_rhs)))
        prods.append(Production(rng.choice(nts), rhs))
    return grammar(nts[0], prods, nonterminals=nts)


def tame_shaped_grammar(rng: random.Random, handlers=("a", "b"), markers: bool = False) -> Grammar:
    """Grammar whose recursion comes in matched x ... ~x brackets, often tame."""
    n = rng.randint(1, 3)
    nts = [f"N{i}" for i in range(n)]
    pieces = ["x", "~x", *handlers]
    prods = []
    for i, a in enumerate(nts):
        later = nts[i + 1:]
        prods.append(Production(a, tuple(rng.choice(pieces) for _ in range(rng.randint(0, 2)))))
        for _ in range(rng.randint(1, 2)):
            kind = rng.random()
            if kind < 0.4:
                inner = [a]
                if rng.random() < 0.5:
                    inner.insert(rng.randint(0, 1), rng.choice(handlers))
                prods.append(Production(a, ("x", *inner, "~x")))
            elif kind < 0.7 and later:
                prods.append(Production(a, (rng.choice(handlers + tuple(later)), rng.choice(later))))
            else:
                prods.append(Production(a, (rng.choice(handlers), a) if rng.random() < 0.5 else (a, rng.choice(handlers))))
    if markers:
        top = "M"
        prods.append(Production(top, (nts[0], "#", nts[-1]) if rng.random() < 0.5 else (nts[0], "#", nts[-1], "~#", nts[0])))
        return trim(grammar(top, prods, nonterminals=[top, *nts]))
    return trim(grammar(nts[0], prods, nonterminals=nts))


def random_vass(rng: random.Random, max_states: int = 4, max_counters: int = 3, alphabet=("x", "~x"),
                max_edges: int = 8) -> Vass:
    """VASS with unit updates; q0 initial, the last state final."""
    n = rng.randint(1, max_states)
    k = rng.randint(1, max_counters)
    b = VassBuilder([f"c{i}" for i in range(k)])
    states = [f"q{i}" for i in range(n)]
    for q in states:
        b.state(q)
    for _ in range(rng.randint(1, max_edges)):
        src, dst = rng.choice(states), rng.choice(states)
        label = rng.choice([None, *alphabet])
        update = {}
        if rng.random() < 0.7:
            update[f"c{rng.randrange(k)}"] = rng.choice((-1, 1))
        b.edge(src, label, dst, update)
    return b.build("q0", [states[-1]])


def random_program(rng: random.Random, max_states: int = 3, max_handlers: int = 3,
                   max_productions: int = 8, events=("x", "y")) -> AsyncProgram:
    """Small program with |Q| <= 3, |handlers| <= 3 and at most 8 productions."""
    states = [f"q{i}" for i in range(rng.randint(1, max_states))]
    handlers = [h for h in ("a", "b", "c")[:rng.randint(1, max_handlers)]]
    evs = list(events[:rng.randint(1, len(events))])
    letters = evs + ["~" + e for e in evs]
    nts = [h.upper() for h in handlers]
    lines = [f"states: {' '.join(states)}", f"init: {states[0]}", f"final: {states[-1]}",
             f"events: {' '.join(evs)}", f"handlers: {' '.join(handlers)}", f"start: {handlers[0]}"]
    count = 0
    for a in nts:
        rhs = [rng.choice(letters + handlers) for _ in range(rng.randint(0, 2))]
        lines.append(f"prod {a} -> {' '.join(rhs)}")
        count += 1
    while count < rng.randint(len(nts), max_productions):
        a = rng.choice(nts)
        shape = rng.random()
        if shape < 0.35:
            e = rng.choice(evs)
            rhs = [e, a, "~" + e] if rng.random() < 0.7 else [e, a, "~" + rng.choice(evs)]
        elif shape < 0.6:
            rhs = [rng.choice(letters + handlers) for _ in range(rng.randint(1, 3))]
        else:
            rhs = [rng.choice(letters + handlers + nts) for _ in range(rng.randint(1, 3))]
        lines.append(f"prod {a} -> {' '.join(rhs)}")
        count += 1
    for h, a in zip(handlers, nts):
        for _ in range(rng.randint(1, 2)):
            lines.append(f"rule {rng.choice(states)} {h} {a} {rng.choice(states)}")
    return parse_program("\n".join(lines) + "\n")
