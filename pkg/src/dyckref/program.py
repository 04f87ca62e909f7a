"""Asynchronous programs: a shared global state plus a bag of pending handlers.

A rule ``q a A q'`` consumes one pending instance of handler ``a`` in state
``q``, runs a body ``u`` derived from nonterminal ``A``, emits the event letters
of ``u`` and posts the handler names of ``u``.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Optional

from .errors import CapExceeded, InputError
from .grammar import Grammar, Production, _Fresh, enumerate_words, trim
from .words import (BARHASH, CANON, CANON_BAR, HASH, MARKERS, SymbolTable, Word, bar,
                    base, is_barred, rho)


class Rule(NamedTuple):
    src: str
    handler: str
    nonterminal: str
    dst: str

    def __str__(self) -> str:
        return f"{self.src} --{self.handler}/{self.nonterminal}--> {self.dst}"


@dataclass(frozen=True)
class AsyncProgram:
    states: tuple
    events: frozenset          # Dyck letters X; bars and markers are implied
    handlers: frozenset
    grammar: Grammar
    rules: tuple
    initial: str
    final: str
    start_handler: str

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(dict.fromkeys(self.states)))
        object.__setattr__(self, "events", frozenset(self.events))
        object.__setattr__(self, "handlers", frozenset(self.handlers))
        object.__setattr__(self, "rules", tuple(dict.fromkeys(Rule(*r) for r in self.rules)))
        if self.events & self.handlers:
            raise InputError(f"names are both events and handlers: {sorted(self.events & self.handlers)}")
        known = set(self.states)
        for q in (self.initial, self.final):
            if q not in known:
                raise InputError(f"undeclared state {q!r}")
        if self.start_handler not in self.handlers:
            raise InputError(f"undeclared start handler {self.start_handler!r}")
        for r in self.rules:
            if r.src not in known or r.dst not in known:
                raise InputError(f"rule {r} uses an undeclared state")
            if r.handler not in self.handlers:
                raise InputError(f"rule {r} uses an undeclared handler")
            if not self.grammar.is_nonterminal(r.nonterminal):
                raise InputError(f"rule {r} uses an undeclared nonterminal")
        legal = self.events | self.table.bars | self.handlers | MARKERS
        for t in self.grammar.terminals:
            if t not in legal:
                raise InputError(f"grammar terminal {t!r} is neither an event nor a handler")

    @cached_property
    def table(self) -> SymbolTable:
        return SymbolTable(self.events, self.handlers)

    @property
    def size(self) -> int:
        return len(self.states) + self.grammar.size + len(self.rules)

    def body_nonterminals(self) -> list:
        return list(dict.fromkeys(r.nonterminal for r in self.rules))

    def __str__(self) -> str:
        lines = [f"states: {' '.join(self.states)}", f"init: {self.initial}", f"final: {self.final}",
                 f"events: {' '.join(sorted(self.events))}",
                 f"handlers: {' '.join(sorted(self.handlers))}", f"start: {self.start_handler}"]
        order = {a: i for i, a in enumerate(self.grammar.nonterminals)}
        lines.extend(f"prod {p}" for p in sorted(self.grammar.productions,
                                                 key=lambda p: (order[p.lhs], p.key())))
        lines.extend(f"rule {r.src} {r.handler} {r.nonterminal} {r.dst}" for r in self.rules)
        return "\n".join(lines)


class StepError(ValueError):
    """A scheduler step that the semantics does not allow."""


@dataclass(frozen=True, order=True)
class Configuration:
    state: str
    pending: tuple = ()   # sorted (handler, count) pairs, counts > 0

    @classmethod
    def of(cls, state: str, bag: Mapping[str, int] | Iterable[str]) -> "Configuration":
        counts = Counter(bag) if not isinstance(bag, Mapping) else Counter(dict(bag))
        for h, n in counts.items():
            if n < 0:
                raise StepError(f"negative multiplicity for {h}")
        return cls(state, tuple(sorted((h, n) for h, n in counts.items() if n > 0)))

    def count(self, handler: str) -> int:
        return dict(self.pending).get(handler, 0)

    def __str__(self) -> str:
        bag = ", ".join(f"{h}" if n == 1 else f"{h}^{n}" for h, n in self.pending)
        return f"({self.state}, [{bag}])"


def initial_configuration(p: AsyncProgram) -> Configuration:
    return Configuration.of(p.initial, [p.start_handler])


def split_body(p: AsyncProgram, u: Iterable[str]) -> tuple:
    """Return (emitted events, posted handler counts) of a handler body."""
    emitted, posted = [], Counter()
    for s in u:
        if s in p.handlers:
            posted[s] += 1
        else:
            emitted.append(s)
    return tuple(emitted), posted


def derives(g: Grammar, a: str, u: Word) -> bool:
    return tuple(u) in set(enumerate_words(g, len(u), start=a))


def step(p: AsyncProgram, c: Configuration, rule: Rule, u: Iterable[str],
         check: bool = True) -> tuple:
    """Fire ``rule`` with body ``u``; returns the new configuration and the emitted events."""
    rule = Rule(*rule)
    u = tuple(u)
    if rule not in p.rules:
        raise StepError(f"unknown rule {rule}")
    if c.state != rule.src:
        raise StepError(f"rule {rule} does not start in {c.state}")
    if c.count(rule.handler) < 1:
        raise StepError(f"handler {rule.handler} is not pending in {c}")
    if check and not derives(p.grammar, rule.nonterminal, u):
        raise StepError(f"{' '.join(u) or 'ε'} is not derivable from {rule.nonterminal}")
    emitted, posted = split_body(p, u)
    bag = Counter(dict(c.pending))
    bag[rule.handler] -= 1
    bag.update(posted)
    return Configuration.of(rule.dst, bag), emitted


def handler_bodies(p: AsyncProgram, max_word: int, cap: int = 200_000) -> dict:
    """Per body nonterminal: distinct (emitted, posted) effects of bodies up to ``max_word``."""
    out = {}
    for a in p.body_nonterminals():
        seen = {}
        for u in enumerate_words(p.grammar, max_word, cap, start=a):
            emitted, posted = split_body(p, u)
            key = (emitted, tuple(sorted(posted.items())))
            seen.setdefault(key, u)
        out[a] = sorted(seen.items(), key=lambda kv: (len(kv[1]), kv[1]))
    return out


def enumerate_traces(p: AsyncProgram, max_steps: int, max_word: int, cap: int = 200_000) -> set:
    """Accepted traces of runs with at most ``max_steps`` steps and bodies of length at most ``max_word``."""
    bodies = handler_bodies(p, max_word, cap)
    start = (initial_configuration(p), ())
    frontier = {start}
    seen = {start}
    accepted = set()
    for depth in range(max_steps + 1):
        for conf, trace in frontier:
            if conf.state == p.final:
                accepted.add(trace)
        if depth == max_steps:
            break
        nxt = set()
        for conf, trace in sorted(frontier):
            for rule in p.rules:
                if rule.src != conf.state or conf.count(rule.handler) < 1:
                    continue
                for (emitted, posted), _ in bodies[rule.nonterminal]:
                    bag = Counter(dict(conf.pending))
                    bag[rule.handler] -= 1
                    bag.update(dict(posted))
                    item = (Configuration.of(rule.dst, bag), trace + emitted)
                    if item not in seen:
                        seen.add(item)
                        nxt.add(item)
                        if len(seen) > cap:
                            raise CapExceeded("enumerate_traces", cap, f"depth {depth + 1}")
        frontier = nxt
    return accepted


# ---------------------------------------------------------------- grammar plumbing

def trim_roots(g: Grammar, roots: Iterable[str]) -> Grammar:
    """Trim with respect to several roots; keeps the original start name when possible."""
    roots = [r for r in dict.fromkeys(roots) if g.is_nonterminal(r)]
    fresh = _Fresh([*g.nonterminals, *g.terminals])
    top = fresh("ROOT")
    aug = Grammar((top, *g.nonterminals), g.terminals,
                  (*g.productions, *(Production(top, (r,)) for r in roots)), top)
    t = trim(aug)
    prods = tuple(q for q in t.productions if q.lhs != top)
    nts = tuple(a for a in t.nonterminals if a != top)
    if not nts:
        nts = (g.start,)
    start = g.start if g.start in nts else nts[0]
    return Grammar(nts, g.terminals, prods, start)


def binarize(g: Grammar) -> Grammar:
    """Right-hand sides of length at most two, ε-productions kept."""
    fresh = _Fresh([*g.nonterminals, *g.terminals])
    nts = list(g.nonterminals)
    prods = []
    for p in g.productions:
        if p.extended or len(p.rhs) <= 2:
            prods.append(p)
            continue
        lhs, rest = p.lhs, list(p.rhs)
        while len(rest) > 2:
            nxt = fresh(p.lhs)
            nts.append(nxt)
            prods.append(Production(lhs, (rest[0], nxt)))
            lhs, rest = nxt, rest[1:]
        prods.append(Production(lhs, tuple(rest)))
    return Grammar(tuple(nts), g.terminals, tuple(prods), g.start)


def with_grammar(p: AsyncProgram, g: Grammar, rules: Iterable[Rule] | None = None,
                 events: Iterable[str] | None = None) -> AsyncProgram:
    rules = tuple(p.rules if rules is None else rules)
    return AsyncProgram(p.states, frozenset(p.events if events is None else events), p.handlers,
                        g, rules, p.initial, p.final, p.start_handler)


def retrim(p: AsyncProgram) -> AsyncProgram:
    """Drop rules whose body language is empty and everything no rule can reach."""
    g = trim_roots(p.grammar, p.body_nonterminals())
    live = set(g.nonterminals) if g.productions else set()
    productive = {q.lhs for q in g.productions}
    rules = [r for r in p.rules if r.nonterminal in live and r.nonterminal in productive]
    g = trim_roots(g, [r.nonterminal for r in rules])
    return with_grammar(p, g, rules)


# ---------------------------------------------------------------- transductions

@dataclass(frozen=True)
class Transducer:
    states: tuple
    initial: str
    finals: frozenset
    edges: tuple   # (src, input | None, output | None, dst)

    def __post_init__(self):
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "edges", tuple(dict.fromkeys(self.edges)))

    def outputs(self, w: Iterable[str], max_eps: int = 8) -> set:
        """All outputs on input ``w`` (ε-input moves bounded per position by ``max_eps``)."""
        w = tuple(w)
        current = {(self.initial, 0, ())}
        results = set()
        seen = set()
        todo = deque(current)
        while todo:
            state, pos, out = todo.popleft()
            if (state, pos, out) in seen:
                continue
            seen.add((state, pos, out))
            if pos == len(w) and state in self.finals:
                results.add(out)
            for src, inp, o, dst in self.edges:
                if src != state:
                    continue
                emitted = out + ((o,) if o is not None else ())
                if inp is None:
                    if len(emitted) - pos <= max_eps + len(w):
                        todo.append((dst, pos, emitted))
                elif pos < len(w) and w[pos] == inp:
                    todo.append((dst, pos + 1, emitted))
        return results

    def offset_preserving(self, table: SymbolTable) -> bool:
        """Every accepting path has equal input and output offsets (checked by potentials)."""

        def eff(s):
            if s is None or s in MARKERS:
                return 0
            if s in (CANON, CANON_BAR):
                return 1 if s == CANON else -1
            return table.effect(s)

        fwd = {self.initial}
        todo = [self.initial]
        while todo:
            q = todo.pop()
            for src, _, _, dst in self.edges:
                if src == q and dst not in fwd:
                    fwd.add(dst)
                    todo.append(dst)
        bwd = set(self.finals)
        todo = list(bwd)
        while todo:
            q = todo.pop()
            for src, _, _, dst in self.edges:
                if dst == q and src not in bwd:
                    bwd.add(src)
                    todo.append(src)
        live = fwd & bwd
        potential = {self.initial: 0}
        todo = [self.initial]
        while todo:
            q = todo.pop()
            for src, inp, out, dst in self.edges:
                if src != q or dst not in live:
                    continue
                val = potential[q] + eff(out) - eff(inp)
                if dst not in potential:
                    potential[dst] = val
                    todo.append(dst)
                elif potential[dst] != val:
                    return False
        return all(potential.get(f, 0) == 0 for f in self.finals & live)


class TransductionError(ValueError):
    pass


def apply_transduction(p: AsyncProgram, t: Transducer, out_events: Iterable[str] | None = None) -> AsyncProgram:
    """Triple construction: a program whose language is the image of L(p) under ``t``.

    Handler letters pass through without moving the transducer.  The result
    keeps a single final state, so ``t`` must have exactly one final state.
    """
    if not t.offset_preserving(p.table):
        raise TransductionError("transducer is not offset-preserving")
    if len(t.finals) != 1:
        raise TransductionError("transducer needs exactly one final state")
    (t_final,) = t.finals
    g = binarize(trim_roots(p.grammar, p.body_nonterminals()))
    tstates = list(t.states)

    def nt(a, i, j):
        return f"{a}@{i},{j}"

    def eps(i, j):
        return f"ε@{i},{j}"

    prods = []
    for i in tstates:
        prods.append(Production(eps(i, i), ()))
    for src, inp, out, dst in t.edges:
        if inp is None:
            for j in tstates:
                prods.append(Production(eps(src, j), tuple(s for s in (out, eps(dst, j)) if s is not None)))
    for i in tstates:
        for j in tstates:
            for q in g.productions:
                a = nt(q.lhs, i, j)
                if q.extended:
                    raise TransductionError("extended productions are not supported here")
                if not q.rhs:
                    prods.append(Production(a, (eps(i, j),)))
                elif len(q.rhs) == 1:
                    prods.append(Production(a, (_sym(g, q.rhs[0], i, j, nt),)))
                else:
                    for k in tstates:
                        prods.append(Production(a, (_sym(g, q.rhs[0], i, k, nt), _sym(g, q.rhs[1], k, j, nt))))
    # terminal positions
    for s in sorted(g.terminals):
        for i in tstates:
            for j in tstates:
                name = f"[{s}]@{i},{j}"
                if s in p.handlers:
                    prods.append(Production(name, (s, eps(i, j))))
                    continue
                for src, inp, out, dst in t.edges:
                    if inp == s:
                        rhs = (eps(i, src),) + ((out,) if out is not None else ()) + (eps(dst, j),)
                        prods.append(Production(name, rhs))
    rules = []
    for r in p.rules:
        for i in tstates:
            for j in tstates:
                body = f"{r.nonterminal}@@{i},{j}"
                prods.append(Production(body, (eps(i, i), nt(r.nonterminal, i, j))))
                rules.append(Rule(_pair(r.src, i), r.handler, body, _pair(r.dst, j)))
    terminals = set(p.handlers) | {o for _, _, o, _ in t.edges if o is not None}
    nts = list(dict.fromkeys(q.lhs for q in prods))
    for q in prods:
        for s in q.rhs:
            if s not in terminals and s not in nts:
                nts.append(s)
    used = set(nts)
    gt = Grammar(tuple(nts), frozenset(terminals - used), tuple(prods), nts[0])
    states = [_pair(q, i) for q in p.states for i in tstates]
    events = set(out_events) if out_events is not None else (
        {base(o) for o in terminals if o not in p.handlers and o not in MARKERS})
    prog = AsyncProgram(tuple(states), frozenset(events), p.handlers, gt, tuple(rules),
                        _pair(p.initial, t.initial), _pair(p.final, t_final), p.start_handler)
    return retrim(prog)


def _sym(g: Grammar, s: str, i, j, nt) -> str:
    return nt(s, i, j) if g.is_nonterminal(s) else f"[{s}]@{i},{j}"


def _pair(q: str, i) -> str:
    return f"{q}|{i}"


# ---------------------------------------------------------------- auxiliary programs

def rho_transducer(table: SymbolTable) -> Transducer:
    edges = [("t", y, CANON, "t") for y in sorted(table.dyck_letters)]
    edges += [("t", bar(y), CANON_BAR, "t") for y in sorted(table.dyck_letters)]
    return Transducer(("t",), "t", {"t"}, tuple(edges))


def dip_transducer(table: SymbolTable) -> Transducer:
    """(v ~y w) -> # rho(v) ~# rho(~y w): guesses the position where the dip happens."""
    letters = sorted(table.dyck_letters)
    edges = [("s", None, HASH, "v")]
    for y in letters:
        for phase in ("v", "w"):
            edges.append((phase, y, CANON, phase))
            edges.append((phase, bar(y), CANON_BAR, phase))
        edges.append(("g", bar(y), CANON_BAR, "w"))
    edges.append(("v", None, BARHASH, "g"))
    return Transducer(("s", "v", "g", "w"), "s", {"w"}, tuple(edges))


def mismatch_transducer(table: SymbolTable) -> Transducer:
    """(u y v ~z w) -> rho(u) # rho(v) ~# rho(w) for y != z."""
    letters = sorted(table.dyck_letters)
    phases = ["u", *(f"v:{y}" for y in letters), "w"]
    edges = []
    for phase in phases:
        for y in letters:
            edges.append((phase, y, CANON, phase))
            edges.append((phase, bar(y), CANON_BAR, phase))
    for y in letters:
        edges.append(("u", y, HASH, f"v:{y}"))
        for z in letters:
            if z != y:
                edges.append((f"v:{y}", bar(z), BARHASH, "w"))
    return Transducer(tuple(phases), "u", {"w"}, tuple(edges))


def build_aux(p: AsyncProgram, which: str) -> AsyncProgram:
    """The relabelled program (O) and the marker programs for dip (D) and mismatch (M) violations."""
    maker = {"O": rho_transducer, "D": dip_transducer, "M": mismatch_transducer}[which]
    return apply_transduction(p, maker(p.table), out_events={CANON})


# ---------------------------------------------------------------- useful nonterminals

SPY = "spy"


def usefulness_program(p: AsyncProgram, x: str) -> AsyncProgram:
    """Program reaching its final state iff ``x`` occurs in some accepting run of ``p``.

    Every use of ``x`` posts a fresh handler; consuming it moves from the first
    copy of the state space into the second, whose final state is the goal.
    """
    fresh = _Fresh([*p.grammar.nonterminals, *p.grammar.terminals, *p.handlers, *p.states])
    spy = fresh(SPY)
    spy_body = fresh("Spy")
    prods = [Production(q.lhs, (*q.rhs, spy)) if q.lhs == x else q for q in p.grammar.productions]
    prods.append(Production(spy_body, ()))
    g = Grammar((*p.grammar.nonterminals, spy_body), p.grammar.terminals | {spy}, tuple(prods),
                p.grammar.start)
    rules = []
    for copy in (0, 1):
        rules.extend(Rule(f"{r.src}|{copy}", r.handler, r.nonterminal, f"{r.dst}|{copy}") for r in p.rules)
    rules.extend(Rule(f"{q}|0", spy, spy_body, f"{q}|1") for q in p.states)
    states = [f"{q}|{c}" for c in (0, 1) for q in p.states]
    return AsyncProgram(tuple(states), p.events, p.handlers | {spy}, g, tuple(rules),
                        f"{p.initial}|0", f"{p.final}|1", p.start_handler)


def is_nonempty(p: AsyncProgram, budget: Optional[int] = None) -> bool:
    """Can the final state be reached?  Decided on the handler-only closure VASS."""
    from .downclosure import emptiness_vass
    from .vass import DEFAULT_BASIS_BUDGET, coverable

    v = emptiness_vass(p)
    return bool(coverable(v, budget=budget or DEFAULT_BASIS_BUDGET))


def useful_nonterminals(p: AsyncProgram, budget: Optional[int] = None) -> set:
    if not is_nonempty(p, budget):
        return set()
    g = trim_roots(p.grammar, p.body_nonterminals())
    return {x for x in g.nonterminals if g.by_lhs[x] and is_nonempty(usefulness_program(p, x), budget)}


def restrict_to_useful(p: AsyncProgram, budget: Optional[int] = None) -> AsyncProgram:
    """Keep only useful nonterminals and the rules whose body nonterminal is useful."""
    useful = useful_nonterminals(p, budget)
    g = p.grammar
    prods = [q for q in g.productions if q.lhs in useful and
             all(not g.is_nonterminal(s) or s in useful for s in q.rhs)]
    rules = [r for r in p.rules if r.nonterminal in useful]
    nts = tuple(a for a in g.nonterminals if a in useful) or (g.start,)
    start = g.start if g.start in nts else nts[0]
    return with_grammar(p, Grammar(nts, g.terminals, tuple(prods), start), rules)
