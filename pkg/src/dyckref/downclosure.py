"""Finite automata with the same downward closure as a tame-pumping grammar.

The closure order compares handler names by the subword order and the bracket
part by (equal offset, greater or equal dip), separately inside and outside the
markers.  So the closure of a word depends only on its handler/marker
projection and on the effects of its inside and outside parts.

``closure_nfa`` annotates every nonterminal with the exact effect profile of
the words it derives, computes the subword closure of the handler/marker
projection per profile, and pads each accepted projection with a canonical
bracket word of the right effect.  The pump abstractions, pump transducers,
skeleton runs and ideals of the succinct construction are available as
standalone operations.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Optional

from .analysis import PsiRelationQuery, _sccs, pump_exists_with
from .automata import Nfa, NfaBuilder
from .errors import CapExceeded
from .grammar import Grammar, Production, _Fresh, grammar as make_grammar, to_cnf, trim
from .words import (BARHASH, CANON, CANON_BAR, CANONICAL, HASH, MARKERS, Effect, Shape,
                    SymbolTable, WordError, compose, effect)

DEFAULT_PROFILE_CAP = 64
DEFAULT_NFA_BUDGET = 100_000
ZERO = Effect(0, 0)


# ---------------------------------------------------------------- subword closure

class _Fragments:
    """Builds NFA fragments whose languages have the subword closure of a projection of L(A).

    Letters outside ``keep`` are erased; markers go through ``hook``.  A nonterminal in a recursive component derives words
    of the form  left* exit right*  where ``left``/``right`` are the letters of
    siblings to the left/right of the recursion and ``exit`` ranges over the
    productions that leave the component.
    """

    def __init__(self, g: Grammar, b: NfaBuilder, keep: Callable[[str], bool],
                 hook: Optional[Callable[[int, str], int]] = None):
        self.g = g
        self.b = b
        self.keep = keep
        self.hook = hook
        self.comp = _sccs(g)
        self.alph = self._alphabets()
        self._sides: dict = {}

    def _alphabets(self) -> dict:
        g = self.g
        out = {a: set() for a in g.nonterminals}
        changed = True
        while changed:
            changed = False
            for p in g.productions:
                letters = set()
                if p.extended:
                    letters = {s for s in p.star if self.keep(s)}
                for s in p.rhs:
                    if g.is_nonterminal(s):
                        letters |= out[s]
                    elif self.keep(s):
                        letters.add(s)
                if not letters <= out[p.lhs]:
                    out[p.lhs] |= letters
                    changed = True
        return out

    def _letters(self, symbols) -> set:
        out = set()
        for s in symbols:
            if self.g.is_nonterminal(s):
                out |= self.alph[s]
            elif self.keep(s):
                out.add(s)
        return out

    def sides(self, comp: frozenset):
        """(left letters, right letters, exit productions) of a recursive component, or None."""
        if comp in self._sides:
            return self._sides[comp]
        left, right, exits, recursive = set(), set(), [], False
        for a in sorted(comp):
            for p in self.g.by_lhs[a]:
                inside = [i for i, s in enumerate(p.rhs) if s in comp]
                if not inside:
                    exits.append(p)
                    continue
                recursive = True
                for i in inside:
                    left |= self._letters(p.rhs[:i])
                    right |= self._letters(p.rhs[i + 1:])
        res = (frozenset(left), frozenset(right), exits) if recursive else None
        self._sides[comp] = res
        return res

    def frag(self, a: str, src: int) -> int:
        comp = self.comp[a]
        info = self.sides(comp)
        b = self.b
        if info is None:
            return self._union(self.g.by_lhs[a], src)
        left, right, exits = info
        loop_l = b.state()
        b.edge(src, None, loop_l)
        b.star(loop_l, left)
        mid = self._union(exits, loop_l)
        loop_r = b.state()
        b.edge(mid, None, loop_r)
        b.star(loop_r, right)
        return loop_r

    def _union(self, prods, src: int) -> int:
        end = self.b.state()
        for p in prods:
            self.b.edge(self.concat(p, src), None, end)
        return end

    def concat(self, p: Production, src: int) -> int:
        b = self.b
        if p.extended:
            s = b.state()
            b.edge(src, None, s)
            b.star(s, [t for t in p.star if self.keep(t)])
            return s
        cur = src
        for s in p.rhs:
            if self.g.is_nonterminal(s):
                cur = self.frag(s, cur)
            elif s in MARKERS and self.hook is not None:
                cur = self.hook(cur, s)
            elif self.keep(s):
                nxt = b.state()
                b.edge(cur, s, nxt)
                cur = nxt
        return cur


def subword_closure_nfa(g: Grammar, start: str, keep: Callable[[str], bool],
                        budget: int = DEFAULT_NFA_BUDGET) -> Nfa:
    """NFA whose language lies between the projection of L(g, start) and its subword closure."""
    t = trim(g.with_start(start))
    b = NfaBuilder(budget)
    init = b.state()
    if t.empty:
        return b.build(init, [])
    end = _Fragments(t, b, keep).frag(start, init)
    return b.build(init, [end])


# ---------------------------------------------------------------- effect profiles

class Profile(NamedTuple):
    """Marker shape plus the effects of the inside and outside parts.

    For marker-free words the whole word counts as inside.  For ``# ... ~#``
    the outside is the concatenation of the two outer pieces.
    """

    shape: Shape
    inner: Effect
    outer: Effect

    def label(self) -> str:
        return f"{self.shape.value}:{self.inner.dip},{self.inner.offset}:{self.outer.dip},{self.outer.offset}"


def leaf_profile(s: str, table: SymbolTable) -> Profile:
    if s == HASH:
        return Profile(Shape.HASH, ZERO, ZERO)
    if s == BARHASH:
        return Profile(Shape.BARHASH, ZERO, ZERO)
    return Profile(Shape.NONE, effect((s,), table), ZERO)


def join_profiles(p: Profile, q: Profile) -> Profile:
    """Profile of the concatenation of two words."""
    N, H, B, X = Shape.NONE, Shape.HASH, Shape.BARHASH, Shape.BOTH
    if p.shape is N and q.shape is N:
        return Profile(N, compose(p.inner, q.inner), ZERO)
    if p.shape is H and q.shape is N:
        return Profile(H, compose(p.inner, q.inner), p.outer)
    if p.shape is N and q.shape is H:
        return Profile(H, q.inner, compose(p.inner, q.outer))
    if p.shape is B and q.shape is N:
        return Profile(B, p.inner, compose(p.outer, q.inner))
    if p.shape is N and q.shape is B:
        return Profile(B, compose(p.inner, q.inner), q.outer)
    if p.shape is H and q.shape is B:
        return Profile(X, compose(p.inner, q.inner), compose(p.outer, q.outer))
    if p.shape is X and q.shape is N:
        return Profile(X, p.inner, compose(p.outer, q.inner))
    if p.shape is N and q.shape is X:
        return Profile(X, q.inner, compose(p.inner, q.outer))
    raise WordError(f"repeated or disordered markers: {p.shape.value} then {q.shape.value}")


def can_be_admissible(p: Profile) -> bool:
    """Can a subtree with this profile occur inside an admissible word?

    The inside of a ``#``-subtree is a prefix of the final inside, the inside of
    a ``~#``-subtree is a suffix of it, and a ``#...~#`` subtree holds all of it.
    """
    if p.shape is Shape.HASH:
        return p.inner.dip == 0
    if p.shape is Shape.BARHASH:
        return p.inner.dip == -p.inner.offset
    if p.shape is Shape.BOTH:
        return p.inner == ZERO
    return True


def _too_big(p: Profile, cap: int) -> bool:
    return max(p.inner.dip, abs(p.inner.offset), p.outer.dip, abs(p.outer.offset)) > cap


@dataclass
class TrackedGrammar:
    grammar: Optional[Grammar]          # over kept letters; Dyck letters erased
    profiles: dict                      # nonterminal -> set of Profile
    roots: dict                         # Profile -> tracked start nonterminal
    exact: bool


def tracked_name(a: str, p: Profile) -> str:
    return f"{a}<{p.label()}>"


def track_profiles(g: Grammar, table: SymbolTable = CANONICAL, cap: int = DEFAULT_PROFILE_CAP) -> TrackedGrammar:
    """Annotate a CNF grammar with exact effect profiles (values beyond ``cap`` are dropped)."""
    profiles: dict = {a: set() for a in g.nonterminals}
    exact = True

    def options(s):
        return profiles[s] if g.is_nonterminal(s) else {leaf_profile(s, table)}

    def results(p: Production):
        nonlocal exact
        if p.extended:
            if any(table.is_dyck_symbol(s) or s in MARKERS for s in p.star):
                raise WordError(f"star production over brackets or markers: {p}")
            return [(Profile(Shape.NONE, ZERO, ZERO), ())]
        combos = [(Profile(Shape.NONE, ZERO, ZERO), ())]
        for s in p.rhs:
            nxt = []
            for acc, parts in combos:
                for o in options(s):
                    j = join_profiles(acc, o)
                    if not can_be_admissible(j):
                        continue
                    if _too_big(j, cap):
                        exact = False
                        continue
                    nxt.append((j, parts + (o,)))
            combos = nxt
        return combos

    changed = True
    while changed:
        changed = False
        for p in g.productions:
            for prof, _ in results(p):
                if prof not in profiles[p.lhs]:
                    profiles[p.lhs].add(prof)
                    changed = True
    prods = []
    for p in g.productions:
        for prof, parts in results(p):
            lhs = tracked_name(p.lhs, prof)
            if p.extended:
                prods.append(Production(lhs, (), p.star))
                continue
            rhs = []
            for s, o in zip(p.rhs, parts):
                if g.is_nonterminal(s):
                    rhs.append(tracked_name(s, o))
                elif not table.is_dyck_symbol(s):
                    rhs.append(s)
            prods.append(Production(lhs, tuple(rhs)))
    roots = {prof: tracked_name(g.start, prof) for prof in sorted(profiles[g.start])}
    if not roots:
        return TrackedGrammar(None, profiles, {}, exact)
    top = "<root>"
    prods.extend(Production(top, (r,)) for r in roots.values())
    tg = make_grammar(top, prods)
    return TrackedGrammar(tg, profiles, roots, exact)


def padding(e: Effect) -> tuple:
    """The canonical bracket word ~x^d x^(d+δ) with effect (d, δ)."""
    d, delta = e
    return (CANON_BAR,) * d + (CANON,) * (d + delta)


def _canonical_table(g: Grammar) -> SymbolTable:
    for t in g.terminals:
        if t.startswith("~") and t not in (CANON_BAR, BARHASH):
            raise WordError(f"closure needs canonical brackets x/~x, found {t!r}")
    return CANONICAL


def closure_nfa(g: Grammar, cap: int = DEFAULT_PROFILE_CAP, budget: int = DEFAULT_NFA_BUDGET) -> Nfa:
    """An NFA with the same downward closure as L(g) (admissible words only).

    Raises :class:`CapExceeded` when a profile value exceeds ``cap`` or the
    automaton exceeds ``budget`` states.
    """
    table = _canonical_table(g)
    cnf = to_cnf(trim(g))
    b = NfaBuilder(budget)
    init = b.state()
    if cnf.empty:
        return b.build(init, [])
    tracked = track_profiles(cnf, table, cap)
    if not tracked.exact:
        raise CapExceeded("closure profiles", cap, "effect values beyond the profile cap")
    final = b.state()
    if tracked.grammar is None:
        return b.build(init, [])
    tg = tracked.grammar

    def keep(s):
        return not table.is_dyck_symbol(s)

    for prof, root in tracked.roots.items():
        first, after_hash, after_bar = _paddings(prof)

        def hook(src, marker, after_hash=after_hash, after_bar=after_bar):
            nxt = b.state()
            b.edge(src, marker, nxt)
            return b.word(nxt, after_hash if marker == HASH else after_bar)

        s0 = b.state()
        b.edge(init, None, s0)
        cur = b.word(s0, first)
        end = _Fragments(trim(tg.with_start(root)), b, keep, hook).frag(root, cur)
        b.edge(end, None, final)
    return b.build(init, [final]).trim()


def _paddings(p: Profile) -> tuple:
    """Padding words at the start, after ``#`` and after ``~#`` for a root profile."""
    if p.shape is Shape.NONE:
        return padding(p.inner), (), ()
    if p.shape is Shape.HASH:
        return padding(p.outer), padding(p.inner), ()
    if p.shape is Shape.BARHASH:
        return padding(p.inner), (), padding(p.outer)
    return padding(p.outer), padding(p.inner), ()


# ---------------------------------------------------------------- almost-pumpfree form

def nfa_to_ecfg(nfa: Nfa, start: str = "S") -> Grammar:
    """Pump-free extended grammar for an NFA that is acyclic apart from self-loops.

    Up to the first marker the grammar is right-linear, from the first marker on
    it is left-linear, so every nonterminal with a binary production derives a
    marker and marker-free nonterminals only have leaf productions.  Without
    markers the whole word is right-linear.
    """
    nfa = nfa.trim()
    if not nfa.finals:
        return Grammar((start,), nfa.alphabet, (), start, empty=True)
    fresh = _Fresh([start, *nfa.alphabet])
    loops = {q: sorted({a for s, a, d in nfa.edges if s == q and d == q and a is not None})
             for q in nfa.states}
    moves = [(s, a, d) for s, a, d in nfa.edges if s != d]
    if _has_cycle(nfa.states, moves):
        raise ValueError("automaton has cycles other than self-loops")
    prods: list = []
    leaf: dict = {}
    star: dict = {}

    def leaf_of(a):
        if a not in leaf:
            leaf[a] = fresh(f"L[{a}]")
            prods.append(Production(leaf[a], (a,)))
        return leaf[a]

    def star_of(q):
        key = tuple(loops[q])
        if key not in star:
            star[key] = fresh(f"Star[{' '.join(key)}]")
            prods.append(Production(star[key], (), frozenset(key)))
        return star[key]

    # right-linear part: R[q] derives the rest of the word from q, q before any marker
    before = _before_marker(nfa, moves)
    right = {q: f"R[{q}]" for q in nfa.states if q in before}
    # left-linear part: K[m, q] derives from marker edge m up to state q
    marker_edges = [e for e in moves if e[1] in MARKERS and e[0] in before]
    reach = set()
    todo = deque((m, m[2]) for m in marker_edges)
    while todo:
        m, q = todo.popleft()
        if (m, q) in reach:
            continue
        reach.add((m, q))
        todo.extend((m, d) for s, _, d in moves if s == q)

    def left_name(m, q):
        return f"K[{marker_edges.index(m)},{q}]"

    for q in right:
        body = right[q]
        if loops[q]:
            body = fresh(f"R'[{q}]")
            prods.append(Production(right[q], (star_of(q), body)))
        if q in nfa.finals:
            prods.append(Production(body, ()))
        for s, a, d in moves:
            if s != q:
                continue
            if a is None:
                if d in right:
                    prods.append(Production(body, (right[d],)))
            elif a in MARKERS:
                m = (s, a, d)
                prods.extend(Production(body, (left_name(m, f),)) for f in nfa.finals if (m, f) in reach)
            else:
                prods.append(Production(body, (leaf_of(a), right[d])))
    for m, q in sorted(reach, key=repr):
        name = left_name(m, q)
        body = name
        if loops[q]:
            body = fresh(f"K'[{marker_edges.index(m)},{q}]")
            prods.append(Production(name, (body, star_of(q))))
        if q == m[2]:
            prods.append(Production(body, (m[1],)))
        for s, a, d in moves:
            if d != q or (m, s) not in reach:
                continue
            if a is None:
                prods.append(Production(body, (left_name(m, s),)))
            else:
                prods.append(Production(body, (left_name(m, s), leaf_of(a))))
    prods.append(Production(start, (right[nfa.initial],)))
    names = {p.lhs for p in prods} | {s for p in prods for s in p.rhs if s not in nfa.alphabet}
    return trim(make_grammar(start, prods, terminals=nfa.alphabet, nonterminals=sorted(names)))


def _has_cycle(states, moves) -> bool:
    succ = {q: [] for q in states}
    for s, _, d in moves:
        succ[s].append(d)
    color = {q: 0 for q in states}
    for root in states:
        if color[root]:
            continue
        stack = [(root, iter(succ[root]))]
        color[root] = 1
        while stack:
            q, it = stack[-1]
            for r in it:
                if color[r] == 1:
                    return True
                if color[r] == 0:
                    color[r] = 1
                    stack.append((r, iter(succ[r])))
                    break
            else:
                color[q] = 2
                stack.pop()
    return False


def _before_marker(nfa: Nfa, moves) -> set:
    seen = {nfa.initial}
    todo = [nfa.initial]
    while todo:
        q = todo.pop()
        for s, a, d in moves:
            if s == q and a not in MARKERS and d not in seen:
                seen.add(d)
                todo.append(d)
    return seen


def almost_pumpfree(g: Grammar, cap: int = DEFAULT_PROFILE_CAP, budget: int = DEFAULT_NFA_BUDGET) -> Grammar:
    """Extended grammar without pumps and with leaf-only marker-free nonterminals, same closure."""
    return nfa_to_ecfg(closure_nfa(g, cap, budget))


def leaf_only_violations(g: Grammar) -> list:
    """Productions of marker-free nonterminals that are neither a single letter nor a star.

    Only meaningful when the start derives markers; a marker-free start is exempt.
    """
    from .grammar import marked_typing
    shapes = marked_typing(g).shapes
    bad = []
    if shapes.get(g.start) == frozenset({Shape.NONE}):
        return bad
    for p in g.productions:
        if shapes.get(p.lhs) == frozenset({Shape.NONE}) and p.lhs != g.start:
            if not (p.extended or (len(p.rhs) == 1 and not g.is_nonterminal(p.rhs[0]))):
                bad.append(p)
    return bad


# ---------------------------------------------------------------- pump abstractions

@dataclass(frozen=True, order=True)
class PumpAbstraction:
    d_left: int
    d_right: int
    gamma_left: frozenset = frozenset()
    gamma_right: frozenset = frozenset()
    increasing: bool = False

    def replacement(self, inner: tuple = ()) -> tuple:
        """The word shape ~x^dL x^dL Γ_L* inner ~x^dR x^dR Γ_R* as atoms."""
        left = (CANON_BAR,) * self.d_left + (CANON,) * self.d_left
        right = (CANON_BAR,) * self.d_right + (CANON,) * self.d_right
        return (*left, ("star", self.gamma_left), *inner, *right, ("star", self.gamma_right))


def undivided_pump_abstractions(g: Grammar, a: str, table: SymbolTable = CANONICAL,
                                max_dip: int = 3, clamp: Optional[int] = None) -> set:
    """Pump abstractions of ``a`` with dips up to ``max_dip``; every letter is certified.

    Raises :class:`CapExceeded` if a query could not be answered exactly.
    """
    handlers = sorted({t for t in g.terminals if not table.is_dyck_symbol(t) and t not in MARKERS})
    out = {PumpAbstraction(0, 0)}

    def ask(q):
        ans = pump_exists_with(g, q, table, clamp)
        if not ans.found and not ans.exact:
            raise CapExceeded("pump abstraction", clamp or 0, f"query on {a} was clamped")
        return ans.found

    for dl in range(max_dip + 1):
        for dr in range(max_dip + 1):
            if not ask(PsiRelationQuery(a, None, "L", dl, dr)):
                continue
            left = frozenset(h for h in handlers if ask(PsiRelationQuery(a, h, "L", dl, dr)))
            right = frozenset(h for h in handlers if ask(PsiRelationQuery(a, h, "R", dl, dr)))
            inc = ask(PsiRelationQuery(a, None, "L", dl, dr, require_increasing=True))
            out.add(PumpAbstraction(dl, dr, left, right, inc))
    return out


def flatten_N0_subtrees(g: Grammar, a: str, cap: int = DEFAULT_PROFILE_CAP,
                        budget: int = DEFAULT_NFA_BUDGET) -> Nfa:
    """NFA fragment with the closure of a marker-free nonterminal's language."""
    sub = trim(g.with_start(a))
    if any(t in MARKERS for p in sub.productions for t in p.rhs):
        raise ValueError(f"{a} derives markers")
    return closure_nfa(sub, cap, budget)


# ---------------------------------------------------------------- pump transducers

@dataclass(frozen=True)
class PumpTransducer:
    """Edges ``(src, left, right, dst)``; a side is a letter, ``None`` (ε) or a frozenset (star)."""

    states: tuple
    edges: tuple
    nonterminal: str

    def pairs(self, max_len: int, max_edges: int = 8) -> set:
        """Accepted (left tape, right tape) pairs of nonempty runs, tapes up to ``max_len``."""
        out = set()
        todo = deque([(self.nonterminal, (), (), 0)])
        seen = set()
        while todo:
            q, u, v, n = todo.popleft()
            if n and q == self.nonterminal:
                out.add((u, v))
            if n == max_edges:
                continue
            for s, l, r, d in self.edges:
                if s != q:
                    continue
                for du in _side_words(l, max_len - len(u)):
                    for dv in _side_words(r, max_len - len(v)):
                        item = (d, u + du, v + dv, n + 1)
                        if item not in seen:
                            seen.add(item)
                            todo.append(item)
        return out


def _side_words(side, room: int):
    if side is None:
        return [()]
    if isinstance(side, frozenset):
        return [w for n in range(room + 1) for w in itertools.product(sorted(side), repeat=n)]
    return [(side,)] if room >= 1 else []


def build_pump_transducer(g: Grammar, a: str) -> PumpTransducer:
    """Left siblings feed the left tape, right siblings the right tape (outermost first)."""
    leaves: dict = {}
    for p in g.productions:
        if p.extended:
            leaves.setdefault(p.lhs, []).append(p.star)
        elif len(p.rhs) == 1 and not g.is_nonterminal(p.rhs[0]):
            leaves.setdefault(p.lhs, []).append(p.rhs[0])
    edges = []
    for p in g.productions:
        if p.extended or len(p.rhs) != 2:
            continue
        b, c = p.rhs
        for leaf in leaves.get(b, []):
            if isinstance(leaf, frozenset):
                edges.append((p.lhs, leaf, frozenset(), c))
            else:
                edges.append((p.lhs, leaf, None, c))
        for leaf in leaves.get(c, []):
            if isinstance(leaf, frozenset):
                edges.append((p.lhs, frozenset(), leaf, b))
            else:
                edges.append((p.lhs, None, leaf, b))
    return PumpTransducer(g.nonterminals, tuple(dict.fromkeys(edges)), a)


def _side_effect(side, table: SymbolTable) -> Effect:
    if side is None or isinstance(side, frozenset):
        return ZERO
    return effect((side,), table)


@dataclass(frozen=True)
class TrackedPumpTransducer:
    """States ``(q, (dL, δL, dR, δR))``; left effect of the pump's left word, right of its right word."""

    base: PumpTransducer
    target: tuple
    states: tuple
    edges: tuple
    initial: tuple
    finals: frozenset
    clamped: bool

    def pairs(self, max_len: int, max_edges: int = 8) -> set:
        out = set()
        todo = deque([(self.initial, (), (), 0)])
        seen = set()
        while todo:
            q, u, v, n = todo.popleft()
            if n and q in self.finals:
                out.add((u, v))
            if n == max_edges:
                continue
            for s, l, r, d in self.edges:
                if s != q:
                    continue
                for du in _side_words(l, max_len - len(u)):
                    for dv in _side_words(r, max_len - len(v)):
                        item = (d, u + du, v + dv, n + 1)
                        if item not in seen:
                            seen.add(item)
                            todo.append(item)
        return out


def track_pump_transducer(t: PumpTransducer, x: tuple, cap: int,
                          table: SymbolTable = CANONICAL) -> TrackedPumpTransducer:
    """Product of ``t`` with effect registers for both tapes, accepting at register value ``x``.

    The right tape reads the pump's right word from the inside out, so its
    letters are prepended when updating the register.
    """
    if any(abs(c) > cap for c in x):
        raise ValueError("target quadruple exceeds the cap")
    start = ("start", (0, 0, 0, 0))
    states = [start]
    edges = []
    seen = {start}
    clamped = False
    todo = deque([start])
    while todo:
        q, y = todo.popleft()
        node = t.nonterminal if q == "start" else q
        for s, l, r, d in t.edges:
            if s != node:
                continue
            left = compose(Effect(y[0], y[1]), _side_effect(l, table))
            right = compose(_side_effect(r, table), Effect(y[2], y[3]))
            y2 = (left.dip, left.offset, right.dip, right.offset)
            if any(abs(c) > cap for c in y2):
                clamped = True
                continue
            dst = (d, y2)
            edges.append(((q, y), l, r, dst))
            if dst not in seen:
                seen.add(dst)
                states.append(dst)
                todo.append(dst)
    finals = frozenset(s for s in states if s[0] == t.nonterminal and s[1] == tuple(x))
    return TrackedPumpTransducer(t, tuple(x), tuple(states), tuple(edges), start, finals, clamped)


# ---------------------------------------------------------------- ideals and skeleton runs

@dataclass(frozen=True)
class Ideal:
    """Product of atoms: ``("letter", a)`` for {a, ε} and ``("star", Ξ)`` for Ξ*."""

    atoms: tuple = ()

    def normalized(self) -> "Ideal":
        out = []
        for kind, val in self.atoms:
            if kind == "star" and not val:
                continue
            if kind == "star" and out and out[-1][0] == "star":
                out[-1] = ("star", out[-1][1] | val)
                continue
            out.append((kind, frozenset(val) if kind == "star" else val))
        return Ideal(tuple(out))

    def __contains__(self, w) -> bool:
        i = 0
        w = tuple(w)
        for kind, val in self.atoms:
            if kind == "star":
                while i < len(w) and w[i] in val:
                    i += 1
            elif i < len(w) and w[i] == val:
                i += 1
        return i == len(w)

    def words(self, max_len: int) -> set:
        out = {()}
        for kind, val in self.atoms:
            nxt = set()
            for w in out:
                if kind == "star":
                    for n in range(max_len - len(w) + 1):
                        for ext in itertools.product(sorted(val), repeat=n):
                            nxt.add(w + ext)
                else:
                    nxt.add(w)
                    if len(w) < max_len:
                        nxt.add(w + (val,))
            out = nxt
        return out

    def __str__(self) -> str:
        parts = [f"{{{v},ε}}" if k == "letter" else f"[{' '.join(sorted(v))}]*" for k, v in self.atoms]
        return " ".join(parts) or "ε"


@dataclass(frozen=True)
class SkeletonRun:
    edges: tuple
    left: Ideal
    right: Ideal


def _cycle_letters(t: TrackedPumpTransducer, side: int, handlers: Callable[[str], bool]) -> dict:
    """Per state: handler letters read on ``side`` by edges inside its strongly connected component."""
    succ: dict = {q: set() for q in t.states}
    for s, _, _, d in t.edges:
        succ[s].add(d)
    comp = _scc_map(t.states, succ)
    letters: dict = {q: set() for q in t.states}
    by_comp: dict = {}
    for e in t.edges:
        s, d = e[0], e[3]
        if comp[s] != comp[d]:
            continue
        val = e[1 + side]
        if isinstance(val, frozenset):
            found = set(val)
        elif val is not None and handlers(val):
            found = {val}
        else:
            found = set()
        by_comp.setdefault(comp[s], set()).update(found)
    for q in t.states:
        letters[q] = frozenset(by_comp.get(comp[q], set()))
    return letters


def _scc_map(states, succ) -> dict:
    index, low, on, stack, comp = {}, {}, set(), [], {}
    counter = [0]
    for root in states:
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on.add(root)
        while work:
            node, it = work[-1]
            pushed = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on.add(w)
                    work.append((w, iter(succ[w])))
                    pushed = True
                    break
                if w in on:
                    low[node] = min(low[node], index[w])
            if pushed:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[node])
            if low[node] == index[node]:
                members = []
                while True:
                    w = stack.pop()
                    on.discard(w)
                    members.append(w)
                    if w == node:
                        break
                key = frozenset(members)
                for w in members:
                    comp[w] = key
    return comp


def skeleton_runs(t: TrackedPumpTransducer, table: SymbolTable = CANONICAL, cap: int = 10_000) -> list:
    """All runs from the initial to a final state without repeated states, with their ideals.

    The right ideal is given in the order of the pump's right word.
    """
    def is_handler(s):
        return s not in MARKERS and not table.is_dyck_symbol(s)

    cyc_left = _cycle_letters(t, 0, is_handler)
    cyc_right = _cycle_letters(t, 1, is_handler)
    out = []
    out_edges: dict = {}
    for e in t.edges:
        out_edges.setdefault(e[0], []).append(e)

    def atom(val):
        if isinstance(val, frozenset):
            return ("star", val)
        return ("letter", val) if val is not None else None

    def ideals(path):
        states = [t.initial] + [e[3] for e in path]
        left, right = [], []
        for i, q in enumerate(states):
            if i:
                a, b = atom(path[i - 1][1]), atom(path[i - 1][2])
                if a:
                    left.append(a)
                if b:
                    right.append(b)
            left.append(("star", cyc_left[q]))
            right.append(("star", cyc_right[q]))
        return Ideal(tuple(left)).normalized(), Ideal(tuple(reversed(right))).normalized()

    def dfs(q, path, visited):
        if q in t.finals and path:
            left, right = ideals(path)
            out.append(SkeletonRun(tuple(path), left, right))
            if len(out) > cap:
                raise CapExceeded("skeleton runs", cap)
        for e in out_edges.get(q, []):
            if e[3] in visited:
                continue
            dfs(e[3], path + [e], visited | {e[3]})

    dfs(t.initial, [], {t.initial})
    return out


# ---------------------------------------------------------------- programs to VASS

def program_vass(p, body_nfa: Callable[[str], Nfa], label_events: bool = True):
    """VASS simulating ``p`` with each handler body replaced by an automaton.

    Counters are the handler names; a handler letter read by a body automaton
    increments its counter, event letters become edge labels.
    """
    from .vass import VassBuilder

    handlers = sorted(p.handlers)
    b = VassBuilder(handlers)
    init = b.state(("init",))
    for q in p.states:
        b.state(q)
    b.edge(init, None, p.initial, {p.start_handler: 1})
    cache: dict = {}
    for k, r in enumerate(p.rules):
        if r.nonterminal not in cache:
            cache[r.nonterminal] = body_nfa(r.nonterminal)
        nfa = cache[r.nonterminal]
        if not nfa.finals:
            continue
        ids = {s: b.state(("rule", k, s)) for s in nfa.states}
        b.edge(r.src, None, ids[nfa.initial], {r.handler: -1})
        for s, a, d in nfa.edges:
            if a is None:
                b.edge(ids[s], None, ids[d])
            elif a in p.handlers:
                b.edge(ids[s], None, ids[d], {a: 1})
            else:
                b.edge(ids[s], a if label_events else None, ids[d])
        for f in nfa.finals:
            b.edge(ids[f], None, r.dst)
    return b.build(init, [p.final])


def emptiness_vass(p, budget: int = DEFAULT_NFA_BUDGET):
    """Events erased, handler bodies replaced by their subword closures."""
    return program_vass(p, lambda a: subword_closure_nfa(p.grammar, a, lambda s: s in p.handlers, budget),
                        label_events=False)


def ap_to_vass(p, cap: int = DEFAULT_PROFILE_CAP, budget: int = DEFAULT_NFA_BUDGET):
    """VASS with the same downward closure as the program (bodies via ``closure_nfa``)."""
    return program_vass(p, lambda a: closure_nfa(p.grammar.with_start(a), cap, budget))
