"""Context-free grammars, optionally extended with star productions ``A -> [a b]*``.

Nonterminals and terminals are strings drawn from disjoint name spaces.  The
offset/dip arithmetic of terminals comes from a :class:`~dyckref.words.SymbolTable`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import CapExceeded
from .words import (BARHASH, CANONICAL, HASH, Effect, Shape, SymbolTable, compose,
                    effect, is_barred, base)

DEFAULT_DIP_CAP = 2 ** 20


@dataclass(frozen=True, order=True)
class Production:
    lhs: str
    rhs: tuple = ()
    star: frozenset | None = None

    @property
    def extended(self) -> bool:
        return self.star is not None

    def key(self):
        return (self.lhs, self.star is not None, self.rhs, tuple(sorted(self.star or ())))

    def __str__(self) -> str:
        if self.star is not None:
            return f"{self.lhs} -> [{' '.join(sorted(self.star))}]*"
        return f"{self.lhs} -> {' '.join(self.rhs)}".rstrip()


def prod(lhs: str, rhs: str | Sequence[str] = ()) -> Production:
    """Shorthand: ``prod('A', 'x A ~x')`` or ``prod('A', '[a b]*')``."""
    if isinstance(rhs, str):
        text = rhs.strip()
        if text.startswith("[") and text.endswith("]*"):
            return Production(lhs, (), frozenset(text[1:-2].split()))
        rhs = text.split()
    return Production(lhs, tuple(rhs))


@dataclass(frozen=True)
class Grammar:
    nonterminals: tuple
    terminals: frozenset
    productions: tuple
    start: str
    empty: bool = False

    def __post_init__(self):
        nts = tuple(dict.fromkeys(self.nonterminals))
        object.__setattr__(self, "nonterminals", nts)
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        prods = sorted(set(self.productions), key=Production.key)
        object.__setattr__(self, "productions", tuple(prods))
        ntset = set(nts)
        if ntset & self.terminals:
            raise ValueError(f"names used as both terminal and nonterminal: {sorted(ntset & self.terminals)}")
        if self.start not in ntset:
            raise ValueError(f"start symbol {self.start!r} is not a nonterminal")
        for p in prods:
            if p.lhs not in ntset:
                raise ValueError(f"undeclared nonterminal {p.lhs!r} in {p}")
            for s in p.rhs:
                if s not in ntset and s not in self.terminals:
                    raise ValueError(f"undeclared symbol {s!r} in {p}")
            if p.star is not None and not p.star <= self.terminals:
                raise ValueError(f"star production over non-terminals: {p}")

    @cached_property
    def by_lhs(self) -> dict:
        out = {a: [] for a in self.nonterminals}
        for p in self.productions:
            out[p.lhs].append(p)
        return out

    @cached_property
    def ntset(self) -> frozenset:
        return frozenset(self.nonterminals)

    def is_nonterminal(self, s: str) -> bool:
        return s in self.ntset

    @property
    def size(self) -> int:
        return sum((len(p.star) if p.extended else len(p.rhs)) + 1 for p in self.productions)

    @property
    def extended(self) -> bool:
        return any(p.extended for p in self.productions)

    def is_cnf(self) -> bool:
        on_rhs = {s for p in self.productions for s in p.rhs}
        for p in self.productions:
            if p.extended:
                continue
            if len(p.rhs) == 2 and all(self.is_nonterminal(s) for s in p.rhs):
                continue
            if len(p.rhs) == 1 and not self.is_nonterminal(p.rhs[0]):
                continue
            if not p.rhs and p.lhs == self.start and self.start not in on_rhs:
                continue
            return False
        return True

    def with_start(self, start: str) -> "Grammar":
        return Grammar(self.nonterminals, self.terminals, self.productions, start)

    def __str__(self) -> str:
        return "\n".join(str(p) for p in self.productions)


def grammar(start: str, productions: Iterable[Production], terminals: Iterable[str] = (),
            nonterminals: Iterable[str] = ()) -> Grammar:
    """Build a grammar, inferring nonterminals from left-hand sides."""
    prods = list(productions)
    nts = list(dict.fromkeys([start, *nonterminals, *(p.lhs for p in prods)]))
    ntset = set(nts)
    terms = set(terminals)
    for p in prods:
        terms.update(s for s in p.rhs if s not in ntset)
        terms.update(p.star or ())
    return Grammar(tuple(nts), frozenset(terms), tuple(prods), start)


def parse_grammar(text: str, start: str | None = None) -> Grammar:
    """Parse ``A -> x A ~x | eps`` style lines; the first left-hand side is the start."""
    prods = []
    first = None
    for raw in text.strip().splitlines():
        line = raw.strip()
        if not line:
            continue
        lhs, _, rest = line.partition("->")
        lhs = lhs.strip()
        first = first or lhs
        for alt in rest.split("|"):
            alt = alt.strip()
            prods.append(prod(lhs, "" if alt in ("eps", "ε") else alt))
    return grammar(start or first, prods)


class _Fresh:
    def __init__(self, used: Iterable[str]):
        self.used = set(used)

    def __call__(self, stem: str) -> str:
        for k in itertools.count(1):
            name = f"{stem}.{k}"
            if name not in self.used:
                self.used.add(name)
                return name
        raise AssertionError


def trim(g: Grammar) -> Grammar:
    """Drop non-productive and unreachable nonterminals; ``empty`` is set when L(g) = {}."""
    productive: set = set()
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.lhs not in productive and all(
                    not g.is_nonterminal(s) or s in productive for s in p.rhs):
                productive.add(p.lhs)
                changed = True
    if g.start not in productive:
        return Grammar((g.start,), g.terminals, (), g.start, empty=True)
    prods = [p for p in g.productions if all(not g.is_nonterminal(s) or s in productive for s in p.rhs)
             and p.lhs in productive]
    reach = {g.start}
    stack = [g.start]
    by = {}
    for p in prods:
        by.setdefault(p.lhs, []).append(p)
    while stack:
        a = stack.pop()
        for p in by.get(a, ()):
            for s in p.rhs:
                if g.is_nonterminal(s) and s not in reach:
                    reach.add(s)
                    stack.append(s)
    prods = [p for p in prods if p.lhs in reach]
    nts = tuple(a for a in g.nonterminals if a in reach)
    return Grammar(nts, g.terminals, tuple(prods), g.start)


def nullable(g: Grammar) -> set:
    out: set = set()
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.lhs in out:
                continue
            if p.extended or all(s in out for s in p.rhs):
                out.add(p.lhs)
                changed = True
    return out


def to_cnf(g: Grammar) -> Grammar:
    """Language-preserving Chomsky normal form; star productions stay as leaves."""
    fresh = _Fresh([*g.nonterminals, *g.terminals])
    prods = list(g.productions)
    start = g.start
    nts = list(g.nonterminals)
    if any(start in p.rhs for p in prods):
        new_start = fresh(start)
        prods.append(Production(new_start, (start,)))
        nts.insert(0, new_start)
        start = new_start
    # lift terminals out of long right-hand sides
    lifted: dict = {}
    step = []
    for p in prods:
        if not p.extended and len(p.rhs) >= 2:
            rhs = []
            for s in p.rhs:
                if s in g.terminals:
                    if s not in lifted:
                        lifted[s] = fresh(f"T[{s}]")
                        nts.append(lifted[s])
                        step.append(Production(lifted[s], (s,)))
                    rhs.append(lifted[s])
                else:
                    rhs.append(s)
            step.append(Production(p.lhs, tuple(rhs)))
        else:
            step.append(p)
    # binarize
    prods = []
    for p in step:
        if p.extended or len(p.rhs) <= 2:
            prods.append(p)
            continue
        lhs = p.lhs
        rest = list(p.rhs)
        while len(rest) > 2:
            nxt = fresh(p.lhs)
            nts.append(nxt)
            prods.append(Production(lhs, (rest[0], nxt)))
            lhs, rest = nxt, rest[1:]
        prods.append(Production(lhs, tuple(rest)))
    # remove epsilon productions
    tmp = Grammar(tuple(nts), g.terminals, tuple(prods), start)
    null = nullable(tmp)
    out = set()
    for p in prods:
        if p.extended:
            out.add(p)
        elif len(p.rhs) == 2:
            b, c = p.rhs
            out.add(p)
            if c in null:
                out.add(Production(p.lhs, (b,)))
            if b in null:
                out.add(Production(p.lhs, (c,)))
        elif len(p.rhs) == 1:
            out.add(p)
    if start in null:
        out.add(Production(start, ()))
    # remove unit productions
    units = {a: {a} for a in nts}
    changed = True
    while changed:
        changed = False
        for p in out:
            if len(p.rhs) == 1 and p.rhs[0] in units:
                for a in nts:
                    if p.lhs in units[a] and p.rhs[0] not in units[a]:
                        units[a].add(p.rhs[0])
                        changed = True
    final = set()
    for a in nts:
        for b in units[a]:
            for p in out:
                if p.lhs != b:
                    continue
                if len(p.rhs) == 1 and p.rhs[0] in units:
                    continue
                if not p.rhs and not p.extended and a != start:
                    continue
                final.add(Production(a, p.rhs, p.star))
    return trim(Grammar(tuple(nts), g.terminals, tuple(final), start))


def star_words(letters: Iterable[str], max_len: int):
    letters = sorted(letters)
    for n in range(max_len + 1):
        yield from itertools.product(letters, repeat=n)


def enumerate_words(g: Grammar, max_len: int, cap: int = 200_000,
                    start: str | None = None) -> list:
    """All words of L(g) of length at most ``max_len``, sorted by (length, word)."""
    table = derivable_words(g, max_len, cap)
    words = table.get(start or g.start, set())
    return sorted(words, key=lambda w: (len(w), w))


def derivable_words(g: Grammar, max_len: int, cap: int = 200_000) -> dict:
    """Per-nonterminal sets of derivable words up to ``max_len`` (least fixpoint)."""
    sets: dict = {a: set() for a in g.nonterminals}
    if g.empty:
        return sets
    total = 0

    def expand(p: Production):
        if p.extended:
            return set(star_words(p.star, max_len))
        cur = {()}
        for s in p.rhs:
            options = sets[s] if g.is_nonterminal(s) else {(s,)}
            cur = {u + v for u in cur for v in options if len(u) + len(v) <= max_len}
            if not cur:
                break
        return cur

    changed = True
    while changed:
        changed = False
        for p in g.productions:
            new = expand(p) - sets[p.lhs]
            if new:
                sets[p.lhs] |= new
                total += len(new)
                if total > cap:
                    raise CapExceeded("enumerate_words", cap, f"more than {cap} words")
                changed = True
    return sets


# marker typing ---------------------------------------------------------------

CLASS_NAMES = {Shape.BOTH: "N_hashbar", Shape.HASH: "N_hash", Shape.BARHASH: "N_barhash",
               Shape.NONE: "N_0"}
_SUFFIX = {Shape.NONE: "", Shape.HASH: "/#", Shape.BARHASH: "/~#", Shape.BOTH: "/#~#"}
BAD = "BAD"


def join_shapes(a, b):
    """Marker shape of a concatenation, or ``BAD`` for a disordered or repeated marker."""
    if a == BAD or b == BAD:
        return BAD
    if a is Shape.NONE:
        return b
    if b is Shape.NONE:
        return a
    if a is Shape.HASH and b is Shape.BARHASH:
        return Shape.BOTH
    return BAD


def symbol_shape(s: str):
    return Shape.HASH if s == HASH else Shape.BARHASH if s == BARHASH else Shape.NONE


def split_name(a: str, shape: Shape) -> str:
    return a + _SUFFIX[shape]


class MarkedTyping(NamedTuple):
    partition: dict      # split nonterminal -> class name
    shapes: dict         # original nonterminal -> frozenset of shapes it derives
    grammars: dict       # Shape -> uniformly marked grammar (possibly empty)
    combined: Grammar    # all split nonterminals together, start derives every shape


class MarkerError(ValueError):
    pass


def marked_typing(g: Grammar) -> MarkedTyping:
    """Split every nonterminal by the marker content of the words it derives."""
    if any(p.extended and (HASH in p.star or BARHASH in p.star) for p in g.productions):
        raise MarkerError("markers under a star production")
    shapes: dict = {a: set() for a in g.nonterminals}

    def rhs_shapes(p: Production):
        if p.extended:
            return [((), Shape.NONE)]
        out = [((), Shape.NONE)]
        for s in p.rhs:
            opts = shapes[s] if g.is_nonterminal(s) else {symbol_shape(s)}
            out = [(ch + (o,), join_shapes(sh, o)) for ch, sh in out for o in opts]
        return out

    changed = True
    while changed:
        changed = False
        for p in g.productions:
            for _, sh in rhs_shapes(p):
                if sh not in shapes[p.lhs]:
                    shapes[p.lhs].add(sh)
                    changed = True
    # a BAD shape only matters if it is reachable from the start symbol
    reach = {g.start}
    stack = [g.start]
    while stack:
        a = stack.pop()
        for p in g.by_lhs[a]:
            for s in p.rhs:
                if g.is_nonterminal(s) and s not in reach:
                    reach.add(s)
                    stack.append(s)
    for a in reach:
        if BAD in shapes[a]:
            raise MarkerError(f"nonterminal {a} derives words with repeated or disordered markers")
    prods = []
    nts = []
    partition = {}
    for a in g.nonterminals:
        for sh in sorted((s for s in shapes[a] if s != BAD), key=lambda s: s.value):
            nts.append(split_name(a, sh))
            partition[split_name(a, sh)] = CLASS_NAMES[sh]
    for p in g.productions:
        for choice, sh in rhs_shapes(p):
            if sh == BAD:
                continue
            rhs = tuple(split_name(s, o) if g.is_nonterminal(s) else s
                        for s, o in zip(p.rhs, choice))
            prods.append(Production(split_name(p.lhs, sh), rhs, p.star))
    top = f"{g.start}/*"
    while top in g.ntset or top in g.terminals:
        top += "*"
    start_shapes = sorted((s for s in shapes[g.start] if s != BAD), key=lambda s: s.value)
    combined_prods = prods + [Production(top, (split_name(g.start, sh),)) for sh in start_shapes]
    combined = trim(Grammar((top, *nts), g.terminals, tuple(combined_prods), top))
    grammars = {}
    for sh in Shape:
        name = split_name(g.start, sh)
        if sh in shapes[g.start]:
            grammars[sh] = trim(Grammar((name, *nts), g.terminals, tuple(prods), name))
        else:
            grammars[sh] = Grammar((name,), g.terminals, (), name, empty=True)
    clean = {a: frozenset(s for s in v if s != BAD) for a, v in shapes.items()}
    return MarkedTyping(partition, clean, grammars, combined)


# offsets and dips ------------------------------------------------------------

class NonUniform(NamedTuple):
    nonterminal: str
    first: tuple
    second: tuple


def nonterminal_offsets(g: Grammar, table: SymbolTable = CANONICAL):
    """Offset of each nonterminal's language, or a :class:`NonUniform` witness."""
    known: dict = {}

    def sym(s):
        if g.is_nonterminal(s):
            return known.get(s)
        return (table.effect(s), (s,))

    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.extended:
                letters = sorted(p.star)
                for a in letters:
                    if table.effect(a) != 0:
                        return NonUniform(p.lhs, (), (a,))
                val = (0, ())
            else:
                parts = [sym(s) for s in p.rhs]
                if any(x is None for x in parts):
                    continue
                val = (sum(x[0] for x in parts), tuple(itertools.chain.from_iterable(x[1] for x in parts)))
            old = known.get(p.lhs)
            if old is None:
                known[p.lhs] = val
                changed = True
            elif old[0] != val[0]:
                return NonUniform(p.lhs, old[1], val[1])
    return {a: known[a][0] for a in g.nonterminals if a in known}


class Bound(NamedTuple):
    value: int
    capped: bool


def dip_bound(g: Grammar | int, cap: int = DEFAULT_DIP_CAP) -> Bound:
    """The certified dip bound 2^(2|g|) for tame-pumping grammars, saturated at ``cap``."""
    n = g if isinstance(g, int) else g.size
    if 2 * n >= cap.bit_length():
        return Bound(cap, True) if 2 ** (2 * n) > cap else Bound(2 ** (2 * n), False)
    return Bound(2 ** (2 * n), False)


def mindip(g: Grammar, table: SymbolTable = CANONICAL, cap: int = DEFAULT_DIP_CAP) -> dict:
    """Minimal dip of each nonterminal's language by downward saturation.

    Requires every nonterminal to be offset-uniform.  Raises :class:`CapExceeded`
    when the starting value was saturated and some nonterminal never dropped below it.
    """
    offs = nonterminal_offsets(g, table)
    if isinstance(offs, NonUniform):
        raise ValueError(f"mindip needs offset-uniform nonterminals; {offs.nonterminal} is not")
    top, capped = dip_bound(g, cap)
    d = {a: top for a in g.nonterminals}

    def value(p: Production) -> int:
        if p.extended:
            return 0
        best = 0
        level = 0
        for s in p.rhs:
            if g.is_nonterminal(s):
                dv, ov = d[s], offs[s]
            else:
                ov = table.effect(s)
                dv = 1 if ov < 0 else 0
            best = max(best, dv - level)
            level += ov
        return best

    changed = True
    while changed:
        changed = False
        for p in g.productions:
            v = value(p)
            if v < d[p.lhs]:
                d[p.lhs] = v
                changed = True
    if capped and any(v >= top for v in d.values()):
        raise CapExceeded("mindip", top, "saturation never dropped below the capped start value")
    return d


# pumps -----------------------------------------------------------------------

def tag(sym: str, side: str) -> str:
    return f"{sym}@{side}"


def untag(sym: str) -> tuple:
    name, _, side = sym.rpartition("@")
    return name, side


def pump_table(table: SymbolTable = CANONICAL) -> SymbolTable:
    letters = {tag(x, side) for x in table.dyck_letters for side in "LR"}
    return SymbolTable(frozenset(letters))


def pump_grammar(g: Grammar, a0: str) -> Grammar:
    """Grammar of the words ``u_L v_R`` over all pumps ``a0 =>* u a0 v``."""
    if a0 not in g.ntset:
        raise ValueError(f"undeclared nonterminal {a0!r}")
    prods = [Production(a0, ())]
    for p in g.productions:
        if p.extended:
            for side in "LR":
                prods.append(Production(tag(p.lhs, side), (), frozenset(tag(s, side) for s in p.star)))
        elif len(p.rhs) == 2 and all(g.is_nonterminal(s) for s in p.rhs):
            b, c = p.rhs
            prods.append(Production(tag(p.lhs, "L"), (tag(b, "L"), tag(c, "L"))))
            prods.append(Production(tag(p.lhs, "R"), (tag(b, "R"), tag(c, "R"))))
            prods.append(Production(p.lhs, (tag(b, "L"), c)))
            prods.append(Production(p.lhs, (b, tag(c, "R"))))
        elif len(p.rhs) <= 1 and all(not g.is_nonterminal(s) for s in p.rhs):
            for side in "LR":
                prods.append(Production(tag(p.lhs, side), tuple(tag(s, side) for s in p.rhs)))
        else:
            raise ValueError(f"pump_grammar needs CNF, got {p}")
    nts = [a0, *(a for a in g.nonterminals if a != a0)]
    nts += [tag(a, side) for a in g.nonterminals for side in "LR"]
    terms = {tag(t, side) for t in g.terminals for side in "LR"}
    return trim(Grammar(tuple(nts), frozenset(terms), tuple(prods), a0))


HOLE = "HOLE"


@dataclass(frozen=True)
class Derivation:
    """A derivation tree; ``children`` holds a subtree per nonterminal of the rhs
    (``None`` for terminals) and the string ``HOLE`` marks the pumped occurrence."""

    production: Production
    children: tuple

    def productions(self) -> list:
        out = [self.production]
        for c in self.children:
            if isinstance(c, Derivation):
                out.extend(c.productions())
        return out

    def size(self) -> int:
        return len(self.productions())

    def yield_parts(self) -> tuple:
        """Return ``(left, right, has_hole)``: the word split at the hole."""
        left: list = []
        right: list = []
        hole = False
        for s, c in zip(self.production.rhs, self.children):
            target = right if hole else left
            if c is None:
                target.append(s)
            elif c == HOLE:
                hole = True
            else:
                l, r, h = c.yield_parts()
                target.extend(l)
                if h:
                    hole = True
                    right.extend(r)
        return tuple(left), tuple(right), hole


def replay(d: Derivation | str) -> tuple:
    if d == HOLE:
        return (), ()
    left, right, hole = d.yield_parts()
    if not hole:
        raise ValueError("derivation has no hole")
    return left, right


class Pump(NamedTuple):
    nonterminal: str
    left: tuple
    right: tuple
    witness: Derivation


def enumerate_pumps(g: Grammar, a: str, max_size: int, cap: int = 100_000) -> list:
    """All nonempty pumps ``a =>+ u a v`` with a derivation of at most ``max_size`` productions."""
    if g.empty:
        return []
    terms: dict = {b: {} for b in g.nonterminals}   # word -> (size, tree)
    ctx: dict = {b: {} for b in g.nonterminals}     # (u, v) -> (size, tree)
    ctx[a][((), ())] = (0, HOLE)

    def options(s, hole: bool):
        if not g.is_nonterminal(s):
            return [] if hole else [((s,), 0, None)]
        src = ctx[s] if hole else terms[s]
        return [(k, sz, tr) for k, (sz, tr) in src.items()]

    def relax(store, key, size, tree) -> bool:
        old = store.get(key)
        if old is None or size < old[0]:
            store[key] = (size, tree)
            return True
        return False

    changed = True
    count = 0
    while changed:
        changed = False
        for p in g.productions:
            if p.extended:
                for w in star_words(p.star, max_size):
                    changed |= relax(terms[p.lhs], w, 1, Derivation(p, ()))
                continue
            budget = max_size - 1
            n = len(p.rhs)
            # terminal words
            combos = [((), 0, ())]
            for s in p.rhs:
                combos = [(w + w2, sz + sz2, trs + (t2,)) for w, sz, trs in combos
                          for w2, sz2, t2 in options(s, False) if sz + sz2 <= budget]
            for w, sz, trs in combos:
                changed |= relax(terms[p.lhs], w, sz + 1, Derivation(p, trs))
            # contexts, hole below position i
            for i in range(n):
                if not g.is_nonterminal(p.rhs[i]):
                    continue
                combos = [((), (), False, 0, ())]
                for j, s in enumerate(p.rhs):
                    nxt = []
                    for u, v, hole, sz, trs in combos:
                        if j == i:
                            for (cu, cv), sz2, t2 in options(s, True):
                                if sz + sz2 <= budget:
                                    nxt.append((u + cu, cv, True, sz + sz2, trs + (t2,)))
                        else:
                            for w2, sz2, t2 in options(s, False):
                                if sz + sz2 <= budget:
                                    if hole:
                                        nxt.append((u, v + w2, hole, sz + sz2, trs + (t2,)))
                                    else:
                                        nxt.append((u + w2, v, hole, sz + sz2, trs + (t2,)))
                    combos = nxt
                for u, v, _, sz, trs in combos:
                    if relax(ctx[p.lhs], (u, v), sz + 1, Derivation(p, trs)):
                        changed = True
                        count += 1
                        if count > cap:
                            raise CapExceeded("enumerate_pumps", cap)
    out = []
    for (u, v), (sz, tree) in sorted(ctx[a].items(), key=lambda kv: (kv[1][0], kv[0])):
        if tree == HOLE or (not u and not v):
            continue
        out.append(Pump(a, u, v, tree))
    return out
