"""Brute-force reference semantics used to check the decision procedure.

Nothing here calls into the modules it checks: words, orders, grammar
languages, program runs and VASS runs are all re-implemented directly from
their definitions, trading speed for obviousness.
"""
from __future__ import annotations

import functools
import itertools
from collections import Counter, deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

HASH, BARHASH = "#", "~#"


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_len: int = 8
    max_steps: int = 10
    max_configs: int = 200_000
    max_results: int = 200_000
    slack: int = 4

    def __post_init__(self):
        for name in ("max_len", "max_steps", "max_configs", "max_results", "slack"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


# ---------------------------------------------------------------- words

def _is_close(s: str) -> bool:
    return s.startswith("~") and s != BARHASH


def _is_bracket(s: str, letters) -> bool:
    return (s[1:] if _is_close(s) else s) in letters


def brackets_of(w, letters) -> tuple:
    return tuple(s for s in w if _is_bracket(s, letters))


def oracle_effect(w, letters=("x",)) -> tuple:
    """(dip, offset) by scanning prefixes."""
    level, low = 0, 0
    for s in w:
        if s in letters:
            level += 1
        elif _is_close(s) and s[1:] in letters:
            level -= 1
            low = min(low, level)
    return -low, level


def oracle_classify(w, letters) -> Optional[str]:
    """None for Dyck words, else the violation kind with priority DV, OV, MV."""
    dip, off = oracle_effect(w, letters)
    if dip > 0:
        return "DV"
    if off != 0:
        return "OV"
    stack = []
    for s in w:
        if s in letters:
            stack.append(s)
        elif _is_close(s) and s[1:] in letters:
            if stack.pop() != s[1:]:
                return "MV"
    return None


def _subword(u, v) -> bool:
    i = 0
    for s in v:
        if i < len(u) and u[i] == s:
            i += 1
    return i == len(u)


def split(z):
    """(inside, outside, shape) or None for a badly marked word."""
    z = tuple(z)
    hs = [i for i, s in enumerate(z) if s == HASH]
    bs = [i for i, s in enumerate(z) if s == BARHASH]
    if len(hs) > 1 or len(bs) > 1:
        return None
    if hs and bs:
        if bs[0] < hs[0]:
            return None
        return z[hs[0] + 1:bs[0]], z[:hs[0]] + z[bs[0] + 1:], "BOTH"
    if hs:
        return z[hs[0] + 1:], z[:hs[0]], "HASH"
    if bs:
        return z[:bs[0]], z[bs[0] + 1:], "BARHASH"
    return z, (), "NONE"


def admissible(z) -> bool:
    """An infix of u # v ~# w with v a Dyck word (one bracket letter x)."""
    parts = split(z)
    if parts is None:
        return False
    inside, _, shape = parts
    level, low, high_suffix = 0, 0, 0
    for s in inside:
        if s == "x":
            level += 1
        elif s == "~x":
            level -= 1
        low = min(low, level)
    if shape == "NONE":
        return True
    if shape == "HASH":
        return low == 0
    if shape == "BARHASH":
        # every suffix has nonpositive offset
        acc = 0
        for s in reversed(inside):
            acc += 1 if s == "x" else -1 if s == "~x" else 0
            if acc > 0:
                return False
        return True
    return low == 0 and level == 0


def _dyck_words(max_len: int) -> list:
    out, layer = [()], [((), 0)]
    for _ in range(max_len):
        nxt = []
        for w, h in layer:
            nxt.append((w + ("x",), h + 1))
            if h > 0:
                nxt.append((w + ("~x",), h - 1))
        layer = nxt
        out.extend(w for w, h in layer if h == 0)
    return out


@functools.lru_cache(maxsize=None)
def _dyck_pieces(max_dyck: int) -> tuple:
    """Prefixes, suffixes and members of the Dyck words with at most max_dyck brackets."""
    full = _dyck_words(max_dyck)
    prefixes = {v[:i] for v in full for i in range(len(v) + 1)}
    suffixes = {v[i:] for v in full for i in range(len(v) + 1)}
    return prefixes, suffixes, set(full)


def admissible_by_embedding(z, max_dyck: int = 14) -> bool:
    """Search for u # v ~# w with v Dyck (v up to max_dyck brackets) having z as an infix."""
    parts = split(z)
    if parts is None:
        return False
    inside, _, shape = parts
    core = tuple(s for s in inside if s in ("x", "~x"))
    prefixes, suffixes, full = _dyck_pieces(max_dyck)
    return {"NONE": True, "HASH": core in prefixes, "BARHASH": core in suffixes,
            "BOTH": core in full}[shape]


def signature(z) -> tuple:
    inside, outside, shape = split(z)
    return (shape, tuple(s for s in inside if s not in ("x", "~x")), oracle_effect(inside),
            tuple(s for s in outside if s not in ("x", "~x")), oracle_effect(outside))


def below(z, y) -> bool:
    """z ⊑ y for admissible marked words over x, ~x, handlers and markers."""
    s1, s2 = signature(z), signature(y)
    if s1[0] != s2[0]:
        return False
    for gz, ez, gy, ey in ((s1[1], s1[2], s2[1], s2[2]), (s1[3], s1[4], s2[3], s2[4])):
        if ez[1] != ey[1] or ez[0] < ey[0] or not _subword(gz, gy):
            return False
    return True


# ---------------------------------------------------------------- languages

def grammar_words(g, max_len: int, start: Optional[str] = None, cap: int = 500_000) -> set:
    """Words of length <= max_len, computed length by length (exact)."""
    nts = set(g.nonterminals)
    prods = list(g.productions)
    by_len = {a: [set() for _ in range(max_len + 1)] for a in nts}

    def sym_words(s, n):
        if s in nts:
            return by_len[s][n]
        return {(s,)} if n == 1 else set()

    def seq_words(rhs, n):
        if not rhs:
            return {()} if n == 0 else set()
        out = set()
        head, rest = rhs[0], rhs[1:]
        for k in range(n + 1):
            left = sym_words(head, k)
            if not left:
                continue
            right = seq_words(rest, n - k)
            for u in left:
                for v in right:
                    out.add(u + v)
        return out

    total = 0
    for n in range(max_len + 1):
        changed = True
        while changed:
            changed = False
            for p in prods:
                if p.star is not None:
                    new = set(itertools.product(sorted(p.star), repeat=n))
                else:
                    new = seq_words(p.rhs, n)
                fresh = new - by_len[p.lhs][n]
                if fresh:
                    by_len[p.lhs][n] |= fresh
                    total += len(fresh)
                    if total > cap:
                        raise BudgetExceeded("grammar words")
                    changed = True
    root = start or g.start
    return set().union(*by_len[root]) if root in nts else set()


def nfa_words(nfa, max_len: int) -> set:
    out = set()
    todo = deque([(nfa.initial, ())])
    seen = set(todo)
    succ = {}
    for s, a, d in nfa.edges:
        succ.setdefault(s, []).append((a, d))
    while todo:
        q, w = todo.popleft()
        if q in nfa.finals:
            out.add(w)
        for a, d in succ.get(q, ()):
            w2 = w if a is None else w + (a,)
            if len(w2) <= max_len and (d, w2) not in seen:
                seen.add((d, w2))
                todo.append((d, w2))
    return out


@dataclass
class VassLanguage:
    words: set
    complete: bool


def vass_words(v, max_len: int, counter_cap: int = 8, max_configs: int = 200_000) -> VassLanguage:
    """Accepted words up to ``max_len``; incomplete if some counter had to exceed the cap."""
    start = (v.initial, tuple(0 for _ in v.counters), ())
    todo = deque([start])
    seen = {start}
    words = set()
    complete = True
    succ = {}
    for e in v.edges:
        succ.setdefault(e.src, []).append(e)
    while todo:
        q, c, w = todo.popleft()
        if q in v.finals:
            words.add(w)
        for e in succ.get(q, ()):
            c2 = tuple(a + b for a, b in zip(c, e.delta))
            if min(c2, default=0) < 0:
                continue
            if max(c2, default=0) > counter_cap:
                complete = False
                continue
            w2 = w if e.label is None else w + (e.label,)
            if len(w2) > max_len:
                continue
            item = (e.dst, c2, w2)
            if item not in seen:
                seen.add(item)
                if len(seen) > max_configs:
                    raise BudgetExceeded("vass configurations")
                todo.append(item)
    return VassLanguage(words, complete)


class Cover(str, Enum):
    REACHABLE = "REACHABLE"
    UNREACHABLE = "UNREACHABLE"
    UNKNOWN = "UNKNOWN"


def forward_cover(v, counter_cap: int = 8, max_configs: int = 100_000) -> Cover:
    """Forward breadth-first search with counters capped; UNKNOWN if the cap cut anything off."""
    start = (v.initial, tuple(0 for _ in v.counters))
    todo = deque([start])
    seen = {start}
    cut = False
    succ = {}
    for e in v.edges:
        succ.setdefault(e.src, []).append(e)
    while todo:
        q, c = todo.popleft()
        if q in v.finals:
            return Cover.REACHABLE
        for e in succ.get(q, ()):
            c2 = tuple(a + b for a, b in zip(c, e.delta))
            if min(c2, default=0) < 0:
                continue
            if max(c2, default=0) > counter_cap:
                cut = True
                continue
            if (e.dst, c2) not in seen:
                seen.add((e.dst, c2))
                if len(seen) > max_configs:
                    return Cover.UNKNOWN
                todo.append((e.dst, c2))
    return Cover.UNKNOWN if cut else Cover.UNREACHABLE


@dataclass
class CoverReport:
    oracle: Cover
    implementation: Optional[bool]

    @property
    def agree(self) -> Optional[bool]:
        if self.oracle is Cover.UNKNOWN or self.implementation is None:
            return None
        return (self.oracle is Cover.REACHABLE) == self.implementation


def oracle_coverability(v, counter_cap: int = 8, max_configs: int = 100_000) -> CoverReport:
    """Three-valued comparison of forward search against the backward algorithm."""
    from .errors import CapExceeded
    from .vass import coverable
    try:
        impl = bool(coverable(v))
    except CapExceeded:
        impl = None
    return CoverReport(forward_cover(v, counter_cap, max_configs), impl)


# ---------------------------------------------------------------- programs

@dataclass
class OracleRun:
    trace: tuple
    steps: tuple


@dataclass
class OracleVerdict:
    violation: Optional[str]          # "OV" / "DV" / "MV" or None
    witness: Optional[OracleRun] = None
    exhausted: bool = False           # True when some budget cut the search short

    @property
    def found(self) -> bool:
        return self.violation is not None


def program_runs(p, b: OracleBudget, report: Optional[dict] = None):
    """Yield (trace, steps) of accepting runs, shortest runs first, each trace once.

    ``report["exhausted"]`` is set when a budget cut some run short.
    """
    report = {} if report is None else report
    report["exhausted"] = False
    bodies = {}
    for r in p.rules:
        if r.nonterminal not in bodies:
            ws = sorted(grammar_words(p.grammar, b.max_len, r.nonterminal), key=lambda w: (len(w), w))
            eff = {}
            for w in ws:
                ev = tuple(s for s in w if s not in p.handlers)
                posted = tuple(sorted(Counter(s for s in w if s in p.handlers).items()))
                eff.setdefault((ev, posted), w)
            bodies[r.nonterminal] = sorted(eff.items(), key=lambda kv: (len(kv[1]), kv[1]))
    start = (p.initial, ((p.start_handler, 1),), ())
    layer = {start: ()}
    seen = {start}
    emitted = set()
    exhausted = False
    for depth in range(b.max_steps + 1):
        for (q, bag, trace), steps in sorted(layer.items(), key=lambda kv: (len(kv[0][2]), kv[0][2], kv[1])):
            if q == p.final and trace not in emitted:
                emitted.add(trace)
                yield trace, steps
        if depth == b.max_steps:
            exhausted = exhausted or bool(layer)
            report["exhausted"] = exhausted
            break
        nxt = {}
        for (q, bag, trace), steps in layer.items():
            counts = dict(bag)
            for r in p.rules:
                if r.src != q or counts.get(r.handler, 0) < 1:
                    continue
                for (ev, posted), w in bodies[r.nonterminal]:
                    c = Counter(counts)
                    c[r.handler] -= 1
                    c.update(dict(posted))
                    bag2 = tuple(sorted((h, n) for h, n in c.items() if n > 0))
                    if len(trace) + len(ev) > b.max_len:
                        exhausted = report["exhausted"] = True
                        continue
                    item = (r.dst, bag2, trace + ev)
                    if item in seen:
                        continue
                    seen.add(item)
                    if len(seen) > b.max_configs:
                        raise BudgetExceeded("program configurations")
                    nxt[item] = steps + (f"{r.src} --{r.handler}/{r.nonterminal}--> {r.dst} body: "
                                         f"{' '.join(w) or 'ε'}",)
        layer = nxt
        if not layer:
            break


def oracle_dyck_inclusion(p, b: OracleBudget = OracleBudget()) -> OracleVerdict:
    """Least violating trace (by length, then symbols) among runs within the budget."""
    letters = set(p.events)
    best = None
    report: dict = {}
    for trace, steps in program_runs(p, b, report):
        kind = oracle_classify(trace, letters)
        if kind is None:
            continue
        key = (len(trace), trace)
        if best is None or key < best[0]:
            best = (key, kind, OracleRun(trace, steps))
    if best is None:
        return OracleVerdict(None, None, report["exhausted"])
    return OracleVerdict(best[1], best[2], report["exhausted"])


def program_traces(p, b: OracleBudget) -> set:
    return {t for t, _ in program_runs(p, b)}


# ---------------------------------------------------------------- pumps

def _letter_offset(s: str, letters) -> int:
    if s in letters:
        return 1
    return -1 if _is_close(s) and s[1:] in letters else 0


def pump_offsets(g, a: str, max_size: int, letters=("x",)) -> dict:
    """(offset(u), offset(v)) -> least derivation size over pumps a =>+ u a v of size <= max_size."""
    nts = set(g.nonterminals)
    terms = {b: {} for b in nts}    # offset -> least size
    ctx = {b: {} for b in nts}      # (offset u, offset v) -> least size
    ctx[a][(0, 0, "hole")] = 0

    def relax(store, key, size) -> bool:
        if size <= max_size and size < store.get(key, max_size + 1):
            store[key] = size
            return True
        return False

    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.star is not None:
                changed |= relax(terms[p.lhs], 0, 1)
                if any(_letter_offset(s, letters) for s in p.star):
                    raise ValueError("star over bracket letters is not supported")
                continue
            # plain words: running offset and size
            acc = {0: 1}
            for s in p.rhs:
                opts = terms[s] if s in nts else {_letter_offset(s, letters): 0}
                acc = {o + o2: min(acc.get(o + o2, 99), sz + sz2) for o, sz in acc.items()
                       for o2, sz2 in opts.items() if sz + sz2 <= max_size}
                # min over collisions
                merged: dict = {}
                for o, sz in acc.items():
                    merged[o] = min(merged.get(o, 99), sz)
                acc = merged
            for o, sz in acc.items():
                changed |= relax(terms[p.lhs], o, sz)
            # one child carries the hole
            for i, hole_sym in enumerate(p.rhs):
                if hole_sym not in nts:
                    continue
                acc2 = {(0, 0): 1}
                for j, s in enumerate(p.rhs):
                    nxt: dict = {}
                    if j == i:
                        for (ou, ov), sz in acc2.items():
                            for key, sz2 in ctx[s].items():
                                k = (ou + key[0], key[1])
                                if sz + sz2 <= max_size:
                                    nxt[k] = min(nxt.get(k, 99), sz + sz2)
                    else:
                        opts = terms[s] if s in nts else {_letter_offset(s, letters): 0}
                        for (ou, ov), sz in acc2.items():
                            for o2, sz2 in opts.items():
                                k = (ou + o2, ov) if j < i else (ou, ov + o2)
                                if sz + sz2 <= max_size:
                                    nxt[k] = min(nxt.get(k, 99), sz + sz2)
                    acc2 = nxt
                for (ou, ov), sz in acc2.items():
                    changed |= relax(ctx[p.lhs], (ou, ov, "ctx"), sz)
    return {(ou, ov): sz for (ou, ov, kind), sz in ctx[a].items() if kind == "ctx"}


def untame_pump(g, max_size: int, letters=("x",)) -> Optional[tuple]:
    """Some (nonterminal, offset(u), offset(v)) of a pump breaking tameness, if one has size <= max_size."""
    for a in g.nonterminals:
        for (ou, ov), _ in sorted(pump_offsets(g, a, max_size, letters).items(), key=lambda kv: (kv[1], kv[0])):
            if ou < 0 or ou + ov != 0:
                return a, ou, ov
    return None


def derivation_yield(g, tree) -> tuple:
    """(left, right) around the hole of a derivation tree, checking every production is in g."""
    prods = set(g.productions)
    left, right, seen = [], [], []

    def walk(node):
        if node == "HOLE":
            if seen:
                raise ValueError("two holes")
            seen.append(True)
            return
        if node.production not in prods:
            raise ValueError(f"{node.production} is not a production")
        if len(node.children) != len(node.production.rhs):
            raise ValueError("arity mismatch")
        for s, c in zip(node.production.rhs, node.children):
            if c is None:
                if s in g.nonterminals:
                    raise ValueError(f"nonterminal {s} left unexpanded")
                (right if seen else left).append(s)
            else:
                if c != "HOLE" and c.production.lhs != s:
                    raise ValueError("child does not expand its symbol")
                walk(c)

    walk(tree)
    if not seen:
        raise ValueError("no hole")
    return tuple(left), tuple(right)


def pump_is_untame(g, pump, letters=("x",)) -> bool:
    """Replay a claimed pump and confirm it breaks tameness."""
    u, v = derivation_yield(g, pump.witness)
    if (u, v) != (tuple(pump.left), tuple(pump.right)) or pump.witness.production.lhs != pump.nonterminal:
        return False
    ou = oracle_effect(u, letters)[1]
    ov = oracle_effect(v, letters)[1]
    return ou < 0 or ou + ov != 0


def min_dip(g, a: str, max_len: int, letters=("x",)) -> Optional[int]:
    """Least dip over words of a up to max_len, or None when there are none."""
    words = grammar_words(g, max_len, start=a)
    return min((oracle_effect(w, letters)[0] for w in words), default=None)


# ---------------------------------------------------------------- closures

def _alphabet(words) -> list:
    letters = {s for w in words for s in w if s not in (HASH, BARHASH, "x", "~x")}
    return sorted(letters)


def closure_slice(language: Iterable[tuple], max_len: int, alphabet: Iterable[str] = ()) -> set:
    """Admissible words up to ``max_len`` below some admissible word of ``language``."""
    ys = [y for y in language if admissible(y)]
    sigs = {signature(y) for y in ys}
    handlers = sorted(set(_alphabet(ys)) | set(alphabet))
    markers = sorted({s for y in ys for s in y if s in (HASH, BARHASH)})
    letters = ["x", "~x", *handlers, *markers]
    out = set()
    for n in range(max_len + 1):
        for z in itertools.product(letters, repeat=n):
            if not admissible(z):
                continue
            sz = signature(z)
            for sy in sigs:
                if sz[0] != sy[0]:
                    continue
                if (sz[2][1] == sy[2][1] and sz[2][0] >= sy[2][0] and _subword(sz[1], sy[1])
                        and sz[4][1] == sy[4][1] and sz[4][0] >= sy[4][0] and _subword(sz[3], sy[3])):
                    out.add(z)
                    break
    return out


@dataclass
class ClosureSlice:
    words: set
    slack: int
    stable: bool


# Compositional closure slices.  An abstraction of a word y is
# (shape, in-handlers, in-effect, out-handlers, out-effect) and a set of them is
# kept closed under dropping handler letters, so the slice of a concatenation
# follows from the slices of its parts.

def _compose(e1, e2):
    return max(e1[0], e2[0] - e1[1]), e1[1] + e2[1]


_ZERO = (0, 0)


def _join(a, b):
    sa, ga, ea, ha, fa = a
    sb, gb, eb, hb, fb = b
    if sa == "NONE" and sb == "NONE":
        return "NONE", ga + gb, _compose(ea, eb), (), _ZERO
    if sa == "HASH" and sb == "NONE":
        return "HASH", ga + gb, _compose(ea, eb), ha, fa
    if sa == "NONE" and sb == "HASH":
        return "HASH", gb, eb, ga + hb, _compose(ea, fb)
    if sa == "BARHASH" and sb == "NONE":
        return "BARHASH", ga, ea, ha + gb, _compose(fa, eb)
    if sa == "NONE" and sb == "BARHASH":
        return "BARHASH", ga + gb, _compose(ea, eb), hb, fb
    if sa == "HASH" and sb == "BARHASH":
        return "BOTH", ga + gb, _compose(ea, eb), ha + hb, _compose(fa, fb)
    if sa == "BOTH" and sb == "NONE":
        return "BOTH", ga, ea, ha + gb, _compose(fa, eb)
    if sa == "NONE" and sb == "BOTH":
        return "BOTH", gb, eb, ga + hb, _compose(ea, fb)
    return None


def _keep(a, n: int, cap: int) -> bool:
    shape, g, e, h, f = a
    if len(g) + len(h) > n or max(e[0], abs(e[1]), f[0], abs(f[1])) > cap:
        return False
    if shape in ("HASH", "BOTH") and e[0] > 0:
        return False
    if shape == "BARHASH" and e[0] != -e[1]:
        return False
    return True


def _letter(s: str) -> set:
    if s == "x":
        return {("NONE", (), (0, 1), (), _ZERO)}
    if s == "~x":
        return {("NONE", (), (1, -1), (), _ZERO)}
    if s == HASH:
        return {("HASH", (), _ZERO, (), _ZERO)}
    if s == BARHASH:
        return {("BARHASH", (), _ZERO, (), _ZERO)}
    if s.startswith("~"):
        raise ValueError(f"closure oracle handles the bracket letter x only, got {s!r}")
    return {("NONE", (s,), _ZERO, (), _ZERO), ("NONE", (), _ZERO, (), _ZERO)}


def _concat(xs, ys, n, cap) -> set:
    out = set()
    for a in xs:
        for b in ys:
            c = _join(a, b)
            if c is not None and _keep(c, n, cap):
                out.add(c)
    return out


def abstractions(g, n: int, cap: int) -> set:
    """Abstractions of the start symbol with at most n handlers and effects within cap."""
    nts = set(g.nonterminals)
    table = {a: set() for a in nts}
    eps = {("NONE", (), _ZERO, (), _ZERO)}

    def sym(s):
        return table[s] if s in nts else _letter(s)

    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.star is not None:
                cur, frontier = set(eps), set(eps)
                letters = set().union(*(_letter(s) for s in p.star)) if p.star else set()
                while frontier:
                    frontier = _concat(frontier, letters, n, cap) - cur
                    cur |= frontier
            else:
                cur = set(eps)
                for s in p.rhs:
                    cur = _concat(cur, sym(s), n, cap)
                    if not cur:
                        break
            if not cur <= table[p.lhs]:
                table[p.lhs] |= cur
                changed = True
    return {a for a in table[g.start] if a[0] != "BOTH" or a[2][1] == 0}


def _nfa_grammar(nfa):
    """Right-linear grammar with one nonterminal per state (oracle-local)."""
    from types import SimpleNamespace

    from .grammar import Production
    name = {q: f"q{i}" for i, q in enumerate(nfa.states)}
    prods = [Production(name[a], ((l, name[b]) if l is not None else (name[b],))) for a, l, b in nfa.edges]
    prods += [Production(name[q], ()) for q in nfa.finals]
    return SimpleNamespace(nonterminals=tuple(name.values()), productions=prods,
                           start=name[nfa.initial])


def abstraction_slice(g, max_len: int, cap: int) -> set:
    """Closure slice read off the start abstractions."""
    sigs = abstractions(g, max_len, cap)
    dips: dict = {}
    for shape, gi, ei, go, eo in sigs:
        dips.setdefault((shape, gi, ei[1], go, eo[1]), []).append((ei[0], eo[0]))
    handlers = sorted({s for a in sigs for s in a[1] + a[3]})
    markers = sorted({m for a in sigs for m in ((HASH,) if a[0] in ("HASH", "BOTH") else ())
                      + ((BARHASH,) if a[0] in ("BARHASH", "BOTH") else ())})
    letters = ["x", "~x", *handlers, *markers]
    out = set()
    for n in range(max_len + 1):
        for z in itertools.product(letters, repeat=n):
            if not admissible(z):
                continue
            shape, gi, ei, go, eo = signature(z)
            for di, do in dips.get((shape, gi, ei[1], go, eo[1]), ()):
                if di <= ei[0] and do <= eo[0]:
                    out.add(z)
                    break
    return out


def oracle_closure(source, max_len: int, slack: int = 2, max_slack: int = 16) -> ClosureSlice:
    """Bounded closure slice, growing a slack until two consecutive rounds agree.

    For a grammar or an NFA the slack bounds the effect values of intermediate
    abstractions; for a callable mapping a length to a finite language it is
    extra witness length.  Stabilization is evidence, not proof.
    """
    if callable(source):
        def run(s):
            return closure_slice(source(max_len + s), max_len)
    else:
        g = source if hasattr(source, "productions") else _nfa_grammar(source)

        def run(s):
            return abstraction_slice(g, max_len, max_len + s)

    s = slack
    prev = run(s)
    while s < max_slack:
        s += 2
        cur = run(s)
        if cur == prev:
            return ClosureSlice(cur, s, True)
        prev = cur
    return ClosureSlice(prev, s, False)
