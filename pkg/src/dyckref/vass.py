"""Vector addition systems with states under coverability acceptance.

A run starts in the initial state with all counters at zero, keeps every
counter nonnegative, and accepts when it reaches a final state.  The language
is the set of edge-label sequences of accepting runs.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Hashable, Iterable, Mapping, Optional

from .automata import Nfa
from .errors import CapExceeded
from .verdict import CapHit, Kind, Status, Verdict, Witness
from .words import (CANON, CANON_BAR, HASH, BARHASH, MARKERS, SymbolTable, base,
                    is_barred)

DEFAULT_BASIS_BUDGET = 200_000
DEFAULT_TRACK_BOUND = 64


class _Synthetic:
    """Origin of edges that have no counterpart in the source system (marker emissions)."""

    def __repr__(self) -> str:
        return "SYNTHETIC"


SYNTHETIC = _Synthetic()


@dataclass(frozen=True)
class Edge:
    src: Hashable
    label: Optional[str]
    delta: tuple
    dst: Hashable
    origin: Any = field(default=None, compare=False)

    @property
    def root(self):
        return self if self.origin is None else self.origin

    def __str__(self) -> str:
        return f"{self.src} -{self.label if self.label is not None else 'ε'} {list(self.delta)}-> {self.dst}"


@dataclass(frozen=True)
class Vass:
    states: tuple
    alphabet: frozenset
    counters: tuple
    edges: tuple
    initial: Hashable
    finals: frozenset

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(dict.fromkeys(self.states)))
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "edges", tuple(self.edges))
        known = set(self.states)
        if self.initial not in known or not self.finals <= known:
            raise ValueError("initial/final states must be declared")
        k = len(self.counters)
        for e in self.edges:
            if e.src not in known or e.dst not in known:
                raise ValueError(f"edge between undeclared states: {e}")
            if len(e.delta) != k or any(d not in (-1, 0, 1) for d in e.delta):
                raise ValueError(f"edge update must be a {k}-vector over {{-1,0,1}}: {e}")
            if e.label is not None and e.label not in self.alphabet:
                raise ValueError(f"edge label outside the alphabet: {e}")

    @cached_property
    def out(self) -> dict:
        table = {q: [] for q in self.states}
        for e in self.edges:
            table[e.src].append(e)
        return table

    @property
    def zero(self) -> tuple:
        return (0,) * len(self.counters)

    def fire(self, counters: tuple, e: Edge) -> Optional[tuple]:
        after = tuple(c + d for c, d in zip(counters, e.delta))
        return after if min(after, default=0) >= 0 else None

    def is_run(self, run: Iterable[Edge]) -> bool:
        """Does ``run`` fire from the initial configuration and end in a final state?"""
        state, counters = self.initial, self.zero
        for e in run:
            if e.src != state:
                return False
            counters = self.fire(counters, e)
            if counters is None:
                return False
            state = e.dst
        return state in self.finals

    def __str__(self) -> str:
        lines = [f"counters {' '.join(self.counters)}", f"initial {self.initial}",
                 f"finals {' '.join(map(str, sorted(self.finals, key=str)))}"]
        lines.extend(str(e) for e in self.edges)
        return "\n".join(lines)


def labels(run: Iterable[Edge]) -> tuple:
    return tuple(e.label for e in run if e.label is not None)


def source_run(run: Iterable[Edge]) -> tuple:
    """The source-system edges a derived run descends from."""
    return tuple(e.root for e in run if e.root is not SYNTHETIC)


def original_trace(run: Iterable[Edge]) -> tuple:
    """Labels of the source-system edges a derived run descends from."""
    out = []
    for e in run:
        r = e.root
        if r is not SYNTHETIC and r.label is not None:
            out.append(r.label)
    return tuple(out)


class VassBuilder:
    """Builds a VASS from multi-unit updates by chaining unit steps (decrements first)."""

    def __init__(self, counters: Iterable[str]):
        self.counters = tuple(counters)
        self.index = {c: i for i, c in enumerate(self.counters)}
        self.states: list = []
        self.edges: list = []
        self.alphabet: set = set()
        self._aux = 0

    def state(self, q: Hashable) -> Hashable:
        self.states.append(q)
        return q

    def _unit(self, counter: Optional[str], sign: int) -> tuple:
        vec = [0] * len(self.counters)
        if counter is not None:
            vec[self.index[counter]] = sign
        return tuple(vec)

    def edge(self, src, label: Optional[str], dst, update: Mapping[str, int] | None = None,
             origin: Any = None) -> None:
        steps = []
        for c, n in sorted((update or {}).items()):
            if n < 0:
                steps.extend([self._unit(c, -1)] * -n)
        for c, n in sorted((update or {}).items()):
            if n > 0:
                steps.extend([self._unit(c, 1)] * n)
        if not steps:
            steps = [self._unit(None, 0)]
        if label is not None:
            self.alphabet.add(label)
        cur = src
        for i, delta in enumerate(steps):
            last = i == len(steps) - 1
            if last:
                nxt = dst
            else:
                self._aux += 1
                nxt = self.state(("aux", self._aux))
            self.edges.append(Edge(cur, label if i == 0 else None, delta, nxt, origin))
            cur = nxt

    def build(self, initial, finals: Iterable) -> Vass:
        return Vass(tuple(self.states), frozenset(self.alphabet), self.counters, tuple(self.edges),
                    initial, frozenset(finals))


# ---------------------------------------------------------------- coverability

@dataclass(frozen=True)
class Reachable:
    run: tuple

    @property
    def word(self) -> tuple:
        return labels(self.run)

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Unreachable:
    basis: Mapping = field(default_factory=dict)

    def __bool__(self) -> bool:
        return False


def _dominates(big: tuple, small: tuple) -> bool:
    return all(b >= s for b, s in zip(big, small))


def control_reach(v: Vass, seeds: Iterable, forward: bool) -> set:
    adj: dict = {}
    for e in v.edges:
        a, b = (e.src, e.dst) if forward else (e.dst, e.src)
        adj.setdefault(a, []).append(b)
    seen = set(seeds)
    todo = deque(seen)
    while todo:
        q = todo.popleft()
        for r in adj.get(q, ()):
            if r not in seen:
                seen.add(r)
                todo.append(r)
    return seen


def coverable(v: Vass, targets: Iterable | None = None,
              budget: int = DEFAULT_BASIS_BUDGET) -> Reachable | Unreachable:
    """Exact backward coverability of any target state from the initial configuration.

    The upward closed set of configurations that can cover a target is kept as
    a minimal basis per state.  Parent pointers of basis elements give a
    forward witness run.
    """
    goal = set(v.finals if targets is None else targets) & set(v.states)
    if v.initial in goal:
        return Reachable(())
    live = control_reach(v, [v.initial], True) & control_reach(v, goal, False)
    if v.initial not in live:
        return Unreachable({})
    incoming: dict = {q: [] for q in live}
    for e in v.edges:
        if e.src in live and e.dst in live:
            incoming[e.dst].append(e)
    zero = v.zero
    basis: dict = {q: set() for q in live}
    parent: dict = {}
    queue: deque = deque()
    for t in sorted(goal & live, key=repr):
        basis[t].add(zero)
        parent[(t, zero)] = None
        queue.append((t, zero))
    added = len(queue)
    while queue:
        q, m = queue.popleft()
        if m not in basis[q]:
            continue
        for e in incoming[q]:
            n = tuple(max(mi - di, 0) for mi, di in zip(m, e.delta))
            p = e.src
            if any(_dominates(n, b) for b in basis[p]):
                continue
            basis[p] = {b for b in basis[p] if not _dominates(b, n)}
            basis[p].add(n)
            parent[(p, n)] = (e, (q, m))
            added += 1
            if added > budget:
                raise CapExceeded("coverability basis", budget, f"{added} elements")
            if p == v.initial and n == zero:
                return Reachable(_unwind(parent, (p, n)))
            queue.append((p, n))
    return Unreachable({q: frozenset(b) for q, b in basis.items()})


def _unwind(parent: dict, node) -> tuple:
    run = []
    link = parent[node]
    while link is not None:
        e, node = link
        run.append(e)
        link = parent[node]
    return tuple(run)


# ---------------------------------------------------------------- products and trackers

def product_nfa(v: Vass, a: Nfa, finals: Iterable | None = None) -> Vass:
    """Synchronous product on letters; ε-moves of either side interleave.

    Final states are pairs of a VASS final and an automaton state from
    ``finals`` (default: the automaton's finals).  Only states reachable in the
    control graph are built.
    """
    accept = frozenset(a.finals if finals is None else finals)
    start = (v.initial, a.initial)
    states = [start]
    seen = {start}
    edges = []
    todo = deque([start])
    while todo:
        p, s = todo.popleft()
        succ = []
        for e in v.out[p]:
            origin = e.root
            if e.label is None:
                succ.append(Edge((p, s), None, e.delta, (e.dst, s), origin))
            else:
                for label, s2 in a.out[s]:
                    if label == e.label:
                        succ.append(Edge((p, s), e.label, e.delta, (e.dst, s2), origin))
        for label, s2 in a.out[s]:
            if label is None:
                succ.append(Edge((p, s), None, v.zero, (p, s2), SYNTHETIC))
        for e in succ:
            edges.append(e)
            if e.dst not in seen:
                seen.add(e.dst)
                states.append(e.dst)
                todo.append(e.dst)
    fin = frozenset(q for q in states if q[0] in v.finals and q[1] in accept)
    return Vass(tuple(states), v.alphabet & a.alphabet | frozenset(
        e.label for e in edges if e.label is not None), v.counters, tuple(edges), start, fin)


@dataclass(frozen=True)
class TrackingAutomaton:
    """Finite tracker; ``exact`` finals are definitive, ``overflow`` finals passed a clamp."""

    nfa: Nfa
    exact: frozenset
    overflow: frozenset


def _letter_effect(sym: str, table: SymbolTable) -> int:
    return 0 if sym in MARKERS else table.effect(sym)


def offset_tracker(alphabet: Iterable[str], table: SymbolTable, bound: int) -> TrackingAutomaton:
    """Tracks the running offset in [-bound, bound]; leaving the interval goes to ``sink``."""
    letters = sorted(set(alphabet))
    states = [("off", k) for k in range(-bound, bound + 1)] + ["sink"]
    edges = []
    for k in range(-bound, bound + 1):
        for a in letters:
            n = k + _letter_effect(a, table)
            edges.append((("off", k), a, ("off", n) if -bound <= n <= bound else "sink"))
    edges.extend(("sink", a, "sink") for a in letters)
    exact = frozenset(("off", k) for k in range(-bound, bound + 1) if k != 0)
    nfa = Nfa(tuple(states), ("off", 0), exact | {"sink"}, tuple(edges))
    return TrackingAutomaton(nfa, exact, frozenset({"sink"}))


def marked_tracker(alphabet: Iterable[str], table: SymbolTable, bound: int) -> TrackingAutomaton:
    """Accepts u # v ~# w where v stays in [0, 2*bound] and ends at offset 0.

    Exceeding 2*bound inside v moves to ``ceil``, whose continuation is
    accepted only through the overflow final ``post!``.
    """
    letters = sorted(set(alphabet) - MARKERS)
    top = 2 * bound
    mids = [("mid", k) for k in range(top + 1)]
    states = ["pre", *mids, "ceil", "post", "post!"]
    edges = [("pre", a, "pre") for a in letters]
    edges.append(("pre", HASH, ("mid", 0)))
    for k in range(top + 1):
        for a in letters:
            n = k + table.effect(a)
            if n < 0:
                continue
            edges.append((("mid", k), a, ("mid", n) if n <= top else "ceil"))
    edges.append((("mid", 0), BARHASH, "post"))
    edges.extend(("ceil", a, "ceil") for a in letters)
    edges.append(("ceil", BARHASH, "post!"))
    edges.extend(("post", a, "post") for a in letters)
    edges.extend(("post!", a, "post!") for a in letters)
    nfa = Nfa(tuple(states), "pre", {"post", "post!"}, tuple(edges))
    return TrackingAutomaton(nfa, frozenset({"post"}), frozenset({"post!"}))


# ---------------------------------------------------------------- section checks

class Answer(str, Enum):
    YES = "YES"
    NO = "NO"
    FOUND = "FOUND"
    NOT_FOUND = "NOT_FOUND"
    INDETERMINATE = "INDETERMINATE"


@dataclass(frozen=True)
class CheckResult:
    answer: Answer
    run: tuple = ()
    cap: Optional[CapHit] = None

    @property
    def word(self) -> tuple:
        return labels(self.run)

    @property
    def trace(self) -> tuple:
        return original_trace(self.run)

    @property
    def source_run(self) -> tuple:
        return source_run(self.run)


def infer_table(v: Vass) -> SymbolTable:
    return SymbolTable(frozenset(base(a) for a in v.alphabet if a not in MARKERS))


def _tracked(v: Vass, tracker: TrackingAutomaton, budget: int):
    prod = product_nfa(v, tracker.nfa)
    exact = [q for q in prod.finals if q[1] in tracker.exact]
    hit = coverable(prod, exact, budget)
    if hit:
        return hit, None
    over = [q for q in prod.finals if q[1] in tracker.overflow]
    return None, coverable(prod, over, budget)


def uniform_offset_zero(v: Vass, bound: int = DEFAULT_TRACK_BOUND, table: SymbolTable | None = None,
                        budget: int = DEFAULT_BASIS_BUDGET) -> CheckResult:
    """Does every accepted word have offset 0?  Markers and handler letters count 0."""
    table = table or infer_table(v)
    try:
        hit, over = _tracked(v, offset_tracker(v.alphabet, table, bound), budget)
    except CapExceeded as err:
        return CheckResult(Answer.INDETERMINATE, cap=CapHit.of(err))
    if hit:
        return CheckResult(Answer.NO, hit.run)
    if over:
        return CheckResult(Answer.INDETERMINATE, over.run,
                           CapHit("offset tracker", bound, "an accepting run leaves the tracked interval"))
    return CheckResult(Answer.YES)


def marked_dyck_factor(v: Vass, bound: int = DEFAULT_TRACK_BOUND, table: SymbolTable | None = None,
                       budget: int = DEFAULT_BASIS_BUDGET) -> CheckResult:
    """Is some accepted word of the form u # v ~# w with v a Dyck word?"""
    table = table or infer_table(v)
    try:
        hit, over = _tracked(v, marked_tracker(v.alphabet, table, bound), budget)
    except CapExceeded as err:
        return CheckResult(Answer.INDETERMINATE, cap=CapHit.of(err))
    if hit:
        return CheckResult(Answer.FOUND, hit.run)
    if over:
        return CheckResult(Answer.INDETERMINATE, over.run,
                           CapHit("marked tracker", 2 * bound, "an accepting run hits the offset ceiling"))
    return CheckResult(Answer.NOT_FOUND)


def _canon(sym: str, table: SymbolTable) -> str:
    if sym in MARKERS or not table.is_dyck_symbol(sym):
        return sym
    return CANON_BAR if is_barred(sym) else CANON


def _relabelled(v: Vass, transitions, initial, finals,
                prefix: Optional[str] = None) -> Vass:
    """Phase-indexed copy of ``v``.

    ``transitions(e, phase)`` yields (labels, next phase) pairs; a label tuple of
    length two emits a marker and then the letter through an intermediate state.
    """
    states, edges = [], []
    seen = set()

    def add(q):
        if q not in seen:
            seen.add(q)
            states.append(q)

    start = ("init",) if prefix is not None else (v.initial, initial)
    add(start)
    if prefix is not None:
        add((v.initial, initial))
        edges.append(Edge(start, prefix, v.zero, (v.initial, initial), SYNTHETIC))
    todo = deque([(v.initial, initial)])
    while todo:
        q, ph = todo.popleft()
        for e in v.out[q]:
            for emitted, ph2 in transitions(e, ph):
                dst = (e.dst, ph2)
                if len(emitted) == 2:
                    mid = ("mid", len(edges), q, ph)
                    add(mid)
                    edges.append(Edge((q, ph), emitted[0], v.zero, mid, SYNTHETIC))
                    edges.append(Edge(mid, emitted[1], e.delta, dst, e.root))
                else:
                    edges.append(Edge((q, ph), emitted[0], e.delta, dst, e.root))
                if dst not in seen:
                    add(dst)
                    todo.append(dst)
    alphabet = frozenset(e.label for e in edges if e.label is not None) | {CANON, CANON_BAR}
    fin = frozenset(s for s in states if isinstance(s, tuple) and len(s) == 2
                    and s[0] in v.finals and s[1] == finals)
    return Vass(tuple(states), alphabet, v.counters, tuple(edges), start, fin)


def build_vass_variants(v: Vass, table: SymbolTable | None = None) -> tuple:
    """The relabelled system and the two marker-inserting variants."""
    table = table or infer_table(v)

    def lab(e):
        return (_canon(e.label, table),) if e.label is not None else (None,)

    def t_o(e, ph):
        yield lab(e), ph

    def t_d(e, ph):
        yield lab(e), ph
        if ph == 0 and e.label is not None and is_barred(e.label) and table.is_dyck_symbol(e.label):
            yield (BARHASH, CANON_BAR), 1

    def t_m(e, ph):
        if e.label is None or not table.is_dyck_symbol(e.label):
            yield lab(e), ph
            return
        yield lab(e), ph
        if ph == 0 and not is_barred(e.label):
            yield (HASH,), ("open", e.label)
        elif isinstance(ph, tuple) and is_barred(e.label) and base(e.label) != ph[1]:
            yield (BARHASH,), 2

    vo = _relabelled(v, t_o, 0, 0)
    vd = _relabelled(v, t_d, 0, 1, prefix=HASH)
    vm = _relabelled(v, t_m, 0, 2)
    return vo, vd, vm


def vass_in_dyck(v: Vass, table: SymbolTable | None = None, bound_offset: int = DEFAULT_TRACK_BOUND,
                 bound_marked: int = DEFAULT_TRACK_BOUND,
                 budget: int = DEFAULT_BASIS_BUDGET) -> Verdict:
    """Is every accepted word a Dyck word?"""
    table = table or infer_table(v)
    vo, vd, vm = build_vass_variants(v, table)
    return decide_variants(vo, vd, vm, bound_offset, bound_marked, budget, traced=True)


def decide_variants(vo: Vass, vd: Vass, vm: Vass, bound_offset: int, bound_marked: int,
                    budget: int, traced: bool) -> Verdict:
    """Uniform offset on ``vo``, then marked Dyck factors in ``vd`` (DV) and ``vm`` (MV)."""
    caps = []
    canon = SymbolTable(frozenset({CANON}))

    def witness(res: CheckResult):
        return Witness(res.trace if traced else res.word)

    res = uniform_offset_zero(vo, bound_offset, canon, budget)
    if res.answer is Answer.NO:
        return Verdict(Status.NOT_INCLUDED, Kind.OV, witness(res), detail="offset not uniformly 0")
    if res.cap:
        caps.append(res.cap)
    for variant, kind in ((vd, Kind.DV), (vm, Kind.MV)):
        res = marked_dyck_factor(variant, bound_marked, canon, budget)
        if res.answer is Answer.FOUND:
            return Verdict(Status.NOT_INCLUDED, kind, witness(res), caps,
                           detail=f"marked Dyck factor in the {kind.value} variant")
        if res.cap:
            caps.append(res.cap)
    if caps:
        return Verdict(Status.INDETERMINATE, cap_report=caps)
    return Verdict(Status.INCLUDED)
