"""Parikh-image reasoning about grammars: tame-pumping and pump queries.

The integer feasibility backend is a small exact branch-and-bound over an
exact rational simplex.  Connectivity of Parikh solutions is enforced lazily:
a solution whose used productions are not all reachable from the start symbol
is cut off by branching on "the stray part is unused" versus "some production
entering it is used".
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple, Optional

from .errors import CapExceeded
from .grammar import (Derivation, Grammar, HOLE, Production, Pump, enumerate_pumps,
                      pump_grammar, pump_table, tag, untag)
from .words import CANONICAL, Effect, SymbolTable, compose

DEFAULT_NODE_BUDGET = 10 ** 6

Row = tuple  # (coeffs: dict var-index -> int, op: '<=' | '>=' | '=', rhs: int)


@dataclass
class LinearSystem:
    """Nonnegative integer variables with linear constraints.

    ``cuts`` optionally maps an integral candidate solution to ``None`` (accept)
    or a list of alternative row lists, each of which excludes the candidate.
    """

    variables: list
    rows: list = field(default_factory=list)
    letter_forms: dict = field(default_factory=dict)
    cuts: Optional[Callable] = None
    infeasible: bool = False

    def index(self, name: str) -> int:
        return self.variables.index(name)

    def add(self, coeffs: dict, op: str, rhs: int) -> "LinearSystem":
        self.rows.append((dict(coeffs), op, rhs))
        return self

    def extended(self, extra: Iterable[Row]) -> "LinearSystem":
        return LinearSystem(list(self.variables), self.rows + list(extra), self.letter_forms,
                            self.cuts, self.infeasible)

    def form(self, weights: dict) -> dict:
        """Linear form of a weighted sum of letter counts."""
        out: dict = {}
        for letter, w in weights.items():
            for var, c in self.letter_forms.get(letter, {}).items():
                out[var] = out.get(var, 0) + w * c
        return {k: v for k, v in out.items() if v}

    def satisfied_by(self, values: list) -> bool:
        for coeffs, op, rhs in self.rows:
            lhs = sum(c * values[j] for j, c in coeffs.items())
            if op == "=" and lhs != rhs or op == "<=" and lhs > rhs or op == ">=" and lhs < rhs:
                return False
        return all(v >= 0 for v in values)


class Sat(NamedTuple):
    values: list


class Unsat(NamedTuple):
    pass


# exact simplex ---------------------------------------------------------------
#
# Integer tableau with a common denominator ``d`` (the real tableau is T / d).
# Pivots use exact division by the previous pivot, so entries stay integral
# (fraction-free elimination); both objective rows are carried as extra rows.

class _Tableau:
    def __init__(self, rows: list, basis: list):
        self.rows = rows
        self.basis = basis
        self.d = 1

    def sign(self) -> int:
        return 1 if self.d > 0 else -1

    def pivot(self, r: int, c: int, objectives: list) -> None:
        row = self.rows[r]
        p, d = row[c], self.d
        for other in [*(t for i, t in enumerate(self.rows) if i != r), *objectives]:
            f = other[c]
            if f:
                for k, v in enumerate(row):
                    other[k] = (p * other[k] - f * v) // d
            else:
                for k in range(len(other)):
                    if other[k]:
                        other[k] = (p * other[k]) // d
        self.d = p
        self.basis[r] = c

    def optimize(self, z: list, allowed: int, objectives: list) -> bool:
        """Bland's rule minimisation of ``z`` over the first ``allowed`` columns; False if unbounded."""
        sg = self.sign
        while True:
            enter = next((j for j in range(allowed) if z[j] * sg() < 0), None)
            if enter is None:
                return True
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a * sg() > 0:
                    if best is None:
                        best = i
                        continue
                    b = self.rows[best]
                    # compare row[-1] / a with b[-1] / b[enter]; both denominators share the sign of d
                    lhs, rhs = row[-1] * b[enter], b[-1] * a
                    if lhs < rhs or lhs == rhs and self.basis[i] < self.basis[best]:
                        best = i
            if best is None:
                return False
            self.pivot(best, enter, objectives)


def lp_minimize(n: int, rows: list, cost: list) -> Optional[list]:
    """Minimise ``cost . x`` over ``x >= 0`` subject to ``rows``; None if infeasible.

    Unbounded programs raise ValueError (callers use nonnegative costs).
    """
    norm = []
    for coeffs, op, rhs in rows:
        coeffs = {j: c for j, c in coeffs.items() if c}
        if rhs < 0:
            coeffs = {j: -c for j, c in coeffs.items()}
            rhs = -rhs
            op = {"<=": ">=", ">=": "<=", "=": "="}[op]
        if not coeffs:
            if (op == "=" and rhs != 0) or (op == ">=" and rhs > 0):
                return None
            continue
        norm.append((coeffs, op, rhs))
    n_slack = sum(1 for _, op, _ in norm if op != "=")
    n_art = sum(1 for _, op, _ in norm if op != "<=")
    width = n + n_slack + n_art
    t = []
    basis = []
    s = n
    a = n + n_slack
    arts = []
    for coeffs, op, rhs in norm:
        row = [0] * (width + 1)
        for j, c in coeffs.items():
            row[j] = c
        row[-1] = rhs
        if op == "<=":
            row[s] = 1
            basis.append(s)
            s += 1
        else:
            if op == ">=":
                row[s] = -1
                s += 1
            row[a] = 1
            basis.append(a)
            arts.append(a)
            a += 1
        t.append(row)
    tab = _Tableau(t, basis)
    z2 = [0] * (width + 1)
    for j, c in enumerate(cost):
        z2[j] = c
    for i, b in enumerate(basis):
        if z2[b]:
            f = z2[b]
            for k in range(width + 1):
                z2[k] -= f * t[i][k]
    if arts:
        z1 = [0] * (width + 1)
        for j in arts:
            z1[j] = 1
        for i, b in enumerate(basis):
            if b in arts:
                for k in range(width + 1):
                    z1[k] -= t[i][k]
        tab.optimize(z1, width, [z1, z2])
        if z1[-1] != 0:
            return None
        artset = set(arts)
        for i in range(len(t) - 1, -1, -1):
            if basis[i] in artset:
                col = next((j for j in range(n + n_slack) if t[i][j] != 0), None)
                if col is None:
                    del t[i]
                    del basis[i]
                else:
                    tab.pivot(i, col, [z1, z2])
        keep = n + n_slack
        for row in (*t, z2):
            row[keep:width] = []
        width = keep
    if not tab.optimize(z2, width, [z2]):
        raise ValueError("unbounded linear program")
    x = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = Fraction(t[i][-1], tab.d)
    return x


def ilp_feasible(sys: LinearSystem, node_budget: int = DEFAULT_NODE_BUDGET):
    """Exact integer feasibility by best-first branch and bound.

    The relaxation minimises the sum of all variables, so witnesses are small;
    nodes are expanded in order of their parent's relaxation value so a deep
    infeasible branch cannot hide a shallow solution.
    Raises :class:`CapExceeded` when more than ``node_budget`` nodes are explored.
    """
    if sys.infeasible or not _gcd_feasible(sys.rows):
        return Unsat()
    n = len(sys.variables)
    cost = [1] * n
    # a node is (bounds, extra rows); bounds maps a variable to its (low, high) branching bounds
    heap = [(Fraction(0), 0, {}, [])]
    counter = itertools.count(1)
    nodes = 0
    while heap:
        _, _, bounds, extra = heapq.heappop(heap)
        nodes += 1
        if nodes > node_budget:
            raise CapExceeded("ilp", node_budget, "branch-and-bound nodes")
        x = lp_minimize(n, sys.rows + extra + _bound_rows(bounds), cost)
        if x is None:
            continue
        value = sum(x)
        frac = next((j for j, v in enumerate(x) if v.denominator != 1), None)
        if frac is None:
            values = [int(v) for v in x]
            alternatives = sys.cuts(values) if sys.cuts else None
            if alternatives is None:
                return Sat(values)
            for alt in alternatives:
                heapq.heappush(heap, (value, next(counter), bounds, extra + list(alt)))
            continue
        f = math.floor(x[frac])
        lo, hi = bounds.get(frac, (0, None))
        heapq.heappush(heap, (value, next(counter), {**bounds, frac: (lo, f)}, extra))
        heapq.heappush(heap, (value, next(counter), {**bounds, frac: (f + 1, hi)}, extra))
    return Unsat()


def _gcd_feasible(rows) -> bool:
    """False if some equality has coefficients whose gcd does not divide its right-hand side."""
    for coeffs, op, rhs in rows:
        if op == "=":
            g = math.gcd(*coeffs.values()) if coeffs else 0
            if (g == 0 and rhs != 0) or (g and rhs % g):
                return False
    return True


def _bound_rows(bounds: dict) -> list:
    rows = []
    for j, (lo, hi) in sorted(bounds.items()):
        if lo:
            rows.append(({j: 1}, ">=", lo))
        if hi is not None:
            rows.append(({j: 1}, "<=", hi))
    return rows


# Parikh systems --------------------------------------------------------------

def parikh_system(g: Grammar) -> LinearSystem:
    """Production-count encoding of the Parikh image of L(g).

    Variables ``c[i]`` count uses of production ``i``; star productions get one
    extra variable per letter.  Kirchhoff equations balance every nonterminal and
    connectivity is enforced through lazy cuts.
    """
    prods = list(g.productions)
    names = [f"c[{i}]" for i in range(len(prods))]
    star_vars = []
    for i, p in enumerate(prods):
        if p.extended:
            for a in sorted(p.star):
                star_vars.append((len(names), i, a))
                names.append(f"s[{i},{a}]")
    sys = LinearSystem(names)
    if g.empty:
        sys.infeasible = True
        return sys
    for a in g.nonterminals:
        coeffs: dict = {}
        for i, p in enumerate(prods):
            if p.lhs == a:
                coeffs[i] = coeffs.get(i, 0) + 1
            occ = p.rhs.count(a)
            if occ:
                coeffs[i] = coeffs.get(i, 0) - occ
        sys.add(coeffs, "=", 1 if a == g.start else 0)
    forms: dict = {}
    for i, p in enumerate(prods):
        for s in p.rhs:
            if not g.is_nonterminal(s):
                forms.setdefault(s, {})
                forms[s][i] = forms[s].get(i, 0) + 1
    for j, i, a in star_vars:
        forms.setdefault(a, {})[j] = 1
    sys.letter_forms = forms
    sys.cuts = _connectivity_cuts(g, prods, star_vars)
    return sys


def _connectivity_cuts(g: Grammar, prods: list, star_vars: list):
    def cuts(values: list):
        for j, i, _ in star_vars:
            if values[j] > 0 and values[i] == 0:
                return [[({j: 1}, "<=", 0)], [({i: 1}, ">=", 1)]]
        used = [i for i, p in enumerate(prods) if values[i] > 0]
        reach = {g.start}
        changed = True
        while changed:
            changed = False
            for i in used:
                p = prods[i]
                if p.lhs in reach:
                    for s in p.rhs:
                        if g.is_nonterminal(s) and s not in reach:
                            reach.add(s)
                            changed = True
        stray = {prods[i].lhs for i in used if prods[i].lhs not in reach}
        if not stray:
            return None
        inside = {i: 1 for i, p in enumerate(prods) if p.lhs in stray}
        entering = {i: 1 for i, p in enumerate(prods)
                    if p.lhs not in stray and any(s in stray for s in p.rhs)}
        alts = [[(inside, "<=", 0)]]
        if entering:
            alts.append([(entering, ">=", 1)])
        return alts
    return cuts


def letter_counts(sys: LinearSystem, values: list) -> dict:
    return {a: sum(c * values[j] for j, c in form.items()) for a, form in sys.letter_forms.items()}


def reconstruct(g: Grammar, values: list, budget: int = 200_000) -> Optional[Derivation]:
    """A derivation tree using each production exactly as often as ``values`` says."""
    prods = list(g.productions)
    remaining = list(values[:len(prods)])
    steps = [0]

    def build(a: str):
        # yields derivation subtrees of a, consuming counts; restores on backtrack
        for i, p in enumerate(prods):
            if p.lhs != a or remaining[i] == 0:
                continue
            steps[0] += 1
            if steps[0] > budget:
                raise CapExceeded("reconstruct", budget)
            remaining[i] -= 1
            yield from _children(p, 0, ())
            remaining[i] += 1

    def _children(p: Production, k: int, acc: tuple):
        if k == len(p.rhs):
            yield Derivation(p, acc)
            return
        s = p.rhs[k]
        if not g.is_nonterminal(s):
            yield from _children(p, k + 1, acc + (None,))
            return
        for sub in build(s):
            yield from _children(p, k + 1, acc + (sub,))

    for tree in build(g.start):
        if not any(remaining):
            return tree
    return None


# tame pumping ----------------------------------------------------------------

class TameResult(NamedTuple):
    status: str                 # TAME | NOT_TAME | INDETERMINATE
    pump: Optional[Pump] = None
    detail: str = ""

    @property
    def tame(self) -> Optional[bool]:
        return {"TAME": True, "NOT_TAME": False}.get(self.status)


def _side_offset(sys: LinearSystem, table: SymbolTable, side: str) -> dict:
    weights = {}
    for x in table.dyck_letters:
        weights[tag(x, side)] = 1
        weights[tag("~" + x, side)] = -1
    return sys.form(weights)


def _add_forms(*forms: dict) -> dict:
    out: dict = {}
    for f in forms:
        for k, v in f.items():
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def _pump_from_tree(g: Grammar, a0: str, tree: Derivation) -> Pump:
    """Map a pump-grammar derivation back to a derivation of ``a0 =>+ u a0 v``."""

    def plain(t: Derivation) -> Derivation:
        p = t.production
        lhs, _ = untag(p.lhs)
        rhs = tuple(untag(s)[0] for s in p.rhs)
        star = frozenset(untag(s)[0] for s in p.star) if p.extended else None
        kids = tuple(None if c is None else plain(c) for c in t.children)
        return Derivation(Production(lhs, rhs, star), kids)

    def path(t: Derivation):
        p = t.production
        if not p.rhs and not p.extended and p.lhs == a0:
            return HOLE
        kids = []
        rhs = []
        for s, c in zip(p.rhs, t.children):
            name, side = untag(s) if "@" in s else (s, "")
            rhs.append(name)
            if c is None:
                kids.append(None)
            elif side:
                kids.append(plain(c))
            else:
                kids.append(path(c))
        return Derivation(Production(p.lhs, tuple(rhs)), tuple(kids))

    d = path(tree)
    left, right, _ = d.yield_parts()
    return Pump(a0, left, right, d)


def _solve_pump_query(g: Grammar, a0: str, extra_rows: Callable, node_budget: int):
    pg = pump_grammar(g, a0)
    sys = parikh_system(pg)
    rows = extra_rows(sys)
    res = ilp_feasible(sys.extended(rows), node_budget)
    if isinstance(res, Unsat):
        return None
    tree = reconstruct(pg, res.values)
    if tree is None:
        raise CapExceeded("reconstruct", 0, "no derivation matches the Parikh witness")
    return _pump_from_tree(g, a0, tree)


def check_tame_pumping(g: Grammar, table: SymbolTable = CANONICAL,
                       node_budget: int = DEFAULT_NODE_BUDGET) -> TameResult:
    """Decide whether every pump ``A =>+ uAv`` has offset(u) >= 0 and offset(u)+offset(v) = 0.

    One integer program per nonterminal and violated condition.  The programs
    are retried under a growing node budget so that an easy violation is found
    before a hard one is ground through.
    """
    if g.empty:
        return TameResult("TAME")

    def conditions(sys, which):
        left = _side_offset(sys, table, "L")
        right = _side_offset(sys, table, "R")
        total = _add_forms(left, right)
        if which == 0:
            return [(total, ">=", 1)]
        if which == 1:
            return [(total, "<=", -1)]
        return [(left, "<=", -1)]

    pending = [(a0, which) for a0 in g.nonterminals for which in range(3)]
    budget = min(64, node_budget)
    while pending:
        left_over = []
        for a0, which in pending:
            try:
                pump = _solve_pump_query(g, a0, lambda s: conditions(s, which), budget)
            except CapExceeded as exc:
                if budget >= node_budget:
                    return TameResult("INDETERMINATE", None, str(exc))
                left_over.append((a0, which))
                continue
            if pump is not None:
                return TameResult("NOT_TAME", pump, _describe(pump, table))
        pending = left_over
        budget = min(budget * 8, node_budget)
    return TameResult("TAME")


def _describe(p: Pump, table: SymbolTable) -> str:
    from .words import offset, show
    return (f"pump {p.nonterminal} =>+ [{show(p.left)}] {p.nonterminal} [{show(p.right)}] "
            f"with offsets {offset(p.left, table)} and {offset(p.right, table)}")


def pump_is_tame(p: Pump, table: SymbolTable = CANONICAL) -> bool:
    from .words import offset
    ou, ov = offset(p.left, table), offset(p.right, table)
    return ou >= 0 and ou + ov == 0


def pump_kind_exists(g: Grammar, a: str, kind: str, table: SymbolTable = CANONICAL,
                     node_budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """Whether ``a`` has a nonempty pump with offset(u) = 0 (ZERO) or > 0 (INCREASING)."""
    kind = kind.upper()

    def rows(sys):
        left = _side_offset(sys, table, "L")
        if kind == "ZERO":
            size = _add_forms(*sys.letter_forms.values())
            return [(left, "=", 0), (size, ">=", 1)]
        if kind == "INCREASING":
            return [(left, ">=", 1)]
        raise ValueError(f"unknown pump kind {kind}")
    return _solve_pump_query(g, a, rows, node_budget) is not None


# pump queries with dip caps --------------------------------------------------

@dataclass(frozen=True)
class PsiRelationQuery:
    nonterminal: str
    letter: Optional[str] = None
    side: str = "L"             # the letter must occur in u ("L") or in v ("R")
    dip_left: int = 0
    dip_right: int = 0
    require_increasing: bool = False

    def __post_init__(self):
        if self.dip_left < 0 or self.dip_right < 0:
            raise ValueError("dip caps must be nonnegative")
        if self.side not in ("L", "R"):
            raise ValueError("side is 'L' or 'R'")


class QueryAnswer(NamedTuple):
    found: bool
    exact: bool

    def __bool__(self) -> bool:
        return self.found


def _sccs(g: Grammar) -> dict:
    """Map each nonterminal to the frozenset of its strongly connected component."""
    succ = {a: set() for a in g.nonterminals}
    for p in g.productions:
        for s in p.rhs:
            if g.is_nonterminal(s):
                succ[p.lhs].add(s)
    index: dict = {}
    low: dict = {}
    on: set = set()
    stack: list = []
    comp: dict = {}
    counter = [0]

    def visit(v):
        work = [(v, iter(sorted(succ[v])))]
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on.add(v)
        while work:
            node, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on.add(w)
                    work.append((w, iter(sorted(succ[w]))))
                    advanced = True
                    break
                if w in on:
                    low[node] = min(low[node], index[w])
            if advanced:
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
                fs = frozenset(members)
                for w in members:
                    comp[w] = fs

    for v in g.nonterminals:
        if v not in index:
            visit(v)
    return comp


def word_abstractions(g: Grammar, table: SymbolTable, letter: Optional[str], clamp: int):
    """Per nonterminal: set of (dip, offset, has_letter, nonempty) over its words.

    Returns ``(sets, exact)``; tuples whose values leave [-clamp, clamp] are dropped.
    """
    sets = {a: set() for a in g.nonterminals}
    exact = True

    def leaf(s):
        e = table.effect(s)
        return {(1 if e < 0 else 0, e, s == letter, True)}

    def star(p):
        out = {(0, 0, False, False)}
        for s in p.star:
            e = table.effect(s)
            if e != 0:
                return None
            out.add((0, 0, s == letter, True))
        return out

    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.extended:
                new = star(p)
                if new is None:
                    raise ValueError("star production over Dyck letters")
            else:
                new = {(0, 0, False, False)}
                for s in p.rhs:
                    opts = sets[s] if g.is_nonterminal(s) else leaf(s)
                    nxt = set()
                    for d1, o1, h1, n1 in new:
                        for d2, o2, h2, n2 in opts:
                            d, o = compose(Effect(d1, o1), Effect(d2, o2))
                            if d > clamp or abs(o) > clamp:
                                exact = False
                                continue
                            nxt.add((d, o, h1 or h2, n1 or n2))
                    new = nxt
            fresh = new - sets[p.lhs]
            if fresh:
                sets[p.lhs] |= fresh
                changed = True
    return sets, exact


def pump_exists_with(g: Grammar, q: PsiRelationQuery, table: SymbolTable = CANONICAL,
                     clamp: Optional[int] = None) -> QueryAnswer:
    """Search pumps ``A =>+ uAv`` with dip(u) <= d_L, dip(v) <= d_R and the letter/increase constraints.

    Exact abstract fixpoint over (dip_u, off_u, dip_v, off_v, flags).  Contexts
    whose right part already dips below ``d_R`` are discarded (dips only grow when
    appending).  ``exact`` is False if any value had to be dropped at ``clamp``.
    """
    from .grammar import dip_bound
    a = q.nonterminal
    if a not in g.ntset:
        raise ValueError(f"undeclared nonterminal {a!r}")
    if clamp is None:
        clamp = dip_bound(g, 4096).value
    words, exact = word_abstractions(g, table, q.letter, clamp)
    comp = _sccs(g)[a]
    # context tuple: (du, ou, dv, ov, letter_in_u, letter_in_v, nonempty)
    ctx = {b: set() for b in comp}
    base = {(0, 0, 0, 0, False, False, False)}

    def leaf(s):
        e = table.effect(s)
        return {(1 if e < 0 else 0, e, s == q.letter, True)}

    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.lhs not in comp or p.extended:
                continue
            for i, s in enumerate(p.rhs):
                if s not in comp:
                    continue
                holes = ctx[s] | (base if s == a else set())
                if not holes:
                    continue
                left = {(0, 0, False, False)}
                for t in p.rhs[:i]:
                    opts = words[t] if g.is_nonterminal(t) else leaf(t)
                    left = {(*compose(Effect(d1, o1), Effect(d2, o2)), h1 or h2, n1 or n2)
                            for d1, o1, h1, n1 in left for d2, o2, h2, n2 in opts}
                right = {(0, 0, False, False)}
                for t in p.rhs[i + 1:]:
                    opts = words[t] if g.is_nonterminal(t) else leaf(t)
                    right = {(*compose(Effect(d1, o1), Effect(d2, o2)), h1 or h2, n1 or n2)
                             for d1, o1, h1, n1 in right for d2, o2, h2, n2 in opts}
                new = set()
                for du, ou, dv, ov, lu, lv, ne in holes:
                    for dl, ol, hl, nl in left:
                        nu = compose(Effect(dl, ol), Effect(du, ou))
                        for dr, orr, hr, nr in right:
                            nv = compose(Effect(dv, ov), Effect(dr, orr))
                            if nv.dip > q.dip_right:
                                continue
                            if max(nu.dip, nv.dip, abs(nu.offset), abs(nv.offset)) > clamp:
                                exact = False
                                continue
                            new.add((nu.dip, nu.offset, nv.dip, nv.offset,
                                     lu or hl, lv or hr, ne or nl or nr))
                fresh = new - ctx[p.lhs]
                if fresh:
                    ctx[p.lhs] |= fresh
                    changed = True
    for du, ou, dv, ov, lu, lv, ne in ctx[a]:
        if not ne or du > q.dip_left or dv > q.dip_right:
            continue
        if q.require_increasing and ou <= 0:
            continue
        if q.letter is not None and not (lu if q.side == "L" else lv):
            continue
        return QueryAnswer(True, True)
    return QueryAnswer(False, exact)


def brute_pump_exists_with(g: Grammar, q: PsiRelationQuery, max_size: int,
                           table: SymbolTable = CANONICAL) -> bool:
    """Reference answer from explicit pump enumeration (bounded by ``max_size``)."""
    from .words import dip, offset
    for p in enumerate_pumps(g, q.nonterminal, max_size):
        if dip(p.left, table) > q.dip_left or dip(p.right, table) > q.dip_right:
            continue
        if q.require_increasing and offset(p.left, table) <= 0:
            continue
        if q.letter is not None and q.letter not in (p.left if q.side == "L" else p.right):
            continue
        return True
    return False
