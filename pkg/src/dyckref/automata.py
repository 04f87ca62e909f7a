"""Explicit finite automata with ε-edges (label ``None``)."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Hashable, Iterable, Optional

from .errors import CapExceeded


@dataclass(frozen=True)
class Nfa:
    states: tuple
    initial: Hashable
    finals: frozenset
    edges: tuple  # (src, label | None, dst)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(dict.fromkeys(self.states)))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "edges", tuple(dict.fromkeys(self.edges)))
        known = set(self.states)
        if self.initial not in known or not self.finals <= known:
            raise ValueError("initial/final states must be declared")
        for src, _, dst in self.edges:
            if src not in known or dst not in known:
                raise ValueError(f"edge between undeclared states: {src!r} -> {dst!r}")

    @cached_property
    def out(self) -> dict:
        table = {q: [] for q in self.states}
        for src, label, dst in self.edges:
            table[src].append((label, dst))
        return table

    @property
    def alphabet(self) -> frozenset:
        return frozenset(label for _, label, _ in self.edges if label is not None)

    def closure(self, states: Iterable) -> frozenset:
        seen = set(states)
        todo = list(seen)
        while todo:
            q = todo.pop()
            for label, dst in self.out[q]:
                if label is None and dst not in seen:
                    seen.add(dst)
                    todo.append(dst)
        return frozenset(seen)

    def step(self, states: frozenset, letter: str) -> frozenset:
        return self.closure(dst for q in states for label, dst in self.out[q] if label == letter)

    def accepts(self, w: Iterable[str]) -> bool:
        current = self.closure([self.initial])
        for letter in w:
            current = self.step(current, letter)
            if not current:
                return False
        return bool(current & self.finals)

    def words(self, max_len: int, cap: int = 200_000) -> set:
        """All accepted words of length at most ``max_len`` (subset construction)."""
        out = set()
        start = self.closure([self.initial])
        layer = {start: {()}}
        for length in range(max_len + 1):
            nxt: dict = {}
            for states, ws in layer.items():
                if states & self.finals:
                    out.update(ws)
                    if len(out) > cap:
                        raise CapExceeded("nfa words", cap, f"length {length}")
                if length == max_len:
                    continue
                letters = {label for q in states for label, _ in self.out[q] if label is not None}
                for letter in letters:
                    succ = self.step(states, letter)
                    if succ:
                        bucket = nxt.setdefault(succ, set())
                        bucket.update(w + (letter,) for w in ws)
            layer = nxt
        return out

    def trim(self) -> "Nfa":
        fwd = _reach([self.initial], self.edges, forward=True)
        bwd = _reach(self.finals, self.edges, forward=False)
        keep = fwd & bwd
        if self.initial not in keep:
            return Nfa((self.initial,), self.initial, (), ())
        return Nfa(tuple(q for q in self.states if q in keep), self.initial, self.finals & keep,
                   tuple(e for e in self.edges if e[0] in keep and e[2] in keep))

    def relabel(self, fn: Callable[[str], Optional[str]]) -> "Nfa":
        return Nfa(self.states, self.initial, self.finals,
                   tuple((s, None if a is None else fn(a), d) for s, a, d in self.edges))

    def is_empty(self) -> bool:
        return not self.trim().finals

    def __str__(self) -> str:
        lines = [f"initial {self.initial}", f"finals {' '.join(map(str, sorted(self.finals, key=str)))}"]
        for src, label, dst in self.edges:
            lines.append(f"{src} -{label if label is not None else 'ε'}-> {dst}")
        return "\n".join(lines)


def _reach(seeds: Iterable, edges: Iterable, forward: bool) -> set:
    adj: dict = {}
    for src, _, dst in edges:
        a, b = (src, dst) if forward else (dst, src)
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


class NfaBuilder:
    """Incremental construction with integer states and a state budget."""

    def __init__(self, budget: int = 100_000):
        self.budget = budget
        self.count = 0
        self.edges: list = []

    def state(self) -> int:
        self.count += 1
        if self.count > self.budget:
            raise CapExceeded("nfa states", self.budget)
        return self.count - 1

    def edge(self, src: int, label: Optional[str], dst: int) -> None:
        self.edges.append((src, label, dst))

    def word(self, src: int, w: Iterable[str]) -> int:
        """Chain of edges spelling ``w`` from ``src``; returns the end state."""
        cur = src
        for letter in w:
            nxt = self.state()
            self.edge(cur, letter, nxt)
            cur = nxt
        return cur

    def star(self, src: int, letters: Iterable[str]) -> int:
        for letter in sorted(set(letters)):
            self.edge(src, letter, src)
        return src

    def embed(self, nfa: Nfa, src: int) -> int:
        """Copy ``nfa`` between ``src`` and a fresh exit state."""
        ids = {q: self.state() for q in nfa.states}
        self.edge(src, None, ids[nfa.initial])
        exit_state = self.state()
        for s, a, d in nfa.edges:
            self.edge(ids[s], a, ids[d])
        for f in nfa.finals:
            self.edge(ids[f], None, exit_state)
        return exit_state

    def build(self, initial: int, finals: Iterable[int]) -> Nfa:
        return Nfa(tuple(range(self.count)), initial, frozenset(finals), tuple(self.edges))


def single_word_nfa(w: Iterable[str]) -> Nfa:
    b = NfaBuilder()
    start = b.state()
    return b.build(start, [b.word(start, w)])
