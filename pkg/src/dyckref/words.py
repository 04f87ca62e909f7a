"""Word algebra over handler names, Dyck letters, their bars and the two markers.

Symbols are plain strings.  A bar is written with a ``~`` prefix, so ``~x`` is
the closing partner of ``x``.  The markers are ``#`` and ``~#``.  Words are
tuples of symbols.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

HASH = "#"
BARHASH = "~#"
MARKERS = frozenset({HASH, BARHASH})
CANON = "x"
CANON_BAR = "~x"

Word = tuple


class WordError(ValueError):
    """Raised for words outside the domain of an operation."""


def bar(letter: str) -> str:
    return "~" + letter


def is_barred(sym: str) -> bool:
    return sym.startswith("~") and sym != BARHASH


def base(sym: str) -> str:
    return sym[1:] if is_barred(sym) else sym


def word(text: str | Iterable[str]) -> Word:
    """Build a word from a whitespace separated string or an iterable of symbols."""
    if isinstance(text, str):
        return tuple(text.split())
    return tuple(text)


def show(w: Sequence[str]) -> str:
    return " ".join(w) if w else "ε"


@dataclass(frozen=True)
class SymbolTable:
    """Declared Dyck letters and handler names.

    ``handler_names=None`` leaves the handler set open: every symbol that is not
    a Dyck letter, a bar or a marker counts as a handler.
    """

    dyck_letters: frozenset
    handler_names: frozenset | None = None

    def __post_init__(self):
        object.__setattr__(self, "dyck_letters", frozenset(self.dyck_letters))
        if self.handler_names is not None:
            object.__setattr__(self, "handler_names", frozenset(self.handler_names))
            clash = self.dyck_letters & self.handler_names
            if clash:
                raise WordError(f"symbols declared both as letter and handler: {sorted(clash)}")
        for name in self.dyck_letters | (self.handler_names or frozenset()):
            if name.startswith("~") or name in MARKERS or not name:
                raise WordError(f"illegal symbol name {name!r}")

    @property
    def bars(self) -> frozenset:
        return frozenset(bar(x) for x in self.dyck_letters)

    def effect(self, sym: str) -> int:
        if sym in self.dyck_letters:
            return 1
        if is_barred(sym):
            if base(sym) not in self.dyck_letters:
                raise WordError(f"bar of undeclared letter: {sym}")
            return -1
        return 0

    def is_dyck_symbol(self, sym: str) -> bool:
        return sym in self.dyck_letters or (is_barred(sym) and base(sym) in self.dyck_letters)

    def is_handler(self, sym: str) -> bool:
        if sym in MARKERS or self.is_dyck_symbol(sym):
            return False
        if self.handler_names is None:
            return not is_barred(sym)
        return sym in self.handler_names

    def check(self, w: Sequence[str]) -> None:
        for s in w:
            if not (s in MARKERS or self.is_dyck_symbol(s) or self.is_handler(s)):
                raise WordError(f"undeclared symbol {s!r}")


CANONICAL = SymbolTable(frozenset({CANON}))


class Effect(NamedTuple):
    dip: int
    offset: int


def offset(w: Sequence[str], table: SymbolTable = CANONICAL) -> int:
    return sum(table.effect(s) for s in w)


def dip(w: Sequence[str], table: SymbolTable = CANONICAL) -> int:
    level = low = 0
    for s in w:
        level += table.effect(s)
        if level < low:
            low = level
    return -low


def effect(w: Sequence[str], table: SymbolTable = CANONICAL) -> Effect:
    level = low = 0
    for s in w:
        level += table.effect(s)
        if level < low:
            low = level
    return Effect(-low, level)


def compose(first: Effect, second: Effect) -> Effect:
    """Effect of a concatenation from the effects of its parts."""
    return Effect(max(first.dip, second.dip - first.offset), first.offset + second.offset)


def _dyck_only(w: Sequence[str], table: SymbolTable) -> None:
    for s in w:
        if not table.is_dyck_symbol(s):
            raise WordError(f"expected only Dyck letters, found {s!r}")


def is_dyck(w: Sequence[str], table: SymbolTable = CANONICAL) -> bool:
    _dyck_only(w, table)
    stack = []
    for s in w:
        if is_barred(s):
            if not stack or stack.pop() != base(s):
                return False
        else:
            stack.append(s)
    return not stack


class Violation(str, Enum):
    NONE = "NONE"
    OV = "OV"
    DV = "DV"
    MV = "MV"


def classify_violation(w: Sequence[str], table: SymbolTable = CANONICAL) -> Violation:
    """Report the violation of ``w``, preferring dip over offset over mismatch."""
    _dyck_only(w, table)
    e = effect(w, table)
    if e.dip > 0:
        return Violation.DV
    if e.offset != 0:
        return Violation.OV
    return Violation.NONE if is_dyck(w, table) else Violation.MV


def project(w: Sequence[str], keep) -> Word:
    return tuple(s for s in w if s in keep)


def project_dyck(w: Sequence[str], table: SymbolTable = CANONICAL) -> Word:
    return tuple(s for s in w if table.is_dyck_symbol(s))


def project_handlers(w: Sequence[str], table: SymbolTable = CANONICAL) -> Word:
    return tuple(s for s in w if table.is_handler(s))


def rho(w: Sequence[str], table: SymbolTable) -> Word:
    """Collapse every Dyck letter onto the canonical pair ``x``/``~x``."""
    out = []
    for s in w:
        if s in MARKERS:
            out.append(s)
        elif table.is_dyck_symbol(s):
            out.append(CANON_BAR if is_barred(s) else CANON)
        else:
            out.append(s)
    return tuple(out)


def subword_leq(u: Sequence[str], v: Sequence[str]) -> bool:
    it = iter(v)
    return all(any(s == t for t in it) for s in u)


def _canonical_only(w: Sequence[str]) -> None:
    for s in w:
        if s in MARKERS:
            raise WordError("markers are not allowed here")
        if is_barred(s) and s != CANON_BAR:
            raise WordError(f"word is not canonicalized: {s!r}")


def syn_leq(u: Sequence[str], v: Sequence[str]) -> bool:
    for s in (*u, *v):
        if s not in (CANON, CANON_BAR):
            raise WordError(f"syntactic order takes only x and ~x, found {s!r}")
    eu, ev = effect(u), effect(v)
    return eu.offset == ev.offset and eu.dip >= ev.dip


def composite_leq_prime(z1: Sequence[str], z2: Sequence[str]) -> bool:
    _canonical_only(z1)
    _canonical_only(z2)
    dyck = (CANON, CANON_BAR)
    if not syn_leq(project(z1, dyck), project(z2, dyck)):
        return False
    return subword_leq([s for s in z1 if s not in dyck], [s for s in z2 if s not in dyck])


class Shape(str, Enum):
    NONE = "NONE"
    HASH = "HASH"
    BARHASH = "BARHASH"
    BOTH = "BOTH"


def marker_shape(z: Sequence[str]) -> Shape:
    return split_marked(z)[2]


def split_marked(z: Sequence[str]) -> tuple[Word, Word, Shape]:
    z = tuple(z)
    hashes = [i for i, s in enumerate(z) if s == HASH]
    bars = [i for i, s in enumerate(z) if s == BARHASH]
    if len(hashes) > 1 or len(bars) > 1:
        raise WordError(f"repeated marker in {show(z)}")
    if hashes and bars:
        i, j = hashes[0], bars[0]
        if j < i:
            raise WordError(f"~# before # in {show(z)}")
        return z[i + 1:j], z[:i] + z[j + 1:], Shape.BOTH
    if hashes:
        i = hashes[0]
        return z[i + 1:], z[:i], Shape.HASH
    if bars:
        j = bars[0]
        return z[:j], z[j + 1:], Shape.BARHASH
    return z, (), Shape.NONE


def is_marked(z: Sequence[str]) -> bool:
    try:
        split_marked(z)
    except WordError:
        return False
    return True


def is_admissible(z: Sequence[str]) -> bool:
    inside, _, shape = split_marked(z)
    if shape is Shape.NONE:
        return True
    e = effect(project(inside, (CANON, CANON_BAR)))
    if shape is Shape.HASH:
        return e.dip == 0
    if shape is Shape.BARHASH:
        return e.dip == -e.offset
    return e == (0, 0)


def composite_leq(z1: Sequence[str], z2: Sequence[str]) -> bool:
    for z in (z1, z2):
        if not is_admissible(z):
            raise WordError(f"inadmissible marked word {show(z)}")
    in1, out1, shape1 = split_marked(z1)
    in2, out2, shape2 = split_marked(z2)
    return (shape1 is shape2 and composite_leq_prime(in1, in2)
            and composite_leq_prime(out1, out2))
