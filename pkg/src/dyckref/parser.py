"""Reader and writer for the line-oriented program format.

    states: q0 q1 qf
    init: q0
    final: qf
    events: x y            // bars are written ~x ~y inside bodies
    handlers: a b
    start: a
    prod A -> x A ~x
    prod A ->
    rule q0 a A q1

Markers ``#`` and ``~#`` and star productions ``prod A -> [a b]*`` are only
accepted with ``internal=True`` (dumps of auxiliary programs).
"""
from __future__ import annotations

from pathlib import Path

from .errors import InputError
from .grammar import Production, grammar
from .program import AsyncProgram, Rule
from .words import MARKERS

HEADERS = ("states", "init", "final", "events", "handlers", "start")


def _tokens(line: str) -> list:
    """(column, token) pairs, 1-based columns, comments stripped."""
    body = line.split("//", 1)[0]
    out, i = [], 0
    while i < len(body):
        if body[i].isspace():
            i += 1
            continue
        j = i
        while j < len(body) and not body[j].isspace():
            j += 1
        out.append((i + 1, body[i:j]))
        i = j
    return out


def parse_program(text: str, internal: bool = False) -> AsyncProgram:
    headers: dict = {}
    prods: list = []   # (line, column, Production, [(col, token)])
    rules: list = []   # (line, [(col, token)])
    for n, line in enumerate(text.splitlines(), 1):
        toks = _tokens(line)
        if not toks:
            continue
        col, head = toks[0]
        key = head[:-1] if head.endswith(":") else None
        if key is not None:
            if key not in HEADERS:
                raise InputError(f"unknown header {head!r}", n, col)
            if key in headers:
                raise InputError(f"duplicate header {head!r}", n, col)
            values = toks[1:]
            if key in ("init", "final", "start") and len(values) != 1:
                raise InputError(f"{key}: expects exactly one name", n, col)
            headers[key] = (n, values)
        elif head == "prod":
            if len(toks) < 3 or toks[2][1] != "->":
                raise InputError("expected 'prod A -> symbols'", n, col)
            lhs = toks[1][1]
            rhs = toks[3:]
            star = None
            if rhs and rhs[0][1].startswith("["):
                if not internal:
                    raise InputError("star productions are reserved for internal dumps", n, rhs[0][0])
                text_rhs = " ".join(t for _, t in rhs)
                if not (text_rhs.startswith("[") and text_rhs.endswith("]*")):
                    raise InputError("malformed star production", n, rhs[0][0])
                star = frozenset(text_rhs[1:-2].split())
                prods.append((n, Production(lhs, (), star), [(rhs[0][0], s) for s in sorted(star)]))
            else:
                prods.append((n, Production(lhs, tuple(t for _, t in rhs)), rhs))
        elif head == "rule":
            if len(toks) != 5:
                raise InputError("expected 'rule q handler A q2'", n, col)
            rules.append((n, toks[1:]))
        else:
            raise InputError(f"unexpected token {head!r}", n, col)

    for key in HEADERS:
        if key not in headers:
            raise InputError(f"missing header '{key}:'", 1, 1)
    names = {k: [t for _, t in v] for k, (_, v) in headers.items()}
    states, events, handlers = names["states"], names["events"], names["handlers"]
    for key in ("events", "handlers", "states"):
        line, values = headers[key]
        for c, t in values:
            if t.startswith("~") or t in MARKERS:
                raise InputError(f"reserved name {t!r} in {key}:", line, c)
    line, values = headers["handlers"]
    for c, t in values:
        if t in events:
            raise InputError(f"{t!r} is both an event and a handler", line, c)
    for key in ("init", "final"):
        line, ((c, t),) = headers[key]
        if t not in states:
            raise InputError(f"undeclared state {t!r}", line, c)
    line, ((c, t),) = headers["start"]
    if t not in handlers:
        raise InputError(f"undeclared handler {t!r}", line, c)

    nonterminals = list(dict.fromkeys(p.lhs for _, p, _ in prods))
    nts = set(nonterminals)
    clash = nts & (set(events) | set(handlers))
    if clash:
        raise InputError(f"nonterminal names clash with letters: {sorted(clash)}")
    letters = set(events) | {"~" + e for e in events} | set(handlers)
    if internal:
        letters |= MARKERS
    for n, p, rhs in prods:
        for c, t in rhs:
            if t not in nts and t not in letters:
                what = "marker outside an internal dump" if t in MARKERS else "undeclared symbol"
                raise InputError(f"{what} {t!r}", n, c)

    parsed_rules = []
    for n, ((c1, q), (c2, a), (c3, nt), (c4, q2)) in rules:
        for c, s in ((c1, q), (c4, q2)):
            if s not in states:
                raise InputError(f"undeclared state {s!r}", n, c)
        if a not in handlers:
            raise InputError(f"undeclared handler {a!r}", n, c2)
        if nt not in nts:
            raise InputError(f"nonterminal {nt!r} has no productions", n, c3)
        parsed_rules.append(Rule(q, a, nt, q2))

    start_nt = nonterminals[0] if nonterminals else (parsed_rules[0].nonterminal if parsed_rules else "S")
    g = grammar(start_nt, [p for _, p, _ in prods], terminals=letters & {
        t for _, p, _ in prods for t in (p.star or p.rhs)}, nonterminals=nonterminals)
    return AsyncProgram(states=tuple(states), events=frozenset(events), handlers=frozenset(handlers),
                        grammar=g, rules=tuple(parsed_rules), initial=names["init"][0],
                        final=names["final"][0], start_handler=names["start"][0])


def load_program(path: str | Path, internal: bool = False) -> AsyncProgram:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as err:
        raise InputError(f"cannot read {path}: {err}") from err
    return parse_program(text, internal=internal)


def format_program(p: AsyncProgram) -> str:
    """Text that ``parse_program`` reads back, ε productions written ``prod A ->``."""
    return str(p) + "\n"
