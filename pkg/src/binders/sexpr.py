"""Minimal s-expression reader and printer.

Atoms are returned as strings; lists as Python lists. Every node remembers
where it started so callers can report line/column on semantic errors.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s()]+")


class SexprError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(message + where)


@dataclass(frozen=True)
class Pos:
    line: int
    col: int


class SList(list):
    """A parsed list that also carries its source position."""

    pos: Pos

    def __init__(self, items=(), pos: Pos = Pos(1, 1)):
        super().__init__(items)
        self.pos = pos


class Atom(str):
    pos: Pos

    def __new__(cls, text: str, pos: Pos = Pos(1, 1)):
        self = super().__new__(cls, text)
        self.pos = pos
        return self


def _tokens(text: str):
    line, col = 1, 1
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        tok = m.group(0)
        if not tok.isspace() and not tok.startswith(";"):
            yield tok, Pos(line, col)
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        i = m.end()


def parse_all(text: str) -> list:
    """Parse every top-level form in ``text``."""
    stack: list[SList] = [SList()]
    for tok, pos in _tokens(text):
        if tok == "(":
            stack.append(SList(pos=pos))
        elif tok == ")":
            if len(stack) == 1:
                raise SexprError("unexpected ')'", pos.line, pos.col)
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(Atom(tok, pos))
    if len(stack) > 1:
        p = stack[-1].pos
        raise SexprError("unclosed '('", p.line, p.col)
    return list(stack[0])


def parse_one(text: str):
    forms = parse_all(text)
    if len(forms) != 1:
        raise SexprError(f"expected exactly one form, found {len(forms)}")
    return forms[0]


def position(node) -> tuple[int | None, int | None]:
    pos = getattr(node, "pos", None)
    return (pos.line, pos.col) if pos else (None, None)


def fail(message: str, node) -> SexprError:
    return SexprError(message, *position(node))


def to_string(node) -> str:
    if isinstance(node, list):
        return "(" + " ".join(to_string(x) for x in node) + ")"
    return str(node)


def nat(node, what: str = "natural number") -> int:
    if isinstance(node, list) or not str(node).isdigit():
        raise fail(f"expected {what}, got {to_string(node)!r}", node)
    return int(node)
