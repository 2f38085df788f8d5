"""TPDB string-rewriting format.

Grammar accepted (whitespace-insensitive):
    file    := section*
    section := "(" NAME body ")"
    RULES   body := rule ("," rule)*      rule := sym+ ("->" | "->=") sym*
    VAR     body must be empty
    COMMENT body is free text with balanced parentheses
Other sections are skipped with a warning.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .words import Alphabet, Rule, Srs, SrsError, check_name

log = logging.getLogger(__name__)


class TpdbError(ValueError):
    def __init__(self, msg, line, col):
        super().__init__(f"{line}:{col}: {msg}")
        self.line, self.col = line, col


@dataclass
class ProblemFile:
    srs: Srs
    path: Optional[str] = None
    comments: list = field(default_factory=list)

    @property
    def relative(self) -> bool:
        return self.srs.is_relative

    def expected(self) -> Optional[str]:
        for c in self.comments:
            m = re.search(r"expected\s*:\s*(YES|NO|MAYBE)", c, re.I)
            if m:
                return m.group(1).upper()
        return None


_TOK = re.compile(r"\s+|\(|\)|,|[^\s(),\"]+|\"")


def _tokens(text):
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOK.match(text, pos)
        tok = m.group(0)
        if tok == '"':
            raise TpdbError("unexpected quote", line, col)
        if not tok.isspace():
            yield tok, line, col, pos
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    yield None, line, col, pos


def parse_tpdb(text: str, path: Optional[str] = None, allow_fresh: bool = False) -> ProblemFile:
    """Symbols with the reserved '#' prefix are only accepted with allow_fresh (transformed systems)."""
    toks = list(_tokens(text))
    i = 0
    rules_raw = None
    comments = []

    def expect(t):
        nonlocal i
        tok, ln, cl, _ = toks[i]
        if tok != t:
            raise TpdbError(f"expected {t!r}, found {tok if tok is not None else 'end of input'!r}", ln, cl)
        i += 1

    while toks[i][0] is not None:
        expect("(")
        name, ln, cl, _ = toks[i]
        if name is None or name in "(),":
            raise TpdbError("expected a section name", ln, cl)
        i += 1
        if name == "RULES":
            if rules_raw is not None:
                raise TpdbError("second RULES section", ln, cl)
            rules_raw, i = _rules(toks, i, allow_fresh)
            expect(")")
        elif name == "VAR":
            tok, l2, c2, _ = toks[i]
            if tok != ")":
                raise TpdbError("string rewriting problems take no variables", l2, c2)
            i += 1
        else:
            start = toks[i][3]
            depth = 1
            while depth:
                tok, l2, c2, p2 = toks[i]
                if tok is None:
                    raise TpdbError(f"unterminated {name} section", ln, cl)
                depth += tok == "("
                depth -= tok == ")"
                i += 1
            if name == "COMMENT":
                comments.append(text[start:p2].strip())
            else:
                log.warning("skipping unknown section %s at %d:%d", name, ln, cl)
    if rules_raw is None:
        raise TpdbError("no RULES section", toks[i][1], toks[i][2])
    order = []
    for lhs, rhs, _, _ in rules_raw:
        for s in lhs + rhs:
            if s not in order:
                order.append(s)
    alpha = Alphabet(tuple(order))
    rules = [Rule(alpha.word(l), alpha.word(r), st) for l, r, st, _ in rules_raw]
    return ProblemFile(Srs(alpha, rules), path, comments)


def _rules(toks, i, allow_fresh):
    out = []
    if toks[i][0] == ")":
        return out, i
    while True:
        lhs, rhs, arrow = [], [], None
        ln, cl = toks[i][1], toks[i][2]
        while True:
            tok, l2, c2, _ = toks[i]
            if tok is None:
                raise TpdbError("unterminated RULES section", l2, c2)
            if tok in (",", ")"):
                break
            if tok == "(":
                raise TpdbError("unexpected '(' in a rule", l2, c2)
            if tok in ("->", "->="):
                if arrow is not None:
                    raise TpdbError("second arrow in a rule", l2, c2)
                arrow = tok
            else:
                try:
                    check_name(tok, fresh=allow_fresh)
                except SrsError as exc:
                    raise TpdbError(str(exc), l2, c2) from None
                (rhs if arrow else lhs).append(tok)
            i += 1
        if arrow is None:
            raise TpdbError("rule without arrow", ln, cl)
        if not lhs:
            raise TpdbError("empty left-hand side", ln, cl)
        out.append((lhs, rhs, arrow == "->", (ln, cl)))
        if toks[i][0] == ")":
            return out, i
        i += 1


def read_tpdb(path, allow_fresh: bool = False) -> ProblemFile:
    p = Path(path)
    return parse_tpdb(p.read_text(), str(p), allow_fresh)


def print_tpdb(srs: Srs, comment: Optional[str] = None) -> str:
    lines = []
    if comment:
        lines.append(f"(COMMENT {comment})")
    body = []
    for r in srs.rules:
        arrow = "->" if r.strict else "->="
        rhs = " ".join(srs.alphabet.name(s) for s in r.rhs)
        lhs = " ".join(srs.alphabet.name(s) for s in r.lhs)
        body.append(f"  {lhs} {arrow}{' ' + rhs if rhs else ''}")
    lines.append("(RULES\n" + ",\n".join(body) + "\n)")
    return "\n".join(lines) + "\n"


def rules_by_name(srs: Srs):
    """Name-level view of the rules, used for AST comparison."""
    n = srs.alphabet.name
    return [(tuple(map(n, r.lhs)), tuple(map(n, r.rhs)), r.strict) for r in srs.rules]
