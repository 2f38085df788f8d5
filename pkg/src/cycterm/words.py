"""Alphabets, words, rules and the string / prefix / suffix / cycle rewrite relations.

Words are tuples of symbol ids.  Ids are dense and follow first appearance, so the
canonical representative of a cycle (least rotation by id) depends only on the input.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

Word = tuple  # tuple[int, ...]

FRESH_PREFIX = "#"
_FORBIDDEN = set("(),\"")


class SrsError(ValueError):
    pass


def check_name(name: str, fresh: bool = False) -> None:
    if not isinstance(name, str) or not name:
        raise SrsError(f"empty symbol name {name!r}")
    if name in ("->", "->="):
        raise SrsError(f"reserved token used as symbol: {name!r}")
    if any(ch.isspace() or ch in _FORBIDDEN for ch in name):
        raise SrsError(f"illegal character in symbol {name!r}")
    if not fresh and FRESH_PREFIX in name:
        raise SrsError(f"symbol {name!r} uses the reserved prefix {FRESH_PREFIX!r}")


@dataclass(frozen=True)
class Alphabet:
    names: tuple = ()
    _index: dict = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        names = tuple(self.names)
        idx = {}
        for i, n in enumerate(names):
            if n in idx:
                raise SrsError(f"duplicate symbol {n!r}")
            idx[n] = i
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "_index", idx)

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self._index

    def id(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SrsError(f"unknown symbol {name!r}") from None

    def name(self, sid: int) -> str:
        return self.names[sid]

    def extend(self, names: Iterable[str], fresh: bool = False) -> "Alphabet":
        out = list(self.names)
        for n in names:
            check_name(n, fresh=fresh)
            if n not in self._index and n not in out:
                out.append(n)
        return Alphabet(tuple(out))

    def word(self, tokens) -> Word:
        """Word from a sequence of names; a plain string without spaces is split into characters."""
        if isinstance(tokens, str):
            tokens = tokens.split() if " " in tokens else list(tokens)
        return tuple(self.id(t) for t in tokens)

    def show(self, w: Sequence[int], sep: str = " ") -> str:
        if not w:
            return "ε"
        return sep.join(self.names[s] for s in w)


@dataclass(frozen=True)
class Rule:
    lhs: Word
    rhs: Word
    strict: bool = True

    def __post_init__(self):
        if len(self.lhs) == 0:
            raise SrsError("rule with empty left-hand side")
        object.__setattr__(self, "lhs", tuple(self.lhs))
        object.__setattr__(self, "rhs", tuple(self.rhs))


@dataclass(frozen=True)
class Srs:
    alphabet: Alphabet
    rules: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        n = len(self.alphabet)
        for r in self.rules:
            if any(not 0 <= s < n for s in r.lhs + r.rhs):
                raise SrsError("rule uses a symbol outside the alphabet")

    @property
    def strict_indices(self):
        return [i for i, r in enumerate(self.rules) if r.strict]

    @property
    def weak_indices(self):
        return [i for i, r in enumerate(self.rules) if not r.strict]

    @property
    def is_relative(self) -> bool:
        return any(not r.strict for r in self.rules)

    def without(self, indices) -> "Srs":
        drop = set(indices)
        return Srs(self.alphabet, [r for i, r in enumerate(self.rules) if i not in drop])

    def all_strict(self) -> "Srs":
        return Srs(self.alphabet, [Rule(r.lhs, r.rhs, True) for r in self.rules])

    def show_rule(self, i: int) -> str:
        r = self.rules[i]
        arrow = "->" if r.strict else "->="
        return f"{self.alphabet.show(r.lhs)} {arrow} {self.alphabet.show(r.rhs)}"

    def __str__(self):
        return ", ".join(self.show_rule(i) for i in range(len(self.rules)))


def make_srs(rules, names=None) -> Srs:
    """Build an Srs from (lhs, rhs) or (lhs, rhs, strict) triples of names.

    Symbol ids are given by first appearance unless ``names`` fixes the order.
    """
    order = list(names or [])
    parsed = []
    for item in rules:
        lhs, rhs = item[0], item[1]
        strict = item[2] if len(item) > 2 else True
        toks = []
        for side in (lhs, rhs):
            if isinstance(side, str):
                side = side.split() if " " in side else list(side)
            toks.append(list(side))
        for t in toks[0] + toks[1]:
            if t not in order:
                order.append(t)
        parsed.append((toks[0], toks[1], strict))
    for n in order:
        check_name(n)
    alpha = Alphabet(tuple(order))
    return Srs(alpha, [Rule(alpha.word(l), alpha.word(r), s) for l, r, s in parsed])


# cycles

def least_rotation(w: Sequence[int]) -> int:
    """Booth's algorithm: start index of the lexicographically least rotation."""
    n = len(w)
    if n == 0:
        return 0
    f = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        sj = w[j % n]
        i = f[j - k - 1]
        while i != -1 and sj != w[(k + i + 1) % n]:
            if sj < w[(k + i + 1) % n]:
                k = j - i - 1
            i = f[i]
        if sj != w[(k + i + 1) % n]:
            if sj < w[k % n]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k % n


def canonical_rotation(w: Sequence[int]) -> Word:
    w = tuple(w)
    k = least_rotation(w)
    return w[k:] + w[:k]


def rotate(w: Sequence[int], k: int) -> Word:
    w = tuple(w)
    if not w:
        return w
    k %= len(w)
    return w[k:] + w[:k]


def cycle_equal(u: Sequence[int], v: Sequence[int]) -> bool:
    if len(u) != len(v):
        return False
    return canonical_rotation(u) == canonical_rotation(v)


# rewrite relations

def _occurrences(w: Word, lhs: Word):
    m = len(lhs)
    for p in range(len(w) - m + 1):
        if w[p:p + m] == lhs:
            yield p


def string_successors(srs: Srs, w: Sequence[int]) -> set:
    w = tuple(w)
    out = set()
    for i, r in enumerate(srs.rules):
        m = len(r.lhs)
        for p in _occurrences(w, r.lhs):
            out.add((i, p, w[:p] + r.rhs + w[p + m:]))
    return out


def prefix_successors(srs: Srs, w: Sequence[int]) -> set:
    w = tuple(w)
    return {(i, 0, r.rhs + w[len(r.lhs):])
            for i, r in enumerate(srs.rules) if w[:len(r.lhs)] == r.lhs}


def suffix_successors(srs: Srs, w: Sequence[int]) -> set:
    w = tuple(w)
    out = set()
    for i, r in enumerate(srs.rules):
        m = len(r.lhs)
        if m <= len(w) and w[len(w) - m:] == r.lhs:
            out.add((i, len(w) - m, w[:len(w) - m] + r.rhs))
    return out


def cycle_redexes(srs: Srs, u: Sequence[int]):
    """Yield (ruleIndex, offset, result) with rotate(u, offset) = lhs·w and result = rhs·w."""
    u = tuple(u)
    n = len(u)
    if n == 0:
        return
    doubled = u + u
    for i, r in enumerate(srs.rules):
        m = len(r.lhs)
        if m > n:
            continue
        for k in range(n):
            if doubled[k:k + m] == r.lhs:
                yield i, k, r.rhs + doubled[k + m:k + n]


def cycle_successors(srs: Srs, c: Sequence[int]) -> set:
    return {(i, canonical_rotation(v)) for i, _, v in cycle_redexes(srs, c)}


def cycle_step(srs: Srs, u: Sequence[int], rule: int, offset: int) -> Word:
    """The result rhs·w of applying ``rule`` to the rotation of u starting at ``offset``."""
    u = tuple(u)
    lhs = srs.rules[rule].lhs
    if not u or len(lhs) > len(u):
        raise SrsError("rule not applicable to this cycle")
    rot = rotate(u, offset)
    if rot[:len(lhs)] != lhs:
        raise SrsError(f"no redex of rule {rule} at offset {offset}")
    return srs.rules[rule].rhs + rot[len(lhs):]


class TraceStep(NamedTuple):
    rule: int
    strict: bool
    target: Word


class CheckResult(NamedTuple):
    ok: bool
    bad_index: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def relative_characterization_check(srs: Srs, start: Sequence[int], steps: Sequence) -> CheckResult:
    """Check a labelled cycle trace against the shape (->R\\S)* ->S (->R\\S)*, repeated.

    Every step must be a valid cycle step, its label must agree with the rule's
    strictness, and a non-empty trace has to contain a strict step.
    """
    cur = canonical_rotation(start)
    seen_strict = False
    for idx, st in enumerate(steps):
        st = TraceStep(*st)
        if not 0 <= st.rule < len(srs.rules):
            return CheckResult(False, idx, "unknown rule")
        if srs.rules[st.rule].strict != st.strict:
            return CheckResult(False, idx, "label does not match rule strictness")
        tgt = canonical_rotation(st.target)
        if (st.rule, tgt) not in cycle_successors(srs, cur):
            return CheckResult(False, idx, "not a cycle rewrite step")
        seen_strict = seen_strict or st.strict
        cur = tgt
    if steps and not seen_strict:
        return CheckResult(False, len(steps) - 1, "no strict step")
    return CheckResult(True)
