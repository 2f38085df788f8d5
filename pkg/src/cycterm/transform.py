"""The three cycle-to-string transformations split, shift and rotate.

Each transformation returns a TransformOutput carrying the string rewrite system,
its typing table, the fresh symbols it introduced and a family key for every rule
(e.g. ("splitF", i, j) or ("rotC", a)).  Rule numbers i in split keys are 1-based,
as in the marker names R_{i,j}; everything else uses 0-based rule indices.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

from .typed import TypedSignature
from .words import Alphabet, Rule, Srs, SrsError, Word, canonical_rotation, rotate


class TransformKind(str, Enum):
    SPLIT = "split"
    SHIFT = "shift"
    ROTATE = "rotate"


class ShapeError(ValueError):
    pass


SPLIT_MARKERS = ("B", "E", "W", "L")
SHIFT_MARKERS = ("B", "E", "W", "V", "M", "L", "R", "D")
ROTATE_MARKERS = ("B", "E", "W", "R", "G", "O", "C", "L", "S", "F", "f")


def marker_name(tag: str) -> str:
    return "#" + tag


def copy_name(kind: TransformKind, sym: str, copy: str) -> str:
    if kind is TransformKind.SPLIT:
        return f"#{sym}~bar"
    return f"#{sym}@{copy}"


@dataclass(frozen=True)
class TransformOutput:
    kind: TransformKind
    source: Srs
    srs: Srs
    typing: TypedSignature
    markers: dict            # marker tag -> symbol id ("B", "R_1_2", ...)
    copies: dict             # copy tag -> tuple, source symbol id -> copy symbol id
    families: tuple          # family key of every rule of srs
    _by_key: dict = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_key", {k: i for i, k in enumerate(self.families)})

    def rule_index(self, key) -> int:
        return self._by_key[tuple(key)]

    def family(self, i: int) -> str:
        return self.families[i][0]

    def m(self, tag: str) -> int:
        return self.markers[tag]

    def copy(self, tag: str, w) -> Word:
        table = self.copies[tag]
        return tuple(table[a] for a in w)

    def uncopy(self, w) -> Word:
        """Translate copy symbols (of any copy) back to the source alphabet."""
        back = {}
        for table in self.copies.values():
            for a, c in enumerate(table):
                back[c] = a
        n = len(self.source.alphabet)
        return tuple(s if s < n else back[s] for s in w)


class _Builder:
    def __init__(self, kind, src: Srs, copy_tags, markers):
        self.kind = kind
        self.src = src
        names = list(src.alphabet.names)
        n = len(names)
        self.copies = {}
        for tag in copy_tags:
            self.copies[tag] = tuple(range(len(names), len(names) + n))
            names.extend(copy_name(kind, s, tag) for s in src.alphabet.names)
        self.markers = {}
        for tag in markers:
            self.markers[tag] = len(names)
            names.append(marker_name(tag))
        self.alphabet = Alphabet(tuple(names))
        self.rules = []
        self.families = []

    def c(self, tag, a):
        return self.copies[tag][a]

    def add(self, key, lhs, rhs, strict=True):
        self.rules.append(Rule(tuple(lhs), tuple(rhs), strict))
        self.families.append(tuple(key))

    def done(self, types):
        srs = Srs(self.alphabet, self.rules)
        return TransformOutput(self.kind, self.src, srs, TypedSignature(types),
                               self.markers, self.copies, tuple(self.families))


def _split(src: Srs, relative: bool) -> TransformOutput:
    markers = list(SPLIT_MARKERS)
    for i, r in enumerate(src.rules, 1):
        markers += [f"R_{i}_{j}" for j in range(1, len(r.lhs))]
    b = _Builder(TransformKind.SPLIT, src, ["bar"], markers)
    sigma = range(len(src.alphabet))
    B, E, W, L = (b.markers[t] for t in SPLIT_MARKERS)
    strict_of = {i: (r.strict or not relative) for i, r in enumerate(src.rules, 1)}
    for i, r in enumerate(src.rules, 1):
        b.add(("splitA", i), r.lhs, r.rhs, strict_of[i])
    for a in sigma:
        b.add(("splitB", a), (b.c("bar", a), L), (L, a), not relative)
    b.add(("splitC",), (W, L), (B,), not relative)
    for i, r in enumerate(src.rules, 1):
        for j in range(1, len(r.lhs)):
            Rij = b.markers[f"R_{i}_{j}"]
            for a in sigma:
                b.add(("splitD", i, j, a), (Rij, a), (b.c("bar", a), Rij), not relative)
    for i, r in enumerate(src.rules, 1):
        for j in range(1, len(r.lhs)):
            b.add(("splitE", i, j), (B,) + r.lhs[j:], (W, b.markers[f"R_{i}_{j}"]), not relative)
    for i, r in enumerate(src.rules, 1):
        for j in range(1, len(r.lhs)):
            Rij = b.markers[f"R_{i}_{j}"]
            b.add(("splitF", i, j), (Rij,) + r.lhs[:j] + (E,), (L,) + r.rhs + (E,), strict_of[i])
    types = {a: ("A", "A") for a in sigma}
    types.update({b.c("bar", a): ("Abar", "Abar") for a in sigma})
    types.update({L: ("A", "Abar"), B: ("A", "T"), W: ("Abar", "T"), E: ("K", "A")})
    for tag, sid in b.markers.items():
        if tag.startswith("R_"):
            types[sid] = ("A", "Abar")
    return b.done(types)


def shift_N(src: Srs) -> int:
    longest = max((len(r.lhs) for r in src.rules), default=0)
    return max(0, longest - 1)


def _shift(src: Srs, relative: bool) -> TransformOutput:
    b = _Builder(TransformKind.SHIFT, src, ["B", "C"], SHIFT_MARKERS)
    sigma = range(len(src.alphabet))
    B, E, W, V, M, L, R, D = (b.markers[t] for t in SHIFT_MARKERS)
    side = not relative
    N = shift_N(src)
    b.add(("shiftA",), (B,), (W,) + (M,) * N + (V,), side)
    b.add(("shiftB",), (M,), (), side)
    for a in sigma:
        b.add(("shiftC", a), (M, V, a), (V, b.c("B", a)), side)
    for x in sigma:
        for a in sigma:
            b.add(("shiftD", x, a), (b.c("B", x), a), (a, b.c("B", x)), side)
    for x in sigma:
        b.add(("shiftE", x), (b.c("B", x), E), (x, E), side)
    b.add(("shiftF",), (W, V), (R, L), side)
    for a in sigma:
        b.add(("shiftG", a), (L, a), (b.c("C", a), L), side)
    for i, r in enumerate(src.rules):
        b.add(("shiftH", i), (L,) + r.lhs, (D,) + r.rhs, r.strict or not relative)
    for x in sigma:
        b.add(("shiftI", x), (b.c("C", x), D), (D, x), side)
    b.add(("shiftJ",), (R, D), (B,), side)
    types = {}
    for a in sigma:
        types[a] = ("AB", "AB")
        types[b.c("B", a)] = ("AB", "AB")
        types[b.c("C", a)] = ("C", "C")
    types.update({E: ("K", "AB"), V: ("AB", "M"), M: ("M", "M"), W: ("M", "T"), B: ("AB", "T"),
                  L: ("AB", "C"), D: ("AB", "C"), R: ("C", "T")})
    return b.done(types)


def _rotate(src: Srs, relative: bool) -> TransformOutput:
    b = _Builder(TransformKind.ROTATE, src, ["B", "C", "D", "E"], ROTATE_MARKERS)
    sigma = range(len(src.alphabet))
    B, E, W, R, G, O, C, L, S, F, f = (b.markers[t] for t in ROTATE_MARKERS)
    side = not relative
    b.add(("rotA",), (B, E), (W, E), side)
    for a in sigma:
        b.add(("rotB", a), (B, a), (O, C, b.c("D", a), G), side)
    for a in sigma:
        b.add(("rotC", a), (G, a), (b.c("D", a), G), side)
    for a in sigma:
        b.add(("rotD", a), (G, a), (L, b.c("C", a), S), side)
    b.add(("rotE",), (G, E), (F, E), side)
    for x in sigma:
        for y in sigma:
            b.add(("rotF", x, y), (b.c("D", x), L, b.c("C", y)), (L, b.c("C", y), b.c("B", x)), side)
    for y in sigma:
        b.add(("rotG", y), (C, L, b.c("C", y)), (b.c("E", y), C, R), side)
    for x in sigma:
        b.add(("rotH", x), (R, b.c("B", x)), (b.c("D", x), R), side)
    for a in sigma:
        b.add(("rotI", a), (R, S, a), (L, b.c("C", a), S), side)
    b.add(("rotJ",), (R, S, E), (F, E), side)
    for x in sigma:
        b.add(("rotK", x), (b.c("D", x), F), (F, x), side)
    b.add(("rotL",), (C, F), (f,), side)
    for x in sigma:
        b.add(("rotM", x), (b.c("E", x), f), (f, x), side)
    b.add(("rotN",), (O, f), (W,), side)
    for i, r in enumerate(src.rules):
        b.add(("rotO", i), (W,) + r.lhs, (B,) + r.rhs, r.strict or not relative)
    types = {}
    for a in sigma:
        types[a] = ("A", "A")
        types[b.c("B", a)] = ("B", "B")
        types[b.c("C", a)] = ("B", "C")
        types[b.c("D", a)] = ("D", "D")
        types[b.c("E", a)] = ("E", "E")
    types.update({E: ("K", "A"), S: ("A", "B"), L: ("C", "D"), R: ("B", "D"), C: ("D", "E"),
                  G: ("A", "D"), F: ("A", "D"), B: ("A", "T"), W: ("A", "T"), O: ("E", "T"),
                  f: ("A", "E")})
    return b.done(types)


_BUILDERS = {TransformKind.SPLIT: _split, TransformKind.SHIFT: _shift, TransformKind.ROTATE: _rotate}


def transform(kind, srs: Srs) -> TransformOutput:
    """Plain transformation; strictness of the input is ignored and every rule is strict."""
    return _BUILDERS[TransformKind(kind)](srs, False)


def transform_rel(kind, srs: Srs) -> TransformOutput:
    """Relative variant: strict rules are the splitA/splitF, shiftH or rotO instances of S."""
    if not srs.strict_indices:
        raise SrsError("relative transformation needs a non-empty strict set")
    return _BUILDERS[TransformKind(kind)](srs, True)


def rot_sigma_size(n: int) -> int:
    return 5 + 8 * n + n * n


# step simulation

class Derivation(NamedTuple):
    start: Word
    steps: list  # (ruleIndex, position, word after the step)

    @property
    def end(self) -> Word:
        return self.steps[-1][2] if self.steps else self.start


class _Runner:
    def __init__(self, out: TransformOutput, start):
        self.out = out
        self.word = tuple(start)
        self.start = self.word
        self.steps = []

    def apply(self, key, pos):
        i = self.out.rule_index(key)
        rule = self.out.srs.rules[i]
        w = self.word
        if w[pos:pos + len(rule.lhs)] != rule.lhs:
            raise SrsError(f"simulation bug: {key} does not match at {pos}")
        self.word = w[:pos] + rule.rhs + w[pos + len(rule.lhs):]
        self.steps.append((i, pos, self.word))

    def at(self, tag):
        return self.word.index(self.out.m(tag))

    def derivation(self):
        return Derivation(self.start, self.steps)


def _check_step(src: Srs, u, rule, offset):
    u = tuple(u)
    if not 0 <= rule < len(src.rules):
        raise SrsError("unknown rule")
    lhs = src.rules[rule].lhs
    n = len(u)
    if n == 0 or len(lhs) > n or not 0 <= offset < n or rotate(u, offset)[:len(lhs)] != lhs:
        raise SrsError("invalid cycle step description")
    return u, lhs, src.rules[rule].rhs


def simulate_step(out: TransformOutput, u, rule: int, offset: int) -> Derivation:
    """String derivation B u E ->+ B v' E in out.srs simulating the cycle step of
    ``rule`` on the rotation of u starting at ``offset``."""
    u, lhs, rhs = _check_step(out.source, u, rule, offset)
    sim = {TransformKind.SPLIT: _sim_split, TransformKind.SHIFT: _sim_shift,
           TransformKind.ROTATE: _sim_rotate}[out.kind]
    return sim(out, u, rule, offset, lhs, rhs)


def _sim_split(out, u, rule, k, lhs, rhs):
    n, m = len(u), len(lhs)
    run = _Runner(out, (out.m("B"),) + u + (out.m("E"),))
    i = rule + 1
    if k + m <= n:
        run.apply(("splitA", i), 1 + k)
        return run.derivation()
    j = n - k
    w = u[m - j:k]
    run.apply(("splitE", i, j), 0)
    for t, a in enumerate(w):
        run.apply(("splitD", i, j, a), 1 + t)
    run.apply(("splitF", i, j), 1 + len(w))
    for a in reversed(w):
        run.apply(("splitB", a), run.at("L") - 1)
    run.apply(("splitC",), 0)
    return run.derivation()


def _sim_shift(out, u, rule, k, lhs, rhs):
    n, m = len(u), len(lhs)
    N = shift_N(out.source)
    s = max(0, k + m - n)
    run = _Runner(out, (out.m("B"),) + u + (out.m("E"),))
    run.apply(("shiftA",), 0)
    for _ in range(N - s):
        run.apply(("shiftB",), 1)
    cur = list(u)
    for _ in range(s):
        a = cur[0]
        run.apply(("shiftC", a), run.at("V") - 1)
        p = run.at("V") + 1
        for x in cur[1:]:
            run.apply(("shiftD", a, x), p)
            p += 1
        run.apply(("shiftE", a), p)
        cur = cur[1:] + cur[:1]
    run.apply(("shiftF",), 0)
    for x in cur[:k - s]:
        run.apply(("shiftG", x), run.at("L"))
    run.apply(("shiftH", rule), run.at("L"))
    for x in reversed(cur[:k - s]):
        run.apply(("shiftI", x), run.at("D") - 1)
    run.apply(("shiftJ",), 0)
    return run.derivation()


def _sim_rotate(out, u, rule, k, lhs, rhs):
    n = len(u)
    run = _Runner(out, (out.m("B"),) + u + (out.m("E"),))
    run.apply(("rotB", u[0]), 0)
    if k == 0:
        for x in u[1:]:
            run.apply(("rotC", x), run.at("G"))
        run.apply(("rotE",), run.at("G"))
        for x in reversed(u):
            run.apply(("rotK", x), run.at("F") - 1)
        run.apply(("rotL",), run.at("C"))
        run.apply(("rotN",), 0)
    else:
        for x in u[1:k]:
            run.apply(("rotC", x), run.at("G"))
        run.apply(("rotD", u[k]), run.at("G"))
        moved = u[k:]
        for t, y in enumerate(moved):
            for x in reversed(u[:k]):
                run.apply(("rotF", x, y), run.at("L") - 1)
            run.apply(("rotG", y), run.at("C"))
            for x in u[:k]:
                run.apply(("rotH", x), run.at("R"))
            if t + 1 < len(moved):
                run.apply(("rotI", moved[t + 1]), run.at("R"))
            else:
                run.apply(("rotJ",), run.at("R"))
        for x in reversed(u[:k]):
            run.apply(("rotK", x), run.at("F") - 1)
        run.apply(("rotL",), run.at("C"))
        for y in reversed(moved):
            run.apply(("rotM", y), run.at("f") - 1)
        run.apply(("rotN",), 0)
    run.apply(("rotO", rule), 0)
    return run.derivation()


# shapes and back-maps

def _codes(out: TransformOutput, w) -> str:
    n = len(out.source.alphabet)
    code = {}
    for tag, table in out.copies.items():
        ch = "x" if out.kind is TransformKind.SPLIT else tag.lower()
        for c in table:
            code[c] = ch
    for tag, sid in out.markers.items():
        code[sid] = "R" if tag.startswith("R_") else tag
    return "".join("a" if s < n else code[s] for s in w)


_SHAPES = {
    TransformKind.SPLIT: ["Ba*E", "Wx*La*E", "Wx*Ra*E"],
    TransformKind.SHIFT: ["WM*V[ab]*E", "B[ab]*E", "Rc*L[ab]*E", "Rc*D[ab]*E"],
    TransformKind.ROTATE: ["Oe*Cd*Lcb*Sa*E", "Oe*Cd*Rb*Sa*E", "Oe*Cd*Fa*E", "Oe*Cd*Ga*E",
                           "Oe*fa*E", "Ba*E", "Wa*E"],
}


def shape_classify(out: TransformOutput, w) -> int:
    """1-based number of the normal form w matches (3 for split, 4 for shift, 7 for rotate)."""
    codes = _codes(out, tuple(w))
    for no, pat in enumerate(_SHAPES[out.kind], 1):
        if re.fullmatch(pat, codes):
            return no
    raise ShapeError(f"word does not match any {out.kind.value} shape: {codes}")


def backmap(out: TransformOutput, w) -> list:
    """Source words represented by w; a singleton except for rotate's G shape.

    Results are distinct and, for rotate, ordered by split position."""
    w = tuple(w)
    shape = shape_classify(out, w)
    n = len(out.source.alphabet)
    A = out.uncopy
    if out.kind is TransformKind.SPLIT:
        body = w[1:-1]
        if shape == 1:
            return [body]
        p = next(t for t, s in enumerate(body) if s >= n and _codes(out, (s,)) in "LR")
        head, tail = A(body[:p]), body[p + 1:]
        if shape == 2:
            return [head + tail]
        tag = next(t for t, sid in out.markers.items() if sid == body[p])
        i, j = (int(x) for x in tag.split("_")[1:])
        return [out.source.rules[i - 1].lhs[j:] + head + tail]
    if out.kind is TransformKind.SHIFT:
        bcopy = set(out.copies["B"])

        def pi(x):
            pa = tuple(s for s in x if s < n)
            pb = tuple(s for s in x if s in bcopy)
            return pa + A(pb[::-1])
        codes = _codes(out, w)
        if shape in (1, 2):
            p = codes.index("V") if shape == 1 else 0
            return [pi(w[p + 1:-1])]
        p = codes.index("L" if shape == 3 else "D")
        return [A(w[1:p]) + pi(w[p + 1:-1])]
    codes = _codes(out, w)
    if shape in (6, 7):
        return [w[1:-1]]
    if shape == 5:
        p = codes.index("f")
        return [A(w[1:p]) + w[p + 1:-1]]
    c = codes.index("C")
    wE = A(w[1:c])
    if shape == 1:
        lpos, spos = codes.index("L"), codes.index("S")
        wD = A(w[c + 1:lpos])
        ch = A(w[lpos + 1:lpos + 2])
        wB = A(w[lpos + 2:spos])
        return [wD + wB + wE + ch + w[spos + 1:-1]]
    if shape == 2:
        rpos, spos = codes.index("R"), codes.index("S")
        return [A(w[c + 1:rpos]) + A(w[rpos + 1:spos]) + wE + w[spos + 1:-1]]
    if shape == 3:
        fpos = codes.index("F")
        return [A(w[c + 1:fpos]) + w[fpos + 1:-1] + wE]
    gpos = codes.index("G")
    wD, wA = A(w[c + 1:gpos]), w[gpos + 1:-1]
    res = []
    for p in range(len(wA) + 1):
        x = wD + wA[:p] + wE + wA[p:]
        if x not in res:
            res.append(x)
    return res


def start_word(out: TransformOutput, u) -> Word:
    return (out.m("B"),) + tuple(u) + (out.m("E"),)


def end_matches(out: TransformOutput, deriv: Derivation, v) -> bool:
    """Whether the derivation ends in B v' E with v' a rotation of v."""
    end = deriv.end
    B, E = out.m("B"), out.m("E")
    if len(end) < 2 or end[0] != B or end[-1] != E:
        return False
    return canonical_rotation(end[1:-1]) == canonical_rotation(v)
