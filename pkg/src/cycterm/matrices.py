"""Matrices over the natural, tropical and arctic semirings, trace-based rule removal,
and the one-dimensional affine interpretations used in hand-written termination proofs.

Finite entries are Python ints, so products never overflow.  The absorbing elements
are math.inf (tropical) and -math.inf (arctic).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple


class SemiringKind(str, Enum):
    NATURAL = "natural"
    TROPICAL = "tropical"
    ARCTIC = "arctic"


INF = math.inf
NEG_INF = -math.inf


class InterpretationError(ValueError):
    pass


def zero(kind):
    return {SemiringKind.NATURAL: 0, SemiringKind.TROPICAL: INF, SemiringKind.ARCTIC: NEG_INF}[kind]


def one(kind):
    return 1 if kind is SemiringKind.NATURAL else 0


def add(kind, x, y):
    if kind is SemiringKind.NATURAL:
        return x + y
    if kind is SemiringKind.TROPICAL:
        return min(x, y)
    return max(x, y)


def mul(kind, x, y):
    if kind is SemiringKind.NATURAL:
        return x * y
    return x + y


def valid_value(kind, x) -> bool:
    if isinstance(x, bool):
        return False
    if isinstance(x, int):
        return x >= 0
    if kind is SemiringKind.TROPICAL:
        return x == INF
    if kind is SemiringKind.ARCTIC:
        return x == NEG_INF
    return False


def identity(kind, d):
    z, o = zero(kind), one(kind)
    return tuple(tuple(o if i == j else z for j in range(d)) for i in range(d))


def mat_mul(kind, A, B):
    d = len(A)
    if kind is SemiringKind.NATURAL:
        return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(d)) for j in range(d))
                     for i in range(d))
    pick = min if kind is SemiringKind.TROPICAL else max
    return tuple(tuple(pick(A[i][k] + B[k][j] for k in range(d)) for j in range(d))
                 for i in range(d))


def trace(kind, A):
    diag = [A[i][i] for i in range(len(A))]
    if kind is SemiringKind.NATURAL:
        return sum(diag)
    return min(diag) if kind is SemiringKind.TROPICAL else max(diag)


def in_M(kind, A) -> bool:
    a11 = A[0][0]
    if kind is SemiringKind.NATURAL:
        return a11 > 0
    if kind is SemiringKind.TROPICAL:
        return a11 != INF
    return a11 != NEG_INF


def _entry_gt(kind, x, y):
    if kind is SemiringKind.TROPICAL:
        return x > y or x == y == INF
    if kind is SemiringKind.ARCTIC:
        return x > y or x == y == NEG_INF
    return x > y


def mat_ge(kind, A, B) -> bool:
    return all(x >= y for ra, rb in zip(A, B) for x, y in zip(ra, rb))


def mat_gt(kind, A, B) -> bool:
    if kind is SemiringKind.NATURAL:
        return A[0][0] > B[0][0] and mat_ge(kind, A, B)
    return all(_entry_gt(kind, x, y) for ra, rb in zip(A, B) for x, y in zip(ra, rb))


def as_matrix(rows):
    return tuple(tuple(r) for r in rows)


@dataclass(frozen=True)
class Interpretation:
    kind: SemiringKind
    dim: int
    mats: dict  # symbol id -> matrix

    def __post_init__(self):
        object.__setattr__(self, "kind", SemiringKind(self.kind))
        mats = {s: as_matrix(m) for s, m in self.mats.items()}
        for s, m in mats.items():
            if len(m) != self.dim or any(len(r) != self.dim for r in m):
                raise InterpretationError(f"matrix for symbol {s} has the wrong shape")
            if not all(valid_value(self.kind, x) for r in m for x in r):
                raise InterpretationError(f"matrix for symbol {s} has an illegal entry")
            if not in_M(self.kind, m):
                raise InterpretationError(f"matrix for symbol {s} violates the A11 constraint")
        object.__setattr__(self, "mats", mats)

    def __call__(self, w):
        return interpret(self, w)


def interpret(I: Interpretation, w):
    P = identity(I.kind, I.dim)
    for s in w:
        try:
            P = mat_mul(I.kind, P, I.mats[s])
        except KeyError:
            raise InterpretationError(f"symbol {s} not interpreted") from None
    return P


class RemovalReport(NamedTuple):
    strict: frozenset
    weak: frozenset
    failed: frozenset

    @property
    def valid(self) -> bool:
        return not self.failed and bool(self.strict)


def check_removal(I: Interpretation, srs) -> RemovalReport:
    strict, weak, failed = set(), set(), set()
    for i, r in enumerate(srs.rules):
        L, R = interpret(I, r.lhs), interpret(I, r.rhs)
        if mat_gt(I.kind, L, R):
            strict.add(i)
        elif mat_ge(I.kind, L, R):
            weak.add(i)
        else:
            failed.add(i)
    return RemovalReport(frozenset(strict), frozenset(weak), frozenset(failed))


# affine interpretations λx. a·x + b

@dataclass(frozen=True)
class AffineInterpretation:
    maps: dict  # symbol id -> (a, b)

    def __post_init__(self):
        for s, (a, b) in self.maps.items():
            if a < 1 or b < 0:
                raise InterpretationError(f"affine map for {s} must have a >= 1 and b >= 0")

    def compose(self, w):
        """Coefficients of f_{w1} ∘ ... ∘ f_{wn}; the leftmost symbol is applied last."""
        A, B = 1, 0
        for s in w:
            a, b = self.maps[s]
            A, B = A * a, A * b + B
        return A, B


def check_affine(sigma: AffineInterpretation, srs) -> RemovalReport:
    strict, weak, failed = set(), set(), set()
    for i, r in enumerate(srs.rules):
        (al, bl), (ar, br) = sigma.compose(r.lhs), sigma.compose(r.rhs)
        if al >= ar and bl > br:
            strict.add(i)
        elif al >= ar and bl >= br:
            weak.add(i)
        else:
            failed.add(i)
    return RemovalReport(frozenset(strict), frozenset(weak), frozenset(failed))
