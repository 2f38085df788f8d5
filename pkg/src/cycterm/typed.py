"""Typed signatures, well-typed words and systems, and the decomposition Dec."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .words import Srs


class TypingError(ValueError):
    pass


@dataclass(frozen=True)
class TypedSignature:
    """Maps symbol id -> (source type, target type). Types are plain strings."""
    types: dict

    def source(self, a):
        return self.types[a][0]

    def target(self, a):
        return self.types[a][1]

    def covers(self, n_symbols: int) -> bool:
        return all(a in self.types for a in range(n_symbols))


def word_type(sig: TypedSignature, w: Sequence[int]):
    """(source of last symbol, target of first symbol) if w is well-typed, else None."""
    if len(w) == 0:
        raise TypingError("well-typedness is defined for non-empty words only")
    for x, y in zip(w, w[1:]):
        if sig.source(x) != sig.target(y):
            return None
    return sig.source(w[-1]), sig.target(w[0])


def well_typed_srs(sig: TypedSignature, srs: Srs) -> bool:
    for rule in srs.rules:
        tl = word_type(sig, rule.lhs)
        if tl is None:
            return False
        if not rule.rhs:
            if tl[0] != tl[1]:
                return False
        elif word_type(sig, rule.rhs) != tl:
            return False
    return True


def decompose(sig: TypedSignature, w: Sequence[int]) -> list:
    """Maximal split of w into well-typed segments."""
    w = tuple(w)
    if not w:
        raise TypingError("Dec is defined for non-empty words only")
    parts = []
    start = 0
    for i in range(1, len(w)):
        if sig.source(w[i - 1]) != sig.target(w[i]):
            parts.append(w[start:i])
            start = i
    parts.append(w[start:])
    return parts
