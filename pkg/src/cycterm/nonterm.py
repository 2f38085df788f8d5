"""Bounded search for non-termination witnesses.

Two sound loop criteria only:
  cycle repetition    [u] ->+ [u] in the graph of canonical cycle classes
  string self-embedding  u ->+ x u y by plain string rewriting (string loops are cycle loops)
In relative mode a loop must contain a strict step.
"""
from __future__ import annotations

import itertools
import time
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import networkx as nx

from .words import CheckResult, Srs, Word, canonical_rotation, cycle_redexes, cycle_successors, \
    string_successors


class LoopKind(str, Enum):
    CYCLE = "cycle_repetition"
    STRING = "string_self_embedding"


@dataclass(frozen=True)
class LoopWitness:
    kind: LoopKind
    start: Word
    steps: tuple  # (rule, offset or position, resulting word)
    context: Optional[tuple] = None  # (x, y) for self-embedding
    strict_count: int = 0

    @property
    def end(self):
        return self.steps[-1][2] if self.steps else self.start


@dataclass(frozen=True)
class NontermConfig:
    max_start_len: int = 5
    max_word_len: int = 12
    max_depth: int = 16
    max_states: int = 20000
    max_string_states: int = 2000  # per start word
    time_budget: float = 5.0
    start_words: tuple = ()  # explored before the generated seeds

    def __post_init__(self):
        for k, v in self.__dict__.items():
            if k != "start_words" and v <= 0:
                raise ValueError(f"{k} must be positive")


def seed_words(srs: Srs, max_len: int, extra=()):
    """Given start words, then left-hand sides, then cyclic extensions l_i l_j, then every word up to max_len in
    length-lexicographic order."""
    seen = set()
    lhss = list(dict.fromkeys(r.lhs for r in srs.rules))
    for w in [tuple(x) for x in extra] + lhss + [u + v for u in lhss for v in lhss]:
        if w not in seen:
            seen.add(w)
            yield w
    syms = range(len(srs.alphabet))
    for n in range(1, max_len + 1):
        for w in itertools.product(syms, repeat=n):
            if w not in seen:
                seen.add(w)
                yield w


# cycle repetition

def _shortest_loop(g, srs, comp, relative, order):
    """Shortest closed walk inside one strongly connected component using a strict edge."""
    best = None
    edges = sorted(((u, v, i) for u in comp for v, i in g[u] if v in comp
                    and (not relative or srs.rules[i].strict)), key=lambda e: (order[e[0]], e[2], order[e[1]]))
    for u, v, i in edges[:64]:
        # BFS v -> u inside the component
        prev = {v: None}
        q = deque([v])
        while q and u not in prev:
            x = q.popleft()
            for y, j in g[x]:
                if y in comp and y not in prev:
                    prev[y] = (x, j)
                    q.append(y)
        if u not in prev:
            continue
        path = []
        x = u
        while prev[x] is not None:
            px, j = prev[x]
            path.append((px, j, x))
            x = px
        path.reverse()
        loop = [(u, i, v)] + path if u != v else [(u, i, v)]
        if best is None or len(loop) < len(best):
            best = loop
    return best


def _cycle_witness(srs, loop):
    start = loop[0][0]
    cur = start
    steps = []
    for _, i, target in loop:
        for j, k, res in cycle_redexes(srs, cur):
            if j == i and canonical_rotation(res) == target:
                steps.append((i, k, res))
                cur = res
                break
        else:  # pragma: no cover - the edge came from cycle_successors
            raise AssertionError("edge without redex")
    strict = sum(srs.rules[i].strict for i, _, _ in steps)
    return LoopWitness(LoopKind.CYCLE, start, tuple(steps), None, strict)


def find_cycle_loop(srs: Srs, cfg: NontermConfig = NontermConfig(), deadline: float = None):
    end = time.monotonic() + cfg.time_budget
    if deadline is not None:
        end = min(end, deadline)
    if not srs.strict_indices:
        return None
    relative = srs.is_relative
    g = {}
    order = {}
    frontier = []
    for w in seed_words(srs, cfg.max_start_len, cfg.start_words):
        if len(order) >= cfg.max_states // 2 or time.monotonic() > end:
            break
        c = canonical_rotation(w)
        if c not in order and len(c) <= cfg.max_word_len:
            order[c] = len(order)
            g[c] = []
            frontier.append(c)
    for _ in range(cfg.max_depth):
        nxt = []
        for u in frontier:
            if time.monotonic() > end:
                return _loop_in(g, srs, relative, order)
            for i, c in sorted(cycle_successors(srs, u)):
                if len(c) > cfg.max_word_len:
                    continue
                if c not in order:
                    if len(order) >= cfg.max_states:
                        continue
                    order[c] = len(order)
                    g[c] = []
                    nxt.append(c)
                g[u].append((c, i))
        found = _loop_in(g, srs, relative, order)
        if found or not nxt:
            return found
        frontier = nxt
    return None


def _loop_in(g, srs, relative, order):
    dg = nx.DiGraph()
    dg.add_nodes_from(g)
    dg.add_edges_from((u, v) for u in g for v, _ in g[u])
    comps = [c for c in nx.strongly_connected_components(dg)
             if len(c) > 1 or any(v == next(iter(c)) for v, _ in g[next(iter(c))])]
    comps.sort(key=lambda c: min(order[x] for x in c))
    best = None
    for comp in comps:
        loop = _shortest_loop(g, srs, comp, relative, order)
        if loop and (best is None or len(loop) < len(best)):
            best = loop
    return _cycle_witness(srs, best) if best else None


# string self-embedding

def _find_factor(v, u):
    n = len(u)
    for p in range(len(v) - n + 1):
        if v[p:p + n] == u:
            return p
    return None


def find_string_loop(srs: Srs, cfg: NontermConfig = NontermConfig(), deadline: float = None):
    end = time.monotonic() + cfg.time_budget
    if deadline is not None:
        end = min(end, deadline)
    if not srs.strict_indices:
        return None
    for u in seed_words(srs, cfg.max_start_len, cfg.start_words):
        if time.monotonic() > end:
            return None
        if len(u) > cfg.max_word_len:
            continue
        # states carry whether a strict step was used on the way
        start = (u, False)
        prev = {start: None}
        q = deque([(start, 0)])
        while q:
            (w, flag), depth = q.popleft()
            if depth >= cfg.max_depth:
                continue
            if time.monotonic() > end:
                return None
            for i, p, v in sorted(string_successors(srs, w)):
                if len(v) > cfg.max_word_len:
                    continue
                st = (v, flag or srs.rules[i].strict)
                if st in prev:
                    continue
                prev[st] = ((w, flag), i, p)
                if st[1]:
                    k = _find_factor(v, u)
                    if k is not None:
                        return _string_witness(srs, u, prev, st, k)
                if len(prev) < cfg.max_string_states:
                    q.append((st, depth + 1))
    return None


def _string_witness(srs, u, prev, st, k):
    steps = []
    x = st
    while prev[x] is not None:
        px, i, p = prev[x]
        steps.append((i, p, x[0]))
        x = px
    steps.reverse()
    v = st[0]
    strict = sum(srs.rules[i].strict for i, _, _ in steps)
    return LoopWitness(LoopKind.STRING, u, tuple(steps), (v[:k], v[k + len(u):]), strict)


def find_loop(srs: Srs, cfg: NontermConfig = NontermConfig(), deadline: float = None):
    """Cycle repetition first, then string self-embedding, splitting the budget evenly."""
    t0 = time.monotonic()
    end = t0 + cfg.time_budget
    if deadline is not None:
        end = min(end, deadline)
    half = (end - t0) / 2
    w = find_cycle_loop(srs, cfg, deadline=t0 + half)
    if w is None:
        w = find_string_loop(srs, cfg, deadline=end)
    return w


def verify_witness(srs: Srs, w: LoopWitness) -> CheckResult:
    if not w.steps:
        return CheckResult(False, 0, "a loop needs at least one step")
    cur = tuple(w.start)
    strict = 0
    for idx, (i, pos, res) in enumerate(w.steps):
        if not 0 <= i < len(srs.rules):
            return CheckResult(False, idx, "unknown rule")
        r = srs.rules[i]
        res = tuple(res)
        if w.kind is LoopKind.CYCLE:
            ok = (i, pos, res) in set(cycle_redexes(srs, cur))
        else:
            ok = (0 <= pos and cur[pos:pos + len(r.lhs)] == r.lhs
                  and cur[:pos] + r.rhs + cur[pos + len(r.lhs):] == res)
        if not ok:
            return CheckResult(False, idx, "step does not replay")
        strict += r.strict
        cur = res
    last = len(w.steps) - 1
    if strict != w.strict_count:
        return CheckResult(False, last, "recorded strict count is wrong")
    if strict < 1:
        return CheckResult(False, last, "no strict step in the loop")
    if w.kind is LoopKind.CYCLE:
        if canonical_rotation(cur) != canonical_rotation(w.start):
            return CheckResult(False, last, "end is not in the class of the start")
    else:
        if w.context is None:
            return CheckResult(False, last, "missing context")
        x, y = (tuple(c) for c in w.context)
        if cur != x + tuple(w.start) + y:
            return CheckResult(False, last, "end is not x·start·y")
    return CheckResult(True)
