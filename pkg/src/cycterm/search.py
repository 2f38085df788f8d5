"""Synthesis of removal witnesses: counting weights, bounded matrix search, and the removal loop.

Backends for matrix search:
  "builtin"  depth-first search over matrix entries with interval pruning on partial products
  "cpsat"    OR-Tools CP-SAT model (see cpsat.py)
  ExternalSolver(command)  SMT-LIB 2 subprocess (see smt.py)
Whatever the backend, a witness is only returned after check_removal accepts it.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from . import cpsat
from .matrices import (INF, NEG_INF, Interpretation, RemovalReport, SemiringKind, check_removal,
                       identity, mat_ge, mat_mul)
from .smt import ExternalSolver, SolverError, candidate_rules, decode_model, encode_constraints, \
    run_solver, symbols_of

Backend = Union[str, ExternalSolver]


class Status(str, Enum):
    FOUND = "found"
    EXHAUSTED = "exhausted"
    TIMED_OUT = "timed_out"


@dataclass(frozen=True)
class SearchConfig:
    kind: SemiringKind
    dim: int
    bound: int = 3
    allow_infinity: bool = True
    time_budget: float = 5.0
    backend: Backend = "builtin"

    def __post_init__(self):
        object.__setattr__(self, "kind", SemiringKind(self.kind))
        if self.dim < 1 or self.bound < 1:
            raise ValueError("dim and bound must be at least 1")
        if self.kind is SemiringKind.NATURAL and self.allow_infinity:
            object.__setattr__(self, "allow_infinity", False)

    def label(self):
        be = self.backend if isinstance(self.backend, str) else "external"
        return f"{self.kind.value} d={self.dim} b={self.bound} [{be}]"


@dataclass
class SearchResult:
    status: Status
    interpretation: Optional[Interpretation] = None
    report: Optional[RemovalReport] = None
    diagnostics: str = ""

    @property
    def found(self):
        return self.status is Status.FOUND


def default_backend() -> str:
    return "cpsat" if cpsat.available() else "builtin"


def default_schedule(backend: Backend = None, max_dim: int = 3, max_bound: int = 3,
                     time_budget: float = 3.0, kinds=None):
    """Counting runs separately.  Cheap configurations first: dimension, then bound, then
    kind in the order tropical (d=1..3), natural (d=2..3), arctic (d=2..3)."""
    backend = backend or default_backend()
    dims = {SemiringKind.TROPICAL: (1, 2, 3), SemiringKind.NATURAL: (2, 3),
            SemiringKind.ARCTIC: (2, 3)}
    out = []
    for d in range(1, max_dim + 1):
        for b in range(1, max_bound + 1):
            for kind in (SemiringKind.TROPICAL, SemiringKind.NATURAL, SemiringKind.ARCTIC):
                if d in dims[kind] and (kinds is None or kind in kinds):
                    out.append(SearchConfig(kind, d, b, True, time_budget, backend))
    return out


# counting

@dataclass(frozen=True)
class CountingResult:
    weights: dict  # symbol id -> weight
    report: RemovalReport


def weight(weights, w):
    return sum(weights.get(s, 0) for s in w)


def check_counting(weights, srs) -> RemovalReport:
    strict, weak, failed = set(), set(), set()
    for i, r in enumerate(srs.rules):
        dl, dr = weight(weights, r.lhs), weight(weights, r.rhs)
        (strict if dl > dr else weak if dl == dr else failed).add(i)
    return RemovalReport(frozenset(strict), frozenset(weak), frozenset(failed))


def counting_removal(srs, bound: int = 3) -> Optional[CountingResult]:
    """Weights in [0, bound] with w(l) >= w(r) everywhere and w(l) > w(r) for as many strict rules as possible."""
    cands = sorted(candidate_rules(srs))
    if not cands:
        return None
    syms = symbols_of(srs)
    col = {s: k for k, s in enumerate(syms)}
    n, m = len(syms), len(cands)
    diff = np.zeros((len(srs.rules), n))
    for i, r in enumerate(srs.rules):
        for s in r.lhs:
            diff[i, col[s]] += 1
        for s in r.rhs:
            diff[i, col[s]] -= 1
    # variables: weights then one indicator per candidate
    rows, lo = [], []
    for i in range(len(srs.rules)):
        rows.append(np.concatenate([diff[i], np.zeros(m)]))
        lo.append(0)
    for k, i in enumerate(cands):
        z = np.zeros(m)
        z[k] = -1
        rows.append(np.concatenate([diff[i], z]))
        lo.append(0)
    rows.append(np.concatenate([np.zeros(n), np.ones(m)]))
    lo.append(1)
    cons = LinearConstraint(np.array(rows), np.array(lo, dtype=float), np.full(len(rows), np.inf))
    c = np.concatenate([np.zeros(n), -np.ones(m)])
    res = milp(c, constraints=cons, integrality=np.ones(n + m),
               bounds=Bounds(np.zeros(n + m), np.concatenate([np.full(n, bound), np.ones(m)])))
    if res.status != 0 or res.x is None:
        return None
    weights = {s: int(round(res.x[col[s]])) for s in syms}
    report = check_counting(weights, srs)
    if report.failed or not (report.strict & set(cands)):
        return None
    return CountingResult(weights, report)


# built-in depth-first search

def _domain(kind, b, allow_inf, first):
    if kind is SemiringKind.NATURAL:
        return list(range(1 if first else 0, b + 1))
    vals = list(range(b + 1))
    if allow_inf and not first:
        vals.append(INF if kind is SemiringKind.TROPICAL else NEG_INF)
    return vals


def _prod(kind, d, mats, w):
    P = identity(kind, d)
    for s in w:
        P = mat_mul(kind, P, mats[s])
    return P


def _strict_possible(kind, U, L):
    if kind is SemiringKind.NATURAL:
        return U[0][0] > L[0][0]
    if kind is SemiringKind.TROPICAL:
        return all(u > l or u == INF for ru, rl in zip(U, L) for u, l in zip(ru, rl))
    return all(u > l or l == NEG_INF for ru, rl in zip(U, L) for u, l in zip(ru, rl))


def _builtin(srs, cfg, deadline):
    kind, d, b = cfg.kind, cfg.dim, cfg.bound
    cands = candidate_rules(srs)
    if not cands:
        return SearchResult(Status.EXHAUSTED, diagnostics="no strict rule to remove")
    # symbols ordered so that short rules become fully assigned early
    order = []
    for r in sorted(srs.rules, key=lambda r: len(r.lhs) + len(r.rhs)):
        for s in r.lhs + r.rhs:
            if s not in order:
                order.append(s)
    doms = {(i, j): _domain(kind, b, cfg.allow_infinity, (i, j) == (0, 0))
            for i in range(d) for j in range(d)}
    lo = {s: [[doms[i, j][0] for j in range(d)] for i in range(d)] for s in order}
    hi = {s: [[doms[i, j][-1] for j in range(d)] for i in range(d)] for s in order}
    # for the arctic domain the smallest value -inf sits at the end of the list
    if kind is SemiringKind.ARCTIC and cfg.allow_infinity:
        for s in order:
            for i in range(d):
                for j in range(d):
                    if (i, j) != (0, 0):
                        lo[s][i][j] = NEG_INF
                        hi[s][i][j] = b
    cells = [(s, i, j) for s in order for i in range(d) for j in range(d)]
    touching = {s: [k for k, r in enumerate(srs.rules) if s in r.lhs or s in r.rhs] for s in order}
    rules = srs.rules
    nodes = [0]

    def consistent(s):
        for k in touching[s]:
            r = rules[k]
            if not mat_ge(kind, _prod(kind, d, hi, r.lhs), _prod(kind, d, lo, r.rhs)):
                return False
        for k in cands:
            r = rules[k]
            if _strict_possible(kind, _prod(kind, d, hi, r.lhs), _prod(kind, d, lo, r.rhs)):
                return True
        return False

    def rec(pos):
        nodes[0] += 1
        if nodes[0] % 512 == 0 and time.monotonic() > deadline:
            raise TimeoutError
        if pos == len(cells):
            interp = Interpretation(kind, d, {s: lo[s] for s in order})
            rep = check_removal(interp, srs)
            if not rep.failed and rep.strict & cands:
                return interp, rep
            return None
        s, i, j = cells[pos]
        old = (lo[s][i][j], hi[s][i][j])
        for v in doms[i, j]:
            lo[s][i][j] = hi[s][i][j] = v
            if consistent(s):
                got = rec(pos + 1)
                if got:
                    return got
        lo[s][i][j], hi[s][i][j] = old
        return None

    try:
        got = rec(0)
    except TimeoutError:
        return SearchResult(Status.TIMED_OUT, diagnostics=f"{nodes[0]} nodes")
    if got is None:
        return SearchResult(Status.EXHAUSTED, diagnostics=f"{nodes[0]} nodes")
    return SearchResult(Status.FOUND, got[0], got[1], f"{nodes[0]} nodes")


def _verified(srs, interp, diag=""):
    rep = check_removal(interp, srs)
    if rep.failed or not rep.strict & candidate_rules(srs):
        raise SolverError("backend returned an interpretation that does not verify", diag)
    return SearchResult(Status.FOUND, interp, rep, diag)


def find_interpretation(srs, cfg: SearchConfig, deadline: float = None) -> SearchResult:
    """Bounded search for a matrix interpretation removing at least one candidate rule.

    Raises SolverError when an external solver process fails.
    """
    start = time.monotonic()
    end = start + cfg.time_budget
    if deadline is not None:
        end = min(end, deadline)
    if not candidate_rules(srs):
        return SearchResult(Status.EXHAUSTED, diagnostics="no strict rule to remove")
    if end <= start:
        return SearchResult(Status.TIMED_OUT)
    be = cfg.backend
    if be == "builtin":
        res = _builtin(srs, cfg, end)
        return res if not res.found else _verified(srs, res.interpretation, res.diagnostics)
    if be == "cpsat":
        try:
            status, interp = cpsat.solve(srs, cfg, end - time.monotonic())
        except cpsat.Unsupported as exc:
            return SearchResult(Status.TIMED_OUT, diagnostics=str(exc))
        if status == "found":
            return _verified(srs, interp)
        return SearchResult(Status.EXHAUSTED if status == "exhausted" else Status.TIMED_OUT)
    if isinstance(be, ExternalSolver):
        script = encode_constraints(srs, cfg)
        status, model = run_solver(be, script, end - time.monotonic())
        if status == "sat":
            return _verified(srs, decode_model(model, srs, cfg))
        if status == "unsat":
            return SearchResult(Status.EXHAUSTED)
        return SearchResult(Status.TIMED_OUT, diagnostics=status)
    raise ValueError(f"unknown backend {be!r}")


# removal loop

@dataclass
class RemovalStep:
    technique: str  # "counting" or "matrix"
    removed: tuple  # rule indices of the problem this step applies to
    weights: Optional[dict] = None
    interpretation: Optional[Interpretation] = None
    config: Optional[SearchConfig] = None


@dataclass
class RemovalOutcome:
    steps: list
    residual: object
    diagnostics: list = field(default_factory=list)

    @property
    def proved(self):
        return not self.residual.strict_indices


def removal_loop(srs, schedule=None, counting: bool = True, counting_bound: int = 3,
                 deadline: float = None) -> RemovalOutcome:
    """Remove strictly decreasing rules until the strict set is empty or nothing applies.

    After every success the schedule restarts from counting.
    """
    schedule = default_schedule() if schedule is None else schedule
    steps, diags = [], []
    cur = srs
    while cur.strict_indices:
        if deadline is not None and time.monotonic() >= deadline:
            diags.append("removal: budget exhausted")
            break
        step = None
        if counting:
            got = counting_removal(cur, counting_bound)
            if got:
                step = RemovalStep("counting", tuple(sorted(got.report.strict)), weights=got.weights)
        if step is None:
            for cfg in schedule:
                if deadline is not None and time.monotonic() >= deadline:
                    break
                try:
                    res = find_interpretation(cur, cfg, deadline)
                except SolverError as exc:
                    diags.append(f"{cfg.label()}: {exc}")
                    continue
                if res.found:
                    step = RemovalStep("matrix", tuple(sorted(res.report.strict)),
                                       interpretation=res.interpretation, config=cfg)
                    break
        if step is None:
            break
        steps.append(step)
        cur = cur.without(step.removed)
    return RemovalOutcome(steps, cur, diags)
