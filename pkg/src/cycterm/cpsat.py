"""CP-SAT model of the removal conditions (OR-Tools), maximizing the number of strict rules.

Infinities are encoded by a sentinel: BIG for the tropical ∞ and -BIG for the arctic -∞,
with BIG larger than any finite value a rule side can reach.
"""
from __future__ import annotations

import time

from .matrices import INF, NEG_INF, Interpretation, SemiringKind
from .smt import candidate_rules, symbols_of

try:
    from ortools.sat.python import cp_model
except ImportError:  # pragma: no cover - exercised only without ortools
    cp_model = None

# CP-SAT works on int64; stay well inside it
_LIMIT = 1 << 60

# deterministic-time allowance (solver units) for improving a first witness
OPTIMIZE_DETERMINISTIC_TIME = 0.5


def available() -> bool:
    return cp_model is not None


class Unsupported(Exception):
    """The instance does not fit the solver's integer range."""


def solve(srs, cfg, timeout: float, maximize: bool = True):
    """Returns ('found', Interpretation) | ('exhausted', None) | ('timeout', None)."""
    if cp_model is None:
        raise Unsupported("ortools is not installed")
    kind = SemiringKind(cfg.kind)
    d, b = cfg.dim, cfg.bound
    syms = symbols_of(srs)
    maxlen = max((max(len(r.lhs), len(r.rhs)) for r in srs.rules), default=1)
    big = maxlen * b + 1
    flags = cfg.allow_infinity and kind is not SemiringKind.NATURAL
    m = cp_model.CpModel()

    def base_domain(i, j):
        vals = list(range(b + 1))
        if kind is SemiringKind.NATURAL and (i, j) == (0, 0):
            vals = vals[1:]
        if flags and (i, j) != (0, 0):
            vals.append(big if kind is SemiringKind.TROPICAL else -big)
        return cp_model.Domain.FromValues(vals)

    X = {s: [[(m.NewIntVarFromDomain(base_domain(i, j), f"x{s}_{i}{j}"),
               -big if kind is SemiringKind.ARCTIC and flags else 0,
               big if kind is SemiringKind.TROPICAL and flags else b)
              for j in range(d)] for i in range(d)] for s in syms}

    def const(v):
        return (v, v, v)

    def identity():
        if kind is SemiringKind.NATURAL:
            return [[const(1 if i == j else 0) for j in range(d)] for i in range(d)]
        z = big if kind is SemiringKind.TROPICAL else -big
        return [[const(0 if i == j else z) for j in range(d)] for i in range(d)]

    def mul(A, B):
        C = []
        for i in range(d):
            row = []
            for j in range(d):
                if kind is SemiringKind.NATURAL:
                    terms, ub = [], 0
                    for t in range(d):
                        (x, _, xu), (y, _, yu) = A[i][t], B[t][j]
                        pu = xu * yu
                        if pu > _LIMIT:
                            raise Unsupported("natural products exceed the integer range")
                        v = m.NewIntVar(0, pu, "")
                        m.AddMultiplicationEquality(v, [x, y])
                        terms.append(v)
                        ub += pu
                    if ub > _LIMIT:
                        raise Unsupported("natural products exceed the integer range")
                    c = m.NewIntVar(0, ub, "")
                    m.Add(c == sum(terms))
                    row.append((c, 0, ub))
                elif kind is SemiringKind.TROPICAL:
                    sums = [A[i][t][0] + B[t][j][0] for t in range(d)]
                    hi = big if flags else min(A[i][t][2] + B[t][j][2] for t in range(d))
                    c = m.NewIntVar(0, hi, "")
                    if flags:
                        m.AddMinEquality(c, sums + [big])
                    else:
                        m.AddMinEquality(c, sums)
                    row.append((c, 0, hi))
                else:
                    sums = [A[i][t][0] + B[t][j][0] for t in range(d)]
                    hi = max(A[i][t][2] + B[t][j][2] for t in range(d))
                    if not flags:
                        c = m.NewIntVar(0, hi, "")
                        m.AddMaxEquality(c, sums)
                        row.append((c, 0, hi))
                        continue
                    lo = min(A[i][t][1] + B[t][j][1] for t in range(d))
                    raw = m.NewIntVar(lo, hi, "")
                    m.AddMaxEquality(raw, sums)
                    neg = m.NewBoolVar("")
                    m.Add(raw < 0).OnlyEnforceIf(neg)
                    m.Add(raw >= 0).OnlyEnforceIf(neg.Not())
                    c = m.NewIntVarFromDomain(cp_model.Domain.FromValues([-big] + list(range(max(hi, 0) + 1))), "")
                    m.Add(c == -big).OnlyEnforceIf(neg)
                    m.Add(c == raw).OnlyEnforceIf(neg.Not())
                    row.append((c, -big, max(hi, 0)))
            C.append(row)
        return C

    cache = {}

    def word(w):
        if not w:
            return identity()
        if w in cache:
            return cache[w]
        base = [[X[w[-1]][i][j] for j in range(d)] for i in range(d)]
        P = base if len(w) == 1 else mul(word(w[:-1]), base)
        cache[w] = P
        return P

    cands = candidate_rules(srs)
    indicators, needed = [], []
    for k, r in enumerate(srs.rules):
        L, R = word(r.lhs), word(r.rhs)
        for i in range(d):
            for j in range(d):
                m.Add(L[i][j][0] >= R[i][j][0])
        st = m.NewBoolVar(f"strict{k}")
        if kind is SemiringKind.NATURAL:
            m.Add(L[0][0][0] > R[0][0][0]).OnlyEnforceIf(st)
        else:
            for i in range(d):
                for j in range(d):
                    lv, rv = L[i][j][0], R[i][j][0]
                    if not flags:
                        m.Add(lv > rv).OnlyEnforceIf(st)
                        continue
                    # strict entry: l > r, or both at the absorbing sentinel
                    gt = m.NewBoolVar("")
                    m.Add(lv > rv).OnlyEnforceIf(gt)
                    at = m.NewBoolVar("")
                    if kind is SemiringKind.TROPICAL:
                        m.Add(lv == big).OnlyEnforceIf(at)
                    else:
                        m.Add(rv == -big).OnlyEnforceIf(at)
                    m.AddBoolOr([gt, at]).OnlyEnforceIf(st)
        indicators.append(st)
        if k in cands:
            needed.append(st)
    if not needed:
        return "exhausted", None
    m.AddBoolOr(needed)

    def run(limit, det=None):
        solver = cp_model.CpSolver()
        solver.parameters.num_workers = 1
        solver.parameters.random_seed = 0
        solver.parameters.max_time_in_seconds = max(limit, 0.001)
        if det is not None:
            solver.parameters.max_deterministic_time = det
        return solver, solver.Solve(m)

    t0 = time.monotonic()
    solver, status = run(timeout)
    if maximize and status == cp_model.FEASIBLE:
        # improve the number of strict rules within a small deterministic allowance
        for k, st in enumerate(indicators):
            m.AddHint(st, solver.BooleanValue(st))
        for s in syms:
            for row in X[s]:
                for v in row:
                    m.AddHint(v[0], solver.Value(v[0]))
        m.Maximize(sum(indicators))
        solver2, status2 = run(timeout - (time.monotonic() - t0), OPTIMIZE_DETERMINISTIC_TIME)
        if status2 in (cp_model.OPTIMAL, cp_model.FEASIBLE):
            solver, status = solver2, status2
    if status in (cp_model.OPTIMAL, cp_model.FEASIBLE):
        mats = {}
        for s in syms:
            rows = []
            for i in range(d):
                row = []
                for j in range(d):
                    v = solver.Value(X[s][i][j][0])
                    if flags and v == big:
                        v = INF
                    elif flags and v == -big:
                        v = NEG_INF
                    row.append(v)
                rows.append(row)
            mats[s] = rows
        return "found", Interpretation(kind, d, mats)
    if status == cp_model.INFEASIBLE:
        return "exhausted", None
    return "timeout", None
