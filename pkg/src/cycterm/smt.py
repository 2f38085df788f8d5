"""SMT-LIB 2 encoding of the removal conditions and a subprocess client for an external solver.

Unknowns: one bounded Int per matrix entry, plus a Bool infinity flag per entry for
tropical/arctic configurations that allow infinity.  Word products are named by
auxiliary unknowns so the formula stays linear in the size of the rules.
"""
from __future__ import annotations

import os
import re
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass

from .matrices import INF, NEG_INF, Interpretation, SemiringKind


class SolverError(RuntimeError):
    def __init__(self, msg, diagnostics=""):
        super().__init__(msg)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class ExternalSolver:
    """Command template; ``{file}`` is replaced by the script path, otherwise the script goes to stdin."""
    command: str

    def argv(self, path):
        parts = shlex.split(self.command)
        if any("{file}" in p for p in parts):
            return [p.replace("{file}", path) for p in parts], False
        return parts, True


def _var(s, i, j):
    return f"m_{s}_{i}_{j}"


def _flag(s, i, j):
    return f"f_{s}_{i}_{j}"


def symbols_of(srs):
    seen = []
    for r in srs.rules:
        for s in r.lhs + r.rhs:
            if s not in seen:
                seen.append(s)
    return sorted(seen)


class _Enc:
    def __init__(self, srs, cfg):
        self.srs, self.cfg = srs, cfg
        self.kind = SemiringKind(cfg.kind)
        self.d = cfg.dim
        self.flags = cfg.allow_infinity and self.kind is not SemiringKind.NATURAL
        self.lines = []
        self.count = 0
        self.cache = {}

    def out(self, s):
        self.lines.append(s)

    def fresh(self):
        self.count += 1
        return self.count

    def base(self, s):
        d = self.d
        return [[(_var(s, i, j), _flag(s, i, j) if self.flags else None) for j in range(d)]
                for i in range(d)]

    def identity(self):
        # only used for the empty word
        d = self.d
        one = "1" if self.kind is SemiringKind.NATURAL else "0"
        if self.kind is SemiringKind.NATURAL:
            return [[(one if i == j else "0", None) for j in range(d)] for i in range(d)]
        return [[("0", None if i == j else "true") for j in range(d)] for i in range(d)]

    def mul(self, A, B):
        d, k = self.d, self.fresh()
        C = []
        for i in range(d):
            row = []
            for j in range(d):
                v = f"p_{k}_{i}_{j}"
                self.out(f"(declare-fun {v} () Int)")
                if self.kind is SemiringKind.NATURAL:
                    terms = " ".join(f"(* {A[i][t][0]} {B[t][j][0]})" for t in range(d))
                    self.out(f"(assert (= {v} (+ {terms} 0)))")
                    row.append((v, None))
                    continue
                fl = None
                fins = []
                sums = []
                for t in range(d):
                    fa, fb = A[i][t][1], B[t][j][1]
                    conds = [f"(not {x})" for x in (fa, fb) if x is not None]
                    fins.append("(and true " + " ".join(conds) + ")")
                    sums.append(f"(+ {A[i][t][0]} {B[t][j][0]})")
                cmp = "<=" if self.kind is SemiringKind.TROPICAL else ">="
                if self.flags:
                    fl = f"q_{k}_{i}_{j}"
                    self.out(f"(declare-fun {fl} () Bool)")
                    self.out(f"(assert (= {fl} (and " + " ".join(f"(not {x})" for x in fins) + ")))")
                    self.out(f"(assert (=> {fl} (= {v} 0)))")
                    attained = " ".join(f"(and {fi} (= {v} {sm}))" for fi, sm in zip(fins, sums))
                    self.out(f"(assert (=> (not {fl}) (or {attained})))")
                else:
                    attained = " ".join(f"(= {v} {sm})" for sm in sums)
                    self.out(f"(assert (or {attained}))")
                for fi, sm in zip(fins, sums):
                    self.out(f"(assert (=> {fi} ({cmp} {v} {sm})))")
                row.append((v, fl))
            C.append(row)
        return C

    def word(self, w):
        w = tuple(w)
        if not w:
            return self.identity()
        if w in self.cache:
            return self.cache[w]
        P = self.base(w[0]) if len(w) == 1 else self.mul(self.word(w[:-1]), self.base(w[-1]))
        self.cache[w] = P
        return P

    def entry_ge(self, x, y, strict):
        (a, fa), (b, fb) = x, y
        op = ">" if strict else ">="
        if self.kind is SemiringKind.NATURAL or (fa is None and fb is None):
            return f"({op} {a} {b})"
        fa = fa or "false"
        fb = fb or "false"
        if self.kind is SemiringKind.TROPICAL:
            return f"(or {fa} (and (not {fb}) ({op} {a} {b})))"
        return f"(or {fb} (and (not {fa}) ({op} {a} {b})))"


def encode_constraints(srs, cfg) -> str:
    """SMT-LIB 2 script whose models are interpretations removing at least one candidate rule."""
    e = _Enc(srs, cfg)
    kind, d = e.kind, e.d
    logic = "QF_NIA" if kind is SemiringKind.NATURAL else "QF_LIA"
    e.out(f"(set-logic {logic})")
    e.out("(set-option :produce-models true)")
    for s in symbols_of(srs):
        for i in range(d):
            for j in range(d):
                v = _var(s, i, j)
                e.out(f"(declare-fun {v} () Int)")
                e.out(f"(assert (and (>= {v} 0) (<= {v} {cfg.bound})))")
                if e.flags:
                    f = _flag(s, i, j)
                    e.out(f"(declare-fun {f} () Bool)")
                    e.out(f"(assert (=> {f} (= {v} 0)))")
        if kind is SemiringKind.NATURAL:
            e.out(f"(assert (>= {_var(s, 0, 0)} 1))")
        elif e.flags:
            e.out(f"(assert (not {_flag(s, 0, 0)}))")
    cands = candidate_rules(srs)
    stricts = []
    for k, r in enumerate(srs.rules):
        L, R = e.word(r.lhs), e.word(r.rhs)
        for i in range(d):
            for j in range(d):
                e.out(f"(assert {e.entry_ge(L[i][j], R[i][j], False)})")
        if k in cands:
            if kind is SemiringKind.NATURAL:
                stricts.append(f"(> {L[0][0][0]} {R[0][0][0]})")
            else:
                parts = [e.entry_ge(L[i][j], R[i][j], True) for i in range(d) for j in range(d)]
                stricts.append("(and " + " ".join(parts) + ")")
    e.out("(assert (or false " + " ".join(stricts) + "))")
    e.out("(check-sat)")
    e.out("(get-model)")
    e.out("(exit)")
    return "\n".join(e.lines) + "\n"


def candidate_rules(srs):
    """Rules whose strict decrease counts as progress: the strict rules (all rules when not relative)."""
    return set(srs.strict_indices)


# s-expressions

_TOKEN = re.compile(r"\(|\)|\"[^\"]*\"|[^\s()]+")


def parse_sexprs(text):
    stack = [[]]
    for tok in _TOKEN.findall(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise SolverError("unbalanced parenthesis in solver output")
            top = stack.pop()
            stack[-1].append(top)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise SolverError("unbalanced parenthesis in solver output")
    return stack[0]


def _value(x):
    if isinstance(x, list):
        if len(x) == 2 and x[0] == "-":
            return -_value(x[1])
        raise SolverError(f"unexpected value {x!r}")
    if x in ("true", "false"):
        return x == "true"
    return int(x)


def parse_solver_output(text):
    """(status, assignment dict) from 'sat/unsat/unknown' followed by a get-model response."""
    items = parse_sexprs(text)
    status = None
    model = {}
    for it in items:
        if isinstance(it, str) and it in ("sat", "unsat", "unknown"):
            status = status or it
        elif isinstance(it, list):
            defs = it[1:] if it and it[0] == "model" else it
            for df in defs:
                if isinstance(df, list) and len(df) == 5 and df[0] == "define-fun":
                    model[df[1]] = _value(df[4])
    if status is None:
        raise SolverError("solver printed no sat/unsat/unknown", text[-2000:])
    return status, model


def decode_model(model, srs, cfg) -> Interpretation:
    kind = SemiringKind(cfg.kind)
    d = cfg.dim
    flags = cfg.allow_infinity and kind is not SemiringKind.NATURAL
    inf = INF if kind is SemiringKind.TROPICAL else NEG_INF
    mats = {}
    for s in symbols_of(srs):
        rows = []
        for i in range(d):
            row = []
            for j in range(d):
                if flags and model.get(_flag(s, i, j), False):
                    row.append(inf)
                else:
                    row.append(int(model.get(_var(s, i, j), 0)))
            rows.append(row)
        mats[s] = rows
    return Interpretation(kind, d, mats)


def run_solver(solver: ExternalSolver, script: str, timeout: float):
    """Run the solver on the script; returns (status, model). Raises SolverError on process failure."""
    path = None
    try:
        with tempfile.NamedTemporaryFile("w", suffix=".smt2", delete=False) as fh:
            fh.write(script)
            path = fh.name
        argv, use_stdin = solver.argv(path)
        t0 = time.monotonic()
        try:
            proc = subprocess.run(argv, input=script if use_stdin else None, capture_output=True,
                                  text=True, timeout=max(timeout, 0.01))
        except subprocess.TimeoutExpired:
            return "timeout", {}
        except OSError as exc:
            raise SolverError(f"cannot run solver: {exc}", str(exc)) from exc
        out = proc.stdout
        if not out.strip():
            raise SolverError(f"solver exited with code {proc.returncode} and no output",
                              proc.stderr[-2000:])
        status, model = parse_solver_output(out)
        if status == "unknown" and time.monotonic() - t0 >= timeout * 0.95:
            return "timeout", {}
        return status, model
    finally:
        if path:
            try:
                os.unlink(path)
            except OSError:
                pass
