"""The proving pipeline: phases with time fractions, external prover delegation, and
certificate-checked verdicts."""
from __future__ import annotations

import os
import shlex
import signal
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from typing import Optional

from .nonterm import LoopKind, NontermConfig, find_cycle_loop, find_string_loop
from .proof import (CountingRemoval, EmptyStrictSet, Loop, MatrixRemoval, ProofObject,
                    TransformDelegate, Verdict, digest, print_tpdb, problem_digest,
                    transformed_text, verify_certificate)
from .search import default_schedule, removal_loop

PHASES = ("matrix", "nonterm", "direct", "split", "shift", "rotate")
EXTERNAL_PHASES = ("direct", "split", "shift", "rotate")


@dataclass(frozen=True)
class Strategy:
    """Ordered (phase, fraction) pairs.  Phases that need an external prover are dropped
    when none is configured; each phase gets its share of the time still left."""
    phases: tuple = (("nonterm", 0.10), ("matrix", 0.39), ("direct", 0.09), ("split", 0.42))

    def __post_init__(self):
        names = [p for p, _ in self.phases]
        if any(p not in PHASES for p in names) or len(set(names)) != len(names):
            raise ValueError(f"phases must be distinct names from {PHASES}")
        if any(f <= 0 for _, f in self.phases) or abs(sum(f for _, f in self.phases) - 1) > 1e-9:
            raise ValueError("phase fractions must be positive and sum to 1")

    @classmethod
    def parse(cls, text: str) -> "Strategy":
        """From 'nonterm=0.1,matrix=0.39,...'."""
        out = []
        for part in text.split(","):
            name, _, frac = part.partition("=")
            out.append((name.strip(), float(frac)))
        return cls(tuple(out))


@dataclass(frozen=True)
class ExternalProverClient:
    """Command template with {file} and {timeout} placeholders; without {file} the problem
    is written to standard input."""
    command: str

    def run(self, tpdb_text: str, timeout: float):
        """(verdict, stdout, diagnostic)."""
        path = None
        try:
            with tempfile.NamedTemporaryFile("w", suffix=".srs", delete=False) as fh:
                fh.write(tpdb_text)
                path = fh.name
            secs = max(1, int(timeout))
            parts = [p.replace("{file}", path).replace("{timeout}", str(secs))
                     for p in shlex.split(self.command)]
            stdin = None if "{file}" in self.command else tpdb_text
            try:
                proc = subprocess.Popen(parts, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                        stderr=subprocess.PIPE, text=True, start_new_session=True)
            except OSError as exc:
                return Verdict.MAYBE, "", f"cannot start external prover: {exc}"
            try:
                out, err = proc.communicate(stdin, timeout=max(timeout, 0.01))
            except subprocess.TimeoutExpired:
                _kill(proc)
                return Verdict.MAYBE, "", "external prover timed out"
            first = next((ln.strip() for ln in out.splitlines() if ln.strip()), "")
            if first in ("YES", "NO", "MAYBE"):
                return Verdict(first), out, ""
            return Verdict.MAYBE, out, f"unexpected first output line {first[:80]!r} (exit {proc.returncode})"
        finally:
            if path:
                try:
                    os.unlink(path)
                except OSError:
                    pass


def _kill(proc):
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except OSError:
        proc.kill()
    proc.communicate()


@dataclass
class ProveResult:
    verdict: Verdict
    proof: Optional[ProofObject] = None
    technique: str = ""
    diagnostics: list = field(default_factory=list)


@dataclass(frozen=True)
class ProverConfig:
    strategy: Strategy = Strategy()
    schedule: Optional[tuple] = None  # of SearchConfig; None = default schedule
    nonterm: NontermConfig = NontermConfig()
    client: Optional[ExternalProverClient] = None
    counting_bound: int = 3


def delegate(kind: str, srs, client: ExternalProverClient, timeout: float):
    """Run the external prover on transform(kind) of the problem (relative variant when the
    problem has weak rules).  Returns (verdict, step or None, diagnostic)."""
    relative = srs.is_relative
    try:
        text = transformed_text(kind, srs, relative)
    except ValueError as exc:
        return Verdict.MAYBE, None, f"{kind}: {exc}"
    verdict, out, diag = client.run(text, timeout)
    if kind == "direct" and verdict is Verdict.YES:
        # string termination of the input says nothing about cycle termination
        verdict = Verdict.MAYBE
    step = TransformDelegate(kind, relative, client.command, verdict, digest(out), digest(text))
    return verdict, step, diag


def _matrix_steps(outcome, srs):
    steps = []
    alpha = srs.alphabet
    for st in outcome.steps:
        if st.technique == "counting":
            steps.append(CountingRemoval({alpha.name(s): w for s, w in sorted(st.weights.items())},
                                         st.removed))
        else:
            I = st.interpretation
            steps.append(MatrixRemoval(I.kind, I.dim, {alpha.name(s): m for s, m in sorted(I.mats.items())},
                                       st.removed))
    return steps


def prove(srs, total_budget: float = 60.0, config: ProverConfig = ProverConfig()) -> ProveResult:
    t0 = time.monotonic()
    end = t0 + total_budget
    phases = [(p, f) for p, f in config.strategy.phases
              if p not in EXTERNAL_PHASES or config.client is not None]
    diags = []
    prefix = []  # removal steps already taken
    cur = srs
    problem = print_tpdb(srs)

    def finish(verdict, steps, technique):
        if time.monotonic() > end:
            diags.append(f"{technique}: result arrived after the time budget, discarded")
            return None
        proof = ProofObject(problem, problem_digest(srs), verdict, prefix + steps)
        check = verify_certificate(srs, proof)
        if not check:
            diags.append(f"{technique}: certificate rejected at step {check.bad_step}: {check.reason}")
            return None
        return ProveResult(verdict, proof, technique, diags)

    if not srs.strict_indices:
        return finish(Verdict.YES, [EmptyStrictSet()], "empty") or ProveResult(Verdict.MAYBE, None, "", diags)

    remaining = sum(f for _, f in phases)
    for name, frac in phases:
        now = time.monotonic()
        if now >= end:
            break
        budget = (end - now) * frac / remaining
        remaining -= frac
        deadline = now + budget
        if name == "nonterm":
            cfg = config.nonterm
            half = now + budget / 2
            w = find_cycle_loop(cur, cfg, deadline=half) or find_string_loop(cur, cfg, deadline=deadline)
            if w is not None:
                tech = "loop:cycle" if w.kind is LoopKind.CYCLE else "loop:string"
                got = finish(Verdict.NO, [Loop(w)], tech)
                if got:
                    return got
        elif name == "matrix":
            schedule = list(config.schedule) if config.schedule is not None else default_schedule()
            outcome = removal_loop(cur, schedule, counting_bound=config.counting_bound, deadline=deadline)
            diags.extend(outcome.diagnostics)
            steps = _matrix_steps(outcome, cur)
            if outcome.proved:
                got = finish(Verdict.YES, steps + [EmptyStrictSet()], "removal")
                if got:
                    return got
            else:
                # later phases continue on the residual; the removals stay in the proof
                prefix.extend(steps)
                cur = outcome.residual
        else:
            verdict, step, diag = delegate(name, cur, config.client, deadline - time.monotonic())
            if diag:
                diags.append(f"{name}: {diag}")
            if verdict is not Verdict.MAYBE and step is not None:
                got = finish(verdict, [step], f"delegate:{name}")
                if got:
                    return got
    return ProveResult(Verdict.MAYBE, None, "", diags)
