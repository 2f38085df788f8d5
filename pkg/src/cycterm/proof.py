"""Proof objects, their JSON form, and the independent certificate checker.

Rule indices inside a step refer to the problem that step receives, i.e. the residual
left by the previous steps.  Symbols are stored by name.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .matrices import INF, NEG_INF, Interpretation, InterpretationError, SemiringKind, check_removal
from .nonterm import LoopKind, LoopWitness, verify_witness
from .search import check_counting
from .tpdb import parse_tpdb, print_tpdb
from .transform import TransformKind, transform, transform_rel


class Verdict(str, Enum):
    YES = "YES"
    NO = "NO"
    MAYBE = "MAYBE"


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def problem_digest(srs) -> str:
    return digest(print_tpdb(srs))


@dataclass(frozen=True)
class CountingRemoval:
    weights: dict  # name -> int
    removed: tuple


@dataclass(frozen=True)
class MatrixRemoval:
    kind: SemiringKind
    dim: int
    matrices: dict  # name -> rows
    removed: tuple


@dataclass(frozen=True)
class TransformDelegate:
    kind: str  # a TransformKind value, or "direct" for the untransformed input
    relative: bool
    command: str
    verdict: Verdict
    output_digest: str
    transformed_digest: str


@dataclass(frozen=True)
class Loop:
    witness: LoopWitness


@dataclass(frozen=True)
class EmptyStrictSet:
    pass


Step = Union[CountingRemoval, MatrixRemoval, TransformDelegate, Loop, EmptyStrictSet]


@dataclass
class ProofObject:
    problem: str  # TPDB text of the input
    digest: str
    verdict: Verdict
    steps: list = field(default_factory=list)


# JSON

def _enc_val(x):
    if x == INF:
        return "inf"
    if x == NEG_INF:
        return "-inf"
    return x


def _dec_val(x):
    if x == "inf":
        return INF
    if x == "-inf":
        return NEG_INF
    if isinstance(x, int) and not isinstance(x, bool):
        return x
    raise ValueError(f"bad matrix entry {x!r}")


def _words(alpha, w):
    return [alpha.name(s) for s in w]


def step_to_dict(step, alpha):
    if isinstance(step, CountingRemoval):
        return {"type": "counting", "weights": step.weights, "removed": list(step.removed)}
    if isinstance(step, MatrixRemoval):
        return {"type": "matrix", "semiring": step.kind.value, "dim": step.dim,
                "matrices": {k: [[_enc_val(x) for x in row] for row in m] for k, m in step.matrices.items()},
                "removed": list(step.removed)}
    if isinstance(step, TransformDelegate):
        return {"type": "delegate", "transformation": step.kind, "relative": step.relative,
                "command": step.command, "verdict": step.verdict.value,
                "output_digest": step.output_digest, "transformed_digest": step.transformed_digest}
    if isinstance(step, Loop):
        w = step.witness
        return {"type": "loop", "kind": w.kind.value, "start": _words(alpha, w.start),
                "steps": [{"rule": i, "position": p, "word": _words(alpha, r)} for i, p, r in w.steps],
                "context": None if w.context is None else [_words(alpha, c) for c in w.context],
                "strict_count": w.strict_count}
    if isinstance(step, EmptyStrictSet):
        return {"type": "empty_strict_set"}
    raise TypeError(step)


def step_from_dict(d, alpha):
    t = d["type"]
    if t == "counting":
        return CountingRemoval({k: int(v) for k, v in d["weights"].items()}, tuple(d["removed"]))
    if t == "matrix":
        mats = {k: tuple(tuple(_dec_val(x) for x in row) for row in m) for k, m in d["matrices"].items()}
        return MatrixRemoval(SemiringKind(d["semiring"]), int(d["dim"]), mats, tuple(d["removed"]))
    if t == "delegate":
        return TransformDelegate(d["transformation"], bool(d["relative"]), d["command"],
                                 Verdict(d["verdict"]), d["output_digest"], d["transformed_digest"])
    if t == "loop":
        word = alpha.word
        ctx = d.get("context")
        w = LoopWitness(LoopKind(d["kind"]), word(d["start"]),
                        tuple((int(s["rule"]), int(s["position"]), word(s["word"])) for s in d["steps"]),
                        None if ctx is None else tuple(word(c) for c in ctx), int(d["strict_count"]))
        return Loop(w)
    if t == "empty_strict_set":
        return EmptyStrictSet()
    raise ValueError(f"unknown step type {t!r}")


def proof_to_json(proof: ProofObject) -> str:
    alpha = parse_tpdb(proof.problem).srs.alphabet
    return json.dumps({"format": "cycle-termination-proof/1", "problem": proof.problem,
                       "digest": proof.digest, "verdict": proof.verdict.value,
                       "steps": [step_to_dict(s, alpha) for s in proof.steps]}, indent=2)


def proof_from_json(text: str) -> ProofObject:
    d = json.loads(text)
    alpha = parse_tpdb(d["problem"]).srs.alphabet
    return ProofObject(d["problem"], d["digest"], Verdict(d["verdict"]),
                       [step_from_dict(s, alpha) for s in d["steps"]])


def print_proof(proof: ProofObject, structured: bool = False) -> str:
    if structured:
        return proof_to_json(proof)
    cur = parse_tpdb(proof.problem).srs
    out = [proof.verdict.value]
    for k, st in enumerate(proof.steps):
        alpha = cur.alphabet
        if isinstance(st, (CountingRemoval, MatrixRemoval)):
            names = ", ".join(cur.show_rule(i) for i in st.removed)
            if isinstance(st, CountingRemoval):
                ws = " ".join(f"{n}={w}" for n, w in st.weights.items())
                out.append(f"{k + 1}. counting weights {ws} remove: {names}")
            else:
                out.append(f"{k + 1}. {st.kind.value} matrices of dimension {st.dim} remove: {names}")
                for n, m in st.matrices.items():
                    rows = "; ".join(" ".join(_show_val(x) for x in row) for row in m)
                    out.append(f"     <{n}> = [{rows}]")
            cur = cur.without(st.removed)
        elif isinstance(st, Loop):
            w = st.witness
            start = alpha.show(w.start)
            start = f"[{start}]" if w.kind is LoopKind.CYCLE else start
            out.append(f"{k + 1}. {w.kind.value.replace('_', ' ')} from {start}:")
            for i, p, r in w.steps:
                out.append(f"     {cur.show_rule(i)} at {p}: {alpha.show(r)}")
            if w.context is not None:
                out.append(f"     end = ({alpha.show(w.context[0])}) start ({alpha.show(w.context[1])})")
        elif isinstance(st, TransformDelegate):
            rel = " (relative)" if st.relative else ""
            out.append(f"{k + 1}. {st.kind}{rel} handed to `{st.command}`, which answered {st.verdict.value}")
        else:
            out.append(f"{k + 1}. no strict rules left")
    return "\n".join(out) + "\n"


def _show_val(x):
    return "inf" if x == INF else "-inf" if x == NEG_INF else str(x)


# checking

@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    bad_step: Optional[int] = None
    reason: str = ""
    trusted_external: bool = False

    def __bool__(self):
        return self.ok


def transformed_text(kind: str, srs, relative: bool) -> str:
    if kind == "direct":
        return print_tpdb(srs)
    out = (transform_rel if relative else transform)(TransformKind(kind), srs)
    return print_tpdb(out.srs)


def _removal_ok(report, removed):
    return not report.failed and removed and set(removed) <= report.strict


def verify_certificate(srs, proof: ProofObject) -> CertificateCheck:
    """Re-check every step against the premises of the result it relies on."""
    if proof.digest != problem_digest(srs) or digest(proof.problem) != digest(print_tpdb(srs)):
        return CertificateCheck(False, None, "proof is for a different problem")
    cur = srs
    external = False
    n = len(proof.steps)
    if n == 0:
        return CertificateCheck(False, None, "empty proof")
    for k, st in enumerate(proof.steps):
        last = k == n - 1
        alpha = cur.alphabet
        if isinstance(st, CountingRemoval):
            if not set(st.weights) <= set(alpha.names) or any(w < 0 for w in st.weights.values()):
                return CertificateCheck(False, k, "weights use unknown symbols or negative values")
            rep = check_counting({alpha.id(a): w for a, w in st.weights.items()}, cur)
            if not _removal_ok(rep, st.removed):
                return CertificateCheck(False, k, "counting weights do not justify the removal")
            cur = cur.without(st.removed)
        elif isinstance(st, MatrixRemoval):
            try:
                interp = Interpretation(st.kind, st.dim, {alpha.id(a): m for a, m in st.matrices.items()})
                rep = check_removal(interp, cur)
            except (InterpretationError, KeyError, ValueError, TypeError) as exc:
                return CertificateCheck(False, k, f"bad interpretation: {exc}")
            if not _removal_ok(rep, st.removed):
                return CertificateCheck(False, k, "interpretation does not justify the removal")
            cur = cur.without(st.removed)
        elif isinstance(st, EmptyStrictSet):
            if cur.strict_indices:
                return CertificateCheck(False, k, "strict rules remain")
            if not last or proof.verdict is not Verdict.YES:
                return CertificateCheck(False, k, "empty strict set must end a YES proof")
        elif isinstance(st, Loop):
            res = verify_witness(cur, st.witness)
            if not res:
                return CertificateCheck(False, k, f"loop step {res.bad_index}: {res.reason}")
            if not last or proof.verdict is not Verdict.NO:
                return CertificateCheck(False, k, "a loop must end a NO proof")
        elif isinstance(st, TransformDelegate):
            try:
                text = transformed_text(st.kind, cur, st.relative)
            except ValueError as exc:
                return CertificateCheck(False, k, f"transformation not applicable: {exc}")
            if digest(text) != st.transformed_digest:
                return CertificateCheck(False, k, "transformed system does not match its digest")
            if st.relative != cur.is_relative and st.kind != "direct":
                return CertificateCheck(False, k, "relative flag does not match the problem")
            if st.verdict is Verdict.MAYBE or st.verdict is not proof.verdict or not last:
                return CertificateCheck(False, k, "external verdict does not close the proof")
            if st.kind == "direct" and st.verdict is not Verdict.NO:
                return CertificateCheck(False, k, "string termination of the input proves nothing")
            external = True
        else:
            return CertificateCheck(False, k, f"unknown step {st!r}")
    if not isinstance(proof.steps[-1], (EmptyStrictSet, Loop, TransformDelegate)):
        return CertificateCheck(False, n - 1, "proof does not end in a terminal step")
    return CertificateCheck(True, trusted_external=external)
