"""Command line: prove, disprove-only, transform, verify, bench.

Exit codes: 0 completed run, 1 usage error, 2 internal error.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from .bench import run_bench, summary_table, to_csv
from .matrices import SemiringKind
from .nonterm import NontermConfig, find_cycle_loop, find_string_loop
from .proof import (Loop, ProofObject, Verdict, print_proof, problem_digest, proof_from_json,
                    verify_certificate)
from .prover import ExternalProverClient, ProverConfig, Strategy, prove
from .search import SearchConfig, default_backend, default_schedule
from .smt import ExternalSolver
from .tpdb import TpdbError, print_tpdb, read_tpdb
from .transform import TransformKind, transform, transform_rel


class UsageError(Exception):
    pass


def parse_schedule(text, backend, budget):
    """'tropical:1-3,natural:2-3' style list; bounds 1..3 per entry, or kind:dims:bounds."""
    out = []
    for part in text.split(","):
        fields = part.strip().split(":")
        if len(fields) not in (2, 3):
            raise UsageError(f"bad schedule entry {part!r}")
        kind = SemiringKind(fields[0])
        dims = _range(fields[1])
        bounds = _range(fields[2]) if len(fields) == 3 else range(1, 4)
        for b in bounds:
            for d in dims:
                out.append(SearchConfig(kind, d, b, True, budget, backend))
    return out


def _range(text):
    lo, _, hi = text.partition("-")
    return range(int(lo), int(hi or lo) + 1)


def _config(args) -> ProverConfig:
    try:
        return _make_config(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _make_config(args) -> ProverConfig:
    backend = default_backend() if args.backend == "auto" else args.backend
    if args.smt_solver:
        backend = ExternalSolver(args.smt_solver)
    if args.schedule:
        schedule = parse_schedule(args.schedule, backend, args.config_budget)
    else:
        schedule = default_schedule(backend, args.max_dim, args.max_bound, args.config_budget)
    schedule = [c for c in schedule if c.dim <= args.max_dim and c.bound <= args.max_bound]
    strategy = Strategy.parse(args.strategy) if args.strategy else Strategy()
    client = ExternalProverClient(args.prover) if args.prover else None
    return ProverConfig(strategy, tuple(schedule), NontermConfig(), client)


def _common(p):
    p.add_argument("--timeout", type=float, default=60.0, help="total seconds per problem")
    p.add_argument("--strategy", help="phase fractions, e.g. nonterm=0.1,matrix=0.39,direct=0.09,split=0.42")
    p.add_argument("--schedule", help="semiring schedule, e.g. tropical:1-3,natural:2-3,arctic:2-3")
    p.add_argument("--max-dim", type=int, default=3)
    p.add_argument("--max-bound", type=int, default=3)
    p.add_argument("--config-budget", type=float, default=3.0, help="seconds per search configuration")
    p.add_argument("--backend", choices=["auto", "builtin", "cpsat"], default="auto")
    p.add_argument("--smt-solver", help="SMT-LIB 2 solver command, e.g. 'z3 -smt2 {file}'")
    p.add_argument("--prover", help="external string prover command with {file} and {timeout}")
    p.add_argument("--sequential", action="store_true",
                   help="deterministic sequential mode (the only mode; accepted for scripts)")


def build_parser():
    ap = argparse.ArgumentParser(prog="cycterm", description="Cycle termination prover")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)
    p = sub.add_parser("prove", help="prove or disprove cycle termination")
    p.add_argument("file")
    _common(p)
    p.add_argument("--proof", help="write the structured proof to this file")
    p.add_argument("--json", action="store_true", help="print the structured proof")
    p = sub.add_parser("disprove-only", help="search for a loop only")
    p.add_argument("file")
    p.add_argument("--timeout", type=float, default=10.0)
    p = sub.add_parser("transform", help="print a transformed system")
    p.add_argument("file")
    p.add_argument("--kind", choices=[k.value for k in TransformKind], required=True)
    p = sub.add_parser("verify", help="check a structured proof")
    p.add_argument("file")
    p.add_argument("proof")
    p = sub.add_parser("bench", help="run every .srs file of a directory")
    p.add_argument("dir")
    _common(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--csv", help="write the CSV here instead of standard output")
    p.add_argument("--proofs", help="directory for proof files")
    return ap


def _load(path):
    try:
        return read_tpdb(path)
    except (OSError, TpdbError) as exc:
        raise UsageError(f"{path}: {exc}") from exc


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        if args.cmd == "prove":
            srs = _load(args.file).srs
            res = prove(srs, args.timeout, _config(args))
            if res.proof is None:
                out.write(Verdict.MAYBE.value + "\n")
            else:
                out.write(print_proof(res.proof, structured=args.json))
                if args.proof:
                    Path(args.proof).write_text(print_proof(res.proof, structured=True))
            for d in res.diagnostics:
                print(d, file=sys.stderr)
        elif args.cmd == "disprove-only":
            srs = _load(args.file).srs
            end = time.monotonic() + args.timeout
            cfg = NontermConfig(time_budget=args.timeout)
            w = find_cycle_loop(srs, cfg, deadline=end - args.timeout / 2) or \
                find_string_loop(srs, cfg, deadline=end)
            if w is None:
                out.write("MAYBE\n")
            else:
                proof = ProofObject(print_tpdb(srs), problem_digest(srs), Verdict.NO, [Loop(w)])
                out.write(print_proof(proof))
        elif args.cmd == "transform":
            srs = _load(args.file).srs
            kind = TransformKind(args.kind)
            try:
                res = transform_rel(kind, srs) if srs.is_relative else transform(kind, srs)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
            out.write(print_tpdb(res.srs))
        elif args.cmd == "verify":
            srs = _load(args.file).srs
            try:
                proof = proof_from_json(Path(args.proof).read_text())
            except (OSError, ValueError, KeyError, TypeError) as exc:
                raise UsageError(f"{args.proof}: unreadable proof: {exc}") from exc
            check = verify_certificate(srs, proof)
            if check:
                note = " (relies on an external prover)" if check.trusted_external else ""
                out.write(f"VALID {proof.verdict.value}{note}\n")
            else:
                out.write(f"INVALID at step {check.bad_step}: {check.reason}\n")
        elif args.cmd == "bench":
            if not Path(args.dir).is_dir():
                raise UsageError(f"{args.dir} is not a directory")
            results = run_bench(args.dir, args.timeout, args.jobs, _config(args), args.proofs)
            text = to_csv(results)
            if args.csv:
                Path(args.csv).write_text(text)
            else:
                out.write(text)
            sys.stderr.write(summary_table(results))
        return 0
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal error
        logging.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
