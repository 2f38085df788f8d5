"""Benchmark harness: every .srs file of a directory, a bounded pool of worker processes,
a hard wall-clock limit per problem, CSV rows sorted by file name."""
from __future__ import annotations

import csv
import io
import multiprocessing as mp
import queue as queue_mod
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .proof import Verdict, proof_to_json
from .prover import ProverConfig, prove
from .tpdb import read_tpdb

ERROR = "ERROR"
GRACE = 5.0  # seconds a worker may overrun its budget before it is killed
STARTUP = 120.0  # seconds a worker may take to import before it is killed


@dataclass
class BenchResult:
    problem: str
    verdict: str  # YES / NO / MAYBE / ERROR
    time_ms: int
    technique: str = ""
    proof_path: Optional[str] = None
    expected: Optional[str] = None
    detail: str = ""


def _worker(path, timeout, config, proof_dir, queue):
    queue.put((path, None))  # imports done; the wall clock starts now
    t0 = time.monotonic()
    try:
        pf = read_tpdb(path)
        res = prove(pf.srs, timeout, config)
        proof_path = None
        if res.proof is not None and proof_dir is not None:
            proof_path = str(Path(proof_dir) / (Path(path).stem + ".json"))
            Path(proof_path).write_text(proof_to_json(res.proof))
        queue.put((path, (res.verdict.value, res.technique, proof_path, "; ".join(res.diagnostics),
                          time.monotonic() - t0)))
    except Exception as exc:  # reported as an error row, the run continues
        queue.put((path, (ERROR, "", None, f"{type(exc).__name__}: {exc}", time.monotonic() - t0)))


def _expected(path):
    try:
        return read_tpdb(path).expected()
    except Exception:
        return None


def run_bench(directory, timeout: float = 60.0, parallelism: int = 1,
              config: ProverConfig = ProverConfig(), proof_dir=None, grace: float = GRACE):
    files = sorted(str(p) for p in Path(directory).glob("*.srs"))
    if proof_dir is not None:
        Path(proof_dir).mkdir(parents=True, exist_ok=True)
    ctx = mp.get_context("spawn")
    queue = ctx.Queue()
    pending = list(files)
    running = {}  # path -> (process, start, started)
    done = {}
    while pending or running:
        while pending and len(running) < max(1, parallelism):
            path = pending.pop(0)
            p = ctx.Process(target=_worker, args=(path, timeout, config, proof_dir, queue), daemon=True)
            p.start()
            running[path] = (p, time.monotonic(), False)
        msgs = []
        try:
            msgs.append(queue.get(timeout=0.05))
            while True:
                msgs.append(queue.get_nowait())
        except queue_mod.Empty:
            pass
        for path, payload in msgs:
            if path not in running:
                continue
            p, start, _ = running[path]
            if payload is None:
                running[path] = (p, time.monotonic(), True)
                continue
            running.pop(path)
            p.join()
            verdict, tech, proof_path, detail, secs = payload
            done[path] = BenchResult(Path(path).name, verdict, int(round(secs * 1000)), tech, proof_path,
                                     _expected(path), detail)
        now = time.monotonic()
        for path, (p, start, started) in list(running.items()):
            over = now - start > (timeout + grace if started else STARTUP)
            if over or (not p.is_alive() and p.exitcode not in (0, None)):
                p.kill()
                p.join()
                running.pop(path)
                verdict = Verdict.MAYBE.value if over and started else ERROR
                detail = ("killed at the time limit" if started else "worker did not start") if over \
                    else f"worker exited with {p.exitcode}"
                done[path] = BenchResult(Path(path).name, verdict, int(round((now - start) * 1000)),
                                         "", None, _expected(path), detail)
    return [done[f] for f in files]


def summary(results):
    counts = {"YES": 0, "NO": 0, "MAYBE": 0, ERROR: 0}
    for r in results:
        counts[r.verdict] += 1
    return counts


def to_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["problem", "verdict", "time_ms", "technique"])
    for r in results:
        w.writerow([r.problem, r.verdict, r.time_ms, r.technique])
    return buf.getvalue()


def summary_table(results) -> str:
    c = summary(results)
    lines = ["verdict  count", *(f"{k:<8} {v}" for k, v in c.items()), f"{'total':<8} {len(results)}"]
    return "\n".join(lines) + "\n"
