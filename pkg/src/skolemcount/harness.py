"""Per-instance runs and the CSV benchmark harness."""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .counting import ExactCounter, ExternalCounter, HashCounter
from .estimator import LogCount, RunStats, baseline, brute_force_skolem_count, skolemfc
from .formula import FormatError, load_spec
from .limits import Budget, ResourceLimitExceeded
from .sampling import ExactSampler, ExternalSampler, HashSampler

CSV_COLUMNS = [
    "instance", "mode", "status", "estimate_ln", "estimate_log2", "t",
    "sat_calls", "count_calls", "sample_calls", "wall_time_s", "seed",
]
INSTANCE_SUFFIXES = (".qdimacs", ".cnf", ".dimacs")

EXIT_OK, EXIT_ERROR, EXIT_ABORT, EXIT_LIMIT = 0, 1, 2, 3


@dataclass
class RunRecord:
    instance: str
    mode: str
    epsilon: float | None
    delta: float | None
    seed: int | None
    status: str  # ok | abort | limit | error
    log_count: LogCount | None = None
    stats: RunStats = field(default_factory=RunStats)
    message: str = ""

    @property
    def exit_code(self) -> int:
        return {"ok": EXIT_OK, "abort": EXIT_ABORT, "limit": EXIT_LIMIT}.get(self.status, EXIT_ERROR)

    def csv_row(self) -> dict:
        lc = self.log_count
        return {
            "instance": self.instance,
            "mode": self.mode,
            "status": self.status,
            "estimate_ln": "" if lc is None else repr(lc.ln),
            "estimate_log2": "" if lc is None else repr(lc.log2),
            "t": self.stats.t,
            "sat_calls": self.stats.sat_calls,
            "count_calls": self.stats.count_calls,
            "sample_calls": self.stats.sample_calls,
            "wall_time_s": f"{self.stats.wall_time:.3f}",
            "seed": "" if self.seed is None else self.seed,
        }


def make_oracles(oracle: str, sampler: str | None = None):
    """Build (counter, sampler) from ``exact``, ``hash`` or ``external:<cmd>`` names."""
    if oracle == "exact":
        counter = ExactCounter()
    elif oracle == "hash":
        counter = HashCounter()
    elif oracle.startswith("external:"):
        counter = ExternalCounter(oracle.split(":", 1)[1])
    else:
        raise ValueError(f"unknown oracle {oracle!r}")
    if sampler is None:
        sampler = "hash" if oracle == "hash" else "exact"
    if sampler == "exact":
        smp = ExactSampler(counter if isinstance(counter, ExactCounter) else None)
    elif sampler == "hash":
        smp = HashSampler()
    elif sampler.startswith("external:"):
        smp = ExternalSampler(sampler.split(":", 1)[1])
    else:
        raise ValueError(f"unknown sampler {sampler!r}")
    return counter, smp


@dataclass(frozen=True)
class RunConfig:
    """Parameters shared by every run of a batch."""

    epsilon: float = 0.8
    delta: float = 0.4
    seed: int = 1
    oracle: str = "exact"
    sampler: str | None = None
    max_sat_calls: int | None = None
    timeout_s: float | None = None
    max_models: int | None = None


def run_instance(path: str | os.PathLike, mode: str = "skolemfc", config: RunConfig | None = None) -> RunRecord:
    cfg = config or RunConfig()
    name = Path(path).name
    approx = mode == "skolemfc"
    rec = RunRecord(name, mode, cfg.epsilon if approx else None, cfg.delta if approx else None,
                    cfg.seed if approx else None, "error")
    try:
        spec = load_spec(path)
    except (OSError, FormatError) as exc:
        rec.message = str(exc)
        return rec
    budget = Budget(cfg.max_sat_calls, cfg.timeout_s)
    try:
        if mode == "skolemfc":
            counter, smp = make_oracles(cfg.oracle, cfg.sampler)
            out = skolemfc(spec, cfg.epsilon, cfg.delta, counter, smp, cfg.seed, budget)
        elif mode == "baseline":
            out = baseline(spec, cfg.max_models, budget)
        elif mode == "brute":
            total = brute_force_skolem_count(spec)
            rec.status, rec.log_count = "ok", LogCount(math.log(total), math.e, total)
            return rec
        else:
            raise ValueError(f"unknown mode {mode!r}")
    except ResourceLimitExceeded as exc:
        rec.status, rec.message = "limit", str(exc)
        rec.stats = exc.stats or RunStats(sat_calls=exc.sat_calls)
        return rec
    except (ValueError, RuntimeError, OSError) as exc:
        rec.message = str(exc)
        return rec
    rec.status, rec.log_count, rec.stats = out.status, out.log_count, out.stats
    if out.status == "abort":
        rec.message = out.stats.aborted or ""
    return rec


def list_instances(directory: str | os.PathLike) -> list[Path]:
    return sorted(p for p in Path(directory).iterdir() if p.suffix in INSTANCE_SUFFIXES and p.is_file())


def _run_job(args: tuple) -> RunRecord:
    return run_instance(*args)


def bench(directory: str | os.PathLike, modes: list[str], config: RunConfig | None = None,
          jobs: int = 1) -> list[RunRecord]:
    """Run every instance in ``directory`` under each mode; records come back in instance order."""
    tasks = [(p, mode, config) for p in list_instances(directory) for mode in modes]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_job, tasks))
    return [_run_job(t) for t in tasks]


def records_to_csv(records: list[RunRecord]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\r\n")
    writer.writeheader()
    for rec in records:
        writer.writerow(rec.csv_row())
    return buf.getvalue()
