"""
Seeded Monte Carlo experiments over the evolving process.

Trial k grows its own graph from trial_seed(master_seed, k) and samples its
root tuple from an independent stream keyed by (master_seed, k, 1). Trials
fan out to a process pool in chunks and are merged by trial index, so the
report does not depend on the number of workers.
"""
import csv
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import repeat
from pathlib import Path
from typing import Callable, Dict, Iterator, List, NamedTuple, Optional, Sequence, TextIO, Tuple

import numpy as np

from sparse_evolve.core.config import settings
from sparse_evolve.core.exceptions import PreconditionError
from sparse_evolve.engine.calculus import classify, rooted_automorphism_count
from sparse_evolve.engine.census import (
    check_soft_limit,
    count_embeddings,
    irregular_vertices,
    is_t_generic,
    iter_embeddings,
)
from sparse_evolve.engine.evolve import EvolvingGraph, ProcessConfig, run_to, trial_seed
from sparse_evolve.engine.expectation import asymptotic_exponent, clique_probability
from sparse_evolve.schemas.experiment import (
    CheckpointAggregate,
    ExperimentKind,
    ExperimentReport,
    ExperimentSpec,
    Verdict,
)

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["trial", "T", "count", "elapsed_ms"]


class TrialOutcome(NamedTuple):
    trial: int
    counts: Tuple[int, ...]
    new_counts: Tuple[int, ...]
    elapsed_ms: Tuple[int, ...]


@dataclass
class ExperimentResult:
    report: ExperimentReport
    outcomes: List[TrialOutcome]

    def rows(self) -> Iterator[Dict[str, int]]:
        checkpoints = _checkpoints(self.report.spec)
        for outcome in self.outcomes:
            for T, count, ms in zip(checkpoints, outcome.counts, outcome.elapsed_ms):
                yield {"trial": outcome.trial, "T": T, "count": count, "elapsed_ms": ms}


class _Stopwatch:
    """Wall-clock laps; always 0 unless RECORD_TIMINGS is on so CSV bytes stay reproducible."""

    def __init__(self):
        self._last = time.perf_counter()

    def lap(self) -> int:
        if not settings.RECORD_TIMINGS:
            return 0
        now = time.perf_counter()
        ms = int((now - self._last) * 1000)
        self._last = now
        return ms


def _checkpoints(spec: ExperimentSpec) -> List[int]:
    if spec.kind == ExperimentKind.CLIQUE:
        return [spec.clique_size]
    return list(spec.checkpoints)


def _grow(spec: ExperimentSpec, trial: int) -> EvolvingGraph:
    seed = trial_seed(spec.master_seed, trial)
    return run_to(ProcessConfig(alpha=spec.alpha, seed=seed), spec.horizon)


def _sample_roots(spec: ExperimentSpec, trial: int, root_size: int) -> Tuple[int, ...]:
    if root_size == 0:
        return ()
    rng = np.random.default_rng([spec.master_seed, trial, 1])
    picks = rng.choice(spec.tau0, size=root_size, replace=False) + 1
    return tuple(int(v) for v in picks)


def _old_vertices(spec: ExperimentSpec, roots: Sequence[int]) -> frozenset:
    return frozenset(range(1, spec.tau0 + 1)) - set(roots)


# trial functions stay at module level so the pool can pickle them
def _census_trial(spec: ExperimentSpec, trial: int) -> TrialOutcome:
    watch = _Stopwatch()
    g = _grow(spec, trial)
    ext = spec.extension
    roots = _sample_roots(spec, trial, ext.root_size)
    old = _old_vertices(spec, roots)
    counts, fresh, times = [], [], []
    for T in spec.checkpoints:
        gT = g.prefix(T)
        counts.append(count_embeddings(gT, ext, roots).embeddings)
        fresh.append(count_embeddings(gT, ext, roots, forbidden=old).embeddings)
        times.append(watch.lap())
    return TrialOutcome(trial, tuple(counts), tuple(fresh), tuple(times))


def _find_generic_copy(
    g: EvolvingGraph, spec: ExperimentSpec, roots: Tuple[int, ...]
) -> Tuple[bool, Optional[List[int]]]:
    witness = None
    for image in iter_embeddings(g, spec.extension, roots, cap=spec.candidate_cap):
        verdict = is_t_generic(g, roots, set(roots) | set(image), spec.t, spec.alpha, spec.allow_large)
        if verdict.is_generic:
            return True, None
        if witness is None:
            witness = verdict.witness
    return False, witness


def _genericity_trial(spec: ExperimentSpec, trial: int) -> TrialOutcome:
    watch = _Stopwatch()
    g = _grow(spec, trial)
    roots = _sample_roots(spec, trial, spec.extension.root_size)
    counts, times = [], []
    for T in spec.checkpoints:
        found, witness = _find_generic_copy(g.prefix(T), spec, roots)
        if not found:
            logger.info(f"trial {trial}: no {spec.t}-generic copy over {list(roots)} in G({T}); witness {witness}")
        counts.append(int(found))
        times.append(watch.lap())
    return TrialOutcome(trial, tuple(counts), tuple(counts), tuple(times))


def _irregular_trial(spec: ExperimentSpec, trial: int) -> TrialOutcome:
    watch = _Stopwatch()
    g = _grow(spec, trial)
    counts, fresh, times = [], [], []
    for T in spec.checkpoints:
        found = irregular_vertices(g.prefix(T), spec.r, spec.alpha, spec.allow_large)
        counts.append(len(found))
        fresh.append(sum(1 for v in found if v > spec.tau0))
        times.append(watch.lap())
    return TrialOutcome(trial, tuple(counts), tuple(fresh), tuple(times))


def _clique_trial(spec: ExperimentSpec, trial: int) -> TrialOutcome:
    watch = _Stopwatch()
    k = spec.clique_size
    hit = int(_grow(spec, trial).num_edges == k * (k - 1) // 2)
    return TrialOutcome(trial, (hit,), (hit,), (watch.lap(),))


_TRIALS: Dict[ExperimentKind, Callable[[ExperimentSpec, int], TrialOutcome]] = {
    ExperimentKind.SLOPE: _census_trial,
    ExperimentKind.SATURATION: _census_trial,
    ExperimentKind.GENERICITY: _genericity_trial,
    ExperimentKind.IRREGULAR: _irregular_trial,
    ExperimentKind.CLIQUE: _clique_trial,
}


def _run_chunk(spec: ExperimentSpec, trials: List[int]) -> List[TrialOutcome]:
    work = _TRIALS[spec.kind]
    return [work(spec, k) for k in trials]


def run_trials(spec: ExperimentSpec, threads: int = 1) -> List[TrialOutcome]:
    indices = list(range(spec.trials))
    if threads <= 1 or spec.trials == 1:
        return _run_chunk(spec, indices)
    size = max(1, math.ceil(spec.trials / (threads * 4)))
    chunks = [indices[i:i + size] for i in range(0, len(indices), size)]
    outcomes: List[TrialOutcome] = []
    with ProcessPoolExecutor(max_workers=threads) as pool:
        # map preserves chunk order, hence trial order
        for part in pool.map(_run_chunk, repeat(spec), chunks):
            outcomes.extend(part)
    return outcomes


def validate_spec(spec: ExperimentSpec) -> None:
    kind = spec.kind
    if kind == ExperimentKind.SLOPE:
        cls = classify(spec.extension, spec.alpha)
        if spec.extension.ext_size == 0 or not cls.is_safe:
            raise PreconditionError("slope experiments need a safe extension with at least one vertex")
        if len(spec.checkpoints) < 2:
            raise PreconditionError("slope experiments need at least two checkpoints")
        if len(spec.checkpoints) < 5:
            logger.warning(f"slope fit over only {len(spec.checkpoints)} checkpoints")
    elif kind == ExperimentKind.SATURATION:
        if spec.extension.root_size != 0:
            raise PreconditionError("saturation experiments count rooted-free graphs (root_size 0)")
        if spec.extension.ext_size == 0 or not classify(spec.extension, spec.alpha).is_rigid:
            raise PreconditionError("saturation experiments need a rigid graph")
        if len(spec.checkpoints) < 2:
            raise PreconditionError("saturation experiments need at least two checkpoints")
    elif kind == ExperimentKind.GENERICITY:
        check_soft_limit(spec.t, "t", spec.allow_large)
    elif kind == ExperimentKind.IRREGULAR:
        check_soft_limit(spec.r, "r", spec.allow_large)
        if len(spec.checkpoints) < 2:
            raise PreconditionError("irregular experiments need at least two checkpoints")


def _aggregate(spec: ExperimentSpec, outcomes: List[TrialOutcome]) -> Tuple[np.ndarray, List[CheckpointAggregate]]:
    counts = np.array([o.counts for o in outcomes], dtype=float)
    fresh = np.array([o.new_counts for o in outcomes], dtype=float)
    n = counts.shape[0]
    means = counts.mean(axis=0)
    if n > 1:
        stderr = counts.std(axis=0, ddof=1) / math.sqrt(n)
    else:
        stderr = np.zeros_like(means)
    fresh_means = fresh.mean(axis=0)
    aggregates = [
        CheckpointAggregate(T=T, mean=float(m), stderr=float(s), mean_new=float(f))
        for T, m, s, f in zip(_checkpoints(spec), means, stderr, fresh_means)
    ]
    return counts, aggregates


def _plateaued(counts: np.ndarray) -> np.ndarray:
    return counts[:, -1] == counts[:, -2]


def analyse(spec: ExperimentSpec, outcomes: List[TrialOutcome]) -> ExperimentReport:
    counts, aggregates = _aggregate(spec, outcomes)
    fields = {}
    summary = {}
    kind = spec.kind

    if kind == ExperimentKind.SLOPE:
        expected = asymptotic_exponent(spec.extension, spec.alpha).exponent
        fields["expected_slope"] = expected
        means = np.array([a.mean for a in aggregates])
        if np.any(means <= 0):
            summary["note"] = "some checkpoint has a zero mean count; no log-log fit"
            verdict = Verdict.FAIL
        else:
            logT = np.log(np.array(spec.checkpoints, dtype=float))
            logm = np.log(means)
            slope, intercept = np.polyfit(logT, logm, 1)
            residual = logm - (slope * logT + intercept)
            fields["fitted_slope"] = float(slope)
            fields["fit_residual"] = float(np.sqrt(np.mean(residual ** 2)))
            verdict = Verdict.PASS if abs(slope - float(expected)) <= spec.tolerance else Verdict.FAIL

    elif kind in (ExperimentKind.SATURATION, ExperimentKind.IRREGULAR):
        flat = _plateaued(counts)
        fraction = float(flat.mean())
        last_growth = []
        for row in counts:
            grown = [T for T, prev, cur in zip(spec.checkpoints, [0.0, *row[:-1]], row) if cur > prev]
            last_growth.append(grown[-1] if grown else None)
        summary["plateau_fraction"] = fraction
        summary["last_growth_T"] = last_growth
        if kind == ExperimentKind.SATURATION:
            aut = rooted_automorphism_count(spec.extension)
            copies = counts[:, -1] / aut
            summary["plateau_copies_max"] = float(copies.max())
            summary["plateau_copies_mean"] = float(copies.mean())
        else:
            summary["irregular_max"] = int(counts.max())
        verdict = Verdict.PASS if fraction >= spec.effective_pass_fraction else Verdict.FAIL

    elif kind == ExperimentKind.GENERICITY:
        rate = float(counts[:, -1].mean())
        summary["success_rate"] = rate
        verdict = Verdict.PASS if rate >= spec.effective_pass_fraction else Verdict.FAIL

    else:
        p = clique_probability(spec.clique_size, spec.alpha)
        freq = float(counts[:, 0].mean())
        sigma = math.sqrt(p * (1 - p) / counts.shape[0])
        summary.update({"oracle_probability": p, "frequency": freq, "sigma": sigma})
        verdict = Verdict.PASS if abs(freq - p) <= spec.sigmas * sigma else Verdict.FAIL

    return ExperimentReport(
        spec=spec,
        build_tag=settings.BUILD_TAG,
        master_seed=spec.master_seed,
        aggregates=aggregates,
        summary=summary,
        verdict=verdict,
        **fields,
    )


def run_experiment(spec: ExperimentSpec, threads: Optional[int] = None) -> ExperimentResult:
    threads = threads or settings.SPARSE_EVOLVE_THREADS
    validate_spec(spec)
    logger.info(f"running {spec.kind.value} experiment: {spec.trials} trials on {threads} worker(s)")
    outcomes = run_trials(spec, threads)
    report = analyse(spec, outcomes)
    logger.info(f"{spec.kind.value} experiment finished: {report.verdict.value}")
    return ExperimentResult(report=report, outcomes=outcomes)


def write_rows(result: ExperimentResult, stream: TextIO) -> None:
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(result.rows())


def write_csv(result: ExperimentResult, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        write_rows(result, f)
    logger.info(f"wrote {path}")


def write_report(report: ExperimentReport, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info(f"wrote {path}")
