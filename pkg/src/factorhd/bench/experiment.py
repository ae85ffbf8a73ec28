"""Trial generation, scoring and aggregation for the Rep 1/2/3 studies and baseline comparisons."""

from __future__ import annotations

import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Literal, Sequence

import numpy as np

from ..baselines import DEFAULT_MAX_ITERATIONS, ci_encode, ci_factorize, hierarchy_codebooks, product_target, resonator_factorize
from ..codebook import NULL, Hierarchy, generate_hierarchy, make_rng
from ..encoder import encode_object, encode_scene
from ..errors import UnsupportedConfigurationError
from ..factorizer import (
    DEFAULT_MAX_OBJECTS,
    Counters,
    ThresholdConfig,
    auto_threshold,
    factorize_multi,
    factorize_single,
)

Model = Literal["factorhd", "ci", "resonator"]
MODELS = ("factorhd", "ci", "resonator")

# Published comparison numbers, quoted next to measured values in reports.
PUBLISHED_REFERENCE = {
    "speedup_at_1e6": 18.5,
    "speedup_at_1e9": 5667.0,
    "imc_accuracy_d256_f3_m256": 0.9971,
    "imc_mean_iterations_d256_f3_m256": 3312,
}


@dataclass(frozen=True)
class ExperimentConfig:
    model: Model = "factorhd"
    dim: int = 1000
    num_classes: int = 3
    branching: tuple[int, ...] = (10,)
    num_objects: int = 1
    trials: int = 1024
    batch_size: int = 512
    threshold: ThresholdConfig = field(default_factory=ThresholdConfig.auto)
    seed: int = 0
    dimension_halving: bool = False
    acceptance: Literal["batch", "sequential"] = "batch"
    codebook_scope: Literal["batch", "trial"] = "batch"
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    max_objects: int = DEFAULT_MAX_OBJECTS
    null_prob: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "branching", tuple(int(m) for m in self.branching))
        if self.model not in MODELS:
            raise UnsupportedConfigurationError(f"unknown model {self.model!r}")
        if self.trials < 1 or self.batch_size < 1:
            raise ValueError("trials and batch_size must be >= 1")
        if self.num_objects < 1:
            raise ValueError("num_objects must be >= 1")
        if not self.branching:
            raise UnsupportedConfigurationError("branching needs at least one level")
        if self.codebook_scope not in ("batch", "trial"):
            raise ValueError(f"unknown codebook scope {self.codebook_scope!r}")
        if not 0.0 <= self.null_prob < 1.0:
            raise ValueError("null_prob must lie in [0, 1)")
        if self.model != "factorhd":
            if len(self.branching) != 1:
                raise UnsupportedConfigurationError(f"{self.model} handles a single item level only")
            if self.num_objects != 1:
                raise UnsupportedConfigurationError(f"{self.model} decodes single objects only")
            if self.null_prob:
                raise UnsupportedConfigurationError(f"{self.model} has no NULL class")

    @property
    def effective_dim(self) -> int:
        """FactorHD's ternary vectors take two bits per component, so halving matches storage."""
        if self.dimension_halving and self.model == "factorhd":
            return self.dim // 2
        return self.dim

    @property
    def num_batches(self) -> int:
        return math.ceil(self.trials / self.batch_size)

    def echo(self) -> dict:
        d = asdict(self)
        d["branching"] = list(self.branching)
        d["threshold"] = self.threshold.describe()
        d["effective_dim"] = self.effective_dim
        return d


@dataclass
class TrialRecord:
    trial_id: int
    batch: int
    correct: bool
    similarity_measurements: int
    combinations_tested: int
    loop_iterations: int
    wall_time: float
    iterations: int | None = None
    decoded_objects: int = 0


@dataclass
class ResultTable:
    config: ExperimentConfig
    records: list[TrialRecord]
    threshold_used: float | None = None

    @property
    def trials(self) -> int:
        return len(self.records)

    @property
    def correct(self) -> int:
        return sum(r.correct for r in self.records)

    @property
    def accuracy(self) -> float:
        return self.correct / self.trials

    @property
    def ci95(self) -> float:
        p = self.accuracy
        return 1.96 * math.sqrt(p * (1 - p) / self.trials)

    @property
    def mean_wall_time(self) -> float:
        return statistics.fmean(r.wall_time for r in self.records)

    @property
    def median_wall_time(self) -> float:
        return statistics.median(r.wall_time for r in self.records)

    @property
    def mean_sim_measurements(self) -> float:
        return statistics.fmean(r.similarity_measurements for r in self.records)

    @property
    def mean_combinations(self) -> float:
        return statistics.fmean(r.combinations_tested for r in self.records)

    @property
    def mean_iterations(self) -> float | None:
        its = [r.iterations for r in self.records if r.iterations is not None]
        return statistics.fmean(its) if its else None

    def summary(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "ci95": self.ci95,
            "mean_sim_measurements": self.mean_sim_measurements,
            "mean_combinations": self.mean_combinations,
            "mean_iterations": self.mean_iterations,
            "mean_wall_time_s": self.mean_wall_time,
            "median_wall_time_s": self.median_wall_time,
        }


def _seed64(seed: int, *key: int) -> int:
    state = np.random.SeedSequence(seed, spawn_key=tuple(key)).generate_state(2, dtype=np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def _sample_object(rng: np.random.Generator, cfg: ExperimentConfig) -> tuple:
    out = []
    for _ in range(cfg.num_classes):
        if cfg.null_prob and rng.random() < cfg.null_prob:
            out.append(NULL)
        else:
            out.append(tuple(int(rng.integers(0, m)) for m in cfg.branching))
    return tuple(out)


def _factorhd_trial(h: Hierarchy, truth: list[tuple], cfg: ExperimentConfig) -> tuple[bool, Counters, float, int]:
    if cfg.num_objects == 1:
        target = encode_object(h, truth[0])
        counters = Counters()
        t0 = time.perf_counter()
        decoded = factorize_single(target, h, counters=counters)
        elapsed = time.perf_counter() - t0
        got = tuple(NULL if p is NULL else p.levels for _, p in sorted(decoded.items()))
        return got == truth[0], counters, elapsed, 1
    target = encode_scene(h, truth)
    t0 = time.perf_counter()
    result = factorize_multi(target, h, cfg.threshold, cfg.max_objects, cfg.acceptance)
    elapsed = time.perf_counter() - t0
    expected = sorted(truth, key=lambda o: tuple((-1,) if a is NULL else a for a in o))
    return result.assignment_multiset() == expected, result.counters, elapsed, len(result.objects)


def _run_batch(cfg: ExperimentConfig, batch: int) -> list[TrialRecord]:
    first = batch * cfg.batch_size
    last = min(cfg.trials, first + cfg.batch_size)
    records = []
    h = None
    for trial in range(first, last):
        if cfg.codebook_scope == "trial":
            h = generate_hierarchy(cfg.effective_dim, cfg.num_classes, cfg.branching, _seed64(cfg.seed, batch, trial, 0))
        elif h is None:
            h = generate_hierarchy(cfg.effective_dim, cfg.num_classes, cfg.branching, _seed64(cfg.seed, batch))
        rng = make_rng(cfg.seed, batch, trial, 1)
        truth = [_sample_object(rng, cfg) for _ in range(cfg.num_objects)]
        iterations = None
        if cfg.model == "factorhd":
            correct, counters, elapsed, ndec = _factorhd_trial(h, truth, cfg)
        elif cfg.model == "ci":
            idx = [p[0] for p in truth[0]]
            enc = ci_encode(h, idx)
            counters = Counters(loop_iterations=1)
            t0 = time.perf_counter()
            got = [ci_factorize(enc, h, c, counters) for c in range(cfg.num_classes)]
            elapsed = time.perf_counter() - t0
            correct, ndec = got == idx, 1
        else:
            idx = [p[0] for p in truth[0]]
            target = product_target(h, idx)
            t0 = time.perf_counter()
            res = resonator_factorize(target, hierarchy_codebooks(h), cfg.max_iterations)
            elapsed = time.perf_counter() - t0
            counters = Counters(res.similarity_measurements, 0, res.iterations)
            correct, ndec, iterations = list(res.indices) == idx, 1, res.iterations
        records.append(
            TrialRecord(
                trial_id=trial,
                batch=batch,
                correct=bool(correct),
                similarity_measurements=counters.similarity_measurements,
                combinations_tested=counters.combinations_tested,
                loop_iterations=counters.loop_iterations,
                wall_time=elapsed,
                iterations=iterations,
                decoded_objects=ndec,
            )
        )
    return records


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> ResultTable:
    """Run ``cfg.trials`` trials; one codebook per batch unless ``codebook_scope='trial'``.

    Every trial draws from its own seed stream, so results do not depend on
    ``jobs`` or on batch scheduling.
    """
    batches = range(cfg.num_batches)
    if jobs > 1 and cfg.num_batches > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_batch, [cfg] * cfg.num_batches, batches))
    else:
        parts = [_run_batch(cfg, b) for b in batches]
    records = sorted((r for part in parts for r in part), key=lambda r: r.trial_id)
    th = None
    if cfg.model == "factorhd" and cfg.num_objects > 1:
        if cfg.threshold.mode == "fixed":
            th = cfg.threshold.value
        else:
            n = cfg.threshold.n_assumed or 2
            th = auto_threshold(n, cfg.num_classes, cfg.effective_dim, cfg.branching[0])
    return ResultTable(cfg, records, th)


@dataclass
class SweepResult:
    config: ExperimentConfig
    rows: list[tuple[float, ResultTable]]
    predicted_th: float

    @property
    def best_th(self) -> float:
        """Threshold with the highest accuracy; the lowest one wins ties."""
        best = max(t.accuracy for _, t in self.rows)
        return min(th for th, t in self.rows if t.accuracy == best)

    @property
    def best_accuracy(self) -> float:
        return max(t.accuracy for _, t in self.rows)


def sweep_threshold(cfg: ExperimentConfig, th_values: Sequence[float], jobs: int = 1) -> SweepResult:
    """Accuracy per fixed threshold (same trials for every threshold) plus the fitted prediction."""
    if not th_values:
        raise ValueError("threshold sweep needs at least one value")
    if cfg.model != "factorhd" or cfg.num_objects < 2:
        raise UnsupportedConfigurationError("threshold sweeps need model=factorhd and at least 2 objects")
    rows = []
    for th in th_values:
        rows.append((float(th), run_experiment(replace(cfg, threshold=ThresholdConfig.fixed(th)), jobs)))
    predicted = auto_threshold(cfg.num_objects, cfg.num_classes, cfg.effective_dim, cfg.branching[0])
    return SweepResult(cfg, rows, predicted)


@dataclass
class ScalingResult:
    config: ExperimentConfig
    rows: list[tuple[int, ResultTable]]

    @property
    def slope(self) -> float:
        """Least-squares slope of log(mean similarity measurements) against log(M)."""
        ms = np.log([m for m, _ in self.rows])
        cost = np.log([t.mean_sim_measurements for _, t in self.rows])
        return float(np.polyfit(ms, cost, 1)[0])


def scaling_study(base_cfg: ExperimentConfig, m_values: Sequence[int], jobs: int = 1) -> ScalingResult:
    """Cost and accuracy as the per-class item count grows (single level)."""
    if base_cfg.model not in ("factorhd", "resonator"):
        raise UnsupportedConfigurationError("scaling studies cover factorhd and resonator")
    if len(m_values) < 2:
        raise ValueError("need at least two M values to fit a slope")
    rows = [(int(m), run_experiment(replace(base_cfg, branching=(int(m),)), jobs)) for m in m_values]
    return ScalingResult(base_cfg, rows)
