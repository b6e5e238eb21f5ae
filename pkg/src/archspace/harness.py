"""Evaluators and the seeded experiment runner."""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import backend, rng
from .errors import DepthExceeded, SearchSpaceError
from .search import enumerate_terminals, make_searcher
from .search.features import feature_tokens
from .serialization import dumps, log_to_json, serialize
from .spaces import SPACES, space_fn

log = logging.getLogger(__name__)

HISTOGRAM_BINS = 20


class SyntheticEvaluator:
    """Structured stand-in for training: each feature token carries a fixed
    weight in [-1, 1] derived from (seed, token) and the score is the sigmoid
    of the weights' sum scaled by 1/sqrt(#tokens)."""

    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        self._weights: dict = {}

    def weight(self, token: str) -> float:
        w = self._weights.get(token)
        if w is None:
            w = self._weights[token] = 2.0 * rng.hash_uniform(self.seed, "token", token) - 1.0
        return w

    def __call__(self, space) -> float:
        tokens = sorted(feature_tokens(space))
        if not tokens:
            return 0.5
        return rng.sigmoid(math.fsum(self.weight(t) for t in tokens) / math.sqrt(len(tokens)))


def synthetic_evaluator(seed: int = 0) -> SyntheticEvaluator:
    return SyntheticEvaluator(seed)


class ForwardSmokeEvaluator:
    """Compiles the architecture, runs one forward pass on seeded random
    inputs and returns the sigmoid of the output checksum; architectures that
    fail shape checking score 0."""

    def __init__(self, input_shapes, seed: int = 0):
        self.input_shapes = input_shapes
        self.seed = int(seed)

    def _shapes(self, space) -> dict:
        if isinstance(self.input_shapes, dict):
            return self.input_shapes
        return {name: tuple(self.input_shapes) for name in space.inputs}

    def __call__(self, space) -> float:
        try:
            cg = backend.compile(space, self._shapes(space), seed=self.seed)
            out = backend.forward(cg, backend.random_inputs(cg, self.seed))
        except SearchSpaceError as e:
            if isinstance(e, DepthExceeded):
                raise
            log.warning("forward evaluation failed, scoring 0: %s", e)
            return 0.0
        return rng.sigmoid(backend.checksum(out))


def forward_smoke_evaluator(input_shapes, seed: int = 0) -> ForwardSmokeEvaluator:
    return ForwardSmokeEvaluator(input_shapes, seed)


def make_evaluator(name: str, space_name: str, seed: int = 0):
    if name == "synthetic":
        return synthetic_evaluator(seed)
    if name == "forward":
        return forward_smoke_evaluator(SPACES[space_name].input_shapes, seed)
    raise KeyError(f"unknown evaluator {name!r}; known: forward, synthetic")


@dataclass
class ExperimentConfig:
    space: str
    searcher: str = "random"
    searcher_params: dict = field(default_factory=dict)
    num_samples: int = 256
    seeds: list = field(default_factory=lambda: [0])
    evaluator: str = "synthetic"
    evaluator_seed: int = 0
    depth_cap: int = 64
    out_dir: str | None = None

    def check(self):
        from .search import SEARCHERS

        for kind, name, known in (
            ("space", self.space, SPACES),
            ("searcher", self.searcher, SEARCHERS),
            ("evaluator", self.evaluator, ("synthetic", "forward")),
        ):
            if name not in known:
                raise KeyError(f"unknown {kind} {name!r}; known: {', '.join(sorted(known))}")
        if self.num_samples < 0:
            raise ValueError("num_samples must be non-negative")


@dataclass
class RunResult:
    seed: int
    records: list
    best_score: float | None
    iterations_to_best: int | None
    wall_time: float
    best_space: str | None = None
    failure: str | None = None

    @property
    def best_so_far(self) -> list:
        return [r["best_so_far"] for r in self.records]


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    runs: list


def run_seed(config: ExperimentConfig, seed: int, make_space=None) -> RunResult:
    make_space = make_space or space_fn(config.space)
    searcher = make_searcher(config.searcher, make_space, seed, config.depth_cap, **config.searcher_params)
    evaluate = make_evaluator(config.evaluator, config.space, config.evaluator_seed)
    records, best, best_it, best_space, failure = [], None, None, None, None
    start = time.perf_counter()
    try:
        for it in range(config.num_samples):
            r = searcher.sample()
            score = float(evaluate(r.space))
            searcher.update(score, r.token)
            if best is None or score > best:
                best, best_it, best_space = score, it + 1, serialize(r.space)
            records.append(
                {
                    "iteration": it,
                    "token": r.token,
                    "assignment_log": log_to_json(r.log),
                    "score": score,
                    "best_so_far": best,
                }
            )
    except DepthExceeded as e:
        failure = f"depth cap exceeded: {e}"
    return RunResult(seed, records, best, best_it, time.perf_counter() - start, best_space, failure)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """One sample/evaluate/update loop per seed; writes logs and summary data
    to ``config.out_dir`` when set."""
    config.check()
    make_space = space_fn(config.space)
    runs = [run_seed(config, s, make_space) for s in config.seeds]
    result = ExperimentResult(config, runs)
    if config.out_dir is not None:
        write_outputs(result, Path(config.out_dir))
    return result


def write_outputs(result: ExperimentResult, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(dumps(asdict(result.config)) + "\n")
    for run in result.runs:
        with open(out / f"log_seed{run.seed}.jsonl", "w") as f:
            for rec in run.records:
                f.write(dumps(rec) + "\n")
        if run.best_space is not None:
            (out / f"best_seed{run.seed}.json").write_text(run.best_space + "\n")

    with open(out / "summary.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["seed", "best_score", "iterations_to_best", "wall_time_s", "status"])
        for run in result.runs:
            w.writerow(
                [
                    run.seed,
                    "n/a" if run.best_score is None else repr(run.best_score),
                    "n/a" if run.iterations_to_best is None else run.iterations_to_best,
                    f"{run.wall_time:.3f}",
                    run.failure or "ok",
                ]
            )

    # best-so-far curves, one column per seed plus the mean over seeds still running
    n = max((len(r.records) for r in result.runs), default=0)
    with open(out / "best_so_far.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["iteration"] + [f"seed{r.seed}" for r in result.runs] + ["mean"])
        for it in range(n):
            vals = [r.best_so_far[it] if it < len(r.records) else None for r in result.runs]
            present = [v for v in vals if v is not None]
            w.writerow([it] + ["" if v is None else repr(v) for v in vals] + [repr(float(np.mean(present)))])

    scores = [rec["score"] for r in result.runs for rec in r.records]
    counts, edges = np.histogram(scores, bins=HISTOGRAM_BINS, range=(0.0, 1.0))
    with open(out / "score_histogram.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["bin_low", "bin_high", "count"])
        for lo, hi, c in zip(edges[:-1], edges[1:], counts):
            w.writerow([f"{lo:.2f}", f"{hi:.2f}", int(c)])


def count_command(space_name: str, depth_cap: int = 64) -> int:
    return len(enumerate_terminals(space_fn(space_name), depth_cap))


def load_jsonl(path) -> list:
    with open(path) as f:
        return [json.loads(line) for line in f if line.strip()]
