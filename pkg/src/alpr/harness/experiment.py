"""Repeated random-split evaluation and the two-pass lambda grid search."""
from __future__ import annotations

import logging
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .. import baselines
from ..classify import accuracy, build_model, predict_batch
from ..core import Dataset, SolverConfig, validate
from ..solver import fit as alpr_fit
from ..synthetic import ThreeRingSpec, generate, split

log = logging.getLogger(__name__)

DEFAULT_GRID = (1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0)
METHODS = ("alpr", "ridge", "relsr", "nc")


@dataclass(frozen=True)
class ExperimentSpec:
    """What to run: data source, split protocol, methods and hyperparameters.

    ``source`` is a CSV path or a :class:`ThreeRingSpec`.  Repeat r uses
    split seed ``seed + r`` and the same seed for the solver's W init.
    ``holdout`` > 0 carves a validation split out of each training split for
    grid search instead of scoring on the test split.
    """

    source: str | ThreeRingSpec
    train_per_class: int
    repeats: int = 20
    seed: int = 0
    config: SolverConfig = field(default_factory=SolverConfig)
    methods: tuple[str, ...] = METHODS
    baseline_lambda: float = 0.1
    grid: tuple[float, ...] = DEFAULT_GRID
    fixed_lambda1: float = 0.1
    holdout: float = 0.0

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")
        if not self.grid:
            raise ValueError("grid must be non-empty")
        if not 0.0 <= self.holdout < 1.0:
            raise ValueError("holdout must be in [0, 1)")

    def seeds(self) -> list[int]:
        return [self.seed + r for r in range(self.repeats)]


@dataclass
class ExperimentReport:
    accuracies: dict[str, list[float]] = field(default_factory=dict)
    params: dict[str, dict[str, float]] = field(default_factory=dict)
    fit_seconds: dict[str, list[float]] = field(default_factory=dict)
    traces: dict[str, list[tuple[float, ...]]] = field(default_factory=dict)

    def mean(self, method: str) -> float:
        accs = self.accuracies[method]
        return float(sum(accs) / len(accs))

    def summary(self) -> dict[str, float]:
        return {m: self.mean(m) for m in self.accuracies}

    def add(self, method, acc, seconds=None, trace=None):
        self.accuracies.setdefault(method, []).append(float(acc))
        if seconds is not None:
            self.fit_seconds.setdefault(method, []).append(seconds)
        if trace is not None:
            self.traces.setdefault(method, []).append(tuple(trace))


def load_source(spec: ExperimentSpec) -> Dataset:
    if isinstance(spec.source, ThreeRingSpec):
        return generate(spec.source)
    from .io import load_csv
    return load_csv(spec.source)


def fit_and_score(method: str, train: Dataset, test: Dataset, config: SolverConfig, lam: float):
    """Fit one method; return (test accuracy %, objective trace or None)."""
    if method == "alpr":
        result = alpr_fit(train, config)
        pred = predict_batch(build_model(result), test.features)
        return accuracy(pred, test.labels), result.objective_trace
    if method == "ridge":
        model = baselines.fit_ridge(train, lam)
    elif method == "relsr":
        model = baselines.fit_relsr(train, lam, config.max_iters, config.rel_tol)
    elif method == "nc":
        model = baselines.fit_nc(train)
    else:
        raise ValueError(f"unknown method {method!r}")
    return accuracy(model.predict(test.features), test.labels), model.objective_trace or None


def _splits(spec: ExperimentSpec, dataset: Dataset, validation: bool):
    out = []
    for s in spec.seeds():
        train, test = split(dataset, spec.train_per_class, s)
        if validation and spec.holdout > 0:
            inner = max(2, int(round((1.0 - spec.holdout) * spec.train_per_class)))
            train, test = split(train, inner, s)
        out.append((s, train, test))
    return out


def run_experiment(spec: ExperimentSpec, dataset: Dataset | None = None,
                   params: dict[str, float] | None = None, n_jobs: int = 1) -> ExperimentReport:
    """Score every requested method on ``spec.repeats`` fresh random splits.

    ``params`` may override ``lambda1``/``lambda2`` (ALPR) and
    ``baseline_lambda`` (ridge and ReLSR).
    """
    dataset = load_source(spec) if dataset is None else dataset
    validate(dataset)
    params = params or {}
    config = replace(spec.config, lambda1=params.get("lambda1", spec.config.lambda1),
                     lambda2=params.get("lambda2", spec.config.lambda2))
    lam = params.get("baseline_lambda", spec.baseline_lambda)

    jobs = []
    for s, train, test in _splits(spec, dataset, validation=False):
        for method in spec.methods:
            jobs.append((method, train, test, replace(config, seed=s)))

    def run(job):
        method, train, test, cfg = job
        t0 = time.perf_counter()
        acc, trace = fit_and_score(method, train, test, cfg, lam)
        return acc, time.perf_counter() - t0, trace

    results = _map(run, jobs, n_jobs)
    report = ExperimentReport()
    for (method, *_), (acc, secs, trace) in zip(jobs, results):
        report.add(method, acc, secs, trace)
    for method in spec.methods:
        if method == "alpr":
            report.params[method] = {"lambda1": config.lambda1, "lambda2": config.lambda2, "rho": config.rho}
        elif method in ("ridge", "relsr"):
            report.params[method] = {"lambda": lam}
        else:
            report.params[method] = {}
    return report


def _map(fn, items, n_jobs):
    if n_jobs == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, items))


def _best(values, scores):
    # highest score; ties toward the smaller value
    order = sorted(range(len(values)), key=lambda i: (-scores[i], values[i]))
    return values[order[0]]


def _score_cells(spec, dataset, cells, fit_fn, n_jobs):
    """Mean validation accuracy of ALPR for each (lambda1, lambda2) cell."""
    splits = _splits(spec, dataset, validation=True)

    def score(cell):
        l1, l2 = cell
        accs = []
        for s, train, test in splits:
            cfg = replace(spec.config, lambda1=l1, lambda2=l2, seed=s)
            try:
                result = fit_fn(train, cfg)
                accs.append(accuracy(predict_batch(build_model(result), test.features), test.labels))
            except Exception as exc:  # a failed cell must not abort the search
                warnings.warn(f"grid cell lambda1={l1:g} lambda2={l2:g} failed: {exc}", RuntimeWarning)
                accs.append(0.0)
        return accs

    return _map(score, cells, n_jobs)


def grid_search(spec: ExperimentSpec, dataset: Dataset | None = None, fit_fn=None,
                n_jobs: int = 1) -> tuple[float, float, ExperimentReport]:
    """Two-pass search: sweep lambda2 with lambda1 fixed, then sweep lambda1.

    Cells are ranked by mean accuracy over ``spec.repeats`` splits (test splits,
    or validation splits when ``spec.holdout`` > 0).  Ties go to the smaller
    lambda.  The returned report holds the per-run accuracies of every cell.
    """
    dataset = load_source(spec) if dataset is None else dataset
    validate(dataset)
    fit_fn = fit_fn or alpr_fit
    grid = sorted(spec.grid)
    report = ExperimentReport()

    cells = [(spec.fixed_lambda1, l2) for l2 in grid]
    runs = _score_cells(spec, dataset, cells, fit_fn, n_jobs)
    for (l1, l2), accs in zip(cells, runs):
        for a in accs:
            report.add(f"alpr[lambda1={l1:g};lambda2={l2:g}]", a)
        report.params[f"alpr[lambda1={l1:g};lambda2={l2:g}]"] = {"lambda1": l1, "lambda2": l2}
    best_l2 = _best(grid, [float(np.mean(a)) for a in runs])
    log.info("pass 1: lambda2=%g", best_l2)

    cells = [(l1, best_l2) for l1 in grid]
    runs = _score_cells(spec, dataset, cells, fit_fn, n_jobs)
    for (l1, l2), accs in zip(cells, runs):
        key = f"alpr[lambda1={l1:g};lambda2={l2:g}]"
        if key in report.accuracies:
            continue
        for a in accs:
            report.add(key, a)
        report.params[key] = {"lambda1": l1, "lambda2": l2}
    best_l1 = _best(grid, [float(np.mean(a)) for a in runs])
    log.info("pass 2: lambda1=%g", best_l1)
    return best_l1, best_l2, report


def select_baseline_lambda(spec: ExperimentSpec, method: str, dataset: Dataset | None = None) -> float:
    """One-dimensional sweep of the ridge/ReLSR lambda over ``spec.grid``."""
    dataset = load_source(spec) if dataset is None else dataset
    grid = sorted(spec.grid)
    splits = _splits(spec, dataset, validation=True)
    scores = []
    for lam in grid:
        accs = [fit_and_score(method, tr, te, spec.config, lam)[0] for _, tr, te in splits]
        scores.append(float(np.mean(accs)))
    return _best(grid, scores)
