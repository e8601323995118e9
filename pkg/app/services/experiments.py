# app/services/experiments.py
import logging
import pathlib
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.core.config import settings
from app.core.exceptions import ComparisonError
from app.models.report import BatchSummary, Comparison, RunReport
from app.models.scenario import Scenario
from app.services.reporting import emit_all
from app.services.simulator import run

logger = logging.getLogger("app.services.experiments")  # Logger for this module


def _earliest_formulation(report: RunReport) -> Dict[str, int]:
    earliest: Dict[str, int] = {}
    for span in report.goal_spans:
        if span.label not in earliest or span.formulated_at < earliest[span.label]:
            earliest[span.label] = span.formulated_at
    return earliest


def compare(baseline: Optional[RunReport], promises: Optional[RunReport]) -> Comparison:
    if baseline is None or promises is None:
        raise ComparisonError("compare needs a baseline report and a promises report")
    if baseline.scenario != promises.scenario or baseline.seed != promises.seed:
        raise ComparisonError(
            f"Reports differ in scenario or seed: {baseline.scenario}/{baseline.seed} vs {promises.scenario}/{promises.seed}"
        )
    delta = None
    improvement = None
    if baseline.makespan is not None and promises.makespan is not None:
        delta = baseline.makespan - promises.makespan
        improvement = round(100.0 * delta / baseline.makespan, 2) if baseline.makespan else 0.0
    first_base = _earliest_formulation(baseline)
    first_prom = _earliest_formulation(promises)
    deltas = {label: first_base[label] - first_prom[label] for label in sorted(first_base) if label in first_prom}
    return Comparison(
        scenario=baseline.scenario,
        baseline_makespan=baseline.makespan,
        promises_makespan=promises.makespan,
        delta=delta,
        improvement_percent=improvement,
        formulation_deltas=deltas,
    )


def run_pair(scenario: Scenario, seed: int) -> Tuple[RunReport, RunReport]:
    baseline = run(scenario.with_overrides(seed=seed, promises=False))
    promising = run(scenario.with_overrides(seed=seed, promises=True, clear_lookahead=True))
    return baseline, promising


def _mean_std(values: Sequence[Optional[int]]) -> Tuple[Optional[float], Optional[float]]:
    if not values or any(v is None for v in values):
        return None, None
    data = np.asarray(values, dtype=float)
    return round(float(data.mean()), 2), round(float(data.std()), 2)


def batch(
    scenario: Scenario,
    seeds: int = settings.BATCH_SEEDS,
    out_dir: Optional[pathlib.Path] = None,
) -> BatchSummary:
    """Runs every seed with promises off and on; reports mean and standard deviation of the makespans."""
    seed_list = [scenario.config.seed + i for i in range(seeds)]
    baseline_spans: List[Optional[int]] = []
    promise_spans: List[Optional[int]] = []
    slowest = 0.0
    for seed in seed_list:
        baseline, promising = run_pair(scenario, seed)
        baseline_spans.append(baseline.makespan)
        promise_spans.append(promising.makespan)
        slowest = max(slowest, baseline.planner_max_seconds or 0.0, promising.planner_max_seconds or 0.0)
        logger.info(f"{scenario.name} seed {seed}: baseline {baseline.makespan}, promises {promising.makespan}")
        if out_dir is not None:
            emit_all(baseline, out_dir / f"seed-{seed}" / "baseline")
            emit_all(promising, out_dir / f"seed-{seed}" / "promises")

    summary = BatchSummary(
        scenario=scenario.name,
        seeds=seed_list,
        baseline_makespans=baseline_spans,
        promises_makespans=promise_spans,
        planner_max_seconds=slowest,
    )
    summary.baseline_mean, summary.baseline_std = _mean_std(baseline_spans)
    summary.promises_mean, summary.promises_std = _mean_std(promise_spans)
    if summary.baseline_mean and summary.promises_mean is not None:
        summary.improvement_percent = round(
            100.0 * (summary.baseline_mean - summary.promises_mean) / summary.baseline_mean, 2
        )
    return summary
