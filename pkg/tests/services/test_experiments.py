# tests/services/test_experiments.py
import pytest

from app.core.exceptions import ComparisonError
from app.models.report import GoalSpan, RunReport
from app.services import experiments
from app.services.experiments import batch, compare


def report(makespan, promises=False, seed=0, scenario="s3-promises", spans=()) -> RunReport:
    return RunReport(
        scenario=scenario, seed=seed, promises_enabled=promises, completed=makespan is not None,
        makespan=makespan, goal_spans=list(spans),
    )


def span(label, formulated_at) -> GoalSpan:
    return GoalSpan(goal=f"{label}#1", goal_class=label.split("(")[0], label=label, agent="R2D2", formulated_at=formulated_at)


def test_compare_makespans_and_formulation_times():
    baseline = report(450, spans=[span("CleanMachine(R2D2 M1)", 251), span("StartMachine(WALL-E M1)", 0)])
    promising = report(350, promises=True, spans=[span("CleanMachine(R2D2 M1)", 101), span("StartMachine(WALL-E M1)", 0)])
    result = compare(baseline, promising)
    assert result.delta == 100
    assert result.improvement_percent == pytest.approx(22.22)
    assert result.formulation_deltas == {"CleanMachine(R2D2 M1)": 150, "StartMachine(WALL-E M1)": 0}


def test_compare_with_unfinished_run_has_no_delta():
    result = compare(report(450), report(None, promises=True))
    assert result.delta is None
    assert result.improvement_percent is None


def test_compare_uses_earliest_formulation_per_label():
    baseline = report(10, spans=[span("G(A)", 30), span("G(A)", 20)])
    promising = report(10, spans=[span("G(A)", 5)])
    assert compare(baseline, promising).formulation_deltas == {"G(A)": 15}


def test_compare_requires_both_reports():
    with pytest.raises(ComparisonError):
        compare(None, report(1))


def test_compare_rejects_mismatched_runs():
    with pytest.raises(ComparisonError):
        compare(report(1, seed=1), report(1, seed=2))
    with pytest.raises(ComparisonError):
        compare(report(1), report(1, scenario="other"))


def test_run_pair_toggles_promises(load, mocker):
    fake_run = mocker.patch.object(experiments, "run", side_effect=lambda s: report(1, s.config.promises_enabled, s.config.seed))
    baseline, promising = experiments.run_pair(load("s3-promises"), 7)
    scenarios = [call.args[0] for call in fake_run.call_args_list]
    assert [s.config.promises_enabled for s in scenarios] == [False, True]
    assert all(s.config.seed == 7 for s in scenarios)
    assert scenarios[1].config.lookahead_override is None
    assert (baseline.seed, promising.promises_enabled) == (7, True)


def test_batch_summarizes_seeds(load, mocker, tmp_path):
    spans = {(0, False): 460, (0, True): 350, (1, False): 440, (1, True): 350}

    def fake_run(scenario):
        key = (scenario.config.seed, scenario.config.promises_enabled)
        return report(spans[key], key[1], key[0])

    mocker.patch.object(experiments, "run", side_effect=fake_run)
    emitted = mocker.patch.object(experiments, "emit_all")
    summary = batch(load("s3-promises"), seeds=2, out_dir=tmp_path)
    assert summary.seeds == [0, 1]
    assert summary.baseline_makespans == [460, 440]
    assert summary.baseline_mean == 450.0
    assert summary.baseline_std == 10.0
    assert summary.promises_mean == 350.0
    assert summary.promises_std == 0.0
    assert summary.improvement_percent == pytest.approx(22.22)
    assert emitted.call_count == 4
    assert emitted.call_args_list[0].args[1] == tmp_path / "seed-0" / "baseline"


def test_batch_with_failed_run_has_no_mean(load, mocker):
    mocker.patch.object(experiments, "run", side_effect=lambda s: report(None if s.config.promises_enabled else 400))
    summary = batch(load("s3-promises"), seeds=1)
    assert summary.baseline_mean == 400.0
    assert summary.promises_mean is None
    assert summary.improvement_percent is None
