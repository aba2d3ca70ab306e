"""Time-model calibration against the reference benchmark table."""

import pytest

from declutter.config import DEFAULT_TIME_MODEL, default_sim_config
from declutter.errors import SchemaError
from declutter.timefit import (
    REFERENCE_ROWS,
    fit_time_model,
    parse_reference_csv,
    reference_table_csv,
    simulated_counts,
)


@pytest.fixture(scope="module")
def counts():
    return simulated_counts(default_sim_config())


def test_reference_table_shape():
    assert len(REFERENCE_ROWS) == 15
    tiers = {row[0] for row in REFERENCE_ROWS}
    assert tiers == {"t0_cups", "t0_bowls", "t0_utensils", "t1", "t2"}
    policies = {row[1] for row in REFERENCE_ROWS}
    assert policies == {"random", "pull", "stack"}


def test_reference_csv_round_trip():
    rows = parse_reference_csv(reference_table_csv())
    assert len(rows) == 15
    assert rows[0] == ("t0_cups", "random", 78.2)


def test_parse_rejects_missing_columns():
    with pytest.raises(SchemaError):
        parse_reference_csv("tier,policy\nx,y\n")
    with pytest.raises(SchemaError):
        parse_reference_csv("tier,policy,time_s\n")


def test_counts_cover_all_rows(counts):
    assert set(counts) == {(t, p) for t, p, *_ in REFERENCE_ROWS}
    # Every failure-free action takes exactly one grasp and one trip.
    for (tier, policy), (grasps, pulls, stacks, trips) in counts.items():
        assert grasps == pytest.approx(trips)


def test_fit_residual_and_nonnegativity(counts):
    result = fit_time_model(counts)
    assert result.relative_rms_residual <= 0.20
    tm = result.time_model
    assert min(tm.grasp_s, tm.pull_s, tm.stack_s, tm.travel_s) >= 0.0


def test_fit_matches_shipped_defaults(counts):
    result = fit_time_model(counts)
    assert result.time_model.grasp_s == pytest.approx(DEFAULT_TIME_MODEL.grasp_s, abs=1e-3)
    assert result.time_model.pull_s == pytest.approx(DEFAULT_TIME_MODEL.pull_s, abs=1e-3)
    assert result.time_model.stack_s == pytest.approx(DEFAULT_TIME_MODEL.stack_s, abs=1e-3)
    assert result.time_model.travel_s == pytest.approx(DEFAULT_TIME_MODEL.travel_s, abs=1e-3)


def test_predicted_pull_fastest_per_tier(counts):
    result = fit_time_model(counts)
    pred = {(r["tier"], r["policy"]): r["predicted"] for r in result.rows}
    for tier in ("t0_cups", "t0_bowls", "t0_utensils", "t1", "t2"):
        assert pred[(tier, "pull")] <= pred[(tier, "stack")] + 1e-9
        assert pred[(tier, "pull")] <= pred[(tier, "random")] + 1e-9


def test_fit_rejects_unknown_rows(counts):
    with pytest.raises(SchemaError):
        fit_time_model(counts, [("t9", "random", 50.0)])
