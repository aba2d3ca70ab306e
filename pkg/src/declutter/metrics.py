"""Trip/failure accounting, objects-per-trip, and the parametric time model.

Objects per trip (OpT) is the total number of dishes deposited in the bin
divided by the number of trips taken.  Modeled clearing time charges a flat
cost per primitive phase (grasp, pull, stack placement) plus a two-way
travel cost per trip; ``bin_delay_s`` adds to travel in each direction and
models moving the bin further from the workspace.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EmptyTrace, MissingBaseline
from .policies import Trace


@dataclass(frozen=True)
class TimeModel:
    grasp_s: float
    pull_s: float
    stack_s: float
    travel_s: float
    bin_delay_s: float = 0.0

    def __post_init__(self):
        for name in ("grasp_s", "pull_s", "stack_s", "travel_s", "bin_delay_s"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass
class TrialReport:
    """Per-trial metrics in the shape the summary CSV aggregates."""

    scene_id: str
    tier: str
    policy: str
    trips: int
    objects_cleared: int
    opt: float
    time_s: float
    failures: int

    def to_json_obj(self) -> dict:
        return {
            "scene_id": self.scene_id,
            "tier": self.tier,
            "policy": self.policy,
            "trips": self.trips,
            "objects_cleared": self.objects_cleared,
            "opt": round(self.opt, 6),
            "time_s": round(self.time_s, 6),
            "failures": self.failures,
        }


def objects_per_trip(trace: Trace) -> float:
    trips = trace.trips
    if trips == 0:
        raise EmptyTrace("no trips in trace; objects per trip undefined")
    return trace.objects_cleared / trips


def action_counts(trace: Trace) -> tuple[int, int, int, int]:
    """(grasp phases, pull phases, stack placements, trips) for a trace."""
    grasps = len(trace.events)
    pulls = sum(1 for e in trace.events if e.kind == "pull_grasp")
    stacks = sum(
        len(e.params.get("placements", ())) for e in trace.events
        if e.kind == "stack_grasp"
    )
    trips = trace.trips
    return grasps, pulls, stacks, trips


def model_time(trace: Trace, tm: TimeModel) -> float:
    """Modeled wall time: every grasp phase costs ``grasp_s``, pulls add
    ``pull_s``, each stack placement adds ``stack_s``, and every trip costs
    a round trip of ``2 * (travel_s + bin_delay_s)``.  Failed grasps cost
    their action time but no trip time.
    """
    grasps, pulls, stacks, trips = action_counts(trace)
    return (
        grasps * tm.grasp_s
        + pulls * tm.pull_s
        + stacks * tm.stack_s
        + trips * 2.0 * (tm.travel_s + tm.bin_delay_s)
    )


def build_report(trace: Trace, tm: TimeModel, scene_id: str) -> TrialReport:
    return TrialReport(
        scene_id=scene_id,
        tier=trace.tier,
        policy=trace.policy,
        trips=trace.trips,
        objects_cleared=trace.objects_cleared,
        opt=objects_per_trip(trace),
        time_s=model_time(trace, tm),
        failures=trace.failures,
    )


@dataclass
class PolicySummary:
    tier: str
    policy: str
    trials: int
    mean_time_s: float
    mean_opt: float  # pooled: total objects / total trips
    mean_opt_per_trial: float
    failures: int
    time_ratio: float
    opt_ratio: float


def aggregate(
    reports: Iterable[TrialReport], baseline: str = "random"
) -> list[PolicySummary]:
    """Aggregate trial reports per (tier, policy) against a baseline policy.

    ``opt_ratio`` is mean OpT of the policy over mean OpT of the baseline;
    ``time_ratio`` is mean baseline time over mean policy time, so values
    above 1 favor the policy.  Mean OpT is pooled (total objects over total
    trips); the per-trial average is reported alongside.
    """
    groups: dict[tuple[str, str], list[TrialReport]] = {}
    tier_order: list[str] = []
    policy_order: list[str] = []
    for report in reports:
        key = (report.tier, report.policy)
        groups.setdefault(key, []).append(report)
        if report.tier not in tier_order:
            tier_order.append(report.tier)
        if report.policy not in policy_order:
            policy_order.append(report.policy)

    def pooled_opt(rs: list[TrialReport]) -> float:
        trips = sum(r.trips for r in rs)
        if trips == 0:
            raise EmptyTrace("no trips across trials")
        return sum(r.objects_cleared for r in rs) / trips

    def mean_time(rs: list[TrialReport]) -> float:
        return sum(r.time_s for r in rs) / len(rs)

    summaries: list[PolicySummary] = []
    for tier in tier_order:
        base_key = (tier, baseline)
        if base_key not in groups:
            raise MissingBaseline(f"no '{baseline}' trials for tier {tier}")
        base_opt = pooled_opt(groups[base_key])
        base_time = mean_time(groups[base_key])
        for policy in policy_order:
            key = (tier, policy)
            if key not in groups:
                continue
            rs = groups[key]
            opt = pooled_opt(rs)
            time = mean_time(rs)
            summaries.append(
                PolicySummary(
                    tier=tier,
                    policy=policy,
                    trials=len(rs),
                    mean_time_s=time,
                    mean_opt=opt,
                    mean_opt_per_trial=sum(r.opt for r in rs) / len(rs),
                    failures=sum(r.failures for r in rs),
                    time_ratio=base_time / time if time > 0 else float("inf"),
                    opt_ratio=opt / base_opt,
                )
            )
    return summaries


CSV_HEADER = "tier,policy,mean_time_s,mean_opt,failures,time_ratio,opt_ratio"


def summary_csv(rows: Sequence[PolicySummary]) -> str:
    """Render summaries as the fixed-format CSV (byte-stable)."""
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r.tier},{r.policy},{r.mean_time_s:.3f},{r.mean_opt:.4f},"
            f"{r.failures},{r.time_ratio:.4f},{r.opt_ratio:.4f}"
        )
    return "\n".join(lines) + "\n"
