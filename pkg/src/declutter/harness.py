"""Experiment orchestration: scene corpora, batch trials, and reports.

A plan names the tiers, the number of scenes per tier, the policies, and a
base seed.  Scene and trial seeds are derived as pure functions of
(base seed, tier, scene index, policy), so adding a policy or scenes never
perturbs existing trials, and output files are byte-identical across runs
and across parallelism degrees (results are canonically ordered before
writing).
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from .config import SimConfig
from .errors import SchemaError
from .metrics import (
    PolicySummary,
    TimeModel,
    TrialReport,
    aggregate,
    build_report,
    summary_csv,
)
from .policies import PolicyConfig, run_policy
from .rng import derive_seed
from .tableware import SceneState, Tier, TierConfig, generate_scene, scene_to_json


@dataclass
class ExperimentPlan:
    tiers: list[Tier]
    scenes_per_tier: int
    policies: list[PolicyConfig]
    base_seed: int
    time_model: TimeModel | None = None
    p_fail: float = 0.0
    bin_delays: list[float] = field(default_factory=list)

    def __post_init__(self):
        # Empty or nonsensical plans are usage errors, not file-format ones.
        if self.scenes_per_tier < 1:
            raise ValueError("scenes_per_tier must be >= 1")
        if not self.policies:
            raise ValueError("plan needs at least one policy")
        if not self.tiers:
            raise ValueError("plan needs at least one tier")
        if not 0.0 <= self.p_fail <= 1.0:
            raise ValueError("p_fail must be a probability")


def plan_from_json(text: str) -> ExperimentPlan:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"plan file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaError("plan must be a JSON object")
    try:
        tiers = [Tier(t) for t in data["tiers"]]
    except (KeyError, ValueError, TypeError) as exc:
        raise SchemaError(f"plan tiers malformed: {exc}") from exc
    policies = []
    for p in data.get("policies", []):
        try:
            if isinstance(p, str):
                policies.append(PolicyConfig.named(p))
            elif isinstance(p, dict):
                policies.append(
                    PolicyConfig.named(p.get("kind", ""), p.get("utensil_stacking"))
                )
            else:
                raise ValueError(f"not a policy entry: {p!r}")
        except ValueError as exc:
            raise SchemaError(f"plan policy malformed: {exc}") from exc
    tm = None
    if "time_model" in data:
        t = data["time_model"]
        try:
            tm = TimeModel(
                grasp_s=float(t["grasp_s"]),
                pull_s=float(t["pull_s"]),
                stack_s=float(t["stack_s"]),
                travel_s=float(t["travel_s"]),
                bin_delay_s=float(t.get("bin_delay_s", 0.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"plan time_model malformed: {exc}") from exc
    try:
        scenes_per_tier = int(data.get("scenes_per_tier", 3))
        base_seed = int(data["base_seed"])
        p_fail = float(data.get("p_fail", 0.0))
        bin_delays = [float(d) for d in data.get("bin_delays", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"plan malformed: {exc}") from exc
    return ExperimentPlan(
        tiers=tiers,
        scenes_per_tier=scenes_per_tier,
        policies=policies,
        base_seed=base_seed,
        time_model=tm,
        p_fail=p_fail,
        bin_delays=bin_delays,
    )


def scene_seed(base_seed: int, tier: Tier, index: int) -> int:
    return derive_seed(base_seed, "scene", tier.value, index)


def trial_seed(base_seed: int, tier: Tier, index: int, policy: str) -> int:
    return derive_seed(base_seed, "trial", tier.value, index, policy)


def scene_filename(tier: Tier, base_seed: int, index: int) -> str:
    return f"scene_{tier.value}_{base_seed}_{index}.json"


def generate_scene_files(
    tier: Tier, count: int, seed: int, out_dir: str | Path, sim: SimConfig
) -> list[Path]:
    """Write ``count`` scene files for a tier; idempotent for equal inputs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = TierConfig.preset(tier)
    paths = []
    for k in range(count):
        scene = generate_scene(cfg, scene_seed(seed, tier, k), sim.dish_specs, sim.workspace)
        path = out / scene_filename(tier, seed, k)
        path.write_text(scene_to_json(scene) + "\n")
        paths.append(path)
    return paths


@dataclass(frozen=True)
class _TrialSpec:
    tier: Tier
    index: int
    policy: PolicyConfig
    scene_seed: int
    trial_seed: int


def _run_trial(args: tuple[_TrialSpec, SimConfig]) -> tuple[TrialReport, list[dict]]:
    spec, sim = args
    cfg = TierConfig.preset(spec.tier)
    scene = generate_scene(cfg, spec.scene_seed, sim.dish_specs, sim.workspace)
    trace = run_policy(scene, spec.policy, sim, spec.trial_seed)
    tm = sim.time_model
    report = build_report(trace, tm, scene_id=f"{spec.tier.value}_{spec.index}")
    return report, [e.to_json_obj() for e in trace.events]


def run_plan(
    plan: ExperimentPlan, sim: SimConfig, out_dir: str | Path, jobs: int = 1
) -> tuple[list[TrialReport], list[PolicySummary]]:
    """Execute every trial in the plan and write the report files.

    Writes ``trials.jsonl`` (one report per line), ``summary.csv``, and,
    when a bin-delay sweep is configured, one ``summary_delay_<d>s.csv``
    per delay.  Trials are independent and may run in parallel; output
    order is canonicalized to (tier, scene index, policy) first.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sim = replace(sim, p_fail=plan.p_fail)
    if plan.time_model is not None:
        sim = replace(sim, time_model=plan.time_model)

    specs = [
        _TrialSpec(
            tier=tier,
            index=k,
            policy=policy,
            scene_seed=scene_seed(plan.base_seed, tier, k),
            trial_seed=trial_seed(plan.base_seed, tier, k, policy.kind.value),
        )
        for tier in plan.tiers
        for k in range(plan.scenes_per_tier)
        for policy in plan.policies
    ]

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_trial, [(s, sim) for s in specs]))
    else:
        results = [_run_trial((s, sim)) for s in specs]

    reports = [r for r, _ in results]

    with (out / "trials.jsonl").open("w") as fh:
        for report, _ in results:
            fh.write(json.dumps(report.to_json_obj()) + "\n")
    with (out / "traces.jsonl").open("w") as fh:
        for report, events in results:
            for event in events:
                record = {"scene_id": report.scene_id, "policy": report.policy}
                record.update(event)
                fh.write(json.dumps(record) + "\n")

    summaries = aggregate(reports)
    (out / "summary.csv").write_text(summary_csv(summaries))

    for delay in plan.bin_delays:
        swept = [_with_delay(r, sim.time_model, delay) for r in reports]
        rows = aggregate(swept)
        name = f"summary_delay_{_fmt_delay(delay)}s.csv"
        (out / name).write_text(summary_csv(rows))

    return reports, summaries


def _fmt_delay(delay: float) -> str:
    return str(int(delay)) if float(delay).is_integer() else str(delay)


def _with_delay(report: TrialReport, tm: TimeModel, delay: float) -> TrialReport:
    """Report with the bin moved further away: travel gains ``delay`` each way."""
    extra = 2.0 * (delay - tm.bin_delay_s) * report.trips
    return TrialReport(
        scene_id=report.scene_id,
        tier=report.tier,
        policy=report.policy,
        trips=report.trips,
        objects_cleared=report.objects_cleared,
        opt=report.opt,
        time_s=report.time_s + extra,
        failures=report.failures,
    )


def run_scene_file(
    scene: SceneState,
    policy: PolicyConfig,
    sim: SimConfig,
    seed: int | None = None,
    scene_id: str = "scene",
) -> tuple[TrialReport, list[dict]]:
    """Run one policy on one loaded scene; returns the report and raw events."""
    if seed is None:
        seed = derive_seed(scene.rng_seed, "trial", policy.kind.value)
    trace = run_policy(scene, policy, sim, seed)
    report = build_report(trace, sim.time_model, scene_id=scene_id)
    return report, [e.to_json_obj() for e in trace.events]
