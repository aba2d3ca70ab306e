"""Deterministic 2D tabletop decluttering simulator and benchmark harness."""

from .actions import (
    Action,
    Grasp,
    GraspAction,
    GripperSpec,
    PullAction,
    PullGrasp,
    StackGrasp,
    StackPlacement,
    TraceEvent,
    apply,
    grasp_gap,
    grasp_points,
    mog_allowable,
    mog_grasp,
    plan_pull,
    pull_allowable,
    stack_allowable,
)
from .config import SimConfig, default_sim_config, load_config
from .errors import (
    EmptyTrace,
    InfeasibleAction,
    MissingBaseline,
    NotAllowable,
    PlacementExhausted,
    SchemaError,
)
from .geometry import (
    Disc,
    Footprint,
    OrientedRect,
    Point2,
    corridor_clear,
    overlaps,
    rim_point,
)
from .harness import ExperimentPlan, plan_from_json, run_plan
from .metrics import (
    PolicySummary,
    TimeModel,
    TrialReport,
    aggregate,
    build_report,
    model_time,
    objects_per_trip,
    summary_csv,
)
from .policies import (
    PairSelection,
    PolicyConfig,
    PolicyKind,
    Trace,
    UtensilStacking,
    next_action,
    pull_policy,
    random_policy,
    run_policy,
    stack_policy,
)
from .rng import SplitMix64, derive_seed
from .tableware import (
    Dish,
    DishKind,
    DishSpec,
    SceneState,
    Stack,
    Tier,
    TierConfig,
    default_dish_specs,
    generate_scene,
    scene_from_json,
    scene_to_json,
    stack_top_lip_height,
    validate,
)

__version__ = "0.1.0"
