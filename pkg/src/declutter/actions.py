"""Action primitives, feasibility rules, and the scene transition function.

Three primitives clear the table:

* ``Grasp``: a top-down rim (or caging) grasp of one stack, or of two
  stacks at once when their grasp points are close and their gripped-rim
  heights match (a multi-object grasp).
* ``PullGrasp``: drag one stack into contact with another along the line
  between their centers, then multi-object grasp the pair.
* ``StackGrasp``: place one stack on top of another (one or more
  placements), then grasp the merged pile.

Every action ends with a grasp; a successful grasp deposits the carried
dishes in the bin and costs one trip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

from .errors import InfeasibleAction, NotAllowable
from .geometry import (
    Point2,
    closest_point_on_segment,
    corridor_clear,
    dist,
    normalize_angle,
    rim_point,
    segment_segment_nearest,
    sweep_first_contact,
)
from .rng import SplitMix64
from .tableware import (
    DishKind,
    SceneState,
    Stack,
    stack_circumradius,
    stack_footprints,
    stack_grasp_span,
    stack_top_lip_height,
)

if TYPE_CHECKING:
    from .config import SimConfig


@dataclass(frozen=True)
class GripperSpec:
    """Parallel-jaw gripper dimensions and the height-similarity threshold."""

    max_opening: float = 8.5
    jaw_height: float = 4.5
    closed_width: float = 2.0
    height_similarity_threshold: float = 1.0

    def __post_init__(self):
        if min(self.max_opening, self.jaw_height, self.closed_width,
               self.height_similarity_threshold) <= 0:
            raise ValueError("gripper dimensions must be positive")
        if self.closed_width >= self.max_opening:
            raise ValueError("closed_width must be below max_opening")


@dataclass(frozen=True)
class GraspAction:
    point: Point2
    z: float
    theta: float
    targets: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= len(self.targets) <= 2:
            raise ValueError("a grasp targets one or two stacks")


@dataclass(frozen=True)
class PullAction:
    start: Point2
    start_z: float
    start_theta: float
    end: Point2
    end_z: float
    end_theta: float
    mover: int
    anchor: int

    def __post_init__(self):
        if self.mover == self.anchor:
            raise ValueError("pull mover and anchor must differ")


@dataclass(frozen=True)
class StackPlacement:
    inner_grasp: GraspAction
    place: Point2
    place_z: float
    place_theta: float
    lifted: int
    base: int

    def __post_init__(self):
        if self.lifted == self.base:
            raise ValueError("cannot stack a stack onto itself")


@dataclass(frozen=True)
class Grasp:
    grasp: GraspAction


@dataclass(frozen=True)
class PullGrasp:
    pull: PullAction
    grasp: GraspAction


@dataclass(frozen=True)
class StackGrasp:
    placements: tuple[StackPlacement, ...]
    grasp: GraspAction

    def __post_init__(self):
        if not self.placements:
            raise ValueError("stack-grasp needs at least one placement")


Action = Grasp | PullGrasp | StackGrasp


@dataclass
class TraceEvent:
    """One executed action, in the JSONL trace schema."""

    t: int
    kind: str
    targets: tuple[int, ...]
    moved_to_bin: tuple[int, ...]
    trip: bool
    params: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {
            "t": self.t,
            "action": self.kind,
            "targets": list(self.targets),
            "moved_to_bin": list(self.moved_to_bin),
            "trip": self.trip,
            "params": self.params,
        }


# ---------------------------------------------------------------------------
# Grasp candidates
# ---------------------------------------------------------------------------


def grasp_points(
    state: SceneState, stack_id: int, rng: SplitMix64, sim: "SimConfig"
) -> GraspAction:
    """Grasp parameters for a single stack.

    Disc-bottom stacks are gripped on the bottom dish's rim at a uniformly
    sampled angle, so the whole pile is carried; utensil-bottom stacks are
    caged at the utensil's center with the gripper perpendicular to its axis.
    """
    stack = state.stacks[stack_id]
    bottom = state.dishes[stack.bottom]
    spec = sim.dish_specs[bottom.kind]
    if bottom.kind is DishKind.UTENSIL:
        return GraspAction(
            point=stack.base,
            z=spec.grasp_height,
            theta=normalize_angle(bottom.theta + math.pi / 2.0),
            targets=(stack_id,),
        )
    angle = rng.uniform(0.0, 2.0 * math.pi)
    point, theta = rim_point(stack.base, spec.radius, angle)
    return GraspAction(point=point, z=spec.grasp_height, theta=theta, targets=(stack_id,))


def _grasp_locus(state: SceneState, stack: Stack, sim: "SimConfig"):
    """Locus of candidate grasp points for a stack.

    The rim circle of the bottom dish for discs; the axis segment for
    utensils (candidates run along the utensil's centerline).
    """
    bottom = state.dishes[stack.bottom]
    spec = sim.dish_specs[bottom.kind]
    if bottom.kind is DishKind.UTENSIL:
        hx = (spec.length / 2.0) * math.cos(bottom.theta)
        hy = (spec.length / 2.0) * math.sin(bottom.theta)
        return (
            "segment",
            Point2(stack.base.x - hx, stack.base.y - hy),
            Point2(stack.base.x + hx, stack.base.y + hy),
        )
    return ("circle", stack.base, spec.radius)


def grasp_gap(
    state: SceneState, a: int, b: int, sim: "SimConfig"
) -> tuple[float, Point2, Point2]:
    """Lateral distance between the two stacks' nearest grasp points.

    Returns (gap, point_on_a, point_on_b).  The gap can be negative when
    the loci interpenetrate (transient contact during a pull).
    """
    la = _grasp_locus(state, state.stacks[a], sim)
    lb = _grasp_locus(state, state.stacks[b], sim)
    if la[0] == "circle" and lb[0] == "circle":
        _, ca, ra = la
        _, cb, rb = lb
        d = dist(ca, cb)
        if d < 1e-12:
            ux, uy = 1.0, 0.0
        else:
            ux, uy = (cb.x - ca.x) / d, (cb.y - ca.y) / d
        pa = Point2(ca.x + ra * ux, ca.y + ra * uy)
        pb = Point2(cb.x - rb * ux, cb.y - rb * uy)
        return d - ra - rb, pa, pb
    if la[0] == "circle" or lb[0] == "circle":
        flipped = la[0] != "circle"
        circle = la if not flipped else lb
        segment = lb if not flipped else la
        _, c, r = circle
        _, s1, s2 = segment
        q = closest_point_on_segment(c, s1, s2)
        d = dist(c, q)
        if d < 1e-12:
            ux, uy = 1.0, 0.0
        else:
            ux, uy = (q.x - c.x) / d, (q.y - c.y) / d
        p_circle = Point2(c.x + r * ux, c.y + r * uy)
        gap = d - r
        return (gap, p_circle, q) if not flipped else (gap, q, p_circle)
    _, p1, p2 = la
    _, q1, q2 = lb
    gap, wp, wq = segment_segment_nearest(p1, p2, q1, q2)
    return gap, wp, wq


# ---------------------------------------------------------------------------
# Feasibility predicates
# ---------------------------------------------------------------------------


def _grip_height(state: SceneState, stack: Stack, sim: "SimConfig") -> float:
    """Height of the rim (or caging point) the gripper closes on: the
    bottom dish's grasp height, so the whole pile is carried."""
    return sim.dish_specs[state.dishes[stack.bottom].kind].grasp_height


def mog_grasp(
    state: SceneState, a: int, b: int, sim: "SimConfig"
) -> GraspAction | None:
    """Witness multi-object grasp for stacks ``a`` and ``b``, or None.

    Allowable when the gripped-rim heights of the two stacks are within the
    similarity threshold (a height mismatch makes the gripper collide with
    the taller item or miss the shorter one), everything riding above the
    grip fits within the jaw height, and the lateral distance between the
    stacks' nearest grasp points is below the gripper's max opening.  The
    witness grasp is centered at the midpoint of those points at the taller
    grip height.
    """
    if a == b:
        raise ValueError("multi-object grasp needs two distinct stacks")
    sa, sb = state.stacks[a], state.stacks[b]
    grip_a = _grip_height(state, sa, sim)
    grip_b = _grip_height(state, sb, sim)
    if abs(grip_a - grip_b) > sim.gripper.height_similarity_threshold + 1e-9:
        return None
    lip_a = stack_top_lip_height(sa, state.dishes, sim.dish_specs)
    lip_b = stack_top_lip_height(sb, state.dishes, sim.dish_specs)
    if max(lip_a, lip_b) - min(grip_a, grip_b) > sim.gripper.jaw_height + 1e-9:
        return None
    gap, pa, pb = grasp_gap(state, a, b, sim)
    if gap >= sim.gripper.max_opening:
        return None
    mid = Point2((pa.x + pb.x) / 2.0, (pa.y + pb.y) / 2.0)
    span = dist(pa, pb)
    if span > 1e-9:
        theta = normalize_angle(math.atan2(pb.y - pa.y, pb.x - pa.x))
    else:
        theta = normalize_angle(math.atan2(sb.base.y - sa.base.y, sb.base.x - sa.base.x))
    lo, hi = (a, b) if a < b else (b, a)
    return GraspAction(point=mid, z=max(grip_a, grip_b), theta=theta, targets=(lo, hi))


def mog_allowable(state: SceneState, a: int, b: int, sim: "SimConfig") -> bool:
    return mog_grasp(state, a, b, sim) is not None


def _pull_contact(
    state: SceneState, mover: Stack, anchor: Stack, sim: "SimConfig"
) -> Point2 | None:
    """Mover base position at first footprint contact along the center line."""
    d = dist(mover.base, anchor.base)
    if d < 1e-9:
        return None
    ux = (anchor.base.x - mover.base.x) / d
    uy = (anchor.base.y - mover.base.y) / d
    mover_fps = stack_footprints(state, mover, sim.dish_specs)
    anchor_fps = stack_footprints(state, anchor, sim.dish_specs)
    best = None
    for mfp in mover_fps:
        for afp in anchor_fps:
            t = sweep_first_contact(mfp, afp, ux, uy, d)
            if t is not None and (best is None or t < best):
                best = t
    if best is None:
        return None
    return Point2(mover.base.x + best * ux, mover.base.y + best * uy)


def _moved_state(state: SceneState, stack_id: int, new_base: Point2) -> SceneState:
    moved = state.clone()
    stack = moved.stacks[stack_id]
    moved.stacks[stack_id] = replace(stack, base=new_base)
    for dish_id in stack.dishes:
        moved.dishes[dish_id] = replace(moved.dishes[dish_id], pos=new_base)
    return moved


def pull_allowable(state: SceneState, mover: int, anchor: int, sim: "SimConfig") -> bool:
    """True iff pulling ``mover`` into contact with ``anchor`` is worthwhile.

    Requires similar gripped-rim heights, a corridor between the two stacks
    free of any other object (so nothing is displaced on the way), and that
    the pair passes the multi-object grasp test once in contact; a pull
    that cannot end in a grasp would be a wasted action.
    """
    if mover == anchor:
        return False
    sm = state.stacks.get(mover)
    sa = state.stacks.get(anchor)
    if sm is None or sa is None:
        return False
    specs = sim.dish_specs
    if abs(_grip_height(state, sm, sim) - _grip_height(state, sa, sim)) > (
        sim.gripper.height_similarity_threshold + 1e-9
    ):
        return False
    end = _pull_contact(state, sm, sa, sim)
    if end is None:
        return False
    half_width = stack_circumradius(state, sm, specs) + sim.pull_clearance_margin
    obstacles = [
        fp
        for other in state.stacks.values()
        if other.id not in (mover, anchor)
        for fp in stack_footprints(state, other, specs)
    ]
    if not corridor_clear(sm.base, end, half_width, obstacles):
        return False
    return mog_allowable(_moved_state(state, mover, end), mover, anchor, sim)


def plan_pull(
    state: SceneState, mover: int, anchor: int, rng: SplitMix64, sim: "SimConfig"
) -> PullAction:
    """Plan the pull of ``mover`` to contact with ``anchor``.

    The pull starts at the mover's center (internal contact for discs, a
    cage for utensils, which therefore keep their orientation) and ends with
    the footprints touching.  Gripper orientation is the direction of
    motion.  Raises NotAllowable when the pull feasibility test fails.
    """
    if not pull_allowable(state, mover, anchor, sim):
        raise NotAllowable(f"pull of stack {mover} to stack {anchor} is not allowable")
    sm = state.stacks[mover]
    sa = state.stacks[anchor]
    end = _pull_contact(state, sm, sa, sim)
    assert end is not None
    theta = normalize_angle(math.atan2(end.y - sm.base.y, end.x - sm.base.x))
    lip = stack_top_lip_height(sm, state.dishes, sim.dish_specs)
    return PullAction(
        start=sm.base,
        start_z=lip,
        start_theta=theta,
        end=end,
        end_z=lip,
        end_theta=theta,
        mover=mover,
        anchor=anchor,
    )


def stack_allowable(
    state: SceneState, lifted: int, base: int, sim: "SimConfig"
) -> bool:
    """True iff ``lifted`` may be placed on ``base`` and the result grasped.

    The lifted stack's bottom dish must be no wider than the base stack's
    top dish (utensils count as their half width, so they may sit on
    anything, including another utensil), the lifted stack must itself be
    rim-graspable, and the merged pile's lip span must stay within the jaw
    height, otherwise the follow-up grasp would fail.
    """
    if lifted == base:
        return False
    sl = state.stacks.get(lifted)
    sb = state.stacks.get(base)
    if sl is None or sb is None:
        return False
    specs = sim.dish_specs
    dishes = state.dishes
    r_lifted = specs[dishes[sl.bottom].kind].effective_radius
    r_base_top = specs[dishes[sb.top].kind].effective_radius
    if r_lifted > r_base_top + 1e-9:
        return False
    jaw = sim.gripper.jaw_height
    if stack_grasp_span(sl, dishes, specs) > jaw + 1e-9:
        return False
    merged = replace(sb, dishes=sb.dishes + sl.dishes)
    return stack_grasp_span(merged, dishes, specs) <= jaw + 1e-9


# ---------------------------------------------------------------------------
# Transition
# ---------------------------------------------------------------------------


def _bin_stacks(state: SceneState, stack_ids: tuple[int, ...]) -> tuple[int, ...]:
    moved: list[int] = []
    for sid in stack_ids:
        stack = state.stacks.pop(sid)
        moved.extend(stack.dishes)
    state.bin = state.bin + tuple(moved)
    state.trips_taken += 1
    return tuple(moved)


def _taller_first(state: SceneState, targets: tuple[int, ...], sim: "SimConfig") -> int:
    """Target kept by a failed two-stack grasp: the taller lip wins the jaws."""
    def key(sid: int):
        lip = stack_top_lip_height(state.stacks[sid], state.dishes, sim.dish_specs)
        return (-lip, sid)

    return min(targets, key=key)


def _point_params(p: Point2) -> list[float]:
    return [p.x, p.y]


def _grasp_params(g: GraspAction) -> dict:
    return {"point": _point_params(g.point), "z": g.z, "theta": g.theta}


def apply(
    state: SceneState,
    action: Action,
    sim: "SimConfig",
    rng: SplitMix64 | None = None,
) -> tuple[SceneState, list[TraceEvent]]:
    """Execute one action, returning the successor state and trace events.

    Raises InfeasibleAction (with the violated predicate's name) if the
    action's feasibility test fails in ``state``.  With a nonzero
    ``sim.p_fail`` and an rng, the final grasp of each action can fail:
    a failed single-stack grasp leaves the table unchanged (no trip); a
    failed two-stack grasp carries only the taller stack.  Pull and stack
    phases still execute before a failed grasp, so consolidations persist.
    """
    new = state.clone()
    failed = bool(
        sim.p_fail > 0.0 and rng is not None and rng.random() < sim.p_fail
    )

    if isinstance(action, Grasp):
        targets = action.grasp.targets
        for sid in targets:
            if sid not in new.stacks:
                raise InfeasibleAction("target_on_table", f"stack {sid} not on table")
        if len(targets) == 2 and not mog_allowable(new, targets[0], targets[1], sim):
            raise InfeasibleAction("mog_allowable", f"stacks {targets}")
        event = TraceEvent(
            t=-1, kind="grasp", targets=targets, moved_to_bin=(),
            trip=False, params=_grasp_params(action.grasp),
        )
        if failed:
            event.params["failed"] = True
            if len(targets) == 2:
                kept = _taller_first(new, targets, sim)
                dropped = targets[0] if targets[1] == kept else targets[1]
                event.moved_to_bin = _bin_stacks(new, (kept,))
                event.trip = True
                event.params["abandoned"] = dropped
        else:
            event.moved_to_bin = _bin_stacks(new, targets)
            event.trip = True
        return new, [event]

    if isinstance(action, PullGrasp):
        mover, anchor = action.pull.mover, action.pull.anchor
        if not pull_allowable(new, mover, anchor, sim):
            raise InfeasibleAction("pull_allowable", f"stacks ({mover}, {anchor})")
        new = _moved_state(new, mover, action.pull.end)
        targets = action.grasp.targets
        event = TraceEvent(
            t=-1, kind="pull_grasp", targets=targets, moved_to_bin=(),
            trip=False,
            params={
                "pull": {
                    "start": _point_params(action.pull.start),
                    "end": _point_params(action.pull.end),
                    "theta": action.pull.start_theta,
                    "mover": mover,
                    "anchor": anchor,
                },
                "grasp": _grasp_params(action.grasp),
            },
        )
        if failed:
            event.params["failed"] = True
            kept = _taller_first(new, targets, sim)
            dropped = targets[0] if targets[1] == kept else targets[1]
            event.moved_to_bin = _bin_stacks(new, (kept,))
            event.trip = True
            event.params["abandoned"] = dropped
        else:
            event.moved_to_bin = _bin_stacks(new, targets)
            event.trip = True
        return new, [event]

    # StackGrasp
    placement_params = []
    for placement in action.placements:
        lifted, base = placement.lifted, placement.base
        if not stack_allowable(new, lifted, base, sim):
            raise InfeasibleAction("stack_allowable", f"stack {lifted} onto {base}")
        lifted_stack = new.stacks.pop(lifted)
        base_stack = new.stacks[base]
        new.stacks[base] = replace(
            base_stack, dishes=base_stack.dishes + lifted_stack.dishes
        )
        for dish_id in lifted_stack.dishes:
            new.dishes[dish_id] = replace(new.dishes[dish_id], pos=base_stack.base)
        placement_params.append(
            {"lifted": lifted, "base": base, "place": _point_params(placement.place)}
        )
    targets = action.grasp.targets
    for sid in targets:
        if sid not in new.stacks:
            raise InfeasibleAction("target_on_table", f"stack {sid} not on table")
    event = TraceEvent(
        t=-1, kind="stack_grasp", targets=targets, moved_to_bin=(),
        trip=False,
        params={"placements": placement_params, "grasp": _grasp_params(action.grasp)},
    )
    if failed:
        event.params["failed"] = True
    else:
        event.moved_to_bin = _bin_stacks(new, targets)
        event.trip = True
    return new, [event]
