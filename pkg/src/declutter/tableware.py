"""Dishes, stacks, scenes, and the tiered random scene generator.

A scene is a value: generation is a pure function of (tier config, seed),
and simulation produces new scene values rather than mutating shared state.
Scenes serialize to a fixed-field-order JSON schema with 6-decimal floats so
identical inputs always produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from enum import Enum

from .errors import PlacementExhausted, SchemaError
from .geometry import (
    Disc,
    Footprint,
    OrientedRect,
    Point2,
    circumradius,
    normalize_angle,
    overlaps,
)
from .rng import SplitMix64

MAX_RESAMPLES = 10_000

DEFAULT_WORKSPACE = (78.0, 61.0)


class DishKind(str, Enum):
    CUP = "cup"
    BOWL = "bowl"
    UTENSIL = "utensil"


@dataclass(frozen=True)
class DishSpec:
    """Physical description of one kind of dish.

    Cups and bowls are discs with a ``radius``; utensils are oriented
    rectangles with ``length`` x ``width``.  ``grasp_height`` is the height
    of the rim (or caging point) above the table; ``nest_offset`` is the
    vertical rise each nested dish of this kind adds to a stack.
    """

    kind: DishKind
    radius: float | None = None
    length: float | None = None
    width: float | None = None
    grasp_height: float = 1.0
    nest_offset: float = 1.0

    def __post_init__(self):
        if self.kind is DishKind.UTENSIL:
            if not (self.length and self.width and self.length >= self.width > 0):
                raise ValueError("utensil spec needs length >= width > 0")
        else:
            if not (self.radius and self.radius > 0):
                raise ValueError(f"{self.kind.value} spec needs radius > 0")
        if self.grasp_height <= 0 or self.nest_offset <= 0:
            raise ValueError("grasp_height and nest_offset must be positive")

    @property
    def effective_radius(self) -> float:
        """Radius used for stack stability ordering (half width for utensils)."""
        if self.kind is DishKind.UTENSIL:
            return self.width / 2.0
        return self.radius

    @property
    def circumscribed_radius(self) -> float:
        if self.kind is DishKind.UTENSIL:
            return math.hypot(self.length / 2.0, self.width / 2.0)
        return self.radius


def default_dish_specs() -> dict[DishKind, DishSpec]:
    """Default tableware set: 4.5 cm cups, 8.5 cm bowls, 17 x 1.8 cm utensils."""
    return {
        DishKind.CUP: DishSpec(DishKind.CUP, radius=4.5, grasp_height=9.0, nest_offset=2.0),
        DishKind.BOWL: DishSpec(DishKind.BOWL, radius=8.5, grasp_height=5.0, nest_offset=2.0),
        DishKind.UTENSIL: DishSpec(
            DishKind.UTENSIL, length=17.0, width=1.8, grasp_height=2.0, nest_offset=0.5
        ),
    }


@dataclass(frozen=True)
class Dish:
    id: int
    kind: DishKind
    pos: Point2
    theta: float = 0.0  # meaningful only for utensils, in [0, pi)


@dataclass(frozen=True)
class Stack:
    """Ordered pile of dishes sharing a base position, bottom to top.

    Singletons are stacks of size 1.
    """

    id: int
    dishes: tuple[int, ...]
    base: Point2

    def __post_init__(self):
        if not self.dishes:
            raise ValueError("stack must contain at least one dish")

    @property
    def bottom(self) -> int:
        return self.dishes[0]

    @property
    def top(self) -> int:
        return self.dishes[-1]


@dataclass
class SceneState:
    """Workspace contents: live stacks, the bin, and the trip counter."""

    workspace: tuple[float, float]
    stacks: dict[int, Stack]
    dishes: dict[int, Dish]
    bin: tuple[int, ...] = ()
    trips_taken: int = 0
    rng_seed: int = 0
    tier: str = "custom"

    def clone(self) -> "SceneState":
        return SceneState(
            workspace=self.workspace,
            stacks=dict(self.stacks),
            dishes=dict(self.dishes),
            bin=self.bin,
            trips_taken=self.trips_taken,
            rng_seed=self.rng_seed,
            tier=self.tier,
        )

    def on_table_dish_ids(self) -> list[int]:
        ids: list[int] = []
        for stack in self.stacks.values():
            ids.extend(stack.dishes)
        return sorted(ids)

    def stack_containing(self, dish_id: int) -> Stack:
        for stack in self.stacks.values():
            if dish_id in stack.dishes:
                return stack
        raise KeyError(f"dish {dish_id} is not on the table")


class Tier(str, Enum):
    T0_CUPS = "t0_cups"
    T0_BOWLS = "t0_bowls"
    T0_UTENSILS = "t0_utensils"
    T1 = "t1"
    T2 = "t2"


@dataclass(frozen=True)
class TierConfig:
    """Scene difficulty class: item counts and permitted initial stacking."""

    tier: Tier
    n_cups: int
    n_bowls: int
    n_utensils: int
    max_intersections: int = 0
    max_initial_stack: int = 1

    @classmethod
    def preset(cls, tier: Tier | str) -> "TierConfig":
        tier = Tier(tier)
        if tier is Tier.T0_CUPS:
            return cls(tier, 6, 0, 0)
        if tier is Tier.T0_BOWLS:
            return cls(tier, 0, 6, 0)
        if tier is Tier.T0_UTENSILS:
            return cls(tier, 0, 0, 6)
        if tier is Tier.T1:
            return cls(tier, 4, 4, 4)
        return cls(tier, 4, 4, 4, max_intersections=4, max_initial_stack=3)

    @property
    def total(self) -> int:
        return self.n_cups + self.n_bowls + self.n_utensils


# ---------------------------------------------------------------------------
# Footprints and stack measurements
# ---------------------------------------------------------------------------


def dish_footprint(
    dish: Dish, specs: dict[DishKind, DishSpec], at: Point2 | None = None
) -> Footprint:
    spec = specs[dish.kind]
    pos = at if at is not None else dish.pos
    if dish.kind is DishKind.UTENSIL:
        return OrientedRect(pos, spec.length, spec.width, dish.theta)
    return Disc(pos, spec.radius)


def stack_footprints(
    state: SceneState, stack: Stack, specs: dict[DishKind, DishSpec],
    at: Point2 | None = None,
) -> list[Footprint]:
    base = at if at is not None else stack.base
    return [dish_footprint(state.dishes[d], specs, at=base) for d in stack.dishes]


def stack_circumradius(
    state: SceneState, stack: Stack, specs: dict[DishKind, DishSpec]
) -> float:
    return max(circumradius(fp) for fp in stack_footprints(state, stack, specs))


def stack_top_lip_height(
    stack: Stack, dishes: dict[int, Dish], specs: dict[DishKind, DishSpec]
) -> float:
    """Height of the top dish's lip: bottom grasp height plus nest offsets."""
    bottom = dishes[stack.bottom]
    height = specs[bottom.kind].grasp_height
    for dish_id in stack.dishes[1:]:
        height += specs[dishes[dish_id].kind].nest_offset
    return height


def stack_grasp_span(
    stack: Stack, dishes: dict[int, Dish], specs: dict[DishKind, DishSpec]
) -> float:
    """Lip-height difference between the top and bottom dish of a stack.

    A stack is rim-graspable only while this span fits within the gripper
    jaw height.
    """
    bottom = dishes[stack.bottom]
    return stack_top_lip_height(stack, dishes, specs) - specs[bottom.kind].grasp_height


# ---------------------------------------------------------------------------
# Generation and validation
# ---------------------------------------------------------------------------


def _inside_workspace(fp: Footprint, workspace: tuple[float, float]) -> bool:
    w, h = workspace
    tol = 1e-9
    if isinstance(fp, Disc):
        return (
            fp.center.x - fp.radius >= -tol
            and fp.center.y - fp.radius >= -tol
            and fp.center.x + fp.radius <= w + tol
            and fp.center.y + fp.radius <= h + tol
        )
    c = math.cos(fp.theta)
    s = math.sin(fp.theta)
    hl = fp.length / 2.0
    hw = fp.width / 2.0
    for sx in (-hl, hl):
        for sy in (-hw, hw):
            x = fp.center.x + sx * c - sy * s
            y = fp.center.y + sx * s + sy * c
            if not (-tol <= x <= w + tol and -tol <= y <= h + tol):
                return False
    return True


def generate_scene(
    cfg: TierConfig,
    seed: int,
    specs: dict[DishKind, DishSpec] | None = None,
    workspace: tuple[float, float] = DEFAULT_WORKSPACE,
) -> SceneState:
    """Generate a scene by sequential rejection sampling.

    Objects are placed in the order utensils, bowls, cups, at positions
    sampled uniformly over the workspace inset by each object's
    circumscribed radius.  A sample that intersects exactly one existing
    stack joins it when the tier still has intersections available, the
    stability ordering permits, and the stack stays below the tier's size
    cap; any other intersection resamples.  Cups go last because they need
    the smallest free spot (placing bowls onto a crowded table can exhaust
    the sampler), and utensils go first so piles stay stability-ordered.
    Raises PlacementExhausted after 10,000 failed samples for one object.
    """
    specs = specs or default_dish_specs()
    rng = SplitMix64(seed)
    state = SceneState(
        workspace=workspace, stacks={}, dishes={}, rng_seed=seed, tier=cfg.tier.value
    )
    order = (
        [DishKind.UTENSIL] * cfg.n_utensils
        + [DishKind.BOWL] * cfg.n_bowls
        + [DishKind.CUP] * cfg.n_cups
    )
    intersections_used = 0
    w, h = workspace
    for dish_id, kind in enumerate(order):
        spec = specs[kind]
        inset = spec.circumscribed_radius
        if 2 * inset >= min(w, h):
            raise PlacementExhausted(f"{kind.value} does not fit in the workspace")
        placed = False
        for _ in range(MAX_RESAMPLES):
            pos = Point2(rng.uniform(inset, w - inset), rng.uniform(inset, h - inset))
            theta = rng.uniform(0.0, math.pi) if kind is DishKind.UTENSIL else 0.0
            dish = Dish(dish_id, kind, pos, theta)
            fp = dish_footprint(dish, specs)
            hits = [
                s
                for s in state.stacks.values()
                if any(overlaps(fp, mfp) for mfp in stack_footprints(state, s, specs))
            ]
            if not hits:
                state.dishes[dish_id] = dish
                state.stacks[dish_id] = Stack(dish_id, (dish_id,), pos)
                placed = True
                break
            if len(hits) == 1 and intersections_used < cfg.max_intersections:
                target = hits[0]
                top_spec = specs[state.dishes[target.top].kind]
                if (
                    len(target.dishes) < cfg.max_initial_stack
                    and spec.effective_radius <= top_spec.effective_radius + 1e-9
                ):
                    snapped = Dish(dish_id, kind, target.base, theta)
                    sfp = dish_footprint(snapped, specs)
                    clear = _inside_workspace(sfp, workspace) and not any(
                        other.id != target.id
                        and any(
                            overlaps(sfp, ofp)
                            for ofp in stack_footprints(state, other, specs)
                        )
                        for other in state.stacks.values()
                    )
                    if clear:
                        state.dishes[dish_id] = snapped
                        state.stacks[target.id] = replace(
                            target, dishes=target.dishes + (dish_id,)
                        )
                        intersections_used += 1
                        placed = True
                        break
            # fall through: resample
        if not placed:
            raise PlacementExhausted(
                f"could not place {kind.value} #{dish_id} after {MAX_RESAMPLES} samples"
            )
    return state


def validate(
    state: SceneState, specs: dict[DishKind, DishSpec] | None = None
) -> list[str]:
    """Return a list of invariant violations; empty iff the scene is valid."""
    specs = specs or default_dish_specs()
    problems: list[str] = []

    seen: dict[int, int] = {}
    for stack in state.stacks.values():
        for dish_id in stack.dishes:
            seen[dish_id] = seen.get(dish_id, 0) + 1
    for dish_id in state.bin:
        seen[dish_id] = seen.get(dish_id, 0) + 1
    for dish_id in state.dishes:
        count = seen.get(dish_id, 0)
        if count != 1:
            problems.append(f"dish {dish_id} appears {count} times across stacks and bin")
    for dish_id in seen:
        if dish_id not in state.dishes:
            problems.append(f"unknown dish id {dish_id}")

    for stack in state.stacks.values():
        radii = [specs[state.dishes[d].kind].effective_radius for d in stack.dishes]
        if any(radii[i] + 1e-9 < radii[i + 1] for i in range(len(radii) - 1)):
            problems.append(f"stack stability violated: stack {stack.id}")
        for dish_id in stack.dishes:
            dish = state.dishes[dish_id]
            if abs(dish.pos.x - stack.base.x) > 1e-6 or abs(dish.pos.y - stack.base.y) > 1e-6:
                problems.append(f"dish {dish_id} pose out of sync with stack {stack.id}")
            if not _inside_workspace(dish_footprint(dish, specs), state.workspace):
                problems.append(f"out of workspace: dish {dish_id}")

    stacks = sorted(state.stacks.values(), key=lambda s: s.id)
    for i, a in enumerate(stacks):
        fps_a = stack_footprints(state, a, specs)
        for b in stacks[i + 1:]:
            fps_b = stack_footprints(state, b, specs)
            if any(overlaps(fa, fb) for fa in fps_a for fb in fps_b):
                problems.append(f"stacks overlap: {a.id} and {b.id}")

    if state.trips_taken < 0:
        problems.append("negative trip count")
    return problems


# ---------------------------------------------------------------------------
# Scene JSON (fixed field order, 6-decimal floats, byte-stable)
# ---------------------------------------------------------------------------


def _f6(value: float) -> str:
    return f"{value:.6f}"


def scene_to_json(state: SceneState) -> str:
    stacks_parts = []
    for stack in sorted(state.stacks.values(), key=lambda s: s.id):
        dish_parts = []
        for dish_id in stack.dishes:
            dish = state.dishes[dish_id]
            if dish.kind is DishKind.UTENSIL:
                dish_parts.append(
                    f'{{"id": {dish.id}, "kind": "{dish.kind.value}", '
                    f'"theta": {_f6(dish.theta)}}}'
                )
            else:
                dish_parts.append(f'{{"id": {dish.id}, "kind": "{dish.kind.value}"}}')
        stacks_parts.append(
            f'{{"base": [{_f6(stack.base.x)}, {_f6(stack.base.y)}], '
            f'"dishes": [{", ".join(dish_parts)}]}}'
        )
    return (
        f'{{"workspace": [{_f6(state.workspace[0])}, {_f6(state.workspace[1])}], '
        f'"seed": {state.rng_seed}, "tier": "{state.tier}", '
        f'"stacks": [{", ".join(stacks_parts)}]}}'
    )


def scene_from_json(
    text: str, specs: dict[DishKind, DishSpec] | None = None, check: bool = True
) -> SceneState:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"scene file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaError("scene file must contain a JSON object")
    try:
        ws = data["workspace"]
        seed = data["seed"]
        tier = data["tier"]
        raw_stacks = data["stacks"]
    except KeyError as exc:
        raise SchemaError(f"scene file missing field {exc}") from exc
    if (
        not isinstance(ws, list)
        or len(ws) != 2
        or not all(isinstance(v, (int, float)) for v in ws)
    ):
        raise SchemaError("workspace must be [width, height]")
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise SchemaError("seed must be an integer")
    if not isinstance(raw_stacks, list):
        raise SchemaError("stacks must be a list")

    state = SceneState(
        workspace=(float(ws[0]), float(ws[1])),
        stacks={},
        dishes={},
        rng_seed=seed,
        tier=str(tier),
    )
    for idx, raw in enumerate(raw_stacks):
        try:
            base = Point2(float(raw["base"][0]), float(raw["base"][1]))
            raw_dishes = raw["dishes"]
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            raise SchemaError(f"stack {idx} malformed: {exc}") from exc
        if not raw_dishes:
            raise SchemaError(f"stack {idx} has no dishes")
        ids = []
        for rd in raw_dishes:
            try:
                dish_id = int(rd["id"])
                kind = DishKind(rd["kind"])
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"stack {idx} dish malformed: {exc}") from exc
            theta = (
                normalize_angle(float(rd.get("theta", 0.0)))
                if kind is DishKind.UTENSIL
                else 0.0
            )
            if dish_id in state.dishes:
                raise SchemaError(f"duplicate dish id {dish_id}")
            state.dishes[dish_id] = Dish(dish_id, kind, base, theta)
            ids.append(dish_id)
        state.stacks[idx] = Stack(idx, tuple(ids), base)

    if check:
        problems = validate(state, specs)
        if problems:
            raise SchemaError("invalid scene: " + "; ".join(problems))
    return state
