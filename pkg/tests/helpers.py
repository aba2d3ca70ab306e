"""Shared test helpers: hand-built scenes and sampling oracles."""

from __future__ import annotations

import math

from declutter import (
    Disc,
    Dish,
    DishKind,
    OrientedRect,
    Point2,
    SceneState,
    Stack,
    default_sim_config,
    overlaps,
)
from declutter.geometry import translated
from declutter.rng import SplitMix64
from declutter.tableware import dish_footprint

SIM = default_sim_config()

CUP = DishKind.CUP
BOWL = DishKind.BOWL
UTENSIL = DishKind.UTENSIL


def build_scene(stacks, workspace=(78.0, 61.0), tier="custom"):
    """Build a scene from [(kinds, x, y), ...] stack descriptions.

    ``kinds`` is a list of DishKind or (DishKind, theta) tuples, bottom to
    top.  Dish and stack ids are assigned sequentially.
    """
    state = SceneState(workspace=workspace, stacks={}, dishes={}, tier=tier)
    dish_id = 0
    for stack_id, (kinds, x, y) in enumerate(stacks):
        base = Point2(x, y)
        ids = []
        for entry in kinds:
            kind, theta = entry if isinstance(entry, tuple) else (entry, 0.0)
            state.dishes[dish_id] = Dish(dish_id, kind, base, theta)
            ids.append(dish_id)
            dish_id += 1
        state.stacks[stack_id] = Stack(stack_id, tuple(ids), base)
    return state


def random_small_scene(seed, max_dishes=5):
    """Random singulated scene with 1..max_dishes singleton dishes."""
    rng = SplitMix64(seed)
    n = 1 + rng.below(max_dishes)
    kinds = [(CUP, BOWL, UTENSIL)[rng.below(3)] for _ in range(n)]
    placed = []
    for kind in kinds:
        spec = SIM.dish_specs[kind]
        inset = spec.circumscribed_radius
        for _ in range(10_000):
            x = rng.uniform(inset, 78.0 - inset)
            y = rng.uniform(inset, 61.0 - inset)
            theta = rng.uniform(0.0, math.pi) if kind is UTENSIL else 0.0
            probe = build_scene([([(kind, theta)], x, y)])
            fp = dish_footprint(probe.dishes[0], SIM.dish_specs)
            if all(
                not overlaps(fp, dish_footprint(d, SIM.dish_specs))
                for _, _, _, d in placed
            ):
                placed.append((kind, x, y, probe.dishes[0]))
                break
        else:
            raise RuntimeError("could not build small scene")
    return build_scene(
        [([(kind, dish.theta)], x, y) for kind, x, y, dish in placed]
    )


# ---------------------------------------------------------------------------
# Sampling oracles (independent of the analytic geometry they check)
# ---------------------------------------------------------------------------


def footprint_contains(fp, x, y):
    if isinstance(fp, Disc):
        return math.hypot(x - fp.center.x, y - fp.center.y) <= fp.radius
    c = math.cos(fp.theta)
    s = math.sin(fp.theta)
    dx = x - fp.center.x
    dy = y - fp.center.y
    lx = dx * c + dy * s
    ly = -dx * s + dy * c
    return abs(lx) <= fp.length / 2.0 and abs(ly) <= fp.width / 2.0


def _bounds(fp):
    if isinstance(fp, Disc):
        return (
            fp.center.x - fp.radius,
            fp.center.x + fp.radius,
            fp.center.y - fp.radius,
            fp.center.y + fp.radius,
        )
    r = math.hypot(fp.length / 2.0, fp.width / 2.0)
    return fp.center.x - r, fp.center.x + r, fp.center.y - r, fp.center.y + r


def sampled_overlap(a, b, grid=160):
    """Dense point-sampling oracle: True if a shared point is found."""
    ax0, ax1, ay0, ay1 = _bounds(a)
    bx0, bx1, by0, by1 = _bounds(b)
    x0, x1 = max(ax0, bx0), min(ax1, bx1)
    y0, y1 = max(ay0, by0), min(ay1, by1)
    if x0 > x1 or y0 > y1:
        return False
    for i in range(grid + 1):
        x = x0 + (x1 - x0) * i / grid if grid else x0
        for j in range(grid + 1):
            y = y0 + (y1 - y0) * j / grid if grid else y0
            if footprint_contains(a, x, y) and footprint_contains(b, x, y):
                return True
    return False


def corridor_rect(a, b, half_width):
    length = math.hypot(b.x - a.x, b.y - a.y)
    theta = math.atan2(b.y - a.y, b.x - a.x)
    center = Point2((a.x + b.x) / 2.0, (a.y + b.y) / 2.0)
    return center, theta, length / 2.0, half_width


def sampled_corridor_blocked(a, b, half_width, obstacle, grid=300):
    """Point-sampling oracle for corridor intersection."""
    center, theta, hl, hw = corridor_rect(a, b, half_width)
    c = math.cos(theta)
    s = math.sin(theta)
    for i in range(grid + 1):
        lx = -hl + 2 * hl * i / grid if grid else 0.0
        for j in range(grid + 1):
            ly = -hw + 2 * hw * j / grid if grid else 0.0
            x = center.x + lx * c - ly * s
            y = center.y + lx * s + ly * c
            if footprint_contains(obstacle, x, y):
                return True
    return False


def scan_first_contact(moving, static, ux, uy, t_max, steps=20000):
    """Fine linear scan for first footprint contact; bracket refined by
    bisection on the overlap predicate."""
    prev = 0.0
    for i in range(1, steps + 1):
        t = t_max * i / steps
        if overlaps(translated(moving, t * ux, t * uy), static):
            lo, hi = prev, t
            for _ in range(60):
                mid = (lo + hi) / 2.0
                if overlaps(translated(moving, mid * ux, mid * uy), static):
                    hi = mid
                else:
                    lo = mid
            return hi
        prev = t
    return None
