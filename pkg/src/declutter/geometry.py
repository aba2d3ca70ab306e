"""Planar geometry for scene generation and grasp feasibility.

Everything lives in double-precision centimeters.  Two footprint shapes are
supported: discs (cups and bowls seen top-down) and oriented rectangles
(utensils).  Touching counts as overlapping, with a tolerance of
``TOUCH_TOL`` centimeters, because scene generation treats contact as
intersection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

TOUCH_TOL = 1e-6

_EPS = 1e-12


def normalize_angle(theta: float) -> float:
    """Map an angle to the gripper-equivalent range [0, pi)."""
    t = theta % math.pi
    if t >= math.pi:
        t = 0.0
    return t


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")


@dataclass(frozen=True)
class Disc:
    center: Point2
    radius: float

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"disc radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class OrientedRect:
    center: Point2
    length: float
    width: float
    theta: float

    def __post_init__(self):
        if not (self.length >= self.width > 0):
            raise ValueError(
                f"rect needs length >= width > 0, got {self.length} x {self.width}"
            )
        object.__setattr__(self, "theta", normalize_angle(self.theta))


Footprint = Disc | OrientedRect


def dist(a: Point2, b: Point2) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def circumradius(fp: Footprint) -> float:
    """Radius of the smallest disc centered at the footprint center covering it."""
    if isinstance(fp, Disc):
        return fp.radius
    return math.hypot(fp.length / 2.0, fp.width / 2.0)


def translated(fp: Footprint, dx: float, dy: float) -> Footprint:
    c = Point2(fp.center.x + dx, fp.center.y + dy)
    if isinstance(fp, Disc):
        return Disc(c, fp.radius)
    return OrientedRect(c, fp.length, fp.width, fp.theta)


# ---------------------------------------------------------------------------
# Separation helpers.  A separation <= 0 means the closed regions overlap;
# for separated rectangles the SAT value lower-bounds the true gap, which is
# enough because only the sign is used.
# ---------------------------------------------------------------------------


def _point_raw_rect_distance(
    px: float, py: float, cx: float, cy: float, cos_t: float, sin_t: float,
    half_len: float, half_wid: float,
) -> float:
    dx = px - cx
    dy = py - cy
    lx = dx * cos_t + dy * sin_t
    ly = -dx * sin_t + dy * cos_t
    ox = max(abs(lx) - half_len, 0.0)
    oy = max(abs(ly) - half_wid, 0.0)
    return math.hypot(ox, oy)


def _rect_axes(theta: float) -> tuple[tuple[float, float], tuple[float, float]]:
    c = math.cos(theta)
    s = math.sin(theta)
    return (c, s), (-s, c)


def _extent_along(axis: tuple[float, float], ux, uy, half_len, half_wid) -> float:
    ax, ay = axis
    return half_len * abs(ux[0] * ax + ux[1] * ay) + half_wid * abs(uy[0] * ax + uy[1] * ay)


def _sat_gap_raw(
    c1x, c1y, t1, hl1, hw1,
    c2x, c2y, t2, hl2, hw2,
) -> float:
    """Largest axis-projected gap between two oriented rectangles.

    Positive means separated (two convex polygons in the plane are disjoint
    iff some edge normal separates them); <= 0 means they intersect.
    """
    ux1, uy1 = _rect_axes(t1)
    ux2, uy2 = _rect_axes(t2)
    dx = c2x - c1x
    dy = c2y - c1y
    best = -math.inf
    for axis in (ux1, uy1, ux2, uy2):
        d = abs(dx * axis[0] + dy * axis[1])
        e = _extent_along(axis, ux1, uy1, hl1, hw1) + _extent_along(axis, ux2, uy2, hl2, hw2)
        gap = d - e
        if gap > best:
            best = gap
    return best


def _sep_raw_rect_vs_footprint(
    cx, cy, theta, half_len, half_wid, fp: Footprint,
) -> float:
    if isinstance(fp, Disc):
        d = _point_raw_rect_distance(
            fp.center.x, fp.center.y, cx, cy, math.cos(theta), math.sin(theta),
            half_len, half_wid,
        )
        return d - fp.radius
    return _sat_gap_raw(
        cx, cy, theta, half_len, half_wid,
        fp.center.x, fp.center.y, fp.theta, fp.length / 2.0, fp.width / 2.0,
    )


def separation(a: Footprint, b: Footprint) -> float:
    """Gap between two footprints; <= 0 when they overlap or touch."""
    if isinstance(a, Disc) and isinstance(b, Disc):
        return dist(a.center, b.center) - a.radius - b.radius
    if isinstance(a, Disc):
        a, b = b, a
    # a is a rect here
    return _sep_raw_rect_vs_footprint(
        a.center.x, a.center.y, a.theta, a.length / 2.0, a.width / 2.0, b,
    )


def overlaps(a: Footprint, b: Footprint) -> bool:
    """True iff the closed regions intersect (touching counts)."""
    return separation(a, b) <= TOUCH_TOL


def corridor_clear(
    a: Point2, b: Point2, half_width: float, obstacles: Iterable[Footprint],
) -> bool:
    """True iff no obstacle meets the corridor swept from ``a`` to ``b``.

    The corridor is the segment a->b inflated laterally by ``half_width``
    (an oriented rectangle; the sweep is not capped at the ends).
    """
    if half_width < 0:
        raise ValueError("half_width must be >= 0")
    length = dist(a, b)
    theta = math.atan2(b.y - a.y, b.x - a.x) if length > _EPS else 0.0
    cx = (a.x + b.x) / 2.0
    cy = (a.y + b.y) / 2.0
    for ob in obstacles:
        if _sep_raw_rect_vs_footprint(cx, cy, theta, length / 2.0, half_width, ob) <= TOUCH_TOL:
            return False
    return True


def rim_point(center: Point2, radius: float, angle: float) -> tuple[Point2, float]:
    """Point on a rim circle plus the gripper angle perpendicular to the tangent.

    The perpendicular-to-tangent direction is the radial direction, so the
    gripper angle is ``angle`` normalized to [0, pi).
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    p = Point2(center.x + radius * math.cos(angle), center.y + radius * math.sin(angle))
    return p, normalize_angle(angle)


# ---------------------------------------------------------------------------
# Segments (utensil grasp candidates live on the utensil axis).
# ---------------------------------------------------------------------------


def closest_point_on_segment(p: Point2, a: Point2, b: Point2) -> Point2:
    abx = b.x - a.x
    aby = b.y - a.y
    denom = abx * abx + aby * aby
    if denom < _EPS:
        return a
    t = ((p.x - a.x) * abx + (p.y - a.y) * aby) / denom
    t = min(1.0, max(0.0, t))
    return Point2(a.x + t * abx, a.y + t * aby)


def _orient(ax, ay, bx, by, cx, cy) -> float:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _segments_intersect(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool:
    d1 = _orient(q1.x, q1.y, q2.x, q2.y, p1.x, p1.y)
    d2 = _orient(q1.x, q1.y, q2.x, q2.y, p2.x, p2.y)
    d3 = _orient(p1.x, p1.y, p2.x, p2.y, q1.x, q1.y)
    d4 = _orient(p1.x, p1.y, p2.x, p2.y, q2.x, q2.y)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    return False


def segment_segment_nearest(
    p1: Point2, p2: Point2, q1: Point2, q2: Point2,
) -> tuple[float, Point2, Point2]:
    """Distance between two segments plus the witness points realizing it."""
    if _segments_intersect(p1, p2, q1, q2):
        # Intersection point via line-line solve; both witnesses coincide.
        rx, ry = p2.x - p1.x, p2.y - p1.y
        sx, sy = q2.x - q1.x, q2.y - q1.y
        denom = rx * sy - ry * sx
        if abs(denom) < _EPS:
            return 0.0, p1, p1
        t = ((q1.x - p1.x) * sy - (q1.y - p1.y) * sx) / denom
        ip = Point2(p1.x + t * rx, p1.y + t * ry)
        return 0.0, ip, ip
    best = (math.inf, p1, q1)
    for p, (a, b), swap in (
        (p1, (q1, q2), False),
        (p2, (q1, q2), False),
        (q1, (p1, p2), True),
        (q2, (p1, p2), True),
    ):
        cp = closest_point_on_segment(p, a, b)
        d = dist(p, cp)
        if d < best[0]:
            best = (d, cp, p) if swap else (d, p, cp)
    return best


# ---------------------------------------------------------------------------
# Linear sweeps: first contact time of a footprint translating at unit
# velocity (ux, uy) toward a static footprint.  Used to plan pull endpoints
# exactly (contact gap 0).
# ---------------------------------------------------------------------------


def _interval_intersect(a, b):
    if a is None or b is None:
        return None
    lo = max(a[0], b[0])
    hi = min(a[1], b[1])
    if lo > hi:
        return None
    return (lo, hi)


def _slab_interval(p0: float, v: float, half: float):
    """Times t with |p0 + t*v| <= half, or None if never."""
    if abs(v) < _EPS:
        return (-math.inf, math.inf) if abs(p0) <= half else None
    t1 = (-half - p0) / v
    t2 = (half - p0) / v
    return (t1, t2) if t1 <= t2 else (t2, t1)


def _quad_interval(a: float, b: float, c: float):
    """Times with a*t^2 + 2bt + c <= 0 (a > 0), or None."""
    if a < _EPS:
        return (-math.inf, math.inf) if c <= 0 else None
    disc = b * b - a * c
    if disc < 0:
        return None
    sq = math.sqrt(disc)
    return ((-b - sq) / a, (-b + sq) / a)


def _sweep_disc_disc(cm: Point2, r_m: float, ca: Point2, r_a: float,
                     ux: float, uy: float, t_max: float):
    dx = cm.x - ca.x
    dy = cm.y - ca.y
    rr = r_m + r_a
    itv = _quad_interval(
        ux * ux + uy * uy, dx * ux + dy * uy, dx * dx + dy * dy - rr * rr
    )
    return _first_entry(itv, t_max)


def _sweep_disc_rect(c0: Point2, r: float, vx: float, vy: float,
                     rect: OrientedRect, t_max: float):
    # Work in the rect's local frame; the swept region is the rect inflated
    # by r (core bands plus four corner discs).
    ct = math.cos(rect.theta)
    st = math.sin(rect.theta)
    dx = c0.x - rect.center.x
    dy = c0.y - rect.center.y
    px = dx * ct + dy * st
    py = -dx * st + dy * ct
    lvx = vx * ct + vy * st
    lvy = -vx * st + vy * ct
    hl = rect.length / 2.0
    hw = rect.width / 2.0

    intervals = [
        _interval_intersect(_slab_interval(px, lvx, hl + r), _slab_interval(py, lvy, hw)),
        _interval_intersect(_slab_interval(px, lvx, hl), _slab_interval(py, lvy, hw + r)),
    ]
    v2 = lvx * lvx + lvy * lvy
    for sx in (-hl, hl):
        for sy in (-hw, hw):
            ex = px - sx
            ey = py - sy
            intervals.append(
                _quad_interval(v2, ex * lvx + ey * lvy, ex * ex + ey * ey - r * r)
            )
    best = None
    for itv in intervals:
        t = _first_entry(itv, t_max)
        if t is not None and (best is None or t < best):
            best = t
    return best


def _sweep_rect_rect(mov: OrientedRect, vx: float, vy: float,
                     sta: OrientedRect, t_max: float):
    ux1, uy1 = _rect_axes(mov.theta)
    ux2, uy2 = _rect_axes(sta.theta)
    hl1, hw1 = mov.length / 2.0, mov.width / 2.0
    hl2, hw2 = sta.length / 2.0, sta.width / 2.0
    dx = mov.center.x - sta.center.x
    dy = mov.center.y - sta.center.y
    t_lo = -math.inf
    t_hi = math.inf
    for axis in (ux1, uy1, ux2, uy2):
        e = _extent_along(axis, ux1, uy1, hl1, hw1) + _extent_along(axis, ux2, uy2, hl2, hw2)
        d0 = dx * axis[0] + dy * axis[1]
        dv = vx * axis[0] + vy * axis[1]
        itv = _slab_interval(d0, dv, e)
        if itv is None:
            return None
        t_lo = max(t_lo, itv[0])
        t_hi = min(t_hi, itv[1])
        if t_lo > t_hi:
            return None
    return _first_entry((t_lo, t_hi), t_max)


def _first_entry(itv, t_max: float):
    if itv is None:
        return None
    lo, hi = itv
    if hi < 0 or lo > t_max:
        return None
    return max(lo, 0.0)


def sweep_first_contact(
    moving: Footprint, static: Footprint, ux: float, uy: float, t_max: float,
) -> float | None:
    """First t in [0, t_max] at which ``moving`` translated by t*(ux, uy)
    touches ``static``, or None if they never meet on that segment.

    (ux, uy) must be a unit vector so t is in centimeters.
    """
    if isinstance(moving, Disc) and isinstance(static, Disc):
        return _sweep_disc_disc(moving.center, moving.radius,
                                static.center, static.radius, ux, uy, t_max)
    if isinstance(moving, Disc):
        return _sweep_disc_rect(moving.center, moving.radius, ux, uy, static, t_max)
    if isinstance(static, Disc):
        # Relative motion: the disc moves at -v in the rect's frame.
        return _sweep_disc_rect(static.center, static.radius, -ux, -uy, moving, t_max)
    return _sweep_rect_rect(moving, ux, uy, static, t_max)
