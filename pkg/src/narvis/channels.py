"""Detect which visual channels vary inside a unit and order them by salience.

A channel is worth explaining when its value actually differs between the
unit's primitives; position is always listed because every unit encodes it.
The default ordering follows a fixed salience ranking (most salient first);
authors may reorder, toggle, or re-weight channels afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import NarvisError
from .component_tree import VisualUnit
from .svg_ingest import UnknownPrimitive, VisualPrimitive

# rank 1 = most salient; configurable per project via detect_channels(salience=...)
SALIENCE_RANK = {
    "position": 1,
    "size": 2,
    "color_fill": 3,
    "color_stroke": 4,
    "shape": 5,
    "stroke_width": 6,
    "opacity": 7,
}
CHANNELS = tuple(SALIENCE_RANK)

RATIO_TOLERANCE = 1.05        # size / stroke_width vary when max/min exceeds this
OPACITY_TOLERANCE = 0.02
POSITION_SPREAD_FRACTION = 0.01  # of the view-box diagonal


class UnknownChannel(NarvisError):
    code = "unknown_channel"


class InvalidPermutation(NarvisError):
    code = "invalid_permutation"


class ComplexityOutOfRange(NarvisError):
    code = "complexity_out_of_range"


class ChannelNotEnablable(NarvisError):
    code = "channel_not_enablable"


@dataclass(frozen=True)
class ChannelSpec:
    channel: str
    distinct_values: int
    salience_rank: int
    complexity_score: int = 3
    enabled: bool = False


@dataclass(frozen=True)
class ChannelPlan:
    unit_id: str
    channels: tuple[ChannelSpec, ...]

    def get(self, channel: str) -> ChannelSpec:
        for spec in self.channels:
            if spec.channel == channel:
                return spec
        raise UnknownChannel(f"channel {channel!r} not in plan")

    def enabled_channels(self) -> list[str]:
        return [s.channel for s in self.channels if s.enabled]


def detect_channels(unit: VisualUnit, primitives: dict[str, VisualPrimitive],
                    view_box: tuple[float, float, float, float] | None = None,
                    salience: dict[str, int] | None = None) -> ChannelPlan:
    """Build the unit's default channel plan from its primitives' attributes."""
    missing = [pid for pid in unit.primitive_ids if pid not in primitives]
    if missing:
        raise UnknownPrimitive(f"primitive ids not found: {missing}")
    prims = [primitives[pid] for pid in unit.primitive_ids]
    ranks = salience or SALIENCE_RANK

    distinct = {
        "position": _distinct_positions(prims, primitives, view_box),
        "size": _distinct_ratio([p.channels.size for p in prims]),
        "color_fill": len({p.channels.fill for p in prims}),
        "color_stroke": len({p.channels.stroke for p in prims}),
        "shape": len({p.channels.shape_class for p in prims}),
        "stroke_width": _distinct_ratio([p.channels.stroke_width for p in prims]),
        "opacity": _distinct_absolute([p.channels.opacity for p in prims], OPACITY_TOLERANCE),
    }
    specs = [
        ChannelSpec(
            channel=name,
            distinct_values=distinct[name],
            salience_rank=ranks[name],
            enabled=(name == "position") or distinct[name] >= 2,
        )
        for name in sorted(ranks, key=ranks.__getitem__)
    ]
    return ChannelPlan(unit.unit_id, tuple(specs))


def _distinct_positions(prims, all_prims, view_box) -> int:
    centers = [p.channels.position for p in prims]
    if len(centers) <= 1:
        return 1
    spread = _diag(centers)
    if view_box is not None:
        _, _, w, h = view_box
        reference = (w * w + h * h) ** 0.5
    else:
        reference = _diag([p.channels.position for p in all_prims.values()])
    tolerance = POSITION_SPREAD_FRACTION * (reference or 1.0)
    if spread <= tolerance:
        return 1
    return len(set(centers))


def _diag(points) -> float:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return ((max(xs) - min(xs)) ** 2 + (max(ys) - min(ys)) ** 2) ** 0.5


def _distinct_ratio(values: list[float]) -> int:
    """Cluster count under a relative tolerance; scale-invariant."""
    ordered = sorted(values)
    clusters = 0
    bound = -1.0
    for v in ordered:
        if clusters == 0 or v > bound:
            clusters += 1
            bound = v * RATIO_TOLERANCE if v > 0 else 0.0
    return clusters


def _distinct_absolute(values: list[float], tolerance: float) -> int:
    ordered = sorted(values)
    clusters = 0
    start = None
    for v in ordered:
        if start is None or v - start > tolerance:
            clusters += 1
            start = v
    return clusters


# ---------------------------------------------------------------------------
# author edits

def reorder_channels(plan: ChannelPlan, new_order: list[str]) -> ChannelPlan:
    current = [s.channel for s in plan.channels]
    if sorted(new_order) != sorted(current):
        raise InvalidPermutation(
            f"new order must be a permutation of {current}, got {new_order}")
    by_name = {s.channel: s for s in plan.channels}
    return replace(plan, channels=tuple(by_name[c] for c in new_order))


def toggle_channel(plan: ChannelPlan, channel: str, enabled: bool | None = None) -> ChannelPlan:
    """Flip (or set) a channel's enabled flag.

    Enabling requires actual variation (or position); slides already tagged
    with a toggled-off channel are flagged orphaned by the deck module.
    """
    spec = plan.get(channel)
    target = (not spec.enabled) if enabled is None else enabled
    if target and channel != "position" and spec.distinct_values < 2:
        raise ChannelNotEnablable(
            f"channel {channel!r} has no variation across the unit")
    out = tuple(replace(s, enabled=target) if s.channel == channel else s
                for s in plan.channels)
    return replace(plan, channels=out)


def set_complexity(plan: ChannelPlan, channel: str, score: int) -> ChannelPlan:
    if not 1 <= score <= 5:
        raise ComplexityOutOfRange(f"complexity {score} outside [1, 5]")
    plan.get(channel)
    out = tuple(replace(s, complexity_score=score) if s.channel == channel else s
                for s in plan.channels)
    return replace(plan, channels=out)


def sort_by_complexity(plan: ChannelPlan) -> ChannelPlan:
    """Optional author action: easiest-first ordering; stable for ties."""
    return replace(plan, channels=tuple(sorted(plan.channels,
                                               key=lambda s: s.complexity_score)))


# ---------------------------------------------------------------------------
# JSON

def plan_to_json(plan: ChannelPlan) -> dict:
    return {
        "unit_id": plan.unit_id,
        "channels": [
            {"channel": s.channel, "distinct_values": s.distinct_values,
             "salience_rank": s.salience_rank, "complexity_score": s.complexity_score,
             "enabled": s.enabled}
            for s in plan.channels
        ],
    }


def plan_from_json(data: dict) -> ChannelPlan:
    return ChannelPlan(
        unit_id=data["unit_id"],
        channels=tuple(
            ChannelSpec(c["channel"], c["distinct_values"], c["salience_rank"],
                        c.get("complexity_score", 3), c.get("enabled", False))
            for c in data["channels"]
        ),
    )
