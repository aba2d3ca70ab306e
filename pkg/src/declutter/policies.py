"""Decluttering policies: the single-item baseline plus two greedy
consolidation policies built on pulls and stacks.

All three are deterministic given (scene, seed, config): the only sampled
quantities are the baseline's dish choice and rim grasp angles, drawn from
one seeded stream.  Policies only ever return feasible actions; the
transition function re-checks and raises on violations, which would
indicate a policy bug.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING

from .actions import (
    Action,
    Grasp,
    PullGrasp,
    StackGrasp,
    StackPlacement,
    TraceEvent,
    _moved_state,
    apply,
    grasp_gap,
    grasp_points,
    mog_grasp,
    plan_pull,
    pull_allowable,
    stack_allowable,
)
from .rng import SplitMix64
from .tableware import DishKind, SceneState, Stack, stack_top_lip_height

if TYPE_CHECKING:
    from .config import SimConfig


class PolicyKind(str, Enum):
    RANDOM = "random"
    PULL = "pull"
    STACK = "stack"


class UtensilStacking(str, Enum):
    ONE_PER_BOWL = "one_per_bowl"
    ALL_ON_ONE_BOWL = "all_on_one_bowl"


class PairSelection(str, Enum):
    NEAREST_FIRST = "nearest_first"


@dataclass(frozen=True)
class PolicyConfig:
    kind: PolicyKind
    utensil_stacking: UtensilStacking = UtensilStacking.ONE_PER_BOWL
    pair_selection: PairSelection = PairSelection.NEAREST_FIRST

    @classmethod
    def named(cls, name: str, utensil_stacking: str | None = None) -> "PolicyConfig":
        return cls(
            kind=PolicyKind(name),
            utensil_stacking=UtensilStacking(utensil_stacking)
            if utensil_stacking
            else UtensilStacking.ONE_PER_BOWL,
        )


def random_policy(
    state: SceneState, rng: SplitMix64, sim: "SimConfig", cfg: PolicyConfig
) -> Action:
    """Pick a dish uniformly at random and grasp the stack containing it.

    Target selection is stack-agnostic, but a grasp always engages the
    bottom rim, so the whole stack rides along in one trip.
    """
    dish_ids = state.on_table_dish_ids()
    dish_id = dish_ids[rng.below(len(dish_ids))]
    stack = state.stack_containing(dish_id)
    return Grasp(grasp_points(state, stack.id, rng, sim))


def _sorted_stack_ids(state: SceneState) -> list[int]:
    return sorted(state.stacks)


def pull_policy(
    state: SceneState, rng: SplitMix64, sim: "SimConfig", cfg: PolicyConfig
) -> Action:
    """Grasp ready pairs first, then pull pairs together, then singles.

    Priority: (1) a multi-object grasp on the nearest pair that already
    passes the grasp test; (2) a pull-grasp on the nearest pullable pair;
    (3) a single grasp on the lowest-id stack.
    """
    ids = _sorted_stack_ids(state)

    best_mog: tuple[float, int, int] | None = None
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            witness = mog_grasp(state, a, b, sim)
            if witness is None:
                continue
            gap = grasp_gap(state, a, b, sim)[0]
            if best_mog is None or (gap, a, b) < best_mog:
                best_mog = (gap, a, b)
    if best_mog is not None:
        _, a, b = best_mog
        witness = mog_grasp(state, a, b, sim)
        assert witness is not None
        return Grasp(witness)

    best_pull: tuple[float, int, int] | None = None
    for mover in ids:
        for anchor in ids:
            if mover == anchor:
                continue
            if not pull_allowable(state, mover, anchor, sim):
                continue
            gap = grasp_gap(state, mover, anchor, sim)[0]
            if best_pull is None or (gap, mover, anchor) < best_pull:
                best_pull = (gap, mover, anchor)
    if best_pull is not None:
        _, mover, anchor = best_pull
        pull = plan_pull(state, mover, anchor, rng, sim)
        moved = _moved_state(state, mover, pull.end)
        witness = mog_grasp(moved, mover, anchor, sim)
        assert witness is not None, "pull_allowable guarantees a post-pull grasp"
        return PullGrasp(pull, witness)

    return Grasp(grasp_points(state, ids[0], rng, sim))


def _placement(
    state: SceneState, lifted: int, base: int, rng: SplitMix64, sim: "SimConfig"
) -> StackPlacement:
    inner = grasp_points(state, lifted, rng, sim)
    base_stack = state.stacks[base]
    merged_dishes = base_stack.dishes + state.stacks[lifted].dishes
    lip = stack_top_lip_height(
        Stack(base_stack.id, merged_dishes, base_stack.base),
        state.dishes,
        sim.dish_specs,
    )
    return StackPlacement(
        inner_grasp=inner,
        place=base_stack.base,
        place_z=lip,
        place_theta=inner.theta,
        lifted=lifted,
        base=base,
    )


def stack_policy(
    state: SceneState, rng: SplitMix64, sim: "SimConfig", cfg: PolicyConfig
) -> Action:
    """Stack utensils onto bowls first, then merge pairs, then singles.

    While both utensil piles and bowl-topped stacks remain, utensils are
    placed on bowls and the merged pile carried out.  ``one_per_bowl``
    transports one utensil pile per bowl trip; ``all_on_one_bowl`` loads
    every remaining utensil pile onto a single bowl (while the pile stays
    graspable) before the trip.  After the utensil phase each trip merges
    at most two existing stacks: the returned stack-grasp immediately
    transports the merged pile, so piles of four or more cups or bowls can
    never form.  Anything left is cleared with single grasps.
    """
    ids = _sorted_stack_ids(state)
    dishes = state.dishes
    utensil_piles = [s for s in ids if dishes[state.stacks[s].bottom].kind is DishKind.UTENSIL]
    bowl_tops = [s for s in ids if dishes[state.stacks[s].top].kind is DishKind.BOWL]

    if utensil_piles and bowl_tops:
        if cfg.utensil_stacking is UtensilStacking.ONE_PER_BOWL:
            best: tuple[float, int, int] | None = None
            for u in utensil_piles:
                for b in bowl_tops:
                    if not stack_allowable(state, u, b, sim):
                        continue
                    gap = grasp_gap(state, u, b, sim)[0]
                    if best is None or (gap, u, b) < best:
                        best = (gap, u, b)
            if best is not None:
                _, u, b = best
                placement = _placement(state, u, b, rng, sim)
                carry = grasp_points(state, b, rng, sim)
                return StackGrasp((placement,), carry)
        else:
            chosen = min(
                bowl_tops,
                key=lambda b: (
                    sum(grasp_gap(state, u, b, sim)[0] for u in utensil_piles),
                    b,
                ),
            )
            order = sorted(
                utensil_piles, key=lambda u: (grasp_gap(state, u, chosen, sim)[0], u)
            )
            # Placements are simulated against an evolving preview so the
            # jaw constraint is checked against the growing pile.
            placements: list[StackPlacement] = []
            working = state
            for u in order:
                if not stack_allowable(working, u, chosen, sim):
                    continue
                placements.append(_placement(working, u, chosen, rng, sim))
                working = _merge_preview(working, u, chosen)
            if placements:
                carry = grasp_points(working, chosen, rng, sim)
                return StackGrasp(tuple(placements), carry)

    best_pair: tuple[float, int, int] | None = None
    for lifted in ids:
        for base in ids:
            if lifted == base:
                continue
            if not stack_allowable(state, lifted, base, sim):
                continue
            gap = grasp_gap(state, lifted, base, sim)[0]
            if best_pair is None or (gap, lifted, base) < best_pair:
                best_pair = (gap, lifted, base)
    if best_pair is not None:
        _, lifted, base = best_pair
        placement = _placement(state, lifted, base, rng, sim)
        merged = _merge_preview(state, lifted, base)
        carry = grasp_points(merged, base, rng, sim)
        return StackGrasp((placement,), carry)

    return Grasp(grasp_points(state, ids[0], rng, sim))


def _merge_preview(state: SceneState, lifted: int, base: int) -> SceneState:
    """State after merging ``lifted`` onto ``base`` without grasping."""
    preview = state.clone()
    lifted_stack = preview.stacks.pop(lifted)
    base_stack = preview.stacks[base]
    preview.stacks[base] = replace(
        base_stack, dishes=base_stack.dishes + lifted_stack.dishes
    )
    for dish_id in lifted_stack.dishes:
        preview.dishes[dish_id] = replace(preview.dishes[dish_id], pos=base_stack.base)
    return preview


_POLICY_FUNCS = {
    PolicyKind.RANDOM: random_policy,
    PolicyKind.PULL: pull_policy,
    PolicyKind.STACK: stack_policy,
}


def next_action(
    state: SceneState, rng: SplitMix64, sim: "SimConfig", cfg: PolicyConfig
) -> Action | None:
    """Next feasible action for the policy, or None once the table is clear."""
    if not state.stacks:
        return None
    return _POLICY_FUNCS[cfg.kind](state, rng, sim, cfg)


@dataclass
class Trace:
    """Full record of one trial: every event plus the final state."""

    events: list[TraceEvent] = field(default_factory=list)
    final_state: SceneState | None = None
    policy: str = ""
    seed: int = 0
    tier: str = "custom"

    @property
    def trips(self) -> int:
        return sum(1 for e in self.events if e.trip)

    @property
    def objects_cleared(self) -> int:
        return sum(len(e.moved_to_bin) for e in self.events)

    @property
    def failures(self) -> int:
        return sum(1 for e in self.events if e.params.get("failed"))


def run_policy(
    initial: SceneState,
    policy: PolicyConfig,
    sim: "SimConfig",
    seed: int,
    max_actions: int | None = None,
) -> Trace:
    """Run a policy to completion and return the trace.

    Terminates when the table is empty; with failures disabled every action
    strictly grows the bin, so at most one trip per dish is taken.  A
    safety cap on total actions guards against a policy that stops making
    progress.
    """
    rng = SplitMix64(seed)
    state = initial.clone()
    trace = Trace(policy=policy.kind.value, seed=seed, tier=initial.tier)
    cap = max_actions if max_actions is not None else 50 * max(len(state.dishes), 1) + 100
    t = 0
    while True:
        if t >= cap:
            raise RuntimeError(
                f"policy {policy.kind.value} exceeded {cap} actions without clearing"
            )
        action = next_action(state, rng, sim, policy)
        if action is None:
            break
        state, events = apply(state, action, sim, rng)
        for event in events:
            event.t = t
            trace.events.append(event)
            t += 1
    trace.final_state = state
    return trace
