"""Policy behavior: worked examples and whole-run properties."""

import pytest

from declutter import (
    Grasp,
    apply,
    PolicyConfig,
    PolicyKind,
    PullGrasp,
    StackGrasp,
    Tier,
    TierConfig,
    UtensilStacking,
    generate_scene,
    next_action,
    objects_per_trip,
    run_policy,
    validate,
)
from declutter.rng import SplitMix64
from helpers import BOWL, CUP, SIM, UTENSIL, build_scene

RANDOM = PolicyConfig.named("random")
PULL = PolicyConfig.named("pull")
STACK = PolicyConfig.named("stack")


class TestRandomPolicy:
    def test_six_cups_six_trips(self):
        scene = build_scene([([CUP], 10 + 11 * i, 10) for i in range(6)])
        trace = run_policy(scene, RANDOM, SIM, 1)
        assert trace.trips == 6
        assert objects_per_trip(trace) == 1.0

    def test_selected_stack_travels_whole(self):
        scene = build_scene([([BOWL, CUP, CUP], 30, 30)])
        action = next_action(scene, SplitMix64(0), SIM, RANDOM)
        assert isinstance(action, Grasp)
        new, events = apply(scene, action, SIM)
        assert len(events[0].moved_to_bin) == 3

    def test_empty_table_is_done(self):
        scene = build_scene([])
        assert next_action(scene, SplitMix64(0), SIM, RANDOM) is None

    def test_dish_uniform_selection_weights_stacks(self):
        # A 3-dish stack should be chosen ~3x as often as a singleton.
        scene = build_scene([([BOWL, CUP, CUP], 20, 20), ([BOWL], 55, 40)])
        hits = 0
        n = 2000
        for seed in range(n):
            action = next_action(scene, SplitMix64(seed), SIM, RANDOM)
            if action.grasp.targets == (0,):
                hits += 1
        assert 0.70 < hits / n < 0.80


class TestPullPolicy:
    def test_ready_mog_taken_first(self):
        scene = build_scene(
            [([CUP], 30, 30), ([CUP], 39.2, 30), ([BOWL], 65, 50)]
        )
        action = next_action(scene, SplitMix64(0), SIM, PULL)
        assert isinstance(action, Grasp)
        assert action.grasp.targets == (0, 1)

    def test_four_far_bowls_two_pull_trips(self):
        scene = build_scene(
            [([BOWL], 12, 12), ([BOWL], 66, 12), ([BOWL], 12, 49), ([BOWL], 66, 49)]
        )
        trace = run_policy(scene, PULL, SIM, 3)
        assert trace.trips == 2
        assert all(e.kind == "pull_grasp" for e in trace.events)
        assert objects_per_trip(trace) == 2.0

    def test_last_utensil_single_grasped(self):
        scene = build_scene([([(UTENSIL, 0.4)], 30, 30)])
        action = next_action(scene, SplitMix64(0), SIM, PULL)
        assert isinstance(action, Grasp)
        assert action.grasp.targets == (0,)

    def test_t1_scene_six_trips(self):
        # A representative unblocked seed; blocked scenes are analyzed in
        # the acceptance suite.
        scene = generate_scene(TierConfig.preset(Tier.T1), 0)
        trace = run_policy(scene, PULL, SIM, 0)
        assert trace.trips == 6
        assert objects_per_trip(trace) == 2.0

    def test_never_emits_infeasible_composites(self):
        for seed in range(30):
            scene = generate_scene(TierConfig.preset(Tier.T2), seed)
            trace = run_policy(scene, PULL, SIM, seed)  # apply re-checks
            assert trace.final_state.stacks == {}


class TestStackPolicy:
    def test_t0_cups_three_pair_trips(self):
        scene = generate_scene(TierConfig.preset(Tier.T0_CUPS), 5)
        trace = run_policy(scene, STACK, SIM, 5)
        assert trace.trips == 3
        assert objects_per_trip(trace) == 2.0
        assert all(e.kind == "stack_grasp" for e in trace.events)

    def test_t1_one_per_bowl_exact(self):
        scene = generate_scene(TierConfig.preset(Tier.T1), 9)
        trace = run_policy(scene, STACK, SIM, 9)
        assert trace.trips == 6
        assert objects_per_trip(trace) == 2.0
        # First four trips carry a utensil on a bowl.
        for event in trace.events[:4]:
            assert event.kind == "stack_grasp"
            assert len(event.moved_to_bin) == 2

    def test_two_bowls_one_cup(self):
        scene = build_scene([([BOWL], 15, 15), ([BOWL], 60, 40), ([CUP], 40, 20)])
        trace = run_policy(scene, STACK, SIM, 2)
        assert trace.trips == 2
        assert objects_per_trip(trace) == 1.5

    def test_all_on_one_bowl_t1(self):
        cfg = PolicyConfig(kind=PolicyKind.STACK,
                           utensil_stacking=UtensilStacking.ALL_ON_ONE_BOWL)
        scene = generate_scene(TierConfig.preset(Tier.T1), 4)
        trace = run_policy(scene, cfg, SIM, 4)
        assert trace.trips == 5
        assert objects_per_trip(trace) == 2.4
        first = trace.events[0]
        assert first.kind == "stack_grasp"
        assert len(first.params["placements"]) == 4
        assert len(first.moved_to_bin) == 5

    def test_utensils_only_tier_pairs(self):
        scene = generate_scene(TierConfig.preset(Tier.T0_UTENSILS), 8)
        trace = run_policy(scene, STACK, SIM, 8)
        assert trace.trips == 3
        assert objects_per_trip(trace) == 2.0

    def test_never_creates_tall_cup_bowl_pile(self):
        for seed in range(30):
            scene = generate_scene(TierConfig.preset(Tier.T2), seed)
            state = scene
            rng = SplitMix64(seed)
            while state.stacks:
                action = next_action(state, rng, SIM, STACK)
                state, _ = apply(state, action, SIM, rng)
                for stack in state.stacks.values():
                    hard = sum(
                        1 for d in stack.dishes
                        if state.dishes[d].kind is not UTENSIL
                    )
                    assert hard < 4


class TestRunPolicy:
    @pytest.mark.parametrize("policy", [RANDOM, PULL, STACK])
    def test_terminates_and_clears(self, policy):
        scene = generate_scene(TierConfig.preset(Tier.T2), 17)
        trace = run_policy(scene, policy, SIM, 17)
        assert trace.final_state.stacks == {}
        assert trace.objects_cleared == 12
        assert trace.trips <= 12
        assert validate(trace.final_state, SIM.dish_specs) == []

    def test_deterministic_given_seed(self):
        scene = generate_scene(TierConfig.preset(Tier.T2), 23)
        t1 = run_policy(scene, PULL, SIM, 99)
        t2 = run_policy(scene, PULL, SIM, 99)
        assert [e.to_json_obj() for e in t1.events] == [e.to_json_obj() for e in t2.events]

    def test_monotonic_progress_without_failures(self):
        scene = generate_scene(TierConfig.preset(Tier.T1), 31)
        state = scene
        rng = SplitMix64(31)
        bin_size = 0
        while state.stacks:
            action = next_action(state, rng, SIM, STACK)
            state, _ = apply(state, action, SIM, rng)
            assert len(state.bin) > bin_size
            bin_size = len(state.bin)

    def test_consolidation_never_hurts(self):
        # Random moves whole stacks too, so OpT(stack/pull) >= OpT(random).
        for seed in range(20):
            scene = generate_scene(TierConfig.preset(Tier.T2), seed)
            base = objects_per_trip(run_policy(scene, RANDOM, SIM, seed))
            for policy in (PULL, STACK):
                assert objects_per_trip(run_policy(scene, policy, SIM, seed)) >= base
