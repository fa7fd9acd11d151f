"""Scenario planners: placement, orientation, eligibility, safety invariant."""

import pytest

from hazardforge.geometry import ActionDirection, GeometryConfig, ImageDims, PadSide
from hazardforge.planner import (
    CategoryInapplicable,
    EditMode,
    ObjectCategory,
    ObjectClass,
    Mobility,
    Orientation,
    PlanInapplicable,
    ScenarioInapplicable,
    ScenarioKind,
    build_plan,
    build_prompt,
    effective_prompt,
    eligibility,
    final_frame_mask,
    plan_distance,
    plan_intrusion,
    plan_motion,
    plan_static,
)

DIMS = ImageDims(900, 600)
CFG = GeometryConfig(intrusion_half_width=60, pad_width=200, distance_band=0.1)


class TestCategories:
    def test_thirteen_categories(self):
        assert len(ObjectCategory) == 13

    def test_class_split(self):
        common = {c for c in ObjectCategory if c.object_class is ObjectClass.COMMON}
        assert common == {
            ObjectCategory.HUMAN,
            ObjectCategory.MOTORCYCLE,
            ObjectCategory.BICYCLE,
            ObjectCategory.CONE,
        }

    def test_static_mobility_set(self):
        static = {c for c in ObjectCategory if c.mobility is Mobility.STATIC}
        assert static == {
            ObjectCategory.CONE,
            ObjectCategory.ROCKS,
            ObjectCategory.DEBRIS,
            ObjectCategory.ROADKILL,
        }


class TestPrompts:
    def test_template(self):
        assert build_prompt(ObjectCategory.DEER, Orientation.FACING_LEFT) == (
            "Render a deer, facing left."
        )
        assert build_prompt(ObjectCategory.CONE, Orientation.FACING_FORWARD) == (
            "Render a cone, facing forward."
        )
        assert build_prompt(ObjectCategory.RACCOON, Orientation.FACING_RIGHT) == (
            "Render a raccoon, facing right."
        )

    def test_distance_suffix(self):
        plan = plan_distance("i", ActionDirection.RIGHT, ObjectCategory.FOX, DIMS, CFG, 310)
        far = plan.steps[-1]
        assert effective_prompt(far) == (
            "Render a fox, facing forward. Make the object smaller."
        )

    def test_non_distance_prompt_unchanged(self):
        motion = plan_motion("i", ActionDirection.LEFT, ObjectCategory.PIG, DIMS)
        assert effective_prompt(motion.steps[0]) == motion.steps[0].prompt
        intr = plan_intrusion("i", ActionDirection.LEFT, ObjectCategory.PIG, DIMS, CFG)
        for step in intr.steps:
            assert effective_prompt(step) == step.prompt


class TestMotion:
    def test_gt_right_faces_left(self):
        plan = plan_motion("i", ActionDirection.RIGHT, ObjectCategory.DOG, DIMS)
        assert len(plan.steps) == 1
        step = plan.steps[0]
        assert (step.mask.x_min, step.mask.x_max) == (300, 600)
        assert step.orientation is Orientation.FACING_LEFT
        assert step.prompt == "Render a dog, facing left."
        assert step.mode is EditMode.MOTION

    def test_gt_left_faces_right(self):
        plan = plan_motion("i", ActionDirection.LEFT, ObjectCategory.PIG, DIMS)
        assert plan.steps[0].orientation is Orientation.FACING_RIGHT

    def test_gt_center_inapplicable(self):
        with pytest.raises(ScenarioInapplicable):
            plan_motion("i", ActionDirection.CENTER, ObjectCategory.CAT, DIMS)

    def test_static_category_inapplicable(self):
        with pytest.raises(CategoryInapplicable):
            plan_motion("i", ActionDirection.LEFT, ObjectCategory.CONE, DIMS)


class TestStatic:
    def test_gt_center(self):
        plan = plan_static("i", ActionDirection.CENTER, ObjectCategory.CONE, DIMS)
        spans = [(s.mask.x_min, s.mask.x_max) for s in plan.steps]
        assert spans == [(0, 300), (600, 900)]
        assert all(s.orientation is Orientation.FACING_FORWARD for s in plan.steps)

    def test_gt_left(self):
        plan = plan_static("i", ActionDirection.LEFT, ObjectCategory.ROCKS, DIMS)
        spans = [(s.mask.x_min, s.mask.x_max) for s in plan.steps]
        assert spans == [(300, 600), (600, 900)]

    def test_always_two_steps(self):
        for gt in ActionDirection:
            for cat in ObjectCategory:
                assert len(plan_static("i", gt, cat, DIMS).steps) == 2


class TestIntrusion:
    def test_gt_left(self):
        plan = plan_intrusion("i", ActionDirection.LEFT, ObjectCategory.MOTORCYCLE, DIMS, CFG)
        center, edge = plan.steps
        assert center.mode is EditMode.DEFAULT
        assert (center.mask.x_min, center.mask.x_max) == (300, 600)
        assert center.orientation is Orientation.FACING_FORWARD
        assert edge.mode is EditMode.INTRUSION
        assert edge.pad.side is PadSide.RIGHT
        assert edge.orientation is Orientation.FACING_LEFT
        assert (edge.mask.x_min, edge.mask.x_max) == (840, 960)

    def test_gt_right_orders_left_edge_first(self):
        plan = plan_intrusion("i", ActionDirection.RIGHT, ObjectCategory.DEER, DIMS, CFG)
        edge, center = plan.steps
        assert edge.mode is EditMode.INTRUSION
        assert edge.pad.side is PadSide.LEFT
        assert edge.orientation is Orientation.FACING_RIGHT
        assert center.mode is EditMode.DEFAULT

    def test_gt_center_both_edges(self):
        plan = plan_intrusion("i", ActionDirection.CENTER, ObjectCategory.DEER, DIMS, CFG)
        assert [s.mode for s in plan.steps] == [EditMode.INTRUSION, EditMode.INTRUSION]
        assert [s.pad.side for s in plan.steps] == [PadSide.LEFT, PadSide.RIGHT]
        # No step may overlap the center ground-truth region after cropping.
        for step in plan.steps:
            footprint = final_frame_mask(step, DIMS)
            assert not footprint.intersects(
                plan_static("i", ActionDirection.LEFT, ObjectCategory.DEER, DIMS).steps[0].mask
            )

    def test_static_category_inapplicable(self):
        with pytest.raises(CategoryInapplicable):
            plan_intrusion("i", ActionDirection.RIGHT, ObjectCategory.CONE, DIMS, CFG)

    def test_post_crop_width_is_half_mask(self):
        plan = plan_intrusion("i", ActionDirection.RIGHT, ObjectCategory.DOG, DIMS, CFG)
        edge = plan.steps[0]
        footprint = final_frame_mask(edge, DIMS)
        assert footprint.width == CFG.intrusion_half_width
        assert footprint.x_min == 0


class TestDistance:
    def test_gt_right_composition(self):
        plan = plan_distance("i", ActionDirection.RIGHT, ObjectCategory.PIG, DIMS, CFG, 310)
        assert len(plan.steps) == 3
        near_spans = [(s.mask.x_min, s.mask.x_max) for s in plan.steps[:2]]
        assert near_spans == [(0, 300), (300, 600)]
        far = plan.steps[-1]
        assert far.mode is EditMode.DISTANCE
        assert (far.mask.x_min, far.mask.x_max, far.mask.y_min, far.mask.y_max) == (
            600, 900, 250, 371,
        )

    def test_clamps_vp(self):
        plan = plan_distance("i", ActionDirection.LEFT, ObjectCategory.CAT, DIMS, CFG, -40)
        far = plan.steps[-1]
        assert far.mask.y_min == 0

    def test_distance_step_is_only_gt_resident(self):
        for gt in ActionDirection:
            plan = plan_distance("i", gt, ObjectCategory.HUMAN, DIMS, CFG, 300)
            from hazardforge.geometry import region_for_action

            gt_region = region_for_action(gt, DIMS)
            inside = [s for s in plan.steps if s.mask.intersects(gt_region)]
            assert [s.mode for s in inside] == [EditMode.DISTANCE]


class TestEligibility:
    def test_table_cells(self):
        assert not eligibility(ObjectCategory.CONE, ScenarioKind.MOTION)
        assert eligibility(ObjectCategory.ROADKILL, ScenarioKind.DISTANCE)
        assert eligibility(ObjectCategory.HUMAN, ScenarioKind.INTRUSION)
        assert not eligibility(ObjectCategory.DEBRIS, ScenarioKind.INTRUSION)

    def test_full_matrix_counts(self):
        ineligible = sum(
            not eligibility(c, s) for c in ObjectCategory for s in ScenarioKind
        )
        assert ineligible == 8  # 4 static categories x {motion, intrusion}


class TestExhaustiveMatrix:
    def test_all_combinations_plan_or_typed_refusal(self):
        applicable = 0
        per_scenario = {s: 0 for s in ScenarioKind}
        for gt in ActionDirection:
            for scenario in ScenarioKind:
                for category in ObjectCategory:
                    try:
                        plan = build_plan("i", scenario, gt, category, DIMS, CFG, vp_y=310)
                    except PlanInapplicable:
                        continue
                    applicable += 1
                    per_scenario[scenario] += 1
                    assert plan.steps
        assert per_scenario[ScenarioKind.STATIC] == 39
        assert per_scenario[ScenarioKind.MOTION] == 18
        assert per_scenario[ScenarioKind.INTRUSION] == 27
        assert per_scenario[ScenarioKind.DISTANCE] == 39
        assert applicable == 132

    def test_determinism(self):
        a = build_plan("i", ScenarioKind.DISTANCE, ActionDirection.LEFT, ObjectCategory.FOX, DIMS, CFG, vp_y=271)
        b = build_plan("i", ScenarioKind.DISTANCE, ActionDirection.LEFT, ObjectCategory.FOX, DIMS, CFG, vp_y=271)
        assert a == b
