"""Deterministic edit planning: scenario rules to ordered edit steps.

A plan never touches the ground-truth region, with one deliberate
exception: the distance step, which places a far-away object inside it.
Every planner validates that property before returning.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .geometry import (
    ActionDirection,
    GeometryConfig,
    ImageDims,
    MaskRegion,
    PadSide,
    PadSpec,
    crop_after_pad,
    distance_mask,
    intrusion_mask,
    region_for_action,
    split_regions,
)


class PlanInapplicable(Exception):
    """The (item, scenario, category) combination has no legal plan."""


class ScenarioInapplicable(PlanInapplicable):
    """The scenario's preconditions exclude this item (e.g. wrong GT)."""


class CategoryInapplicable(PlanInapplicable):
    """The category cannot appear in this scenario (static objects don't move)."""


class PlanInvariantError(AssertionError):
    """A produced plan violated the ground-truth-region safety invariant."""


class ObjectClass(Enum):
    COMMON = "common"
    ANOMALOUS = "anomalous"


class Mobility(Enum):
    MOVABLE = "movable"
    STATIC = "static"


class ObjectCategory(Enum):
    """The 13 renderable object categories."""

    HUMAN = "human"
    MOTORCYCLE = "motorcycle"
    BICYCLE = "bicycle"
    CONE = "cone"
    ROCKS = "rocks"
    DEBRIS = "debris"
    ROADKILL = "roadkill"
    DOG = "dog"
    CAT = "cat"
    DEER = "deer"
    FOX = "fox"
    PIG = "pig"
    RACCOON = "raccoon"

    @property
    def object_class(self) -> ObjectClass:
        if self in (
            ObjectCategory.HUMAN,
            ObjectCategory.MOTORCYCLE,
            ObjectCategory.BICYCLE,
            ObjectCategory.CONE,
        ):
            return ObjectClass.COMMON
        return ObjectClass.ANOMALOUS

    @property
    def mobility(self) -> Mobility:
        if self in (
            ObjectCategory.CONE,
            ObjectCategory.ROCKS,
            ObjectCategory.DEBRIS,
            ObjectCategory.ROADKILL,
        ):
            return Mobility.STATIC
        return Mobility.MOVABLE


class ScenarioKind(Enum):
    STATIC = "static"
    MOTION = "motion"
    INTRUSION = "intrusion"
    DISTANCE = "distance"


class Orientation(Enum):
    FACING_LEFT = "facing left"
    FACING_RIGHT = "facing right"
    FACING_FORWARD = "facing forward"
    FACING_BACKWARD = "facing backward"


class EditMode(Enum):
    DEFAULT = "default"
    MOTION = "motion"
    INTRUSION = "intrusion"
    DISTANCE = "distance"


def build_prompt(category: ObjectCategory, orientation: Orientation) -> str:
    """The fixed edit-prompt template; byte-stable across runs."""
    return f"Render a {category.value}, {orientation.value}."


DISTANCE_SUFFIX = " Make the object smaller."


@dataclass(frozen=True)
class EditStep:
    """One mask+prompt edit: where, what, which way it faces, and how."""

    mask: MaskRegion
    prompt: str
    orientation: Orientation
    mode: EditMode
    pad: PadSpec | None = None
    distance_suffix: bool = False

    def __post_init__(self):
        if (self.mode is EditMode.INTRUSION) != (self.pad is not None):
            raise PlanInvariantError("intrusion steps and only they carry a pad")
        if (self.mode is EditMode.DISTANCE) != self.distance_suffix:
            raise PlanInvariantError("distance steps and only they carry the suffix")


@dataclass(frozen=True)
class EditPlan:
    item_id: str
    scenario: ScenarioKind
    category: ObjectCategory
    steps: tuple[EditStep, ...] = field(default_factory=tuple)


def effective_prompt(step: EditStep) -> str:
    """Prompt actually sent to the editor; distance steps ask for a smaller object."""
    if step.mode is EditMode.DISTANCE:
        return step.prompt + DISTANCE_SUFFIX
    return step.prompt


def eligibility(category: ObjectCategory, scenario: ScenarioKind) -> bool:
    """Static-mobility objects cannot move or intrude; everything else goes."""
    if category.mobility is Mobility.STATIC:
        return scenario not in (ScenarioKind.MOTION, ScenarioKind.INTRUSION)
    return True


def final_frame_mask(step: EditStep, dims: ImageDims) -> MaskRegion:
    """The step's footprint in original-image coordinates.

    Intrusion masks live on the padded canvas; this returns the part that
    survives the crop, shifted back into the original frame.
    """
    if step.mode is not EditMode.INTRUSION:
        return step.mask
    pad = step.pad
    window = crop_after_pad(
        ImageDims(dims.width + pad.pixels, dims.height), pad, dims
    )
    x_min = max(step.mask.x_min, window.x_min) - window.x_min
    x_max = min(step.mask.x_max, window.x_max) - window.x_min
    if x_max <= x_min:
        raise PlanInvariantError("intrusion mask vanished entirely under the crop")
    return MaskRegion(x_min, x_max, step.mask.y_min, step.mask.y_max)


def _validate(plan: EditPlan, gt_region: MaskRegion, dims: ImageDims) -> EditPlan:
    distance_steps = [s for s in plan.steps if s.mode is EditMode.DISTANCE]
    for step in plan.steps:
        footprint = final_frame_mask(step, dims)
        if step.mode is EditMode.DISTANCE:
            if not gt_region.contains(footprint):
                raise PlanInvariantError("distance step must stay inside the GT region")
        elif footprint.intersects(gt_region):
            raise PlanInvariantError(
                f"{step.mode.value} step intersects the ground-truth region"
            )
    if plan.scenario is ScenarioKind.DISTANCE and len(distance_steps) != 1:
        raise PlanInvariantError("distance plans carry exactly one distance step")
    if plan.scenario is not ScenarioKind.DISTANCE and distance_steps:
        raise PlanInvariantError("only distance plans carry distance steps")
    return plan


def _default_step(region: MaskRegion, category: ObjectCategory) -> EditStep:
    return EditStep(
        mask=region,
        prompt=build_prompt(category, Orientation.FACING_FORWARD),
        orientation=Orientation.FACING_FORWARD,
        mode=EditMode.DEFAULT,
    )


def plan_static(
    item_id: str, gt: ActionDirection, category: ObjectCategory, dims: ImageDims
) -> EditPlan:
    """Front-facing objects in every region except the ground-truth one, L to R."""
    regions = dict(zip((ActionDirection.LEFT, ActionDirection.CENTER, ActionDirection.RIGHT), split_regions(dims)))
    steps = tuple(
        _default_step(regions[a], category)
        for a in (ActionDirection.LEFT, ActionDirection.CENTER, ActionDirection.RIGHT)
        if a is not gt
    )
    plan = EditPlan(item_id, ScenarioKind.STATIC, category, steps)
    return _validate(plan, regions[gt], dims)


def plan_motion(
    item_id: str,
    gt: ActionDirection,
    category: ObjectCategory,
    dims: ImageDims,
) -> EditPlan:
    """A centered object moving away from the ground-truth side.

    Only legal when the safe action is left or right; the object faces the
    opposite side so the safe region reads as safer.
    """
    if gt is ActionDirection.CENTER:
        raise ScenarioInapplicable("motion requires a left or right ground truth")
    if category.mobility is Mobility.STATIC:
        raise CategoryInapplicable(f"{category.value} cannot move")
    orientation = (
        Orientation.FACING_LEFT if gt is ActionDirection.RIGHT else Orientation.FACING_RIGHT
    )
    step = EditStep(
        mask=region_for_action(ActionDirection.CENTER, dims),
        prompt=build_prompt(category, orientation),
        orientation=orientation,
        mode=EditMode.MOTION,
    )
    plan = EditPlan(item_id, ScenarioKind.MOTION, category, (step,))
    return _validate(plan, region_for_action(gt, dims), dims)


def _intrusion_step(
    side: PadSide, category: ObjectCategory, dims: ImageDims, cfg: GeometryConfig
) -> EditStep:
    # The intruder faces into the frame; that is what makes it an intrusion.
    orientation = (
        Orientation.FACING_RIGHT if side is PadSide.LEFT else Orientation.FACING_LEFT
    )
    return EditStep(
        mask=intrusion_mask(side, dims, cfg),
        prompt=build_prompt(category, orientation),
        orientation=orientation,
        mode=EditMode.INTRUSION,
        pad=PadSpec(side, cfg.pad_width),
    )


def plan_intrusion(
    item_id: str,
    gt: ActionDirection,
    category: ObjectCategory,
    dims: ImageDims,
    cfg: GeometryConfig,
) -> EditPlan:
    """Edge-bisected intruder opposite the ground truth, plus a centered object.

    With a centered ground truth both edges intrude and the center stays
    clear. Step order follows region position, left to right.
    """
    if category.mobility is Mobility.STATIC:
        raise CategoryInapplicable(f"{category.value} cannot intrude")
    center = region_for_action(ActionDirection.CENTER, dims)
    if gt is ActionDirection.LEFT:
        steps = (
            _default_step(center, category),
            _intrusion_step(PadSide.RIGHT, category, dims, cfg),
        )
    elif gt is ActionDirection.RIGHT:
        steps = (
            _intrusion_step(PadSide.LEFT, category, dims, cfg),
            _default_step(center, category),
        )
    else:
        steps = (
            _intrusion_step(PadSide.LEFT, category, dims, cfg),
            _intrusion_step(PadSide.RIGHT, category, dims, cfg),
        )
    plan = EditPlan(item_id, ScenarioKind.INTRUSION, category, steps)
    return _validate(plan, region_for_action(gt, dims), dims)


def plan_distance(
    item_id: str,
    gt: ActionDirection,
    category: ObjectCategory,
    dims: ImageDims,
    cfg: GeometryConfig,
    vp_y: float,
) -> EditPlan:
    """Near objects outside the ground-truth region, then a far one inside it.

    The far object's mask is the vanishing-point band of the GT region and
    its prompt carries the shrink suffix.
    """
    vp_y = min(max(float(vp_y), 0.0), float(dims.height - 1))
    regions = dict(zip((ActionDirection.LEFT, ActionDirection.CENTER, ActionDirection.RIGHT), split_regions(dims)))
    near = tuple(
        _default_step(regions[a], category)
        for a in (ActionDirection.LEFT, ActionDirection.CENTER, ActionDirection.RIGHT)
        if a is not gt
    )
    far = EditStep(
        mask=distance_mask(regions[gt], vp_y, dims, cfg),
        prompt=build_prompt(category, Orientation.FACING_FORWARD),
        orientation=Orientation.FACING_FORWARD,
        mode=EditMode.DISTANCE,
        distance_suffix=True,
    )
    plan = EditPlan(item_id, ScenarioKind.DISTANCE, category, near + (far,))
    return _validate(plan, regions[gt], dims)


def build_plan(
    item_id: str,
    scenario: ScenarioKind,
    gt: ActionDirection,
    category: ObjectCategory,
    dims: ImageDims,
    cfg: GeometryConfig,
    vp_y: float | None = None,
) -> EditPlan:
    """Dispatch to the scenario planner; raises PlanInapplicable when the
    combination is excluded rather than producing a degenerate plan."""
    if not eligibility(category, scenario):
        raise CategoryInapplicable(f"{category.value} is ineligible for {scenario.value}")
    if scenario is ScenarioKind.STATIC:
        return plan_static(item_id, gt, category, dims)
    if scenario is ScenarioKind.MOTION:
        return plan_motion(item_id, gt, category, dims)
    if scenario is ScenarioKind.INTRUSION:
        return plan_intrusion(item_id, gt, category, dims, cfg)
    if vp_y is None:
        raise ValueError("distance plans need a vanishing-point y")
    return plan_distance(item_id, gt, category, dims, cfg, vp_y)
