"""Pixel-coordinate math for scenario masks.

Everything here is pure integer/float arithmetic on value types, plus two
raster helpers (`crop_to_mask`, `rasterize_mask`) that bridge between the
mask coordinate convention and numpy's row-major storage.

Coordinate convention: mask math uses a bottom-left origin (x right, y up).
Rasters are numpy arrays with row 0 at the top. The y-flip between the two
happens exactly once, inside the raster helpers; all `MaskRegion` arithmetic
is convention-agnostic.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np


class GeometryError(ValueError):
    """Base for all geometry-level failures."""


class DegenerateDimsError(GeometryError):
    """Image too small to carry three nonempty regions."""


class MaskConfigError(GeometryError):
    """Mask parameters (l, r, d) violate their constraints."""


class FrameMismatchError(GeometryError):
    """A mask or pad does not fit the raster it is applied to."""


class ActionDirection(Enum):
    """The three possible safe-direction answers."""

    LEFT = "left"
    CENTER = "center"
    RIGHT = "right"

    @property
    def option_text(self) -> str:
        return _OPTION_TEXT[self]


_OPTION_TEXT = {
    ActionDirection.LEFT: "go left",
    ActionDirection.CENTER: "go straight",
    ActionDirection.RIGHT: "go right",
}

#: MCQ options in presentation order (A, B, C).
OPTION_ORDER = (ActionDirection.LEFT, ActionDirection.CENTER, ActionDirection.RIGHT)


class PadSide(Enum):
    """Which image edge an outpainted strip is attached to."""

    LEFT = "left"
    RIGHT = "right"


class FrameKind(Enum):
    ORIGINAL = "original"
    PADDED_LEFT = "padded_left"
    PADDED_RIGHT = "padded_right"


@dataclass(frozen=True)
class Frame:
    """Coordinate frame a mask lives in: the original image or a padded canvas."""

    kind: FrameKind
    pad: int = 0

    def __post_init__(self):
        if self.kind is FrameKind.ORIGINAL:
            if self.pad != 0:
                raise FrameMismatchError("original frame carries no pad")
        elif self.pad <= 0:
            raise FrameMismatchError("padded frame requires pad > 0")

    @staticmethod
    def original() -> "Frame":
        return Frame(FrameKind.ORIGINAL)

    @staticmethod
    def padded(side: PadSide, pad: int) -> "Frame":
        kind = FrameKind.PADDED_LEFT if side is PadSide.LEFT else FrameKind.PADDED_RIGHT
        return Frame(kind, pad)

    def width_for(self, dims: "ImageDims") -> int:
        """Canvas width of this frame for an image of the given original dims."""
        return dims.width + self.pad


@dataclass(frozen=True)
class ImageDims:
    width: int
    height: int

    def __post_init__(self):
        if self.width < 3 or self.height < 1:
            raise DegenerateDimsError(
                f"image must be at least 3x1, got {self.width}x{self.height}"
            )


@dataclass(frozen=True)
class MaskRegion:
    """Axis-aligned half-open pixel rectangle [x_min, x_max) x [y_min, y_max)."""

    x_min: int
    x_max: int
    y_min: int
    y_max: int
    frame: Frame = Frame.original()

    def __post_init__(self):
        if not (0 <= self.x_min < self.x_max and 0 <= self.y_min < self.y_max):
            raise FrameMismatchError(
                f"degenerate mask [{self.x_min},{self.x_max})x[{self.y_min},{self.y_max})"
            )

    @property
    def width(self) -> int:
        return self.x_max - self.x_min

    @property
    def height(self) -> int:
        return self.y_max - self.y_min

    @property
    def area(self) -> int:
        return self.width * self.height

    def intersects(self, other: "MaskRegion") -> bool:
        return (
            self.x_min < other.x_max
            and other.x_min < self.x_max
            and self.y_min < other.y_max
            and other.y_min < self.y_max
        )

    def contains(self, other: "MaskRegion") -> bool:
        return (
            self.x_min <= other.x_min
            and other.x_max <= self.x_max
            and self.y_min <= other.y_min
            and other.y_max <= self.y_max
        )

    def to_dict(self) -> dict:
        return {
            "x_min": self.x_min,
            "x_max": self.x_max,
            "y_min": self.y_min,
            "y_max": self.y_max,
            "frame": self.frame.kind.value,
            "pad": self.frame.pad,
        }

    @staticmethod
    def from_dict(d: dict) -> "MaskRegion":
        return MaskRegion(
            x_min=int(d["x_min"]),
            x_max=int(d["x_max"]),
            y_min=int(d["y_min"]),
            y_max=int(d["y_max"]),
            frame=Frame(FrameKind(d.get("frame", "original")), int(d.get("pad", 0))),
        )


@dataclass(frozen=True)
class PadSpec:
    """An r-pixel outpaint attached to one vertical image edge."""

    side: PadSide
    pixels: int

    def __post_init__(self):
        if self.pixels <= 0:
            raise MaskConfigError(f"pad width must be positive, got {self.pixels}")


@dataclass(frozen=True)
class GeometryConfig:
    """Mask-size knobs: intrusion half-width, pad width, distance band fraction.

    `pad_width` must exceed `intrusion_half_width` so the boundary mask both
    straddles the image edge and stays inside the padded strip, and must be
    smaller than the image width so the crop leaves a nonempty original strip.
    """

    intrusion_half_width: int
    pad_width: int
    distance_band: float

    def __post_init__(self):
        if self.intrusion_half_width <= 0:
            raise MaskConfigError("intrusion_half_width must be > 0")
        if self.pad_width <= self.intrusion_half_width:
            raise MaskConfigError(
                f"pad_width ({self.pad_width}) must exceed intrusion_half_width "
                f"({self.intrusion_half_width})"
            )
        if not (0.0 < self.distance_band <= 1.0):
            raise MaskConfigError("distance_band must lie in (0, 1]")

    @staticmethod
    def defaults_for(dims: ImageDims) -> "GeometryConfig":
        """Scale defaults off the image width: r = 20% of W, l = 6% of W, d = 0.1.

        Clamped so tiny images still get a legal (l, r) pair with r < W.
        """
        l = max(1, round(0.06 * dims.width))
        r = max(l + 1, round(0.2 * dims.width))
        r = min(r, dims.width - 1)
        if r <= l:
            raise MaskConfigError(f"no legal intrusion config for width {dims.width}")
        return GeometryConfig(intrusion_half_width=l, pad_width=r, distance_band=0.1)

    def validate_for(self, dims: ImageDims) -> None:
        if self.pad_width >= dims.width:
            raise MaskConfigError(
                f"pad_width ({self.pad_width}) must be smaller than image width "
                f"({dims.width})"
            )


def split_regions(dims: ImageDims) -> tuple[MaskRegion, MaskRegion, MaskRegion]:
    """Split the image into left/center/right thirds, full height.

    Boundaries are floor(W/3) and floor(2W/3); the right region absorbs any
    remainder, so the three regions always partition the image exactly.
    """
    w, h = dims.width, dims.height
    b1, b2 = w // 3, (2 * w) // 3
    return (
        MaskRegion(0, b1, 0, h),
        MaskRegion(b1, b2, 0, h),
        MaskRegion(b2, w, 0, h),
    )


def region_for_action(action: ActionDirection, dims: ImageDims) -> MaskRegion:
    """Map a safe-direction answer to its image third."""
    left, center, right = split_regions(dims)
    return {
        ActionDirection.LEFT: left,
        ActionDirection.CENTER: center,
        ActionDirection.RIGHT: right,
    }[action]


def intrusion_mask(side: PadSide, dims: ImageDims, cfg: GeometryConfig) -> MaskRegion:
    """Boundary mask on the padded canvas, straddling the original image edge.

    Padded width is W + r. A left-edge pad puts the original at [r, W+r), so
    the mask [r-l, r+l) is bisected by the edge at x = r; a right-edge pad
    leaves the original at [0, W) and the mask [W-l, W+l) is bisected at
    x = W. Cropping the pad away later keeps exactly an l-wide strip of the
    generated object.
    """
    cfg.validate_for(dims)
    l, r = cfg.intrusion_half_width, cfg.pad_width
    w, h = dims.width, dims.height
    if side is PadSide.LEFT:
        return MaskRegion(r - l, r + l, 0, h, Frame.padded(PadSide.LEFT, r))
    return MaskRegion(w - l, w + l, 0, h, Frame.padded(PadSide.RIGHT, r))


def crop_after_pad(padded: ImageDims, pad: PadSpec, original: ImageDims) -> MaskRegion:
    """Window of the padded canvas that survives removing the r-pixel strip.

    Composed with the pad this is the identity on the retained original
    pixels. The original dims are required to verify the padded canvas
    actually is original-plus-pad.
    """
    expected_w = original.width + pad.pixels
    if padded.width != expected_w or padded.height != original.height:
        raise FrameMismatchError(
            f"padded canvas is {padded.width}x{padded.height}, "
            f"expected {expected_w}x{original.height}"
        )
    w, h, r = original.width, original.height, pad.pixels
    if pad.side is PadSide.LEFT:
        return MaskRegion(r, w + r, 0, h, Frame.padded(PadSide.LEFT, r))
    return MaskRegion(0, w, 0, h, Frame.padded(PadSide.RIGHT, r))


def distance_mask(
    gt_region: MaskRegion,
    vp_y: float,
    dims: ImageDims,
    cfg: GeometryConfig,
) -> MaskRegion:
    """Horizontal band of the ground-truth region around the vanishing-point y.

    The band is |y - vp_y| <= d*H intersected with the region, floored below
    and ceiled above so fractional bands never lose the anchor row.
    """
    if not (0 <= vp_y < dims.height):
        raise FrameMismatchError(
            f"vp_y {vp_y} outside [0, {dims.height}); clamp it first"
        )
    band = cfg.distance_band * dims.height
    y_lo = math.floor(max(0.0, vp_y - band))
    y_hi = math.ceil(min(float(dims.height), vp_y + band + 1.0))
    if y_hi <= y_lo:
        raise GeometryError("distance band collapsed; clamping upstream is broken")
    return MaskRegion(gt_region.x_min, gt_region.x_max, y_lo, y_hi, gt_region.frame)


def _raster_rows(mask: MaskRegion, raster_height: int) -> tuple[int, int]:
    # Single y-flip between bottom-left mask math and top-left raster rows.
    return raster_height - mask.y_max, raster_height - mask.y_min


def crop_to_mask(image: np.ndarray, mask: MaskRegion) -> np.ndarray:
    """Extract the mask rectangle from a raster (copy, same dtype)."""
    h, w = image.shape[:2]
    if mask.x_max > w or mask.y_max > h:
        raise FrameMismatchError(
            f"mask [{mask.x_min},{mask.x_max})x[{mask.y_min},{mask.y_max}) "
            f"exceeds raster {w}x{h}"
        )
    r0, r1 = _raster_rows(mask, h)
    return image[r0:r1, mask.x_min : mask.x_max].copy()


def rasterize_mask(mask: MaskRegion, dims: ImageDims) -> np.ndarray:
    """Render a mask as an 8-bit raster: 255 editable, 0 frozen.

    The raster spans the mask's whole frame (padded width for padded-frame
    masks), matching the canvas the edit runs on.
    """
    frame_w = mask.frame.width_for(dims)
    if mask.x_max > frame_w or mask.y_max > dims.height:
        raise FrameMismatchError(
            f"mask [{mask.x_min},{mask.x_max})x[{mask.y_min},{mask.y_max}) "
            f"exceeds frame {frame_w}x{dims.height}"
        )
    out = np.zeros((dims.height, frame_w), dtype=np.uint8)
    r0, r1 = _raster_rows(mask, dims.height)
    out[r0:r1, mask.x_min : mask.x_max] = 255
    return out


def apply_crop(image: np.ndarray, window: MaskRegion) -> np.ndarray:
    """Crop a raster to a retained window (alias of crop_to_mask for intent)."""
    return crop_to_mask(image, window)
