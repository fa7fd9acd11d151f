"""Procedural test scenes: line fans and toy road images.

Used by the bundled source fixture, the demos, and the test suite. All
output is deterministic for a given seed. Coordinates handed to these
helpers use the mask-math convention (bottom-left origin), matching the
rest of the pipeline.
"""

from __future__ import annotations

import math

import numpy as np
from PIL import Image, ImageDraw


def draw_line_fan(
    width: int,
    height: int,
    cx: float,
    cy: float,
    angles_deg: list[float],
    stroke: int = 3,
    fg: int = 255,
    bg: int = 0,
) -> np.ndarray:
    """Grayscale raster of full-frame lines through (cx, cy) at the given angles.

    (cx, cy) is in math coords; angles are measured from the horizontal,
    positive counterclockwise in math coords.
    """
    img = Image.new("L", (width, height), color=bg)
    draw = ImageDraw.Draw(img)
    ry = (height - 1) - cy
    reach = float(width + height)
    for a in angles_deg:
        dx = math.cos(math.radians(a))
        dy = -math.sin(math.radians(a))  # raster y grows downward
        p0 = (cx - reach * dx, ry - reach * dy)
        p1 = (cx + reach * dx, ry + reach * dy)
        draw.line([p0, p1], fill=fg, width=stroke)
    return np.asarray(img, dtype=np.uint8)


def draw_parallel_lines(
    width: int,
    height: int,
    angle_deg: float,
    count: int = 6,
    spacing: int = 30,
    stroke: int = 3,
) -> np.ndarray:
    """Single family of parallel lines; no stable intersection exists."""
    img = Image.new("L", (width, height), color=0)
    draw = ImageDraw.Draw(img)
    dx = math.cos(math.radians(angle_deg))
    dy = -math.sin(math.radians(angle_deg))
    nx, ny = -dy, dx  # unit normal in raster coords
    reach = float(width + height)
    cx, cy = width / 2.0, height / 2.0
    for i in range(count):
        off = (i - (count - 1) / 2.0) * spacing
        ox, oy = cx + off * nx, cy + off * ny
        draw.line(
            [(ox - reach * dx, oy - reach * dy), (ox + reach * dx, oy + reach * dy)],
            fill=255,
            width=stroke,
        )
    return np.asarray(img, dtype=np.uint8)


def road_scene(
    width: int,
    height: int,
    vp_x: float,
    vp_y: float,
    seed: int = 0,
) -> np.ndarray:
    """Toy RGB road scene whose lane edges converge at the given point.

    Sky/ground split at the horizon through the VP, several oblique lane
    and shoulder lines through it, and a seeded tint so distinct items
    differ. Good enough for the rule-based detector to lock onto.
    """
    rng = np.random.default_rng(seed)
    tint = rng.integers(-18, 19, size=3)

    ry = (height - 1) - vp_y
    rows = np.arange(height, dtype=np.float64)[:, None]
    sky = np.array([140, 170, 215], dtype=np.float64)
    ground = np.array([95, 92, 88], dtype=np.float64)
    blend = np.clip((rows - ry) / max(1.0, height - ry), 0.0, 1.0)
    base = sky * (1.0 - blend[..., None]) + ground * blend[..., None]
    img = np.clip(base + tint, 0, 255).astype(np.uint8)
    img = np.repeat(img, width, axis=1).reshape(height, width, 3)

    angles = [32.0, -32.0, 55.0, -55.0, 20.0, -20.0, 70.0, -70.0]
    fan = draw_line_fan(width, height, vp_x, vp_y, angles, stroke=3)
    # Paint lane lines only below the horizon; above it they would be sky clutter.
    lane = (fan > 0) & (np.arange(height)[:, None] >= ry)
    img[lane] = np.array([235, 230, 210], dtype=np.uint8)
    return img
