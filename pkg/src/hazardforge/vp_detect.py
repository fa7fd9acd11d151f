"""Rule-based vanishing-point detection.

Pipeline: grayscale -> Sobel gradient magnitude -> percentile edge threshold
-> straight segments from an angle-quantized (theta, rho) accumulator ->
pairwise segment intersections -> density vote on a coarse grid -> refined
centroid of the winning cell.

Every constant of the method is a named field of `VpParams`. The detector is
fully deterministic: same raster and params, same result, bit for bit.

Returned coordinates use the mask-math convention (origin bottom-left, y up);
the flip from raster rows happens once, on the way out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class VpInputError(ValueError):
    """Raster unusable for detection (too small, wrong shape)."""


@dataclass(frozen=True)
class VpParams:
    """Tuning constants for the rule-based detector.

    edge_percentile: gradient-magnitude percentile used as the edge threshold
        (strictly-above keeps a uniform image edge-free).
    min_segment_frac: discard segments shorter than this fraction of
        min(W, H).
    axis_exclusion_deg: discard segments within this many degrees of
        horizontal or vertical; converging road edges are oblique.
    theta_bins: angular quantization of the accumulator over [0, pi).
    rho_res: rho quantization and the support distance for segment pixels.
    max_peaks: accumulator peaks (after non-maximum suppression) kept as
        candidate segments.
    max_gap_frac: a segment is the longest contiguous support run; gaps
        along the line larger than this fraction of min(W, H) split it.
    min_density: minimum support pixels per unit length of the final run;
        rejects the sparsest dotted chains (rasterization fringe).
    min_pair_angle_deg: segment pairs closer in angle than this do not vote;
        their intersections are numerically unstable.
    grid_divisor: vote-grid cell size is W/grid_divisor x H/grid_divisor.
    min_support: minimum intersections in the winning cell; below it the
        detector reports not-found.
    min_confidence: minimum fraction of all intersections the winning cell
        must hold. A real vanishing point concentrates the intersections;
        leftover-fringe scatter never does.
    margin_frac: intersections farther than margin_frac * max(W, H) outside
        the frame are rejected (kills near-parallel pairs).
    """

    edge_percentile: float = 75.0
    min_segment_frac: float = 0.05
    axis_exclusion_deg: float = 8.0
    theta_bins: int = 180
    rho_res: float = 2.0
    max_peaks: int = 24
    max_gap_frac: float = 0.05
    min_density: float = 0.5
    min_pair_angle_deg: float = 5.0
    grid_divisor: int = 40
    min_support: int = 10
    min_confidence: float = 0.2
    margin_frac: float = 0.5


@dataclass(frozen=True)
class LineSegment:
    """Straight support segment: endpoints in raster coords, angle in [0, pi)."""

    x0: float
    y0: float
    x1: float
    y1: float
    angle: float
    length: float


@dataclass(frozen=True)
class VPoint:
    """Detected vanishing point in mask-math coords (bottom-left origin)."""

    x: float
    y: float
    support: int
    confidence: float


def _to_gray(image: np.ndarray) -> np.ndarray:
    if image.ndim == 3:
        img = image[..., :3].astype(np.float64)
        return img @ np.array([0.299, 0.587, 0.114])
    if image.ndim == 2:
        return image.astype(np.float64)
    raise VpInputError(f"expected HxW or HxWxC raster, got shape {image.shape}")


def _sobel(gray: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    padded = np.pad(gray, 1, mode="edge")
    # 3x3 Sobel responses built from shifted views; no convolution library needed.
    tl = padded[:-2, :-2]; tc = padded[:-2, 1:-1]; tr = padded[:-2, 2:]
    ml = padded[1:-1, :-2]; mr = padded[1:-1, 2:]
    bl = padded[2:, :-2]; bc = padded[2:, 1:-1]; br = padded[2:, 2:]
    gx = (tr + 2 * mr + br) - (tl + 2 * ml + bl)
    gy = (bl + 2 * bc + br) - (tl + 2 * tc + tr)
    return np.hypot(gx, gy), gx, gy


def _hough_segments(
    xs: np.ndarray,
    ys: np.ndarray,
    normals: np.ndarray,
    w: int,
    h: int,
    params: VpParams,
) -> list[LineSegment]:
    """Extract straight segments from edge pixels via a (theta, rho) accumulator.

    Each pixel votes only in a narrow theta window around its own gradient
    normal, which keeps the accumulator sharp and the work linear in the
    edge count.
    """
    t_bins = params.theta_bins
    thetas = np.arange(t_bins) * (math.pi / t_bins)
    cos_t, sin_t = np.cos(thetas), np.sin(thetas)
    diag = math.hypot(w, h)
    n_rho = int(2 * diag / params.rho_res) + 1

    base_bin = np.rint(normals / (math.pi / t_bins)).astype(np.int64) % t_bins
    acc = np.zeros((t_bins, n_rho), dtype=np.int64)
    flat = np.zeros(t_bins * n_rho, dtype=np.int64)
    for off in range(-3, 4):
        t_idx = (base_bin + off) % t_bins
        rho = xs * cos_t[t_idx] + ys * sin_t[t_idx]
        rho_idx = ((rho + diag) / params.rho_res).astype(np.int64)
        flat += np.bincount(t_idx * n_rho + rho_idx, minlength=flat.size)
    acc += flat.reshape(t_bins, n_rho)

    min_len = params.min_segment_frac * min(w, h)
    max_gap = params.max_gap_frac * min(w, h)
    min_votes = max(2, int(min_len))
    segments: list[LineSegment] = []
    work = acc.copy()
    # Pixels claimed by an accepted segment stop supporting later peaks, so
    # spurious in-between peaks (fed by crossing regions) starve out.
    avail = np.ones(xs.size, dtype=bool)
    for _ in range(4 * params.max_peaks):
        if len(segments) >= params.max_peaks:
            break
        flat = int(np.argmax(work))
        t_idx, r_idx = divmod(flat, n_rho)
        if work[t_idx, r_idx] < min_votes:
            break
        # Suppress the neighborhood (wrapping in theta) before the next peak.
        t_lo, t_hi = t_idx - 3, t_idx + 4
        r_lo, r_hi = max(0, r_idx - 5), min(n_rho, r_idx + 6)
        for t in range(t_lo, t_hi):
            work[t % t_bins, r_lo:r_hi] = 0

        theta = t_idx * math.pi / t_bins
        rho = r_idx * params.rho_res - diag
        # Support = unclaimed pixels near the line whose own normal agrees
        # with it; pixels of crossing lines must not contaminate the fit.
        ang_diff = np.abs(normals - theta)
        ang_ok = np.minimum(ang_diff, math.pi - ang_diff) <= 4 * math.pi / t_bins
        dist = np.abs(xs * math.cos(theta) + ys * math.sin(theta) - rho)
        sel = (dist <= params.rho_res) & ang_ok & avail
        if int(sel.sum()) < min_votes:
            continue
        seg = _fit_segment(xs[sel], ys[sel])
        if seg is None:
            continue
        # One refit against the fitted line tightens the support set.
        nx, ny = -math.sin(seg.angle), math.cos(seg.angle)
        dist = np.abs(xs * nx + ys * ny - (nx * seg.x0 + ny * seg.y0))
        refit = (dist <= params.rho_res) & ang_ok & avail
        if int(refit.sum()) >= min_votes:
            sel = refit
            seg = _fit_segment(xs[sel], ys[sel])
            if seg is None:
                continue
        # A real segment is contiguous along the line; zigzag chains that
        # hop across unrelated strokes break at the gap check.
        ux, uy = math.cos(seg.angle), math.sin(seg.angle)
        sel_idx = np.nonzero(sel)[0]
        run_idx = sel_idx[_longest_run(xs[sel_idx] * ux + ys[sel_idx] * uy, max_gap)]
        if run_idx.size < min_votes:
            continue
        seg = _fit_segment(xs[run_idx], ys[run_idx])
        if seg is None or seg.length < min_len:
            continue
        if run_idx.size / seg.length < params.min_density:
            continue
        line_angle = math.degrees(seg.angle)
        off_horizontal = min(line_angle, 180.0 - line_angle)
        off_vertical = abs(line_angle - 90.0)
        if off_horizontal <= params.axis_exclusion_deg:
            continue
        if off_vertical <= params.axis_exclusion_deg:
            continue
        # The accepted segment owns its whole tube (any normal): staircase
        # leftovers must not seed ghost lines later.
        nx, ny = -math.sin(seg.angle), math.cos(seg.angle)
        ux, uy = math.cos(seg.angle), math.sin(seg.angle)
        c = nx * seg.x0 + ny * seg.y0
        t_all = xs * ux + ys * uy
        t0, t1 = seg.x0 * ux + seg.y0 * uy, seg.x1 * ux + seg.y1 * uy
        tube = (
            (np.abs(xs * nx + ys * ny - c) <= 3 * params.rho_res)
            & (t_all >= t0 - max_gap)
            & (t_all <= t1 + max_gap)
        )
        avail &= ~tube
        segments.append(seg)
    return segments


def _longest_run(t: np.ndarray, max_gap: float) -> np.ndarray:
    """Indices (into t) of the longest contiguous run, splitting at gaps."""
    order = np.argsort(t, kind="stable")
    ts = t[order]
    breaks = np.nonzero(np.diff(ts) > max_gap)[0]
    starts = np.concatenate([[0], breaks + 1])
    ends = np.concatenate([breaks, [ts.size - 1]])
    k = int(np.argmax(ts[ends] - ts[starts]))
    return order[starts[k] : ends[k] + 1]


def _fit_segment(xs: np.ndarray, ys: np.ndarray) -> LineSegment | None:
    """Total-least-squares line through the support pixels, clipped to them."""
    cx, cy = float(xs.mean()), float(ys.mean())
    dx, dy = xs - cx, ys - cy
    sxx, syy, sxy = float((dx * dx).sum()), float((dy * dy).sum()), float((dx * dy).sum())
    # Principal axis of the 2x2 scatter matrix, canonicalized to [0, pi) so
    # endpoint projections stay consistent with the stored angle.
    line_angle = (0.5 * math.atan2(2 * sxy, sxx - syy)) % math.pi
    ux, uy = math.cos(line_angle), math.sin(line_angle)
    t = dx * ux + dy * uy
    t0, t1 = float(t.min()), float(t.max())
    length = t1 - t0
    if length <= 0:
        return None
    return LineSegment(
        x0=cx + t0 * ux, y0=cy + t0 * uy,
        x1=cx + t1 * ux, y1=cy + t1 * uy,
        angle=line_angle, length=length,
    )


def _pairwise_intersections(
    segments: list[LineSegment], min_pair_angle_deg: float
) -> tuple[np.ndarray, np.ndarray]:
    """Intersections of sufficiently non-parallel pairs, with the (i, j) behind each."""
    min_sin = math.sin(math.radians(min_pair_angle_deg))
    pts, pairs = [], []
    for i in range(len(segments)):
        si = segments[i]
        dix, diy = math.cos(si.angle), math.sin(si.angle)
        for j in range(i + 1, len(segments)):
            sj = segments[j]
            djx, djy = math.cos(sj.angle), math.sin(sj.angle)
            denom = dix * djy - diy * djx
            if abs(denom) < min_sin:
                continue
            rx, ry = sj.x0 - si.x0, sj.y0 - si.y0
            t = (rx * djy - ry * djx) / denom
            pts.append((si.x0 + t * dix, si.y0 + t * diy))
            pairs.append((i, j))
    return (
        np.array(pts, dtype=np.float64).reshape(-1, 2),
        np.array(pairs, dtype=np.int64).reshape(-1, 2),
    )


def _refine_point(
    segments: list[LineSegment],
    member_pairs: np.ndarray,
    centroid: tuple[float, float],
) -> tuple[float, float]:
    """Least-squares point over the member segments' lines.

    Each segment is weighted by length times the number of member
    intersections it participates in; falls back to the plain centroid
    when the system is ill-conditioned (near-parallel members).
    """
    weights: dict[int, float] = {}
    for i, j in member_pairs:
        weights[int(i)] = weights.get(int(i), 0.0) + 1.0
        weights[int(j)] = weights.get(int(j), 0.0) + 1.0
    a11 = a12 = a22 = b1 = b2 = 0.0
    for idx, w in weights.items():
        s = segments[idx]
        nx, ny = -math.sin(s.angle), math.cos(s.angle)
        c = nx * s.x0 + ny * s.y0
        w *= s.length
        a11 += w * nx * nx
        a12 += w * nx * ny
        a22 += w * ny * ny
        b1 += w * c * nx
        b2 += w * c * ny
    det = a11 * a22 - a12 * a12
    if abs(det) < 1e-9 * max(1.0, a11 + a22) ** 2:
        return centroid
    return ((a22 * b1 - a12 * b2) / det, (a11 * b2 - a12 * b1) / det)


def detect_vp(
    image: np.ndarray,
    params: VpParams = VpParams(),
    dump_path: str | Path | None = None,
) -> VPoint | None:
    """Detect the vanishing point of a road-like scene, or return None.

    None is the not-found value (too few segments, no stable intersection
    cluster); it is not an error. Rasters smaller than 32x32 are rejected.
    """
    gray = _to_gray(image)
    h, w = gray.shape
    if w < 32 or h < 32:
        raise VpInputError(f"raster {w}x{h} below the 32x32 minimum")

    grad, gx, gy = _sobel(gray)
    tau = float(np.percentile(grad, params.edge_percentile))
    edge_rows, edge_cols = np.nonzero(grad > tau)
    if edge_rows.size == 0:
        _dump(dump_path, [], None, None)
        return None

    xs = edge_cols.astype(np.float64)
    ys = edge_rows.astype(np.float64)
    # Gradient direction is the line normal (mod pi).
    normals = np.arctan2(gy[edge_rows, edge_cols], gx[edge_rows, edge_cols]) % math.pi
    segments = _hough_segments(xs, ys, normals, w, h, params)
    if len(segments) < 2:
        _dump(dump_path, segments, None, None)
        return None

    pts, pairs = _pairwise_intersections(segments, params.min_pair_angle_deg)
    margin = params.margin_frac * max(w, h)
    in_gate = (
        (pts[:, 0] >= -margin) & (pts[:, 0] <= w + margin)
        & (pts[:, 1] >= -margin) & (pts[:, 1] <= h + margin)
    )
    pts, pairs = pts[in_gate], pairs[in_gate]
    if pts.shape[0] == 0:
        _dump(dump_path, segments, None, None)
        return None

    cell_w, cell_h = w / params.grid_divisor, h / params.grid_divisor
    ix = np.floor((pts[:, 0] + margin) / cell_w).astype(np.int64)
    iy = np.floor((pts[:, 1] + margin) / cell_h).astype(np.int64)
    nx = int(math.ceil((w + 2 * margin) / cell_w)) + 1
    ny = int(math.ceil((h + 2 * margin) / cell_h)) + 1
    grid = np.zeros((ny, nx), dtype=np.int64)
    np.add.at(grid, (iy, ix), 1)

    # Clusters straddle cell borders, so the winner is the densest 3x3
    # neighborhood; its members are what gets refined.
    mass = np.zeros_like(grid)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            mass[
                max(0, dy) : ny + min(0, dy), max(0, dx) : nx + min(0, dx)
            ] += grid[max(0, -dy) : ny + min(0, -dy), max(0, -dx) : nx + min(0, -dx)]
    winner = int(np.argmax(mass))
    wy, wx = divmod(winner, nx)
    support = int(mass[wy, wx])
    confidence = support / pts.shape[0]
    _dump(dump_path, segments, grid, (wx, wy))
    if support < params.min_support or confidence < params.min_confidence:
        return None

    members = (np.abs(ix - wx) <= 1) & (np.abs(iy - wy) <= 1)
    centroid = (float(pts[members, 0].mean()), float(pts[members, 1].mean()))
    cx, cy = _refine_point(segments, pairs[members], centroid)
    return VPoint(x=cx, y=(h - 1) - cy, support=support, confidence=confidence)


@dataclass(frozen=True)
class VpResult:
    """Total VP resolution: a usable y plus how it was obtained."""

    y: float
    fallback: bool
    point: VPoint | None


def resolve_vp(
    image: np.ndarray, params: VpParams, height: int
) -> VpResult:
    """Detect and clamp, or fall back to 45% of the image height."""
    point = detect_vp(image, params)
    if point is None:
        return VpResult(y=float(round(0.45 * height)), fallback=True, point=None)
    clamped = min(max(point.y, 0.0), float(height - 1))
    return VpResult(y=clamped, fallback=False, point=point)


def vp_y_or_fallback(image: np.ndarray, params: VpParams, height: int) -> float:
    """Total y lookup: detected and clamped to [0, H-1], else round(0.45*H)."""
    return resolve_vp(image, params, height).y


def _dump(
    dump_path: str | Path | None,
    segments: list[LineSegment],
    grid: np.ndarray | None,
    winner: tuple[int, int] | None,
) -> None:
    if dump_path is None:
        return
    lines = [f"segments {len(segments)}"]
    for s in segments:
        lines.append(
            f"seg ({s.x0:.1f},{s.y0:.1f})-({s.x1:.1f},{s.y1:.1f}) "
            f"angle={math.degrees(s.angle):.1f} len={s.length:.1f}"
        )
    if grid is not None:
        lines.append(f"grid {grid.shape[1]}x{grid.shape[0]} winner={winner}")
        occupied = np.argwhere(grid > 0)
        for gy, gx in occupied:
            lines.append(f"cell ({gx},{gy}) votes={int(grid[gy, gx])}")
    Path(dump_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
