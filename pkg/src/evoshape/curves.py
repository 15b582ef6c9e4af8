"""Closed 2D polylines and the resampling step that precedes encoding.

A silhouette is an ordered list of (x, y) points, implicitly closed: the last
point connects back to the first. Hand-traced input is sparse and unevenly
spaced, so before harmonic analysis the polyline is densified with a cyclic
Catmull-Rom interpolant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

MIN_SEGMENT_LENGTH = 1e-12


@dataclass(frozen=True)
class ClosedCurve:
    """Implicitly closed polyline.

    ``points`` has shape (P, 2) with P >= 3 and strictly positive segment
    lengths, including the closing segment (the first point must not be
    repeated at the end). ``params`` optionally records the curve parameter
    t_k in [0, 1) at which each point was generated; curves produced by
    decoding a genome carry it, hand-traced curves do not.
    """

    points: np.ndarray
    params: np.ndarray | None = field(default=None)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidInputError("curve points must be an (P, 2) array")
        if len(pts) < 3:
            raise InvalidInputError("a closed curve needs at least 3 points")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("curve points must be finite")
        seg = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
        short = np.flatnonzero(seg < MIN_SEGMENT_LENGTH)
        if len(short):
            raise InvalidInputError(
                f"zero-length segment at index {int(short[0])}"
            )
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        if self.params is not None:
            t = np.asarray(self.params, dtype=float)
            if t.shape != (len(pts),) or t[0] != 0.0 or np.any(np.diff(t) <= 0) or t[-1] >= 1.0:
                raise InvalidInputError("params must be increasing in [0, 1) starting at 0")
            t.flags.writeable = False
            object.__setattr__(self, "params", t)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def segment_lengths(self) -> np.ndarray:
        """Lengths of the P segments, closing segment last."""
        return np.linalg.norm(np.roll(self.points, -1, axis=0) - self.points, axis=1)

    @property
    def perimeter(self) -> float:
        return float(self.segment_lengths.sum())

    def signed_area(self) -> float:
        x, y = self.points[:, 0], self.points[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def arc_length_params(curve: ClosedCurve) -> np.ndarray:
    """Normalized cumulative arc length t_k for every point.

    t_0 = 0 and t_k = L_k / L where L_k is the polyline length from the first
    point to point k and L is the full perimeter, closing segment included.
    """
    seg = curve.segment_lengths
    total = seg.sum()
    t = np.concatenate([[0.0], np.cumsum(seg[:-1])]) / total
    return t


def ensure_counterclockwise(curve: ClosedCurve) -> ClosedCurve:
    """Reorder traversal so the enclosed (signed) area is positive.

    Keeps the first point first. Parameter values, if any, are dropped since
    reversal invalidates them.
    """
    if curve.signed_area() >= 0.0:
        return curve
    pts = curve.points
    return ClosedCurve(np.vstack([pts[:1], pts[:0:-1]]))


def transform(curve: ClosedCurve, rotation: float = 0.0, scale: float = 1.0,
              translation=(0.0, 0.0)) -> ClosedCurve:
    """Similarity transform: rotate by ``rotation`` radians about the origin,
    scale uniformly, then translate. Parameterization is unchanged."""
    if scale <= 0:
        raise InvalidInputError("scale must be positive")
    c, s = np.cos(rotation), np.sin(rotation)
    rot = np.array([[c, -s], [s, c]])
    pts = scale * (curve.points @ rot.T) + np.asarray(translation, dtype=float)
    return ClosedCurve(pts, curve.params)


def reindex(curve: ClosedCurve, start: int) -> ClosedCurve:
    """Shift the starting point to index ``start`` without changing geometry."""
    start = int(start) % len(curve)
    pts = np.roll(curve.points, -start, axis=0)
    t = None
    if curve.params is not None:
        t = np.roll(curve.params, -start) - curve.params[start]
        t[t < 0] += 1.0
        t[0] = 0.0
    return ClosedCurve(pts, t)


def _hermite_tangents(pts: np.ndarray) -> np.ndarray:
    # Catmull-Rom convention: tangent at i parallel to the chord from the
    # previous to the next point, with half that chord's length.
    return 0.5 * (np.roll(pts, -1, axis=0) - np.roll(pts, 1, axis=0))


def _allocate(counts_base: int, lengths: np.ndarray, extra: int) -> np.ndarray:
    """Largest-remainder split of ``extra`` samples proportional to length,
    on top of one guaranteed sample per segment."""
    n = np.full(len(lengths), counts_base, dtype=int)
    if extra <= 0:
        return n
    quota = extra * lengths / lengths.sum()
    base = np.floor(quota).astype(int)
    n += base
    rem = extra - base.sum()
    if rem > 0:
        order = np.argsort(-(quota - base), kind="stable")
        n[order[:rem]] += 1
    return n


def resample_closed(points: np.ndarray, count: int) -> np.ndarray:
    """Evenly spaced points along a closed polyline, keeping its first point."""
    closed = np.vstack([points, points[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    cumulative = np.concatenate([[0.0], np.cumsum(seg)])
    total = cumulative[-1]
    targets = np.arange(count) * total / count
    idx = np.searchsorted(cumulative, targets, side="right") - 1
    idx = np.clip(idx, 0, len(seg) - 1)
    frac = (targets - cumulative[idx]) / seg[idx]
    return closed[idx] + frac[:, None] * (closed[idx + 1] - closed[idx])


def densify(curve: ClosedCurve, point_count: int) -> ClosedCurve:
    """Refine to exactly ``point_count`` points on a cyclic cubic interpolant.

    Every original point is kept (each segment contributes its start point)
    and the extra budget is spread across segments proportionally to their
    parameter width, so an evenly parametrized curve refines to an evenly
    parametrized one. The output carries its parameter grid; with
    point_count == len(curve) the input points come back unchanged, which
    makes the operation idempotent on its own output.
    """
    m = len(curve)
    if point_count < m:
        raise InvalidInputError(
            f"point_count {point_count} is below the input size {m}"
        )
    pts = curve.points
    t = curve.params if curve.params is not None else arc_length_params(curve)
    widths = np.append(np.diff(t), 1.0 - t[-1])
    tan = _hermite_tangents(pts)
    counts = _allocate(1, widths, point_count - m)

    p0 = pts
    p1 = np.roll(pts, -1, axis=0)
    t0 = tan
    t1 = np.roll(tan, -1, axis=0)

    out = np.empty((point_count, 2))
    grid = np.empty(point_count)
    pos = 0
    for i in range(m):
        u = np.arange(counts[i]) / counts[i]
        h00 = (1 + 2 * u) * (1 - u) ** 2
        h10 = u * (1 - u) ** 2
        h01 = u * u * (3 - 2 * u)
        h11 = u * u * (u - 1)
        out[pos:pos + counts[i]] = (
            np.outer(h00, p0[i]) + np.outer(h10, t0[i])
            + np.outer(h01, p1[i]) + np.outer(h11, t1[i])
        )
        grid[pos:pos + counts[i]] = t[i] + u * widths[i]
        pos += counts[i]
    return ClosedCurve(out, params=grid)
