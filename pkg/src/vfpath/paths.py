"""Planar reference paths and the moving path frame used by all guidance laws.

Every path kind exposes ``point(s)`` and ``tangent_angle(s)`` over a stated
parameter domain plus a closest-point search that fills a :class:`PathFrame`.

Sign convention: the cross-track error ``d`` is the component of the
displacement (vehicle minus closest point) along the path tangent rotated by
+90 degrees, i.e. ``d = cross(tangent, displacement)``.  With this choice the
kinematic identity ``d_dot = V_g * sin(chi - chi_p)`` holds along vehicle
trajectories and the side indicator is simply ``rho = sign(d)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .angles import wrap_angle

GOLDEN_RATIO = (math.sqrt(5.0) - 1.0) / 2.0

# Default coarse sampling used by the search-based closest-point routine and
# by the curvature scan.  2048 samples keeps adjacent coarse minima well
# separated for the sinusoid scenarios this library targets.
COARSE_SAMPLES = 2048
CURVATURE_SAMPLES = 8192
REFINE_TOL = 1e-6


class PathDomainError(ValueError):
    """Raised when a path is evaluated outside its parameter domain."""


@dataclass(frozen=True)
class PathFrame:
    """Closest-point frame of a vehicle position relative to a path.

    Attributes:
        s_star: path parameter of the closest point.
        p_ref: closest point on the path (m).
        chi_p: path tangent angle at the closest point, wrapped to (-pi, pi].
        d: signed cross-track error (m); |d| is the distance to p_ref.
        rho: side indicator, +1 on the positive-d side, -1 otherwise.
        chi_p_dot: path course rate (rad/s); 0 until filled by the caller.
    """

    s_star: float
    p_ref: tuple[float, float]
    chi_p: float
    d: float
    rho: int
    chi_p_dot: float = 0.0

    def with_course_rate(self, chi_p_dot: float) -> "PathFrame":
        return replace(self, chi_p_dot=chi_p_dot)


class ReferencePath:
    """Base class for planar reference paths.

    Subclasses define ``s_min``/``s_max``, ``point`` and ``tangent_angle``;
    the generic closest-point search (coarse scan plus golden-section
    refinement) lives here and is overridden where an analytic projection
    exists.
    """

    s_min: float
    s_max: float
    #: True when the parameter wraps around (closed curves).
    periodic: bool = False

    def point(self, s: float) -> tuple[float, float]:
        raise NotImplementedError

    def tangent_angle(self, s: float) -> float:
        raise NotImplementedError

    def points_array(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized ``point``; subclasses override with closed-form numpy."""
        xy = np.array([self.point(float(v)) for v in s], dtype=float)
        return xy[:, 0], xy[:, 1]

    def _clip_parameter(self, s: float) -> float:
        if self.periodic:
            span = self.s_max - self.s_min
            return self.s_min + (s - self.s_min) % span
        if s < self.s_min or s > self.s_max:
            raise PathDomainError(
                f"parameter {s!r} outside domain [{self.s_min}, {self.s_max}]"
            )
        return s

    # -- closest point -----------------------------------------------------

    def _coarse_grid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Cached uniform parameter grid with precomputed path points."""
        cached = getattr(self, "_grid_cache", None)
        if cached is None:
            s = np.linspace(self.s_min, self.s_max, COARSE_SAMPLES)
            xy = np.array([self.point(v) for v in s], dtype=float)
            cached = (s, xy[:, 0].copy(), xy[:, 1].copy())
            self._grid_cache = cached
        return cached

    def _distance_sq(self, s: float, px: float, py: float) -> float:
        x, y = self.point(s)
        return (x - px) ** 2 + (y - py) ** 2

    def closest_parameter(
        self,
        p: Sequence[float],
        near: Optional[float] = None,
        window: Optional[float] = None,
    ) -> float:
        """Global minimizer of the distance from ``p`` to the path.

        Coarse uniform scan followed by local refinement of the bracketing
        interval; ties are broken toward the smallest parameter (the coarse
        argmin picks the first of equal minima).

        ``near``/``window`` restrict the coarse scan to parameters within
        ``window`` of ``near``.  Callers stepping a vehicle along the path use
        this with a window derived from the previous frame; the window must be
        wide enough to contain the global minimizer (see
        :func:`tracking_window`).
        """
        px, py = float(p[0]), float(p[1])
        s_grid, gx, gy = self._coarse_grid()
        lo_i, hi_i = 0, len(s_grid)
        if near is not None and window is not None:
            lo_i = int(np.searchsorted(s_grid, near - window, side="left"))
            hi_i = int(np.searchsorted(s_grid, near + window, side="right"))
            lo_i = max(lo_i - 1, 0)
            hi_i = min(hi_i + 1, len(s_grid))
        d2 = (gx[lo_i:hi_i] - px) ** 2 + (gy[lo_i:hi_i] - py) ** 2
        i = lo_i + int(np.argmin(d2))
        lo = s_grid[max(i - 1, 0)]
        hi = s_grid[min(i + 1, len(s_grid) - 1)]
        return self._refine(lo, hi, px, py)

    def _refine(self, lo: float, hi: float, px: float, py: float) -> float:
        return _golden_section(
            lambda s: self._distance_sq(s, px, py), lo, hi, REFINE_TOL
        )

    def closest_point(self, p: Sequence[float]) -> PathFrame:
        """Path frame at the point of the path closest to ``p``."""
        px, py = float(p[0]), float(p[1])
        if not (math.isfinite(px) and math.isfinite(py)):
            raise ValueError("vehicle position must be finite")
        s_star = self.closest_parameter((px, py))
        return self.frame_at(s_star, (px, py))

    def frame_at(
        self, s_star: float, p: Sequence[float], chi_p_dot: float = 0.0
    ) -> PathFrame:
        rx, ry = self.point(s_star)
        chi_p = self.tangent_angle(s_star)
        ux, uy = p[0] - rx, p[1] - ry
        cross = math.cos(chi_p) * uy - math.sin(chi_p) * ux
        dist = math.hypot(ux, uy)
        # |d| is the true Euclidean distance even when the minimizer sits on
        # a domain boundary and the displacement is not perpendicular.
        d = math.copysign(dist, cross) if cross != 0.0 else dist
        rho = 1 if d >= 0.0 else -1
        return PathFrame(
            s_star=s_star,
            p_ref=(rx, ry),
            chi_p=chi_p,
            d=d,
            rho=rho,
            chi_p_dot=chi_p_dot,
        )


def tracking_window(dist: float, travel: float) -> float:
    """Safe half-width of the coarse-scan window for step-to-step tracking.

    Between consecutive steps, the new global closest parameter cannot move
    farther than roughly twice the previous distance plus the vehicle travel
    (triangle inequality between chord and parameter distance); the factor 2
    safety margin covers chord-versus-arc shortening on curved path kinds.
    """
    return 4.0 * (abs(dist) + travel) + 20.0


def _golden_section(fun, lo: float, hi: float, tol: float) -> float:
    """Golden-section minimizer of a unimodal function on [lo, hi]."""
    a, b = lo, hi
    m1 = b - GOLDEN_RATIO * (b - a)
    m2 = a + GOLDEN_RATIO * (b - a)
    f1, f2 = fun(m1), fun(m2)
    while (b - a) > tol:
        if f1 < f2:
            b, m2, f2 = m2, m1, f1
            m1 = b - GOLDEN_RATIO * (b - a)
            f1 = fun(m1)
        else:
            a, m1, f1 = m1, m2, f2
            m2 = a + GOLDEN_RATIO * (b - a)
            f2 = fun(m2)
    return 0.5 * (a + b)


class LinePath(ReferencePath):
    """Straight line through (x0, y0) with a fixed heading (rad)."""

    def __init__(
        self,
        x0: float = 0.0,
        y0: float = 0.0,
        heading: float = 0.0,
        s_min: float = -1.0e6,
        s_max: float = 1.0e6,
    ):
        if s_max <= s_min:
            raise ValueError("s_max must exceed s_min")
        self.x0, self.y0 = float(x0), float(y0)
        self.heading = wrap_angle(heading)
        self.s_min, self.s_max = float(s_min), float(s_max)
        self._cos = math.cos(self.heading)
        self._sin = math.sin(self.heading)

    def point(self, s: float) -> tuple[float, float]:
        s = self._clip_parameter(s)
        return (self.x0 + s * self._cos, self.y0 + s * self._sin)

    def points_array(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        s = np.clip(s, self.s_min, self.s_max)
        return self.x0 + s * self._cos, self.y0 + s * self._sin

    def tangent_angle(self, s: float) -> float:
        self._clip_parameter(s)
        return self.heading

    def closest_parameter(self, p, near=None, window=None) -> float:
        s = (p[0] - self.x0) * self._cos + (p[1] - self.y0) * self._sin
        return min(max(s, self.s_min), self.s_max)


class CirclePath(ReferencePath):
    """Circle of given center and radius, traversed counter-clockwise.

    The parameter is arc length from the point at polar angle zero; it is
    periodic, so any real ``s`` is accepted and wrapped into [0, 2*pi*R).
    """

    periodic = True

    def __init__(self, cx: float = 0.0, cy: float = 0.0, radius: float = 100.0):
        if radius <= 0.0:
            raise ValueError("radius must be positive")
        self.cx, self.cy = float(cx), float(cy)
        self.radius = float(radius)
        self.s_min = 0.0
        self.s_max = 2.0 * math.pi * self.radius

    def point(self, s: float) -> tuple[float, float]:
        theta = self._clip_parameter(s) / self.radius
        return (
            self.cx + self.radius * math.cos(theta),
            self.cy + self.radius * math.sin(theta),
        )

    def points_array(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        theta = np.asarray(s, dtype=float) / self.radius
        return (
            self.cx + self.radius * np.cos(theta),
            self.cy + self.radius * np.sin(theta),
        )

    def tangent_angle(self, s: float) -> float:
        theta = self._clip_parameter(s) / self.radius
        return wrap_angle(theta + 0.5 * math.pi)

    def closest_parameter(self, p, near=None, window=None) -> float:
        ux, uy = p[0] - self.cx, p[1] - self.cy
        if ux == 0.0 and uy == 0.0:
            # Center is equidistant from the whole circle; smallest parameter.
            return 0.0
        theta = math.atan2(uy, ux) % (2.0 * math.pi)
        return theta * self.radius


class SinusoidPath(ReferencePath):
    """Sinusoid y = A * sin(2*pi*x / L) parameterized by x.

    The default domain spans half a period before the origin through six
    periods after it, wide enough that trajectories converging onto the curve
    never run off the end.
    """

    def __init__(
        self,
        amplitude: float,
        period: float,
        s_min: Optional[float] = None,
        s_max: Optional[float] = None,
    ):
        if amplitude <= 0.0 or period <= 0.0:
            raise ValueError("amplitude and period must be positive")
        self.amplitude = float(amplitude)
        self.period = float(period)
        self.omega = 2.0 * math.pi / self.period
        self.s_min = -0.5 * self.period if s_min is None else float(s_min)
        self.s_max = 6.0 * self.period if s_max is None else float(s_max)
        if self.s_max <= self.s_min:
            raise ValueError("s_max must exceed s_min")

    def point(self, s: float) -> tuple[float, float]:
        s = self._clip_parameter(s)
        return (s, self.amplitude * math.sin(self.omega * s))

    def points_array(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        s = np.clip(s, self.s_min, self.s_max)
        return s, self.amplitude * np.sin(self.omega * s)

    def tangent_angle(self, s: float) -> float:
        s = self._clip_parameter(s)
        slope = self.amplitude * self.omega * math.cos(self.omega * s)
        return math.atan(slope)

    def _distance_sq(self, s: float, px: float, py: float) -> float:
        dy = self.amplitude * math.sin(self.omega * s) - py
        return (s - px) ** 2 + dy * dy

    def _refine(self, lo: float, hi: float, px: float, py: float) -> float:
        # Safeguarded Newton iteration on the derivative of the squared
        # distance; quadratically convergent, so it replaces the generic
        # golden-section refinement in this hot path.  Falls back to golden
        # section whenever an iterate leaves the bracket or curvature turns
        # non-convex.
        a, w = self.amplitude, self.omega
        s = 0.5 * (lo + hi)
        for _ in range(12):
            sin_ws = math.sin(w * s)
            cos_ws = math.cos(w * s)
            dy = a * sin_ws - py
            slope = a * w * cos_ws
            grad = (s - px) + dy * slope
            curv = 1.0 + slope * slope - dy * a * w * w * sin_ws
            if curv <= 0.0:
                break
            step = grad / curv
            s_next = s - step
            if s_next < lo or s_next > hi:
                break
            s = s_next
            if abs(step) < 1e-10:
                return min(max(s, self.s_min), self.s_max)
        return super()._refine(lo, hi, px, py)


class PolylinePath(ReferencePath):
    """Piecewise-linear path through ordered 2-D points, parameterized by arc length."""

    def __init__(self, points: Sequence[Sequence[float]]):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise ValueError("polyline needs at least two (x, y) points")
        seg = np.diff(pts, axis=0)
        lengths = np.hypot(seg[:, 0], seg[:, 1])
        if np.any(lengths == 0.0):
            raise ValueError("polyline has repeated consecutive points")
        self.points = pts
        self._lengths = lengths
        self._cum = np.concatenate(([0.0], np.cumsum(lengths)))
        self._headings = np.arctan2(seg[:, 1], seg[:, 0])
        self.s_min = 0.0
        self.s_max = float(self._cum[-1])

    def _segment_index(self, s: float) -> int:
        i = int(np.searchsorted(self._cum, s, side="right")) - 1
        return min(max(i, 0), len(self._lengths) - 1)

    def point(self, s: float) -> tuple[float, float]:
        s = self._clip_parameter(s)
        i = self._segment_index(s)
        f = (s - self._cum[i]) / self._lengths[i]
        p = self.points[i] + f * (self.points[i + 1] - self.points[i])
        return (float(p[0]), float(p[1]))

    def tangent_angle(self, s: float) -> float:
        s = self._clip_parameter(s)
        return float(self._headings[self._segment_index(s)])

    def closest_parameter(self, p, near=None, window=None) -> float:
        # Exact per-segment projection; ties go to the smallest parameter.
        px, py = float(p[0]), float(p[1])
        a = self.points[:-1]
        seg = self.points[1:] - a
        t = ((px - a[:, 0]) * seg[:, 0] + (py - a[:, 1]) * seg[:, 1]) / (
            self._lengths**2
        )
        t = np.clip(t, 0.0, 1.0)
        qx = a[:, 0] + t * seg[:, 0]
        qy = a[:, 1] + t * seg[:, 1]
        d2 = (qx - px) ** 2 + (qy - py) ** 2
        i = int(np.argmin(d2))
        return float(self._cum[i] + t[i] * self._lengths[i])


def load_polyline(path_file: str) -> PolylinePath:
    """Load a polyline from a two-column comma-separated text file.

    Columns are x, y in meters; a single header line is allowed and skipped
    when its first field does not parse as a number.
    """
    rows: list[tuple[float, float]] = []
    with open(path_file, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) < 2:
                raise ValueError(f"{path_file}:{lineno + 1}: expected two columns")
            try:
                rows.append((float(fields[0]), float(fields[1])))
            except ValueError:
                if lineno == 0:
                    continue  # header
                raise ValueError(
                    f"{path_file}:{lineno + 1}: could not parse {line!r}"
                ) from None
    return PolylinePath(rows)


def path_course_rate(
    frame_now: PathFrame, frame_prev: Optional[PathFrame], dt: float
) -> float:
    """Finite-difference path course rate between consecutive frames.

    Returns 0 on the first simulation step (``frame_prev`` is None).  The
    angle difference is wrapped before dividing so crossings of +-pi do not
    produce spurious rates.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if frame_prev is None:
        return 0.0
    return wrap_angle(frame_now.chi_p - frame_prev.chi_p) / dt


def max_path_course_rate(
    path: ReferencePath, v_g: float, samples: int = CURVATURE_SAMPLES
) -> float:
    """Upper estimate of |chi_p_dot| when the path is traversed at speed v_g.

    Path curvature is estimated by finite differences of the tangent angle on
    a uniform parameter grid of ``samples`` points over the domain.
    """
    if v_g <= 0.0:
        raise ValueError("v_g must be positive")
    s = np.linspace(path.s_min, path.s_max, samples)
    chi = np.array([path.tangent_angle(v) for v in s])
    xy = np.array([path.point(v) for v in s])
    arc = np.hypot(np.diff(xy[:, 0]), np.diff(xy[:, 1]))
    d_chi = np.abs(
        np.mod(np.diff(chi) + np.pi, 2.0 * np.pi) - np.pi
    )
    valid = arc > 0.0
    if not np.any(valid):
        return 0.0
    kappa_max = float(np.max(d_chi[valid] / arc[valid]))
    return v_g * kappa_max
