"""Field line tracing and the numerical Gauss linking number.

At time zero every magnetic line is a circle (a fiber of one Hopf map) and
every electric line a circle of the complementary fibration; any two lines
of the same family link once, and magnetic lines link electric ones too.
The tracer plus the linking quadrature below verify that statement without
ever using the map structure: they only see the field evaluator.

Watch out for the two degenerate fibers: the z axis is a "magnetic line
through infinity" and the x axis an electric one. Those never close inside
any finite arclength budget and come back flagged open.
"""

from dataclasses import dataclass

import numpy as np

from ._backend import kernels

_WHICH = {"magnetic": 0, "electric": 1}


class ZeroFieldError(ValueError):
    """The field vanishes (numerically) at the requested start point."""


class OpenCurveError(ValueError):
    """Linking number requested for a curve that is not closed."""


class CurveProximityError(ValueError):
    """Curves pass too close for the midpoint rule to be trusted."""


@dataclass(frozen=True)
class FieldLine:
    """Polyline samples of one traced line, uniform in arclength.

    For a closed line the points cover one full period without repeating
    the start; closure_gap is the distance from the detected return point
    to the start. For an open line the endpoint is included and
    closure_gap is simply the end-to-start distance (usually large).
    """
    points: np.ndarray
    closed: bool
    closure_gap: float
    arclength: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 3:
            raise ValueError("a field line needs at least 3 points of 3")
        if not np.all(np.any(np.diff(pts, axis=0) != 0.0, axis=1)):
            raise ValueError("consecutive polyline points must be distinct")
        object.__setattr__(self, "points", pts)

    def reversed(self):
        """Same curve, opposite orientation (start point kept first)."""
        pts = np.vstack([self.points[:1], self.points[:0:-1]])
        return FieldLine(pts, self.closed, self.closure_gap, self.arclength)


def trace_field_line(start, t=0.0, which="magnetic", rel_tol=1e-10,
                     abs_tol=1e-12, max_arclength=200.0, n_points=2000,
                     closure_tol=1e-3, min_arclength=0.1):
    """Trace dr/ds = field/|field| from start at frozen time t.

    Closure is detected by a plane section through the start point (normal
    along the initial tangent): the first crossing in the forward sense
    after min_arclength is refined on the dense interpolant and accepted
    when it lands within closure_tol of the start. The curve is then
    retraced and resampled at n_points equal arclength intervals.

    Returns a FieldLine; closed=False means the arclength budget ran out
    first, which for this field is itself informative (see the module
    notes on the two axis fibers).
    """
    if which not in _WHICH:
        raise ValueError("which must be 'magnetic' or 'electric'")
    if n_points < 3:
        raise ValueError("n_points must be at least 3")
    pts, s_end, gap, closed, status = kernels.trace_line(
        np.asarray(start, dtype=np.float64), float(t), _WHICH[which],
        float(rel_tol), float(abs_tol), 1e-3, float(max_arclength),
        float(min_arclength), float(closure_tol), int(n_points))
    if status == 2:
        raise ZeroFieldError("field magnitude below cutoff at start point")
    if status == 3:
        raise RuntimeError("line integration failed near s=%.6g" % s_end)
    return FieldLine(points=pts, closed=bool(closed),
                     closure_gap=float(gap), arclength=float(s_end))


def gauss_linking_number(c1, c2, min_distance=1e-2):
    """Gauss double integral of two closed polylines, midpoint rule.

    Returns (raw, rounded). The quadrature error for smooth disjoint
    curves scales as 1/N^2, so at the default 2000-point sampling raw sits
    within ~2e-6 of the integer; min_distance guards the 1/r^3 kernel
    against near intersections, where the rule would quietly degrade.
    """
    for c in (c1, c2):
        if not isinstance(c, FieldLine):
            raise TypeError("gauss_linking_number expects FieldLine inputs")
        if not c.closed:
            raise OpenCurveError("both curves must be closed")
    raw, min_dist = kernels.linking_sum(c1.points, c2.points)
    if min_dist < min_distance:
        raise CurveProximityError(
            "curves approach to %.3g (< %.3g); refine or reject"
            % (min_dist, min_distance))
    return float(raw), int(np.rint(raw))


def line_to_rows(line, line_id):
    """Flatten a FieldLine to (line_id, idx, X, Y, Z) rows for CSV export."""
    n = line.points.shape[0]
    out = np.empty((n, 5))
    out[:, 0] = float(line_id)
    out[:, 1] = np.arange(n, dtype=np.float64)
    out[:, 2:] = line.points
    return out
