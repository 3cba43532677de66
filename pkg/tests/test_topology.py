import numpy as np
import pytest

from hopfknot.topology import (CurveProximityError, FieldLine, OpenCurveError,
                               ZeroFieldError, gauss_linking_number,
                               line_to_rows, trace_field_line)


def circle(center, normal_axis, radius, n, reverse=False):
    """Planar circle as an (n, 3) polyline, no repeated endpoint."""
    th = 2.0 * np.pi * np.arange(n) / n
    if reverse:
        th = -th
    pts = np.zeros((n, 3))
    u, v = {2: (0, 1), 1: (2, 0), 0: (1, 2)}[normal_axis]
    pts[:, u] = radius * np.cos(th)
    pts[:, v] = radius * np.sin(th)
    return FieldLine(points=pts + np.asarray(center, dtype=float),
                     closed=True, closure_gap=0.0,
                     arclength=2.0 * np.pi * radius)


@pytest.fixture(scope="module")
def b03():
    return trace_field_line((0.3, 0.0, 0.0), which="magnetic")


@pytest.fixture(scope="module")
def b06():
    return trace_field_line((0.6, 0.0, 0.0), which="magnetic")


@pytest.fixture(scope="module")
def e05():
    return trace_field_line((0.0, 0.5, 0.0), which="electric")


def test_fieldline_validation():
    with pytest.raises(ValueError):
        FieldLine(points=np.zeros((2, 3)), closed=True, closure_gap=0.0,
                  arclength=1.0)
    with pytest.raises(ValueError):
        FieldLine(points=np.zeros((5, 3)), closed=True, closure_gap=0.0,
                  arclength=1.0)
    pts = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0]])
    line = FieldLine(points=pts, closed=True, closure_gap=0.0, arclength=3.0)
    rev = line.reversed()
    np.testing.assert_array_equal(rev.points,
                                  np.array([[0.0, 0, 0], [0, 1, 0], [1, 0, 0]]))
    assert rev.closed and rev.arclength == 3.0


def test_magnetic_fibers_close(b03, b06):
    for line in (b03, b06):
        assert line.closed
        assert line.closure_gap < 1e-3
        assert line.points.shape == (2000, 3)
        assert line.arclength > 0.1


def test_electric_fiber_closes(e05):
    assert e05.closed
    assert e05.closure_gap < 1e-3


def test_traced_fiber_is_a_round_circle(b03):
    # every fiber of the time-zero field is a circle; uniform arclength
    # sampling makes the centroid its center
    line = b03
    center = line.points.mean(axis=0)
    radii = np.linalg.norm(line.points - center, axis=1)
    assert radii.std() / radii.mean() < 1e-6
    assert line.arclength == pytest.approx(2.0 * np.pi * radii.mean(),
                                           rel=1e-6)


def test_axis_electric_line_never_closes():
    # the x axis is a field line that only returns through infinity
    line = trace_field_line((0.5, 0.0, 0.0), which="electric",
                            max_arclength=20.0)
    assert not line.closed
    # it stays on the axis the whole way
    assert np.max(np.abs(line.points[:, 1])) < 1e-8
    assert np.max(np.abs(line.points[:, 2])) < 1e-8


def test_far_field_start_is_rejected():
    # at this distance the field underflows to an exact zero
    with pytest.raises(ZeroFieldError):
        trace_field_line((1e36, 0.0, 0.0), which="magnetic")


def test_trace_argument_validation():
    with pytest.raises(ValueError):
        trace_field_line((0.3, 0.0, 0.0), which="both")
    with pytest.raises(ValueError):
        trace_field_line((0.3, 0.0, 0.0), n_points=2)


def test_unlinked_circles():
    c1 = circle((0, 0, 0), 2, 1.0, 512)
    c2 = circle((3.0, 0, 0), 2, 1.0, 512)
    raw, rounded = gauss_linking_number(c1, c2)
    assert rounded == 0
    assert abs(raw) < 1e-6


def test_hopf_linked_circles():
    c1 = circle((0, 0, 0), 2, 1.0, 800)
    c2 = circle((1.0, 0, 0), 1, 1.0, 800)
    raw, rounded = gauss_linking_number(c1, c2)
    assert abs(rounded) == 1
    assert abs(raw - rounded) < 1e-4


def test_linking_refinement_is_quadratic():
    errs = []
    for n in (200, 400, 800):
        c1 = circle((0, 0, 0), 2, 1.0, n)
        c2 = circle((1.0, 0, 0), 1, 1.0, n)
        raw, rounded = gauss_linking_number(c1, c2)
        errs.append(abs(raw - rounded))
    assert errs[0] / errs[1] == pytest.approx(4.0, abs=1.0)
    assert errs[1] / errs[2] == pytest.approx(4.0, abs=1.0)
    assert errs[2] < 0.01


def test_linking_antisymmetry_and_exchange():
    c1 = circle((0, 0, 0), 2, 1.0, 600)
    c2 = circle((1.0, 0, 0), 1, 1.0, 600)
    raw, _ = gauss_linking_number(c1, c2)
    raw_rev, _ = gauss_linking_number(c1.reversed(), c2)
    assert raw_rev == pytest.approx(-raw, abs=1e-6)
    raw_swap, _ = gauss_linking_number(c2, c1)
    assert raw_swap == pytest.approx(raw, abs=1e-12)


def test_orientation_flips_the_sign_exactly_once():
    c1 = circle((0, 0, 0), 2, 1.0, 400)
    c2 = circle((1.0, 0, 0), 1, 1.0, 400)
    c2r = circle((1.0, 0, 0), 1, 1.0, 400, reverse=True)
    raw_a, ra = gauss_linking_number(c1, c2)
    raw_b, rb = gauss_linking_number(c1, c2r)
    assert ra == -rb
    assert raw_a == pytest.approx(-raw_b, abs=1e-9)


def test_proximity_guard():
    c1 = circle((0, 0, 0), 2, 1.0, 256)
    c2 = circle((0.005, 0, 0), 2, 1.0, 256)
    with pytest.raises(CurveProximityError):
        gauss_linking_number(c1, c2)


def test_open_curves_are_rejected():
    c1 = circle((0, 0, 0), 2, 1.0, 256)
    pts = c1.points
    open_line = FieldLine(points=pts, closed=False, closure_gap=0.5,
                          arclength=1.0)
    with pytest.raises(OpenCurveError):
        gauss_linking_number(c1, open_line)
    with pytest.raises(TypeError):
        gauss_linking_number(c1, pts)


def test_traced_fibers_are_pairwise_linked(b03, b06, e05):
    for a, b in ((b03, b06), (b03, e05), (b06, e05)):
        raw, rounded = gauss_linking_number(a, b)
        assert abs(rounded) == 1
        assert abs(raw - rounded) < 1e-4


def test_line_to_rows():
    c = circle((0, 0, 0), 2, 1.0, 16)
    rows = line_to_rows(c, 3)
    assert rows.shape == (16, 5)
    assert np.all(rows[:, 0] == 3.0)
    np.testing.assert_array_equal(rows[:, 1], np.arange(16))
    np.testing.assert_allclose(rows[:, 2:], c.points)
