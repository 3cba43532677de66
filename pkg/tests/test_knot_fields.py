import numpy as np
import pytest

from hopfknot import knot_fields as kf

# Reference values in this file were computed with an independent
# high-precision evaluation of the same closed forms (mpmath, 50 digits)
# and frozen here to full double precision; comparisons allow a few ulp of
# evaluation rounding. If one of these moves further, the field algebra
# changed, not the test.

EV1 = (0.5, 0.5, 0.5, 0.7)
EV1_B = (-0.76594184040987234, 0.99567276760537443, -1.2326656012635361)
EV1_E = (0.88112442856201866, -0.87029794377476362, -1.2504786595669987)

EV2 = (-1.2, 0.4, 0.9, 1.5)
EV2_B = (-0.74720431639479899, -0.2324331646803638, -0.26009306608315919)
EV2_E = (-0.10771740269438216, 0.73856938539464278, -0.35057109638622883)

P3 = (0.3, -0.2, 0.8)
P3_B = (-0.63477945832032661, -0.20197528219283115, -1.0892238432541968)
P3_E = (0.29574952035378847, -1.2407053048988202, 0.057707223483666044)
P3_APOT = (-0.12767723195761116, -0.19151584793641674, -0.63838615978805579)
P3_CPOT = (0.63838615978805579, -0.51070892783044464, -0.12767723195761116)


def test_field_at_frozen_event_1():
    x, y, z, t = EV1
    s = kf.field_at(np.array([x, y, z]), t)
    np.testing.assert_allclose(s.b, EV1_B, rtol=2e-15, atol=0)
    np.testing.assert_allclose(s.e, EV1_E, rtol=2e-15, atol=0)


def test_field_at_frozen_event_2():
    x, y, z, t = EV2
    s = kf.field_at(np.array([x, y, z]), t)
    np.testing.assert_allclose(s.b, EV2_B, rtol=2e-15, atol=0)
    np.testing.assert_allclose(s.e, EV2_E, rtol=2e-15, atol=0)


def test_cauchy_fields_frozen():
    s = kf.cauchy_fields(np.array(P3))
    np.testing.assert_allclose(s.b, P3_B, rtol=2e-15, atol=0)
    np.testing.assert_allclose(s.e, P3_E, rtol=2e-15, atol=0)


def test_cauchy_matches_closed_form_at_t0():
    rng = np.random.Generator(np.random.PCG64(7))
    r = rng.uniform(-3.0, 3.0, size=(500, 3))
    closed = kf.field_at(r, 0.0)
    init = kf.cauchy_fields(r)
    scale = (np.linalg.norm(closed.b, axis=-1)
             + np.linalg.norm(closed.e, axis=-1))[:, None]
    assert np.max(np.abs(closed.b - init.b) / np.spacing(scale)) <= 4.0
    assert np.max(np.abs(closed.e - init.e) / np.spacing(scale)) <= 4.0


def test_field_at_origin_t0():
    s = kf.field_at(np.zeros(3), 0.0)
    np.testing.assert_array_equal(s.e, [4.0, 0.0, 0.0])
    np.testing.assert_array_equal(s.b, [0.0, 0.0, -4.0])
    assert float(s.e @ s.b) == 0.0


def test_null_identities_random_events():
    rng = np.random.Generator(np.random.PCG64(11))
    r = rng.uniform(-3.0, 3.0, size=(2000, 3))
    t = rng.uniform(0.0, 3.0, size=2000)
    s = kf.field_at(r, t)
    e2 = np.sum(s.e * s.e, axis=-1)
    b2 = np.sum(s.b * s.b, axis=-1)
    dot = np.sum(s.e * s.b, axis=-1)
    scale2 = (np.sqrt(e2) + np.sqrt(b2)) ** 2
    assert np.max(np.abs(dot) / scale2) < 1e-13
    assert np.max(np.abs(e2 - b2) / scale2) < 1e-13


def test_h_vectors_orthogonal_equal_norm():
    rng = np.random.Generator(np.random.PCG64(3))
    r = rng.uniform(-2.0, 2.0, size=(300, 3))
    t = rng.uniform(0.0, 2.0, size=300)
    h1, h2 = kf.h_vectors(r, t)
    dot = np.sum(h1 * h2, axis=-1)
    n1 = np.sum(h1 * h1, axis=-1)
    n2 = np.sum(h2 * h2, axis=-1)
    np.testing.assert_allclose(dot / n1, 0.0, atol=1e-14)
    np.testing.assert_allclose(n1, n2, rtol=1e-13)


def test_aux_quantities_frozen_event():
    aux = kf.aux_quantities(np.array([1.0, 1.0, 1.0]), 2.0)
    assert float(aux.a_aux) == 0.0
    assert float(aux.p_aux) == 8.0
    assert float(aux.q_aux) == 0.0
    h1, h2 = kf.h_vectors(np.array([1.0, 1.0, 1.0]), 2.0)
    np.testing.assert_array_equal(h1, [2.0, -4.0, 4.0])
    np.testing.assert_array_equal(h2, [-4.0, 2.0, 4.0])


def test_potentials_frozen():
    a_pot, c_pot = kf.potentials_t0(np.array(P3))
    np.testing.assert_allclose(a_pot, P3_APOT, rtol=2e-15, atol=0)
    np.testing.assert_allclose(c_pot, P3_CPOT, rtol=2e-15, atol=0)


def test_potentials_curl_gives_cauchy_fields():
    # second order central differences of the potentials against the
    # closed-form initial fields
    rng = np.random.Generator(np.random.PCG64(5))
    pts = rng.uniform(-2.0, 2.0, size=(50, 3))
    h = 1e-5

    def curl(pot_index):
        grads = []
        for ax in range(3):
            dp = np.zeros(3)
            dp[ax] = h
            plus = kf.potentials_t0(pts + dp)[pot_index]
            minus = kf.potentials_t0(pts - dp)[pot_index]
            grads.append((plus - minus) / (2.0 * h))
        dx, dy, dz = grads
        return np.stack([dy[:, 2] - dz[:, 1],
                         dz[:, 0] - dx[:, 2],
                         dx[:, 1] - dy[:, 0]], axis=-1)

    s = kf.cauchy_fields(pts)
    scale = (np.linalg.norm(s.b, axis=-1)
             + np.linalg.norm(s.e, axis=-1))[:, None]
    assert np.max(np.abs(curl(0) - s.b) / scale) < 1e-8
    assert np.max(np.abs(curl(1) - s.e) / scale) < 1e-8


def test_hopf_maps_frozen():
    phi0, theta0 = kf.hopf_maps_t0(np.array([0.3, -0.2, 0.7]))
    assert complex(phi0) == pytest.approx(
        0.47139327124120892 - 0.1577646835202433j, rel=2e-16)
    assert complex(theta0) == pytest.approx(
        -1.5305313243457574 + 1.3639968279143534j, rel=2e-16)


def test_time_maps_frozen():
    phi, theta = kf.time_maps(np.array([0.5, 0.5, 0.5]), 0.7)
    assert complex(phi) == pytest.approx(
        -0.071498863998687046 + 0.0215173118832566j, rel=4e-16)
    assert complex(theta) == pytest.approx(
        -1.1421059206851344 + 0.02748463861433784j, rel=4e-16)


def test_time_maps_reduce_to_static_at_t0():
    rng = np.random.Generator(np.random.PCG64(13))
    r = rng.uniform(-2.0, 2.0, size=(200, 3))
    phi0, theta0 = kf.hopf_maps_t0(r)
    phi, theta = kf.time_maps(r, 0.0)
    np.testing.assert_allclose(phi, phi0, rtol=1e-12)
    np.testing.assert_allclose(theta, theta0, rtol=1e-12)


def test_map_level_sets_are_field_lines():
    # phi is constant along b: its spatial gradient must be orthogonal
    # to the magnetic field (same for theta and e)
    r = np.array([0.4, -0.3, 0.6])
    t = 0.8
    h = 1e-6
    s = kf.field_at(r, t)
    for index, vec in ((0, s.b), (1, s.e)):
        grads = []
        for ax in range(3):
            dp = np.zeros(3)
            dp[ax] = h
            plus = kf.time_maps(r + dp, t)[index]
            minus = kf.time_maps(r - dp, t)[index]
            grads.append((plus - minus) / (2.0 * h))
        g = np.array(grads)
        assert abs(g.real @ vec) < 1e-6 * np.linalg.norm(vec)
        assert abs(g.imag @ vec) < 1e-6 * np.linalg.norm(vec)


def test_fields_from_maps_matches_closed_form():
    rng = np.random.Generator(np.random.PCG64(17))
    r = rng.uniform(0.2, 1.8, size=(120, 3))
    t = rng.uniform(0.0, 1.5, size=120)
    # keep clear of the map poles; the stencil accuracy degrades as the
    # denominators shrink well before the hard pole guard trips
    _, den_phi, _, den_theta = kf._time_map_parts(r, t)
    keep = (np.abs(den_phi) > 1e-2) & (np.abs(den_theta) > 1e-2)
    r, t = r[keep], t[keep]
    assert r.shape[0] >= 80
    exact = kf.field_at(r, t)
    rebuilt = kf.fields_from_maps(r, t)
    scale = (np.linalg.norm(exact.b, axis=-1)
             + np.linalg.norm(exact.e, axis=-1))[:, None]
    assert np.max(np.abs(exact.b - rebuilt.b) / scale) < 1e-6
    assert np.max(np.abs(exact.e - rebuilt.e) / scale) < 1e-6


def test_fields_from_maps_scalar_time():
    r = np.array([0.5, 0.4, 0.3])
    exact = kf.field_at(r, 0.6)
    rebuilt = kf.fields_from_maps(r, 0.6)
    np.testing.assert_allclose(rebuilt.b, exact.b, rtol=1e-7)
    np.testing.assert_allclose(rebuilt.e, exact.e, rtol=1e-7)


def test_map_pole_raises():
    # the z axis is the pole fiber of the static magnetic map
    with pytest.raises(kf.MapPoleError):
        kf.hopf_maps_t0(np.array([0.0, 0.0, 1.0]))
    with pytest.raises(kf.MapPoleError):
        kf.fields_from_maps(np.array([0.0, 0.0, 1.0]), 0.0)


def test_bad_position_shape_rejected():
    with pytest.raises(ValueError):
        kf.field_at(np.zeros(4), 0.0)
    with pytest.raises(ValueError):
        kf.cauchy_fields(np.zeros((5, 2)))


def test_field_components_broadcasts_batches():
    r = np.array([[0.5, 0.5, 0.5], [-1.2, 0.4, 0.9]])
    t = np.array([0.7, 1.5])
    s = kf.field_at(r, t)
    np.testing.assert_allclose(s.b[0], EV1_B, rtol=2e-15, atol=0)
    np.testing.assert_allclose(s.b[1], EV2_B, rtol=2e-15, atol=0)
    np.testing.assert_allclose(s.e[0], EV1_E, rtol=2e-15, atol=0)
    np.testing.assert_allclose(s.e[1], EV2_E, rtol=2e-15, atol=0)
