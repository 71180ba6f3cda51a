import json
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from robin_asymptotics.corner_constants import sigma_codim3, sigma_from_b
from robin_asymptotics.errors import (NoPositiveWeight, NotInterior, OptimizationFailed,
                                      Unbounded, ValidationError)
from robin_asymptotics.geometry import (PlanarPolygon, PolyhedralCone, load_domain,
                                        max_min_distance_direction, orthonormal_complement,
                                        save_domain, section_profile)

AXIS = np.ones(3) / math.sqrt(3)


@st.composite
def cones(draw, min_faces=3, max_faces=7):
    """Pointed cones around e_3 with k faces of random tilt and jittered azimuth."""
    k = draw(st.integers(min_faces, max_faces))
    jitter = draw(st.lists(st.floats(-0.25, 0.25), min_size=k, max_size=k))
    tilt = draw(st.lists(st.floats(0.25, 1.2), min_size=k, max_size=k))
    t = 2 * math.pi * (np.arange(k) + np.array(jitter) * 0.9) / k
    b = np.array(tilt)
    normals = np.column_stack([-np.cos(b) * np.cos(t), -np.cos(b) * np.sin(t), np.sin(b)])
    return PolyhedralCone.from_normals(normals)


@st.composite
def rotations(draw):
    a = np.array(draw(st.lists(st.floats(-1, 1), min_size=9, max_size=9))).reshape(3, 3)
    q, r = np.linalg.qr(a + 3 * np.eye(3))
    return q * np.sign(np.diag(r))


# --- polygons -------------------------------------------------------------

def test_square_basics():
    sq = PlanarPolygon.unit_square()
    assert sq.area == 1.0 and sq.perimeter == 4.0
    assert np.allclose(sq.half_angles(), math.pi / 4)


def test_l_shape_has_one_reentrant_corner():
    ang = PlanarPolygon.l_shape().half_angles()
    assert np.sum(np.isclose(ang, 3 * math.pi / 4)) == 1
    assert np.sum(np.isclose(ang, math.pi / 4)) == 5


def test_clockwise_input_is_reversed():
    cw = [[0, 0], [0, 1], [1, 1], [1, 0]]
    p = PlanarPolygon.from_points(cw, weight=[1.0, 2.0, 3.0, 4.0])
    assert p.area > 0
    # the edge from (0,0) to (0,1) had weight 1 and survives as the edge (0,1)->(0,0)
    k = next(i for i in range(4) if np.allclose(p.edge(i)[0], [0, 1]) and
             np.allclose(p.edge(i)[1], [0, 0]))
    assert p.weight[k][0] == 1.0
    with pytest.raises(ValidationError):
        PlanarPolygon(cw)


def test_bowtie_rejected_with_vertex():
    with pytest.raises(ValidationError) as exc:
        PlanarPolygon([[0, 0], [1, 1], [1, 0], [0, 1]])
    assert exc.value.vertex is not None


def test_weight_must_be_positive_somewhere():
    with pytest.raises(NoPositiveWeight):
        PlanarPolygon.unit_square(weight=[0.0, -1.0, 0.0, 0.0])


def test_vertex_weight_takes_larger_side():
    p = PlanarPolygon.unit_square(weight=[[1, 3], 2.0, 1.0, 1.0])
    assert p.vertex_weight(1) == 3.0
    assert p.weight_on_edge(0, 0.5) == pytest.approx(2.0)


def test_polygon_json_roundtrip(tmp_path):
    p = PlanarPolygon.unit_square(weight=[[1, 2, 2, 1], 1.0, 1.0, 1.0])
    path = tmp_path / "sq.json"
    save_domain(p, path)
    q = load_domain(path)
    assert np.array_equal(p.vertices, q.vertices)
    assert all(np.array_equal(a, b) for a, b in zip(p.weight, q.weight))


def test_cusp_corner_rejected():
    with pytest.raises(ValidationError, match="cusp"):
        load_domain({"corners": [{"kind": "cusp"}]})


# --- cones ----------------------------------------------------------------

def test_cone_validation():
    with pytest.raises(ValidationError):
        PolyhedralCone(3, [[2.0, 0, 0]])
    with pytest.raises(ValidationError):
        PolyhedralCone(3, [[1.0, 0, 0], [-1.0, 0, 0]])


def test_orthonormal_complement():
    rng = np.random.default_rng(1)
    for _ in range(20):
        t = rng.normal(size=3)
        t /= np.linalg.norm(t)
        f = orthonormal_complement(t)
        basis = np.vstack([f, t])
        assert np.allclose(basis @ basis.T, np.eye(3), atol=1e-14)
        assert np.linalg.det(basis) == pytest.approx(1.0)


def test_octant_profile():
    prof = section_profile(PolyhedralCone.orthant(3), AXIS)
    assert len(set(prof.faces.tolist())) == 3
    assert np.allclose(prof.d, 1 / math.sqrt(2), atol=1e-14)
    assert np.isclose(prof.ends[-1] - prof.starts[0] + 0, 2 * math.pi) or \
        np.isclose(np.sum(prof.ends - prof.starts), 2 * math.pi)


def test_octant_boundary_axis_not_interior():
    with pytest.raises(NotInterior):
        section_profile(PolyhedralCone.orthant(3), np.array([1.0, 0.0, 0.0]))


def test_circular_surrogate_profile():
    alpha = math.pi / 6
    prof = section_profile(PolyhedralCone.circular_surrogate(alpha, 256), np.array([0, 0, 1.0]))
    phi = np.linspace(0, 2 * math.pi, 5001)
    b = prof.b(phi)
    assert np.all(b >= math.tan(alpha) * (1 - 1e-12))
    assert np.all(b <= math.tan(alpha) / math.cos(math.pi / 256) * (1 + 1e-12))


def test_octant_center_direction():
    c = max_min_distance_direction(PolyhedralCone.orthant(3))
    assert np.allclose(c.theta, AXIS, atol=1e-10)
    assert c.d == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert c.inscribed


def test_wide_triangle_incenter_unbounded():
    # a spherical triangle too wide for its incenter to give a bounded section
    n = np.array([[-0.54030231, 0.0, 0.84147098], [0.21558826, -0.37340982, 0.90226759],
                  [0.73600267, 0.47796572, 0.47942554]])
    cone = PolyhedralCone.from_normals(n)
    with pytest.raises(Unbounded):
        section_profile(cone, _incenter(cone))
    c = max_min_distance_direction(cone)
    assert not c.inscribed
    assert np.all(cone.normals @ c.theta > 0)


def test_wedge_in_r3_has_no_bounded_section():
    wedge = PolyhedralCone(3, np.array([[1.0, 0, 0], [0, 1.0, 0]]))
    with pytest.raises((Unbounded, OptimizationFailed)):
        max_min_distance_direction(wedge)


def _incenter(cone):
    x = np.linalg.solve(cone.normals, np.ones(3))
    return x / np.linalg.norm(x)


@given(cones(3, 3))
def test_spherical_triangle_is_inscribed(cone):
    # only meaningful when the plane through the incenter cuts a bounded section
    try:
        section_profile(cone, _incenter(cone))
    except (Unbounded, NotInterior):
        assume(False)
    c = max_min_distance_direction(cone)
    assert np.ptp(c.profile.d) <= 1e-8
    assert c.inscribed


@given(cones(), st.floats(-0.15, 0.15), st.floats(-0.15, 0.15))
def test_profile_minimum_and_feet(cone, dx, dy):
    theta = np.array([dx, dy, 1.0])
    theta /= np.linalg.norm(theta)
    if not cone.is_admissible(theta):
        return
    try:
        prof = section_profile(cone, theta)
    except Unbounded:
        return
    phi = np.linspace(0, 2 * math.pi, 20001)
    b = prof.b(phi)
    assert b.min() >= prof.d.min() * (1 - 1e-12)
    for k in range(len(prof.d)):
        mid = 0.5 * (prof.starts[k] + prof.ends[k])
        assert prof.b(mid) >= prof.d[k] * (1 - 1e-12)
        if prof.starts[k] <= prof.phi_foot[k] < prof.ends[k]:
            assert prof.b(prof.phi_foot[k]) == pytest.approx(prof.d[k], rel=1e-12)
    # the global minimum is attained at the foot of the nearest face; that
    # face may own two pieces when its arc wraps through phi = 0
    k = int(np.argmin(prof.d))
    pieces = np.nonzero(prof.faces == prof.faces[k])[0]
    assert any(prof.starts[i] - 1e-12 <= prof.phi_foot[i] <= prof.ends[i] + 1e-12
               for i in pieces)


@settings(max_examples=25)
@given(cones(), rotations())
def test_distances_rotation_invariant(cone, q):
    c = max_min_distance_direction(cone, n_starts=4)
    d0 = section_profile(cone, c.theta).face_distances
    d1 = section_profile(cone.rotated(q), q @ c.theta).face_distances
    assert d0.keys() == d1.keys()
    d0, d1 = np.array(list(d0.values())), np.array([d1[k] for k in d0])
    assert np.allclose(d0, d1, rtol=0, atol=1e-10)


@given(cones(), st.floats(-0.1, 0.1), st.floats(-0.1, 0.1))
def test_sigma_identity_on_straight_arcs(cone, dx, dy):
    theta = np.array([dx, dy, 1.0])
    theta /= np.linalg.norm(theta)
    if not cone.is_admissible(theta):
        return
    try:
        prof = section_profile(cone, theta)
    except Unbounded:
        return
    sig = sigma_codim3(prof)
    for k in range(len(prof.d)):
        phi = np.linspace(prof.starts[k], prof.ends[k], 41)[1:-1]
        direct = sigma_from_b(prof.b(phi), prof.db(phi))
        assert np.allclose(direct, sig.arc_sigma[k], rtol=1e-12, atol=0)
