"""Pose and screw algebra: frozen oracle values plus property checks.

Hand-derived values use the Chasles construction: for a zero-pitch screw
about an axis through point r, the displacement translation is (I - R) r,
plus h * theta along the axis for nonzero pitch.
"""

import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from screwplan.screws import (
    INFINITE_PITCH,
    Pose,
    ScrewDisplacement,
    UnitTwist,
    adjoint,
    compose,
    exp_screw,
    inverse,
    load_pose_sequence,
    log_pose,
    pose_error,
    pose_from_record,
    pose_to_record,
    quat_to_rot,
    rot_to_quat,
    save_pose_sequence,
    sclerp,
    sclerp_path,
    screw_from_pose,
    twist_hat,
    unit_twist,
)
from util import expm_dense, rand_pose, rand_screw, rand_unit


def test_exp_half_turn_about_offset_axis():
    # zero-pitch screw about the z line through (0.1, 0, 0), magnitude pi:
    # translation must be (I - Rz(pi)) r = (0.2, 0, 0)
    axis = np.array([0.0, 0.0, 1.0])
    r = np.array([0.1, 0.0, 0.0])
    s = ScrewDisplacement(axis, np.cross(r, axis), 0.0, math.pi)
    g = exp_screw(unit_twist(s), s.magnitude)
    assert_allclose(g.rotation, np.diag([-1.0, -1.0, 1.0]), atol=1e-12)
    assert_allclose(g.translation, [0.2, 0.0, 0.0], atol=1e-12)


def test_exp_matches_dense_matrix_exponential():
    rng = np.random.default_rng(1)
    for _ in range(200):
        s = rand_screw(rng)
        xi = unit_twist(s)
        g = exp_screw(xi, s.magnitude)
        T = expm_dense(twist_hat(xi.array() * s.magnitude))
        assert_allclose(g.rotation, T[:3, :3], atol=1e-12)
        assert_allclose(g.translation, T[:3, 3], atol=1e-12)


def test_exp_zero_magnitude_is_identity():
    rng = np.random.default_rng(2)
    g = exp_screw(unit_twist(rand_screw(rng)), 0.0)
    assert_allclose(g.rotation, np.eye(3), atol=0.0)
    assert_allclose(g.translation, np.zeros(3), atol=0.0)


def test_unit_twist_stacking_is_linear_first():
    s = ScrewDisplacement(np.array([0.0, 0.0, 1.0]),
                          np.array([0.0, 0.1, 0.0]), 0.05, 1.0)
    xi = unit_twist(s)
    assert_allclose(xi.array(), [0.0, 0.1, 0.05, 0.0, 0.0, 1.0], atol=0.0)


def test_unit_twist_of_pure_translation_has_zero_angular_part():
    s = ScrewDisplacement(np.array([1.0, 0.0, 0.0]), np.zeros(3),
                          INFINITE_PITCH, 0.3)
    xi = unit_twist(s)
    assert_allclose(xi.array(), [1.0, 0.0, 0.0, 0.0, 0.0, 0.0], atol=0.0)


def test_log_of_identity_is_canonical_zero_screw():
    xi, theta = log_pose(Pose.identity())
    assert theta == 0.0
    assert_allclose(xi.angular, [0.0, 0.0, 1.0], atol=0.0)
    assert_allclose(xi.linear, np.zeros(3), atol=0.0)


def test_log_of_pure_translation():
    g = Pose(np.eye(3), np.array([0.0, 0.0, 0.3]))
    s = screw_from_pose(g)
    assert s.pitch == INFINITE_PITCH
    assert_allclose(s.axis, [0.0, 0.0, 1.0], atol=1e-15)
    assert_allclose(s.magnitude, 0.3)
    assert_allclose(s.moment, np.zeros(3), atol=0.0)


def test_exp_log_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(300):
        s = rand_screw(rng)
        g = exp_screw(unit_twist(s), s.magnitude)
        xi, theta = log_pose(g)
        g2 = exp_screw(xi, theta)
        rot, trans = pose_error(g, g2)
        assert rot < 1e-9 and trans < 1e-9


def test_log_recovers_screw_parameters():
    rng = np.random.default_rng(4)
    for _ in range(200):
        s = rand_screw(rng, allow_prismatic=False)
        g = exp_screw(unit_twist(s), s.magnitude)
        r = screw_from_pose(g)
        assert_allclose(r.axis, s.axis, atol=1e-9)
        assert_allclose(r.moment, s.moment, atol=1e-9)
        assert_allclose(r.pitch, s.pitch, atol=1e-9)
        assert_allclose(r.magnitude, s.magnitude, atol=1e-9)
        # type invariants: unit axis, moment orthogonal to axis
        assert abs(np.linalg.norm(r.axis) - 1.0) < 1e-9
        assert abs(r.axis @ r.moment) < 1e-9


def test_round_trip_near_and_at_pi():
    rng = np.random.default_rng(5)
    for dt in (0.0, 1e-9, 1e-7, 1e-4):
        axis = rand_unit(rng)
        m = rng.normal(size=3) * 0.2
        m -= (m @ axis) * axis
        s = ScrewDisplacement(axis, m, 0.03, math.pi - dt)
        g = exp_screw(unit_twist(s), s.magnitude)
        xi, theta = log_pose(g)
        g2 = exp_screw(xi, theta)
        rot, trans = pose_error(g, g2)
        assert rot < 1e-9 and trans < 1e-9


def test_compose_inverse_group_laws():
    rng = np.random.default_rng(6)
    for _ in range(100):
        a, b = rand_pose(rng), rand_pose(rng)
        rot, trans = pose_error(compose(a, inverse(a)), Pose.identity())
        assert rot < 1e-12 and trans < 1e-12
        # action law: (a b) x == a (b x)
        x = rng.normal(size=3)
        assert_allclose(compose(a, b).apply(x), a.apply(b.apply(x)),
                        atol=1e-12)


def test_compose_identity_passthrough():
    rng = np.random.default_rng(7)
    p = rand_pose(rng)
    q = compose(Pose.identity(), p)
    assert_allclose(q.rotation, p.rotation, atol=1e-12)
    assert_allclose(q.translation, p.translation, atol=1e-12)


def test_long_compose_chain_stays_orthonormal():
    rng = np.random.default_rng(8)
    g = Pose.identity()
    step = rand_pose(rng, span=0.01)
    for _ in range(20000):
        g = compose(g, step)
    dev = np.abs(g.rotation.T @ g.rotation - np.eye(3)).max()
    assert dev < 1e-12


def test_pose_error_345():
    a = Pose(np.eye(3), np.zeros(3))
    b = Pose(np.eye(3), np.array([0.003, 0.004, 0.0]))
    rot, trans = pose_error(a, b)
    assert rot == 0.0
    assert_allclose(trans, 0.005)
    assert pose_error(a, a) == (0.0, 0.0)


def test_pose_error_symmetric():
    rng = np.random.default_rng(9)
    a, b = rand_pose(rng), rand_pose(rng)
    assert_allclose(pose_error(a, b), pose_error(b, a), atol=1e-12)


def test_sclerp_endpoints_exact():
    rng = np.random.default_rng(10)
    for _ in range(50):
        gi, gf = rand_pose(rng), rand_pose(rng)
        for tau, ref in ((0.0, gi), (1.0, gf)):
            g = sclerp(gi, gf, tau)
            rot, trans = pose_error(g, ref)
            assert rot < 1e-12 and trans < 1e-12


def test_sclerp_halfway_pitch_screw():
    # half of a pitch-0.1 half turn about z: quarter turn, z-lift 0.05*pi
    s = ScrewDisplacement(np.array([0.0, 0.0, 1.0]), np.zeros(3), 0.1,
                          math.pi)
    gf = exp_screw(unit_twist(s), s.magnitude)
    g = sclerp(Pose.identity(), gf, 0.5)
    assert_allclose(g.rotation,
                    [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
                    atol=1e-12)
    assert_allclose(g.translation, [0.0, 0.0, 0.05 * math.pi], atol=1e-12)


def test_sclerp_geodesic_screw_is_constant():
    # the relative displacement between any two path points lies on the
    # same screw axis with proportional magnitude
    rng = np.random.default_rng(11)
    for _ in range(100):
        gi, gf = rand_pose(rng), rand_pose(rng)
        s_full = screw_from_pose(compose(gf, inverse(gi)))
        if s_full.magnitude < 0.1 or s_full.magnitude > 3.0:
            continue
        t1, t2 = sorted(rng.uniform(0.0, 1.0, 2))
        if t2 - t1 < 0.05:
            continue
        g1 = sclerp(gi, gf, t1)
        g2 = sclerp(gi, gf, t2)
        s = screw_from_pose(compose(g2, inverse(g1)))
        assert_allclose(s.axis, s_full.axis, atol=1e-6)
        assert_allclose(s.moment, s_full.moment, atol=1e-6)
        assert_allclose(s.pitch, s_full.pitch, atol=1e-6)
        assert_allclose(s.magnitude, (t2 - t1) * s_full.magnitude, atol=1e-9)


def test_sclerp_constant_when_endpoints_equal():
    rng = np.random.default_rng(12)
    g = rand_pose(rng)
    for tau in (0.0, 0.3, 0.7, 1.0):
        rot, trans = pose_error(sclerp(g, g, tau), g)
        assert rot < 1e-12 and trans < 1e-12


def test_sclerp_pure_translation_is_straight_line():
    gi = Pose.identity()
    gf = Pose(np.eye(3), np.array([0.3, -0.2, 0.1]))
    g = sclerp(gi, gf, 0.25)
    assert_allclose(g.rotation, np.eye(3), atol=1e-15)
    assert_allclose(g.translation, [0.075, -0.05, 0.025], atol=1e-12)


def test_sclerp_path_matches_pointwise_sclerp():
    rng = np.random.default_rng(13)
    gi, gf = rand_pose(rng), rand_pose(rng)
    taus = np.linspace(0.0, 1.0, 17)
    R, p = sclerp_path(gi, gf, taus)
    for k, tau in enumerate(taus):
        g = sclerp(gi, gf, tau)
        assert_allclose(R[k], g.rotation, atol=1e-12)
        assert_allclose(p[k], g.translation, atol=1e-12)


def test_left_invariance_of_sclerp():
    rng = np.random.default_rng(14)
    h, gi, gf = rand_pose(rng), rand_pose(rng), rand_pose(rng)
    a = sclerp(compose(h, gi), compose(h, gf), 0.4)
    b = compose(h, sclerp(gi, gf, 0.4))
    rot, trans = pose_error(a, b)
    assert rot < 1e-9 and trans < 1e-9


def test_quaternion_round_trip_includes_pi_rotations():
    rng = np.random.default_rng(15)
    for _ in range(200):
        R = quat_to_rot(rng.normal(size=4))
        assert_allclose(quat_to_rot(rot_to_quat(R)), R, atol=1e-12)
    for _ in range(20):
        axis = rand_unit(rng)
        W = np.array([[0.0, -axis[2], axis[1]],
                      [axis[2], 0.0, -axis[0]],
                      [-axis[1], axis[0], 0.0]])
        R = np.eye(3) + 2.0 * (W @ W)  # rotation by exactly pi
        assert_allclose(quat_to_rot(rot_to_quat(R)), R, atol=1e-12)


def test_pose_record_round_trip():
    rng = np.random.default_rng(16)
    g = rand_pose(rng)
    rec = pose_to_record(g)
    assert set(rec) == {"t", "q"}
    assert rec["q"][0] >= 0.0
    g2 = pose_from_record(json.loads(json.dumps(rec)))
    rot, trans = pose_error(g, g2)
    assert rot < 1e-12 and trans < 1e-12


def test_adjoint_transforms_twists_consistently():
    # Ad_g (xi theta) must equal log(g exp(xi theta) g^-1)
    rng = np.random.default_rng(17)
    for _ in range(50):
        g = rand_pose(rng)
        s = rand_screw(rng)
        xi = unit_twist(s).array() * s.magnitude
        lhs = adjoint(g) @ xi
        conj = compose(compose(g, exp_screw(unit_twist(s), s.magnitude)),
                       inverse(g))
        xi2, theta2 = log_pose(conj)
        rhs = xi2.array() * theta2
        assert_allclose(lhs, rhs, atol=1e-9)


def test_pose_rejects_non_orthonormal_rotation():
    with pytest.raises(ValueError):
        Pose(np.eye(3) * 1.001, np.zeros(3))
    with pytest.raises(ValueError):
        Pose(-np.eye(3), np.zeros(3))  # det = -1


def test_screw_displacement_validation():
    z = np.array([0.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        ScrewDisplacement(z * 2.0, np.zeros(3), 0.0, 1.0)
    with pytest.raises(ValueError):
        ScrewDisplacement(z, np.array([0.0, 0.0, 0.5]), 0.0, 1.0)  # m not orthogonal
    with pytest.raises(ValueError):
        ScrewDisplacement(z, np.array([0.1, 0.0, 0.0]), INFINITE_PITCH, 1.0)


def test_unit_twist_validation():
    with pytest.raises(ValueError):
        UnitTwist(np.zeros(3), np.array([0.0, 0.0, 2.0]))
    with pytest.raises(ValueError):
        UnitTwist(np.array([0.5, 0.0, 0.0]), np.zeros(3))


def test_pose_arrays_are_immutable():
    g = Pose.identity()
    with pytest.raises(ValueError):
        g.rotation[0, 0] = 2.0


def test_pose_sequence_round_trip(tmp_path):
    rng = np.random.default_rng(17)
    poses = [rand_pose(rng) for _ in range(6)]
    path = tmp_path / "poses.json"
    save_pose_sequence(poses, path)
    back = load_pose_sequence(path)
    assert len(back) == 6
    for a, b in zip(back, poses):
        rot, trans = pose_error(a, b)
        assert rot < 1e-14 and trans < 1e-14
    path.write_text(json.dumps({"format": "poses", "poses": []}))
    with pytest.raises(ValueError):
        load_pose_sequence(path)
