"""Product-of-exponentials kinematics for a serial arm.

A robot is its reference twists (spatial frame, zero configuration,
linear part first), a home pose, joint limits, and the three joints
whose axes carry the shoulder, elbow and wrist points.  The arm's
redundancy is exposed as the shoulder-elbow-wrist angle: the signed
rotation of the elbow about the shoulder-wrist line, measured from the
plane spanned by that line and the base vertical.
"""

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

import numpy as np

from .screws import Pose, hat, pose_from_record, pose_to_record

DAMPING = 1e-3
SINGULAR_TOL = 1e-4
REFERENCE_AXIS_TOL = 1e-6


class InvalidRobotError(ValueError):
    pass


class BadEpsError(ValueError):
    pass


class LimitZone(Enum):
    WITHIN_INNER = "within_inner"
    BETWEEN_BOUNDS = "between_bounds"
    OUTSIDE_OUTER = "outside_outer"


def _identity_pose():
    return Pose.identity()


@dataclass(frozen=True)
class RobotModel:
    name: str
    twists: np.ndarray  # (n, 6) reference twists, [v; w]
    home_pose: Pose
    lower: np.ndarray
    upper: np.ndarray
    sew_indices: tuple
    base_pose: Pose = field(default_factory=_identity_pose)

    def __post_init__(self):
        twists = np.array(self.twists, dtype=float)
        if twists.ndim != 2 or twists.shape[1] != 6:
            raise InvalidRobotError("twists must be an (n, 6) array")
        n = twists.shape[0]
        for row in twists:
            wn = np.linalg.norm(row[3:])
            if abs(wn - 1.0) > 1e-9 and not (
                    wn < 1e-12 and abs(np.linalg.norm(row[:3]) - 1.0) < 1e-9):
                raise InvalidRobotError(
                    "each twist needs a unit rotation axis, or none and a "
                    "unit translation direction")
        lower = np.array(self.lower, dtype=float)
        upper = np.array(self.upper, dtype=float)
        if lower.shape != (n,) or upper.shape != (n,):
            raise InvalidRobotError("joint limits must match joint count")
        if np.any(lower >= upper):
            raise InvalidRobotError("lower limits must be below upper")
        sew = tuple(int(i) for i in self.sew_indices)
        if len(sew) != 3 or len(set(sew)) != 3 or not all(
                0 <= i < n for i in sew) or list(sew) != sorted(sew):
            raise InvalidRobotError(
                "sew_indices must be three increasing joint indices")
        axis_points = np.cross(twists[:, 3:], twists[:, :3])
        for arr in (twists, lower, upper, axis_points):
            arr.setflags(write=False)
        object.__setattr__(self, "twists", twists)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "sew_indices", sew)
        object.__setattr__(self, "_axis_points", axis_points)

    @property
    def n_joints(self):
        return self.twists.shape[0]

    def axis_point(self, i):
        """Reference point on joint i's axis nearest the origin."""
        return self._axis_points[i]

    def clamp(self, q):
        return np.clip(q, self.lower, self.upper)


def load_robot_model(path, base_pose=None):
    with open(path) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidRobotError(f"not valid JSON: {e}") from e
    return robot_from_record(doc, base_pose=base_pose)


def robot_from_record(doc, base_pose=None):
    try:
        units = doc["units"]
        if units["length"] != "m" or units["angle"] != "rad":
            raise InvalidRobotError(f"expected units m/rad, got {units}")
        return RobotModel(
            name=doc["name"],
            twists=np.array(doc["twists"], dtype=float),
            home_pose=pose_from_record(doc["home_pose"]),
            lower=np.array(doc["joint_limits"]["lower"], dtype=float),
            upper=np.array(doc["joint_limits"]["upper"], dtype=float),
            sew_indices=tuple(doc["sew_indices"]),
            base_pose=base_pose if base_pose is not None
            else Pose.identity(),
        )
    except InvalidRobotError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidRobotError(f"bad robot file: {e}") from e


def robot_to_record(model):
    """Serializable robot description; the mount pose is runtime state
    and stays out of the record."""
    return {
        "name": model.name,
        "units": {"length": "m", "angle": "rad"},
        "twists": model.twists.tolist(),
        "home_pose": pose_to_record(model.home_pose),
        "joint_limits": {"lower": model.lower.tolist(),
                         "upper": model.upper.tolist()},
        "sew_indices": list(model.sew_indices),
    }


def save_robot_model(model, path):
    with open(path, "w") as f:
        json.dump(robot_to_record(model), f, indent=1)
        f.write("\n")


def panda_model(base_pose=None):
    """The packaged 7-DoF arm."""
    ref = resources.files("screwplan.data").joinpath("panda_arm.json")
    with resources.as_file(ref) as path:
        return load_robot_model(path, base_pose=base_pose)


# elbow-bent ready posture of the packaged arm, comfortably inside every
# joint limit; the stock start for activities and examples
PANDA_READY = np.array([0.0, -math.pi / 4, 0.0, -3 * math.pi / 4, 0.0,
                        math.pi / 2, math.pi / 4])


def _cross(a, b):
    # np.cross's axis bookkeeping costs more than the product here
    return np.array([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])


def _cross_cols(a, cols):
    """Cross of a fixed 3-vector with each column of a (3, n) array."""
    return hat(a) @ cols


def _exp_twist(v, w, q):
    """Rigid displacement of the joint twist [v; w] at coordinate q."""
    if np.dot(w, w) < 1e-24:
        return np.eye(3), v * q
    wh = hat(w)
    s, c = math.sin(q), math.cos(q)
    one_c = 2.0 * math.sin(q / 2.0) ** 2
    rot = np.eye(3) + s * wh + one_c * (wh @ wh)
    vmat = q * np.eye(3) + one_c * wh + (q - s) * (wh @ wh)
    return rot, vmat @ v


class _Chain:
    """One pass down the arm: partial products, flange pose, world
    Jacobian.  partial[i] is the transform ahead of joint i, so it
    carries both joint i's axis and the frame its link-(i-1) points
    live in."""

    def __init__(self, model, q):
        q = np.asarray(q, dtype=float)
        if q.shape != (model.n_joints,):
            raise ValueError(
                f"expected {model.n_joints} joint values, got {q.shape}")
        self.model = model
        self.q = q
        rots = [model.base_pose.rotation]
        trans = [model.base_pose.translation]
        for i in range(model.n_joints):
            r, p = _exp_twist(model.twists[i, :3], model.twists[i, 3:],
                              q[i])
            rots.append(rots[-1] @ r)
            trans.append(rots[-2] @ p + trans[-1])
        self.partial_rots = rots
        self.partial_trans = trans

    @property
    def pose(self):
        r = self.partial_rots[-1] @ self.model.home_pose.rotation
        p = (self.partial_rots[-1] @ self.model.home_pose.translation
             + self.partial_trans[-1])
        return Pose(r, p)

    @property
    def jacobian(self):
        """World-frame Jacobian, columns are joint twists [v; w]."""
        n = self.model.n_joints
        jac = np.empty((6, n))
        for i in range(n):
            r = self.partial_rots[i]
            p = self.partial_trans[i]
            w = r @ self.model.twists[i, 3:]
            jac[:3, i] = r @ self.model.twists[i, :3] + _cross(p, w)
            jac[3:, i] = w
        return jac

    def moved_point(self, joint_index):
        """World position of the reference axis point of a joint."""
        r = self.model.axis_point(joint_index)
        return (self.partial_rots[joint_index] @ r
                + self.partial_trans[joint_index])


def forward_kinematics(model, q):
    return _Chain(model, q).pose


def spatial_jacobian(model, q):
    return _Chain(model, q).jacobian


def fk_jacobian(model, q):
    chain = _Chain(model, q)
    return chain.pose, chain.jacobian


def pseudoinverse(jac):
    """Right pseudoinverse, switching to damped least squares when the
    smallest singular value collapses.  Returns (pinv, damped)."""
    sigma = np.linalg.svd(jac, compute_uv=False)
    damped = bool(sigma[-1] < SINGULAR_TOL)
    jjt = jac @ jac.T
    if damped:
        jjt = jjt + DAMPING ** 2 * np.eye(jac.shape[0])
    return np.linalg.solve(jjt, jac).T, damped


def sew_points(model, q):
    """World shoulder, elbow and wrist points: the reference axis
    points of the three marker joints, carried by the links ahead of
    them."""
    chain = _Chain(model, q)
    return _sew_points(chain)


def _sew_points(chain):
    s, e, w = (chain.moved_point(i) for i in chain.model.sew_indices)
    return s, e, w


def _reference_direction(model, u):
    """In-plane zero reference for the elbow angle: base vertical,
    or base x when the shoulder-wrist line is vertical."""
    zhat = model.base_pose.rotation[:, 2]
    if np.linalg.norm(_cross(zhat, u)) < REFERENCE_AXIS_TOL:
        return model.base_pose.rotation[:, 0]
    return zhat


def _sew_angle_from_points(model, s, e, w):
    u = w - s
    u = u / np.linalg.norm(u)
    ref = _reference_direction(model, u)
    r = ref - np.dot(ref, u) * u
    ew = e - s
    f = ew - np.dot(ew, u) * u
    return math.atan2(np.dot(u, _cross(r, f)), np.dot(r, f))


def sew_angle(model, q):
    return _sew_angle_from_points(model, *sew_points(model, q))


def _point_jacobian(jac, point, upto):
    """Velocity of a world point attached ahead of joint `upto`."""
    jp = np.zeros((3, jac.shape[1]))
    if upto:
        v, w = jac[:3, :upto], jac[3:, :upto]
        # w_j x point column-wise
        jp[:, :upto] = v - _cross_cols(point, w)
    return jp


def _sew_jacobian(chain):
    model = chain.model
    jac = chain.jacobian
    s, e, w = _sew_points(chain)
    js, je, jw = (_point_jacobian(jac, p, i)
                  for p, i in zip((s, e, w), model.sew_indices))

    a = w - s
    na = np.linalg.norm(a)
    u = a / na
    da = jw - js
    du = (da - np.outer(u, u @ da)) / na

    ref = _reference_direction(model, u)
    r = ref - np.dot(ref, u) * u
    dr = -np.outer(u, ref @ du) - np.dot(ref, u) * du

    ew = e - s
    f = ew - np.dot(ew, u) * u
    dew = je - js
    df = dew - np.outer(u, ew @ du + u @ dew) - np.dot(ew, u) * du

    rxf = _cross(r, f)
    y = np.dot(u, rxf)
    x = np.dot(r, f)
    # columnwise dr x f and r x df
    dy = rxf @ du + u @ (_cross_cols(f, dr) * -1.0 + _cross_cols(r, df))
    dx = f @ dr + r @ df
    jpsi = (x * dy - y * dx) / (x * x + y * y)
    psi = math.atan2(y, x)
    return psi, jpsi


def sew_state(model, q):
    """(psi, dpsi/dq) in one chain pass."""
    return _sew_jacobian(_Chain(model, q))


def arm_state(model, q):
    """(flange pose, world Jacobian, psi, dpsi/dq) sharing one pass."""
    chain = _Chain(model, q)
    psi, jpsi = _sew_jacobian(chain)
    return chain.pose, chain.jacobian, psi, jpsi


def augmented_jacobian(model, q):
    """World Jacobian with the elbow-angle gradient appended, square
    for a seven-joint arm."""
    pose, jac, psi, jpsi = arm_state(model, q)
    return np.vstack([jac, jpsi])


def check_eps(model, eps_inner, eps_outer):
    span = float(np.min(model.upper - model.lower))
    if not 0.0 < eps_outer < eps_inner < 0.5 * span:
        raise BadEpsError(
            f"need 0 < eps_outer < eps_inner < {0.5 * span:.4f}, got "
            f"inner={eps_inner}, outer={eps_outer}")


def limit_status(model, q, eps_inner, eps_outer):
    """Zone of each joint relative to the shrunk limit intervals."""
    check_eps(model, eps_inner, eps_outer)
    q = np.asarray(q, dtype=float)
    zones = []
    for qi, lo, hi in zip(q, model.lower, model.upper):
        if lo + eps_inner <= qi <= hi - eps_inner:
            zones.append(LimitZone.WITHIN_INNER)
        elif lo + eps_outer <= qi <= hi - eps_outer:
            zones.append(LimitZone.BETWEEN_BOUNDS)
        else:
            zones.append(LimitZone.OUTSIDE_OUTER)
    return zones


def limit_margin(model, q):
    """Smallest signed distance to a limit, over all joints."""
    q = np.asarray(q, dtype=float)
    return float(np.min(np.minimum(q - model.lower, model.upper - q)))


def self_motion_direction(model, q):
    """dq/dpsi along the flange-preserving self-motion: the augmented
    Jacobian mapped back from a pure elbow-angle rate."""
    ja = augmented_jacobian(model, q)
    pinv, damped = pseudoinverse(ja)
    return pinv[:, -1].copy(), damped


def self_motion_rollout(model, q0, delta_psi, step=0.01):
    """Integrate the self-motion field over an elbow-angle interval
    with classical Runge-Kutta.  Returns (psi offsets, configurations),
    both including the start."""
    q = np.asarray(q0, dtype=float).copy()
    total = abs(delta_psi)
    sign = 1.0 if delta_psi >= 0.0 else -1.0
    n = max(1, math.ceil(total / step)) if total > 0.0 else 0
    psis = [0.0]
    qs = [q.copy()]
    done = 0.0
    for _ in range(n):
        h = sign * min(step, total - done)
        k1, _ = self_motion_direction(model, q)
        k2, _ = self_motion_direction(model, q + 0.5 * h * k1)
        k3, _ = self_motion_direction(model, q + 0.5 * h * k2)
        k4, _ = self_motion_direction(model, q + h * k3)
        q = q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        done += abs(h)
        psis.append(sign * done)
        qs.append(q.copy())
    return np.array(psis), np.array(qs)
