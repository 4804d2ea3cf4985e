"""Independent forward kinematics for the 7-DoF arm, built frame by
frame from its modified DH table (Craig convention).  The packaged
screw model is generated from, and tested against, this chain."""

import numpy as np

# rows: a_{i-1}, d_i, alpha_{i-1} for the seven joints, then the
# fixed flange frame
DH = [
    (0.0, 0.333, 0.0),
    (0.0, 0.0, -np.pi / 2.0),
    (0.0, 0.316, np.pi / 2.0),
    (0.0825, 0.0, np.pi / 2.0),
    (-0.0825, 0.384, -np.pi / 2.0),
    (0.0, 0.0, np.pi / 2.0),
    (0.088, 0.0, np.pi / 2.0),
    (0.0, 0.107, 0.0),
]

LIMITS_LOWER = [-2.8973, -1.7628, -2.8973, -3.0718, -2.8973, -0.0175,
                -2.8973]
LIMITS_UPPER = [2.8973, 1.7628, 2.8973, -0.0698, 2.8973, 3.7525, 2.8973]


def _step(a, d, alpha, theta):
    # Rx(alpha) Tx(a) Rz(theta) Tz(d)
    ca, sa = np.cos(alpha), np.sin(alpha)
    ct, st = np.cos(theta), np.sin(theta)
    return np.array([
        [ct, -st, 0.0, a],
        [st * ca, ct * ca, -sa, -d * sa],
        [st * sa, ct * sa, ca, d * ca],
        [0.0, 0.0, 0.0, 1.0],
    ])


def dh_matrix(q):
    """Base-to-flange homogeneous transform."""
    t = np.eye(4)
    for (a, d, alpha), theta in zip(DH, list(q) + [0.0]):
        t = t @ _step(a, d, alpha, theta)
    return t


def joint_frames():
    """Frame of each joint at the zero configuration."""
    frames = []
    t = np.eye(4)
    for a, d, alpha in DH[:7]:
        t = t @ _step(a, d, alpha, 0.0)
        frames.append(t.copy())
    return frames


def reference_twists():
    """Spatial unit twists [v; w] of the seven joints at zero
    configuration: w is the frame z-axis, v = -w x origin."""
    rows = []
    for t in joint_frames():
        omega = t[:3, 2]
        origin = t[:3, 3]
        rows.append(np.concatenate([-np.cross(omega, origin), omega]))
    return np.array(rows)


def model_document():
    """The robot file the package ships, computed from the DH chain."""
    home = dh_matrix(np.zeros(7))
    quat = _rot_to_quat(home[:3, :3])

    def clean(values):
        return [0.0 if abs(v) < 1e-12 else round(float(v), 12)
                for v in values]

    return {
        "name": "panda",
        "units": {"length": "m", "angle": "rad"},
        "twists": [clean(row) for row in reference_twists()],
        "home_pose": {"t": clean(home[:3, 3]), "q": clean(quat)},
        "joint_limits": {"lower": LIMITS_LOWER, "upper": LIMITS_UPPER},
        "sew_indices": [1, 3, 5],
    }


def _rot_to_quat(r):
    w = 0.5 * np.sqrt(max(1.0 + np.trace(r), 0.0))
    if w > 1e-6:
        x = (r[2, 1] - r[1, 2]) / (4.0 * w)
        y = (r[0, 2] - r[2, 0]) / (4.0 * w)
        z = (r[1, 0] - r[0, 1]) / (4.0 * w)
    else:
        d = np.diag(r)
        i = int(np.argmax(d))
        j, k = (i + 1) % 3, (i + 2) % 3
        x = np.zeros(3)
        x[i] = 0.5 * np.sqrt(max(1.0 + d[i] - d[j] - d[k], 0.0))
        x[j] = (r[j, i] + r[i, j]) / (4.0 * x[i])
        x[k] = (r[k, i] + r[i, k]) / (4.0 * x[i])
        w = (r[k, j] - r[j, k]) / (4.0 * x[i])
        x, y, z = x
    q = np.array([w, x, y, z])
    return q / np.linalg.norm(q)
