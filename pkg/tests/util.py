"""Shared generators and independent reference implementations for the tests.

expm_dense is the oracle used to cross-check the closed-form screw
exponential: plain scaling-and-squaring on the 4x4 twist matrix, no shared
code with the package internals.
"""

import numpy as np

from screwplan.screws import (
    INFINITE_PITCH,
    Pose,
    ScrewDisplacement,
    quat_to_rot,
)


def rand_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def rand_rotation(rng):
    return quat_to_rot(rng.normal(size=4))


def rand_pose(rng, span=1.0):
    return Pose(rand_rotation(rng), rng.uniform(-span, span, 3))


def rand_screw(rng, allow_prismatic=True):
    axis = rand_unit(rng)
    if allow_prismatic and rng.random() < 0.2:
        return ScrewDisplacement(axis, np.zeros(3), INFINITE_PITCH,
                                 rng.uniform(0.05, 0.8))
    m = rng.normal(size=3) * 0.3
    m -= (m @ axis) * axis
    pitch = rng.uniform(-0.2, 0.2)
    # keep clear of both the identity cutoff and the theta = pi branch point
    theta = rng.uniform(0.05, 3.09)
    return ScrewDisplacement(axis, m, pitch, theta)


def records_close(a, b, tol=1e-13):
    """Structural equality of two JSON-ready records, numbers compared
    with a tolerance (poses pass through quaternions, which costs ulps)."""
    if isinstance(a, dict):
        return isinstance(b, dict) and list(a) == list(b) and all(
            records_close(a[k], b[k], tol) for k in a)
    if isinstance(a, (list, tuple)):
        return isinstance(b, (list, tuple)) and len(a) == len(b) and all(
            records_close(x, y, tol) for x, y in zip(a, b))
    if isinstance(a, bool) or isinstance(b, bool):
        return a is b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return abs(a - b) <= tol * max(1.0, abs(a), abs(b))
    return a == b


def expm_dense(A):
    """Matrix exponential by scaling-and-squaring over a Taylor series."""
    n = np.linalg.norm(A, 1)
    s = max(0, int(np.ceil(np.log2(n))) + 1) if n > 0 else 0
    B = A / (2.0 ** s)
    X = np.eye(A.shape[0])
    term = np.eye(A.shape[0])
    for k in range(1, 25):
        term = term @ B / k
        X = X + term
    for _ in range(s):
        X = X @ X
    return X
