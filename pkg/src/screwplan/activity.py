"""Kinematic execution and scoring of whole construction activities.

An activity strings one demonstrated skill across every goal of a
layout.  Pick poses come off a stack, the constraint model is
transferred to each task instance in build order, and the planner
drives the arm through the resulting guiding poses from wherever the
previous placement left it.  The base either stays fixed or relocates
every few placements with seeded noise.  Everything downstream of the
plan is bookkeeping: achieved object poses, per-placement errors, and
a report whose results section round-trips through JSON byte for byte
under a fixed seed.
"""

import json
import math
import os
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .demonstration import (ConstraintModel, TaskInstance,
                            constraint_model_from_record,
                            constraint_model_to_record, transfer_constraints)
from .kinematics import (PANDA_READY, load_robot_model, panda_model,
                         robot_from_record, robot_to_record)
from .layouts import (LayoutSpec, layout_goals, layout_spec_from_record,
                      layout_spec_to_record, pick_stack, yaw_rotation)
from .planner import Outcome, PlannerConfig, plan_through_guiding_poses
from .screws import (Pose, compose, inverse, pose_error, pose_from_record,
                     pose_to_record)

# placement is scored on translation distance and heading alone; the
# full rotation error is recorded but does not gate success
POSITION_TOL = 0.0075
YAW_TOL = math.radians(2.0)


class ActivityError(ValueError):
    pass


class InvalidActivitySpecError(ActivityError):
    pass


class MalformedReportError(ActivityError):
    pass


def _identity_pose():
    return Pose(np.eye(3), np.zeros(3))


# ----------------------------------------------------------------- types


@dataclass(frozen=True)
class PickStation:
    """Where fresh objects come from: base pose of the supply stack.

    With in_base_frame the stack rides the platform: base is read in
    the robot's base frame and re-expressed from the current station at
    pick time, so a relocating base keeps its supply within reach.
    restock caps the pile at that many objects and refills it, cycling
    the pick heights, instead of stacking the whole activity's supply.
    """

    base: Pose
    in_base_frame: bool = False
    restock: int = None

    def __post_init__(self):
        if self.restock is not None and self.restock < 1:
            raise InvalidActivitySpecError("restock must be >= 1")


def pick_sequence(station, count, dims):
    """The pick pose (or base-frame offset) for each of count objects."""
    if station.restock is None:
        return pick_stack(station.base, count, dims)
    pile = pick_stack(station.base, station.restock, dims)
    return [pile[n % station.restock] for n in range(count)]


@dataclass(frozen=True)
class FixedBase:
    base: Pose


@dataclass(frozen=True)
class MovingBase:
    """Relocate the base every few placements.

    Station m sits at initial o step^m, perturbed by uniform noise: a
    ground-plane offset within radius and a yaw within +-yaw_range,
    drawn from a generator seeded once per run.  The seed is part of
    the policy so a rerun reproduces every station exactly.
    stations_per_lap wraps the station index so a layered build walks
    the same line of stations once per course; noise stays fresh on
    every visit.
    """

    initial: Pose
    step: Pose
    seed: int
    relocate_every: int = 3
    radius: float = 0.05
    yaw_range: float = math.radians(5.0)
    stations_per_lap: int = None

    def __post_init__(self):
        if self.seed is None:
            raise InvalidActivitySpecError("moving base needs a seed")
        if self.relocate_every < 1:
            raise InvalidActivitySpecError("relocate_every must be >= 1")
        if self.radius < 0.0 or self.yaw_range < 0.0:
            raise InvalidActivitySpecError(
                "noise radius and yaw range must be nonnegative")
        if self.stations_per_lap is not None and self.stations_per_lap < 1:
            raise InvalidActivitySpecError("stations_per_lap must be >= 1")


@dataclass(frozen=True)
class ActivitySpec:
    """Everything a full run needs.

    grasp_offset is the end-effector pose relative to the held object,
    identity when the hand frame coincides with the object frame.  The
    layout's dims must describe the same object the demonstration
    manipulated; the harness cannot check that, the caller owns it.
    """

    layout: LayoutSpec
    demo_model: ConstraintModel
    pick_station: PickStation
    base_policy: object
    robot: object = field(default_factory=panda_model)
    grasp_offset: Pose = field(default_factory=_identity_pose)
    planner_config: PlannerConfig = field(default_factory=PlannerConfig)
    q_start: np.ndarray = field(default_factory=lambda: PANDA_READY.copy())

    def __post_init__(self):
        if not isinstance(self.base_policy, (FixedBase, MovingBase)):
            raise InvalidActivitySpecError(
                "base_policy must be FixedBase or MovingBase")
        q = np.asarray(self.q_start, dtype=float)
        if q.shape != (self.robot.n_joints,):
            raise InvalidActivitySpecError(
                f"q_start needs {self.robot.n_joints} joint values")
        object.__setattr__(self, "q_start", q)


@dataclass(frozen=True)
class PlacementResult:
    index: tuple
    goal: Pose
    achieved: Pose
    position_error: float
    yaw_error: float
    rotation_error: float
    success: bool
    trajectory_outcome: Outcome
    steps: int


@dataclass(frozen=True)
class ActivityReport:
    robot: str
    layout_kind: str
    mode2_enabled: bool
    goals_total: int
    placements: tuple
    bricks_placed_before_failure: int
    mean_position_error: object
    max_yaw_error: object
    runtime_seconds: float
    trajectories: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class PairedReport:
    ours: ActivityReport
    baseline: ActivityReport


# ----------------------------------------------------------------- scoring


def evaluate_placement(achieved, goal):
    """(position error, yaw error, rotation error, success flag).

    Position is plain translation distance, yaw is the heading
    difference about the goal's own z axis, rotation is the full
    geodesic angle.  Success gates on position and yaw only.
    """
    rot, dist = pose_error(achieved, goal)
    rel = goal.rotation.T @ achieved.rotation
    yaw = abs(math.atan2(rel[1, 0], rel[0, 0]))
    ok = dist < POSITION_TOL and yaw < YAW_TOL
    return dist, yaw, rot, ok


def attached_object_poses(traj, grasp_offset=None):
    """Object poses over the carry: from the step that reached the first
    guiding pose (the pick) through the final step (the place)."""
    start = traj.segment_starts[1] if len(traj.segment_starts) > 1 else 0
    inv = None if grasp_offset is None else inverse(grasp_offset)
    return [s.end_effector if inv is None else compose(s.end_effector, inv)
            for s in traj.steps[start:]]


# ----------------------------------------------------------------- running


def _station_pose(policy, m, rng):
    if policy.stations_per_lap is not None:
        m = m % policy.stations_per_lap
    pose = policy.initial
    for _ in range(m):
        pose = compose(pose, policy.step)
    r = policy.radius * math.sqrt(rng.random())
    phi = 2.0 * math.pi * rng.random()
    dyaw = policy.yaw_range * (2.0 * rng.random() - 1.0)
    yawed = compose(pose, yaw_rotation(dyaw))
    shift = np.array([r * math.cos(phi), r * math.sin(phi), 0.0])
    return Pose(yawed.rotation, yawed.translation + shift)


def run_activity(spec, keep_trajectories=False):
    """Execute every placement of the layout in build order.

    Each placement transfers the constraint model to its task instance,
    converts object guiding poses to end-effector goals through the
    grasp offset, and plans from the configuration the previous
    placement ended in.  The run stops at the first trajectory that
    does not reach its goal; that placement is still recorded.
    Aggregate errors cover the reached placements only.
    """
    t0 = time.perf_counter()
    goals = layout_goals(spec.layout)
    picks = pick_sequence(spec.pick_station, len(goals), spec.layout.dims)
    inv_grasp = inverse(spec.grasp_offset)
    policy = spec.base_policy
    rng = (np.random.default_rng(policy.seed)
           if isinstance(policy, MovingBase) else None)
    q = spec.q_start
    model = None
    placements = []
    trajectories = []
    for n, goal in enumerate(goals):
        if isinstance(policy, FixedBase):
            if model is None:
                model = replace(spec.robot, base_pose=policy.base)
        elif n % policy.relocate_every == 0:
            station = _station_pose(policy, n // policy.relocate_every, rng)
            model = replace(spec.robot, base_pose=station)
        pick = (compose(model.base_pose, picks[n])
                if spec.pick_station.in_base_frame else picks[n])
        instance = TaskInstance(initial=pick, goal=goal.pose)
        guiding = transfer_constraints(spec.demo_model, instance)
        ee_goals = [compose(g, spec.grasp_offset) for g in guiding]
        traj = plan_through_guiding_poses(q, ee_goals, model,
                                          spec.planner_config)
        achieved = compose(traj.final_pose, inv_grasp)
        dist, yaw, rot, ok = evaluate_placement(achieved, instance.goal)
        reached = traj.outcome is Outcome.REACHED
        placements.append(PlacementResult(
            index=(goal.i, goal.j, goal.k), goal=instance.goal,
            achieved=achieved, position_error=dist, yaw_error=yaw,
            rotation_error=rot, success=bool(ok and reached),
            trajectory_outcome=traj.outcome, steps=len(traj.steps)))
        if keep_trajectories:
            trajectories.append(traj)
        if not reached:
            break
        q = traj.final_q
    placed = 0
    for p in placements:
        if p.trajectory_outcome is not Outcome.REACHED:
            break
        placed += 1
    pos_errs = [p.position_error for p in placements
                if p.trajectory_outcome is Outcome.REACHED]
    yaw_errs = [p.yaw_error for p in placements
                if p.trajectory_outcome is Outcome.REACHED]
    return ActivityReport(
        robot=spec.robot.name,
        layout_kind=spec.layout.kind.value,
        mode2_enabled=spec.planner_config.mode2_enabled,
        goals_total=len(goals),
        placements=tuple(placements),
        bricks_placed_before_failure=placed,
        mean_position_error=float(np.mean(pos_errs)) if pos_errs else None,
        max_yaw_error=max(yaw_errs) if yaw_errs else None,
        runtime_seconds=time.perf_counter() - t0,
        trajectories=tuple(trajectories) if keep_trajectories else None)


def compare_baseline(spec):
    """The same activity twice, with and without limit recovery.

    Seeds live in the spec, so both runs see identical stations and
    differ only in the planner's mode switching.
    """
    ours = run_activity(replace(
        spec, planner_config=replace(spec.planner_config,
                                     mode2_enabled=True)))
    baseline = run_activity(replace(
        spec, planner_config=replace(spec.planner_config,
                                     mode2_enabled=False)))
    return PairedReport(ours=ours, baseline=baseline)


# ---------------------------------------------------------------- ceiling


@dataclass(frozen=True)
class FrameGeometry:
    """A rectangular ceiling opening: pose of its center (z normal to
    the ceiling plane, x and y along the edges) and the clear extents."""

    pose: Pose
    opening_length: float
    opening_breadth: float

    def __post_init__(self):
        if self.opening_length <= 0.0 or self.opening_breadth <= 0.0:
            raise InvalidActivitySpecError("opening extents must be positive")


def _cuboid_corners(dims):
    half = np.array([dims.length, dims.breadth, dims.width]) / 2.0
    signs = np.array([[sx, sy, sz] for sx in (-1.0, 1.0)
                      for sy in (-1.0, 1.0) for sz in (-1.0, 1.0)])
    return signs * half


# corner indices differing in exactly one sign bit
_CUBOID_EDGES = tuple((i, j) for i in range(8) for j in range(i + 1, 8)
                      if bin(i ^ j).count("1") == 1)
_BOTTOM_CORNERS = (0, 2, 4, 6)


def evaluate_ceiling(tile_poses, dims, frame):
    """Geometric pass/fail for a tile carried through a ceiling opening.

    Succeeds iff at every pose whose cuboid straddles the frame plane
    the cross-section (polygon cut by the plane) lies inside the
    opening, and the final pose lies flat on the lip: tilt below the
    yaw tolerance, bottom corners within the position tolerance of the
    plane, center over the opening.  Support is scored by pose, not
    statics.
    """
    if not tile_poses:
        raise InvalidActivitySpecError("need at least one tile pose")
    inv_frame = inverse(frame.pose)
    corners = _cuboid_corners(dims)
    hl, hb = frame.opening_length / 2.0, frame.opening_breadth / 2.0
    for pose in tile_poses:
        local = compose(inv_frame, pose)
        pts = corners @ local.rotation.T + local.translation
        z = pts[:, 2]
        if z.min() >= 0.0 or z.max() <= 0.0:
            continue
        for i, j in _CUBOID_EDGES:
            zi, zj = z[i], z[j]
            if (zi > 0.0) == (zj > 0.0):
                continue
            t = zi / (zi - zj)
            cut = pts[i] + t * (pts[j] - pts[i])
            if abs(cut[0]) > hl or abs(cut[1]) > hb:
                return False
    final = compose(inv_frame, tile_poses[-1])
    tilt = math.acos(max(-1.0, min(1.0, final.rotation[2, 2])))
    if tilt > YAW_TOL:
        return False
    pts = corners @ final.rotation.T + final.translation
    if any(abs(pts[i, 2]) > POSITION_TOL for i in _BOTTOM_CORNERS):
        return False
    return abs(final.translation[0]) <= hl and abs(final.translation[1]) <= hb


# ---------------------------------------------------------------- reports


def _placement_record(p):
    return {
        "index": list(p.index),
        "goal": pose_to_record(p.goal),
        "achieved": pose_to_record(p.achieved),
        "position_error": p.position_error,
        "yaw_error": p.yaw_error,
        "rotation_error": p.rotation_error,
        "success": p.success,
        "outcome": p.trajectory_outcome.value,
        "steps": p.steps,
    }


def report_to_record(report):
    """The deterministic results section.  Timing is kept out of it so
    two runs of the same seeded spec serialize identically."""
    return {
        "robot": report.robot,
        "layout_kind": report.layout_kind,
        "mode2_enabled": report.mode2_enabled,
        "goals_total": report.goals_total,
        "bricks_placed_before_failure": report.bricks_placed_before_failure,
        "successes": sum(1 for p in report.placements if p.success),
        "mean_position_error": report.mean_position_error,
        "max_yaw_error": report.max_yaw_error,
        "placements": [_placement_record(p) for p in report.placements],
    }


def report_from_record(doc, runtime_seconds=0.0):
    try:
        placements = tuple(PlacementResult(
            index=tuple(rec["index"]),
            goal=pose_from_record(rec["goal"]),
            achieved=pose_from_record(rec["achieved"]),
            position_error=float(rec["position_error"]),
            yaw_error=float(rec["yaw_error"]),
            rotation_error=float(rec["rotation_error"]),
            success=bool(rec["success"]),
            trajectory_outcome=Outcome(rec["outcome"]),
            steps=int(rec["steps"])) for rec in doc["placements"])
        mean_pos = doc["mean_position_error"]
        max_yaw = doc["max_yaw_error"]
        return ActivityReport(
            robot=str(doc["robot"]),
            layout_kind=str(doc["layout_kind"]),
            mode2_enabled=bool(doc["mode2_enabled"]),
            goals_total=int(doc["goals_total"]),
            placements=placements,
            bricks_placed_before_failure=int(
                doc["bricks_placed_before_failure"]),
            mean_position_error=None if mean_pos is None else float(mean_pos),
            max_yaw_error=None if max_yaw is None else float(max_yaw),
            runtime_seconds=float(runtime_seconds))
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedReportError(f"bad activity report: {e}") from e


def summary_table(report):
    """Plain-text table: one header block, one row per placement."""
    def fmt_deg(rad):
        return f"{math.degrees(rad):.4f}"
    lines = [
        f"robot            {report.robot}",
        f"layout           {report.layout_kind}",
        f"limit recovery   {'on' if report.mode2_enabled else 'off'}",
        f"placed           {report.bricks_placed_before_failure}"
        f"/{report.goals_total}",
        f"successes        "
        f"{sum(1 for p in report.placements if p.success)}",
        "mean position error  " + (
            "n/a" if report.mean_position_error is None
            else f"{report.mean_position_error:.3e} m"),
        "max yaw error        " + (
            "n/a" if report.max_yaw_error is None
            else fmt_deg(report.max_yaw_error) + " deg"),
        "",
        "index    outcome                position_m  yaw_deg  ok",
    ]
    for p in report.placements:
        idx = ",".join(str(v) for v in p.index)
        lines.append(f"{idx:<8} {p.trajectory_outcome.value:<22} "
                     f"{p.position_error:<11.3e} "
                     f"{fmt_deg(p.yaw_error):<8} "
                     f"{'yes' if p.success else 'no'}")
    return "\n".join(lines) + "\n"


def _table_path(destination):
    base, _ = os.path.splitext(str(destination))
    return base + ".txt"


def emit_report(report, destination):
    """One JSON document plus a summary table beside it (.txt)."""
    doc = {
        "format": "activity_report",
        "units": {"length": "m", "angle": "rad"},
        "results": report_to_record(report),
        "timing": {"runtime_seconds": report.runtime_seconds},
    }
    with open(destination, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")
    with open(_table_path(destination), "w", encoding="utf-8") as f:
        f.write(summary_table(report))


def load_report(source):
    with open(source, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise MalformedReportError(f"not valid JSON: {e}") from e
    if doc.get("format") != "activity_report":
        raise MalformedReportError('expected format "activity_report"')
    runtime = doc.get("timing", {}).get("runtime_seconds", 0.0)
    return report_from_record(doc["results"], runtime_seconds=runtime)


def emit_paired_report(paired, destination):
    """Both runs side by side, plus a two-row comparison table."""
    doc = {
        "format": "paired_activity_report",
        "units": {"length": "m", "angle": "rad"},
        "results": {
            "ours": report_to_record(paired.ours),
            "baseline": report_to_record(paired.baseline),
        },
        "timing": {
            "ours_runtime_seconds": paired.ours.runtime_seconds,
            "baseline_runtime_seconds": paired.baseline.runtime_seconds,
        },
    }
    with open(destination, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")
    rows = ["method    placed  successes",
            f"ours      {paired.ours.bricks_placed_before_failure}"
            f"/{paired.ours.goals_total}    "
            f"{sum(1 for p in paired.ours.placements if p.success)}",
            f"baseline  {paired.baseline.bricks_placed_before_failure}"
            f"/{paired.baseline.goals_total}    "
            f"{sum(1 for p in paired.baseline.placements if p.success)}"]
    with open(_table_path(destination), "w", encoding="utf-8") as f:
        f.write("\n".join(rows) + "\n")


def load_paired_report(source):
    with open(source, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise MalformedReportError(f"not valid JSON: {e}") from e
    if doc.get("format") != "paired_activity_report":
        raise MalformedReportError(
            'expected format "paired_activity_report"')
    timing = doc.get("timing", {})
    return PairedReport(
        ours=report_from_record(
            doc["results"]["ours"],
            runtime_seconds=timing.get("ours_runtime_seconds", 0.0)),
        baseline=report_from_record(
            doc["results"]["baseline"],
            runtime_seconds=timing.get("baseline_runtime_seconds", 0.0)))


# ------------------------------------------------------------ spec files


def activity_spec_to_record(spec):
    if isinstance(spec.base_policy, FixedBase):
        policy = {"kind": "fixed",
                  "base": pose_to_record(spec.base_policy.base)}
    else:
        p = spec.base_policy
        policy = {"kind": "moving", "initial": pose_to_record(p.initial),
                  "step": pose_to_record(p.step), "seed": p.seed,
                  "relocate_every": p.relocate_every, "radius": p.radius,
                  "yaw_range": p.yaw_range,
                  "stations_per_lap": p.stations_per_lap}
    cfg = spec.planner_config
    return {
        "format": "activity_spec",
        "units": {"length": "m", "angle": "rad"},
        "robot": _robot_record(spec.robot),
        "q_start": [float(v) for v in spec.q_start],
        "layout": layout_spec_to_record(spec.layout),
        "demo_model": constraint_model_to_record(spec.demo_model),
        "pick_station": {"base": pose_to_record(spec.pick_station.base),
                         "in_base_frame": spec.pick_station.in_base_frame,
                         "restock": spec.pick_station.restock},
        "grasp_offset": pose_to_record(spec.grasp_offset),
        "base_policy": policy,
        "planner": {
            "eps_in": cfg.eps_in, "eps_out": cfg.eps_out,
            "kappa": cfg.kappa, "lam": cfg.lam, "delta_t": cfg.delta_t,
            "goal_tol": list(cfg.goal_tol), "max_steps": cfg.max_steps,
            "sew_search": list(cfg.sew_search),
            "mode2_enabled": cfg.mode2_enabled,
        },
    }


def _robot_record(robot):
    """Compact reference for the packaged arm, full description for
    anything else (renamed limits, custom twists)."""
    stock = panda_model()
    if (robot.name == stock.name
            and np.array_equal(robot.twists, stock.twists)
            and np.array_equal(robot.lower, stock.lower)
            and np.array_equal(robot.upper, stock.upper)
            and robot.sew_indices == stock.sew_indices
            and np.array_equal(robot.home_pose.rotation,
                               stock.home_pose.rotation)
            and np.array_equal(robot.home_pose.translation,
                               stock.home_pose.translation)):
        return {"name": "panda"}
    return robot_to_record(robot)


def _robot_from_record(rec):
    if "twists" in rec:
        return robot_from_record(rec)
    if "model_file" in rec:
        return load_robot_model(rec["model_file"])
    if rec.get("name") == "panda":
        return panda_model()
    raise InvalidActivitySpecError(
        f"unknown robot {rec!r}; give a model_file or the packaged name")


def activity_spec_from_record(doc):
    try:
        if doc.get("format") != "activity_spec":
            raise InvalidActivitySpecError('expected format "activity_spec"')
        units = doc["units"]
        if units["length"] != "m" or units["angle"] != "rad":
            raise InvalidActivitySpecError(f"expected units m/rad, got {units}")
        pol = doc["base_policy"]
        if pol["kind"] == "fixed":
            policy = FixedBase(base=pose_from_record(pol["base"]))
        elif pol["kind"] == "moving":
            lap = pol.get("stations_per_lap")
            policy = MovingBase(
                initial=pose_from_record(pol["initial"]),
                step=pose_from_record(pol["step"]),
                seed=int(pol["seed"]),
                relocate_every=int(pol.get("relocate_every", 3)),
                radius=float(pol.get("radius", 0.05)),
                yaw_range=float(pol.get("yaw_range", math.radians(5.0))),
                stations_per_lap=None if lap is None else int(lap))
        else:
            raise InvalidActivitySpecError(
                f"unknown base policy kind {pol.get('kind')!r}")
        planner = doc["planner"]
        cfg = PlannerConfig(
            eps_in=float(planner["eps_in"]),
            eps_out=float(planner["eps_out"]),
            kappa=float(planner["kappa"]),
            lam=float(planner["lam"]),
            delta_t=float(planner["delta_t"]),
            goal_tol=tuple(planner["goal_tol"]),
            max_steps=int(planner["max_steps"]),
            sew_search=tuple(planner["sew_search"]),
            mode2_enabled=bool(planner["mode2_enabled"]))
        return ActivitySpec(
            layout=layout_spec_from_record(doc["layout"]),
            demo_model=constraint_model_from_record(doc["demo_model"]),
            pick_station=PickStation(
                base=pose_from_record(doc["pick_station"]["base"]),
                in_base_frame=bool(
                    doc["pick_station"].get("in_base_frame", False)),
                restock=doc["pick_station"].get("restock")),
            base_policy=policy,
            robot=_robot_from_record(doc["robot"]),
            grasp_offset=pose_from_record(doc["grasp_offset"]),
            planner_config=cfg,
            q_start=np.array(doc["q_start"], dtype=float))
    except ActivityError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidActivitySpecError(f"bad activity spec: {e}") from e


def save_activity_spec(spec, path):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(activity_spec_to_record(spec), f, indent=2)
        f.write("\n")


def load_activity_spec(path):
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidActivitySpecError(f"not valid JSON: {e}") from e
    return activity_spec_from_record(doc)
