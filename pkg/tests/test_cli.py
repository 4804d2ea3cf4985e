"""File-to-file checks of every subcommand, including exit codes."""

import json
import math
from dataclasses import replace
from importlib import resources

import numpy as np
import pytest

from screwplan.activity import (load_paired_report, load_report,
                                save_activity_spec)
from screwplan.cli import main
from screwplan.demonstration import (load_segments, save_demonstration,
                                     segment_demonstration)
from screwplan.kinematics import PANDA_READY, forward_kinematics, panda_model
from screwplan.layouts import layout_goals, load_goal_sequence, save_layout_spec
from screwplan.planner import load_trajectory, Outcome, PlannerConfig
from screwplan.screws import (compose, pose_error, pose_to_record,
                              save_pose_sequence, Pose)
from screwplan import scenarios as sc


def panda_file():
    ref = resources.files("screwplan.data").joinpath("panda_arm.json")
    with resources.as_file(ref) as path:
        return str(path)


def test_segment_subcommand(tmp_path):
    demo = sc.pick_place_demo(sc.DEMO_PICK, sc.DEMO_PLACE)
    demo_file = tmp_path / "demo.jsonl"
    out = tmp_path / "segments.json"
    save_demonstration(demo, demo_file)
    assert main(["segment", "--demo", str(demo_file),
                 "--rot-tol", "0.02", "--trans-tol", "0.005",
                 "--out", str(out)]) == 0
    got = load_segments(out)
    want = segment_demonstration(demo)
    assert len(got) == len(want) == 3
    for a, b in zip(got, want):
        assert (a.start_index, a.end_index) == (b.start_index, b.end_index)
        rot, trans = pose_error(a.end_pose, b.end_pose)
        assert rot < 1e-12 and trans < 1e-12


def test_segment_tolerance_flags_change_the_result(tmp_path):
    rng = np.random.default_rng(3)
    demo = sc.pick_place_demo(sc.DEMO_PICK, sc.DEMO_PLACE,
                              noise=(0.004, 0.01), rng=rng)
    demo_file = tmp_path / "demo.jsonl"
    save_demonstration(demo, demo_file)
    fine, coarse = tmp_path / "fine.json", tmp_path / "coarse.json"
    assert main(["segment", "--demo", str(demo_file), "--rot-tol", "0.02",
                 "--trans-tol", "0.012", "--out", str(coarse)]) == 0
    assert main(["segment", "--demo", str(demo_file), "--rot-tol", "0.002",
                 "--trans-tol", "0.0012", "--out", str(fine)]) == 0
    assert len(load_segments(fine)) > len(load_segments(coarse))


def test_layout_subcommand(tmp_path):
    spec = sc.brick_wall_activity().layout
    spec_file, out = tmp_path / "wall.json", tmp_path / "goals.json"
    save_layout_spec(spec, spec_file)
    assert main(["layout", "--spec", str(spec_file),
                 "--out", str(out)]) == 0
    got = load_goal_sequence(out)
    want = layout_goals(spec)
    assert [(g.i, g.j, g.k) for g in got] == [(g.i, g.j, g.k) for g in want]
    for a, b in zip(got, want):
        rot, trans = pose_error(a.pose, b.pose)
        assert rot < 1e-12 and trans < 1e-12


def test_plan_subcommand_reaches(tmp_path):
    start = forward_kinematics(panda_model(), PANDA_READY)
    goal = Pose(start.rotation, start.translation + [0.0, 0.12, -0.05])
    guiding_file, out = tmp_path / "guiding.json", tmp_path / "traj.jsonl"
    save_pose_sequence([goal], guiding_file)
    q0 = [str(v) for v in PANDA_READY]
    assert main(["plan", "--robot", panda_file(),
                 "--guiding", str(guiding_file), "--q0", *q0,
                 "--out", str(out)]) == 0
    traj = load_trajectory(out)
    assert traj.outcome is Outcome.REACHED
    rot, trans = pose_error(traj.final_pose, goal)
    assert rot < math.radians(0.05) and trans < 1e-4


def test_plan_no_mode2_fails_on_pinched_joint(tmp_path):
    """The baseline flag must reach the planner: a sweep that recovery
    completes jams without it."""
    _, spec = sc.near_limit_scenarios()[0]
    robot_file = tmp_path / "pinched.json"
    doc = {
        "name": "pinched", "units": {"length": "m", "angle": "rad"},
        "twists": spec.robot.twists.tolist(),
        "home_pose": pose_to_record(spec.robot.home_pose),
        "joint_limits": {"lower": spec.robot.lower.tolist(),
                         "upper": spec.robot.upper.tolist()},
        "sew_indices": list(spec.robot.sew_indices),
    }
    robot_file.write_text(json.dumps(doc))

    turn = Pose(sc._rot_z(0.5), np.zeros(3))
    goal = compose(turn, forward_kinematics(panda_model(), PANDA_READY))
    guiding_file = tmp_path / "guiding.json"
    save_pose_sequence([goal], guiding_file)
    q0 = [str(v) for v in PANDA_READY]
    out_base = tmp_path / "base.jsonl"
    out_ours = tmp_path / "ours.jsonl"
    assert main(["plan", "--robot", str(robot_file),
                 "--guiding", str(guiding_file), "--q0", *q0,
                 "--no-mode2", "--out", str(out_base)]) == 1
    assert load_trajectory(out_base).outcome is Outcome.MOTION_PLAN_FAILED
    assert main(["plan", "--robot", str(robot_file),
                 "--guiding", str(guiding_file), "--q0", *q0,
                 "--out", str(out_ours)]) == 0


def one_brick_spec():
    spec = sc.brick_wall_activity(layers=1, per_layer=1)
    return replace(spec, planner_config=PlannerConfig(
        goal_tol=(math.radians(0.01), 2e-5)))


def test_run_activity_subcommand(tmp_path, capsys):
    spec_file = tmp_path / "activity.json"
    out = tmp_path / "report.json"
    save_activity_spec(one_brick_spec(), spec_file)
    assert main(["run-activity", "--spec", str(spec_file),
                 "--out", str(out)]) == 0
    report = load_report(out)
    assert report.bricks_placed_before_failure == 1
    assert (tmp_path / "report.txt").exists()
    assert "placed" in capsys.readouterr().out


def test_run_activity_exit_one_on_failure(tmp_path):
    spec = replace(one_brick_spec(),
                   planner_config=PlannerConfig(max_steps=60))
    spec_file, out = tmp_path / "activity.json", tmp_path / "report.json"
    save_activity_spec(spec, spec_file)
    assert main(["run-activity", "--spec", str(spec_file),
                 "--out", str(out)]) == 1
    report = load_report(out)
    assert report.bricks_placed_before_failure == 0


def test_compare_baseline_subcommand(tmp_path):
    _, spec = sc.near_limit_scenarios()[0]
    spec_file, out = tmp_path / "activity.json", tmp_path / "paired.json"
    save_activity_spec(spec, spec_file)
    assert main(["compare-baseline", "--spec", str(spec_file),
                 "--out", str(out)]) == 0
    paired = load_paired_report(out)
    assert paired.ours.bricks_placed_before_failure == 1
    assert paired.baseline.bricks_placed_before_failure == 0


def test_bad_inputs_exit_two(tmp_path):
    missing = str(tmp_path / "nope.json")
    out = str(tmp_path / "out.json")
    assert main(["segment", "--demo", missing, "--out", out]) == 2
    assert main(["layout", "--spec", missing, "--out", out]) == 2
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert main(["run-activity", "--spec", str(junk), "--out", out]) == 2


def test_q0_must_have_seven_values():
    with pytest.raises(SystemExit):
        main(["plan", "--robot", "r.json", "--guiding", "g.json",
              "--q0", "0.0", "0.1", "--out", "t.jsonl"])
