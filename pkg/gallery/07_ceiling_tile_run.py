"""Lay-in ceiling tile: tilt through the opening, flatten, seat.

A tile wider than the opening can only pass diagonally, so the
demonstration stages it tilted below the frame, rises through, levels
out above and settles onto the lip.  The swept-volume check replays the
carried tile's poses against the frame: the real tile passes, a tile
scaled past the opening cannot.
"""

from screwplan import attached_object_poses, evaluate_ceiling, run_activity
from screwplan.scenarios import TILE, ceiling_tile_activity, oversized_tile

if __name__ == "__main__":
    spec, frame = ceiling_tile_activity()
    print(f"opening {frame.opening_length:.3f} x {frame.opening_breadth:.3f}"
          f" m, tile {TILE.length:.3f} x {TILE.breadth:.3f} m")

    report = run_activity(spec, keep_trajectories=True)
    p = report.placements[0]
    print(f"insertion: {p.trajectory_outcome.value}, position error "
          f"{p.position_error * 1000:.3f} mm")

    swept = attached_object_poses(report.trajectories[0], spec.grasp_offset)
    ok = evaluate_ceiling(swept, TILE, frame)
    print(f"swept containment and seating over {len(swept)} carried poses: "
          f"{'pass' if ok else 'fail'}")

    big = oversized_tile(frame)
    bad = evaluate_ceiling(swept, big, frame)
    print(f"oversized tile {big.length:.3f} x {big.breadth:.3f} m on the "
          f"same path: {'pass' if bad else 'fail (cannot fit the opening)'}")
