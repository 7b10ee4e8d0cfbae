"""
Walking through the synthetic maps
==================================

Generate the room chains, plan routes over the navigation grid and
resample them at a fixed step.
"""

from isosurprise import (KINDS, LeftToRight, RandomGoals, generate_synthetic, make_route,
                         rasterize, resample_path)

for kind in KINDS:
    plan = generate_synthetic(kind=kind)
    print("%-26s %2d doors  free area %6.1f m^2" % (plan.name, len(plan.doors), plan.free_area()))

# doors block sight but not movement, so the grid stays connected
plan = generate_synthetic(kind="alternatingSurpriseDoors")
grid = rasterize(plan, cell_size=0.25)
print("grid %d x %d, %d free cells" % (grid.height, grid.width, grid.free.sum()))

# left to right: leftmost free column to rightmost, 1 m steps
traj = resample_path(make_route(plan, LeftToRight(), grid=grid), 1.0)
print("left-to-right: %d samples, %.1f m" % (len(traj), traj.arc_length[-1]))

# a seeded tour through random goal cells is reproducible
a = make_route(plan, RandomGoals(seed=42, goal_count=4), grid=grid)
b = make_route(plan, RandomGoals(seed=42, goal_count=4), grid=grid)
print("random tour: %d vertices, repeatable: %s" % (len(a), (a == b).all()))
