"""
Isovists from a single vantage point
====================================

Cast a fan of rays in a room with a pillar and look at the measures.
"""

from isosurprise import FloorPlan, cast_fan, isovist_measures
from isosurprise.isovist import edge_classes

# a 10 x 10 room with a 2 x 2 pillar right of centre
room = FloorPlan("pillar", [(0, 0), (10, 0), (10, 10), (0, 10)],
                 obstacles=[[(6, 4), (8, 4), (8, 6), (6, 6)]])

# from the middle of the left half, 360 rays, one per degree
fan = cast_fan(room, (2.0, 5.0), ray_count=360)
print("shortest ray %.3f m, longest %.3f m" % (fan.lengths.min(), fan.lengths.max()))

# the pillar hides part of the far wall; those edges are lines of sight
real = edge_classes(fan)
print("%d of %d polygon edges lie on walls" % (real.sum(), len(real)))

m = isovist_measures(fan)
for name, value in zip(("area", "P", "Q", "mean", "M2", "M3", "circularity"), m.as_tuple()):
    print("%-12s %10.4f" % (name, value))

# move into the pillar's shadow and the visible area shrinks
behind = isovist_measures(cast_fan(room, (9.0, 5.0)))
print("area behind the pillar: %.2f m^2 (was %.2f)" % (behind.area, m.area))
