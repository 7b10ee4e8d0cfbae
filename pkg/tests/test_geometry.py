import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isosurprise.errors import NoHitError, ParseError, ValidationError
from isosurprise.geometry import (FloorPlan, Point2, cast_fan, cast_ray, contains_free_point,
                                  load_floor_plan, save_floor_plan, translate_plan)
from isosurprise.synthmaps import generate_synthetic

from conftest import regular_polygon, square


def write_json(tmp_path, doc, name="map.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


class TestLoadFloorPlan:
    def test_minimal_square(self, tmp_path):
        p = write_json(tmp_path, {"name": "sq", "boundary": square(0, 0, 10, 10),
                                  "obstacles": [], "doors": []})
        plan = load_floor_plan(p)
        assert len(plan.segments) == 4
        assert plan.name == "sq"
        assert plan.unit == "m"

    def test_bowtie_rejected(self, tmp_path):
        p = write_json(tmp_path, {"name": "bow", "boundary": [[0, 0], [10, 10], [10, 0], [0, 10]]})
        with pytest.raises(ValidationError) as exc:
            load_floor_plan(p)
        assert "boundary not simple" in exc.value.problems

    def test_every_violation_listed(self, tmp_path):
        doc = {
            "name": "bad",
            "boundary": square(0, 0, 10, 10),
            "obstacles": [square(1, 1, 2, 2), [[3, 3], [5, 5], [5, 3], [3, 5]], square(8, 8, 12, 12)],
            "doors": [[[1, 5], [20, 5]]],
        }
        with pytest.raises(ValidationError) as exc:
            load_floor_plan(write_json(tmp_path, doc))
        assert exc.value.problems == [
            "obstacle 1 not simple",
            "obstacle 2 not inside boundary",
            "door 0 endpoint outside boundary",
        ]

    @pytest.mark.parametrize("text", ["{not json", "[1, 2]", '{"boundary": [[0, 0], [1]]}',
                                      '{"boundary": [[0, 0], [1, "x"], [2, 2]]}'])
    def test_parse_errors(self, tmp_path, text):
        p = tmp_path / "m.json"
        p.write_text(text)
        with pytest.raises(ParseError):
            load_floor_plan(p)

    def test_only_meters(self, tmp_path):
        doc = {"name": "ft", "unit": "ft", "boundary": square(0, 0, 10, 10)}
        with pytest.raises(ParseError):
            load_floor_plan(write_json(tmp_path, doc))
        doc["unit"] = "m"
        assert load_floor_plan(write_json(tmp_path, doc)).unit == "m"

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError):
            FloorPlan("nan", [(0, 0), (1, 0), (float("nan"), 1)])

    def test_round_trip_alternating_doors(self, tmp_path):
        plan = generate_synthetic(kind="alternatingDoors")
        path = tmp_path / "alt.json"
        save_floor_plan(plan, path)
        again = load_floor_plan(path)
        assert again.segments == plan.segments
        assert np.array_equal(again.segment_array, plan.segment_array)

    def test_orientation_normalised(self):
        cw = FloorPlan("cw", square(0, 0, 10, 10)[::-1], [square(2, 2, 3, 3)])
        ccw = FloorPlan("ccw", square(0, 0, 10, 10), [square(2, 2, 3, 3)[::-1]])
        assert cw.boundary == ccw.boundary
        assert cw.obstacles == ccw.obstacles


class TestCastRay:
    def test_axis_aligned(self, room):
        hit = cast_ray(room, (5, 5), 0.0)
        assert hit.length == pytest.approx(5.0, abs=1e-12)
        assert hit.point == pytest.approx((10, 5), abs=1e-12)

    def test_corner_diagonal(self, room):
        hit = cast_ray(room, (5, 5), math.pi / 4)
        assert hit.length == pytest.approx(5 * math.sqrt(2), abs=1e-12)
        assert hit.point == pytest.approx((10, 10), abs=1e-12)

    def test_shared_vertex_tie_goes_to_lower_segment(self, room):
        # the corner (10, 10) closes boundary edge 1 and opens edge 2
        assert cast_ray(room, (5, 5), math.pi / 4).segment_id == 1

    def test_door_blocks(self, two_rooms_door):
        hit = cast_ray(two_rooms_door, (4.5, 2.5), 0.0)
        assert hit.length == pytest.approx(0.5, abs=1e-12)
        assert two_rooms_door.segments[hit.segment_id].kind == "door"

    def test_point_on_ray_line(self, room_with_pillar):
        hit = cast_ray(room_with_pillar, (1.3, 2.2), 0.7)
        o = np.array([1.3, 2.2])
        assert np.allclose(hit.point, o + hit.length * np.array([math.cos(0.7), math.sin(0.7)]),
                           atol=1e-9, rtol=0)

    def test_no_hit_beyond_max_range(self, room):
        with pytest.raises(NoHitError) as exc:
            cast_ray(room, (5, 5), 0.0, max_range=4.0)
        assert exc.value.angle == 0.0

    def test_origin_must_be_free(self, room_with_pillar):
        with pytest.raises(ValueError):
            cast_ray(room_with_pillar, (7, 5), 0.0)
        with pytest.raises(ValueError):
            cast_ray(room_with_pillar, (0, 5), 0.0)


class TestCastFan:
    def test_square_four_rays(self, room):
        fan = cast_fan(room, (5, 5), 4)
        assert np.allclose(fan.lengths, 5.0, atol=1e-12)
        assert np.array_equal(fan.angles, 2 * np.pi * np.arange(4) / 4)
        assert len(fan.hits) == 4

    def test_regular_64gon_bounds(self):
        plan = FloorPlan("round", regular_polygon(64, 5.0))
        fan = cast_fan(plan, (0, 0), 360)
        apothem = 5 * math.cos(math.pi / 64)
        assert fan.lengths.min() >= apothem - 1e-12
        assert fan.lengths.max() <= 5.0 + 1e-12

    @pytest.mark.parametrize("n", [2, 0, -1, 3.5])
    def test_ray_count_precondition(self, room, n):
        with pytest.raises(ValueError):
            cast_fan(room, (5, 5), n)

    def test_fan_matches_single_rays_bitwise(self, room_with_pillar):
        fan = cast_fan(room_with_pillar, (2.5, 3.1), 90)
        for h in fan.hits:
            single = cast_ray(room_with_pillar, (2.5, 3.1), h.angle)
            assert single == h

    def test_deterministic(self, room_with_pillar):
        a = cast_fan(room_with_pillar, (2.5, 3.1), 360)
        b = cast_fan(room_with_pillar, (2.5, 3.1), 360)
        assert np.array_equal(a.lengths, b.lengths)
        assert np.array_equal(a.points, b.points)
        assert np.array_equal(a.segment_ids, b.segment_ids)


class TestContainsFreePoint:
    def test_examples(self, room_with_pillar):
        assert contains_free_point(room_with_pillar, (5, 5))
        assert not contains_free_point(room_with_pillar, (-1, -1))
        assert not contains_free_point(room_with_pillar, (7, 5))

    @pytest.mark.parametrize("p", [(0, 5), (10, 10), (6, 5), (7, 4)])
    def test_edges_are_not_free(self, room_with_pillar, p):
        assert not contains_free_point(room_with_pillar, p)

    def test_door_and_wall_lines_are_not_free(self, two_rooms_door):
        assert not contains_free_point(two_rooms_door, (5, 2.5))
        assert not contains_free_point(two_rooms_door, (5, 1.0))
        assert contains_free_point(two_rooms_door, (5.01, 2.5))


# --- properties -------------------------------------------------------------

def brute_force_nearest(segments, origin, angle):
    """Independent oracle: solve each 2x2 system with numpy.linalg."""
    d = np.array([math.cos(angle), math.sin(angle)])
    best = math.inf
    for a, b in segments:
        a, b = np.asarray(a, float), np.asarray(b, float)
        m = np.column_stack([d, a - b])
        if abs(np.linalg.det(m)) < 1e-14:
            continue
        t, u = np.linalg.solve(m, a - np.asarray(origin, float))
        if t > 0 and -1e-9 <= u <= 1 + 1e-9:
            best = min(best, t)
    return best


def random_plan(rng):
    obstacles = []
    target = rng.integers(1, 6)
    while len(obstacles) < target:
        cx, cy = rng.uniform(2, 18, size=2)
        r = rng.uniform(0.3, 1.5)
        tri = [(cx + r * math.cos(t), cy + r * math.sin(t))
               for t in rng.uniform(0, 2 * math.pi) + np.array([0, 2.1, 4.2])]
        cand = obstacles + [tri]
        try:
            FloorPlan("t", square(0, 0, 20, 20), cand)
        except ValidationError:
            continue
        # keep obstacles well apart so the plan stays valid and simple
        centers = [np.mean(o, axis=0) for o in cand]
        if all(np.hypot(*(p - q)) > 3.5 for i, p in enumerate(centers) for q in centers[:i]):
            obstacles = cand
    return FloorPlan("random", square(0, 0, 20, 20), obstacles)


def random_free_point(plan, rng):
    while True:
        p = rng.uniform(0.1, 19.9, size=2)
        if contains_free_point(plan, p):
            return p


@pytest.mark.parametrize("seed", range(8))
def test_nearest_hit_against_brute_force(seed):
    rng = np.random.default_rng(seed)
    plan = random_plan(rng)
    origin = random_free_point(plan, rng)
    fan = cast_fan(plan, origin, 72)
    segs = [(s.a, s.b) for s in plan.segments]
    for h in fan.hits:
        assert h.length == pytest.approx(brute_force_nearest(segs, origin, h.angle), abs=1e-9)


def test_doors_and_walls_interchangeable_for_vision():
    door = FloorPlan("d", square(0, 0, 10, 10), doors=[((4, 2), (4, 8))])
    wall = FloorPlan("w", square(0, 0, 10, 10), walls=[((4, 2), (4, 8))])
    for origin in [(2, 5), (7, 3.3), (4.5, 9)]:
        a, b = cast_fan(door, origin, 360), cast_fan(wall, origin, 360)
        assert a.hits == b.hits


@settings(max_examples=30, deadline=None)
@given(dx=st.floats(-500, 500), dy=st.floats(-500, 500),
       ox=st.floats(0.5, 9.5), oy=st.floats(0.5, 9.5))
def test_translation_invariance(dx, dy, ox, oy):
    base = FloorPlan("p", square(0, 0, 10, 10), [square(6, 4, 8, 6)])
    if not contains_free_point(base, (ox, oy)):
        return
    moved = translate_plan(base, dx, dy)
    a = cast_fan(base, (ox, oy), 60)
    b = cast_fan(moved, (ox + dx, oy + dy), 60)
    assert np.allclose(a.lengths, b.lengths, atol=1e-9, rtol=0)
    assert np.allclose(a.points + [dx, dy], b.points, atol=1e-9, rtol=0)


def test_point2_is_plain_tuple():
    assert Point2(1.0, 2.0) == (1.0, 2.0)
