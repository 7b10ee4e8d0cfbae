"""End-to-end runs: map -> route -> isovists -> surprise -> peaks -> files."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ParamError
from .geometry import (DEFAULT_MAX_RANGE, FloorPlan, cast_fan, dumps_plan, free_mask,
                       load_floor_plan, load_waypoints)
from .isovist import DEFAULT_EDGE_TOLERANCE, MEASURE_NAMES, IsovistMeasures, isovist_measures
from .navigation import (DEFAULT_CELL_SIZE, Explicit, LeftToRight, RandomGoals, Trajectory,
                         make_route, rasterize, resample_path)
from .peaks import PeakParams, detect_peaks
from .render import RenderOptions, extract_fingerprints, render_svg
from .surprise import FEATURES, SurpriseConfig, SurpriseSeries, surprise_series
from .synthmaps import SynthMapParams, generate_synthetic

log = logging.getLogger(__name__)

SURPRISE_COLUMNS = ("s_area", "s_rsp", "s_occ", "s_var", "s_skew", "s_circ")
SERIES_HEADER = ("step", "x", "y", *MEASURE_NAMES, *SURPRISE_COLUMNS, "s_combined")
ROUTES = ("left-right", "random", "waypoints")


@dataclass
class RunConfig:
    """Everything that determines a run. Defaults: 360 rays, K = 10, 1 m steps."""

    map_path: str | None = None
    synthetic: SynthMapParams | None = None
    route: str = "left-right"
    waypoints: list | str | None = None
    goal_count: int = 3
    seed: int = 0
    ray_count: int = 360
    max_range: float = DEFAULT_MAX_RANGE
    step_size: float = 1.0
    k: int = 10
    mode: str = "dirichlet"
    weights: dict | None = None
    normalize: bool = False
    cell_size: float = DEFAULT_CELL_SIZE
    edge_tolerance: float = DEFAULT_EDGE_TOLERANCE
    peaks: PeakParams = field(default_factory=PeakParams)
    crop_size: float = 12.0
    out_dir: str = "out"
    workers: int = 1

    def check(self):
        if (self.map_path is None) == (self.synthetic is None):
            raise ParamError("exactly one of map_path and synthetic is required")
        if self.route not in ROUTES:
            raise ParamError(f"route must be one of {ROUTES}, got {self.route!r}")
        if self.route == "waypoints" and not self.waypoints:
            raise ParamError("waypoints route needs waypoints")
        if self.mode not in ("dirichlet", "categorical"):
            raise ParamError(f"unknown surprise mode {self.mode!r}")
        if self.ray_count < 3 or self.k < 2 or not self.step_size > 0:
            raise ParamError("need ray_count >= 3, k >= 2 and step_size > 0")
        if self.weights:
            unknown = set(self.weights) - set(FEATURES)
            if unknown:
                raise ParamError(f"weights for unknown features: {sorted(unknown)}")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        if self.synthetic is not None:
            d["synthetic"]["small_room"] = list(self.synthetic.small_room)
            d["synthetic"]["large_room"] = list(self.synthetic.large_room)
            d["synthetic"]["surprise_room"] = list(self.synthetic.surprise_room)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ParamError(f"unknown config keys: {sorted(unknown)}")
        if isinstance(d.get("synthetic"), str):
            d["synthetic"] = SynthMapParams(kind=d["synthetic"])
        elif isinstance(d.get("synthetic"), dict):
            d["synthetic"] = SynthMapParams(**d["synthetic"])
        if isinstance(d.get("peaks"), dict):
            d["peaks"] = PeakParams(**d["peaks"])
        return cls(**d)


@dataclass
class RunArtifacts:
    out_dir: Path
    files: dict
    manifest: dict
    plan: FloorPlan
    trajectory: Trajectory
    measures: list
    series: SurpriseSeries
    peaks: list


def load_plan(config: RunConfig) -> FloorPlan:
    if config.synthetic is not None:
        return generate_synthetic(config.synthetic)
    return load_floor_plan(config.map_path)


def _route_mode(config: RunConfig):
    if config.route == "left-right":
        return LeftToRight()
    if config.route == "random":
        return RandomGoals(config.seed, config.goal_count)
    wp = config.waypoints
    if isinstance(wp, (str, Path)):
        wp = load_waypoints(wp)
    return Explicit(tuple(tuple(p) for p in wp))


def _nudge_samples(plan: FloorPlan, samples: np.ndarray) -> np.ndarray:
    """Move samples that landed exactly on a segment (e.g. inside a door
    line) by a micrometre so they become valid vantage points."""
    bad = np.flatnonzero(~free_mask(plan, samples))
    if not len(bad):
        return samples
    samples = samples.copy()
    offsets = 1e-6 * np.array([[1, 0], [-1, 0], [0, 1], [0, -1], [1, 1], [-1, -1]], dtype=float)
    for i in bad:
        cand = samples[i] + offsets
        ok = np.flatnonzero(free_mask(plan, cand))
        if not len(ok):
            raise ValueError(f"trajectory sample {i} at {samples[i].tolist()} is not in free space")
        samples[i] = cand[ok[0]]
        log.debug("nudged sample %d off a segment", i)
    return samples


def compute_fans(plan, samples, ray_count, max_range, workers=1):
    def one(p):
        return cast_fan(plan, p, ray_count, max_range)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(one, samples))
    return [one(p) for p in samples]


def measures_matrix(measures, names=FEATURES) -> np.ndarray:
    return np.array([[getattr(m, n) for n in names] for m in measures], dtype=float).reshape(-1, len(names))


def _fmt(v) -> str:
    return format(float(v), ".9g")


def write_series_csv(trajectory, measures, series: SurpriseSeries | None, path) -> None:
    """One row per step with position, all measures and all surprise values."""
    samples = np.asarray(getattr(trajectory, "samples", trajectory), dtype=float).reshape(-1, 2)
    n = len(samples)
    m = np.array([m.as_tuple() if isinstance(m, IsovistMeasures) else m for m in measures],
                 dtype=float).reshape(-1, len(MEASURE_NAMES))
    steps = 0 if series is None else series.steps
    if not (len(m) == n == steps or (n == len(m) == 0 and series is None)):
        raise ValueError(f"length mismatch: {n} samples, {len(m)} measures, {steps} surprise steps")
    cols = [] if series is None else [series.per_feature[f] for f in FEATURES] + [series.combined]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_HEADER)
        for t in range(n):
            w.writerow([t, *map(_fmt, samples[t]), *map(_fmt, m[t]), *(_fmt(c[t]) for c in cols)])


def read_series_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return header, np.array(body, dtype=float).reshape(-1, len(header))


def _write_simple_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for t, row in enumerate(rows):
            w.writerow([t, *map(_fmt, row)])


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def analyse(config: RunConfig):
    """Compute everything a run produces, without touching the disk."""
    config.check()
    plan = load_plan(config)
    grid = rasterize(plan, config.cell_size)
    route = make_route(plan, _route_mode(config), grid=grid)
    traj = resample_path(route, config.step_size)
    samples = _nudge_samples(plan, traj.samples)
    traj = Trajectory(samples, traj.step_size, traj.arc_length)
    fans = compute_fans(plan, samples, config.ray_count, config.max_range, config.workers)
    measures = [isovist_measures(f, config.edge_tolerance) for f in fans]
    series = surprise_series(
        measures_matrix(measures), FEATURES,
        SurpriseConfig(k=config.k, weights=config.weights, mode=config.mode, normalize=config.normalize),
    )
    peaks = detect_peaks(series.combined, config.peaks)
    log.info("%s: %d steps, %d peaks", plan.name, series.steps, len(peaks))
    return plan, traj, fans, measures, series, peaks


def run(config: RunConfig) -> RunArtifacts:
    """Execute a full run and write its artifacts to ``config.out_dir``.

    Nothing is written until every computation has succeeded; if writing
    fails part-way, files already written are removed.
    """
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    plan, traj, fans, measures, series, peaks = analyse(config)
    overview = render_svg(plan, traj, series, RenderOptions(peaks=tuple(peaks)))
    prints = extract_fingerprints(plan, traj, peaks, config.crop_size, fans=fans)

    written: list[Path] = []

    def target(name: str) -> Path:
        p = out / name
        written.append(p)
        return p

    try:
        files = {}
        files["map"] = target("map.json")
        files["map"].write_text(dumps_plan(plan), encoding="utf-8", newline="\n")
        files["trajectory"] = target("trajectory.csv")
        _write_simple_csv(files["trajectory"], ("step", "x", "y"), traj.samples)
        files["measures"] = target("measures.csv")
        _write_simple_csv(files["measures"], ("step", *MEASURE_NAMES), [m.as_tuple() for m in measures])
        files["surprise"] = target("surprise.csv")
        write_series_csv(traj, measures, series, files["surprise"])
        files["overview"] = target("overview.svg")
        files["overview"].write_text(overview, encoding="utf-8", newline="\n")
        if prints:
            (out / "fingerprints").mkdir(exist_ok=True)
        for fp in prints:
            key = f"fingerprint_{fp.label}"
            files[key] = target(f"fingerprints/{fp.label}.svg")
            files[key].write_text(fp.svg, encoding="utf-8", newline="\n")

        echo = config.to_dict()
        echo.pop("out_dir")
        echo.pop("workers")
        manifest = {
            "version": __version__,
            "config": echo,
            "steps": series.steps,
            "peaks": peaks,
            "effective_weights": series.weights,
            "artifacts": {k: {"path": p.relative_to(out).as_posix(), "sha256": _sha256(p)}
                          for k, p in files.items()},
        }
        mpath = target("manifest.json")
        mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        fdir = out / "fingerprints"
        if fdir.is_dir() and not any(fdir.iterdir()):
            fdir.rmdir()
        raise
    files["manifest"] = mpath
    return RunArtifacts(out, files, manifest, plan, traj, measures, series, peaks)


def verify_manifest(out_dir) -> bool:
    """Re-hash every artifact listed in ``manifest.json``."""
    out = Path(out_dir)
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    return all(_sha256(out / a["path"]) == a["sha256"] for a in manifest["artifacts"].values())
