"""Command line interface.

Subcommands: ``gen-map``, ``run``, ``render``, ``fingerprint``.
Exit codes: 0 success, 2 invalid input, 3 no path, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import (EmptyDataError, EmptyGridError, NoHitError, NoPathError, ParamError,
                     ParseError, ValidationError)
from .geometry import dumps_plan, load_floor_plan
from .peaks import PeakParams, detect_peaks
from .pipeline import SERIES_HEADER, RunConfig, read_series_csv, run
from .render import RenderOptions, extract_fingerprints, render_svg
from .synthmaps import KINDS, SynthMapParams, generate_synthetic

EXIT_OK, EXIT_INVALID, EXIT_NO_PATH, EXIT_IO = 0, 2, 3, 4

_FEATURE_COLUMNS = {
    "area": "s_area", "real_surface_perimeter": "s_rsp", "occlusion": "s_occ",
    "variance": "s_var", "skewness": "s_skew", "circularity": "s_circ", "combined": "s_combined",
}


def _size(text: str) -> tuple[float, float]:
    w, _, d = text.lower().partition("x")
    return float(w), float(d or w)


def _weights(text: str) -> dict:
    out = {}
    for item in filter(None, text.split(",")):
        name, _, value = item.partition("=")
        out[name.strip()] = float(value)
    return out


def _synth_args(p: argparse.ArgumentParser):
    p.add_argument("--rooms", type=int, help="room count (odd, >= 3)")
    p.add_argument("--small", type=_size, help="small room WxD in meters")
    p.add_argument("--large", type=_size, help="large room WxD in meters")
    p.add_argument("--surprise-room", type=_size, help="surprise room WxD in meters")
    p.add_argument("--opening", type=float, help="opening width in meters")
    p.add_argument("--wall-thickness", type=float, help="interior wall thickness in meters")


def _synth_params(kind: str, args, base: dict | None = None) -> SynthMapParams:
    d = dict(base or {})
    d["kind"] = kind
    for attr, key in (("rooms", "room_count"), ("small", "small_room"), ("large", "large_room"),
                      ("surprise_room", "surprise_room"), ("opening", "opening_width"),
                      ("wall_thickness", "wall_thickness")):
        v = getattr(args, attr, None)
        if v is not None:
            d[key] = v
    return SynthMapParams(**d)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isosurprise", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-map", help="write a synthetic map as JSON")
    g.add_argument("--synthetic", required=True, metavar="KIND", help=", ".join(KINDS))
    _synth_args(g)
    g.add_argument("--out", help="output file (default: stdout)")

    r = sub.add_parser("run", help="full pipeline: route, isovists, surprise, figures")
    r.add_argument("--config", help="JSON config file; flags override it")
    src = r.add_mutually_exclusive_group()
    src.add_argument("--map", help="map JSON file")
    src.add_argument("--synthetic", metavar="KIND", help=", ".join(KINDS))
    _synth_args(r)
    r.add_argument("--route", nargs="+", metavar="MODE",
                   help="left-right | random | waypoints PATH")
    r.add_argument("--goals", type=int, help="goal count for random routes")
    r.add_argument("--seed", type=int)
    r.add_argument("--rays", type=int, help="rays per isovist (default 360)")
    r.add_argument("--step", type=float, help="step size in meters (default 1.0)")
    r.add_argument("--bins", type=int, help="bins per feature (default 10)")
    r.add_argument("--mode", choices=("dirichlet", "categorical"))
    r.add_argument("--weights", type=_weights, help="feature=weight,...")
    r.add_argument("--normalize", action="store_true", default=None,
                   help="divide each feature's surprise by its maximum before combining")
    r.add_argument("--workers", type=int, help="threads for ray casting")
    r.add_argument("--out", help="output directory")

    d = sub.add_parser("render", help="overview SVG from a map and a surprise CSV")
    d.add_argument("--map", required=True)
    d.add_argument("--series", required=True, help="surprise.csv written by 'run'")
    d.add_argument("--feature", default="combined", choices=sorted(_FEATURE_COLUMNS))
    d.add_argument("--out", required=True)

    f = sub.add_parser("fingerprint", help="fingerprint crops at surprise peaks")
    f.add_argument("--map", required=True)
    f.add_argument("--series", required=True, help="surprise.csv written by 'run'")
    f.add_argument("--feature", default="combined", choices=sorted(_FEATURE_COLUMNS))
    f.add_argument("--rays", type=int, default=360)
    f.add_argument("--crop", type=float, default=12.0, help="crop side in meters")
    f.add_argument("--sigma", type=float, default=1.5)
    f.add_argument("--min-separation", type=int, default=5)
    f.add_argument("--max-peaks", type=int, default=12)
    f.add_argument("--out", required=True, help="output directory")
    return parser


def _run_config(args) -> RunConfig:
    base = {}
    if args.config:
        base = json.loads(Path(args.config).read_text(encoding="utf-8"))
    cfg = RunConfig.from_dict(base)
    if args.map:
        cfg.map_path, cfg.synthetic = args.map, None
    synth_flags = any(getattr(args, a) is not None for a in
                      ("rooms", "small", "large", "surprise_room", "opening", "wall_thickness"))
    if args.synthetic or (synth_flags and cfg.synthetic is not None):
        kind = args.synthetic or cfg.synthetic.kind
        prior = {} if cfg.synthetic is None else dict(cfg.synthetic.__dict__)
        cfg.synthetic, cfg.map_path = _synth_params(kind, args, prior), None
    if args.route:
        cfg.route = args.route[0]
        if cfg.route == "waypoints":
            if len(args.route) != 2:
                raise ParamError("--route waypoints needs a PATH")
            cfg.waypoints = args.route[1]
        elif len(args.route) != 1:
            raise ParamError(f"unexpected arguments after --route {cfg.route}")
    for attr, key in (("goals", "goal_count"), ("seed", "seed"), ("rays", "ray_count"),
                      ("step", "step_size"), ("bins", "k"), ("mode", "mode"), ("weights", "weights"),
                      ("normalize", "normalize"), ("workers", "workers"), ("out", "out_dir")):
        v = getattr(args, attr)
        if v is not None:
            setattr(cfg, key, v)
    return cfg


def _series_from_csv(path, feature):
    header, data = read_series_csv(path)
    if tuple(header) != SERIES_HEADER:
        raise ParseError(f"{path}: unexpected header")
    col = header.index(_FEATURE_COLUMNS[feature])
    return data[:, 1:3], data[:, col]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "gen-map":
            text = dumps_plan(generate_synthetic(_synth_params(args.synthetic, args)))
            if args.out:
                Path(args.out).write_text(text, encoding="utf-8", newline="\n")
            else:
                sys.stdout.write(text)
        elif args.command == "run":
            res = run(_run_config(args))
            print(f"{res.series.steps} steps, {len(res.peaks)} peaks -> {res.out_dir}")
        elif args.command == "render":
            plan = load_floor_plan(args.map)
            samples, values = _series_from_csv(args.series, args.feature)
            Path(args.out).write_text(render_svg(plan, samples, values, RenderOptions()),
                                      encoding="utf-8", newline="\n")
        elif args.command == "fingerprint":
            plan = load_floor_plan(args.map)
            samples, values = _series_from_csv(args.series, args.feature)
            peaks = detect_peaks(values, PeakParams(args.sigma, args.min_separation, args.max_peaks))
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            prints = extract_fingerprints(plan, samples, peaks, args.crop, args.rays)
            for fp in prints:
                (out / f"{fp.label}.svg").write_text(fp.svg, encoding="utf-8", newline="\n")
            print(" ".join(f"{fp.label}:{fp.step}" for fp in prints) or "no peaks")
    except NoPathError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_PATH
    except (ValidationError, ParseError, ParamError, EmptyGridError, EmptyDataError, NoHitError,
            ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
