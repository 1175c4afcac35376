"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 numerical failure (a
manifest listing the failed points is written), 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .config import OUT_DIR_ENV, config_hash, parse_config
from .errors import ConfigError, ParseError, SensorPhononError
from .output import emit_data, render_svg
from .presets import PRESETS, run_preset
from .spectra import single_photon_spectrum, two_photon_spectrum

log = logging.getLogger("sensorphonon")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3


def _write_manifest(out_dir, doc):
    path = Path(out_dir) / "manifest.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _load(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config(text)


def cmd_validate(args):
    cfg = _load(args.config)
    cfg.emitter_params()
    cfg.bath_params()
    print(f"ok: {len(cfg.sensors)} sensor(s), mode {cfg.mode.value}, hash {config_hash(cfg)[:12]}")
    return EXIT_OK


def cmd_run(args):
    cfg = _load(args.config)
    out = Path(args.out or cfg.output_dir())
    workers = args.workers or cfg.worker_count()
    fmt = args.format or cfg.output.format
    digest = config_hash(cfg)
    emitter, sensors, bath = cfg.emitter_params(), cfg.sensor_params(), cfg.bath_params()
    kernel = cfg.kernel()
    if len(sensors) == 1:
        res = single_photon_spectrum(
            emitter, sensors[0], bath, cfg.mode, cfg.sweep.axis1.values(), kernel=kernel, workers=workers
        )
    else:
        res = two_photon_spectrum(
            emitter,
            sensors,
            bath,
            cfg.mode,
            cfg.sweep.axis1.values(),
            cfg.sweep.axis2.values(),
            kernel=kernel,
            workers=workers,
        )
    stem = Path(args.config).stem
    files = [emit_data(res, fmt, out / f"{stem}.{fmt}", digest)]
    if args.svg or cfg.output.svg:
        files.append(render_svg(res, out / f"{stem}.svg", title=stem, config_hash=digest))
    manifest = {
        "engine_version": __version__,
        "config_hash": digest,
        "files": [p.name for p in files],
        "failed_points": list(res.failed),
    }
    _write_manifest(out, manifest)
    for p in files:
        print(p)
    return EXIT_NUMERICAL if res.failed else EXIT_OK


def cmd_preset(args):
    out = Path(args.out or os.environ.get(OUT_DIR_ENV, "") or ".")
    workers = args.workers or (os.cpu_count() or 1)
    outcome = run_preset(
        args.name, out, workers=workers, fmt=args.format or "csv", svg=args.svg, points=args.points
    )
    manifest = {
        "engine_version": __version__,
        "preset": args.name,
        "config_hash": outcome.summary.get("config_hash", ""),
        "files": [Path(p).name for p in outcome.files],
        "failed_points": outcome.failed_points,
        "summary": outcome.summary,
    }
    _write_manifest(out, manifest)
    for p in outcome.files:
        print(p)
    return EXIT_NUMERICAL if outcome.failed_points else EXIT_OK


def cmd_version(args):
    print(__version__)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="sensorphonon", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log applied defaults and progress")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a sweep described by a TOML config")
    r.add_argument("config")
    r.add_argument("--out", help=f"output directory (default: config, ${OUT_DIR_ENV}, or .)")
    r.add_argument("--workers", type=int)
    r.add_argument("--format", choices=["csv", "json"])
    r.add_argument("--svg", action="store_true")
    r.set_defaults(func=cmd_run)

    pr = sub.add_parser("preset", help="reproduce a figure preset")
    pr.add_argument("name", choices=PRESETS)
    pr.add_argument("--out")
    pr.add_argument("--workers", type=int)
    pr.add_argument("--format", choices=["csv", "json"])
    pr.add_argument("--svg", action="store_true")
    pr.add_argument("--points", type=int, help="override the number of points on every axis")
    pr.set_defaults(func=cmd_preset)

    v = sub.add_parser("validate", help="check a config without running it")
    v.add_argument("config")
    v.set_defaults(func=cmd_validate)

    ver = sub.add_parser("version", help="print the engine version")
    ver.set_defaults(func=cmd_version)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ParseError as exc:
        where = f" (line {exc.line}, column {exc.column})" if exc.line else ""
        print(f"config parse error{where}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SensorPhononError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
