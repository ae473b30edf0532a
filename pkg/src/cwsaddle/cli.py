"""Command-line entry point: ``cwsaddle <command> [options]``.

Every command takes ``--config FILE`` (flat ``key = value``), ``--seed``,
``--out PATH`` (stdout when omitted) and repeatable ``--set key=value``;
flags are applied after the file. JSON reports embed the resolved
configuration and the package version.

Exit codes: 0 success, 1 verification failure or numerical error, 2 usage
error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class OutputError(Exception):
    pass


# ------------------------------------------------------------------ helpers

def _pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}") from exc
    return a, b


def _report(command: str, cfg: RunConfig, result) -> str:
    doc = {"command": command, "version": __version__, "config": cfg.to_dict(), "result": result}
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False, default=_jsonable) + "\n"


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"not JSON serialisable: {type(v).__name__}")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {out}: {exc.strerror or exc}") from exc


def _rows_csv(rows) -> str:
    lines = ["n,chart,x,y"]
    lines += [f"{n},{tag},{x!r},{y!r}" for n, tag, x, y in rows]
    return "\n".join(lines) + "\n"


def _orbit_output(args, cfg, command, rows) -> str:
    rows = [(int(n), str(t), float(x), float(y)) for n, t, x, y in rows]
    if args.format == "csv":
        return _rows_csv(rows)
    return _report(command, cfg, {"rows": [{"n": n, "chart": t, "x": x, "y": y} for n, t, x, y in rows]})


def _load_config(args) -> RunConfig:
    if args.config:
        try:
            cfg = RunConfig.from_file(args.config)
        except OSError as exc:
            raise OutputError(f"cannot read {args.config}: {exc.strerror or exc}") from exc
    else:
        cfg = RunConfig()
    over = {}
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        over[k.strip()] = v.strip()
    if args.seed is not None:
        over["seed"] = args.seed
    return cfg.with_overrides(over) if over else cfg


# ----------------------------------------------------------------- commands

def cmd_verify(args, cfg):
    from .verify import SUITES, run_suites

    modules = args.modules.split(",") if args.modules else list(SUITES)
    try:
        checks = run_suites(modules, cfg)
    except KeyError as exc:
        raise UsageError(f"unknown module(s): {exc.args[0]}; known: {', '.join(SUITES)}") from exc
    passed = all(c.passed for c in checks)
    res = {"modules": modules, "passed": passed, "checks": [c.to_dict() for c in checks]}
    return _report("verify", cfg, res), EXIT_OK if passed else EXIT_FAIL


def cmd_rho(args, cfg):
    from .eset import e_membership, rho

    d, w = rho(args.point)
    res = {"point": list(args.point), "rho": d, "witness": list(w), "in_e": e_membership(args.point)}
    return _report("rho", cfg, res), EXIT_OK


def cmd_orbit(args, cfg):
    from .saddle import saddle_step

    if args.n < 0:
        raise UsageError("n must be >= 0")
    p = args.point
    rows = [(0, "plane", *p)]
    for k in range(1, args.n + 1):
        p = saddle_step(p, args.direction, cfg.integrator())
        rows.append((k, "plane", *p))
    return _orbit_output(args, cfg, "orbit", rows), EXIT_OK


def cmd_verdict_grid(args, cfg):
    from .saddle import verdict_grid

    g = verdict_grid(args.resolution, args.max_iter, cfg=cfg.integrator())
    und = g.tags == 2
    res = {"resolution": args.resolution, "max_iter": args.max_iter, "counts": g.counts(),
           "undecided_max_rho": float(g.rho[und].max()) if und.any() else 0.0,
           "escape_n_max": int(g.iterations[g.tags == 1].max()) if (g.tags == 1).any() else 0}
    return _report("verdict-grid", cfg, res), EXIT_OK


def cmd_da_orbit(args, cfg):
    from .torus_da import anomalous_da_step, da_step

    if args.n < 0:
        raise UsageError("n must be >= 0")
    da, ins = cfg.da(), cfg.insertion()
    p = tuple(np.mod(args.point, 1.0))
    rows = [(0, "torus", *p)]
    for k in range(1, args.n + 1):
        p = anomalous_da_step(p, args.direction, da, ins) if args.anomalous else da_step(p, args.direction, da)
        rows.append((k, "torus", p.x, p.y))
    return _orbit_output(args, cfg, "da-orbit", rows), EXIT_OK


def cmd_surface_orbit(args, cfg):
    from .surface import Side, SurfacePoint, canonicalize, from_chart, glued_step
    from .torus_da import TorusPoint

    if args.n < 0:
        raise UsageError("n must be >= 0")
    surf = cfg.surface()
    if args.chart:
        sp = from_chart(args.side, args.point, surf)
    else:
        sp = SurfacePoint(Side(args.side), TorusPoint(*args.point))
    sp = canonicalize(sp, surf)
    rows = [(0, sp.side.name, sp.point.x, sp.point.y)]
    for k in range(1, args.n + 1):
        sp = glued_step(sp, args.map, args.direction, surf)
        rows.append((k, sp.side.name, sp.point.x, sp.point.y))
    return _orbit_output(args, cfg, "surface-orbit", rows), EXIT_OK


def _system(cfg, name):
    from .lab import System

    if name == "plane":
        return System("plane", "f", cfg.surface(), cfg.integrator())
    return System("surface", name, cfg.surface(), cfg.integrator())


def cmd_track(args, cfg):
    from .lab import ContinuumSample, track_continuum

    sysm = _system(cfg, args.map)
    frame = "plane" if args.map == "plane" else args.frame
    C = ContinuumSample.segment(args.start, args.end, 0.25 * cfg.eta, frame, args.side, args.pieces)
    rep = track_continuum(sysm, C, cfg.n_back, cfg.n_fwd, cfg.vertex_budget)
    res = {"map": args.map, "start": list(args.start), "end": list(args.end), "frame": frame,
           "side": args.side, "report": rep.to_dict()}
    return _report("track", cfg, res), EXIT_OK


def cmd_falsify(args, cfg):
    from .lab import falsify_cwe

    cands = falsify_cwe(_system(cfg, args.map), cfg.eta, cfg.trials, cfg.seed,
                        (cfg.n_back, cfg.n_fwd), cfg.vertex_budget)
    res = {"map": args.map, "eta": cfg.eta, "trials": cfg.trials, "candidate_count": len(cands),
           "candidates": [c.to_dict() for c in cands]}
    return _report("falsify", cfg, res), EXIT_OK


def cmd_gamma(args, cfg):
    from .lab import gamma_sample

    rep = gamma_sample(_system(cfg, args.map), args.center, cfg.eta, cfg.horizon,
                       cfg.grid_resolution, args.side, args.frame)
    res = {"map": args.map, "side": args.side, "frame": args.frame, "report": rep.to_dict()}
    return _report("gamma", cfg, res), EXIT_OK


def cmd_render(args, cfg):
    from . import render

    name = args.figure
    if name == "E":
        return render.render_e(cfg.e_generations, cfg.e_indices), EXIT_OK
    if name == "T-action":
        return render.render_t_action(), EXIT_OK
    if name == "foliation":
        return render.render_foliation(), EXIT_OK
    if name == "stable-partition":
        from .lab import stable_partition_sample

        smp = stable_partition_sample(_system(cfg, "f"), args.resolution, args.horizon)
        return render.render_stable_partition(smp), EXIT_OK
    from .saddle import orbit

    pts = orbit(args.point, args.n, cfg.integrator())
    return render.render_orbit(pts), EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--seed", type=int, help="overrides the config seed")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="config override")

    p = argparse.ArgumentParser(prog="cwsaddle", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"cwsaddle {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify", parents=[common], help="run invariant suites")
    s.add_argument("--modules", help="comma-separated suite names (default: all)")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("rho", parents=[common], help="distance to E")
    s.add_argument("--point", type=_pair, required=True)
    s.set_defaults(fn=cmd_rho)

    def orbit_args(s, point=None):
        s.add_argument("--point", type=_pair, required=point is None, default=point)
        s.add_argument("--n", type=int, default=20)
        s.add_argument("--direction", choices=("forward", "inverse"), default="forward")
        s.add_argument("--format", choices=("csv", "json"), default="csv")

    s = sub.add_parser("orbit", parents=[common], help="plane-saddle orbit")
    orbit_args(s)
    s.set_defaults(fn=cmd_orbit)

    s = sub.add_parser("verdict-grid", parents=[common], help="stable-set verdicts on a grid")
    s.add_argument("--resolution", type=int, default=100)
    s.add_argument("--max-iter", type=int, default=200)
    s.set_defaults(fn=cmd_verdict_grid)

    s = sub.add_parser("da-orbit", parents=[common], help="torus DA orbit")
    orbit_args(s)
    s.add_argument("--anomalous", action="store_true", help="use the map with the inserted saddle")
    s.set_defaults(fn=cmd_da_orbit)

    s = sub.add_parser("surface-orbit", parents=[common], help="orbit on the genus-two surface")
    orbit_args(s)
    s.add_argument("--side", type=int, choices=(1, 2), default=2)
    s.add_argument("--map", choices=("f", "g"), default="f")
    s.add_argument("--chart", action="store_true", help="--point is in chart coordinates")
    s.set_defaults(fn=cmd_surface_orbit)

    s = sub.add_parser("track", parents=[common], help="track a segment continuum")
    s.add_argument("--map", choices=("f", "g", "plane"), default="f")
    s.add_argument("--start", type=_pair, required=True)
    s.add_argument("--end", type=_pair, required=True)
    s.add_argument("--frame", choices=("chart", "torus"), default="chart")
    s.add_argument("--side", type=int, choices=(1, 2), default=1)
    s.add_argument("--pieces", type=int, default=4)
    s.set_defaults(fn=cmd_track)

    s = sub.add_parser("falsify", parents=[common], help="search for eta-small continua")
    s.add_argument("--map", choices=("f", "g"), default="f")
    s.set_defaults(fn=cmd_falsify)

    s = sub.add_parser("gamma", parents=[common], help="sample Gamma_eta(center)")
    s.add_argument("--map", choices=("f", "g", "plane"), default="f")
    s.add_argument("--center", type=_pair, required=True)
    s.add_argument("--side", type=int, choices=(1, 2), default=1)
    s.add_argument("--frame", choices=("torus", "chart"), default="torus")
    s.set_defaults(fn=cmd_gamma)

    s = sub.add_parser("render", parents=[common], help="SVG figure")
    s.add_argument("--figure", choices=("E", "T-action", "foliation", "stable-partition", "orbit"),
                   required=True)
    s.add_argument("--point", type=_pair, default=(0.9, 0.2), help="orbit start")
    s.add_argument("--n", type=int, default=20, help="orbit steps")
    s.add_argument("--resolution", type=int, default=60, help="stable-partition grid")
    s.add_argument("--horizon", type=int, default=12, help="stable-partition horizon")
    s.set_defaults(fn=cmd_render)
    return p


def main(argv=None) -> int:
    from .flow import IntegrationBudgetError
    from .plmap import PLMapError
    from .surface import SurfaceError
    from .torus_da import DAError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help/--version, 2 for usage
        return int(exc.code or 0)
    try:
        cfg = _load_config(args)
        text, status = args.fn(args, cfg)
        _emit(text, args.out)
        return status
    except OutputError as exc:
        print(f"cwsaddle: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ConfigError, ValueError) as exc:
        print(f"cwsaddle {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PLMapError, DAError, SurfaceError, IntegrationBudgetError) as exc:
        print(f"cwsaddle {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
