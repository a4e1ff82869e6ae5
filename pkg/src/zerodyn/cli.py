"""Command-line front end: roots, simulate, plot, verify.

Run configurations are JSON documents::

    {
      "model": {"kind": "polynomial_product", "C": 2.0, "n": 2,
                "gamma": 0.8, "epsilon": [1, -1], "quarter": true},
      "dispersion": "quadratic",            // optional, defaults per model
      "initial": {
        "phase":  {"q": [[re, im], ...], "p": [[re, im], ...],
                   "pairs": [[0, 1]]},      // or
        "cauchy": {"x": [...], "v": [...]}
      },
      "time": {"t0": -1.0, "t1": 2.0, "dt": 0.02},
      "window": "auto",                     // or [lo, hi]
      "frame": "native",                    // or "lab" for cone models
      "n_scan": 2048
    }

Numbers in data files carry 17 significant digits so round trips are
lossless; files are written atomically (temp file + rename).  Exit codes:
0 ok, 1 verification failure, 2 usage/config error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile

import numpy as np

from . import verify as _verify
from .cauchy import CauchyData, solve_cauchy
from .errors import ConfigError, ZerodynError
from .models import (
    MODEL_KINDS,
    default_dispersion,
)
from .phase_space import DISPERSIONS, PhasePoint
from .rootfind import RootFindOptions
from .svgplot import render_worldlines
from .tracker import snapshot_at, track


def _g17(x: float) -> str:
    return f"{float(x):.17g}"


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-zerodyn-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

def _complex_list(raw, field):
    out = []
    for item in raw:
        if isinstance(item, (int, float)):
            out.append(complex(item))
        elif isinstance(item, (list, tuple)) and len(item) == 2:
            out.append(complex(item[0], item[1]))
        else:
            raise ConfigError(f"{field}: entries must be numbers or [re, im] pairs")
    return np.array(out)


def build_model(spec: dict):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("model: need an object with a 'kind' field")
    kind = spec["kind"]
    if kind not in MODEL_KINDS:
        raise ConfigError(f"model.kind: unknown {kind!r}; one of {sorted(MODEL_KINDS)}")
    cls = MODEL_KINDS[kind]
    kwargs = {}
    if kind == "polynomial_product":
        kwargs = {"C": float(spec.get("C", 0.0)), "n": int(spec.get("n", 2))}
        if "quarter" in spec:
            kwargs["quarter"] = bool(spec["quarter"])
    elif kind in ("sinh_pair", "relativistic_pair"):
        kwargs = {"C": float(spec.get("C", 0.0))}
    elif kind in ("kdv_determinant", "sinh_gordon_determinant"):
        kwargs = {"n": int(spec.get("n", spec.get("N", 1)))}
    elif kind in ("characteristic_cm", "characteristic_rs"):
        kwargs = {"gamma": float(spec.get("gamma", 1.0))}
    return cls(**kwargs)


def build_point(config: dict, model, dispersion) -> PhasePoint:
    init = config.get("initial")
    if not isinstance(init, dict) or ("phase" in init) == ("cauchy" in init):
        raise ConfigError("initial: exactly one of 'phase' or 'cauchy' required")
    epsilon = config.get("model", {}).get("epsilon")
    if "phase" in init:
        ph = init["phase"]
        try:
            q = _complex_list(ph["q"], "initial.phase.q")
            p = _complex_list(ph["p"], "initial.phase.p")
        except KeyError as missing:
            raise ConfigError(f"initial.phase: missing field {missing}") from None
        pairs = [tuple(pr) for pr in ph.get("pairs", [])]
        return PhasePoint.paired(q, p, pairs=pairs, epsilon=epsilon)
    ca = init["cauchy"]
    try:
        data = CauchyData(ca["x"], ca["v"], float(ca.get("t_ref", 0.0)))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"initial.cauchy: {exc}") from None
    point = solve_cauchy(model, dispersion, data, epsilon=epsilon)
    return point


def load_config(path: str):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from None
    if "model" not in raw:
        raise ConfigError("config: missing 'model'")
    model = build_model(raw["model"])
    disp_name = raw.get("dispersion")
    if disp_name is not None and disp_name not in DISPERSIONS:
        raise ConfigError(f"dispersion: unknown {disp_name!r}")
    dispersion = DISPERSIONS[disp_name] if disp_name else default_dispersion(model)
    point = build_point(raw, model, dispersion)
    time = raw.get("time", {})
    t_grid = (
        float(time.get("t0", 0.0)),
        float(time.get("t1", 1.0)),
        float(time.get("dt", 0.05)),
    )
    if not t_grid[0] < t_grid[1]:
        raise ConfigError("time: need t0 < t1")
    if not t_grid[2] > 0:
        raise ConfigError("time: need dt > 0")
    window = raw.get("window", "auto")
    if window == "auto":
        window = None
    elif isinstance(window, (list, tuple)) and len(window) == 2:
        window = (float(window[0]), float(window[1]))
    else:
        raise ConfigError("window: 'auto' or [lo, hi]")
    frame = raw.get("frame", "native")
    if frame not in ("native", "lab"):
        raise ConfigError("frame: 'native' or 'lab'")
    opts = RootFindOptions(window=window, n_scan=int(raw.get("n_scan", 2048)))
    return model, point, dispersion, t_grid, frame, opts


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_roots(args) -> int:
    model, point, dispersion, t_grid, frame, opts = load_config(args.config)
    t = args.t if args.t is not None else t_grid[0]
    snap = snapshot_at(model, point, dispersion, t, opts, frame)
    entries = []
    for e in snap.entries:
        tag = "" if e.factor_id is None else f"[f{e.factor_id}]"
        star = "*" if e.near_double else ""
        entries.append(f"{_g17(e.x)}{tag}{star}")
    print(f"t={_g17(t)} M={snap.count}" + (": " + ", ".join(entries) if entries else ""))
    return 0


def cmd_simulate(args) -> int:
    model, point, dispersion, t_grid, frame, opts = load_config(args.config)
    if args.t0 is not None or args.t1 is not None or args.dt is not None:
        t_grid = (
            args.t0 if args.t0 is not None else t_grid[0],
            args.t1 if args.t1 is not None else t_grid[1],
            args.dt if args.dt is not None else t_grid[2],
        )
    if args.window is not None:
        if args.window == "auto":
            opts = RootFindOptions(window=None, n_scan=opts.n_scan)
        else:
            try:
                lo, hi = (float(v) for v in args.window.split(","))
            except ValueError:
                raise ConfigError("--window expects 'lo,hi' or 'auto'") from None
            opts = RootFindOptions(window=(lo, hi), n_scan=opts.n_scan)
    traj = track(model, point, dispersion, t_grid, opts, frame)

    os.makedirs(args.out, exist_ok=True)
    rows = ["t,line_id,factor_id,x"]
    for line in traj.lines:
        fid = "" if line.factor_id is None else str(line.factor_id)
        for t, x in zip(line.times, line.positions):
            rows.append(f"{_g17(t)},{line.id},{fid},{_g17(x)}")
    _atomic_write(os.path.join(args.out, "worldlines.csv"), "\n".join(rows) + "\n")

    events = [
        {"kind": e.kind, "t": float(e.t), "x": float(e.x), "line_ids": list(e.line_ids)}
        for e in traj.events
    ]
    _atomic_write(os.path.join(args.out, "events.json"), json.dumps(events, indent=2) + "\n")
    print(
        f"wrote {os.path.join(args.out, 'worldlines.csv')} "
        f"({len(traj.lines)} lines) and events.json ({len(events)} events)"
    )
    return 0


def _read_worldlines(path: str):
    lines = {}
    order = []
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != ["t", "line_id", "factor_id", "x"]:
                raise ConfigError(f"{path}: expected header t,line_id,factor_id,x")
            for row in reader:
                key = row["line_id"]
                if key not in lines:
                    fid = row["factor_id"]
                    lines[key] = (int(key), None if fid == "" else int(fid), [], [])
                    order.append(key)
                lines[key][2].append(float(row["t"]))
                lines[key][3].append(float(row["x"]))
    except OSError as exc:
        raise ConfigError(f"cannot read worldlines: {exc}") from None
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"{path}: malformed CSV ({exc})") from None
    return [lines[k] for k in order]


def cmd_plot(args) -> int:
    lines = _read_worldlines(args.worldlines)
    events = []
    if args.events:
        try:
            with open(args.events) as fh:
                for e in json.load(fh):
                    events.append((e["kind"], float(e["t"]), float(e["x"]), e.get("line_ids", [])))
        except OSError as exc:
            raise ConfigError(f"cannot read events: {exc}") from None
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{args.events}: malformed events file ({exc})") from None
    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, args.name)
    _atomic_write(out_path, render_worldlines(lines, events, title=args.title))
    print(f"wrote {out_path}")
    return 0


def cmd_verify(args) -> int:
    try:
        results = _verify.run_suite(args.suite)
    except KeyError as exc:
        print(exc.args[0], file=sys.stderr)
        return 2
    for r in results:
        print(r.line())
    if args.json:
        _atomic_write(args.json, _verify.report_json(results))
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="zerodyn",
        description="Track particle world lines defined by moving real zeros.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_roots = sub.add_parser("roots", help="list roots at one time")
    p_roots.add_argument("--config", required=True)
    p_roots.add_argument("--t", type=float, default=None)
    p_roots.set_defaults(fn=cmd_roots)

    p_sim = sub.add_parser("simulate", help="track world lines and events")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--t0", type=float, default=None)
    p_sim.add_argument("--t1", type=float, default=None)
    p_sim.add_argument("--dt", type=float, default=None)
    p_sim.add_argument("--window", default=None, help="'lo,hi' or 'auto'")
    p_sim.add_argument("--out", default=".")
    p_sim.set_defaults(fn=cmd_simulate)

    p_plot = sub.add_parser("plot", help="render worldlines.csv/events.json to SVG")
    p_plot.add_argument("worldlines")
    p_plot.add_argument("events", nargs="?", default=None)
    p_plot.add_argument("--out", default=".")
    p_plot.add_argument("--name", default="worldlines.svg")
    p_plot.add_argument("--title", default="")
    p_plot.set_defaults(fn=cmd_plot)

    p_ver = sub.add_parser("verify", help="run an oracle suite")
    p_ver.add_argument("--suite", default="all")
    p_ver.add_argument("--json", default=None, help="also write a JSON report here")
    p_ver.set_defaults(fn=cmd_verify)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ZerodynError as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
