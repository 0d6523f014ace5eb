"""Batch command line: scenario generation, replay, benchmarks, trace
comparison, projector pattern export, and live-session log replay.

Exit codes: 0 success, 1 configuration/validation error, 2 assertion
failure (trace mismatch).  Identical invocations print identical bytes.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys

from .engine import Engine, EngineError, EngineInputError, run_scenario
from .graycode import GrayCodeConfig, encode_patterns, frame_to_pgm
from .hand import SIGNS, HandError
from .scenario import (
    PRESETS,
    ScenarioError,
    ScenarioSpec,
    load_scenario,
    normalize_algorithm,
    scenario_to_dict,
)

_ALGORITHM_CHOICES = ("bone-static", "bone-dynamic", "silhouette-dynamic",
                      "bone_static", "bone_dynamic", "silhouette_dynamic")
_DENSITY_CHOICES = ("sparse", "medium", "dense")


class _Parser(argparse.ArgumentParser):
    # usage problems are configuration errors, not crashes
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


class CliError(Exception):
    """Configuration problem surfaced to the user; exits 1."""


def _add_override_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--algorithm", choices=_ALGORITHM_CHOICES, metavar="ALGO",
                        help="bone-static | bone-dynamic | silhouette-dynamic")
    parser.add_argument("--density", choices=_DENSITY_CHOICES)
    parser.add_argument("--size", type=int, choices=(20, 30))
    parser.add_argument("--seed", type=int)


def _apply_overrides(spec: ScenarioSpec, args: argparse.Namespace) -> ScenarioSpec:
    changes = {}
    if getattr(args, "algorithm", None) is not None:
        changes["algorithm"] = normalize_algorithm(args.algorithm)
    if getattr(args, "density", None) is not None:
        changes["density"] = args.density
    if getattr(args, "size", None) is not None:
        changes["size_mm"] = args.size
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    return dataclasses.replace(spec, **changes) if changes else spec


def _print_table(header: list[str], rows: list[list[str]]) -> None:
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) if rows
              else len(header[i]) for i in range(len(header))]
    def fmt(row):
        return "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
    print(fmt(header))
    print(fmt(["-" * w for w in widths]))
    for row in rows:
        print(fmt(row))


def _final_max_error(trace_lines: list[str]) -> float | None:
    if not trace_lines:
        return None
    rec = json.loads(trace_lines[-1])
    goals = [rec["subgoals"][j] for j in rec["assignment"]]
    return max(math.hypot(r["x"] - g[0], r["y"] - g[1])
               for r, g in zip(rec["robots"], goals))


def _num(value, digits=3) -> str:
    return "-" if value is None else f"{value:.{digits}f}"


# --- subcommands -----------------------------------------------------------------


def cmd_replay(args: argparse.Namespace) -> int:
    spec = _apply_overrides(load_scenario(args.config), args)
    if args.trace is not None:
        spec = dataclasses.replace(spec, trace_path=args.trace)
    if args.metrics is not None:
        spec = dataclasses.replace(spec, metrics_path=args.metrics)
    trace_lines, metrics = run_scenario(spec)
    m = metrics.as_dict()
    print(f"ticks {len(trace_lines)}")
    for key in ("mean_tracking_error", "max_tracking_error", "total_travel"):
        print(f"{key} {_num(m[key])}")
    print(f"time_to_fit {_num(m['time_to_fit'])}")
    print(f"collision_count {m['collision_count']}")
    print(f"reassignment_count {m['reassignment_count']}")
    if spec.trace_path:
        print(f"trace {spec.trace_path}")
    if spec.metrics_path:
        print(f"metrics {spec.metrics_path}")
    return 0


def _bench_reaching(args) -> tuple[list[str], list[list[str]]]:
    rows = []
    for sign in sorted(SIGNS):
        spec = _apply_overrides(PRESETS["reaching"](sign), args)
        lines, metrics = run_scenario(spec)
        m = metrics.as_dict()
        rows.append([sign, _num(m["time_to_fit"]), _num(_final_max_error(lines)),
                     _num(m["total_travel"], 1), str(m["collision_count"])])
    return (["sign", "time_to_fit_s", "final_max_err_mm", "travel_mm",
             "collisions"], rows)


def _bench_flip(args) -> tuple[list[str], list[list[str]]]:
    rows = []
    for algorithm in ("bone_dynamic", "bone_static"):
        flip_args = argparse.Namespace(**{**vars(args), "algorithm": None})
        spec = _apply_overrides(PRESETS["flip"](algorithm=algorithm), flip_args)
        lines, metrics = run_scenario(spec)
        m = metrics.as_dict()
        rows.append([algorithm, _num(m["total_travel"], 1),
                     str(m["reassignment_count"]), str(m["collision_count"]),
                     _num(_final_max_error(lines))])
    return (["algorithm", "travel_mm", "reassignments", "collisions",
             "final_max_err_mm"], rows)


def _bench_density(args) -> tuple[list[str], list[list[str]]]:
    rows = []
    for density in ("sparse", "medium", "dense"):
        dens_args = argparse.Namespace(**{**vars(args), "density": None})
        spec = _apply_overrides(PRESETS["density"](density), dens_args)
        _, metrics = run_scenario(spec)
        m = metrics.as_dict()
        rows.append([density, str(spec.robot_count()), str(m["collision_count"]),
                     _num(m["mean_tracking_error"]), _num(m["total_travel"], 1)])
    return (["density", "robots", "collisions", "mean_err_mm", "travel_mm"], rows)


def _bench_stationary(args) -> tuple[list[str], list[list[str]]]:
    rows = []
    for sign in sorted(SIGNS):
        spec = _apply_overrides(PRESETS["stationary"](sign), args)
        lines, metrics = run_scenario(spec)
        m = metrics.as_dict()
        rows.append([sign, _num(_final_max_error(lines)),
                     _num(m["time_to_fit"]), str(m["collision_count"])])
    return (["sign", "final_max_err_mm", "time_to_fit_s", "collisions"], rows)


_SUITES = {
    "reaching": _bench_reaching,
    "flip": _bench_flip,
    "density": _bench_density,
    "stationary": _bench_stationary,
}


def cmd_bench(args: argparse.Namespace) -> int:
    header, rows = _SUITES[args.suite](args)
    print(f"suite {args.suite}")
    _print_table(header, rows)
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    try:
        with open(args.a, "rb") as fh:
            a = fh.read()
        with open(args.b, "rb") as fh:
            b = fh.read()
    except OSError as exc:
        raise CliError(str(exc)) from None
    if a == b:
        print("identical")
        return 0
    a_lines, b_lines = a.splitlines(), b.splitlines()
    for k, (la, lb) in enumerate(zip(a_lines, b_lines), start=1):
        if la != lb:
            print(f"differ at line {k}")
            return 2
    print(f"differ in length: {len(a_lines)} vs {len(b_lines)} lines")
    return 2


def cmd_gen_scenario(args: argparse.Namespace) -> int:
    kwargs = {}
    if args.sign is not None:
        if args.preset not in ("reaching", "stationary"):
            raise CliError(f"--sign does not apply to preset {args.preset!r}")
        kwargs["sign"] = args.sign
    spec = _apply_overrides(PRESETS[args.preset](**kwargs), args)
    text = json.dumps(scenario_to_dict(spec), indent=2, sort_keys=True)
    if args.out is None:
        print(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.out}")
    return 0


def cmd_export_patterns(args: argparse.Namespace) -> int:
    try:
        cfg = GrayCodeConfig(bits_per_axis=args.bits, cell_size=args.cell)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    os.makedirs(args.out, exist_ok=True)
    names = []
    for frame in encode_patterns(cfg):
        name = f"pattern_{frame.axis}_{frame.bit_index:02d}.pgm"
        with open(os.path.join(args.out, name), "wb") as fh:
            fh.write(frame_to_pgm(frame))
        names.append(name)
    manifest = {"bits_per_axis": cfg.bits_per_axis, "cell_size": cfg.cell_size,
                "cells_per_axis": cfg.cells_per_axis, "frames": names}
    with open(os.path.join(args.out, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(names)} frames to {args.out}")
    return 0


def cmd_replay_log(args: argparse.Namespace) -> int:
    """Re-run a recorded live session from its input log, byte-exactly."""
    try:
        with open(args.session, encoding="utf-8") as fh:
            session = json.load(fh)
    except OSError as exc:
        raise CliError(str(exc)) from None
    except json.JSONDecodeError as exc:
        raise CliError(f"session file is not valid JSON: {exc}") from None
    for key in ("scenario", "ticks", "log"):
        if key not in session:
            raise CliError(f"session file missing {key!r}")

    from .scenario import scenario_from_dict
    spec = scenario_from_dict(session["scenario"])
    engine = Engine(spec)
    by_tick: dict[int, list[dict]] = {}
    for entry in session["log"]:
        by_tick.setdefault(int(entry["tick"]), []).append(entry["message"])
    for k in range(int(session["ticks"])):
        for msg in by_tick.get(k, ()):
            engine.enqueue(msg)
        engine.tick()
    trace = "".join(line + "\n" for line in engine.trace_lines)

    if args.trace is not None:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(trace)
        print(f"trace {args.trace}")
    print(f"ticks {len(engine.trace_lines)}")

    if args.expect is not None:
        try:
            with open(args.expect, "rb") as fh:
                expected = fh.read()
        except OSError as exc:
            raise CliError(str(exc)) from None
        if trace.encode("utf-8") != expected:
            print("replayed trace differs from expected")
            return 2
        print("replay matches expected trace")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .bridge import BridgeError, serve

    spec = load_scenario(args.config) if args.config is not None \
        else PRESETS["live"]()
    spec = _apply_overrides(spec, args)
    try:
        serve(spec, host=args.host, port=args.port)
    except BridgeError as exc:
        raise CliError(str(exc)) from None
    return 0


# --- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="handswarm",
                     description="Hand-steered robot swarm: replay, benchmarks, "
                                 "trace tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("replay", help="run a scenario file deterministically")
    p.add_argument("--config", required=True, help="scenario JSON path")
    p.add_argument("--trace", help="override trace output path")
    p.add_argument("--metrics", help="override metrics output path")
    _add_override_flags(p)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("bench", help="run a preset suite, print a metrics table")
    p.add_argument("--suite", required=True, choices=sorted(_SUITES))
    _add_override_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("compare", help="byte-compare two trace files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gen-scenario", help="emit a preset scenario as JSON")
    p.add_argument("--preset", required=True, choices=sorted(PRESETS))
    p.add_argument("--sign", choices=sorted(SIGNS))
    p.add_argument("--out", help="write here instead of stdout")
    _add_override_flags(p)
    p.set_defaults(func=cmd_gen_scenario)

    p = sub.add_parser("export-patterns",
                       help="write gray-code projector frames as PGM")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--bits", type=int, default=10)
    p.add_argument("--cell", type=float, default=4.0)
    p.set_defaults(func=cmd_export_patterns)

    p = sub.add_parser("replay-log",
                       help="re-run a recorded live session from its input log")
    p.add_argument("--session", required=True, help="session record JSON path")
    p.add_argument("--trace", help="write the replayed trace here")
    p.add_argument("--expect", help="compare against this trace, exit 2 on mismatch")
    p.set_defaults(func=cmd_replay_log)

    p = sub.add_parser("serve", help="run a live steering session over WebSocket")
    p.add_argument("--config", help="scenario JSON path (default: live preset)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    _add_override_flags(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ScenarioError, EngineError, EngineInputError, HandError,
            CliError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
