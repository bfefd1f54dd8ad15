"""Command-line front end for the safe acceleration library.

Subcommands:
  range    one-off safe range for a state, JSON on stdout
  map      map a normalized action into a range
  step     integrate one interval exactly
  rollout  policy rollout, CSV on stdout or to a file
  fuzz     seeded-random episode battery, JSON summary
  compare  exact bounds vs the continuous-time reference, CSV + JSON
  bench    wall-time statistics for the range computation

Exit codes: 0 success; 1 malformed configuration or arguments; 2
inadmissible or infeasible state; 3 a rollout or fuzz campaign detected a
limit violation (which the exact bounds must never produce).

Configuration JSON: ``{"joints": [{"limits": {"p": [lo, hi], "v":
[lo, hi], "a": [lo, hi], "j": [lo, hi]}, "f_N": number}, ...]}``.
Commands operate on one joint at a time (``--joint``, default 0). Output
is deterministic given flags and seeds: CSV uses LF line endings, a fixed
header and shortest round-trip float formatting, so repeated runs are
byte-identical.
"""

from __future__ import annotations

import argparse
import json
import random
import statistics
import sys
import time
from importlib import resources

from .baseline import compare_rollout
from .core import (
    DecisionGrid,
    InadmissibleStateError,
    InfeasibleStateError,
    JointState,
    KinematicLimits,
    check_limits,
    integrate_interval,
    map_action,
)
from .saferange import safe_acceleration_range
from .tasks import fuzz as run_fuzz
from .tasks import make_policy, rollout

CSV_HEADER = "t,p,v,a,j,range_lo,range_hi,action"


class ConfigError(Exception):
    """Configuration file malformed or inconsistent."""


def _limits_from_entry(entry: dict) -> tuple[KinematicLimits, float]:
    if not isinstance(entry, dict) or "limits" not in entry:
        raise ConfigError("each joint needs a 'limits' object")
    lims = entry["limits"]
    pairs = {}
    for key in ("p", "v", "a", "j"):
        pair = lims.get(key) if isinstance(lims, dict) else None
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(x, (int, float)) for x in pair)):
            raise ConfigError(f"limits.{key} must be [lo, hi]")
        pairs[key] = (float(pair[0]), float(pair[1]))
    f_N = entry.get("f_N")
    if not isinstance(f_N, (int, float)) or f_N <= 0:
        raise ConfigError("f_N must be a positive number")
    try:
        L = KinematicLimits(
            p_min=pairs["p"][0], p_max=pairs["p"][1],
            v_min=pairs["v"][0], v_max=pairs["v"][1],
            a_min=pairs["a"][0], a_max=pairs["a"][1],
            j_min=pairs["j"][0], j_max=pairs["j"][1],
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e
    return L, float(f_N)


def load_config(path: str | None) -> list[tuple[KinematicLimits, float]]:
    """Parse a config file (or the packaged default) into per-joint limits."""
    if path is None:
        text = (resources.files("safe_accel") / "data"
                / "default_config.json").read_text()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e}") from e
    joints = doc.get("joints") if isinstance(doc, dict) else None
    if not isinstance(joints, list) or not joints:
        raise ConfigError("config needs a nonempty 'joints' array")
    return [_limits_from_entry(entry) for entry in joints]


def _select_joint(args) -> tuple[KinematicLimits, DecisionGrid]:
    joints = load_config(args.config)
    if not 0 <= args.joint < len(joints):
        raise ConfigError(f"joint index {args.joint} out of range "
                          f"(config has {len(joints)})")
    L, f_N = joints[args.joint]
    freq = args.freq if getattr(args, "freq", None) else f_N
    return L, DecisionGrid(freq)


def _parse_state(text: str) -> JointState:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError("state must be 'p,v,a'")
    try:
        return JointState(*(float(x) for x in parts))
    except ValueError as e:
        raise ConfigError(f"bad state: {e}") from e


def _emit_json(payload) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")


def _rollout_rows(traj) -> list[str]:
    T = traj.grid.T
    rows = []
    for i, a1 in enumerate(traj.setpoints):
        s = traj.states[i]
        j = (a1 - s.a) / T
        r = traj.ranges[i]
        rows.append(",".join(map(repr, (
            i * T, s.p, s.v, s.a, j, r.lo, r.hi, traj.actions[i]))))
    return rows


def _write_lines(path: str | None, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _cmd_range(args) -> int:
    L, grid = _select_joint(args)
    r = safe_acceleration_range(_parse_state(args.state), L, grid)
    _emit_json({"lo": r.lo, "hi": r.hi})
    return 0


def _cmd_map(args) -> int:
    from .core import AccelerationRange
    try:
        rng = AccelerationRange(args.lo, args.hi)
        setpoint = map_action(rng, args.action)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    _emit_json({"setpoint": setpoint})
    return 0


def _cmd_step(args) -> int:
    L, grid = _select_joint(args)
    del L
    s = integrate_interval(_parse_state(args.state), args.setpoint, grid.T)
    _emit_json({"a": s.a, "p": s.p, "v": s.v})
    return 0


def _cmd_rollout(args) -> int:
    L, grid = _select_joint(args)
    policy = make_policy(args.policy, L, seed=args.seed)
    s0 = _parse_state(args.state) if args.state else JointState(0.0, 0.0, 0.0)
    traj = rollout(policy, s0, L, grid, args.duration)
    _write_lines(args.out, [CSV_HEADER] + _rollout_rows(traj))
    report = check_limits(traj, L)
    if not report.ok:
        print(f"limit violations detected: {report.total_violations}",
              file=sys.stderr)
        return 3
    return 0


def _cmd_fuzz(args) -> int:
    L, grid = _select_joint(args)
    summary = run_fuzz(args.episodes, L, grid, seed=args.seed,
                       duration=args.duration)
    _emit_json(summary.as_dict())
    return 3 if summary.violations else 0


def _cmd_compare(args) -> int:
    L, grid = _select_joint(args)
    del grid
    try:
        freqs = [float(x) for x in args.freqs.split(",") if x]
    except ValueError as e:
        raise ConfigError(f"bad --freqs: {e}") from e
    if not freqs:
        raise ConfigError("need at least one frequency")
    s0 = (_parse_state(args.state) if args.state
          else JointState(L.p_min, 0.0, 0.0))
    results = compare_rollout(s0, L, freqs, duration=args.duration)
    summary = []
    for mc in results:
        if args.out:
            lines = [CSV_HEADER + ",method"]
            lines += [row + ",ours" for row in _rollout_rows(mc.ours)]
            T = mc.baseline.grid.T
            for i, a1 in enumerate(mc.baseline.setpoints):
                s = mc.baseline.states[i]
                j = (a1 - s.a) / T
                lines.append(",".join(map(repr, (i * T, s.p, s.v, s.a, j)))
                             + ",,,baseline")
            _write_lines(f"{args.out}_f{mc.f_N:g}.csv", lines)
        summary.append({
            "f_N": mc.f_N,
            "ours_terminal_p": mc.ours.states[-1].p,
            "baseline_terminal_p": mc.baseline.states[-1].p,
            "ours_max_norm_position": mc.ours_report.position.worst,
            "baseline_max_norm_position": mc.baseline_report.position.worst,
            "ours_ok": mc.ours_report.ok,
            "baseline_ok": mc.baseline_report.ok,
        })
    _emit_json(summary)
    return 0 if all(entry["ours_ok"] for entry in summary) else 3


def _cmd_bench(args) -> int:
    L, grid = _select_joint(args)
    if args.iters < 1:
        raise ConfigError("need at least one iteration")
    rng = random.Random(args.seed)
    states = []
    s = JointState(0.0, 0.0, 0.0)
    for _ in range(64):
        r = safe_acceleration_range(s, L, grid)
        s = integrate_interval(s, map_action(r, rng.uniform(-1.0, 1.0)),
                               grid.T)
        states.append(s)
    times = []
    for i in range(args.iters):
        probe = states[i % len(states)]
        t0 = time.perf_counter_ns()
        safe_acceleration_range(probe, L, grid)
        times.append((time.perf_counter_ns() - t0) / 1000.0)
    times.sort()
    _emit_json({
        "iters": args.iters,
        "mean_us": statistics.fmean(times),
        "p50_us": times[len(times) // 2],
        "p95_us": times[min(len(times) - 1, int(0.95 * len(times)))],
        "max_us": times[-1],
    })
    return 0


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="safe-accel",
        description="Exact safe acceleration-setpoint ranges for "
                    "jerk-limited joint control.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, freq=True):
        p.add_argument("--config", help="config JSON (default: packaged)")
        p.add_argument("--joint", type=int, default=0)
        if freq:
            p.add_argument("--freq", type=float,
                           help="decision frequency override [Hz]")

    p = sub.add_parser("range", help="safe range for a state")
    common(p)
    p.add_argument("--state", required=True, metavar="p,v,a")
    p.set_defaults(fn=_cmd_range)

    p = sub.add_parser("map", help="map an action into a range")
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--action", type=float, required=True)
    p.set_defaults(fn=_cmd_map)

    p = sub.add_parser("step", help="integrate one interval")
    common(p)
    p.add_argument("--state", required=True, metavar="p,v,a")
    p.add_argument("--setpoint", type=float, required=True)
    p.set_defaults(fn=_cmd_step)

    p = sub.add_parser("rollout", help="policy rollout to CSV")
    common(p)
    p.add_argument("--policy", choices=("max", "random", "bangbang"),
                   default="max")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--duration", type=float, default=2.0)
    p.add_argument("--state", metavar="p,v,a",
                   help="start state (default rest at 0)")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(fn=_cmd_rollout)

    p = sub.add_parser("fuzz", help="random-episode battery")
    common(p)
    p.add_argument("--episodes", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--duration", type=float, default=5.0)
    p.set_defaults(fn=_cmd_fuzz)

    p = sub.add_parser("compare", help="exact bounds vs continuous reference")
    common(p, freq=False)
    p.add_argument("--freqs", default="300,10,4",
                   help="comma-separated frequencies [Hz]")
    p.add_argument("--duration", type=float, default=8.0)
    p.add_argument("--state", metavar="p,v,a",
                   help="start state (default rest at p_min)")
    p.add_argument("--out", help="CSV path prefix (one file per frequency)")
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("bench", help="range computation timing")
    common(p)
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_bench)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (InadmissibleStateError, InfeasibleStateError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ConfigError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
