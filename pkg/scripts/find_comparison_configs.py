#!/usr/bin/env python3
"""Scan joint configurations for the frequency-comparison demonstration.

Sweeps a small family of limit boxes and, for each, rolls an always-max
policy from rest at p_min under both the exact discrete bounds and the
continuous-time braking reference. A configuration is a keeper when

  * at 300 Hz both methods are violation-free and their terminal
    positions agree to 1e-3 of the position range,
  * at 10 Hz the continuous reference pierces p_max,
  * at 4 Hz the continuous reference ends more than 1% of the range
    short of p_max,
  * the exact bounds land on p_max to 1e-6 of the range at all three.

The winner frozen into safe_accel.baseline.COMPARISON_LIMITS is the
keeper with the largest 10 Hz overshoot margin. Rerun this script after
touching the braking reference to confirm the margins still hold.
"""

from __future__ import annotations

import argparse

from safe_accel.baseline import compare_rollout
from safe_accel.core import JointState, KinematicLimits


def scan_one(L: KinematicLimits, duration: float) -> dict:
    span = L.p_max - L.p_min
    s0 = JointState(L.p_min, 0.0, 0.0)
    results = {mc.f_N: mc for mc in
               compare_rollout(s0, L, [300.0, 10.0, 4.0], duration)}
    hi = results[300.0]
    ours_exact = all(
        abs(mc.ours.states[-1].p - L.p_max) <= 1e-6 * span
        and mc.ours_report.ok
        for mc in results.values())
    return {
        "agree_300": (hi.ours_report.ok and hi.baseline_report.ok
                      and abs(hi.ours.states[-1].p
                              - hi.baseline.states[-1].p) <= 1e-3 * span),
        "over_10": results[10.0].baseline_report.position.worst - 1.0,
        "under_4": (L.p_max - results[4.0].baseline.states[-1].p) / span,
        "ours_exact": ours_exact,
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--duration", type=float, default=8.0)
    args = ap.parse_args()

    candidates = [
        KinematicLimits(p_min=-2.9, p_max=2.9, v_min=-v, v_max=v,
                        a_min=-a, a_max=a, j_min=-j, j_max=j)
        for v in (1.4, 1.9)
        for a in (3.0, 5.0, 8.0)
        for j in (15.0, 25.0, 50.0)
    ]

    print(f"{'v':>4} {'a':>4} {'j':>5} | {'300 agree':>9} {'ours exact':>10} "
          f"{'over@10':>10} {'under@4':>9} | keeper")
    best = None
    for L in candidates:
        r = scan_one(L, args.duration)
        keeper = (r["agree_300"] and r["ours_exact"]
                  and r["over_10"] > 1e-6 and r["under_4"] > 0.01)
        print(f"{L.v_max:4g} {L.a_max:4g} {L.j_max:5g} | "
              f"{str(r['agree_300']):>9} {str(r['ours_exact']):>10} "
              f"{r['over_10']:+10.3e} {r['under_4']:+9.3f} | "
              f"{'YES' if keeper else ''}")
        if keeper and (best is None or r["over_10"] > best[1]["over_10"]):
            best = (L, r)

    if best is None:
        print("\nno keeper found")
        return
    L, r = best
    print(f"\nfrozen choice: p ±{L.p_max:g}, v ±{L.v_max:g}, "
          f"a ±{L.a_max:g}, j ±{L.j_max:g} "
          f"(over@10 {r['over_10']:+.3e}, under@4 {r['under_4']:+.3f})")


if __name__ == "__main__":
    main()
