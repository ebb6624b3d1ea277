"""Slack of p13 <= p12 + p23 along equally spaced directions (0, t, 2t).

Writes the curve as CSV and compares the grid minimum with the closed form
slack(t) = -sin^2(t/2) cos(t), whose minimum -1/8 sits at t = 60 deg.
"""

import argparse
import csv
import math
import sys

import numpy as np

from bellwright.quantum import DirectionConfig, joint_prob


def slack(theta: float) -> tuple[float, float, float, float]:
    cfg = DirectionConfig.equally_spaced(theta)
    p13, p12, p23 = (joint_prob(cfg, i, j, "+", "+") for i, j in ((1, 3), (1, 2), (2, 3)))
    return p13, p12, p23, p12 + p23 - p13


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--step", type=float, default=0.1)
    ap.add_argument("--out", help="CSV path (default stdout)")
    args = ap.parse_args()

    thetas = np.round(np.arange(args.step, 180, args.step), 10)
    rows = [(t, *slack(float(t))) for t in thetas]
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["theta", "p13", "p12", "p23", "slack", "closed_form"])
    worst = 0.0
    for t, p13, p12, p23, s in rows:
        closed = -math.sin(math.radians(t) / 2) ** 2 * math.cos(math.radians(t))
        worst = max(worst, abs(s - closed))
        w.writerow([f"{t:g}", f"{p13:.9f}", f"{p12:.9f}", f"{p23:.9f}", f"{s:.9f}", f"{closed:.9f}"])
    if args.out:
        out.close()
    t_min, *_, s_min = min(rows, key=lambda r: r[-1])
    print(f"grid minimum slack {s_min:.6f} at theta={t_min:g} deg; "
          f"max deviation from closed form {worst:.2e}", file=sys.stderr)


if __name__ == "__main__":
    main()
