"""Feasibility verdicts for quantum targets on the (0, t, 2t) family.

For each angle the full 9-pair table is rounded to rationals and handed to
the exact solver.  The output lists the verdict, the certificate family
that separates the targets and the violation margin against the rounding
bound, which shows where the three-way agreement bound takes over from the
Wigner form.
"""

import argparse
import csv
import sys
import time

from bellwright.feasibility import encode, solve
from bellwright.quantum import DirectionConfig, quantum_targets


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--step", type=float, default=5.0)
    ap.add_argument("--denominator", type=int, default=10**6)
    ap.add_argument("--pairs", default=None, help="restrict to pairs, e.g. 12,23,13")
    args = ap.parse_args()
    pairs = [(int(p[0]), int(p[1])) for p in args.pairs.split(",")] if args.pairs else None

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["theta", "verdict", "certificate", "violation", "bound", "seconds"])
    theta = args.step
    while theta < 180:
        t0 = time.perf_counter()
        targets = quantum_targets(DirectionConfig.equally_spaced(theta), denominator=args.denominator)
        r = solve(encode(targets, pairs))
        dt = time.perf_counter() - t0
        name = r.certificate_name or ("lp-dual" if r.certificate else "")
        violation = "" if r.violation is None else f"{float(r.violation):.6f}"
        w.writerow([f"{theta:g}", r.verdict, name, violation, f"{float(r.bound):.2e}", f"{dt:.3f}"])
        theta = round(theta + args.step, 10)


if __name__ == "__main__":
    main()
