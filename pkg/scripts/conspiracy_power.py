"""How many trials does the empirical no-conspiracy test need?

Runs the conjunction-tilted stand-in model at several tilts and trial
counts and records whether any conjunction is flagged and whether any
single cause atom is (it never should be).
"""

import argparse
import csv
import sys
from fractions import Fraction

from bellwright.models import check_no_cons, szabo_standin
from bellwright.simulate import DEFAULT_SEED, RunConfig, empirical_no_cons, run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tilts", default="1/8,1/4,1/2,1")
    ap.add_argument("--trials", default="10000,100000,1000000")
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["tilt", "trials", "exact_single_ok", "exact_violations", "flagged", "single_atom_flagged"])
    for tilt in map(Fraction, args.tilts.split(",")):
        m = szabo_standin(tilt)
        exact = check_no_cons(m)
        for n in map(int, args.trials.split(",")):
            r = empirical_no_cons(run(m, RunConfig(n, args.seed, substreams=4)))
            w.writerow([str(tilt), n, exact.single_atom_ok, len(exact.violations),
                        len(r.flagged), len(r.single_atom_flagged)])


if __name__ == "__main__":
    main()
