"""Mean of Y = ||Lambda(phi) - 1/d||_p over the (d, m, p) grid, next to its bounds."""
import argparse
import csv
import math
import sys

from qnlpsim.concentration import deviation_values, lemma6_bound, lemma6_worked_bound, mean_check
from qnlpsim.rng import substream


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["d", "m", "p", "r", "mean_Y", "sem", "general_bound", "worked_bound", "pass"])
    for p, r in ((1, 2), (2, 3)):
        for d in (2, 4, 8):
            for m in sorted({d, 2 * d, d * math.ceil(math.log(d)), 16 * d}):
                ys = deviation_values(d, m, p, args.trials, substream(args.seed, d, m, p))
                rep = mean_check(ys, lemma6_bound(d, m, p, r))
                worked = lemma6_worked_bound(d, m, p)
                w.writerow([d, m, p, r, f"{rep.mean:.5f}", f"{rep.sem:.5f}", f"{rep.bound:.5f}",
                            "" if worked is None else f"{worked:.5f}", rep.passed])


if __name__ == "__main__":
    main()
