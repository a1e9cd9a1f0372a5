"""Sup of ||Lambda(psi) - 1/d||_1 over Haar inputs as the ensemble size grows.

Prints CSV: d, m, m/d, sup_distance, threshold.
"""
import argparse
import csv
import sys

from qnlpsim.qstate import random_pure_states
from qnlpsim.rng import substream
from qnlpsim.ruc import (
    RandomizingSpec,
    UnitaryEnsemble,
    randomizing_distances,
    randomizing_threshold,
    theorem1_cardinality,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", default="4,8,16,32")
    ap.add_argument("--epsilon", type=float, default=0.5)
    ap.add_argument("--states", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    spec = RandomizingSpec(args.epsilon)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["d", "m", "m_over_d", "sup_distance", "threshold"])
    for d in map(int, args.dims.split(",")):
        full = theorem1_cardinality(spec, d)
        states = random_pure_states(d, substream(args.seed, "states", d), args.states)
        for m in sorted({max(1, d // 4), d, 2 * d, full}):
            ens = UnitaryEnsemble.haar(d, m, substream(args.seed, "ensemble", d, m))
            sup = randomizing_distances(ens, states, 1).max()
            w.writerow([d, m, f"{m / d:.3f}", f"{sup:.5f}", randomizing_threshold(args.epsilon, d, 1)])


if __name__ == "__main__":
    main()
