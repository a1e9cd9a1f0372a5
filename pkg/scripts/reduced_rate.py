"""Per-round BV success on the reduced sample, against 1/(20 t q^k) rates.

One row per m*; structured noise by default.
"""
import argparse
import csv
import sys

from qnlpsim.concentration import binomial_sigma
from qnlpsim.eqram import reduced_round_success
from qnlpsim.fields import Field, random_vector
from qnlpsim.nlp import NoiseModel, per_round_rate_stated
from qnlpsim.rng import substream


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, default=5)
    ap.add_argument("--t", type=int, default=1)
    ap.add_argument("--m-star", default="1,2,3")
    ap.add_argument("--rounds", type=int, default=20_000)
    ap.add_argument("--iid", action="store_true", help="independent noise per basis vector")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    F = Field(args.q)
    model = NoiseModel("bounded-uniform", t=args.t, structured=not args.iid)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["m_star", "rate", "sigma", "weak_target", "stated_target"])
    for k in map(int, args.m_star.split(",")):
        x = random_vector(F, k, substream(args.seed, "secret", k))
        rate = reduced_round_success(F, k, x, model, args.rounds, substream(args.seed, "rounds", k))
        w.writerow([k, f"{rate:.5f}", f"{binomial_sigma(rate, args.rounds):.5f}",
                    f"{per_round_rate_stated(args.t, args.q, k + 1):.6f}",
                    f"{per_round_rate_stated(args.t, args.q, k):.6f}"])


if __name__ == "__main__":
    main()
