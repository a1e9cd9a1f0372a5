"""Qubit net size, separation and coverage across epsilon."""
import argparse

from qnlpsim.net import build_net, cardinality_bound, coverage_check, min_separation
from qnlpsim.rng import substream


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", default="0.25,0.5,0.7,1.0,1.5")
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print("eps,size,budget,min_separation,max_distance,misses,strategy")
    for eps in map(float, args.eps.split(",")):
        net = build_net(args.d, eps, substream(args.seed, "net", eps), seed=args.seed)
        cov = coverage_check(net, 10_000, substream(args.seed, "audit", eps))
        print(f"{eps},{len(net)},{cardinality_bound(args.d, eps):.0f},{min_separation(net):.4f},"
              f"{cov.max_distance:.4f},{cov.misses},{net.strategy}")


if __name__ == "__main__":
    main()
