"""Estimated and exact capacity as the node density doubles at fixed beta.

    python scripts/density_ladder.py --beta 0.5 --method fise
    python scripts/density_ladder.py --beta 4 --method closed_form --steps 4
"""
import argparse

from udncap.capacity import monte_carlo_capacity
from udncap.channel import FadingParams
from udncap.harness import ESTIMATORS
from udncap.netgen import Selector, s1_desk_config
from udncap.rngkit import RngStream


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--beta", type=float, default=0.5)
    ap.add_argument("--method", choices=sorted(ESTIMATORS), default="fise")
    ap.add_argument("--base", type=float, default=300.0, help="expected BS count at the first step")
    ap.add_argument("--steps", type=int, default=3)
    ap.add_argument("--M", type=int, default=9)
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cluster", choices=[s.value for s in Selector], default="closest")
    args = ap.parse_args()

    params = FadingParams()
    base = RngStream(args.seed, 0)
    prev = None
    print(f"{'E[J]':>7} {'estimate':>9} {'exact':>9} {'vs exact':>9} {'step':>7}")
    for k in range(args.steps):
        n_bs = args.base * 2**k
        cfg = s1_desk_config(beta=args.beta, expected_bs=n_bs, M=args.M)
        est, _ = monte_carlo_capacity(cfg, args.cluster, params, args.reps, base, ESTIMATORS[args.method])
        ex, _ = monte_carlo_capacity(cfg, args.cluster, params, args.reps, base)
        step = "" if prev is None else f"{100 * abs(est - prev) / prev:6.2f}%"
        print(f"{n_bs:7.0f} {est:9.4f} {ex:9.4f} {100 * abs(est - ex) / ex:8.2f}% {step:>7}")
        prev = est


if __name__ == "__main__":
    main()
