"""FISE against the exact baseline at the full network size (about 3142 BSs, M = 25).

Slow: each exact replication factors matrices of size J_m ~ 130.

    python scripts/full_scale_fise.py --reps 20 --beta 0.25 0.5 1.0
"""
import argparse

from udncap.capacity import monte_carlo_capacity
from udncap.channel import FadingParams
from udncap.fise import fise_estimator
from udncap.netgen import s1_desk_config
from udncap.rngkit import RngStream


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--beta", type=float, nargs="+", default=[0.25, 0.5, 0.75, 1.0])
    ap.add_argument("--expected-bs", type=float, default=3142.0)
    ap.add_argument("--M", type=int, default=25)
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    params = FadingParams()
    base = RngStream(args.seed, 0)
    for beta in args.beta:
        cfg = s1_desk_config(beta=beta, expected_bs=args.expected_bs, M=args.M)
        f, _ = monte_carlo_capacity(cfg, "closest", params, args.reps, base, fise_estimator)
        ex, _ = monte_carlo_capacity(cfg, "closest", params, args.reps, base)
        print(f"beta={beta:5.2f}  fise={f:.4f}  exact={ex:.4f}  rel_err={100 * abs(f - ex) / ex:.2f}%")


if __name__ == "__main__":
    main()
