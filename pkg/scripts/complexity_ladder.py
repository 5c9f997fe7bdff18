"""Per-call time of the FISE core (trace given) and of the exact log-det route.

Each cluster has J BSs, J/2 users and 8 * J/2 interfering users, as in a
9-cluster network at beta = 0.5.

    python scripts/complexity_ladder.py --ladder 32 64 128 256 512
"""
import argparse
import timeit

import numpy as np

from udncap.capacity import exact_capacity_once
from udncap.channel import ChannelInstance, FadingParams, interference_matrix, sinr_trace
from udncap.fise import fise_from_trace


def crandn(g, shape):
    return (g.standard_normal(shape) + 1j * g.standard_normal(shape)) / np.sqrt(2)


def best(fn, number, repeat=15):
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ladder", type=int, nargs="+", default=[32, 64, 128, 256])
    args = ap.parse_args()

    params = FadingParams()
    g = np.random.default_rng(0)
    print(f"{'J':>5} {'fise us':>9} {'log evals':>9} {'exact us':>10} {'ratio':>6}")
    prev = None
    for J in args.ladder:
        K_m = J // 2
        n_out = 8 * K_m
        L = g.uniform(0.0, 1e-3, (J, K_m))
        G = crandn(g, (J, K_m))
        H_out = g.uniform(0.0, 1e-3, (J, n_out)) * crandn(g, (J, n_out))
        ch = ChannelInstance(L, G, interference_matrix(H_out, params), L.mean(axis=1))
        tr = sinr_trace(ch, params)
        est = fise_from_trace(tr, J, K_m, K_m + n_out)
        t_f = best(lambda: fise_from_trace(tr, J, K_m, K_m + n_out), 200)

        def exact():
            c = ChannelInstance(L, G, interference_matrix(H_out, params), L.mean(axis=1))
            return exact_capacity_once(c, params)
        t_e = best(exact, 3, repeat=7)
        ratio = "" if prev is None else f"{t_e / prev:6.2f}"
        print(f"{J:5d} {1e6 * t_f:9.1f} {est.diagnostics['n_log_evals']:9d} {1e6 * t_e:10.0f} {ratio:>6}")
        prev = t_e


if __name__ == "__main__":
    main()
