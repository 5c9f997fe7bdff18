"""Capacity vs. user/BS ratio for exact, FISE and closed form on one config.

    python scripts/beta_sweep.py --config configs/desk_s1.json --out sweep.csv
"""
import argparse

from udncap.harness import emit_results, load_config, override, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default="configs/desk_s1.json")
    ap.add_argument("--reps", type=int)
    ap.add_argument("--out", default="beta_sweep.csv")
    args = ap.parse_args()

    cfg = override(load_config(args.config), reps=args.reps, timing=True)
    rows = run_experiment(cfg)
    emit_results(rows, args.out)
    print(f"{'beta':>6} {'method':>12} {'mean':>9} {'std':>8} {'rel_err':>8}")
    for r in rows:
        rel = "" if r.rel_err is None else f"{100 * r.rel_err:7.2f}%"
        print(f"{r.beta:6.2f} {r.method:>12} {r.capacity_mean:9.4f} {r.capacity_std:8.4f} {rel:>8}")


if __name__ == "__main__":
    main()
