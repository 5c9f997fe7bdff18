"""Command-line entry point: ``udncap --config desk.json --method auto --out rows.csv``."""
from __future__ import annotations

import argparse
import json
import sys

from .harness import (METHODS, ConfigError, ExperimentConfig, emit_results, load_config,
                      override, run_experiment, write_results)
from .netgen import ScenarioConfig, ScenarioKind, Selector, s1_desk_config

SCENARIO_ALIASES = {"S1": ScenarioKind.S1, "S2": ScenarioKind.S2,
                    ScenarioKind.S1.value: ScenarioKind.S1, ScenarioKind.S2.value: ScenarioKind.S2}


def default_config(kind: ScenarioKind) -> ExperimentConfig:
    if kind is ScenarioKind.S1:
        scen = s1_desk_config()
    else:
        scen = ScenarioConfig(ScenarioKind.S2, D=1000.0, M=9, J_total=300, sigma=600.0)
    return ExperimentConfig(scenario=scen)


def _betas(values):
    if values is None:
        return None
    out = []
    for v in values:
        out.extend(float(x) for x in v.split(",") if x.strip())
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="udncap", description=__doc__)
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--scenario", choices=sorted(SCENARIO_ALIASES))
    p.add_argument("--beta", action="append", help="user/BS ratio; repeat or comma-separate")
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--cluster", choices=[s.value for s in Selector])
    p.add_argument("--method", action="append", choices=METHODS)
    p.add_argument("--out", help="output path (default: stdout as CSV)")
    p.add_argument("--format", choices=["csv", "json"], default=None)
    p.add_argument("--timing", action="store_true", help="record wall-clock seconds per row")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        kind = SCENARIO_ALIASES[args.scenario] if args.scenario else None
        if args.config:
            cfg = load_config(args.config)
        else:
            cfg = default_config(kind or ScenarioKind.S1)
        cfg = override(cfg, scenario=kind.value if kind else None, beta_grid=_betas(args.beta),
                       reps=args.reps, seed=args.seed, cluster_selector=args.cluster,
                       methods=args.method, output_path=args.out,
                       timing=True if args.timing else None)
        fmt = args.format or ("json" if (cfg.output_path or "").endswith(".json") else "csv")
        rows = run_experiment(cfg)
        if cfg.output_path:
            emit_results(rows, cfg.output_path, fmt)
        else:
            write_results(rows, sys.stdout, fmt)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "field": exc.field, "message": str(exc)}), file=sys.stderr)
        return 2
    except Exception as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
