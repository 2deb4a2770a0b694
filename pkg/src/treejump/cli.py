"""Command-line entry point.

Subcommands: phase-table, near-critical, intermediate, multifractal,
dynkin-check, identities.  Global flags --seed/--workers/--out/--config;
exit status 0 on success, 1 when a check suite fails, 2 on usage errors.
TREEJUMP_WORKERS supplies the default worker count when --workers is absent.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import ConfigError, ExperimentConfig, run_experiment

_SUBCOMMANDS = {
    "phase-table": "phase_table",
    "near-critical": "near_critical",
    "intermediate": "intermediate_phase",
    "multifractal": "multifractal",
    "dynkin-check": "dynkin_check",
    "identities": "identity_suite",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treejump",
        description="Reinforced jump processes and branching random walks on regular trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--config", type=str, default=None, help="flat key=value config file")
        if name in ("near-critical", "intermediate", "multifractal", "dynkin-check"):
            p.add_argument("--replicates", type=int, default=None)
        if name in ("phase-table", "near-critical", "intermediate", "multifractal"):
            p.add_argument("--d", type=int, default=None)
        if name in ("intermediate", "multifractal", "dynkin-check"):
            p.add_argument("--beta", type=float, default=None)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    kind = _SUBCOMMANDS[args.command]
    try:
        if args.config:
            cfg = ExperimentConfig.from_text(Path(args.config).read_text())
            if cfg.kind != kind:
                raise ConfigError(f"config kind {cfg.kind!r} does not match subcommand {args.command!r}")
        else:
            cfg = ExperimentConfig(kind, {})
        overrides = {}
        for key in ("seed", "workers", "out", "replicates", "d", "beta"):
            v = getattr(args, key, None)
            if v is not None:
                overrides[key] = v
        if args.command == "dynkin-check" and "replicates" in overrides:
            overrides["trajectories"] = overrides.pop("replicates")
        cfg = cfg.with_overrides(**overrides)
    except (ConfigError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    path, cols, rows, ok = run_experiment(cfg)
    if cfg.kind == "identity_suite":
        for r in rows:
            status = "PASS" if r["passed"] else "FAIL"
            print(f"{status}  {r['check']}: residual {r['residual']:.3e} (tol {r['tolerance']:.0e})")
    print(f"wrote {len(rows)} rows to {path}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
