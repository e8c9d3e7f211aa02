"""negpell-lab command line.

Exit status: 0 when every check passes, 1 on a hard failure (or an error),
2 when only soft thresholds are breached.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .config import EXPERIMENTS, LIMIT_MEANING, ExperimentConfig, load_thresholds, resolve_cache
from .experiments import Report, run_experiment
from .io import versions, write_csv, write_json


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="negpell-lab", description=__doc__.splitlines()[0])
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--limit", type=int, default=None,
                   help="; ".join(f"{k}: {v[0]} (default {v[1]})" for k, v in LIMIT_MEANING.items()))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("results"))
    p.add_argument("--cache", type=Path, default=None, help="cache directory (or $NEGPELL_LAB_CACHE)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--threshold-file", type=Path, default=None, help="JSON overriding soft thresholds")
    p.add_argument("--ordering", choices=("radicand", "discriminant"), default="radicand")
    return p


def write_outputs(report: Report, cfg: ExperimentConfig, out: Path, wall: float) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, table in report.tables.items():
        path = out / f"{name}.csv"
        write_csv(path, table)
        paths.append(path)
    manifest = {
        "config": cfg.manifest_view(),
        "versions": versions(),
        "checks": [c.as_dict() for c in report.checks],
        "info": report.info,
        "outputs": sorted(p.name for p in paths),
        "exit_code": report.exit_code(),
    }
    write_json(out / f"{cfg.name}.manifest.json", manifest)
    write_json(out / f"{cfg.name}.timing.json", {"wall_seconds": round(wall, 3), "threads": cfg.threads})
    return paths


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.make(
            args.experiment,
            args.limit,
            seed=args.seed,
            thresholds=load_thresholds(args.threshold_file),
            out=args.out,
            cache=resolve_cache(args.cache),
            threads=args.threads,
            ordering=args.ordering,
        )
        t0 = time.perf_counter()
        report = run_experiment(cfg)
        wall = time.perf_counter() - t0
        write_outputs(report, cfg, args.out, wall)
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"negpell-lab: error: {exc}", file=sys.stderr)
        return 1
    for c in report.checks:
        d = c.as_dict()
        print(f"[{d['kind']}] {c.name}: {d['status']}  {c.value}  {c.threshold}".rstrip())
    code = report.exit_code()
    print(f"{cfg.name}: exit {code} ({wall:.1f}s), outputs in {args.out}")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
