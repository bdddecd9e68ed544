"""Command-line entry point: ``tripod-memory <scenario> [--config F] [--engine E] [--out DIR] [--points N]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import analytic as an
from .config import OUT_DIR_ENV, SCENARIOS, RunConfig, parse_config
from .csvio import gnuplot_script
from .errors import TripodMemoryError
from .experiments import (
    ENGINES,
    ScenarioResult,
    fig5_times,
    fringe_grid,
    run_fig2,
    run_fig3,
    run_fig4,
    run_fig5,
    run_fringe,
    run_isolation,
    run_oracle_check,
)

DEFAULT_POINTS = {"fig4": 16, "fig5": 200, "fringe": 16}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tripod-memory",
        description="Two-channel tripod memory scenarios. Writes <scenario>.csv and <scenario>.gp.",
        epilog=f"Output directory defaults to ${OUT_DIR_ENV}, then ./out.",
    )
    parser.add_argument("scenario", choices=SCENARIOS)
    parser.add_argument("--config", type=Path, help="key = value file with [section] headers")
    parser.add_argument("--engine", choices=ENGINES, help="override [run] engine")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--points", type=int, help="grid size (fig4, fig5, fringe) or case count (oracle-check)")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    text = args.config.read_text() if args.config is not None else ""
    cfg = parse_config(text)
    return cfg.with_overrides(scenario=args.scenario, engine=args.engine, out_dir=args.out, points=args.points)


def fig4_grid(cfg: RunConfig, points: int):
    """Phases spaced evenly over a full turn, anchored on the Larmor-compensated value."""
    p = cfg.params
    comp = an.compensation_phase(p.tau, p.larmor, p.delta_w)
    return sorted(an.wrap_phase(comp + g) for g in fringe_grid(points))


def run_scenario(cfg: RunConfig) -> ScenarioResult:
    name = cfg.scenario
    p = cfg.params
    engine = cfg.engine
    points = cfg.points or DEFAULT_POINTS.get(name, 0)
    if name == "fig2":
        return run_fig2(p, engine)
    if name == "fig3":
        return run_fig3(p, engine)
    if name == "fig4":
        return run_fig4(fig4_grid(cfg, points), p, engine)
    if name == "fig5":
        return run_fig5(fig5_times(p, points), p, engine)
    if name == "isolation":
        return run_isolation(p, engine)
    if name == "fringe":
        return run_fringe(fringe_grid(points), p, engine)
    if name == "oracle-check":
        return run_oracle_check(p, cfg.points or cfg.oracle_cases, cfg.seed, cfg.oracle_tolerance)
    raise TripodMemoryError(f"unknown scenario {name!r}")


def oracle_report(result: ScenarioResult, tolerance: float) -> str:
    t = result.table
    lines = [f"analytic vs numeric two-beam readout, tolerance {tolerance!r} of full scale"]
    lines.append(f"{'case':>4}  {'delta_w/pi':>10}  {'delta_r/pi':>10}  {'tau/us':>8}  {'analytic':>10}  {'numeric':>10}  {'discrepancy':>11}  result")
    for r in t.rows:
        case, dw, dr, tau, ia, inum, d, ok = r
        lines.append(f"{int(case):>4}  {dw:>10.6f}  {dr:>10.6f}  {tau:>8.4f}  {ia:>10.6f}  {inum:>10.6f}  {d:>11.3e}  {'PASS' if ok else 'FAIL'}")
    failed = sum(1 for r in t.rows if not r[-1])
    lines.append(f"max discrepancy {result.max_discrepancy:.3e}; {len(t.rows) - failed}/{len(t.rows)} cases within tolerance")
    return "\n".join(lines) + "\n"


def write_outputs(cfg: RunConfig, result: ScenarioResult) -> list[Path]:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    table = result.table
    meta = {**{f"config.{k}": v for k, v in cfg.resolved().items()}, "config.run.out_dir": str(out)}
    meta.update(table.meta)
    table.meta = meta
    csv_path = out / f"{result.name}.csv"
    table.write(csv_path)
    gp_path = out / f"{result.name}.gp"
    gp_path.write_text(gnuplot_script(csv_path.name, table, result.plot_x, result.plot_y, result.ylabel))
    paths = [csv_path, gp_path]
    if result.name == "oracle-check":
        rep = out / "oracle-check_report.txt"
        rep.write_text(oracle_report(result, cfg.oracle_tolerance))
        paths.append(rep)
    return paths


def run_command(argv: Sequence[str] | None = None) -> int:
    """Run one scenario; return the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = load_config(args)
        result = run_scenario(cfg)
        paths = write_outputs(cfg, result)
    except (TripodMemoryError, OSError) as e:
        print(f"tripod-memory: error: {e}", file=sys.stderr)
        return 2
    for path in paths:
        print(path)
    if result.discrepancies:
        tol = cfg.oracle_tolerance
        print(f"max analytic/numeric discrepancy {result.max_discrepancy:.3e} (tolerance {tol})")
        if not result.within(tol):
            print(f"tripod-memory: error: discrepancy exceeds {tol}", file=sys.stderr)
            return 3
    return 0


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
