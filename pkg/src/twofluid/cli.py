"""Command line entry point: ``twofluid run|probe|thresholds|scenarios``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import probes
from .config import ConfigError, RunConfig, parse_config
from .diagnostics import RunMonitor
from .integrator import BLOWUP, CFLError, run
from .io import write_series, write_snapshot, write_summary
from .scenarios import SCENARIOS, scenario, scenario_names
from .thresholds import threshold_report

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP = 0, 1, 2


def execute_run(cfg: RunConfig, out_dir: str | Path | None = None) -> dict:
    """Run a configured simulation, write its outputs and return the summary."""
    out = Path(cfg.output_dir if out_dir is None else out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params = cfg.physical_params()
    grid = cfg.grid
    initial = scenario(cfg.scenario, grid, cfg.seed, cfg.c, params).state
    monitor = RunMonitor(params, cfg.form, grid.d, cfg.s1)
    write_snapshot(out / "initial.snap", initial)
    result = run(initial, params, cfg.form, cfg.stepper, observers=[monitor.observe],
                 cadence=cfg.cadence, hooks=[monitor.hook])
    write_series(out / "series.csv", monitor.columns, monitor.rows)
    write_snapshot(out / "final.snap", result.final_state)
    audit = monitor.audit
    summary = {
        "config": cfg.as_dict(),
        "params": {k: getattr(params, k) for k in params.names()},
        "steps": result.steps,
        "final_time": result.final_state.t,
        "wall_time": result.wall_time,
        "reason": result.reason,
        "blowup_time": result.blowup_time,
        "energy": {
            "initial_total": audit.initial_total,
            "max_relative_residual": audit.max_relative_residual(),
            "final": vars(audit.latest) if audit.reports else None,
        },
        "apriori": monitor.apriori().as_dict() if len(monitor.history) else None,
    }
    if grid.d == 3:
        summary["thresholds"] = threshold_report(initial, params, cfg.c).as_dict()
    write_summary(out / "summary.json", summary)
    return summary


def execute_probe(tag: str, cfg: RunConfig, out_dir: str | Path | None = None) -> dict:
    out = Path(cfg.output_dir if out_dir is None else out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = cfg.grid
    horizon = cfg.t_end if cfg.t_end > 0 else 1.0
    if tag in probes.PRODUCT_TAGS:
        corpus = probes.make_corpus(grid, 20 if grid.d == 2 else 10, cfg.seed)
        studies = [probes.probe_product_estimate(tag, corpus, horizon=horizon)]
    elif tag == probes.HEAT:
        studies, _ = probes.friction_spread(probes.heat_corpus(grid, 20, cfg.seed), horizon=horizon)
    elif tag in (probes.MAXWELL, probes.MAXWELL_ENERGY):
        corpus = probes.maxwell_corpus(grid, 20, cfg.seed)
        studies = [probes.probe_maxwell_bound(corpus, horizon=horizon, dt=cfg.dt,
                                              energy_form=tag == probes.MAXWELL_ENERGY)]
    else:
        raise ConfigError(f"unknown probe tag {tag!r}; expected one of {probes.ALL_TAGS}")
    rows = []
    for i, st in enumerate(studies):
        rows += [dict(r, study=i) for r in st.rows()]
    write_series(out / f"probe_{tag}.csv", ["study", "tag", "sample", "lhs", "rhs", "ratio"], rows)
    summary = {
        "tag": tag,
        "studies": [
            {"corpus": st.corpus, "max_ratio": st.max_ratio, "median_ratio": st.median_ratio,
             "discarded": st.discarded}
            for st in studies
        ],
    }
    write_summary(out / f"probe_{tag}.json", summary)
    return summary


def _thresholds(cfg: RunConfig) -> dict:
    params = cfg.physical_params()
    initial = scenario(cfg.scenario, cfg.grid, cfg.seed, cfg.c, params).state
    return threshold_report(initial, params, cfg.c).as_dict()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twofluid", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="integrate a configured scenario")
    p_run.add_argument("config")
    p_probe = sub.add_parser("probe", help="ratio study for one estimate")
    p_probe.add_argument("tag", choices=probes.ALL_TAGS)
    p_probe.add_argument("config")
    p_thr = sub.add_parser("thresholds", help="small-data constants for the scenario's initial data")
    p_thr.add_argument("config")
    sub.add_parser("scenarios", help="list scenario presets")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "scenarios":
        for name in scenario_names():
            print(f"{name:26s} {SCENARIOS[name][2]}")
        return EXIT_OK
    try:
        cfg = parse_config(args.config)
        if args.command == "run":
            summary = execute_run(cfg)
            print(f"{summary['reason']} after {summary['steps']} steps "
                  f"(t = {summary['final_time']:.6g}, {summary['wall_time']:.2f} s); output in {cfg.output_dir}")
            return EXIT_BLOWUP if summary["reason"] == BLOWUP else EXIT_OK
        if args.command == "probe":
            summary = execute_probe(args.tag, cfg)
            for st in summary["studies"]:
                print(f"{args.tag}: max ratio {st['max_ratio']:.6g}, median {st['median_ratio']:.6g}")
            return EXIT_OK
        print(json.dumps(_thresholds(cfg), indent=2, default=str))
        return EXIT_OK
    except (ConfigError, CFLError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
