"""Command-line entry point: ``atomlaser run|diagnostics|compare``."""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import AtomLaserError, ConfigError
from .scenarios import SCENARIOS, ScenarioConfig, load_config, parse_values, run_scenario
from .series import SeriesTable, compare_series


def _split_set(pairs):
    items = {}
    for p in pairs or ():
        if "=" not in p:
            raise ConfigError(f"--set expects key=value, got {p!r}")
        k, v = p.split("=", 1)
        items[k.strip()] = v.strip()
    return items


def _build_config(args, scenario) -> ScenarioConfig:
    cfg = ScenarioConfig(scenario=scenario)
    if args.config:
        cfg = load_config(args.config, cfg)
        if cfg.scenario != scenario:
            cfg = cfg.with_overrides({"scenario": scenario})
    over = _split_set(args.set)
    if args.t_max is not None:
        over["t_max"] = args.t_max
    if args.n_steps is not None:
        over["n_steps"] = args.n_steps
    if args.out is not None:
        over["output_dir"] = args.out
    return cfg.with_overrides(parse_values(over))


def _run_one(cfg: ScenarioConfig, plot: bool):
    res = run_scenario(cfg, plot=plot)
    return res.scenario, str(res.output_dir), res.summary_text()


def _add_common(p):
    p.add_argument("--config", type=Path, help="key=value configuration file")
    p.add_argument("--out", help="output directory (default: out)")
    p.add_argument("--t-max", type=float, help="time horizon in seconds")
    p.add_argument("--n-steps", type=int, help="number of time steps")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override one configuration key (repeatable)")
    p.add_argument("--plot", action="store_true", help="also write plot.svg")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="atomlaser",
                                 description="Cavity output-coupling simulations.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one or more scenarios")
    run.add_argument("scenario", nargs="+", choices=SCENARIOS)
    run.add_argument("--parallel", action="store_true",
                     help="run the listed scenarios concurrently")
    _add_common(run)

    diag = sub.add_parser("diagnostics", help="print the timescale report")
    _add_common(diag)

    cmp_ = sub.add_parser("compare", help="deviation between two series CSV files")
    cmp_.add_argument("a", type=Path)
    cmp_.add_argument("b", type=Path)
    return ap


def _error_line(exc: BaseException) -> str:
    code = getattr(exc, "code", None)
    if not isinstance(code, str):
        code = "io" if isinstance(exc, OSError) else "internal"
    return json.dumps({"error": code, "type": type(exc).__name__, "message": str(exc)})


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "compare":
            d = compare_series(SeriesTable.read_csv(args.a), SeriesTable.read_csv(args.b))
            print(f"max_abs={d.max_abs:.11e}\nrms={d.rms:.11e}\nt_of_max={d.t_of_max:.11e}")
            return 0
        if args.command == "diagnostics":
            cfg = _build_config(args, "diagnostics")
            res = run_scenario(cfg, plot=False)
            sys.stdout.write(res.summary_text())
            return 0
        configs = [_build_config(args, s) for s in args.scenario]
        if args.parallel and len(configs) > 1:
            with ProcessPoolExecutor() as pool:
                outs = list(pool.map(_run_one, configs, [args.plot] * len(configs)))
        else:
            outs = [_run_one(c, args.plot) for c in configs]
        for name, out_dir, text in outs:
            print(f"[{name}] -> {out_dir}")
            sys.stdout.write(text)
        return 0
    except (AtomLaserError, ValueError, OSError) as exc:
        print(_error_line(exc), file=sys.stderr)
        return 2 if isinstance(exc, ConfigError) else 1


if __name__ == "__main__":
    sys.exit(main())
