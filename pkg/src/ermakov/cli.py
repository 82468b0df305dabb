"""Configuration-driven scenario runner.

Subcommands:
  run             build a scenario, write series.csv / report.json / plot.gp,
                  exit 0 only if every property check passes
  check           run the property suite and print a verdict table
  list-scenarios  available scenario names, parameters and defaults

Configs are flat key=value files; command-line flags override file values.
Exit codes: 0 ok, 1 check failure, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ode import IntegrationError
from .scenarios import (SCENARIO_NAMES, ScenarioBundle, ScenarioConfig,
                        build_scenario, scenario_defaults,
                        scenario_description)

__all__ = ["main", "RunReport", "build_parser"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    pass


@dataclass
class RunReport:
    """Everything a run produces, mirrored into report.json."""

    scenario: dict
    columns: list
    series: dict
    drift_abs: float
    drift_rel: float
    checks: list = field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "scenario": self.scenario,
            "columns": self.columns,
            "series": self.series,
            "drift": {"abs": self.drift_abs, "rel": self.drift_rel},
            "checks": self.checks,
        }
        return json.dumps(payload, indent=2, sort_keys=True)


_FLOAT_KEYS = {"Q", "h", "m", "b", "lambda", "t0", "t1", "tol", "omega0"}
_INT_KEYS = {"kappa", "n-index", "n-samples"}


def _parse_config_file(path: str) -> dict:
    values = {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config: file not found: {path}")
    for lineno, raw in enumerate(p.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config: line {lineno} is not key=value: {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key] = val
    return values


def _coerce(key: str, val: str):
    try:
        if key in _FLOAT_KEYS:
            return float(val)
        if key in _INT_KEYS:
            return int(val)
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {val!r}") from exc
    return val


def _merge_config(args: argparse.Namespace) -> ScenarioConfig:
    values: dict = {}
    if args.config:
        for key, raw in _parse_config_file(args.config).items():
            values[key] = _coerce(key, raw)
    cli_pairs = {
        "scenario": args.scenario, "kappa": args.kappa, "Q": args.Q,
        "h": args.h, "m": args.m, "b": args.b, "lambda": args.lam,
        "n-index": args.n_index, "t0": args.t0, "t1": args.t1,
        "tol": args.tol, "n-samples": args.n_samples,
        "omega0": args.omega0,
    }
    for key, val in cli_pairs.items():
        if val is not None:
            values[key] = val

    name = values.get("scenario")
    if not name:
        raise ConfigError("scenario: missing (use --scenario or a config file)")
    if name not in SCENARIO_NAMES:
        raise ConfigError(
            f"scenario: unknown {name!r}; choose from {', '.join(SCENARIO_NAMES)}")
    defaults = scenario_defaults(name)["window"]
    window = (values.get("t0", defaults[0]), values.get("t1", defaults[1]))
    cfg = ScenarioConfig(
        name=name,
        kappa=int(values.get("kappa", 1)),
        Q=float(values.get("Q", 0.0)),
        h=float(values.get("h", 1.0)),
        m=float(values.get("m", 2.0)),
        b=float(values.get("b", 1.0)),
        lam=float(values.get("lambda", 100.0)),
        n_index=int(values.get("n-index", 1)),
        window=window,
        tol=float(values.get("tol", 1e-10)),
        n_samples=int(values.get("n-samples", 301)),
        omega0=float(values.get("omega0", 1.0)),
    )
    try:
        cfg.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def _format_float(x: float) -> str:
    # repr(float) is the shortest digit string that round-trips (<= 17 digits)
    return repr(float(x))


def _write_csv(path: Path, columns: dict) -> None:
    names = list(columns.keys())
    arrays = [np.asarray(columns[k], dtype=float) for k in names]
    lines = [",".join(names)]
    for i in range(len(arrays[0])):
        lines.append(",".join(_format_float(a[i]) for a in arrays))
    path.write_text("\r\n".join(lines) + "\r\n")


def _write_plot_script(path: Path, columns: list, scenario: str) -> None:
    axis = columns[0]
    lines = [
        f"# line plots over series.csv for scenario {scenario}",
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{axis}'",
    ]
    for idx, name in enumerate(columns[1:], start=2):
        safe = name.replace("_", " ")
        lines.append(f"set ylabel '{safe}'")
        lines.append(f"plot 'series.csv' using 1:{idx} with lines")
        lines.append("pause -1")
    path.write_text("\n".join(lines) + "\n")


def _report_from_bundle(bundle: ScenarioBundle) -> RunReport:
    from .invariants import drift_report

    cfg = bundle.config
    drift_abs, drift_rel = drift_report(bundle.invariant)
    scenario_echo = {
        "name": cfg.name, "kappa": cfg.kappa, "Q": cfg.Q, "h": cfg.h,
        "m": cfg.m, "b": cfg.b, "lambda": cfg.lam, "n_index": cfg.n_index,
        "t0": cfg.window[0], "t1": cfg.window[1], "tol": cfg.tol,
        "n_samples": cfg.n_samples,
    }
    numeric_cols = {k: v for k, v in bundle.columns.items()
                    if isinstance(v, np.ndarray)}
    series = {k: [float(x) for x in v] for k, v in numeric_cols.items()}
    checks = [
        {"name": c.name, "passed": bool(c.passed), "value": float(c.value),
         "threshold": float(c.threshold), "detail": c.detail}
        for c in bundle.checks
    ]
    return RunReport(scenario_echo, list(numeric_cols.keys()), series,
                     drift_abs, drift_rel, checks)


def _print_checks(bundle: ScenarioBundle, out=sys.stdout) -> bool:
    width = max(len(c.name) for c in bundle.checks) + 2
    ok = True
    for c in bundle.checks:
        verdict = "pass" if c.passed else "FAIL"
        line = (f"{c.name:<{width}} {verdict}  measured={c.value:.6e}  "
                f"threshold={c.threshold:.3e}")
        if c.detail:
            line += f"  ({c.detail})"
        print(line, file=out)
        ok = ok and c.passed
    return ok


def _cmd_run(args) -> int:
    cfg = _merge_config(args)
    out_dir = Path(args.out or "out")
    bundle = build_scenario(cfg)
    report = _report_from_bundle(bundle)
    out_dir.mkdir(parents=True, exist_ok=True)
    numeric_cols = {k: v for k, v in bundle.columns.items()
                    if isinstance(v, np.ndarray)}
    _write_csv(out_dir / "series.csv", numeric_cols)
    (out_dir / "report.json").write_text(report.to_json() + "\n")
    _write_plot_script(out_dir / "plot.gp", list(numeric_cols.keys()), cfg.name)
    ok = _print_checks(bundle)
    print(f"wrote {out_dir}/series.csv, report.json, plot.gp")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _cmd_check(args) -> int:
    cfg = _merge_config(args)
    bundle = build_scenario(cfg)
    ok = _print_checks(bundle)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _cmd_list(_args) -> int:
    print("available scenarios:")
    for name in sorted(SCENARIO_NAMES):
        defaults = scenario_defaults(name)
        print(f"  {name:<16} window {defaults['window']}  -> "
              f"{scenario_description(name)}")
    print("\nparameters: --kappa --Q --h (cosmology); --m --b --lambda "
          "--n-index (optics); --t0 --t1 --tol --n-samples (all)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ermakov",
        description="Exact-invariant scenario runner for time-dependent "
                    "oscillators (cosmology and waveguide packs).")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--scenario", choices=sorted(SCENARIO_NAMES))
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--kappa", type=int, choices=(-1, 1))
        p.add_argument("--Q", type=float)
        p.add_argument("--h", type=float)
        p.add_argument("--m", type=float)
        p.add_argument("--b", type=float)
        p.add_argument("--lambda", dest="lam", type=float)
        p.add_argument("--n-index", dest="n_index", type=int)
        p.add_argument("--t0", type=float)
        p.add_argument("--t1", type=float)
        p.add_argument("--tol", type=float)
        p.add_argument("--n-samples", dest="n_samples", type=int)
        p.add_argument("--omega0", type=float)

    p_run = sub.add_parser("run", help="run a scenario and write outputs")
    add_common(p_run)
    p_run.add_argument("--out", help="output directory (default ./out)")
    p_run.set_defaults(func=_cmd_run)

    p_check = sub.add_parser("check", help="run property checks only")
    add_common(p_check)
    p_check.set_defaults(func=_cmd_check)

    p_list = sub.add_parser("list-scenarios", help="list scenario packs")
    p_list.set_defaults(func=_cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (IntegrationError, OverflowError, ZeroDivisionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
