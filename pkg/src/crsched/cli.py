"""Command-line front end.

    crsched run --config scenario.json [--algo all]
    crsched example 1
    crsched fig3 [--values 0.1,0.5,0.9]
    crsched oracle-check --config scenario.json --oracle-resolution 0.01

Every command writes flat rows (CSV or JSON lines) with the columns in
``COLUMNS``; per-slot rows carry a 1-based slot number and summary rows use
``slot="*"`` with the objective filled in.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .bounds import assemble_bounds
from .errors import ConfigError, InfeasibleError, MissingFieldError, OracleRefusal
from .experiments import (
    FIG3_DEFAULT,
    FIG4_DEFAULT,
    FIG5_DEFAULT,
    example_config,
    run_example,
    run_fig3,
    run_fig4,
    run_fig5,
)
from .greedy import greedy_allocate, greedy_allocate_relaxed
from .model import ScenarioConfig, Schedule, snr_rate
from .oracle import GridSpec, grid_loss_bound, grid_optimal_full, grid_optimal_relaxed
from .pa import pa_allocate

COLUMNS = ("scenario_id", "algorithm", "slot", "P", "R", "Q_next", "active_cap", "objective", "note")
COMMANDS = ("run", "example", "fig3", "fig4", "fig5", "oracle-check")

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_REFUSED = 0, 2, 3, 4

CONFIG_KEYS = (
    "name", "N", "tau", "P0", "N0", "rho", "g11", "g12", "g21", "g22",
    "alpha", "Ea0", "Ea", "Da", "Q0", "log_base", "relaxed",
)  # fmt: skip


# -- config text -----------------------------------------------------------------


def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def parse_config(text: str) -> tuple[ScenarioConfig, list[str]]:
    """Parse a JSON scenario; returns the config and any warnings.

    When both ``alpha`` and link gains are present ``alpha`` takes precedence.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<document>", exc.msg, exc.lineno) from None
    if not isinstance(raw, dict):
        raise ConfigError("<document>", "top level must be an object", 1)
    unknown = sorted(set(raw) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(unknown[0], "unknown key", _line_of(text, unknown[0]))
    for key in ("N", "Ea0", "Ea", "Da"):
        if key not in raw:
            raise MissingFieldError(key)
    warnings = []
    if raw.get("alpha") is not None and any(raw.get(k) is not None for k in ("g12", "g22", "N0")):
        warnings.append("alpha given together with link gains; alpha overrides g22/(P0*g12+N0)")
    try:
        cfg = ScenarioConfig(**raw)
    except ConfigError as exc:
        raise exc.at_line(_line_of(text, exc.field)) from None
    except TypeError as exc:
        raise ConfigError("<document>", str(exc)) from None
    return cfg, warnings


def serialize_config(cfg: ScenarioConfig) -> str:
    out = {}
    for f in dataclasses.fields(cfg):
        v = getattr(cfg, f.name)
        if v is None:
            continue
        out[f.name] = list(v) if isinstance(v, tuple) else v
    return json.dumps(out, indent=2) + "\n"


def load_config(path: str | Path) -> tuple[ScenarioConfig, list[str]]:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {p}: {exc.strerror}") from None
    cfg, warnings = parse_config(text)
    if cfg.name == "scenario":
        cfg = dataclasses.replace(cfg, name=p.stem)
    return cfg, warnings


# -- rows ------------------------------------------------------------------------


def fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def row(scenario, algorithm, slot="*", P=None, R=None, Q_next=None, active_cap="", objective=None, note=""):
    return {
        "scenario_id": scenario,
        "algorithm": algorithm,
        "slot": str(slot),
        "P": fmt(P),
        "R": fmt(R),
        "Q_next": fmt(Q_next),
        "active_cap": active_cap,
        "objective": fmt(objective),
        "note": note,
    }


def schedule_rows(scenario: str, algorithm: str, sched: Schedule, active: Sequence[str] | None = None, note=""):
    for n in range(sched.N):
        yield row(scenario, algorithm, n + 1, sched.P[n], sched.R[n], sched.Qtraj[n + 1],
                  active[n] if active else "")  # fmt: skip
    yield row(scenario, algorithm, objective=sched.objective, note=note)


class RowWriter:
    def __init__(self, stream, fmt_name: str):
        self.stream = stream
        self.fmt = fmt_name
        if fmt_name == "csv":
            self._csv = csv.DictWriter(stream, fieldnames=COLUMNS, lineterminator="\n")
            self._csv.writeheader()

    def write(self, rows: Iterable[dict]):
        for r in rows:
            if self.fmt == "csv":
                self._csv.writerow(r)
            else:
                self.stream.write(json.dumps(r, sort_keys=False) + "\n")


# -- commands --------------------------------------------------------------------


@dataclass
class RunRequest:
    command: str
    config_path: str | None = None
    algorithm: str = "all"
    output: str | None = None
    format: str = "csv"
    example_id: int | None = None
    values: list[float] | None = None
    oracle_resolution: float = 1e-2
    log_base: float | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.command in ("run", "oracle-check") and not self.config_path:
            raise ConfigError("--config", f"required for '{self.command}'")


def _algorithms(sel: str, cfg: ScenarioConfig) -> list[str]:
    if sel == "all":
        return ["greedy-relaxed", "pa"] if not cfg.has_isr else ["greedy", "greedy-relaxed", "pa"]
    if sel == "greedy" and not cfg.has_isr:
        raise ConfigError("rho", "greedy needs the ISR data; use greedy-relaxed")
    return [sel]


def _cmd_run(req: RunRequest, cfg: ScenarioConfig, warnings: list[str]):
    sid = cfg.name
    for w in warnings:
        yield row(sid, "warning", note=w)
    for algo in _algorithms(req.algorithm, cfg):
        if algo == "greedy":
            sched, prof = greedy_allocate(cfg)
            yield from schedule_rows(sid, algo, sched, prof.active)
        elif algo == "greedy-relaxed":
            sched, prof = greedy_allocate_relaxed(cfg)
            yield from schedule_rows(sid, algo, sched, prof.relaxed_active)
        else:
            sched = pa_allocate(cfg)
            yield from schedule_rows(sid, "pa", sched, note="lower bound")
            clamped = sched.meta["clamped"]
            yield row(sid, "pa-clamped", objective=clamped.objective,
                      note="diagnostic: rates clamped to queue")  # fmt: skip
    if req.algorithm == "all":
        b = assemble_bounds(cfg)
        note = (f"upper={fmt(b.upper)};lower={fmt(b.lower)};lemma2_holds={str(b.lemma2_holds).lower()};"
                f"eq19_holds={str(b.eq19_holds).lower()};lemma3={b.lemma3_case.value}")  # fmt: skip
        yield row(sid, "bounds", objective=b.gap, note=note)


def _cmd_example(req: RunRequest):
    cfg = example_config(req.example_id)
    for k, alloc in enumerate(run_example(req.example_id), start=1):
        sid = f"{cfg.name}:stage{k}"
        for n, p in enumerate(alloc):
            yield row(sid, "pa", n + 1, p, snr_rate(float(p), float(cfg.snr[n])))


def _cmd_sweep(req: RunRequest, runner, default):
    values = default if req.values is None else req.values
    algos = ["greedy", "pa"] if req.algorithm == "all" else [req.algorithm]
    for pt in runner(values, algorithms=algos):
        for algo in algos:
            sched = pt.schedules[algo]
            prof = sched.meta.get("profile")
            active = None
            if prof is not None:
                active = prof.active if algo == "greedy" else prof.relaxed_active
            yield from schedule_rows(pt.config.name, algo, sched, active)


def _cmd_oracle(req: RunRequest, cfg: ScenarioConfig):
    grid = GridSpec(resolution=req.oracle_resolution, max_N=4)
    grid.check(cfg)
    sid = cfg.name
    full, full_obj = grid_optimal_full(cfg, grid)
    rel, rel_util = grid_optimal_relaxed(cfg, grid)
    pa = pa_allocate(cfg)
    yield from schedule_rows(sid, "oracle-full", full)
    yield from schedule_rows(sid, "oracle-relaxed", rel, note=f"weighted_utility={fmt(rel_util)}")
    if cfg.has_isr:
        greedy, _ = greedy_allocate(cfg)
    else:
        greedy, _ = greedy_allocate_relaxed(cfg)
    slack = grid_loss_bound(cfg, grid)
    ok = pa.objective <= full_obj + 1e-9 and full_obj <= greedy.objective + 1e-9
    yield row(sid, "sandwich", objective=full_obj,
              note=f"pa={fmt(pa.objective)};greedy={fmt(greedy.objective)};"
                   f"grid_slack={fmt(slack)};holds={str(ok).lower()}")  # fmt: skip


def run(req: RunRequest, stream=None) -> int:
    """Execute ``req``; rows go to ``stream`` or ``req.output``."""
    buf = io.StringIO()
    writer = RowWriter(buf, req.format)
    if req.command in ("run", "oracle-check"):
        cfg, warnings = load_config(req.config_path)
        if req.log_base is not None:
            cfg = dataclasses.replace(cfg, log_base=req.log_base)
        if req.command == "run":
            writer.write(_cmd_run(req, cfg, warnings))
        else:
            writer.write(_cmd_oracle(req, cfg))
    elif req.command == "example":
        writer.write(_cmd_example(req))
    else:
        runner, default = {
            "fig3": (run_fig3, FIG3_DEFAULT),
            "fig4": (run_fig4, FIG4_DEFAULT),
            "fig5": (run_fig5, FIG5_DEFAULT),
        }[req.command]
        writer.write(_cmd_sweep(req, runner, default))
    text = buf.getvalue()
    if req.output:
        Path(req.output).write_text(text)
    else:
        (stream or sys.stdout).write(text)
    return EXIT_OK


def _values(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config")
    common.add_argument("--algo", default="all", choices=["greedy", "greedy-relaxed", "pa", "all"])
    common.add_argument("--format", default="csv", choices=["csv", "jsonl"])
    common.add_argument("--out")
    common.add_argument("--oracle-resolution", type=float, default=1e-2)
    common.add_argument("--log-base", type=float)

    p = argparse.ArgumentParser(prog="crsched", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="run allocators on a scenario file")
    ex = sub.add_parser("example", parents=[common], help="stage table of a worked example")
    ex.add_argument("example_id", type=int, choices=[1, 2])
    for name in ("fig3", "fig4", "fig5"):
        sp = sub.add_parser(name, parents=[common], help=f"{name} sweep")
        sp.add_argument("--values", type=_values, help="comma-separated sweep points")
    sub.add_parser("oracle-check", parents=[common], help="brute-force sandwich check (N <= 4)")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        req = RunRequest(
            command=args.command,
            config_path=args.config,
            algorithm=args.algo,
            output=args.out,
            format=args.format,
            example_id=getattr(args, "example_id", None),
            values=getattr(args, "values", None),
            oracle_resolution=args.oracle_resolution,
            log_base=args.log_base,
        )
        return run(req)
    except ConfigError as exc:
        print(f"crsched: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(f"crsched: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OracleRefusal as exc:
        print(f"crsched: oracle refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED


if __name__ == "__main__":
    sys.exit(main())
