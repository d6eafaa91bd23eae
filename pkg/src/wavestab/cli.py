"""``wavestab`` command line: configuration parsing and report output.

Scheme names map onto the four classical cases:

    lax   case 1  Lax average in time, central in space
    ftcs  case 2  forward in time, central in space
    ftfs  case 3  forward in time, forward in space
    ftbs  case 4  forward in time, rearward (upwind) in space

Exit status: 0 on success, 1 on a usage or configuration error, 2 when a
validation command (``table1``, ``validate-modes``) finds a failing row.
"""

from __future__ import annotations

import argparse
import csv
import enum
import io
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence, TextIO

from wavestab.core import (
    DEFAULT_RANDOM_AMPLITUDE,
    DEFAULT_SEED,
    Gaussian,
    RandomIC,
    RunConfig,
    Scheme,
    SineMode,
    build_stencil,
)
from wavestab.experiments import (
    DEFAULT_SWEEP_GRID,
    DEFAULT_TABLE1_SAMPLES,
    Remark,
    cfl_sweep,
    convergence_study,
    mode_validation,
    reproduce_table1,
)
from wavestab.simulate import run_simulation
from wavestab.von_neumann import classify_stability, corner_check, critical_courant

CONFIG_KEYS = (
    "scheme",
    "courant",
    "a",
    "dx",
    "cells",
    "steps",
    "ic",
    "ic_mode",
    "ic_seed",
    "out",
    "format",
)

DEFAULTS: dict[str, Any] = {
    "a": 1.0,
    "dx": None,  # 1 / cells, i.e. a unit-length domain
    "cells": 100,
    "steps": 100,
    "ic": "gaussian",
    "ic_mode": 1,
    "ic_seed": DEFAULT_SEED,
    "out": None,
    "format": "csv",
}

REQUIRED = {
    "analyze": ("scheme", "courant"),
    "critical": (),
    "corner": (),
    "sweep": (),
    "simulate": ("scheme", "courant"),
    "validate-modes": (),
    "table1": (),
    "converge": ("scheme", "courant"),
}

COMMAND_DEFAULTS = {
    "validate-modes": {"cells": 64},
    "corner": {"courant": 1.0},
}

IC_NAMES = ("gaussian", "sine", "random")


class ConfigError(ValueError):
    """Bad configuration file, flag value or missing key."""


class UsageError(Exception):
    pass


class ReportFormat(enum.Enum):
    CSV = "csv"
    ALIGNED_TABLE = "table"


@dataclass(frozen=True)
class ReportSink:
    destination: str | None = None
    format: ReportFormat = ReportFormat.CSV


# -- configuration ---------------------------------------------------------------


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    values: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _parse_float(key: str, value: Any) -> float:
    if isinstance(value, float):
        x = value
    else:
        try:
            x = float(str(value).strip())
        except ValueError:
            raise ConfigError(f"{key}: cannot parse {value!r} as a number") from None
    if not math.isfinite(x):
        raise ConfigError(f"{key}: value must be finite, got {value!r}")
    return x


def _parse_int(key: str, value: Any) -> int:
    if isinstance(value, int):
        return value
    try:
        return int(str(value).strip())
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {value!r} as an integer") from None


def _parse_list(key: str, value: str, conv) -> list:
    items = [v for v in (s.strip() for s in str(value).split(",")) if v]
    if not items:
        raise ConfigError(f"{key}: empty list")
    return [conv(key, v) for v in items]


def _parse_scheme(key: str, value: Any) -> Scheme:
    if isinstance(value, Scheme):
        return value
    try:
        return Scheme.from_name(str(value))
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


_CONVERTERS = {
    "scheme": _parse_scheme,
    "courant": _parse_float,
    "a": _parse_float,
    "dx": _parse_float,
    "cells": _parse_int,
    "steps": _parse_int,
    "ic_mode": _parse_int,
    "ic_seed": _parse_int,
}


def parse_config(
    command: str,
    file_values: dict[str, str] | None = None,
    flag_values: dict[str, Any] | None = None,
) -> dict[str, Any]:
    """Merge file and flag values (flags win), convert types and fill defaults."""
    if command not in REQUIRED:
        raise ConfigError(f"unknown command {command!r}")
    merged: dict[str, Any] = dict(file_values or {})
    for key, value in (flag_values or {}).items():
        if value is not None:
            merged[key] = value
    for key in merged:
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key {key!r}")
    missing = [k for k in REQUIRED[command] if k not in merged]
    if missing:
        raise ConfigError(f"command {command!r} requires: {', '.join(missing)}")

    eff: dict[str, Any] = {**DEFAULTS, **COMMAND_DEFAULTS.get(command, {})}
    for key, value in merged.items():
        conv = _CONVERTERS.get(key)
        eff[key] = conv(key, value) if conv else value
    eff.setdefault("scheme", None)
    eff.setdefault("courant", None)

    if str(eff["ic"]).lower() not in IC_NAMES:
        raise ConfigError(f"ic: expected one of {', '.join(IC_NAMES)}, got {eff['ic']!r}")
    eff["ic"] = str(eff["ic"]).lower()
    try:
        eff["format"] = ReportFormat(str(eff["format"]).lower()).value
    except ValueError:
        raise ConfigError(f"format: expected csv or table, got {eff['format']!r}") from None
    if eff["cells"] < 3:
        raise ConfigError(f"cells: need at least 3, got {eff['cells']}")
    if eff["steps"] < 1:
        raise ConfigError(f"steps: must be positive, got {eff['steps']}")
    if eff["dx"] is None:
        eff["dx"] = 1.0 / eff["cells"]
    elif eff["dx"] <= 0:
        raise ConfigError(f"dx: must be positive, got {eff['dx']}")
    return eff


def initial_condition(eff: dict[str, Any]):
    if eff["ic"] == "gaussian":
        return Gaussian()
    if eff["ic"] == "sine":
        return SineMode(eff["ic_mode"])
    return RandomIC(DEFAULT_RANDOM_AMPLITUDE, eff["ic_seed"])


def run_config(eff: dict[str, Any]) -> RunConfig:
    try:
        return RunConfig(
            a=eff["a"],
            dx=eff["dx"],
            courant=eff["courant"],
            n_cells=eff["cells"],
            n_steps=eff["steps"],
            ic=initial_condition(eff),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def echo_config(command: str, eff: dict[str, Any], stream: TextIO) -> None:
    stream.write(f"# wavestab {command}\n")
    for key in CONFIG_KEYS:
        value = eff.get(key)
        if isinstance(value, Scheme):
            value = value.cli_name
        stream.write(f"#   {key} = {'' if value is None else value}\n")


# -- reports ---------------------------------------------------------------------


def format_value(value: Any, digits: int = 17) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, f".{digits}g")
    if value is None:
        return ""
    return str(value)


def emit_report(
    rows: Sequence[dict],
    sink: ReportSink,
    columns: Sequence[str] | None = None,
    stdout: TextIO | None = None,
) -> None:
    """Write ``rows`` as CSV (header always present) or as an aligned table."""
    if columns is None:
        if not rows:
            raise ValueError("columns are required for an empty report")
        columns = list(rows[0])
    for row in rows:
        if list(row) != list(columns):
            raise ValueError(f"row columns {list(row)} differ from {list(columns)}")

    buf = io.StringIO()
    if sink.format is ReportFormat.CSV:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row[c]) for c in columns])
    else:
        cells = [[format_value(row[c], 12) for c in columns] for row in rows]
        widths = [max([len(c)] + [len(r[k]) for r in cells]) for k, c in enumerate(columns)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
        lines.append("  ".join("-" * w for w in widths))
        lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in cells]
        buf.write("\n".join(lines) + "\n")

    if sink.destination is None:
        (stdout or sys.stdout).write(buf.getvalue())
    else:
        with open(sink.destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())


# -- commands --------------------------------------------------------------------


def _schemes(args, eff) -> list[Scheme]:
    if getattr(args, "schemes", None):
        return _parse_list("schemes", args.schemes, _parse_scheme)
    if eff.get("scheme") is not None:
        return [eff["scheme"]]
    return list(Scheme)


def cmd_analyze(args, eff):
    rep = classify_stability(build_stencil(eff["scheme"], eff["courant"]))
    row = {
        "scheme": eff["scheme"].cli_name,
        "courant": eff["courant"],
        "max_modulus": rep.max_modulus,
        "worst_theta": rep.worst_theta,
        "verdict": rep.verdict.value,
    }
    return [row], list(row), 0


CRITICAL_COLUMNS = ["scheme", "c_lo", "c_hi", "tol", "critical_courant"]


def cmd_critical(args, eff):
    c_lo = _parse_float("c-lo", args.c_lo)
    c_hi = _parse_float("c-hi", args.c_hi)
    tol = _parse_float("tol", args.tol)
    if not 0 < c_lo < c_hi or tol <= 0:
        raise ConfigError("need 0 < c-lo < c-hi and tol > 0")
    rows = []
    for scheme in _schemes(args, eff):
        c = critical_courant(scheme, c_lo, c_hi, tol)
        rows.append(
            {
                "scheme": scheme.cli_name,
                "c_lo": c_lo,
                "c_hi": c_hi,
                "tol": tol,
                "critical_courant": "none" if c is None else c,
            }
        )
    return rows, CRITICAL_COLUMNS, 0


CORNER_COLUMNS = [
    "scheme",
    "condition",
    "corner",
    "inequality",
    "bound",
    "joint_verdict",
    "c_max",
    "courant",
    "admits",
]


def cmd_corner(args, eff):
    rows = []
    for scheme in _schemes(args, eff):
        res = corner_check(scheme, eff["courant"])
        for cond in res.conditions:
            rows.append(
                {
                    "scheme": scheme.cli_name,
                    "condition": cond.label,
                    "corner": cond.corner_text(),
                    "inequality": cond.inequality_text(),
                    "bound": cond.bound_text(),
                    "joint_verdict": res.joint_verdict.value,
                    "c_max": res.c_max,
                    "courant": res.courant,
                    "admits": res.admits,
                }
            )
    return rows, CORNER_COLUMNS, 0


SWEEP_COLUMNS = ["scheme", "courant", "max_modulus", "worst_theta", "verdict"]


def cmd_sweep(args, eff):
    grid = _parse_list("c-values", args.c_values, _parse_float) if args.c_values else DEFAULT_SWEEP_GRID
    try:
        rows = cfl_sweep(_schemes(args, eff), grid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return [r.as_row() for r in rows], SWEEP_COLUMNS, 0


SIMULATE_COLUMNS = ["step", "time", "l2", "linf", "l2_ratio"]


def cmd_simulate(args, eff, err: TextIO):
    cfg = run_config(eff)
    rec = run_simulation(cfg, eff["scheme"])
    rows = []
    for m, (l2, linf) in enumerate(zip(rec.per_step_l2, rec.per_step_linf)):
        ratio = float(l2 / rec.per_step_l2[m - 1]) if m and rec.per_step_l2[m - 1] else None
        rows.append({"step": m, "time": m * cfg.dt, "l2": float(l2), "linf": float(linf), "l2_ratio": ratio})
    err.write(f"# diverged_at = {'' if rec.diverged_at is None else rec.diverged_at}\n")
    growth = rec.growth_rate_estimate
    err.write(f"# growth_rate_estimate = {'' if growth is None else format_value(growth)}\n")
    return rows, SIMULATE_COLUMNS, 0


MODE_COLUMNS = [
    "scheme",
    "courant",
    "n",
    "analytic_re",
    "analytic_im",
    "empirical_re",
    "empirical_im",
    "abs_diff",
    "status",
]


def cmd_validate_modes(args, eff):
    c_list = _parse_list("c-values", args.c_values, _parse_float)
    modes = _parse_list("modes", args.modes, _parse_int)
    try:
        rows = mode_validation(_schemes(args, eff), c_list, modes, eff["cells"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    status = 0 if all(r.passed for r in rows) else 2
    return [r.as_row() for r in rows], MODE_COLUMNS, status


TABLE1_COLUMNS = ["case", "time_derivative", "spatial_derivative", "scheme", "remark"]


def cmd_table1(args, eff):
    samples = (
        _parse_list("c-values", args.c_values, _parse_float) if args.c_values else DEFAULT_TABLE1_SAMPLES
    )
    try:
        rows = reproduce_table1(samples)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    status = 2 if any(r.remark is Remark.DISCREPANCY for r in rows) else 0
    return [r.as_row() for r in rows], TABLE1_COLUMNS, status


CONVERGE_COLUMNS = ["scheme", "courant", "cells", "l2_error", "observed_order"]


def cmd_converge(args, eff):
    ic = initial_condition(eff)
    final_time = _parse_float("final-time", args.final_time) if args.final_time is not None else None
    try:
        res = convergence_study(
            eff["scheme"],
            eff["courant"],
            base_n=_parse_int("base-cells", args.base_cells),
            n_doublings=_parse_int("doublings", args.doublings),
            final_time=final_time,
            ic=ic,
            a=eff["a"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return res.as_rows(), CONVERGE_COLUMNS, 0


# -- argument parsing --------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common_options() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--config", metavar="FILE", help="key = value file; flags override it")
    g.add_argument("--out", help="output file (default: standard output)")
    g.add_argument("--format", choices=[f.value for f in ReportFormat], help="csv (default) or table")
    g.add_argument("--scheme", help="lax | ftcs | ftfs | ftbs")
    g.add_argument("--courant", help="Courant number C = a dt / dx")
    g.add_argument("--a", help="advection speed (default 1)")
    g.add_argument("--dx", help="cell width (default 1/cells)")
    g.add_argument("--cells", help="number of grid cells (default 100; 64 for validate-modes)")
    g.add_argument("--steps", help="number of time steps (default 100)")
    g.add_argument("--ic", help="gaussian (default) | sine | random")
    g.add_argument("--ic-mode", dest="ic_mode", help="mode index for --ic sine (default 1)")
    g.add_argument("--ic-seed", dest="ic_seed", help=f"seed for --ic random (default {DEFAULT_SEED})")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(
        prog="wavestab",
        description="Stability analysis of explicit schemes for u_t + a u_x = 0.",
        epilog=(
            "schemes: lax = case 1 (LD/CD), ftcs = case 2 (FD/CD), "
            "ftfs = case 3 (FD/FD), ftbs = case 4 (FD/RD)"
        ),
    )
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    sub.add_parser("analyze", parents=[common], help="max |G| and verdict for one scheme and C")

    p = sub.add_parser("critical", parents=[common], help="largest stable C by bisection")
    p.add_argument("--c-lo", dest="c_lo", default="1e-6")
    p.add_argument("--c-hi", dest="c_hi", default="4")
    p.add_argument("--tol", default="1e-6")

    sub.add_parser("corner", parents=[common], help="xi = +-1 corner bounds on C (default C = 1)")

    p = sub.add_parser("sweep", parents=[common], help="max |G| over a grid of C values")
    p.add_argument("--schemes", help="comma-separated scheme list (default: all four)")
    p.add_argument("--c-values", dest="c_values", help="ascending C list (default 0.1..2.0 step 0.1)")

    sub.add_parser("simulate", parents=[common], help="time-step an initial condition, per-step norms")

    p = sub.add_parser("validate-modes", parents=[common], help="analytic vs measured mode amplification")
    p.add_argument("--schemes", help="comma-separated scheme list (default: all four)")
    p.add_argument("--c-values", dest="c_values", default="0.25,0.5,0.9,1.0")
    p.add_argument("--modes", default="1,2,3")

    p = sub.add_parser("table1", parents=[common], help="classify the four cases")
    p.add_argument("--c-values", dest="c_values", help="sample C values in (0, 2]")

    p = sub.add_parser("converge", parents=[common], help="grid-refinement study")
    p.add_argument("--base-cells", dest="base_cells", default="64")
    p.add_argument("--doublings", default="3")
    p.add_argument("--final-time", dest="final_time", help="default: half a domain crossing")
    return parser


_COMMANDS = {
    "analyze": cmd_analyze,
    "critical": cmd_critical,
    "corner": cmd_corner,
    "sweep": cmd_sweep,
    "validate-modes": cmd_validate_modes,
    "table1": cmd_table1,
    "converge": cmd_converge,
}


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        file_values = read_config_file(args.config) if args.config else {}
        flags = {key: getattr(args, key, None) for key in CONFIG_KEYS}
        eff = parse_config(args.command, file_values, flags)
        echo_config(args.command, eff, err)
        if args.command == "simulate":
            rows, columns, status = cmd_simulate(args, eff, err)
        else:
            rows, columns, status = _COMMANDS[args.command](args, eff)
        emit_report(rows, ReportSink(eff["out"], ReportFormat(eff["format"])), columns, stdout=out)
    except (UsageError, ConfigError) as exc:
        err.write(f"error: {exc}\n")
        if isinstance(exc, UsageError):
            err.write(parser.format_usage())
        return 1
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return 1
    return status


if __name__ == "__main__":
    sys.exit(main())
