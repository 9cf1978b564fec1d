"""Command-line front end.

    bopshox <command> [parameter flags] [--out DIR] [--format csv|json]

Commands: exact, bo, shoot, errors, overlap, qu, figure {1..5}. Parameters
default to m = M = omega = 1, Omega = 0.2, delta = 0.6; a ``key=value``
config file overrides the defaults and explicit flags override both.
Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import datasets
from .errors import BopshoxError, NumericalError, ValidationError
from .params import StateIndex, load_config, validate

log = logging.getLogger("bopshox")

DEFAULTS = {"m": 1.0, "M": 1.0, "omega": 1.0, "Omega": 0.2, "delta": 0.6}

EXIT_OK, EXIT_INTERNAL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _fmt(value) -> str:
    if isinstance(value, int):
        return str(value)
    return format(value, ".17g")


def render(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "csv":
        lines = [",".join(columns)]
        lines += [",".join(_fmt(row[c]) for c in columns) for row in rows]
        return "\n".join(lines) + "\n"
    items = []
    for row in rows:
        fields = ", ".join(f"{json.dumps(c)}: {_fmt(row[c])}" for c in columns)
        items.append("  {" + fields + "}")
    return "[\n" + ",\n".join(items) + "\n]\n" if items else "[]\n"


def write_dataset(name: str, rows: list[dict], out: Path, fmt: str) -> Path:
    datasets.validate_rows(name, rows)
    schema = datasets.SCHEMAS[name]
    path = out / f"{name}.{fmt}"
    path.write_text(render(rows, schema["columns"], fmt))
    key = schema["key"]
    values = [row[key] for row in rows]
    if values:
        print(f"{path}: {len(rows)} rows, {key} min={_fmt(min(values))} max={_fmt(max(values))}")
    else:
        print(f"{path}: 0 rows")
    return path


def _params(args):
    raw = dict(DEFAULTS)
    if args.config:
        raw.update(load_config(args.config))
    for key in ("m", "M", "omega", "Omega", "delta"):
        value = getattr(args, key)
        if value is not None:
            raw[key] = value
    if args.Omega_bar is not None:
        if args.Omega is not None:
            raise ValidationError("give either --Omega or --Omega-bar, not both")
        raw["Omega"] = args.Omega_bar * float(raw["omega"])
    return validate(raw)


def _states(args):
    if args.n is not None or args.l is not None:
        return [StateIndex(args.n or 0, args.l or 0)]
    return [StateIndex(n, l) for n in range(args.nmax + 1) for l in range(args.nmax + 1)]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("system parameters")
    g.add_argument("--m", type=float, help="mass of the fast (x) oscillator")
    g.add_argument("--M", type=float, help="mass of the slow (y) oscillator")
    g.add_argument("--omega", type=float, help="fast frequency")
    g.add_argument("--Omega", type=float, help="slow frequency, must be below omega")
    g.add_argument("--Omega-bar", dest="Omega_bar", type=float, help="Omega/omega, alternative to --Omega")
    g.add_argument("--delta", type=float, help="dimensionless coupling, |delta| < 1")
    g.add_argument("--config", help="key=value parameter file")
    o = common.add_argument_group("output")
    o.add_argument("--out", default=".", help="output directory (default: current)")
    o.add_argument("--format", choices=("csv", "json"), default="csv")
    o.add_argument("--nodes", type=int, default=80, help="Gauss-Hermite nodes per axis")
    o.add_argument("--tol", type=float, default=1e-10, help="relative shooting tolerance")
    o.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="bopshox",
        description="Exact vs Born-Oppenheimer states of bilinearly coupled oscillators.")
    sub = parser.add_subparsers(dest="command", required=True)

    def state_flags(p, nmax):
        p.add_argument("--n", type=int, help="single fast quantum number")
        p.add_argument("--l", type=int, help="single slow quantum number")
        p.add_argument("--nmax", type=int, default=nmax, help=f"lattice size (default {nmax})")

    for name, help_, nmax in (("exact", "exact energies", 5), ("bo", "BO energies", 5),
                              ("errors", "relative BO energy errors", 10)):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--nmax", type=int, default=nmax)
    state_flags(sub.add_parser("shoot", parents=[common], help="BO eigenvalues by shooting"), 3)
    state_flags(sub.add_parser("overlap", parents=[common], help="exact/BO overlaps"), 5)
    p = sub.add_parser("qu", parents=[common], help="QU decomposition of G")
    p.add_argument("--sweep-delta", help="start:stop:step coupling sweep")
    p = sub.add_parser("figure", parents=[common], help="figure datasets")
    p.add_argument("number", type=int, choices=range(1, 6))
    p.add_argument("--grid", type=int, default=400, help="figure 1 grid per axis")
    p.add_argument("--sweep-delta", help="start:stop:step coupling sweep (figures 3-5)")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        p = _params(args)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        fmt = args.format
        cmd = args.command
        if getattr(args, "nmax", 0) < 0:
            raise ValidationError("--nmax must be non-negative")
        if cmd == "exact":
            write_dataset("exact", datasets.exact_rows(p, args.nmax), out, fmt)
        elif cmd == "bo":
            write_dataset("bo", datasets.bo_rows(p, args.nmax), out, fmt)
        elif cmd == "shoot":
            write_dataset("shoot", datasets.shoot_rows(p, _states(args), args.tol), out, fmt)
        elif cmd == "errors":
            write_dataset("errors", datasets.error_rows(p, args.nmax), out, fmt)
        elif cmd == "overlap":
            write_dataset("overlap", datasets.overlap_rows(p, _states(args), args.nodes), out, fmt)
        elif cmd == "qu":
            deltas = datasets.parse_sweep(args.sweep_delta) if args.sweep_delta else None
            write_dataset("qu", datasets.qu_rows(p, deltas), out, fmt)
        else:
            k = args.number
            sweep = {}
            if args.sweep_delta:
                sweep["deltas"] = datasets.parse_sweep(args.sweep_delta)
            if k == 1:
                if args.grid < 1:
                    raise ValidationError("--grid must be positive")
                rows = datasets.figure1_rows(args.grid)
            elif k == 2:
                rows = datasets.figure2_rows(p)
            elif k == 3:
                rows = datasets.figure3_rows(p, K=args.nodes, **sweep)
            elif k == 4:
                rows = datasets.figure4_rows(p, **sweep)
            else:
                rows = datasets.figure5_rows(p, **sweep)
            write_dataset(f"figure{k}", rows, out, fmt)
    except ValidationError as exc:
        print(f"error [{exc.code()}]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"error [{exc.code()}]: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BopshoxError as exc:
        print(f"error [{exc.code()}]: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"error [cli.io]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def main(argv=None) -> int:
    return run(argv)
