"""
Command-line front end.

    singhelm eval        --in points.csv --p 3 --alpha 0.25,0.25,0.25 --mu 1
    singhelm residual    --point "1:0.2,0.15,0.2:0.1,0.1,3"
    singhelm system      --point "2:0.1,0.1,0.1,0.2"
    singhelm singularity --p 4 --point "1,1,1,1"
    singhelm selftest    [--quick]

Exit codes: 0 success, 1 configuration or I/O error, 2 at least one row
failed (the error is recorded in that row), 3 a selftest suite failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import _suites
from .errors import ConvergenceError, DomainError
from .fundsol import (
    NormalizationConstants,
    Parameters,
    PointPair,
    base_params,
    q_solution,
)
from .hyperseries import SeriesOptions
from .quadrivariate import QuadArgs
from .verify import pde_residual, singularity_fit, system_residual

EXIT_OK, EXIT_CONFIG, EXIT_ROWS, EXIT_SUITE = 0, 1, 2, 3
COMMANDS = ("eval", "residual", "system", "singularity", "selftest")
ROW_ERRORS = (DomainError, ConvergenceError, ArithmeticError, ValueError)


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    prm: Parameters
    ks: NormalizationConstants
    opts: SeriesOptions
    input: str | None = None
    points: list = field(default_factory=list)
    output: str | None = None
    format: str = "csv"
    seed: int = 0
    quick: bool = False
    direction: tuple | None = None

    def header(self) -> dict:
        return {
            "command": self.command,
            "p": self.prm.p,
            "alpha": list(self.prm.alpha),
            "mu": self.prm.mu,
            "k": list(self.ks.k),
            "rel_tol": self.opts.rel_tol,
            "max_level": self.opts.max_level,
            "max_terms": self.opts.max_terms,
            "input": self.input,
            "points": list(self.points),
            "format": self.format,
            "seed": self.seed,
        }


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _floats(text, n=None, what="value"):
    try:
        vals = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"cannot parse {what} {text!r}") from None
    if n is not None and len(vals) != n:
        raise ConfigError(f"{what} needs {n} comma-separated numbers, got {text!r}")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=3, help="space dimension (>= 3)")
    common.add_argument("--alpha", default="0.25,0.25,0.25", help="a1,a2,a3 with 0 < 2a < 1")
    common.add_argument("--mu", type=float, default=0.0, help="mu = lambda^2")
    common.add_argument("--k", default="auto", help="k1,...,k8 or 'auto'")
    common.add_argument("--rel-tol", type=float, default=1e-14)
    common.add_argument("--max-level", type=int, default=200)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--in", dest="input", help="input CSV file")
    common.add_argument("--point", action="append", default=[],
                        help="inline row; eval/residual 'i:x1,..:x01,..', system 'i:x,y,z,t', "
                             "singularity 'x01,..'")
    common.add_argument("--out", help="output file (default stdout)")

    parser = _Parser(prog="singhelm", description="Fundamental solutions of a singular "
                     "Helmholtz equation in an octant: evaluation and verification.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("eval", parents=[common], help="evaluate q_i at point pairs")
    sub.add_parser("residual", parents=[common], help="PDE residual of q_i")
    sub.add_parser("system", parents=[common], help="hypergeometric-system residuals of omega_i")
    sp = sub.add_parser("singularity", parents=[common], help="singular behaviour of q_1")
    sp.add_argument("--direction", help="ray direction d1,..,dp (default all ones)")
    st = sub.add_parser("selftest", parents=[common], help="run all verification suites")
    st.add_argument("--quick", action="store_true", help="reduced case counts")
    return parser


def make_config(ns) -> RunConfig:
    try:
        prm = Parameters(ns.p, _floats(ns.alpha, 3, "--alpha"), ns.mu)
        if ns.k.strip().lower() == "auto":
            ks = NormalizationConstants.default(prm)
        else:
            ks = NormalizationConstants(_floats(ns.k, 8, "--k"))
        opts = SeriesOptions(rel_tol=ns.rel_tol, max_level=ns.max_level)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    direction = None
    if getattr(ns, "direction", None):
        direction = _floats(ns.direction, prm.p, "--direction")
    return RunConfig(ns.command, prm, ks, opts, ns.input, list(ns.point), ns.out, ns.format,
                     ns.seed, getattr(ns, "quick", False), direction)


# ---------------------------------------------------------------------------
# input rows
# ---------------------------------------------------------------------------

def _input_columns(cfg: RunConfig):
    p = cfg.prm.p
    if cfg.command in ("eval", "residual"):
        return ["i"] + [f"x{j}" for j in range(1, p + 1)] + [f"x0{j}" for j in range(1, p + 1)]
    if cfg.command == "system":
        return ["i", "x", "y", "z", "t"]
    return [f"x0{j}" for j in range(1, p + 1)]


def _parse_inline(cfg: RunConfig, text):
    parts = text.split(":")
    if cfg.command == "singularity":
        return list(_floats(text, what="--point"))
    if len(parts) < 2:
        raise ConfigError(f"cannot parse --point {text!r}")
    out = [parts[0]]
    for part in parts[1:]:
        out += list(_floats(part, what="--point"))
    return out


def read_rows(cfg: RunConfig) -> list:
    """Raw input rows as lists of strings/numbers (parsed per row later)."""
    cols = _input_columns(cfg)
    rows = []
    if cfg.input:
        try:
            with open(cfg.input, newline="") as fh:
                reader = csv.reader(line for line in fh if line.strip() and not line.startswith("#"))
                header = next(reader, None)
                if header is None:
                    raise ConfigError(f"{cfg.input}: empty input")
                header = [h.strip() for h in header]
                if header != cols:
                    raise ConfigError(f"{cfg.input}: header must be {','.join(cols)}")
                rows += [list(r) for r in reader]
        except OSError as exc:
            raise ConfigError(f"cannot read {cfg.input}: {exc}") from None
    rows += [_parse_inline(cfg, t) for t in cfg.points]
    if not rows and cfg.command == "singularity":
        rows = [list(x0) + [1.0] * (cfg.prm.p - 3) for x0 in _suites.SINGULAR_SOURCES]
    if not rows:
        raise ConfigError("no input rows (use --in or --point)")
    return rows


def _branch(v):
    i = float(v)
    if i != int(i) or not 1 <= int(i) <= 8:
        raise DomainError(f"branch index must be 1..8, got {v}")
    return int(i)


def _row_floats(row, n):
    if len(row) != n:
        raise DomainError(f"row needs {n} fields, got {len(row)}")
    return [float(v) for v in row]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _pair_row(cfg, row):
    p = cfg.prm.p
    vals = _row_floats(row, 1 + 2 * p)
    return _branch(vals[0]), PointPair(vals[1:1 + p], vals[1 + p:])


def _echo(cfg, row):
    """Input columns as floats where possible (for rows that failed to parse)."""
    cols = _input_columns(cfg)
    out = {}
    for c, v in zip(cols, list(row) + [None] * (len(cols) - len(row))):
        try:
            out[c] = int(v) if c == "i" else float(v)
        except (TypeError, ValueError):
            out[c] = float("nan") if v is None else v
    return out


def cmd_eval(cfg: RunConfig, rows: list):
    cols = _input_columns(cfg) + ["value", "path", "tail", "level", "error"]
    out = []
    for row in rows:
        rec = _echo(cfg, row)
        try:
            i, pt = _pair_row(cfg, row)
            res = q_solution(i, pt, cfg.prm, cfg.ks, cfg.opts)
            rec.update(value=res.value, path=res.path.value, tail=res.tail_estimate,
                       level=res.level_used, error="")
        except ROW_ERRORS as exc:
            rec.update(value=float("nan"), path="", tail=float("nan"), level=-1, error=str(exc))
        out.append(rec)
    return cols, out


def cmd_residual(cfg: RunConfig, rows: list):
    cols = _input_columns(cfg) + ["h", "residual", "normalized_residual", "order", "error"]
    out = []
    for row in rows:
        rec = _echo(cfg, row)
        try:
            i, pt = _pair_row(cfg, row)
            rep = pde_residual(i, pt, cfg.prm, ks=cfg.ks, opts=cfg.opts)
            rec.update(h=rep.h, residual=rep.residual, normalized_residual=rep.normalized_residual,
                       order=rep.order_estimate, error="")
        except ROW_ERRORS as exc:
            rec.update(h=float("nan"), residual=float("nan"), normalized_residual=float("nan"),
                       order=float("nan"), error=str(exc))
        out.append(rec)
    return cols, out


def cmd_system(cfg: RunConfig, rows: list):
    cols = _input_columns(cfg) + ["equation", "h", "residual", "normalized_residual", "order", "error"]
    cp = base_params(cfg.prm)
    out = []
    for row in rows:
        base = _echo(cfg, row)
        try:
            vals = _row_floats(row, 5)
            reps = system_residual(_branch(vals[0]), cp, QuadArgs(*vals[1:]), opts=cfg.opts)
            for k, rep in enumerate(reps, start=1):
                out.append(dict(base, equation=k, h=rep.h, residual=rep.residual,
                                normalized_residual=rep.normalized_residual,
                                order=rep.order_estimate, error=""))
        except ROW_ERRORS as exc:
            out.append(dict(base, equation=0, h=float("nan"), residual=float("nan"),
                            normalized_residual=float("nan"), order=float("nan"), error=str(exc)))
    return cols, out


def cmd_singularity(cfg: RunConfig, rows: list):
    cols = _input_columns(cfg) + ["slope", "constant", "reference", "ratio", "error"]
    direction = cfg.direction or (1.0,) * cfg.prm.p
    out = []
    for row in rows:
        rec = _echo(cfg, row)
        try:
            x0 = _row_floats(row, cfg.prm.p)
            fit = singularity_fit(direction, x0, cfg.prm, ks=cfg.ks, opts=cfg.opts)
            rec.update(slope=fit.slope, constant=fit.constant, reference=fit.reference,
                       ratio=fit.ratio, error="")
        except ROW_ERRORS as exc:
            rec.update(slope=float("nan"), constant=float("nan"), reference=float("nan"),
                       ratio=float("nan"), error=str(exc))
        out.append(rec)
    return cols, out


def cmd_selftest(cfg: RunConfig, rows: list):
    cols = ["suite", "passed", "cases", "seconds", "detail"]
    results = _suites.run_suites(cfg.opts, cfg.seed, scale=0.2 if cfg.quick else 1.0)
    out = [dict(suite=r.name, passed=r.passed, cases=r.cases, seconds=round(r.seconds, 3),
                detail=r.detail) for r in results]
    return cols, out


_COMMANDS = {
    "eval": cmd_eval,
    "residual": cmd_residual,
    "system": cmd_system,
    "singularity": cmd_singularity,
    "selftest": cmd_selftest,
}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, np.generic):
        return v.item()
    return v


def render(cfg: RunConfig, cols, rows) -> str:
    if cfg.format == "json":
        doc = {"header": cfg.header(), "columns": cols,
               "rows": [{c: _json_value(r.get(c)) for c in cols} for r in rows]}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps(cfg.header(), separators=(",", ":")) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(r.get(c, "")) for c in cols])
    return buf.getvalue()


def _selftest_matrix(rows) -> str:
    width = max(len(r["suite"]) for r in rows)
    lines = [f"{r['suite']:<{width}}  {'PASS' if r['passed'] else 'FAIL'}  "
             f"{r['cases']:>5} cases  {r['seconds']:7.2f}s  {r['detail']}" for r in rows]
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig) -> int:
    rows_in = read_rows(cfg) if cfg.command != "selftest" else []
    cols, rows = _COMMANDS[cfg.command](cfg, rows_in)
    text = render(cfg, cols, rows)
    if cfg.output:
        try:
            with open(cfg.output, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise ConfigError(f"cannot write {cfg.output}: {exc}") from None
    if cfg.command == "selftest":
        if cfg.output:
            sys.stdout.write(_selftest_matrix(rows))
        else:
            sys.stdout.write(_selftest_matrix(rows) if cfg.format == "csv" else text)
        return EXIT_OK if all(r["passed"] for r in rows) else EXIT_SUITE
    if not cfg.output:
        sys.stdout.write(text)
    return EXIT_ROWS if any(r["error"] for r in rows) else EXIT_OK


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        return run(make_config(ns))
    except ConfigError as exc:
        print(f"singhelm: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
