"""Command-line interface: ``dunkl-hermite <command> [flags]``.

Exit statuses: 0 ok, 2 invalid flags, 3 numerical failure, 4 selftest failure.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, acceptance, config
from .analysis import (
    DomainGrid,
    check_lipschitz_bound,
    check_mixed_bound,
    check_omega_bound,
    check_peetre_bound,
    convergence_sweep,
)
from .core import DunklParam, PrecisionExhausted
from .corpus import get
from .hermite import HermiteQuery, gf_check, hermite_h, hermite_H
from .operators import OperatorConfig, apply, moments

EXIT_INVALID = 2
EXIT_NUMERIC = 3
EXIT_SELFTEST = 4

COMMANDS = ("eval", "moments", "hermite", "gfcheck", "bounds", "sweep", "selftest")


class InvalidInput(click.ClickException):
    exit_code = EXIT_INVALID


# ---------------------------------------------------------------------------
# Flag parsing
# ---------------------------------------------------------------------------


def _float_list(ctx, param, value):
    if value is None:
        return None
    try:
        out = tuple(float(v) for v in str(value).split(",") if v.strip())
    except ValueError:
        raise InvalidInput(f"--{param.name.replace('_', '-')} expects comma-separated numbers") from None
    if not out or not all(math.isfinite(v) for v in out):
        raise InvalidInput(f"--{param.name.replace('_', '-')} expects finite numbers")
    return out


def _int_list(ctx, param, value):
    out = _float_list(ctx, param, value)
    if out is None:
        return None
    if any(v != int(v) for v in out):
        raise InvalidInput(f"--{param.name.replace('_', '-')} expects integers")
    return tuple(int(v) for v in out)


def _read_config(path: str) -> dict:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInput(f"{path}:{lineno}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key.lstrip("-").replace("-", "_").lower()] = val
    return values


def _common(fn):
    """Flags shared by every command except selftest."""
    opts = [
        click.option("--fn", "fn", default="one", show_default=True, help="Corpus function label."),
        click.option("--n", "n", default="10", show_default=True, callback=_int_list, help="Comma list of n."),
        click.option("--mu", type=float, default=0.0, show_default=True),
        click.option("--alpha", type=float, default=0.0, show_default=True),
        click.option("--a", "a", type=float, default=0.0, show_default=True, help="Grid left end."),
        click.option("--b", "b", type=float, default=2.0, show_default=True, help="Grid right end."),
        click.option("--points", type=int, default=config.DEFAULT_POINTS, show_default=True),
        click.option("--x", "x", default=None, callback=_float_list, help="Comma list of x; overrides the grid."),
        click.option("--eps-term", type=float, default=1e-14, show_default=True),
        click.option("--eps-cancel", type=float, default=1e-8, show_default=True),
        click.option("--seed", type=int, default=0, show_default=True, help="Seed for metadata spot checks."),
        click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True),
        click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


_COMMON_KEYS = frozenset(
    ["fn", "n", "mu", "alpha", "a", "b", "points", "x", "eps_term", "eps_cancel", "seed", "fmt", "out"]
)


class Run:
    """Validated flags of one invocation."""

    def __init__(self, command: str, flags: dict):
        self.command = command
        self.flags = flags
        f = flags
        try:
            self.p = DunklParam(f["mu"], f["eps_term"], f["eps_cancel"])
            self.grid = DomainGrid(f["a"], f["b"], f["points"])
            self.cfgs = [OperatorConfig(n, f["alpha"], self.p) for n in f["n"]]
        except ValueError as exc:
            raise InvalidInput(str(exc)) from None
        if f["x"] is not None and any(x < 0 for x in f["x"]):
            raise InvalidInput("x must be ≥ 0")
        self.xs = list(f["x"]) if f["x"] is not None else [float(v) for v in self.grid.xs]

    def target(self):
        try:
            return get(self.flags["fn"], self.flags["seed"])
        except KeyError as exc:
            raise InvalidInput(exc.args[0]) from None

    def meta(self) -> dict:
        g = self.grid
        return {
            "version": __version__,
            "command": self.command,
            "flags": {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(self.flags.items())},
            "grid": {"a": g.a, "b": g.b, "points": g.points},
        }


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if v is None:
        return ""
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def render(columns: list[str], rows: list[dict], fmt: str, meta: dict) -> str:
    if fmt == "json":
        doc = {"meta": meta, "rows": [{c: _json_value(r.get(c)) for c in columns} for r in rows]}
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def emit(run: Run, columns: list[str], rows: list[dict]) -> None:
    text = render(columns, rows, run.flags["fmt"], run.meta())
    if run.flags["out"]:
        with open(run.flags["out"], "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _command(name: str):
    """Wrap a command body: build the Run, translate failures to exit statuses."""

    def deco(body):
        @functools.wraps(body)
        def wrapper(**flags):
            run = Run(name, flags)
            try:
                columns, rows = body(run, **{k: v for k, v in flags.items() if k not in _COMMON_KEYS})
            except PrecisionExhausted as exc:
                raise _Numeric(f"precision exhausted: {exc}") from None
            except OverflowError as exc:
                raise _Numeric(f"overflow: {exc}") from None
            except ValueError as exc:
                raise InvalidInput(str(exc)) from None
            emit(run, columns, rows)

        return wrapper

    return deco


class _Numeric(click.ClickException):
    exit_code = EXIT_NUMERIC


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="dunkl-hermite")
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="key=value file supplying flag defaults; explicit flags win.",
)
@click.pass_context
def main(ctx, config_path):
    """Dunkl-Hermite operators: evaluation, identities, bounds and sweeps."""
    if config_path:
        values = _read_config(config_path)
        ctx.default_map = {name: dict(values) for name in COMMANDS}


@main.command("eval")
@_common
@_command("eval")
def cmd_eval(run: Run):
    """T_n(g; x) on the grid, with its error and truncation data."""
    g = run.target()
    rows = []
    for cfg in run.cfgs:
        for x in run.xs:
            r = apply(cfg, g, x)
            gx = float(g(np.array(x)))
            rows.append(
                {"n": cfg.n, "x": x, "value": r.value, "g": gx, "error": abs(r.value - gx),
                 "terms_used": r.terms_used, "tail_bound": r.tail_bound, "cancel_error": r.cancel_error}
            )
    return ["n", "x", "value", "g", "error", "terms_used", "tail_bound", "cancel_error"], rows


@main.command("moments")
@_common
@_command("moments")
def cmd_moments(run: Run):
    """Closed-form moments next to their series sums."""
    cols = ["n", "x", "m0", "m1", "m2", "m0_series", "m1_series", "m2_series", "delta1", "delta2", "ratio", "max_rel_gap"]
    rows = []
    for cfg in run.cfgs:
        for x in run.xs:
            r = moments(cfg, x)
            rows.append(
                {"n": cfg.n, "x": x, "m0": r.m0, "m1": r.m1, "m2": r.m2, "m0_series": r.m0_s,
                 "m1_series": r.m1_s, "m2_series": r.m2_s, "delta1": r.delta1, "delta2": r.delta2,
                 "ratio": r.ratio, "max_rel_gap": r.max_rel_gap}
            )
    return cols, rows


@main.command("hermite")
@_common
@click.option("--xi", default="1", callback=_float_list, show_default=True, help="Comma list of xi.")
@_command("hermite")
def cmd_hermite(run: Run, xi):
    """h_n(xi, alpha) and H_n(xi, alpha) for each degree in --n."""
    rows = []
    for cfg in run.cfgs:
        for v in xi:
            q = HermiteQuery(cfg.n, v, cfg.alpha, run.p)
            rows.append({"n": cfg.n, "xi": v, "alpha": cfg.alpha, "mu": run.p.mu, "h": hermite_h(q), "H": hermite_H(q)})
    return ["n", "xi", "alpha", "mu", "h", "H"], rows


@main.command("gfcheck")
@_common
@click.option("--order", default="0,1,2", callback=_int_list, show_default=True, help="Comma list from {0,1,2}.")
@click.option("--xi", default="1", callback=_float_list, show_default=True, help="Comma list of xi.")
@click.option("--t", "t", default="0.25", callback=_float_list, show_default=True, help="Comma list of t.")
@click.option("--terms", type=int, default=60, show_default=True, help="Partial-sum length N.")
@_command("gfcheck")
def cmd_gfcheck(run: Run, order, xi, t, terms):
    """Generating-function identities: partial sums against closed forms."""
    rows = []
    for o in order:
        for v in xi:
            for tv in t:
                r = gf_check(run.p, o, v, run.flags["alpha"], tv, terms)
                rows.append(
                    {"order": o, "mu": run.p.mu, "xi": v, "alpha": run.flags["alpha"], "t": tv, "lhs": r.lhs,
                     "rhs": r.rhs, "abs_gap": r.abs_gap, "envelope": r.envelope, "terms": r.terms}
                )
    return ["order", "mu", "xi", "alpha", "t", "lhs", "rhs", "abs_gap", "envelope", "terms"], rows


@main.command("bounds")
@_common
@click.option("--M-const", "m_const", type=float, default=1.0, show_default=True,
              help="Stand-in for the unspecified constant of the Peetre and mixed bounds.")
@_command("bounds")
def cmd_bounds(run: Run, m_const):
    """Error bounds next to the actual error; T9/T10 are informational."""
    if not m_const > 0:
        raise ValueError("M-const must be positive")
    g = run.target()
    rows = []
    for cfg in run.cfgs:
        for x in run.xs:
            reports = []
            if g.known_lipschitz is not None:
                reports.append(check_lipschitz_bound(cfg, g, x))
            reports.append(check_omega_bound(cfg, g, x, run.grid))
            reports.append(check_peetre_bound(cfg, g, x, run.grid, m_const))
            reports.append(check_mixed_bound(cfg, g, x, run.grid, m_const))
            for r in reports:
                rows.append(
                    {"n": cfg.n, "x": x, "theorem": r.theorem_id, "actual": r.actual, "bound": r.bound,
                     "slack": r.slack, "holds": r.holds, "asserted": r.theorem_id in ("T6", "T7")}
                )
    return ["n", "x", "theorem", "actual", "bound", "slack", "holds", "asserted"], rows


@main.command("sweep")
@_common
@_command("sweep")
def cmd_sweep(run: Run):
    """Sup-norm error over the grid for each n, plus Korovkin test-function rows."""
    g = run.target()
    n_list = [c.n for c in run.cfgs]
    grid = DomainGrid(run.grid.a, run.grid.b, run.grid.points)
    if run.flags["x"] is not None:
        raise ValueError("sweep runs on the grid; drop --x")
    table = convergence_sweep(run.p.mu, run.flags["alpha"], n_list, g, grid, run.p)
    rows = [
        {"kind": "error", "n": r.n, "sup_error": r.sup_error, "delta2_max": r.delta2_max, "t7_bound_max": r.t7_bound_max}
        for r in table.rows
    ]
    rows += [{"kind": f"korovkin_e{k.i}", "n": k.n, "sup_error": k.sup_error} for k in table.korovkin]
    return ["kind", "n", "sup_error", "delta2_max", "t7_bound_max"], rows


@main.command("selftest")
@click.option("--grid-points", type=int, default=config.DEFAULT_POINTS, show_default=True)
@click.option("--mu", "mu", default=None, callback=_float_list, help="Comma list of mu (default 0,0.5,2).")
def cmd_selftest(grid_points, mu):
    """Run the acceptance suite; one PASS/FAIL line per criterion."""
    try:
        settings = acceptance.Settings(grid_points, mu if mu is not None else config.STANDARD_MU)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None
    verdicts = acceptance.run_all(settings, emit=click.echo)
    if not all(v.passed for v in verdicts):
        sys.exit(EXIT_SELFTEST)


def run(argv=None) -> int:
    """Entry point that keeps every diagnostic on one line."""
    try:
        main.main(args=argv, prog_name="dunkl-hermite", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return exc.exit_code if isinstance(exc, (InvalidInput, _Numeric)) else EXIT_INVALID
    except click.exceptions.Abort:
        click.echo("error: aborted", err=True)
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)
    return 0


def entry() -> None:
    sys.exit(run())
