"""Command-line front end.

Subcommands::

    prodgeom check       --config run.cfg [--out DIR] [--grid N] [--tol NAME=VALUE ...]
    prodgeom export      --config run.cfg [--out DIR] [--grid N]
    prodgeom sweep       --config run.cfg [--out DIR] [--grid N] [--tol NAME=VALUE ...]
    prodgeom ode-compare --config run.cfg [--out DIR]

The config file holds flat ``section.key = value`` lines; ``#`` starts a
comment.  Exit codes: 0 when every check passes, 1 when a check fails (the
failing checks are named on stderr), 2 on a configuration error.

Chart selection::

    chart.kind = family        # family | fixture
    family.p = 2               # or family.r / family.h
    family.q = 1
    family.which = Y           # Y | Z
    family.m = 2
    family.pad = 0             # extra sphere dimensions
    fixture.name = tube_k1_S2  # any name in prodgeom.fixtures.CORPUS
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .ambient import TOL, Chart, Tolerances, pad_chart
from .errors import ConfigError, GeometryError, UnsupportedDimension

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
ODE_MAX_DEVIATION = 1e-7


# --- configuration ----------------------------------------------------------

def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``section.key = value`` lines into a flat dict (later keys win)."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key.count(".") != 1 or not all(key.split(".")):
            raise ConfigError(f"line {lineno}: key {key!r} must look like section.key")
        out[key] = value
    return out


@dataclass
class RunConfig:
    values: dict[str, str] = field(default_factory=dict)
    tol: Tolerances = TOL
    grid: int = 11
    out: Path = Path("out")

    def get(self, key: str, default=None):
        return self.values.get(key, default)

    def number(self, key: str, default=None) -> float:
        raw = self.values.get(key)
        if raw is None:
            if default is None:
                raise ConfigError(f"missing required key {key}")
            return default
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{key} = {raw!r} is not a number") from None

    def integer(self, key: str, default: int) -> int:
        value = self.number(key, float(default))
        if value != int(value):
            raise ConfigError(f"{key} must be an integer")
        return int(value)

    def numbers(self, key: str) -> list[float]:
        raw = self.values.get(key)
        if raw is None:
            return []
        try:
            return [float(x) for x in raw.replace(",", " ").split()]
        except ValueError:
            raise ConfigError(f"{key} = {raw!r} is not a list of numbers") from None

    def echo(self) -> dict:
        return {
            "values": dict(sorted(self.values.items())),
            "grid": self.grid,
            "tolerances": {k: getattr(self.tol, k) for k in ("surface", "frame", "sff", "compat", "rank")},
        }


def parse_tol_overrides(items: list[str] | None) -> dict[str, float]:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--tol expects NAME=VALUE, got {item!r}")
        name, value = item.split("=", 1)
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"--tol {item!r}: value is not a number") from None
    return out


def load_config(args: argparse.Namespace) -> RunConfig:
    values: dict[str, str] = {}
    if args.config is not None:
        try:
            values = parse_config_text(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    tol_values = {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith("tol.")}
    tol_over = {}
    for name, raw in tol_values.items():
        try:
            tol_over[name] = float(raw)
        except ValueError:
            raise ConfigError(f"tol.{name} = {raw!r} is not a number") from None
    tol_over.update(parse_tol_overrides(args.tol))
    try:
        tol = TOL.override(**tol_over)
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc).strip("'\"")) from None
    cfg = RunConfig(values, tol)
    cfg.grid = args.grid if args.grid is not None else cfg.integer("grid.n", 11)
    if cfg.grid < 3:
        raise ConfigError("grid resolution must be at least 3 points per axis")
    cfg.out = Path(args.out if args.out is not None else values.get("output.dir", "out"))
    return cfg


def family_params(cfg: RunConfig):
    from .family import FamilyParams

    m = cfg.integer("family.m", 2)
    try:
        if "family.r" in cfg.values or "family.h" in cfg.values:
            return FamilyParams.from_rh(cfg.number("family.r"), cfg.number("family.h", 0.0), m)
        return FamilyParams(cfg.number("family.p"), cfg.number("family.q"), m)
    except GeometryError as exc:
        raise ConfigError(str(exc)) from None


def build_chart(cfg: RunConfig) -> Chart:
    kind = cfg.get("chart.kind", "family")
    if kind == "family":
        from .family import Y_chart, Z_chart

        fp = family_params(cfg)
        which = cfg.get("family.which", "Y").upper()
        if which not in ("Y", "Z"):
            raise ConfigError("family.which must be Y or Z")
        try:
            chart = Y_chart(fp) if which == "Y" else Z_chart(fp)
        except GeometryError as exc:
            raise ConfigError(str(exc)) from None
        pad = cfg.integer("family.pad", 0)
        return pad_chart(chart, pad) if pad else chart
    if kind == "fixture":
        from .fixtures import build

        name = cfg.get("fixture.name")
        if name is None:
            raise ConfigError("chart.kind = fixture needs fixture.name")
        try:
            return build(name)
        except KeyError as exc:
            raise ConfigError(exc.args[0]) from None
    raise ConfigError(f"unknown chart.kind {kind!r}; use family or fixture")


# --- output helpers ---------------------------------------------------------

def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def report_payload(cfg: RunConfig, command: str, reports: list[dict], passed: bool, **extra) -> dict:
    return {"schema": SCHEMA, "version": __version__, "command": command, "config": cfg.echo(),
            "reports": reports, "pass": bool(passed), **extra}


def _fmt(x: float) -> str:
    return "%.12g" % x


# --- check ------------------------------------------------------------------

def cmd_check(cfg: RunConfig) -> int:
    from .diagnostics import overall_pass, run_suite

    chart = build_chart(cfg)
    reports = run_suite(chart, n=cfg.grid, tol=cfg.tol)
    passed = overall_pass(reports)
    payload = report_payload(cfg, "check", [r.to_dict() for r in reports], passed, chart=chart.label)
    write_text(cfg.out / "report.json", dump_json(payload))
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name:<22} {r.max_residual:.3e} (tol {r.tolerance:g})")
    if not passed:
        failing = ", ".join(r.name for r in reports if not r.passed)
        print(f"failing checks: {failing}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# --- export -----------------------------------------------------------------

def grid_faces(n0: int, n1: int) -> list[tuple[int, int, int, int]]:
    """1-based quad faces of an n0 x n1 vertex grid stored with the second index fastest."""
    faces = []
    for i in range(n0 - 1):
        for j in range(n1 - 1):
            a = i * n1 + j + 1
            faces.append((a, a + n1, a + n1 + 1, a + 1))
    return faces


def obj_text(vertices: np.ndarray, faces) -> str:
    lines = [f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}" for x, y, z in vertices]
    lines += ["f " + " ".join(str(i) for i in face) for face in faces]
    return "\n".join(lines) + "\n"


def _coord_triple(cfg: RunConfig, data: np.ndarray) -> list[int]:
    raw = cfg.get("export.coords", "auto")
    if raw == "auto":
        spread = np.ptp(data, axis=0)
        keep = np.sort(np.argsort(-spread, kind="stable")[:3])
        return [int(i) for i in keep]
    idx = [int(x) for x in cfg.numbers("export.coords")]
    if len(idx) != 3 or not all(0 <= i < data.shape[1] for i in idx):
        raise ConfigError(f"export.coords must be three indices in 0..{data.shape[1] - 1}")
    return idx


def cmd_export(cfg: RunConfig) -> int:
    chart = build_chart(cfg)
    if chart.m != 2:
        raise UnsupportedDimension(f"mesh export needs a surface (m = 2), got m = {chart.m}")
    grid = chart.grid(cfg.grid)
    points = chart(grid)
    projection = cfg.get("export.projection", "coords")
    if projection == "coords":
        data = points
    elif projection == "phi":
        from .family import conformal_phi

        data = conformal_phi(points[:, :-1], points[:, -1])
    else:
        raise ConfigError("export.projection must be coords or phi")
    idx = _coord_triple(cfg, data)
    vertices = data[:, idx]
    write_text(cfg.out / "mesh.obj", obj_text(vertices, grid_faces(cfg.grid, cfg.grid)))

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"u{i}" for i in range(grid.shape[1])] + [f"x{i}" for i in range(points.shape[1])])
    for u, x in zip(grid, points):
        writer.writerow([_fmt(v) for v in u] + [_fmt(v) for v in x])
    write_text(cfg.out / "points.csv", buf.getvalue())
    print(f"wrote {len(vertices)} vertices, {(cfg.grid - 1) ** 2} faces (coordinates {idx} of {projection})")
    return EXIT_OK


# --- sweep ------------------------------------------------------------------

SWEEP_COLUMNS = ["p", "q", "r", "h", "ell", "max_umbilicity", "phi_25", "phi_50", "phi_75", "pass"]


def sweep_points(cfg: RunConfig) -> list[tuple[float, float]]:
    """Explicit ``sweep.points = p q, p q, ...`` or the product of ``sweep.p`` and ``sweep.q_fraction``.

    A q fraction f puts q = (p-1)^2 + f (p^2 - (p-1)^2), so f = 0 is the
    boundary h = 0 and 0 < f < 1 the interior.
    """
    raw = cfg.get("sweep.points")
    if raw is not None:
        pairs = []
        for chunk in raw.split(","):
            parts = chunk.split()
            if len(parts) != 2:
                raise ConfigError(f"sweep.points entry {chunk.strip()!r} must be 'p q'")
            try:
                pairs.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise ConfigError(f"sweep.points entry {chunk.strip()!r} is not numeric") from None
        return pairs
    ps, fs = cfg.numbers("sweep.p"), cfg.numbers("sweep.q_fraction")
    if not ps or not fs:
        raise ConfigError("sweep needs sweep.points or both sweep.p and sweep.q_fraction")
    return [(p, (p - 1.0) ** 2 + f * (2.0 * p - 1.0)) for p in ps for f in fs]


def sweep_row(p: float, q: float, grid: int, tol: Tolerances) -> dict:
    """Everything one CSV row needs; pure, so rows can run in parallel."""
    from .diagnostics import codimension_reduction_check, umbilicity_residual
    from .family import FamilyParams, Y_chart
    from .profile import warping_fingerprint

    fp = FamilyParams(p, q)
    chart = Y_chart(fp)
    umb = max(umbilicity_residual(chart, u) for u in chart.grid(grid))
    red = codimension_reduction_check(pad_chart(chart, 2), rank_tol=tol.rank)
    expected_ell = 1 if fp.h == 0 else 2
    fingerprint = warping_fingerprint(fp)
    passed = umb <= tol.sff and red.ell == expected_ell
    return {"p": p, "q": q, "r": fp.r, "h": fp.h, "ell": red.ell, "max_umbilicity": umb,
            "phi_25": fingerprint[0], "phi_50": fingerprint[1], "phi_75": fingerprint[2], "pass": passed}


def sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([row["ell"] if c == "ell" else str(row[c]).lower() if c == "pass" else _fmt(row[c])
                         for c in SWEEP_COLUMNS])
    return buf.getvalue()


def cmd_sweep(cfg: RunConfig) -> int:
    from .family import in_family_domain

    pairs = sweep_points(cfg)
    bad = [(p, q) for p, q in pairs if not in_family_domain(p, q)]
    if bad:
        raise ConfigError(f"sweep point (p, q) = {bad[0]} is not in the parameter set (p-1)^2 <= q < p^2")
    workers = cfg.integer("sweep.workers", 1)
    args = [(p, q, cfg.grid, cfg.tol) for p, q in pairs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(sweep_row, *zip(*args)))
    else:
        rows = [sweep_row(*a) for a in args]
    write_text(cfg.out / "sweep.csv", sweep_csv(rows))
    passed = all(r["pass"] for r in rows)
    reports = [{k: (bool(v) if k == "pass" else v) for k, v in r.items()} for r in rows]
    write_text(cfg.out / "sweep.json", dump_json(report_payload(cfg, "sweep", reports, passed)))
    for r in rows:
        print(f"{'PASS' if r['pass'] else 'FAIL'} p={r['p']:g} q={r['q']:g} h={r['h']:.4g} ell={r['ell']} "
              f"umbilicity={r['max_umbilicity']:.2e}")
    if not passed:
        failing = ", ".join(f"(p={r['p']:g}, q={r['q']:g})" for r in rows if not r["pass"])
        print(f"failing checks: umbilicity/ell at {failing}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# --- ode-compare --------------------------------------------------------------

def ode_compare(p: float, q: float, sign: int, lo: float, hi: float, tol: float = 1e-9) -> dict:
    """Integrate the profile ODE from the closed-form initial data and compare along the interval."""
    from .profile import ODEParams, closed_form_basis, integrate_ode

    params = ODEParams.default(p, q, lo, hi)
    basis = closed_form_basis(params)
    a = params.interval[0]
    f0, df0, _ = basis.rho(sign, a)
    sol = integrate_ode(params, float(f0), float(df0), tol=tol)
    exact, dexact, _ = basis.rho(sign, sol.s)
    return {"p": p, "q": q, "sign": sign, "interval": list(params.interval),
            "max_abs_error_f": float(np.max(np.abs(sol.f - exact))),
            "max_abs_error_df": float(np.max(np.abs(sol.df - dexact))),
            "steps": int(sol.steps), "endpoint_change": float(sol.endpoint_change)}


def cmd_ode_compare(cfg: RunConfig) -> int:
    from .errors import BranchUnavailable, IntervalLeavesDomain, OutOfDomain

    p, q = cfg.number("ode.p", cfg.number("family.p", 2.0)), cfg.number("ode.q", cfg.number("family.q", 1.0))
    signs = [int(s) for s in cfg.numbers("ode.sign")] or [1, -1]
    lo, hi = cfg.number("ode.lo", 0.05), cfg.number("ode.hi", 0.95)
    limit = cfg.number("ode.max_deviation", ODE_MAX_DEVIATION)
    try:
        results = [ode_compare(p, q, s, lo, hi) for s in signs]
    except (OutOfDomain, IntervalLeavesDomain, BranchUnavailable) as exc:
        raise ConfigError(str(exc)) from None
    reports = []
    for res in results:
        worst = max(res["max_abs_error_f"], res["max_abs_error_df"])
        reports.append({**res, "name": f"ode_sign_{res['sign']:+d}", "max_residual": worst,
                        "tolerance": limit, "passed": worst <= limit})
        print(f"{'PASS' if worst <= limit else 'FAIL'} sign {res['sign']:+d}: max deviation {worst:.3e} "
              f"after {res['steps']} RK4 steps")
    passed = all(r["passed"] for r in reports)
    write_text(cfg.out / "ode_compare.json", dump_json(report_payload(cfg, "ode-compare", reports, passed)))
    if not passed:
        print("failing checks: " + ", ".join(r["name"] for r in reports if not r["passed"]), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# --- entry point --------------------------------------------------------------

COMMANDS = {"check": cmd_check, "export": cmd_export, "sweep": cmd_sweep, "ode-compare": cmd_ode_compare}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prodgeom", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", metavar="PATH")
        p.add_argument("--out", metavar="DIR")
        p.add_argument("--grid", metavar="N", type=int)
        p.add_argument("--tol", metavar="NAME=VALUE", action="append")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnsupportedDimension as exc:
        # asking for a mesh of a higher-dimensional chart is a configuration mistake
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
