"""Command-line entry point: ``run``, ``constants`` and ``convergence``.

Exit codes: 0 success, 1 a check failed, 2 invalid configuration or flags,
3 the solver aborted.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .constants import check_lambda, constants_table, lambda_threshold, zeta_barenblatt
from .errors import ConfigError, DomainError, InsufficientData, PreconditionError, SolverError, UnsupportedOperation
from .exact import ExactSolution
from .fields import Field, RadialGrid
from .geometry import ModelManifold, Region
from .solver import SolverConfig, bump_initial, convergence_study, run
from . import verify as V

log = logging.getLogger("trudinger")

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3

CHECKS = (
    "mass",
    "positivity",
    "lambda_monotone",
    "integral_max_principle",
    "davies_gaffney",
    "neighborhood_decay",
    "lambda_decay",
    "envelope",
    "sharpness",
    "mean_value",
)
# checks whose statements need lambda >= max(p, p/(p-1))
LAMBDA_CHECKS = {"integral_max_principle", "davies_gaffney", "neighborhood_decay"}
DG_RATIOS = (1.0, 2.0, 4.0)
ENVELOPE_T_FACTORS = (1.0, 1.5, 2.0, 3.0, 4.0)
MEAN_VALUE_TS = (1.0, 4.0, 16.0)


# configuration -----------------------------------------------------------

@dataclass
class ExperimentConfig:
    p: float
    n: int
    manifold: dict
    r_max: float
    cells: int
    t0: float
    t_end: float
    snapshots: list
    initial: dict
    lam: float
    region_a: float | None
    rho: float | str
    rho_c: float
    rho_C: float
    checks: list
    c_exp: float
    envelope_mode: str
    envelope_T0: float
    theta: float
    gamma_exponent: float | None
    cfl: float
    floor: float
    max_steps: int
    output_dir: str
    base_dir: Path = field(default=Path("."))


class _Loader:
    """Strict reader that reports the line of the offending key."""

    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source

    def line_of(self, path: tuple) -> int:
        pos = 0
        for key in path:
            if isinstance(key, int):
                continue
            m = re.compile(r'"%s"\s*:' % re.escape(key)).search(self.text, pos)
            if m is None:
                break
            pos = m.start()
        return self.text.count("\n", 0, pos) + 1

    def fail(self, path: tuple, msg: str):
        where = ".".join(str(k) for k in path) or "<root>"
        raise ConfigError(f"{self.source}:{self.line_of(path)}: {where}: {msg}")

    def obj(self, value, path, allowed, required=()):
        if not isinstance(value, dict):
            self.fail(path, "expected an object")
        for k in value:
            if k not in allowed:
                self.fail(path + (k,), f"unknown key {k!r} (allowed: {', '.join(sorted(allowed))})")
        for k in required:
            if k not in value:
                self.fail(path, f"missing required key {k!r}")
        return value

    def num(self, d, key, path, default=None, *, lo=None, lo_open=False, hi=None, integer=False):
        if key not in d:
            if default is None:
                self.fail(path, f"missing required key {key!r}")
            return default
        v = d[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail(path + (key,), f"expected a number, got {v!r}")
        if integer and int(v) != v:
            self.fail(path + (key,), f"expected an integer, got {v!r}")
        if not math.isfinite(v):
            self.fail(path + (key,), "must be finite")
        if lo is not None and (v <= lo if lo_open else v < lo):
            self.fail(path + (key,), f"must be {'>' if lo_open else '>='} {lo}, got {v}")
        if hi is not None and v > hi:
            self.fail(path + (key,), f"must be <= {hi}, got {v}")
        return int(v) if integer else float(v)

    def string(self, d, key, path, choices=None, default=None):
        if key not in d:
            if default is None:
                self.fail(path, f"missing required key {key!r}")
            return default
        v = d[key]
        if not isinstance(v, str):
            self.fail(path + (key,), f"expected a string, got {v!r}")
        if choices is not None and v not in choices:
            self.fail(path + (key,), f"must be one of {', '.join(choices)}, got {v!r}")
        return v


def _reject_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ConfigError(f"duplicate key {k!r}")
        out[k] = v
    return out


def load_config(path) -> ExperimentConfig:
    """Parse and validate an experiment file; raises :class:`ConfigError`."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read: {exc.strerror}") from exc
    try:
        raw = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    L = _Loader(text, str(path))
    top = L.obj(raw, (), {"p", "n", "manifold", "grid", "time", "initial", "lambda", "region", "checks",
                          "envelope", "theta", "gamma_exponent", "solver", "output_dir"},
                required=("p", "n", "grid", "time", "initial"))
    p = L.num(top, "p", (), lo=1.0, lo_open=True)
    n = L.num(top, "n", (), lo=1, integer=True)

    man = L.obj(top.get("manifold", {"kind": "euclidean"}), ("manifold",), {"kind", "C", "alpha", "r0", "csv"})
    kind = L.string(man, "kind", ("manifold",), ("euclidean", "polynomial", "custom"), "euclidean")
    manifold = {"kind": kind}
    if kind == "polynomial":
        manifold["C"] = L.num(man, "C", ("manifold",), 1.0, lo=0.0, lo_open=True)
        manifold["alpha"] = L.num(man, "alpha", ("manifold",), lo=0.0, lo_open=True, hi=n)
        manifold["r0"] = L.num(man, "r0", ("manifold",), 0.0, lo=0.0)
    elif kind == "custom":
        manifold["csv"] = L.string(man, "csv", ("manifold",))
    for k in man:
        if k not in manifold and k != "kind":
            L.fail(("manifold", k), f"key {k!r} does not apply to a {kind} profile")

    grid = L.obj(top["grid"], ("grid",), {"r_max", "cells"}, required=("r_max", "cells"))
    r_max = L.num(grid, "r_max", ("grid",), lo=0.0, lo_open=True)
    cells = L.num(grid, "cells", ("grid",), lo=16, integer=True)

    tm = L.obj(top["time"], ("time",), {"t0", "t_end", "snapshots"}, required=("t_end",))
    t0 = L.num(tm, "t0", ("time",), 0.0, lo=0.0)
    t_end = L.num(tm, "t_end", ("time",), lo=t0, lo_open=True)
    snaps = tm.get("snapshots", 11)
    if isinstance(snaps, list):
        if not snaps or any(isinstance(s, bool) or not isinstance(s, (int, float)) for s in snaps):
            L.fail(("time", "snapshots"), "expected a non-empty list of numbers")
        snapshots = [float(s) for s in snaps]
        if any(b <= a for a, b in zip(snapshots, snapshots[1:])):
            L.fail(("time", "snapshots"), "times must be strictly increasing")
        if snapshots[0] < t0 or snapshots[-1] > t_end:
            L.fail(("time", "snapshots"), f"times must lie in [{t0}, {t_end}]")
    else:
        count = L.num(tm, "snapshots", ("time",), 11, lo=2, integer=True)
        snapshots = list(np.linspace(t0, t_end, count))

    ini = L.obj(top["initial"], ("initial",), {"kind", "a", "m", "csv"}, required=("kind",))
    ikind = L.string(ini, "kind", ("initial",), ("barenblatt", "bump", "csv"))
    initial = {"kind": ikind}
    if ikind == "bump":
        initial["a"] = L.num(ini, "a", ("initial",), lo=0.0, lo_open=True)
        initial["m"] = L.num(ini, "m", ("initial",), 2.0, lo=0.0, lo_open=True)
    elif ikind == "csv":
        initial["csv"] = L.string(ini, "csv", ("initial",))
    elif t0 <= 0:
        L.fail(("time", "t0"), "a self-similar initial state needs t0 > 0")
    if ikind == "barenblatt" and kind == "custom":
        L.fail(("initial", "kind"), "no self-similar solution is available on a custom profile")
    for k in ini:
        if k not in initial and k != "kind":
            L.fail(("initial", k), f"key {k!r} does not apply to {ikind} initial data")

    checks = top.get("checks", ["mass", "lambda_monotone"])
    if not isinstance(checks, list) or any(not isinstance(c, str) for c in checks):
        L.fail(("checks",), "expected a list of check names")
    for c in checks:
        if c not in CHECKS:
            L.fail(("checks",), f"unknown check {c!r} (known: {', '.join(CHECKS)})")
    if len(set(checks)) != len(checks):
        L.fail(("checks",), "duplicate check name")

    lam = L.num(top, "lambda", (), lambda_threshold(p), lo=0.0, lo_open=True)
    needs_lambda = sorted(LAMBDA_CHECKS.intersection(checks))
    if needs_lambda:
        try:
            check_lambda(p, lam)
        except PreconditionError as exc:
            L.fail(("lambda",), f"{exc}; required by {', '.join(needs_lambda)}")

    reg = L.obj(top.get("region", {}), ("region",), {"a", "rho", "c", "C"})
    region_a = L.num(reg, "a", ("region",), initial.get("a", -1.0), lo=-1.0)
    region_a = None if region_a < 0 else region_a
    rho = reg.get("rho", "auto")
    if rho != "auto":
        rho = L.num(reg, "rho", ("region",), lo=0.0, lo_open=True)
    rho_c = L.num(reg, "c", ("region",), 0.5, lo=0.0, lo_open=True)
    rho_C = L.num(reg, "C", ("region",), 2.0, lo=0.0, lo_open=True)
    region_checks = {"integral_max_principle", "davies_gaffney", "neighborhood_decay", "envelope"}
    if region_a is None and region_checks.intersection(checks):
        L.fail(("region",), "region.a is required by the selected checks")

    env = L.obj(top.get("envelope", {}), ("envelope",), {"c_exp", "mode", "T0"})
    c_exp = L.num(env, "c_exp", ("envelope",), zeta_barenblatt(p) / 2.0, lo=0.0, lo_open=True)
    mode = L.string(env, "mode", ("envelope",), ("fk", "sobolev"), "fk")
    T0 = L.num(env, "T0", ("envelope",), 1.0, lo=0.0, lo_open=True)

    theta = L.num(top, "theta", (), 2.0, lo=1.0, lo_open=True)
    gexp = top.get("gamma_exponent")
    if gexp is not None:
        gexp = L.num(top, "gamma_exponent", (), lo=0.0)

    sol = L.obj(top.get("solver", {}), ("solver",), {"cfl", "floor", "max_steps"})
    cfl = L.num(sol, "cfl", ("solver",), 0.4, lo=0.0, lo_open=True, hi=1.0)
    floor = L.num(sol, "floor", ("solver",), 1e-14, lo=0.0)
    max_steps = L.num(sol, "max_steps", ("solver",), 100_000_000, lo=1, integer=True)

    out = top.get("output_dir", "out")
    if not isinstance(out, str) or not out:
        L.fail(("output_dir",), "expected a non-empty string")

    return ExperimentConfig(
        p=p, n=n, manifold=manifold, r_max=r_max, cells=cells, t0=t0, t_end=t_end,
        snapshots=snapshots, initial=initial, lam=lam, region_a=region_a, rho=rho, rho_c=rho_c,
        rho_C=rho_C, checks=list(checks), c_exp=c_exp, envelope_mode=mode, envelope_T0=T0,
        theta=theta, gamma_exponent=gexp, cfl=cfl, floor=floor, max_steps=max_steps,
        output_dir=out, base_dir=path.parent,
    )


# experiment --------------------------------------------------------------

def _resolve(cfg: ExperimentConfig, name: str) -> Path:
    p = Path(name)
    return p if p.is_absolute() else cfg.base_dir / p


def build_manifold(cfg: ExperimentConfig) -> ModelManifold:
    m = cfg.manifold
    if m["kind"] == "euclidean":
        return ModelManifold.euclidean(cfg.n)
    if m["kind"] == "polynomial":
        return ModelManifold.polynomial(cfg.n, m["alpha"], m["C"], m["r0"])
    r, S = io.read_profile_csv(_resolve(cfg, m["csv"]))
    return ModelManifold.custom(cfg.n, r, S)


def build_initial(cfg: ExperimentConfig, grid: RadialGrid) -> Field:
    ini = cfg.initial
    if ini["kind"] == "bump":
        return bump_initial(grid, ini["a"], ini["m"], cfg.t0)
    if ini["kind"] == "barenblatt":
        m = grid.manifold
        sol = (ExactSolution.barenblatt(cfg.p, cfg.n) if m.is_euclidean
               else ExactSolution.polynomial_model(cfg.p, m.alpha, cfg.n))
        return Field(sol.evaluate(grid.centers, cfg.t0), cfg.t0)
    r, u = io.read_profile_csv(_resolve(cfg, ini["csv"]))
    return Field(np.interp(grid.centers, r, u, right=0.0), cfg.t0)


def _merge_times(*groups) -> np.ndarray:
    t = np.unique(np.concatenate([np.asarray(g, dtype=float) for g in groups if len(g)]))
    keep = [t[0]]
    for v in t[1:]:
        if v - keep[-1] > 1e-12 * max(1.0, abs(v)):
            keep.append(v)
    return np.array(keep)


def _mean_value_plan(cfg: ExperimentConfig):
    t_base = max(cfg.t0, 1.0)
    Ts = [T for T in MEAN_VALUE_TS if t_base + T <= cfg.t_end * (1 + 1e-12)]
    return t_base, Ts


def required_times(cfg: ExperimentConfig) -> np.ndarray:
    extra = []
    if "envelope" in cfg.checks:
        extra.append([cfg.t0 + cfg.envelope_T0 * f for f in ENVELOPE_T_FACTORS
                      if cfg.t0 + cfg.envelope_T0 * f <= cfg.t_end])
    if "mean_value" in cfg.checks:
        t_base, Ts = _mean_value_plan(cfg)
        for T in Ts:
            extra.append(np.linspace(t_base, t_base + T, 33))
    return _merge_times(cfg.snapshots, *extra)


@dataclass
class Family:
    name: str
    results: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    skipped: str = ""

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)


def run_checks(cfg: ExperimentConfig, trace) -> list[Family]:
    p, lam = cfg.p, cfg.lam
    m = trace.grid.manifold
    fams = []
    A = Region(cfg.region_a) if cfg.region_a is not None else None
    elapsed_end = cfg.t_end - cfg.t0
    if cfg.rho == "auto":
        # R^p is half the run so the doubled regime window 2 rho^p still fits
        rho = V.corollary_rho(0.0, (elapsed_end / 2.0) ** (1.0 / p), cfg.rho_c, cfg.rho_C)
    else:
        rho = cfg.rho

    for name in CHECKS:
        if name not in cfg.checks:
            continue
        fam = Family(name)
        fams.append(fam)
        try:
            if name == "mass":
                mass = trace.values @ trace.grid.measures
                for t, mt in zip(trace.times[1:], mass[1:]):
                    fam.results.append(V.CheckResult("mass", float(t), abs(float(mt) - float(mass[0])),
                                                     1e-10 * float(mass[0]), 0.0))
                fam.notes.append(f"initial_mass={io.fmt(float(mass[0]))}")
            elif name == "positivity":
                for t, u in zip(trace.times, trace.values):
                    fam.results.append(V.CheckResult("positivity", float(t), -float(u.min()), 1e-12, 0.0))
                fam.notes.append(f"clip_count={trace.meta.get('clip_count', 0)}")
            elif name == "lambda_monotone":
                fam.results = V.check_norm_monotonicity(trace, sorted({1.0, 2.0, lam}) + [math.inf])
            elif name == "integral_max_principle":
                xi = V.WeightFunction.davies_gaffney(p, lam, A.with_rho(rho), 2.0 * cfg.t_end + 1.0)
                fam.results = V.check_integral_max_principle(trace, lam, xi)
                fam.notes.append(f"rho={io.fmt(rho)}")
            elif name == "davies_gaffney":
                for ratio in DG_RATIOS:
                    fam.results.extend(V.check_davies_gaffney(trace, lam, A, ratio=ratio))
            elif name == "neighborhood_decay":
                e = cfg.gamma_exponent
                if e is None:
                    dim = m.n if m.is_euclidean else m.volume_exponent
                    e = (lam - 1.0) * dim / p
                gamma = V.RegularFunctionSpec(e, cfg.theta)
                first, second, ratio = V.neighborhood_decay_stability(trace, lam, rho, gamma, A)
                if first.skipped or second.skipped:
                    fam.skipped = first.skipped or second.skipped
                else:
                    fam.results = first.results + second.results
                    fam.results.append(V.CheckResult("neighborhood_decay_window", float(cfg.t_end), ratio, 2.0, 0.0,
                                                     {"rho": rho}))
                    fam.notes += [f"rho={io.fmt(rho)}", f"C_fit={io.fmt(first.C_fit)}",
                                  f"C_fit_doubled={io.fmt(second.C_fit)}", f"C_gamma={io.fmt(first.C_gamma)}",
                                  f"C_theory={io.fmt(first.C_theory)}", f"epsilon={io.fmt(first.epsilon)}",
                                  f"out_of_regime={len(first.out_of_regime)}"]
            elif name == "lambda_decay":
                slope, res = V.check_lambda_decay(trace, lam, m.n, p)
                fam.results = [res]
                fam.notes.append(f"slope={io.fmt(slope)}")
            elif name == "envelope":
                Ts = [cfg.envelope_T0 * f for f in ENVELOPE_T_FACTORS]
                if cfg.t0 + Ts[-1] > cfg.t_end * (1 + 1e-12):
                    fam.skipped = f"needs t_end >= t0 + 4 T0 = {cfg.t0 + Ts[-1]}"
                elif not m.is_euclidean and cfg.envelope_mode == "fk":
                    fam.skipped = "off-pole ball volumes need a Euclidean model"
                else:
                    rep = V.check_subgaussian_envelope(trace, p, cfg.n, A, cfg.c_exp, Ts,
                                                       mode=cfg.envelope_mode, t_offset=cfg.t0)
                    fam.results = rep.results
                    fam.notes += [f"C_report={io.fmt(rep.C_report)}", f"window_ratio={io.fmt(rep.window_ratio)}",
                                  f"growth={io.fmt(rep.growth)}", f"c_exp={io.fmt(cfg.c_exp)}"]
            elif name == "sharpness":
                if cfg.initial["kind"] != "barenblatt" or not m.is_euclidean:
                    fam.skipped = "needs a Euclidean run started from the self-similar solution"
                else:
                    slope, intercept, res = V.sharpness_fit(trace, p, cfg.n, (cfg.t0, cfg.t_end))
                    fam.results = [res]
                    fam.notes += [f"slope={io.fmt(slope)}", f"intercept={io.fmt(intercept)}"]
            elif name == "mean_value":
                t_base, Ts = _mean_value_plan(cfg)
                if not Ts:
                    fam.skipped = f"needs t_end >= {t_base + MEAN_VALUE_TS[0]}"
                else:
                    ratios = []
                    for T in Ts:
                        ratio, res = V.check_mean_value_scaleinv(trace, p, lam, T, t_base=t_base)
                        ratios.append(ratio)
                        fam.results.append(res)
                    if len(ratios) > 1:
                        fam.results.append(V.mean_value_band(ratios))
                    fam.notes.append("ratios=" + " ".join(io.fmt(r) for r in ratios))
        except (InsufficientData, UnsupportedOperation, PreconditionError) as exc:
            fam.results = []
            fam.skipped = str(exc)
    return fams


def _summary(cfg: ExperimentConfig, trace, fams) -> str:
    lines = [
        f"p={io.fmt(cfg.p)} n={cfg.n} manifold={cfg.manifold['kind']} cells={cfg.cells} "
        f"lambda={io.fmt(cfg.lam)} initial={cfg.initial['kind']}",
        f"solver: steps={trace.meta['steps']} clip_count={trace.meta['clip_count']} "
        f"snapshots={len(trace)} status={'aborted' if trace.aborted else 'ok'}",
    ]
    if trace.aborted:
        lines.append(f"solver: {trace.meta['message']}")
    for fam in fams:
        if fam.skipped:
            lines.append(f"{fam.name}: skipped ({fam.skipped})")
            continue
        n_pass = sum(r.passed for r in fam.results)
        status = "pass" if fam.passed else "FAIL"
        notes = (" " + " ".join(fam.notes)) if fam.notes else ""
        lines.append(f"{fam.name}: {status} {n_pass}/{len(fam.results)}{notes}")
    return "\n".join(lines) + "\n"


def cmd_run(config_path) -> int:
    try:
        cfg = load_config(config_path)
        manifold = build_manifold(cfg)
        grid = RadialGrid(manifold, cfg.r_max, cfg.cells)
        u0 = build_initial(cfg, grid)
        scfg = SolverConfig(p=cfg.p, cfl=cfg.cfl, floor=cfg.floor, max_steps=cfg.max_steps)
        times = required_times(cfg)
    except (ConfigError, DomainError, PreconditionError, UnsupportedOperation, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(os.environ.get("TRUDINGER_OUT") or cfg.output_dir)
    trace = run(u0, cfg.t_end, times, grid, scfg)
    if trace.aborted:
        io.write_text_atomic(out / "trace.csv", io.trace_csv(trace))
        io.write_text_atomic(out / "summary.txt", _summary(cfg, trace, []))
        print(f"error: solver aborted: {trace.meta['message']}", file=sys.stderr)
        return EXIT_SOLVER
    try:
        fams = run_checks(cfg, trace)
    except (ConfigError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    lams = sorted({1.0, 2.0, cfg.lam}) + [math.inf]
    norm_rows = [(t, lam, V.lambda_norm(trace, lam, t=t)) for t in trace.times for lam in lams]
    results = [r for f in fams for r in f.results]
    io.write_text_atomic(out / "trace.csv", io.trace_csv(trace))
    io.write_text_atomic(out / "norms.csv", io.norms_csv(norm_rows))
    io.write_text_atomic(out / "checks.csv", io.checks_csv(results))
    summary = _summary(cfg, trace, fams)
    io.write_text_atomic(out / "summary.txt", summary)
    sys.stdout.write(summary)
    return EXIT_OK if all(f.passed for f in fams) else EXIT_CHECK


def cmd_constants(p: float, n: int, lam: float | None, theta: float, kappa: float) -> int:
    try:
        table = constants_table(p, n, lam, theta, kappa)
    except (PreconditionError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rows = [("lambda" if k == "lam" else k, v) for k, v in table.rows()]
    sys.stdout.write(io.csv_text(["name", "value"], rows))
    return EXIT_OK


def cmd_convergence(p, n, grids, t0, t1, alpha=None, threshold=0.9, cfl=0.4) -> int:
    try:
        if not p > 1:
            raise PreconditionError(f"p must be > 1, got {p}")
        rows = convergence_study(p, n, grids, t0, t1, alpha=alpha, cfl=cfl)
    except (PreconditionError, DomainError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    header = ["cells", "linf", "l1", "order_linf", "order_l1", "mass_drift", "min_u"]
    sys.stdout.write(io.csv_text(header, [(r.cells, r.linf, r.l1, r.order_linf, r.order_l1, r.mass_drift, r.min_u)
                                          for r in rows]))
    orders = [r.order_linf for r in rows if r.order_linf is not None]
    return EXIT_OK if all(o >= threshold for o in orders) else EXIT_CHECK


# argument parsing ----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _grid_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="trudinger", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver diagnostics")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pr = sub.add_parser("run", help="run an experiment described by a JSON config")
    pr.add_argument("config")

    pc = sub.add_parser("constants", help="print the explicit constants as CSV")
    pc.add_argument("--p", type=float, required=True)
    pc.add_argument("--n", type=int, default=1)
    pc.add_argument("--lambda", dest="lam", type=float, default=None)
    pc.add_argument("--theta", type=float, default=2.0)
    pc.add_argument("--kappa", type=float, default=2.0)

    pv = sub.add_parser("convergence", help="self-similar convergence study as CSV")
    pv.add_argument("--p", type=float, required=True)
    pv.add_argument("--n", type=int, default=1)
    pv.add_argument("--grids", type=_grid_list, default=[128, 256, 512, 1024])
    pv.add_argument("--t0", type=float, default=1.0)
    pv.add_argument("--t1", type=float, default=2.0)
    pv.add_argument("--alpha", type=float, default=None, help="polynomial model exponent")
    pv.add_argument("--threshold", type=float, default=0.9)
    pv.add_argument("--cfl", type=float, default=0.4)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    if args.command == "run":
        return cmd_run(args.config)
    if args.command == "constants":
        return cmd_constants(args.p, args.n, args.lam, args.theta, args.kappa)
    return cmd_convergence(args.p, args.n, args.grids, args.t0, args.t1, args.alpha, args.threshold, args.cfl)


if __name__ == "__main__":
    sys.exit(main())
