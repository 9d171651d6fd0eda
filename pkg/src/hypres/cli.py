"""hypres command-line front end.

Every subcommand builds a Report (named checks with pass/fail status) and
writes it as deterministic JSON (sorted keys, 17 significant digits) or as a
CSV table.  The exit status is 0 iff every check passed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from . import bands, horosphere, hypgeo, liealg, poisson, quantum

SCHEMA = "hypres.report/1"

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

# acceptance tolerances
TOL_VOLUME = 1e-10
TOL_PDE = 1e-6
MIN_ORDER = 1.8
TOL_EQUIVARIANCE = 1e-8
TOL_PUSHFORWARD = 1e-8
TOL_GEO = 1e-9
FIT_DISJOINT_FACTOR = 10.0
FIT_OVERLAP_FACTOR = 1e3


class UsageError(ValueError):
    pass


# -- reports ---------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    exact_zero: Optional[bool] = None
    residual: Optional[float] = None
    tolerance: Optional[float] = None
    detail: Dict[str, Any] = field(default_factory=dict)
    runtime: Optional[float] = None

    def as_dict(self, timings: bool = False) -> Dict[str, Any]:
        d: Dict[str, Any] = {"name": self.name, "status": "pass" if self.passed else "fail"}
        if self.exact_zero is not None:
            d["exact_zero"] = bool(self.exact_zero)
        if self.residual is not None:
            d["residual"] = float(self.residual)
        if self.tolerance is not None:
            d["tolerance"] = float(self.tolerance)
        if self.detail:
            d["detail"] = self.detail
        if timings and self.runtime is not None:
            d["runtime_s"] = self.runtime
        return d


@dataclass
class Report:
    command: str
    config: Dict[str, Any]
    checks: List[Check] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)
    table: Optional[List[List[Any]]] = None
    header: Optional[List[str]] = None

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def as_dict(self, timings: bool = False) -> Dict[str, Any]:
        d = {"schema": SCHEMA, "version": __version__, "command": self.command,
             "config": self.config, "checks": [c.as_dict(timings) for c in self.checks],
             "status": "pass" if self.ok else "fail"}
        if self.data:
            d["data"] = self.data
        return d


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


# -- deterministic serialization ----------------------------------------------------------

def _plain(obj):
    """Map values onto JSON-ready primitives (floats kept for fixed formatting)."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, Fraction):
        return bands.format_rational(obj)
    if isinstance(obj, bands.GaussianRational):
        return str(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return _plain(z.real) if z.imag == 0 else f"{_fmt_float(z.real)},{_fmt_float(z.imag)}"
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _fmt_float(v: float) -> str:
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    return format(v, ".17g")


def encode_json(obj) -> str:
    """JSON with sorted keys and floats printed with 17 significant digits."""
    obj = _plain(obj)

    def enc(o, indent):
        pad = "  " * (indent + 1)
        end = "  " * indent
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {enc(o[k], indent + 1)}" for k in sorted(o)]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, list):
            if not o:
                return "[]"
            return "[\n" + ",\n".join(pad + enc(v, indent + 1) for v in o) + "\n" + end + "]"
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, int):
            return str(o)
        if isinstance(o, float):
            return _fmt_float(o)
        return json.dumps(o)

    return enc(obj, 0) + "\n"


def encode_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt_float(float(v)).strip('"') if isinstance(v, (float, np.floating)) else _plain(v)
                    for v in row])
    return buf.getvalue()


def serialize(report: Report, fmt: str = "json", timings: bool = False) -> bytes:
    if fmt == "json":
        return encode_json(report.as_dict(timings)).encode()
    if fmt == "csv":
        if report.table is None:
            raise UsageError(f"command {report.command!r} has no CSV table")
        return encode_csv(report.header, report.table).encode()
    raise UsageError(f"unknown format {fmt!r}")


# -- argument helpers --------------------------------------------------------------------------

def parse_complex(text: str) -> complex:
    """'re' or 're,im' with rational or decimal parts."""
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) not in (1, 2) or not all(parts):
        raise UsageError(f"malformed complex value {text!r}")
    vals = [float(Fraction(p)) for p in parts]
    return complex(vals[0], vals[1] if len(vals) == 2 else 0.0)


def _lam_value(text: str):
    z = parse_complex(text)
    return z.real if z.imag == 0 else z


def _positive(name, v, lo=1):
    if v < lo:
        raise UsageError(f"--{name} must be >= {lo}")
    return v


def _chart_row(pid: int, x: np.ndarray) -> List[Any]:
    hp = hypgeo.hyperboloid_to_halfspace(x)
    return [pid, float(hp.rho)] + [float(v) for v in hp.y]


# -- suites ------------------------------------------------------------------------------------

def suite_lie(n_values: Sequence[int], report: Report):
    for n in n_values:
        res, dt = timed(liealg.verify_structure_constants, n)
        failed = sorted(k for k, v in res.items() if v != "pass")
        report.add(Check(f"structure constants n={n}", not failed, exact_zero=not failed,
                         detail={"relations": res, "failed": failed}, runtime=dt))
    for n in [v for v in n_values if v <= 3]:
        rep, dt = timed(liealg.verify_derivation_representation, n)
        report.add(Check(f"derivation representation n={n}", bool(rep["ok"]), exact_zero=bool(rep["ok"]),
                         detail=rep, runtime=dt))


def suite_commutations(pairs: Sequence[tuple], rng, report: Report, samples: int):
    """Exact commutation table on `samples` random sections cycling through (n, m) pairs."""
    failures, counted = [], {}
    t0 = time.perf_counter()
    for i in range(samples):
        n, m = pairs[i % len(pairs)]
        u = horosphere.random_section(n, m, rng)
        res = horosphere.commutation_checks(n, u)
        for name, ok in res.items():
            counted[name] = counted.get(name, 0) + 1
            if not ok:
                failures.append(f"section {i} (n={n}, m={m}): {name}")
    report.add(Check(f"commutation table on {samples} random sections", not failures,
                     exact_zero=not failures,
                     detail={"pairs": [list(p) for p in pairs], "checks_per_identity": counted,
                             "failures": failures},
                     runtime=time.perf_counter() - t0))


def suite_inversion(cases: Sequence[tuple], report: Report, conventions=("tensor",)):
    for n, m, k in cases:
        for conv in conventions:
            rep, dt = timed(horosphere.verify_horocycle_inversion, n, m, k, convention=conv)
            report.add(Check(f"inversion identity n={n} m={m} r={rep.r} k={k} div={conv}",
                             rep.exact_zero, exact_zero=rep.exact_zero, detail=rep.as_dict(), runtime=dt))


def inversion_cases(nm_pairs):
    return [(n, m, k) for n, m in nm_pairs for k in range(m // 2 + 1)]


def suite_scan(n_values, m_max, report: Report, values=None):
    for n in n_values:
        grid = values if values is not None else bands.admissible_grid(n)
        bad, zeros = [], []
        t0 = time.perf_counter()
        for lam in grid:
            rep = bands.nonvanishing_scan(n, lam, m_max)
            bad += [f"lambda0={lam} m={r.m} r={r.r} k={r.k}" for r in rep.unexpected]
            zeros += [f"lambda0={lam} m={r.m} r={r.r} k={r.k}" for r in rep.zeros() if r.in_band_bound]
        report.add(Check(f"non-vanishing scan n={n} m<={m_max}", not bad, exact_zero=not bad,
                         detail={"grid_size": len(grid), "unexpected": bad, "expected_zeros": zeros},
                         runtime=time.perf_counter() - t0))


def suite_quantum(report: Report, cases=None):
    for n in (2, 3):
        res = quantum.indicial_residuals(n)
        ok = all(res.values())
        report.add(Check(f"indicial identities n={n}", ok, exact_zero=ok, detail=res))
    cases = cases or [(2, Fraction(1, 3), 4, 0), (3, Fraction(-1, 3), 4, 0), (2, "s", 3, 0),
                      (4, Fraction(7, 3), 3, 0), (2, Fraction(5, 2), 4, 1), (3, "s", 3, 1)]
    for n, s0, j, m in cases:
        chain, dt = timed(quantum.jordan_build, n, s0, j, m=m)
        rep = quantum.verify_phi_ansatz(chain)
        report.add(Check(f"Jordan chain n={n} s0={s0} j={j} m={m}", rep.ok, exact_zero=rep.ok,
                         detail=rep.as_dict(), runtime=dt))


def _poisson_points(n, count, seed):
    return poisson.sample_points(n, count, np.random.default_rng(seed))


def suite_poisson(report: Report, seed: int, n: int = 2, grid_order: int = 32, fd_step: float = 1e-3):
    e0 = np.zeros(n + 2)
    e0[0] = 1.0
    vol = poisson.poisson_transform(poisson.constant_field(n), 1.0, e0, poisson.sphere_grid(n, grid_order))
    err = abs(vol.value - poisson.sphere_volume(n))
    report.add(Check("P_lam(1)(e0) = vol(S^n)", err < TOL_VOLUME, residual=err, tolerance=TOL_VOLUME,
                     detail={"value": vol.value, "richardson_error": vol.error}))
    pts = _poisson_points(n, 20, seed)
    grid = poisson.sphere_grid(n, grid_order)
    for name in ("Y10", "Y21"):
        rep, dt = timed(poisson.pde_residual, poisson.harmonic(name, n), 1.0, pts, grid, fd_step)
        ok = rep.max_residual < TOL_PDE and rep.order >= MIN_ORDER
        report.add(Check(f"PDE residual {name} lambda=1", ok, residual=rep.max_residual, tolerance=TOL_PDE,
                         detail=rep.as_dict(), runtime=dt))
    rng = np.random.default_rng(seed + 1)
    gammas = poisson.random_boosts(n, 10, rng)
    xs = poisson.sample_points(n, 10, rng)
    eq_grid = poisson.sphere_grid(n, 48)
    for name in ("Y10", "Y21"):
        res = [poisson.equivariance_residual(poisson.harmonic(name, n), 1.0, g, x, eq_grid)
               for g, x in zip(gammas, xs)]
        report.add(Check(f"equivariance {name} (10 Lorentz maps)", max(res) < TOL_EQUIVARIANCE,
                         residual=max(res), tolerance=TOL_EQUIVARIANCE))
    x = xs[0]
    u = poisson.minus_section(poisson.harmonic("Y21", n), 1.0)
    diff = abs(poisson.fiber_pushforward(u, x, grid) - poisson.poisson_transform(
        poisson.harmonic("Y21", n), 1.0, x, grid, estimate_error=False).value)
    report.add(Check("fibre pushforward = boundary integral", diff < TOL_PUSHFORWARD, residual=diff,
                     tolerance=TOL_PUSHFORWARD))


FIT_LAMBDA = -0.3


def fit_configurations(n: int = 2):
    c = lambda *v: tuple(list(v) + [0.0] * (n - len(v)))
    return {
        "disjoint": (poisson.ChartBump(c(-0.6), 0.3), poisson.ChartBump(c(0.6), 0.3)),
        "overlap": (poisson.ChartBump(c(0.0), 0.5), poisson.ChartBump(c(0.2), 0.5)),
    }


def suite_fit(report: Report, n: int = 2, lam: float = FIT_LAMBDA):
    fits = {}
    for name, (om, ps) in fit_configurations(n).items():
        fits[name], dt = timed(poisson.asymptotic_fit, om, ps, lam, n=n)
    dis, ov = fits["disjoint"], fits["overlap"]
    floor = dis.noise_floor
    report.add(Check("disjoint supports: |F-(0)| < 10 x noise floor",
                     abs(dis.f_minus0) < FIT_DISJOINT_FACTOR * floor,
                     residual=abs(dis.f_minus0), tolerance=FIT_DISJOINT_FACTOR * floor,
                     detail=dis.as_dict()))
    report.add(Check("overlapping supports: |F-(0)| >= 1e3 x noise floor",
                     abs(ov.f_minus0) >= FIT_OVERLAP_FACTOR * max(floor, ov.noise_floor),
                     residual=abs(ov.f_minus0), tolerance=FIT_OVERLAP_FACTOR * max(floor, ov.noise_floor),
                     detail=ov.as_dict()))


EXPECTED_TABLE = [(0, 0, 0, "-1/5"), (1, 0, 1, "4/5"), (2, 0, 2, "9/5"), (2, 1, 0, "9/5")]


def suite_table(report: Report):
    t = bands.correspondence_table("-11/5", 2)
    got = [(e.m, e.k, e.tensor_order, str(e.s0)) for e in t.entries]
    ok = got == EXPECTED_TABLE and not any(e.excluded for e in t.entries)
    report.add(Check("table lambda0=-11/5 n=2", ok, exact_zero=ok, detail=t.as_dict()))
    for lam, n in (("-2", 5), ("-4", 9)):
        t = bands.correspondence_table(lam, n)
        m0 = -int(lam)
        flagged = sorted({e.m for e in t.entries if e.excluded})
        ok = flagged == [m0]
        report.add(Check(f"exclusion flags lambda0={lam} n={n}", ok, exact_zero=ok, detail=t.as_dict()))


# -- command handlers ------------------------------------------------------------------------

def cmd_verify_lie(args) -> Report:
    _positive("n", args.n, 2)
    if args.n > args.max_n:
        raise UsageError(f"--n above the configured bound {args.max_n}")
    rep = Report("verify-lie", {"n": args.n})
    suite_lie([args.n], rep)
    return rep


def cmd_verify_horosphere(args) -> Report:
    _positive("n", args.n, 2)
    _positive("m", args.m, 0)
    ks = [args.k] if args.k is not None else list(range(args.m // 2 + 1))
    if any(k < 0 or 2 * k > args.m for k in ks):
        raise UsageError("need 0 <= 2k <= m")
    convs = horosphere.DIV_CONVENTIONS if args.convention == "both" else (args.convention,)
    rep = Report("verify-horosphere", {"n": args.n, "m": args.m, "k": ks, "convention": args.convention,
                                       "samples": args.samples, "seed": args.seed})
    suite_inversion([(args.n, args.m, k) for k in ks], rep, convs)
    if args.samples:
        pairs = [(args.n, mm) for mm in range(args.m + 1)]
        suite_commutations(pairs, np.random.default_rng(args.seed), rep, args.samples)
    return rep


def cmd_band_table(args) -> Report:
    t = bands.correspondence_table(args.lambda0, args.n)
    rep = Report("band-table", {"lambda0": args.lambda0, "n": args.n})
    rep.data = t.as_dict()
    rep.add(Check("table generated", True, detail={"entries": len(t.entries)}))
    rep.header = ["m", "k", "tensor_order", "s0", "excluded", "reason"]
    rep.table = [[e.m, e.k, e.tensor_order, str(e.s0), e.excluded, e.reason] for e in t.entries]
    return rep


def cmd_band_scan(args) -> Report:
    _positive("m-max", args.m_max, 0)
    rep = Report("band-scan", {"lambda0": args.lambda0, "n": args.n, "m_max": args.m_max})
    if args.lambda0 is None:
        suite_scan([args.n], args.m_max, rep)
        return rep
    scan = bands.nonvanishing_scan(args.n, args.lambda0, args.m_max)
    rep.add(Check(f"non-vanishing scan lambda0={scan.lambda0}", scan.ok, exact_zero=scan.ok,
                  detail={"unexpected": [f"m={r.m} r={r.r} k={r.k}" for r in scan.unexpected]}))
    rep.header = ["m", "r", "k", "value", "zero", "expected_zero", "in_band_bound"]
    rep.table = [[r.m, r.r, r.k, str(r.value), r.zero, r.expected_zero, r.in_band_bound] for r in scan.rows]
    rep.data = {"rows": [dict(zip(rep.header, row)) for row in rep.table]}
    return rep


def _s0_arg(text: str):
    return "s" if text.strip() == "s" else Fraction(text)


def cmd_quantum(args) -> Report:
    if args.action == "indicial":
        rep = Report("quantum indicial", {"n": args.n})
        res = quantum.indicial_residuals(args.n)
        rep.add(Check("indicial identities", all(res.values()), exact_zero=all(res.values()), detail=res))
        return rep
    if args.action == "fd":
        rep = Report("quantum fd", {"n": args.n, "s": args.s})
        out = quantum.numeric_A_check(args.n, float(Fraction(args.s)), j=args.j if args.j is not None else 1)
        ok = min(out["orders"]) >= MIN_ORDER
        rep.add(Check("finite-difference A_s on rho^(s-1) log^j dy_1", ok, residual=out["errors"][-1],
                      detail=out))
        return rep
    if args.s0 is None or args.j is None:
        raise UsageError("quantum verify needs --s0 and --j")
    rep = Report("quantum verify", {"n": args.n, "s0": args.s0, "j": args.j, "m": args.m})
    chain = quantum.jordan_build(args.n, _s0_arg(args.s0), args.j, m=args.m)
    r = quantum.verify_phi_ansatz(chain)
    rep.add(Check("Jordan chain / Phi ansatz", r.ok, exact_zero=r.ok, detail=r.as_dict()))
    rep.data = {"states": [repr(s) for s in chain.states]}
    return rep


def _field(args):
    if args.m == 0:
        return poisson.harmonic(args.field, args.n)
    if args.field.startswith("K"):
        return poisson.rotation_field(args.n, int(args.field[1]), int(args.field[2]))
    return poisson.gradient_field(args.field[1:] if args.field.startswith("d") else args.field, args.n)


def cmd_poisson(args) -> Report:
    _positive("n", args.n, 2)
    if args.m not in (0, 1):
        raise UsageError("--m must be 0 or 1")
    lam = _lam_value(args.lam)
    cfg = {"action": args.action, "n": args.n, "m": args.m, "lambda": args.lam,
           "grid_order": args.grid_order, "fd_step": args.fd_step, "seed": args.seed, "field": args.field}
    rep = Report(f"poisson {args.action}", cfg)
    grid = poisson.sphere_grid(args.n, args.grid_order)
    if args.action == "residual":
        pts = _poisson_points(args.n, args.points, args.seed)
        r = poisson.pde_residual(_field(args), lam, pts, grid, args.fd_step)
        ok = r.max_residual < TOL_PDE and (math.isnan(r.order) or r.order >= MIN_ORDER)
        if args.m == 1:
            ok = ok and max(r.divergence) < 1e-5
        rep.add(Check("PDE residual", ok, residual=r.max_residual, tolerance=TOL_PDE, detail=r.as_dict()))
        rep.header = ["point_id", "rho"] + [f"y{i}" for i in range(1, args.n + 1)] + ["residual"]
        rep.table = [_chart_row(i, x) + [res] for i, (x, res) in enumerate(zip(pts, r.residuals))]
    elif args.action == "transform":
        pts = _poisson_points(args.n, args.points, args.seed)
        vals = [poisson.poisson_transform(_field(args), lam, x, grid) for x in pts]
        rep.add(Check("transform evaluated", True))
        rep.data = {"values": [{"x": x, "value": v.value, "richardson_error": v.error} for x, v in zip(pts, vals)]}
        rep.header = ["point_id", "rho"] + [f"y{i}" for i in range(1, args.n + 1)] + ["residual"]
        rep.table = [_chart_row(i, x) + [v.error] for i, (x, v) in enumerate(zip(pts, vals))]
    elif args.action == "pushforward":
        pts = _poisson_points(args.n, args.points, args.seed)
        om = _field(args)
        diffs = [float(np.max(np.abs(poisson.fiber_pushforward(poisson.minus_section(om, lam), x, grid)
                                     - poisson.poisson_transform(om, lam, x, grid, estimate_error=False).value)))
                 for x in pts]
        rep.add(Check("fibre pushforward = boundary integral", max(diffs) < TOL_PUSHFORWARD,
                      residual=max(diffs), tolerance=TOL_PUSHFORWARD))
        rep.header = ["point_id", "rho"] + [f"y{i}" for i in range(1, args.n + 1)] + ["residual"]
        rep.table = [_chart_row(i, x) + [d] for i, (x, d) in enumerate(zip(pts, diffs))]
    elif args.action == "fit":
        suite_fit(rep, args.n, lam if args.lam != "1" else FIT_LAMBDA)
    return rep


def cmd_geo(args) -> Report:
    _positive("samples", args.samples, 1)
    rep = Report("geo check", {"n": args.n, "samples": args.samples, "seed": args.seed})
    rows = hypgeo.sample_identity_residuals(args.n, args.samples, np.random.default_rng(args.seed))
    names = sorted(rows[0][1])
    worst = {k: max(float(r[k]) for _, r in rows) for k in names}
    for k in names:
        rep.add(Check(k, worst[k] < TOL_GEO, residual=worst[k], tolerance=TOL_GEO))
    rep.header = ["point_id", "rho"] + [f"y{i}" for i in range(1, args.n + 1)] + ["residual"]
    rep.table = [[i, float(hp.rho)] + [float(v) for v in hp.y] + [max(float(v) for v in r.values())]
                 for i, (hp, r) in enumerate(rows)]
    return rep


def cmd_all(args) -> Report:
    rep = Report("all", {"seed": args.seed})
    rng = np.random.default_rng(args.seed)
    suite_lie([2, 3, 4, 5], rep)
    suite_commutations([(2, 0), (2, 1), (2, 2), (3, 0), (3, 1), (3, 2)], rng, rep, 60)
    suite_inversion(inversion_cases([(2, 1), (2, 2), (3, 1)]), rep, horosphere.DIV_CONVENTIONS)
    suite_scan([2, 3, 4, 5], 6, rep)
    suite_quantum(rep)
    suite_poisson(rep, args.seed)
    suite_fit(rep)
    suite_table(rep)
    return rep


# -- parser ----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--timings", action="store_true", help="include runtimes (breaks byte-stability)")

    p = argparse.ArgumentParser(prog="hypres", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"hypres {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify-lie", parents=[common], help="exact so(1,n+1) structure constants")
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--max-n", type=int, default=8)
    s.set_defaults(func=cmd_verify_lie)

    s = sub.add_parser("verify-horosphere", parents=[common], help="inversion identity and commutation table")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--k", type=int)
    s.add_argument("--convention", choices=horosphere.DIV_CONVENTIONS + ("both",), default="tensor")
    s.add_argument("--samples", type=int, default=0, help="random sections for the commutation table")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_verify_horosphere)

    s = sub.add_parser("band-table", parents=[common], help="resonance correspondence table")
    s.add_argument("--lambda0", required=True, help="'re' or 're,im', rationals like -11/5")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_band_table)

    s = sub.add_parser("band-scan", parents=[common], help="zeros of P_rk(-(lambda0+m))")
    s.add_argument("--lambda0", help="single value; omit to scan the admissible grid")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m-max", type=int, default=6)
    s.set_defaults(func=cmd_band_scan)

    s = sub.add_parser("quantum", parents=[common], help="collar Laplacian and Jordan chains")
    s.add_argument("action", choices=("verify", "indicial", "fd"))
    s.add_argument("--s0", help="rational s0 or 's' for a formal exponent")
    s.add_argument("--j", type=int)
    s.add_argument("--m", type=int, default=0, choices=(0, 1))
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--s", default="3", help="exponent for the fd check")
    s.set_defaults(func=cmd_quantum)

    s = sub.add_parser("poisson", parents=[common], help="numerical Poisson transform")
    s.add_argument("action", choices=("residual", "fit", "pushforward", "transform"))
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--m", type=int, default=0)
    s.add_argument("--lambda", dest="lam", default="1")
    s.add_argument("--grid-order", type=int, default=32)
    s.add_argument("--fd-step", type=float, default=1e-3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--points", type=int, default=20)
    s.add_argument("--field", default="Y10", help="Y10, Y21, ... (m=0); dY10 or K01 (m=1)")
    s.set_defaults(func=cmd_poisson)

    s = sub.add_parser("geo", parents=[common], help="model identity residuals")
    s.add_argument("action", choices=("check",))
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--samples", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_geo)

    s = sub.add_parser("all", parents=[common], help="full acceptance suite")
    s.add_argument("--seed", type=int, required=True)
    s.set_defaults(func=cmd_all)
    return p


VALUE_OPTIONS = ("--lambda0", "--lambda", "--s0", "--s")


def _glue_values(argv: Sequence[str]) -> List[str]:
    """Join '--lambda0 -11/5' into '--lambda0=-11/5' so negative rationals parse."""
    out, i = [], 0
    argv = list(argv)
    while i < len(argv):
        a = argv[i]
        if a in VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def _echo_args(argv: Sequence[str]) -> List[str]:
    """Command echo without the output path or --timings, so reports written
    to different files stay byte-identical."""
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a in ("-o", "--output"):
            skip = True
            continue
        if a == "--timings" or a.startswith("--output=") or (a.startswith("-o") and a != "-o"):
            continue
        out.append(a)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(argv if argv is not None else sys.argv[1:])
    args = parser.parse_args(_glue_values(argv))
    try:
        report = args.func(args)
        report.config["command_line"] = ["hypres"] + _echo_args(argv)
        payload = serialize(report, args.format, args.timings)
    except (UsageError, bands.ExceptionalLambdaError, quantum.SymbolError, poisson.PoissonError,
            ValueError) as exc:
        print(f"hypres: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.output:
            with open(args.output, "wb") as fh:
                fh.write(payload)
        else:
            sys.stdout.buffer.write(payload)
            sys.stdout.flush()
    except OSError as exc:
        print(f"hypres: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
