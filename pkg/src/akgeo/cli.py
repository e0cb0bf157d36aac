"""``akgeo`` command line: run checks and print JSON-lines reports.

Exit status: 0 when every report passes, 1 when a check fails or errors,
2 for usage, parse and model-file errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import expr as E
from .checks import SUITES, SuiteOptions, check_gibbons_hawking, check_global_chart, run_check_suite
from .constructions import (GH_DOMAIN, UPRIME, AdmissibilityError, ConstructionError,
                            PrzanowskiData, admissibility, bfp_residual, check_potential,
                            przanowski_residual, example_coframe, example_metric)
from .domains import SamplingError
from .geometry import (ClassificationError, MetricField, frame_components, petrov_classify,
                       weyl_half_matrices)
from .hermitian import (INTEGRABLE_TOL, XiParameter, classify_structure, compatibility_residuals,
                        integrability_scan, stereographic_grid, xi_structure)
from .modelfile import ModelError, ModelFile, load_model
from .numeric import EvaluationError, Program, good_points
from .parser import ParseError, parse_expression
from .report import CheckReport, stopwatch

BIALECKI_K = "log(v - 2*z2*z2b)"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument handling

def _point(text: str) -> np.ndarray:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad point {text!r}; expected x1,x2,x3,x4") from None
    if len(vals) != 4 or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"bad point {text!r}; expected four finite numbers")
    return np.array(vals)


def _xi(text: str) -> XiParameter:
    try:
        return XiParameter.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad xi {text!r}; expected re+imi or inf") from None


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="sampling seed (default 42)")
    common.add_argument("--samples", type=_positive_int, default=100,
                        help="number of sample points (default 100)")
    common.add_argument("--tol", type=float, default=None,
                        help="pass threshold on the max residual (default 1e-8)")
    common.add_argument("--json", metavar="PATH", help="write the reports to PATH instead of stdout")
    common.add_argument("--model", metavar="PATH",
                        help="model file (default: the built-in Ricci-flat example)")
    common.add_argument("--point", type=_point, help="single evaluation point x1,x2,x3,x4")
    common.add_argument("--phi", type=float, default=0.0, help="phase of xi = exp(i phi)")
    common.add_argument("--xi", type=_xi, help="xi as re+imi, or inf (overrides --phi)")
    common.add_argument("--side", choices=("plus", "minus"), default="plus")

    p = argparse.ArgumentParser(prog="akgeo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run a named check suite")
    v.add_argument("suite", choices=tuple(SUITES))
    sub.add_parser("curvature", parents=[common], help="vanishing tests for Riemann, Ricci, scalar, Weyl")
    sub.add_parser("petrov", parents=[common], help="Petrov type of both Weyl halves")
    sub.add_parser("classify", parents=[common], help="classify the xi-structure of a coframe")
    sub.add_parser("scan-xi", parents=[common], help="integrability scan over a xi grid")
    pde = sub.add_parser("pde", parents=[common], help="Przanowski equation and admissibility for K")
    pde.add_argument("--K", default=BIALECKI_K, help=f"potential (default {BIALECKI_K})")
    pde.add_argument("--eps", type=int, choices=(-1, 1), default=-1)
    bfp = sub.add_parser("bfp", parents=[common], help="Boyer-Finley-Plebanski residual of F(x, y, z)")
    bfp.add_argument("--F", default="0", help="solution candidate in x, y, z (default 0)")
    sub.add_parser("pullback-gh", parents=[common], help="example metric in Gibbons-Hawking form")
    sub.add_parser("global-chart", parents=[common], help="regularity on the global chart grid")
    return p


@dataclass
class Context:
    args: argparse.Namespace
    tol: float

    @property
    def seed(self) -> int:
        return self.args.seed

    def model(self) -> ModelFile | None:
        if self.args.model is None:
            return None
        return load_model(self.args.model, seed=self.seed, param_values={"phi": self.args.phi})

    def metric_and_coframe(self):
        m = self.model()
        if m is None:
            return example_metric(), example_coframe()
        return m.metric, m.coframe

    def points(self, g: MetricField, exprs=None) -> np.ndarray:
        if self.args.point is not None:
            return self.args.point[None, :]
        pts, _ = good_points(exprs or g.upper(), g.domain, self.args.samples, self.seed, g.params)
        return pts

    def report(self, name, residual, samples, ms, tol=None, **detail) -> CheckReport:
        return CheckReport.from_residual(name, residual, self.tol if tol is None else tol,
                                         samples, self.seed, ms, **detail)


# ---------------------------------------------------------------------------
# commands

def cmd_verify(ctx: Context) -> tuple[list[CheckReport], dict]:
    reports, _ = run_check_suite(ctx.args.suite, SuiteOptions(ctx.seed, ctx.args.samples))
    return reports, {"suite": ctx.args.suite}


def cmd_curvature(ctx: Context):
    g, _ = ctx.metric_and_coframe()
    with stopwatch() as ms:
        pts = ctx.points(g)
        cv = g.curvature.evaluate(pts)
        riem = frame_components(cv.riemann, cv.metric, g.orientation)
        ric = frame_components(cv.ricci, cv.metric, g.orientation)
        weyl = frame_components(cv.weyl, cv.metric, g.orientation)
    t = ms() / 4
    n = len(pts)
    return [
        ctx.report("riemann_vanishes", np.abs(riem).max(), n, t),
        ctx.report("ricci_vanishes", np.abs(ric).max(), n, t),
        ctx.report("scalar_vanishes", np.abs(cv.scalar).max(), n, t),
        ctx.report("weyl_vanishes", np.abs(weyl).max(), n, t),
    ], {}


def cmd_petrov(ctx: Context):
    """Reports per side the fraction of points whose type differs from the most common one."""
    g, _ = ctx.metric_and_coframe()
    out, types = [], {}
    with stopwatch() as ms:
        pts = ctx.points(g)
        cv = g.curvature.evaluate(pts)
        halves = dict(zip(("plus", "minus"), weyl_half_matrices(cv.weyl, cv.metric, g.orientation)))
    for side, mats in halves.items():
        with stopwatch() as ms2:
            kinds = []
            for w in mats:
                try:
                    kinds.append(petrov_classify(w).value)
                except ClassificationError:
                    kinds.append("unclassified")
            counts = {k: kinds.count(k) for k in sorted(set(kinds))}
            top = max(counts, key=counts.get)
            disagree = (len(kinds) - counts[top]) / len(kinds)
            if top == "unclassified":
                disagree = 1.0
        types[side] = top
        out.append(ctx.report(f"petrov_{side}", disagree, len(pts), ms() / 2 + ms2(),
                              type=top, counts=counts,
                              max_abs_entry=float(np.abs(mats).max())))
    return out, {"types": types, "orientation": g.orientation}


def _structure(ctx: Context):
    g, c = ctx.metric_and_coframe()
    if c is None:
        raise UsageError("this command needs a model with a coframe block")
    xi = ctx.args.xi if ctx.args.xi is not None else XiParameter.phase(ctx.args.phi)
    return g, c, xi


def cmd_classify(ctx: Context):
    g, c, xi = _structure(ctx)
    J = xi_structure(c, xi, ctx.args.side)
    n_pts = ctx.points(g)
    with stopwatch() as ms:
        r_sq, r_g = compatibility_residuals(g, J, n_pts)
    compat = ctx.report("compatibility", max(r_sq, r_g), len(n_pts), ms(),
                        j_squared=r_sq, metric=r_g)
    with stopwatch() as ms:
        verdict = classify_structure(g, J, n_pts, tol=ctx.tol)
    t = ms() / 2
    return [
        compat,
        ctx.report("fundamental_form_closed", verdict.domega_max, len(n_pts), t),
        ctx.report("integrable", verdict.nijenhuis_max, len(n_pts), t),
    ], {"structure": verdict.kind.value, "side": ctx.args.side, "xi": xi.label()}


def cmd_scan_xi(ctx: Context):
    """Candidates for integrability over xi = 0, a 64-point sphere grid and xi = inf."""
    g, c = ctx.metric_and_coframe()
    if c is None:
        raise UsageError("scan-xi needs a model with a coframe block")
    grid = [XiParameter.finite(0)] + stereographic_grid(64) + [XiParameter.infinity()]
    if ctx.args.xi is not None:
        grid = [ctx.args.xi]
    with stopwatch() as ms:
        pts = ctx.points(g)
        scan = integrability_scan(c, ctx.args.side, grid, pts, ctx.tol)
    t = ms() / len(grid)
    reports = [ctx.report(f"integrable[xi={xi.label()}]", r, len(pts), t)
               for xi, r in scan.residuals]
    return reports, {"candidates": [x.label() for x in scan.candidates], "grid": len(grid),
                     "side": ctx.args.side}


def cmd_pde(ctx: Context):
    K = parse_expression(ctx.args.K)
    d = PrzanowskiData(K, ctx.args.eps, UPRIME)
    out = []
    with stopwatch() as ms:
        check_potential(K, UPRIME, ctx.seed)
        res = przanowski_residual(d, check=False)
        if ctx.args.point is not None:
            pts = ctx.args.point[None, :]
            vals = Program([res]).run(pts)
        else:
            pts, vals = good_points([res], UPRIME, ctx.args.samples, ctx.seed)
    out.append(ctx.report("przanowski_residual", np.abs(vals).max(), len(pts), ms(),
                          symbolic=E.to_text(res) if len(E.to_text(res)) < 200 else None))
    with stopwatch() as ms:
        adm = admissibility(d, points=pts)
    out.append(ctx.report("admissible_Kv_positive", 0.0 if adm.kv_ok else 1.0, len(pts), ms(),
                          tol=0.0, min_Kv=adm.kv_min))
    out.append(ctx.report("admissible_eps_Kvv_positive", 0.0 if adm.eps_kvv_ok else 1.0,
                          len(pts), 0.0, tol=0.0, eps=ctx.args.eps, min_eps_Kvv=adm.eps_kvv_min))
    for r in out:
        r.detail = {k: v for k, v in r.detail.items() if v is not None}
    return out, {"K": ctx.args.K, "eps": ctx.args.eps}


_BFP_NAMES = {"x": E.coord(1), "y": E.coord(2), "z": E.coord(3), "q": E.coord(4)}


def cmd_bfp(ctx: Context):
    F = parse_expression(ctx.args.F, aliases=_BFP_NAMES)
    with stopwatch() as ms:
        res = bfp_residual(F)
        if isinstance(res, E.Const):
            r, n = abs(res.value), 0
        else:
            if ctx.args.point is not None:
                pts = ctx.args.point[None, :]
                vals = Program([res]).run(pts)
            else:
                pts, vals = good_points([res], GH_DOMAIN, ctx.args.samples, ctx.seed)
            r, n = float(np.abs(vals).max()), len(pts)
    return [ctx.report("bfp_residual", r, n, ms(), symbolic=E.to_text(res)[:200])], {"F": ctx.args.F}


def cmd_pullback_gh(ctx: Context):
    rep = check_gibbons_hawking(SuiteOptions(ctx.seed, ctx.args.samples), n=ctx.args.samples)[0]
    rep = ctx.report(rep.name, rep.max_residual, rep.samples, rep.ms)
    return [rep], {}


def cmd_global_chart(ctx: Context):
    return check_global_chart(SuiteOptions(ctx.seed, ctx.args.samples)), {}


COMMANDS: dict[str, Callable] = {
    "verify": cmd_verify,
    "curvature": cmd_curvature,
    "petrov": cmd_petrov,
    "classify": cmd_classify,
    "scan-xi": cmd_scan_xi,
    "pde": cmd_pde,
    "bfp": cmd_bfp,
    "pullback-gh": cmd_pullback_gh,
    "global-chart": cmd_global_chart,
}

# default thresholds where --tol is not given
DEFAULT_TOL = {"scan-xi": INTEGRABLE_TOL, "classify": INTEGRABLE_TOL}


def summary(command: str, reports: list[CheckReport], extra: dict, seed: int, ms: float) -> dict:
    failed = sum(r.status == "fail" for r in reports)
    errors = sum(r.status == "error" for r in reports)
    return {
        "summary": True,
        "command": command,
        "status": "pass" if reports and not failed and not errors else "fail",
        "total": len(reports),
        "passed": len(reports) - failed - errors,
        "failed": failed,
        "errors": errors,
        "seed": seed,
        "ms": round(ms, 3),
        **extra,
    }


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on usage errors
    tol = args.tol if args.tol is not None else DEFAULT_TOL.get(args.command, 1e-8)
    ctx = Context(args, tol)
    command = args.command + (f" {args.suite}" if args.command == "verify" else "")
    try:
        with stopwatch() as ms:
            reports, extra = COMMANDS[args.command](ctx)
    except (ModelError, ParseError, UsageError) as err:
        print(f"akgeo: error: {err}", file=sys.stderr)
        return 2
    except (AdmissibilityError, ConstructionError, EvaluationError, SamplingError) as err:
        reports = [CheckReport.error(args.command, err, seed=args.seed, tol=tol)]
        extra = {}
        ms = lambda: 0.0
    lines = [r.to_json() for r in reports]
    lines.append(json.dumps(summary(command, reports, extra, args.seed, ms())))
    text = "\n".join(lines) + "\n"
    if args.json:
        try:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as err:
            print(f"akgeo: error: cannot write {args.json}: {err.strerror}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return 0 if reports and all(r.passed for r in reports) else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
