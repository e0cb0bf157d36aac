"""Named verification checks and the suite for the Ricci-flat example.

Every check returns one or more CheckReport objects.  Reports of the example
suite carry ``detail["criterion"]`` so callers can group them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import expr as E
from .constructions import (GH_DOMAIN, UPRIME, ChartId, PrzanowskiData, admissibility,
                            bfp_residual, log_potential, chart_metric, coframe_from_fh,
                            gh_form_metric, global_chart_grid, fh_fundamental_form, przanowski_metric,
                            przanowski_residual, opposite_kahler_structure, example_coframe,
                            example_metric, example_structure)
from .domains import sample_domain
from .geometry import (PetrovType, exterior_derivative, frame_components, hodge_star,
                       hodge_star_values, leading_minors, metric_from_coframe, petrov_classify,
                       weyl_half_matrices)
from .hermitian import (StructureKind, XiParameter, classify_structure, compatibility_residuals,
                        fundamental_form, nijenhuis_tensor, xi_fundamental_form, xi_structure)
from .numeric import Program
from .report import CheckReport, stopwatch


@dataclass(frozen=True)
class SuiteOptions:
    seed: int = 42
    samples: int = 100


PHI_CIRCLE = [k * math.pi / 8 for k in range(16)]


def _uprime_points(opts: SuiteOptions, n: int | None = None) -> np.ndarray:
    return sample_domain(UPRIME, n or opts.samples, opts.seed)


def _tag(reports, criterion):
    for r in reports:
        r.detail = {"criterion": criterion, **r.detail}
    return reports


# ---------------------------------------------------------------------------
# curvature of the example (criteria 1-3)

_CURV_CACHE: dict = {}


def _example_curvature(pts: np.ndarray):
    key = pts.tobytes()
    if key not in _CURV_CACHE:
        g = example_metric()
        cv = g.curvature.evaluate(pts)
        wp, wm = weyl_half_matrices(cv.weyl, cv.metric, g.orientation)
        _CURV_CACHE.clear()
        _CURV_CACHE[key] = (cv, wp, wm)
    return _CURV_CACHE[key]


def check_ricci_flat(opts: SuiteOptions) -> list[CheckReport]:
    with stopwatch() as ms:
        pts = _uprime_points(opts)
        cv, _, _ = _example_curvature(pts)
        r = float(np.abs(frame_components(cv.ricci, cv.metric)).max())
    return [CheckReport.from_residual("ricci_flat", r, 1e-7, len(pts), opts.seed, ms())]


def check_weyl_plus_vanishes(opts: SuiteOptions) -> list[CheckReport]:
    """max |W+ entry| at the sampled points (anchor orientation)."""
    with stopwatch() as ms:
        pts = _uprime_points(opts)
        _, wp, wm = _example_curvature(pts)
        r = float(np.abs(wp).max())
    return [CheckReport.from_residual("weyl_plus_vanishes", r, 1e-7, len(pts), opts.seed, ms(),
                                      max_abs_weyl_minus=float(np.abs(wm).max()))]


def type_d_residual(w: np.ndarray, lam_min: float = 1e-4) -> tuple[float, float, str]:
    """(relative defect from {lam, lam, -2 lam}, |lam|, Petrov type) of one Weyl half.

    The defect is infinite when |lam| <= ``lam_min`` or the type is not D.
    """
    ev = np.linalg.eigvals(w)
    pairs = [(0, 1, 2), (0, 2, 1), (1, 2, 0)]
    i, j, k = min(pairs, key=lambda p: abs(ev[p[0]] - ev[p[1]]))
    lam = 0.5 * (ev[i] + ev[j])
    scale = max(1.0, abs(lam))
    gap = max(abs(ev[i] - ev[j]), abs(ev[k] + 2 * lam)) / scale
    try:
        kind = petrov_classify(w).value
    except ValueError as err:  # ClassificationError
        kind = f"unclassified ({err})"
    if abs(lam) <= lam_min or kind != PetrovType.D.value:
        return math.inf, float(abs(lam)), kind
    return float(gap), float(abs(lam)), kind


def check_type_d(opts: SuiteOptions, side: str = "minus") -> list[CheckReport]:
    """W- (or W+) has eigenvalues {lam, lam, -2 lam}, |lam| > 1e-4, type D, at every point."""
    with stopwatch() as ms:
        pts = _uprime_points(opts)
        _, wp, wm = _example_curvature(pts)
        half = wm if side == "minus" else wp
        res = [type_d_residual(w) for w in half]
        r = max(x[0] for x in res)
        kinds = sorted({x[2] for x in res})
        lam = min(x[1] for x in res)
    return [CheckReport.from_residual(f"type_d_weyl_{side}", r, 1e-6, len(pts), opts.seed, ms(),
                                      types=kinds, min_abs_lambda=lam)]


# ---------------------------------------------------------------------------
# almost-Kahler circle (criteria 4, 5)

def check_almost_kahler_circle(opts: SuiteOptions) -> list[CheckReport]:
    with stopwatch() as ms:
        g = example_metric()
        pts = _uprime_points(opts)
        worst, symbolic_ok, matches = 0.0, True, True
        for phi in PHI_CIRCLE:
            J = example_structure(phi)
            w = fundamental_form(g, J).expand()
            closed = w.is_constant() and exterior_derivative(w).is_structurally_zero()
            symbolic_ok &= closed
            matches &= all(v is E.ZERO for v in (w - fh_fundamental_form(phi)).expand().comps.values())
            worst = max(worst, *compatibility_residuals(g, J, pts))
        r = worst if symbolic_ok and matches else math.inf
    return [CheckReport.from_residual("almost_kahler_circle", r, 1e-9, len(pts), opts.seed, ms(),
                                      phi_values=len(PHI_CIRCLE), domega_symbolic_zero=symbolic_ok,
                                      omega_matches_closed_form=matches)]


def check_non_kahler(opts: SuiteOptions) -> list[CheckReport]:
    """Every J on the circle has a sampled Nijenhuis component above 1e-3."""
    with stopwatch() as ms:
        pts = _uprime_points(opts, 20)
        prog = Program(nijenhuis_tensor(example_structure("phi")).exprs())
        maxima = [float(np.abs(prog.run(pts, {"phi": phi})).max()) for phi in PHI_CIRCLE]
    return [CheckReport.lower_bound("non_kahler", min(maxima), 1e-3, len(pts), opts.seed, ms(),
                                    phi_values=len(PHI_CIRCLE))]


# ---------------------------------------------------------------------------
# opposite-orientation Kahler structure (criterion 6)

def check_opposite_kahler(opts: SuiteOptions) -> list[CheckReport]:
    with stopwatch() as ms:
        g = example_metric()
        pts = _uprime_points(opts)
        J, w = opposite_kahler_structure()
        nij = nijenhuis_tensor(J).max_abs(pts)
        dw = exterior_derivative(w.expand())
        dmax = 0.0 if dw.is_structurally_zero() else float(np.abs(dw.values(pts)).max())
        sw = hodge_star(g, w)
        asd = float(np.abs(sw.values(pts) + w.values(pts)).max())
        r = max(nij, dmax, asd)
    return [CheckReport.from_residual("kahler_opposite_orientation", r, 1e-9, len(pts), opts.seed,
                                      ms(), nijenhuis=nij, domega=dmax, anti_self_dual=asd)]


# ---------------------------------------------------------------------------
# Przanowski ansatz (criterion 7)

def check_przanowski(opts: SuiteOptions) -> list[CheckReport]:
    with stopwatch() as ms:
        d = log_potential()
        pts = _uprime_points(opts)
        res = float(np.abs(Program([przanowski_residual(d)]).run(pts)).max())
        minus = admissibility(d, points=pts)
        plus = admissibility(PrzanowskiData(d.K, 1, d.domain), points=pts)
        sign_logic = minus.ok and not plus.ok
        gdiff = float(np.abs(przanowski_metric(d).values(pts) - example_metric().values(pts)).max())
        r = max(res, gdiff) if sign_logic else math.inf
    return [CheckReport.from_residual("przanowski_consistency", r, 1e-10, len(pts), opts.seed, ms(),
                                      equation_residual=res, metric_difference=gdiff,
                                      admissible_eps_minus=minus.ok, admissible_eps_plus=plus.ok)]


# ---------------------------------------------------------------------------
# charts (criteria 8, 9)

def check_gibbons_hawking(opts: SuiteOptions, n: int = 50) -> list[CheckReport]:
    with stopwatch() as ms:
        pts = sample_domain(GH_DOMAIN, n, opts.seed)
        r = float(np.abs(chart_metric(ChartId.GibbonsHawking).values(pts)
                         - gh_form_metric().values(pts)).max())
    return [CheckReport.from_residual("gibbons_hawking_form", r, 1e-8, n, opts.seed, ms())]


def check_global_chart(opts: SuiteOptions) -> list[CheckReport]:
    """Count of grid points with a non-finite entry or a non-positive leading minor."""
    with stopwatch() as ms:
        grid = global_chart_grid()
        gv = chart_metric(ChartId.Global).values(grid)
        finite = np.isfinite(gv).all(axis=(1, 2))
        minors = leading_minors(np.where(finite[:, None, None], gv, 0.0))
        ok = finite & (minors > 0).all(axis=1)
        bad = int((~ok).sum())
    return [CheckReport.from_residual("global_chart_regular", bad, 0.0, len(grid), opts.seed, ms(),
                                      min_leading_minor=float(minors[finite].min()))]


# ---------------------------------------------------------------------------
# BFP, conventions, oracle, flat baseline (criteria 10-13)

def check_bfp_zero(opts: SuiteOptions) -> list[CheckReport]:
    with stopwatch() as ms:
        res = bfp_residual(E.ZERO)
        r = abs(res.value) if isinstance(res, E.Const) else math.inf
    return [CheckReport.from_residual("bfp_trivial_solution", r, 0.0, 0, opts.seed, ms(),
                                      symbolic=E.to_text(res))]


def _random_xis(seed: int, n: int = 10) -> list[complex]:
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(n, 2))
    return [complex(a, b) for a, b in z]


def check_conventions(opts: SuiteOptions) -> list[CheckReport]:
    """Hodge duality of omega+/- and the closed forms of the fundamental forms."""
    c = example_coframe()
    g = metric_from_coframe(c, check=False)
    pts = _uprime_points(opts, 20)
    xis = _random_xis(opts.seed)
    xi_sym = XiParameter(E.add(E.param("xi_re"), E.mul(E.I, E.param("xi_im"))))
    gn = g.values(pts)
    reports = []
    with stopwatch() as ms:
        hodge = 0.0
        for side, sign in (("plus", 1), ("minus", -1)):
            w = xi_fundamental_form(c, xi_sym, side)
            prog = Program(list(w.comps.values()))
            for xi in xis:
                wn = _dense(w, prog, pts, {"xi_re": xi.real, "xi_im": xi.imag})
                sw = hodge_star_values(gn, wn, g.orientation)
                ssw = hodge_star_values(gn, sw, g.orientation)
                hodge = max(hodge, float(np.abs(sw - sign * wn).max()), float(np.abs(ssw - wn).max()))
    reports.append(CheckReport.from_residual("hodge_conventions", hodge, 1e-9, len(pts),
                                             opts.seed, ms(), xi_values=len(xis)))
    with stopwatch() as ms:
        ff = 0.0
        for side in ("plus", "minus"):
            J = xi_structure(c, xi_sym, side, check=False)
            diff = fundamental_form(g, J) - xi_fundamental_form(c, xi_sym, side)
            prog = Program(list(diff.comps.values()))
            for xi in xis:
                ff = max(ff, float(np.abs(prog.run(pts, {"xi_re": xi.real, "xi_im": xi.imag})).max()))
    reports.append(CheckReport.from_residual("fundamental_form_closed_forms", ff, 1e-10, len(pts),
                                             opts.seed, ms(), xi_values=len(xis)))
    return reports


def _dense(w, prog, pts, params) -> np.ndarray:
    vals = prog.run(pts, params)
    out = np.zeros((len(pts), 4, 4), dtype=complex)
    for j, (a, b) in enumerate(w.comps):
        out[:, a, b], out[:, b, a] = vals[j], -vals[j]
    return out


def _central(f, p: np.ndarray, c: int, h: float) -> np.ndarray:
    """Fourth-order central difference of f along coordinate c with step h."""
    e = np.zeros(4)
    e[c] = h
    return (8 * (f(p + e) - f(p - e)) - (f(p + 2 * e) - f(p - 2 * e))) / (12 * h)


def fd_christoffel(metric_at: Callable[[np.ndarray], np.ndarray], p: np.ndarray,
                   h: float = 1e-4) -> np.ndarray:
    """Gamma^a_bc at p from central differences of the metric."""
    dg = np.stack([_central(metric_at, p, c, h) for c in range(4)])  # dg[c, a, b] = d_c g_ab
    ginv = np.linalg.inv(metric_at(p))
    low = 0.5 * (np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - np.einsum("dbc->dbc", dg))
    return np.einsum("ad,dbc->abc", ginv, low)


def fd_riemann(metric_at, p: np.ndarray, h: float = 1e-3, h_gamma: float = 1e-4) -> np.ndarray:
    """R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb by nested differences."""
    gam = fd_christoffel(metric_at, p, h_gamma)
    gam_at = lambda q: fd_christoffel(metric_at, q, h_gamma)
    dgam = np.stack([_central(gam_at, p, c, h) for c in range(4)])  # dgam[c, a, b, d] = d_c G^a_bd
    r = (np.einsum("cadb->abcd", dgam) - np.einsum("dacb->abcd", dgam)
         + np.einsum("ace,edb->abcd", gam, gam) - np.einsum("ade,ecb->abcd", gam, gam))
    return r


def check_fd_oracle(opts: SuiteOptions, n: int = 5) -> list[CheckReport]:
    with stopwatch() as ms:
        g = example_metric()
        pts = _uprime_points(opts, n)
        metric_at = lambda q: g.values(q[None, :])[0]
        gam_sym = g.connection.values(pts)
        cv = g.curvature.evaluate(pts)
        rg, rr = 0.0, 0.0
        for k, p in enumerate(pts):
            rg = max(rg, float(np.abs(gam_sym[k] - fd_christoffel(metric_at, p)).max()))
            rr = max(rr, float(np.abs(cv.riemann_up[k] - fd_riemann(metric_at, p)).max()))
    return [CheckReport.from_residual("finite_difference_oracle", max(rg, rr), 1e-4, n, opts.seed,
                                      ms(), christoffel=rg, riemann=rr)]


def check_flat_baseline(opts: SuiteOptions) -> list[CheckReport]:
    with stopwatch() as ms:
        c = coframe_from_fh(E.ONE, E.ZERO)
        g = metric_from_coframe(c)
        pts = sample_domain(c.domain, opts.samples, opts.seed)
        riem = float(np.abs(g.curvature.evaluate(pts).riemann_up).max())
        verdict = classify_structure(g, xi_structure(c, XiParameter.finite(0)), pts)
        r = riem if verdict.kind is StructureKind.Kahler else math.inf
    return [CheckReport.from_residual("flat_baseline", r, 1e-12, len(pts), opts.seed, ms(),
                                      riemann=riem, structure=verdict.kind.value)]


EXAMPLE_SUITE: list[tuple[int, Callable[[SuiteOptions], list[CheckReport]]]] = [
    (1, check_ricci_flat),
    (2, check_weyl_plus_vanishes),
    (3, check_type_d),
    (4, check_almost_kahler_circle),
    (5, check_non_kahler),
    (6, check_opposite_kahler),
    (7, check_przanowski),
    (8, check_gibbons_hawking),
    (9, check_global_chart),
    (10, check_bfp_zero),
    (11, check_conventions),
    (12, check_fd_oracle),
    (13, check_flat_baseline),
]

SUITES = {"ricci-flat": EXAMPLE_SUITE, "paper": EXAMPLE_SUITE}  # second name is the CLI alias


def run_check_suite(name: str, opts: SuiteOptions | None = None) -> tuple[list[CheckReport], int]:
    """Run a named suite; returns (reports, exit status) with status 0 iff all pass."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(SUITES)}")
    opts = opts or SuiteOptions()
    reports: list[CheckReport] = []
    for criterion, fn in SUITES[name]:
        try:
            out = fn(opts)
        except Exception as err:  # a crashing check is reported, not propagated
            out = [CheckReport.error(fn.__name__.removeprefix("check_"), err, seed=opts.seed)]
        reports.extend(_tag(out, criterion))
    return reports, 0 if all(r.passed for r in reports) else 1
