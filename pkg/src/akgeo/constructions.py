"""Builders for the concrete geometries: the (f, h) coframes, the Przanowski
ansatz, the logarithmic potential and its metric, the Gibbons-Hawking and global
charts, the Boyer-Finley-Plebanski operator and the opposite-orientation
Kahler structure.

Juxtaposed 1-forms AB mean the symmetric product 1/2 (A (x) B + B (x) A).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from . import expr as E
from .domains import DomainSpec
from .expr import Expr
from .geometry import IDX, CoframeField, KForm, MetricField, metric_from_coframe, pullback_metric, wedge
from .hermitian import AlmostComplexStructure, XiParameter, fundamental_form
from .numeric import Program, good_points
from .parser import ALIASES, parse_expression

# dx-components of dz1, dz2 and of the coordinate vectors d/dz1, d/dz2
DZ1 = (E.ONE, E.I, E.ZERO, E.ZERO)
DZ2 = (E.ZERO, E.ZERO, E.ONE, E.I)
DZ1B = tuple(E.conjugate(c) for c in DZ1)
DZ2B = tuple(E.conjugate(c) for c in DZ2)
D1 = (E.HALF, E.const(0, Fraction(-1, 2)), E.ZERO, E.ZERO)
D2 = (E.ZERO, E.ZERO, E.HALF, E.const(0, Fraction(-1, 2)))
D1B = tuple(E.conjugate(c) for c in D1)
D2B = tuple(E.conjugate(c) for c in D2)

Z1, Z2, Z1B, Z2B = (ALIASES[k] for k in ("z1", "z2", "z1b", "z2b"))
U = parse_expression("v - 2*z2*z2b")  # v - 2 z2 z2bar, positive on U'

UPRIME = DomainSpec.uprime()


class ConstructionError(ValueError):
    pass


class AdmissibilityError(ConstructionError):
    pass


def _combo(*pairs) -> tuple[Expr, ...]:
    return tuple(E.add(*(E.mul(E.as_expr(c), v[a]) for c, v in pairs)) for a in IDX)


def sym_product(A, B) -> list[list[Expr]]:
    """Components of the symmetric product AB = 1/2 (A (x) B + B (x) A)."""
    return [[E.mul(E.HALF, E.add(E.mul(A[a], B[b]), E.mul(B[a], A[b]))) for b in IDX]
            for a in IDX]


def _sum_matrices(*terms) -> list[list[Expr]]:
    return [[E.add(*(E.mul(E.as_expr(c), m[a][b]) for c, m in terms)) for b in IDX] for a in IDX]


def _phase(phi) -> Expr:
    p = E.param(phi) if isinstance(phi, str) else E.as_expr(phi)
    return E.exp(E.mul(E.I, p))


# ---------------------------------------------------------------------------
# (f, h) coframes

def coframe_from_fh(f: Expr, h: Expr, domain: DomainSpec | None = None,
                    params=None, seed: int = 0) -> CoframeField:
    """M = f (dz1 + h dz2), N = dz2 / f; f must be real and nonvanishing."""
    f, h = E.as_expr(f), E.as_expr(h)
    domain = domain or DomainSpec.box(*[(-1, 1)] * 4)
    if E.conjugate(f) is not f:
        pts, vals = good_points([f, E.sub(f, E.conjugate(f))], domain, 5, seed, params)
        if np.max(np.abs(vals[1])) > 1e-12 * max(1.0, np.max(np.abs(vals[0]))):
            raise ConstructionError("f must be real")
    pts, vals = good_points([f], domain, 5, seed, params)
    if np.min(np.abs(vals[0])) == 0:
        raise ConstructionError("f vanishes at a probe point")
    M = _combo((f, DZ1), (E.mul(f, h), DZ2))
    N = _combo((E.pow_(f, -1), DZ2))
    return CoframeField(M, N, domain, params)


def fh_metric(f: Expr, h: Expr, domain: DomainSpec | None = None, params=None) -> MetricField:
    """g = 2 f^2 (dz1 + h dz2)(dz1b + hb dz2b) + (2/f^2) dz2 dz2b."""
    A = _combo((1, DZ1), (h, DZ2))
    Ab = tuple(E.conjugate_all(list(A)))
    f2 = E.pow_(f, 2)
    g = _sum_matrices((E.mul(2, f2), sym_product(A, Ab)),
                      (E.mul(2, E.pow_(f2, -1)), sym_product(DZ2, DZ2B)))
    return MetricField(g, domain, params)


def _two_re(tensor) -> list[list[Expr]]:
    conj = E.conjugate_all([x for row in tensor for x in row])
    return [[E.add(tensor[a][b], conj[4 * a + b]) for b in IDX] for a in IDX]


def _mixed(form, vec) -> list[list[Expr]]:
    """form (x) vec acting as X -> form(X) vec, i.e. T^a_b = vec^a form_b."""
    return [[E.mul(vec[a], form[b]) for b in IDX] for a in IDX]


def fh_complex_structure(f: Expr, h: Expr, phi=0, domain=None,
                             params=None) -> AlmostComplexStructure:
    """J = 2 Re{ i e^{i phi} [ f^2 (dz1 + h dz2) (x) (d_2b - hb d_1b) - f^-2 dz2 (x) d_1b ] }."""
    A = _combo((1, DZ1), (h, DZ2))
    hb = E.conjugate(h)
    vec = _combo((1, D2B), (E.neg(hb), D1B))
    f2 = E.pow_(f, 2)
    inner = _sum_matrices((f2, _mixed(A, vec)), (E.neg(E.pow_(f2, -1)), _mixed(DZ2, D1B)))
    k = E.mul(E.I, _phase(phi))
    J = _two_re([[E.mul(k, x) for x in row] for row in inner])
    return AlmostComplexStructure(J, "plus", XiParameter.phase(phi), None, domain, params)


def fh_fundamental_form(phi=0) -> KForm:
    """i (e^{i phi} dz2 ^ dz1 - e^{-i phi} dz2b ^ dz1b); closed, independent of f and h."""
    e = _phase(phi)
    a = wedge(KForm.one_form(DZ2), KForm.one_form(DZ1)).scale(e)
    b = wedge(KForm.one_form(DZ2B), KForm.one_form(DZ1B)).scale(E.conjugate(e))
    return (a - b).scale(E.I)


def fh_structure(f: Expr, h: Expr, phi=0, domain: DomainSpec | None = None, params=None):
    """(g, J^+_{e^{i phi}}, omega) of the (f, h) family."""
    c = coframe_from_fh(f, h, domain, params)
    g = metric_from_coframe(c)
    J = fh_complex_structure(f, h, phi, c.domain, c.params)
    return g, J, fh_fundamental_form(phi)


# ---------------------------------------------------------------------------
# Przanowski ansatz

@dataclass(frozen=True)
class PrzanowskiData:
    """Real potential K(v, z2, z2b) with sign eps = +/-1."""

    K: Expr
    eps: int
    domain: DomainSpec = field(default_factory=lambda: UPRIME)

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise ValueError("eps must be +1 or -1")


@dataclass(frozen=True)
class PotentialDerivatives:
    Kv: Expr
    Kvv: Expr
    Kv2: Expr
    Kv2b: Expr
    K22b: Expr


def check_potential(K: Expr, domain: DomainSpec = UPRIME, seed: int = 0) -> None:
    """K may depend on x1 (through v), x3, x4 only, and must be real."""
    dk = E.differentiate(K, 2)
    if dk is not E.ZERO:
        _, vals = good_points([K, dk], domain, 10, seed)
        if np.max(np.abs(vals[1])) > 1e-10:
            raise ConstructionError("K depends on Im z1 (x2)")
    if E.conjugate(K) is not K:
        _, vals = good_points([K, E.sub(K, E.conjugate(K))], domain, 10, seed)
        if np.max(np.abs(vals[1])) > 1e-10 * max(1.0, np.max(np.abs(vals[0]))):
            raise ConstructionError("K is not real")


def potential_derivatives(K: Expr) -> PotentialDerivatives:
    """v-derivatives as 1/2 d/dx1 (v = 2 x1), z2-derivatives as Wirtinger derivatives."""
    dv = lambda e: E.mul(E.HALF, E.differentiate(e, 1))
    Kv = dv(K)
    return PotentialDerivatives(
        Kv=Kv,
        Kvv=dv(Kv),
        Kv2=E.wirtinger(Kv, 2),
        Kv2b=E.wirtinger(Kv, 2, barred=True),
        K22b=E.wirtinger(E.wirtinger(K, 2, barred=True), 2),
    )


@dataclass(frozen=True)
class Admissibility:
    kv_min: float
    eps_kvv_min: float
    samples: int

    @property
    def kv_ok(self) -> bool:
        return self.kv_min > 0

    @property
    def eps_kvv_ok(self) -> bool:
        return self.eps_kvv_min > 0

    @property
    def ok(self) -> bool:
        return self.kv_ok and self.eps_kvv_ok


def admissibility(d: PrzanowskiData, n: int = 20, seed: int = 0, points=None) -> Admissibility:
    """Sampled K_v > 0 and eps K_vv > 0."""
    kd = potential_derivatives(d.K)
    exprs = [kd.Kv, E.mul(E.const(d.eps), kd.Kvv)]
    if points is None:
        points, vals = good_points(exprs, d.domain, n, seed)
    else:
        vals = Program(exprs).run(points)
    return Admissibility(float(vals[0].real.min()), float(vals[1].real.min()), len(points))


def przanowski_metric(d: PrzanowskiData, check: bool = True, seed: int = 0) -> MetricField:
    """g = (eps K_vv / K_v^{3/2}) (dz1 + K_v2/K_vv dz2)(dz1b + K_v2b/K_vv dz2b)
           + 4 e^{-K} (K_v^{1/2} / (eps K_vv)) dz2 dz2b."""
    if check:
        check_potential(d.K, d.domain, seed)
        adm = admissibility(d, seed=seed)
        if not adm.ok:
            failed = [s for s, ok in (("K_v > 0", adm.kv_ok), ("eps*K_vv > 0", adm.eps_kvv_ok))
                      if not ok]
            raise AdmissibilityError(
                f"admissibility violated: {', '.join(failed)} "
                f"(min K_v = {adm.kv_min:.3g}, min eps*K_vv = {adm.eps_kvv_min:.3g})")
    kd = potential_derivatives(d.K)
    eps = E.const(d.eps)
    rkvv = E.pow_(kd.Kvv, -1)
    A = _combo((1, DZ1), (E.mul(kd.Kv2, rkvv), DZ2))
    Ab = _combo((1, DZ1B), (E.mul(kd.Kv2b, rkvv), DZ2B))
    c1 = E.mul(eps, kd.Kvv, E.pow_(kd.Kv, Fraction(-3, 2)))
    c2 = E.mul(4, E.exp(E.neg(d.K)), E.pow_(kd.Kv, Fraction(1, 2)), eps, rkvv)
    g = _sum_matrices((c1, sym_product(A, Ab)), (c2, sym_product(DZ2, DZ2B)))
    return MetricField(g, d.domain)


def przanowski_residual(d: PrzanowskiData | Expr, check: bool = True) -> Expr:
    """K_vv K_22b - K_v2b K_v2 - 2 e^{-K} (K_vv + 2 K_v^2); zero iff K solves the equation."""
    K = d.K if isinstance(d, PrzanowskiData) else E.as_expr(d)
    if check:
        check_potential(K, d.domain if isinstance(d, PrzanowskiData) else UPRIME)
    kd = potential_derivatives(K)
    return E.sub(
        E.sub(E.mul(kd.Kvv, kd.K22b), E.mul(kd.Kv2b, kd.Kv2)),
        E.mul(2, E.exp(E.neg(K)), E.add(kd.Kvv, E.mul(2, E.pow_(kd.Kv, 2)))),
    )


def log_potential() -> PrzanowskiData:
    """K = log(v - 2 z2 z2b) with eps = -1 (K_v = 1/u > 0, K_vv = -1/u^2 < 0)."""
    return PrzanowskiData(E.log(U), -1, UPRIME)


# ---------------------------------------------------------------------------
# the Ricci-flat example

def example_fh() -> tuple[Expr, Expr]:
    """f = 1 / (sqrt2 u^{1/4}), h = -2 z2b."""
    f = E.pow_(E.mul(E.sqrt(E.const(2)), E.pow_(U, Fraction(1, 4))), -1)
    return f, E.mul(-2, Z2B)


def example_coframe() -> CoframeField:
    f, h = example_fh()
    return coframe_from_fh(f, h, UPRIME)


def example_metric() -> MetricField:
    """u^{-1/2} (dz1 - 2 z2b dz2)(dz1b - 2 z2 dz2b) + 4 u^{1/2} dz2 dz2b."""
    A = _combo((1, DZ1), (E.mul(-2, Z2B), DZ2))
    Ab = _combo((1, DZ1B), (E.mul(-2, Z2), DZ2B))
    g = _sum_matrices((E.pow_(U, Fraction(-1, 2)), sym_product(A, Ab)),
                      (E.mul(4, E.pow_(U, Fraction(1, 2))), sym_product(DZ2, DZ2B)))
    return MetricField(g, UPRIME)


def example_structure(phi=0) -> AlmostComplexStructure:
    """J = 2 Re{ i e^{i phi} [ (1/(2 u^{1/2})) (dz1 - 2 z2b dz2) (x) (d_2b + 2 z2 d_1b)
                               - 2 u^{1/2} dz2 (x) d_1b ] }."""
    A = _combo((1, DZ1), (E.mul(-2, Z2B), DZ2))
    vec = _combo((1, D2B), (E.mul(2, Z2), D1B))
    ru = E.sqrt(U)
    inner = _sum_matrices((E.mul(E.HALF, E.pow_(ru, -1)), _mixed(A, vec)),
                          (E.mul(-2, ru), _mixed(DZ2, D1B)))
    k = E.mul(E.I, _phase(phi))
    J = _two_re([[E.mul(k, x) for x in row] for row in inner])
    return AlmostComplexStructure(J, "plus", XiParameter.phase(phi), None, UPRIME)


def example_package(phi=0):
    """(g, J^+_{e^{i phi}}, omega^+_{e^{i phi}}, U') of the example.

    ``phi`` may be a number or the name of a parameter bound at evaluation.
    """
    return example_metric(), example_structure(phi), fh_fundamental_form(phi), UPRIME


def opposite_kahler_structure():
    """The integrable J of opposite orientation and its fundamental form.

    J = i[(dz1 - 2 z2b dz2) (x) d_1 - (dz1b - 2 z2 dz2b) (x) d_1b
          + dz2b (x) (d_2b + 2 z2 d_1b) - dz2 (x) (d_2 + 2 z2b d_1)]
    """
    A = _combo((1, DZ1), (E.mul(-2, Z2B), DZ2))
    Ab = _combo((1, DZ1B), (E.mul(-2, Z2), DZ2B))
    v2b = _combo((1, D2B), (E.mul(2, Z2), D1B))
    v2 = _combo((1, D2), (E.mul(2, Z2B), D1))
    inner = _sum_matrices((1, _mixed(A, D1)), (-1, _mixed(Ab, D1B)),
                          (1, _mixed(DZ2B, v2b)), (-1, _mixed(DZ2, v2)))
    J = [[E.mul(E.I, x) for x in row] for row in inner]
    Js = AlmostComplexStructure(J, "minus", None, None, UPRIME)
    return Js, fundamental_form(example_metric(), Js)


# ---------------------------------------------------------------------------
# charts

class ChartId(str, Enum):
    GibbonsHawking = "GibbonsHawking"
    Global = "Global"


GH_DOMAIN = DomainSpec.box((0.5, 2.0), (-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0))


def chart_map_exprs(chart: ChartId | str) -> list[Expr]:
    """(x1..x4) as expressions in the chart coordinates, held in x1..x4.

    GH (x, y, z, q): z2 = (y + i z)/2, v = x^2 + (y^2 + z^2)/2, z1 = v/2 + i q.
    Global (t, y, z, q): the same with x = e^t.
    """
    chart = ChartId(chart)
    a, y, z, q = (E.coord(k) for k in (1, 2, 3, 4))
    x2 = E.pow_(a, 2) if chart is ChartId.GibbonsHawking else E.exp(E.mul(2, a))
    v = E.add(x2, E.mul(E.HALF, E.add(E.pow_(y, 2), E.pow_(z, 2))))
    return [E.mul(E.HALF, v), q, E.mul(E.HALF, y), E.mul(E.HALF, z)]


def chart_map(chart: ChartId | str, p) -> np.ndarray:
    """Image in (x1..x4) of a chart point; the GH chart needs x > 0."""
    chart = ChartId(chart)
    p = np.asarray(p, dtype=float)
    a, y, z, q = p
    if chart is ChartId.GibbonsHawking:
        if not a > 0:
            raise ConstructionError(f"the Gibbons-Hawking chart needs x > 0, got {a}")
        u = a * a
    else:
        u = np.exp(2 * a)
    v = u + 0.5 * (y * y + z * z)
    return np.array([v / 2, q, y / 2, z / 2])


def gh_form_metric() -> MetricField:
    """x (dx^2 + dy^2 + dz^2) + (1/x) (z/2 dy - y/2 dz + dq)^2 in chart coordinates."""
    x, y, z = E.coord(1), E.coord(2), E.coord(3)
    alpha = (E.ZERO, E.mul(E.HALF, z), E.mul(E.const(Fraction(-1, 2)), y), E.ONE)
    flat = [[x if a == b and a < 3 else E.ZERO for b in IDX] for a in IDX]
    sq = [[E.mul(alpha[a], alpha[b]) for b in IDX] for a in IDX]
    g = _sum_matrices((1, flat), (E.pow_(x, -1), sq))
    return MetricField(g, GH_DOMAIN)


def chart_metric(chart: ChartId | str, domain: DomainSpec | None = None) -> MetricField:
    """The example metric pulled back to a chart."""
    chart = ChartId(chart)
    if domain is None:
        domain = GH_DOMAIN if chart is ChartId.GibbonsHawking else DomainSpec.box(
            (-3, 3), (-2, 2), (-2, 2), (-2, 2))
    return pullback_metric(chart_map_exprs(chart), example_metric(), domain)


def global_chart_grid() -> np.ndarray:
    """t in {-3..3}, y, z, q in {-2..2} (step 1): 7*5*5*5 points."""
    t = np.arange(-3, 4)
    s = np.arange(-2, 3)
    grid = np.stack(np.meshgrid(t, s, s, s, indexing="ij"), axis=-1)
    return grid.reshape(-1, 4).astype(float)


# ---------------------------------------------------------------------------
# Boyer-Finley-Plebanski

def bfp_residual(F: Expr, domain: DomainSpec | None = None) -> Expr:
    """F_yy + F_zz + (e^F)_xx with (x, y, z) held in x1, x2, x3; F must not involve x4 (q)."""
    F = E.as_expr(F)
    dq = E.differentiate(F, 4)
    if dq is not E.ZERO:
        _, vals = good_points([F, dq], domain or GH_DOMAIN, 10, 0)
        if np.max(np.abs(vals[1])) > 1e-12:
            raise ConstructionError("F depends on q")
    d = E.differentiate
    eF = E.exp(F)
    return E.add(d(d(F, 2), 2), d(d(F, 3), 3), d(d(eF, 1), 1))
