"""Almost hermitian structures: the xi-family, fundamental forms, Nijenhuis tensor."""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from enum import Enum
from typing import Sequence

import numpy as np

from . import expr as E
from .domains import DomainSpec
from .expr import Expr
from .geometry import (IDX, CoframeField, KForm, MetricField, Side, exterior_derivative,
                       wedge)
from .numeric import Program
from .report import CheckReport, stopwatch

# max Nijenhuis component below which a structure counts as integrable in scans
INTEGRABLE_TOL = 1e-7


@dataclass(frozen=True)
class XiParameter:
    """xi in C or the point at infinity (``value is None``)."""

    value: Expr | None

    @classmethod
    def finite(cls, xi) -> "XiParameter":
        if isinstance(xi, complex) and not (math.isfinite(xi.real) and math.isfinite(xi.imag)):
            raise ValueError("xi must be finite; use XiParameter.infinity()")
        if isinstance(xi, (float, complex)):
            # exact dyadics of tiny floats blow up canonical constants past float range
            c = complex(xi)
            xi = E.const(*(Fraction(v).limit_denominator(10**18) for v in (c.real, c.imag)))
        return cls(E.as_expr(xi))

    @classmethod
    def infinity(cls) -> "XiParameter":
        return cls(None)

    @classmethod
    def phase(cls, phi) -> "XiParameter":
        """xi = exp(i*phi); ``phi`` is a number or a parameter name."""
        p = E.param(phi) if isinstance(phi, str) else E.as_expr(phi)
        return cls(E.exp(E.mul(E.I, p)))

    @classmethod
    def parse(cls, text: str) -> "XiParameter":
        """'inf' or a Python-style complex literal such as '0.5+0.25j' / '0.5+0.25i'."""
        t = text.strip().lower()
        if t in ("inf", "infinity", "oo"):
            return cls.infinity()
        return cls.finite(complex(t.replace("i", "j")))

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __str__(self) -> str:
        return "inf" if self.value is None else E.to_text(self.value)

    def label(self) -> str:
        """Short decimal form such as ``0.5-1i``; needs a numeric xi."""
        if self.value is None:
            return "inf"
        z = Program([self.value]).run(np.zeros((1, 4)))[0, 0]
        return f"{z.real:.6g}{z.imag:+.6g}i"


class AlmostComplexStructure:
    """Mixed tensor J^a_b (``J[a][b]``), optionally tagged with its origin."""

    def __init__(self, J, side: Side | str = Side.plus, xi: XiParameter | None = None,
                 coframe: CoframeField | None = None, domain: DomainSpec | None = None,
                 params=None):
        self.J = [[E.as_expr(J[a][b]) for b in IDX] for a in IDX]
        self.side = Side(side)
        self.xi = xi
        self.coframe = coframe
        self.domain = domain or (coframe.domain if coframe else None)
        self.params = dict(params or (coframe.params if coframe else {}))

    def flat(self) -> list[Expr]:
        return [self.J[a][b] for a in IDX for b in IDX]

    def values(self, points, params=None) -> np.ndarray:
        vals = Program(self.flat()).run(points, {**self.params, **(params or {})})
        return vals.T.reshape(-1, 4, 4)

    def scaled(self, c) -> "AlmostComplexStructure":
        c = E.as_expr(c)
        return AlmostComplexStructure([[E.mul(c, x) for x in row] for row in self.J],
                                      self.side, self.xi, self.coframe, self.domain, self.params)

    def __neg__(self):
        return self.scaled(-1)


@dataclass
class NijenhuisField:
    """N^a_{bc}, stored for b < c (antisymmetry is exact)."""

    comps: dict

    def __getitem__(self, abc) -> Expr:
        a, b, c = abc
        if b == c:
            return E.ZERO
        if b < c:
            return self.comps[(a, b, c)]
        return E.neg(self.comps[(a, c, b)])

    def exprs(self) -> list[Expr]:
        return list(self.comps.values())

    def is_structurally_zero(self) -> bool:
        return all(v is E.ZERO for v in self.comps.values())

    def max_abs(self, points, params=None) -> float:
        if self.is_structurally_zero():
            return 0.0
        return float(np.max(np.abs(Program(self.exprs()).run(points, params))))


# ---------------------------------------------------------------------------
# xi-rotated frames

def _tensor(form: Sequence[Expr], vec: Sequence[Expr]) -> list[list[Expr]]:
    """Components of form (x) vec acting as X -> form(X) vec: T^a_b = vec^a form_b."""
    return [[E.mul(vec[a], form[b]) for b in IDX] for a in IDX]


def _lin(*pairs) -> list[Expr]:
    """sum of coefficient * vector over (coefficient, vector) pairs, componentwise."""
    return [E.add(*(E.mul(c, v[a]) for c, v in pairs)) for a in IDX]


def xi_frame(c: CoframeField, xi: XiParameter):
    """(M_xi, N_xi, m_xi, n_xi) as component tuples.

    xi = infinity uses the limit M = -Nbar, N = Mbar, m = -nbar, n = mbar
    (the phases of xi -> r e^{i theta}, r -> oo, cancel in every J and omega).
    """
    M, Mb, N, Nb = c.rows()
    m, mb, n, nb = c.dual_frame
    one = E.ONE
    if xi.is_infinite:
        return (_lin((-1, Nb)), list(Mb), _lin((-1, nb)), list(mb))
    x = xi.value
    xb = E.conjugate(x)
    s = E.pow_(E.add(one, E.mul(x, xb)), Fraction(-1, 2))
    Mx = _lin((s, M), (E.neg(E.mul(s, xb)), Nb))
    Nx = _lin((s, N), (E.mul(s, xb), Mb))
    mx = _lin((s, m), (E.neg(E.mul(s, x)), nb))
    nx = _lin((s, n), (E.mul(s, x), mb))
    return Mx, Nx, mx, nx


def xi_structure(c: CoframeField, xi: XiParameter, side: Side | str = Side.plus,
                 check: bool = True) -> AlmostComplexStructure:
    """J^+_xi = i(Mb(x)mb - M(x)m + Nb(x)nb - N(x)n), J^-_xi = i(M(x)m - Mb(x)mb + Nb(x)nb - N(x)n)."""
    side = Side(side)
    if check:
        c.check_nondegenerate()
    Mx, Nx, mx, nx = xi_frame(c, xi)
    Mxb, Nxb, mxb, nxb = (E.conjugate_all(list(v)) for v in (Mx, Nx, mx, nx))
    s = 1 if side is Side.plus else -1
    parts = [
        (s, _tensor(Mxb, mxb)),
        (-s, _tensor(Mx, mx)),
        (1, _tensor(Nxb, nxb)),
        (-1, _tensor(Nx, nx)),
    ]
    J = [[E.mul(E.I, E.add(*(E.mul(E.const(k), t[a][b]) for k, t in parts))) for b in IDX]
         for a in IDX]
    return AlmostComplexStructure(J, side, xi, c)


def xi_fundamental_form(c: CoframeField, xi: XiParameter, side: Side | str = Side.plus) -> KForm:
    """omega^+_xi = i(M^Mb + N^Nb), omega^-_xi = i(Mb^M + N^Nb) for the rotated frame."""
    side = Side(side)
    Mx, Nx, _, _ = xi_frame(c, xi)
    M1, N1 = KForm.one_form(Mx), KForm.one_form(Nx)
    M1b, N1b = M1.conj(), N1.conj()
    first = wedge(M1, M1b) if side is Side.plus else wedge(M1b, M1)
    return (first + wedge(N1, N1b)).scale(E.I)


# ---------------------------------------------------------------------------
# tensors built from (g, J)

def fundamental_form(g: MetricField, J: AlmostComplexStructure, points=None,
                     tol: float = 1e-8, params=None) -> KForm:
    """omega(X, Y) = g(X, JY), i.e. omega_ab = g_ac J^c_b.

    When ``points`` are given the antisymmetry of g_ac J^c_b is checked there
    and a ValueError flags an incompatible pair.
    """
    w = [[E.add(*(E.mul(g.g[a][k], J.J[k][b]) for k in IDX)) for b in IDX] for a in IDX]
    if points is not None:
        sym = [E.add(w[a][b], w[b][a]) for a, b in itertools.combinations_with_replacement(IDX, 2)]
        r = float(np.max(np.abs(Program(sym).run(points, {**g.params, **(params or {})}))))
        if r > tol:
            raise ValueError(f"g(X, JY) is not antisymmetric (residual {r:.3g}); "
                             "J is not compatible with g")
    return KForm.from_matrix(w)


def nijenhuis_tensor(J: AlmostComplexStructure) -> NijenhuisField:
    """N^a_bc = J^d_b d_d J^a_c - J^d_c d_d J^a_b - J^a_d (d_b J^d_c - d_c J^d_b)."""
    j = J.J
    dj = [[[E.differentiate(j[a][b], d + 1) for b in IDX] for a in IDX] for d in IDX]  # dj[d][a][b]
    comps = {}
    for a in IDX:
        for b, c in itertools.combinations(IDX, 2):
            terms = []
            for d in IDX:
                terms.append(E.mul(j[d][b], dj[d][a][c]))
                terms.append(E.neg(E.mul(j[d][c], dj[d][a][b])))
                terms.append(E.neg(E.mul(j[a][d], E.sub(dj[b][d][c], dj[c][d][b]))))
            comps[(a, b, c)] = E.add(*terms)
    return NijenhuisField(comps)


def compatibility_residuals(g: MetricField, J: AlmostComplexStructure, points, params=None):
    prm = {**g.params, **J.params, **(params or {})}
    jn = J.values(points, prm)
    gn = g.values(points, prm)
    r_sq = np.abs(np.einsum("nab,nbc->nac", jn, jn) + np.eye(4)).max()
    r_g = np.abs(np.einsum("nca,ncd,ndb->nab", jn, gn, jn) - gn).max()
    return float(r_sq), float(r_g)


def compatibility_check(g: MetricField, J: AlmostComplexStructure, points, tol: float = 1e-9,
                        params=None, seed: int = 0, name: str = "compatibility") -> CheckReport:
    """max residuals of J^2 + id and J^T g J - g over ``points``."""
    with stopwatch() as ms:
        r_sq, r_g = compatibility_residuals(g, J, points, params)
    return CheckReport.from_residual(name, max(r_sq, r_g), tol, len(points), seed, ms(),
                                     j_squared=r_sq, metric=r_g)


class StructureKind(str, Enum):
    Kahler = "Kahler"
    AlmostKahlerNonKahler = "AlmostKahlerNonKahler"
    HermitianNonKahler = "HermitianNonKahler"
    Generic = "Generic"


@dataclass(frozen=True)
class StructureClass:
    """Sampled verdict: (dw ~ 0, N_J ~ 0) at the given points, not a proof."""

    kind: StructureKind
    nijenhuis_max: float
    domega_max: float
    tol: float
    samples: int


def classify_structure(g: MetricField, J: AlmostComplexStructure, points,
                       tol: float = INTEGRABLE_TOL, params=None) -> StructureClass:
    prm = {**g.params, **J.params, **(params or {})}
    nj = nijenhuis_tensor(J).max_abs(points, prm)
    dw = exterior_derivative(fundamental_form(g, J))
    if dw.is_structurally_zero():
        dmax = 0.0
    else:
        dmax = float(np.max(np.abs(dw.values(points, prm))))
    closed, integrable = dmax < tol, nj < tol
    if closed and integrable:
        kind = StructureKind.Kahler
    elif closed:
        kind = StructureKind.AlmostKahlerNonKahler
    elif integrable:
        kind = StructureKind.HermitianNonKahler
    else:
        kind = StructureKind.Generic
    return StructureClass(kind, nj, dmax, tol, len(points))


# ---------------------------------------------------------------------------
# integrability scan over xi

def stereographic_grid(n: int) -> list[XiParameter]:
    """n near-uniform points of the Riemann sphere (Fibonacci lattice), projected to C."""
    out = []
    golden = math.pi * (3 - math.sqrt(5))
    for k in range(n):
        z = 1 - (2 * k + 1) / n
        r = math.sqrt(1 - z * z)
        x, y = r * math.cos(golden * k), r * math.sin(golden * k)
        out.append(XiParameter.finite(complex(x, y) / (1 - z)))
    return out


def unit_circle_grid(n: int) -> list[XiParameter]:
    return [XiParameter.finite(cmath.exp(2j * math.pi * k / n)) for k in range(n)]


@dataclass
class ScanResult:
    residuals: list[tuple[XiParameter, float]]
    tol: float
    candidates: list[XiParameter] = field(default_factory=list)


def integrability_scan(c: CoframeField, side: Side | str, grid: Sequence[XiParameter],
                       points, tol: float = INTEGRABLE_TOL, params=None) -> ScanResult:
    """Max sampled Nijenhuis component of J^side_xi for every xi in ``grid``.

    Finite xi are handled with one symbolic structure in the real parameters
    xi_re, xi_im, so the Nijenhuis tensor is differentiated only once.
    """
    prm = {**c.params, **(params or {})}
    xi_sym = XiParameter(E.add(E.param("xi_re"), E.mul(E.I, E.param("xi_im"))))
    nij = None
    out = []
    for xi in grid:
        if xi.is_infinite:
            r = nijenhuis_tensor(xi_structure(c, xi, side, check=False)).max_abs(points, prm)
        else:
            if nij is None:
                nij = Program(nijenhuis_tensor(xi_structure(c, xi_sym, side, check=False)).exprs())
            val = complex(xi.value.value) if isinstance(xi.value, E.Const) else None
            if val is None:
                r = nijenhuis_tensor(xi_structure(c, xi, side, check=False)).max_abs(points, prm)
            else:
                vals = nij.run(points, {**prm, "xi_re": val.real, "xi_im": val.imag})
                r = float(np.max(np.abs(vals)))
        out.append((xi, r))
    return ScanResult(out, tol, [xi for xi, r in out if r < tol])
