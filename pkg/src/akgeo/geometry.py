"""Forms, metrics, Levi-Civita connection, curvature, Hodge star, Weyl halves.

Array indices are 0-based (index a <-> coordinate x^{a+1}).  Conventions:

* (A^B)_{ab} = A_a B_b - A_b B_a, a 2-form is 1/2 w_{ab} dx^a ^ dx^b;
* R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb},
  R_{bd} = R^a_{bad}, Weyl with the +R/6 term;
* the Hodge star uses the volume form sqrt(det g) dx1^dx2^dx3^dx4 times the
  metric's orientation sign, so that *(dx1^dx2) = dx3^dx4 for the flat metric.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import expr as E
from .domains import DomainSpec
from .expr import Expr
from .numeric import Program, good_points

IDX = range(4)


class DegenerateError(ValueError):
    pass


def _perm_sign(seq: Sequence[int]) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] == seq[j]:
                return 0
            if seq[i] > seq[j]:
                sign = -sign
    return sign


# ---------------------------------------------------------------------------
# forms

class KForm:
    """A k-form stored by its components on increasing index tuples."""

    def __init__(self, degree: int, comps: Mapping[tuple[int, ...], Expr] | None = None):
        if not 0 <= degree <= 4:
            raise ValueError("degree must be in 0..4")
        self.degree = degree
        self.comps: dict[tuple[int, ...], Expr] = {}
        for idx in itertools.combinations(IDX, degree):
            self.comps[idx] = E.ZERO
        for idx, val in (comps or {}).items():
            idx = tuple(idx)
            if list(idx) != sorted(set(idx)) or len(idx) != degree:
                raise ValueError(f"component index {idx} is not strictly increasing")
            self.comps[idx] = E.as_expr(val)

    @classmethod
    def one_form(cls, components: Iterable) -> "KForm":
        comps = list(components)
        if len(comps) != 4:
            raise ValueError("a 1-form needs four components")
        return cls(1, {(a,): comps[a] for a in IDX})

    @classmethod
    def from_matrix(cls, w) -> "KForm":
        """2-form from a full matrix; only the upper triangle is read."""
        return cls(2, {(a, b): w[a][b] for a, b in itertools.combinations(IDX, 2)})

    def __getitem__(self, idx) -> Expr:
        if isinstance(idx, int):
            idx = (idx,)
        s = _perm_sign(idx)
        if s == 0:
            return E.ZERO
        val = self.comps[tuple(sorted(idx))]
        return val if s > 0 else E.neg(val)

    def __add__(self, other: "KForm") -> "KForm":
        self._same(other)
        return KForm(self.degree, {k: E.add(v, other.comps[k]) for k, v in self.comps.items()})

    def __sub__(self, other: "KForm") -> "KForm":
        self._same(other)
        return KForm(self.degree, {k: E.sub(v, other.comps[k]) for k, v in self.comps.items()})

    def __neg__(self) -> "KForm":
        return self.scale(-1)

    def scale(self, c) -> "KForm":
        c = E.as_expr(c)
        return KForm(self.degree, {k: E.mul(c, v) for k, v in self.comps.items()})

    def conj(self) -> "KForm":
        keys = list(self.comps)
        vals = E.conjugate_all([self.comps[k] for k in keys])
        return KForm(self.degree, dict(zip(keys, vals)))

    def _same(self, other: "KForm") -> None:
        if other.degree != self.degree:
            raise ValueError("degree mismatch")

    def is_structurally_zero(self) -> bool:
        return all(v is E.ZERO for v in self.comps.values())

    def is_constant(self) -> bool:
        """No component depends on a coordinate (parameters are allowed)."""
        return all(not v.free for v in self.comps.values())

    def expand(self) -> "KForm":
        keys = list(self.comps)
        vals = E.expand_all([self.comps[k] for k in keys])
        return KForm(self.degree, {k: v for k, v in zip(keys, vals) if v is not E.ZERO})

    def values(self, points, params=None) -> np.ndarray:
        """Components at ``points``: array (n, ncomp) in ``self.comps`` order."""
        prog = Program(list(self.comps.values()))
        return prog.run(points, params).T

    def dense(self, points, params=None) -> np.ndarray:
        """Full antisymmetric component arrays, shape (n, 4, ..., 4)."""
        vals = self.values(points, params)
        n = vals.shape[0]
        out = np.zeros((n,) + (4,) * self.degree, dtype=complex)
        for j, idx in enumerate(self.comps):
            for perm in itertools.permutations(range(self.degree)):
                out[(slice(None),) + tuple(idx[p] for p in perm)] = _perm_sign(perm) * vals[:, j]
        return out

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {E.to_text(v)}" for k, v in self.comps.items() if v is not E.ZERO)
        return f"KForm({self.degree}, {{{body}}})"


def wedge(a: KForm, b: KForm) -> KForm:
    k, l = a.degree, b.degree
    if k + l > 4:
        return KForm(4)
    comps = {}
    for idx in itertools.combinations(IDX, k + l):
        terms = []
        for pos in itertools.combinations(range(k + l), k):
            rest = [p for p in range(k + l) if p not in pos]
            sign = _perm_sign(list(pos) + rest)
            ia = tuple(idx[p] for p in pos)
            ib = tuple(idx[p] for p in rest)
            t = E.mul(a.comps[ia], b.comps[ib])
            terms.append(t if sign > 0 else E.neg(t))
        comps[idx] = E.add(*terms)
    return KForm(k + l, comps)


def exterior_derivative(w: KForm) -> KForm:
    """d w, exact; (dw)_{i0..ik} = sum_j (-1)^j d_{ij} w_{i0..^ij..ik}."""
    if w.degree >= 4:
        raise ValueError("the exterior derivative of a 4-form is not defined here")
    comps = {}
    for idx in itertools.combinations(IDX, w.degree + 1):
        terms = []
        for j, a in enumerate(idx):
            rest = idx[:j] + idx[j + 1:]
            t = E.differentiate(w.comps[rest], a + 1)
            terms.append(t if j % 2 == 0 else E.neg(t))
        comps[idx] = E.add(*terms)
    return KForm(w.degree + 1, comps)


def function_form(f: Expr) -> KForm:
    return KForm(0, {(): f})


# ---------------------------------------------------------------------------
# symbolic linear algebra

def det3(m) -> Expr:
    return E.add(
        E.mul(m[0][0], E.sub(E.mul(m[1][1], m[2][2]), E.mul(m[1][2], m[2][1]))),
        E.neg(E.mul(m[0][1], E.sub(E.mul(m[1][0], m[2][2]), E.mul(m[1][2], m[2][0])))),
        E.mul(m[0][2], E.sub(E.mul(m[1][0], m[2][1]), E.mul(m[1][1], m[2][0]))),
    )


def _minor(m, i, j):
    return [[m[r][c] for c in IDX if c != j] for r in IDX if r != i]


def det4(m) -> Expr:
    return E.add(*(E.mul(E.const((-1) ** j), m[0][j], det3(_minor(m, 0, j))) for j in IDX))


def inverse4(m, symmetric: bool = False) -> tuple[list[list[Expr]], Expr]:
    """Symbolic inverse by cofactors; returns (inverse, determinant)."""
    cof = [[None] * 4 for _ in IDX]
    for i in IDX:
        for j in IDX:
            if symmetric and j < i:
                cof[i][j] = cof[j][i]
                continue
            cof[i][j] = E.mul(E.const((-1) ** (i + j)), det3(_minor(m, i, j)))
    det = E.add(*(E.mul(m[0][j], cof[0][j]) for j in IDX))
    rdet = E.pow_(det, -1)
    inv = [[E.mul(cof[j][i], rdet) for j in IDX] for i in IDX]
    return inv, det


# ---------------------------------------------------------------------------
# metric, coframe

def _probe(exprs: list[Expr], domain: DomainSpec, params, n: int = 3, seed: int = 0):
    return good_points(exprs, domain, n, seed, params)


class MetricField:
    """Symmetric 4x4 metric g_{ab}(x) with a declared sampling domain.

    ``orientation`` (+1 or -1) multiplies the coordinate volume form; the
    Hodge star and the Weyl split follow it.
    """

    def __init__(self, components, domain: DomainSpec | None = None,
                 params: Mapping[str, float] | None = None, orientation: int = 1):
        g = [[None] * 4 for _ in IDX]
        for a in IDX:
            for b in IDX:
                if b < a:
                    g[a][b] = g[b][a]
                else:
                    g[a][b] = E.as_expr(components[a][b])
        self.g = g
        self.domain = domain or DomainSpec.box(*[(-1, 1)] * 4)
        self.params = dict(params or {})
        if orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        self.orientation = orientation

    def __getitem__(self, ab) -> Expr:
        return self.g[ab[0]][ab[1]]

    def upper(self) -> list[Expr]:
        return [self.g[a][b] for a, b in itertools.combinations_with_replacement(IDX, 2)]

    def with_domain(self, domain: DomainSpec) -> "MetricField":
        return MetricField(self.g, domain, self.params, self.orientation)

    @cached_property
    def _inverse(self):
        return inverse4(self.g, symmetric=True)

    @property
    def inverse(self) -> list[list[Expr]]:
        return self._inverse[0]

    @property
    def det(self) -> Expr:
        return self._inverse[1]

    def values(self, points, params=None) -> np.ndarray:
        """g at ``points`` as a real array (n, 4, 4)."""
        vals = Program(self.upper()).run(points, self._params(params))
        n = vals.shape[1]
        out = np.zeros((n, 4, 4))
        for j, (a, b) in enumerate(itertools.combinations_with_replacement(IDX, 2)):
            out[:, a, b] = out[:, b, a] = vals[j].real
        return out

    def _params(self, params):
        return {**self.params, **(params or {})}

    def sample(self, n: int, seed: int, params=None) -> np.ndarray:
        """Seeded domain points at which g evaluates cleanly."""
        pts, _ = good_points(self.upper(), self.domain, n, seed, self._params(params))
        return pts

    def check_positive(self, points, params=None) -> np.ndarray:
        return leading_minors(self.values(points, params)).min(axis=1) > 0

    @cached_property
    def connection(self) -> "Connection":
        return levi_civita(self)

    @cached_property
    def curvature(self) -> "CurvatureBundle":
        return curvature_bundle(self)


class CoframeField:
    """Complex null coframe (M, Mbar, N, Nbar); g = 2(M Mbar + N Nbar)."""

    def __init__(self, M: Sequence, N: Sequence, domain: DomainSpec | None = None,
                 params: Mapping[str, float] | None = None):
        self.M = tuple(E.as_expr(c) for c in M)
        self.N = tuple(E.as_expr(c) for c in N)
        if len(self.M) != 4 or len(self.N) != 4:
            raise ValueError("M and N need four components each")
        self.domain = domain or DomainSpec.box(*[(-1, 1)] * 4)
        self.params = dict(params or {})

    @cached_property
    def Mbar(self) -> tuple[Expr, ...]:
        return tuple(E.conjugate_all(list(self.M)))

    @cached_property
    def Nbar(self) -> tuple[Expr, ...]:
        return tuple(E.conjugate_all(list(self.N)))

    def rows(self) -> list[tuple[Expr, ...]]:
        return [self.M, self.Mbar, self.N, self.Nbar]

    def forms(self) -> tuple[KForm, KForm, KForm, KForm]:
        return tuple(KForm.one_form(r) for r in self.rows())

    @cached_property
    def _dual(self):
        inv, det = inverse4([list(r) for r in self.rows()])
        # column i of the inverse is the vector dual to row i
        vecs = tuple(tuple(inv[a][i] for a in IDX) for i in IDX)
        return vecs, det

    @property
    def dual_frame(self) -> tuple[tuple[Expr, ...], ...]:
        """Vectors (m, mbar, n, nbar) with theta^i(e_j) = delta^i_j."""
        return self._dual[0]

    @property
    def volume(self) -> Expr:
        """Coefficient of M^Mbar^N^Nbar on dx1^dx2^dx3^dx4."""
        return self._dual[1]

    def matrix(self, points, params=None) -> np.ndarray:
        rows = [c for r in self.rows() for c in r]
        vals = Program(rows).run(points, {**self.params, **(params or {})})
        return vals.T.reshape(-1, 4, 4)

    def check_nondegenerate(self, points=None, params=None, rtol: float = 1e-10) -> None:
        if points is None:
            points, _ = _probe([c for r in self.rows() for c in r], self.domain,
                               {**self.params, **(params or {})})
        mats = self.matrix(points, params)
        dets = np.abs(np.linalg.det(mats))
        scale = np.prod(np.linalg.norm(mats, axis=2), axis=1)
        bad = dets <= rtol * np.maximum(scale, 1e-300)
        if bad.any():
            j = int(np.argmax(bad))
            raise DegenerateError(
                f"M^Mbar^N^Nbar vanishes at {tuple(np.asarray(points)[j])}")

    def orientation(self, params=None) -> int:
        """Sign of theta1^theta2^theta3^theta4 relative to dx1^dx2^dx3^dx4.

        With M = (t1 + i t2)/sqrt2 and N = (t3 + i t4)/sqrt2 one has
        M^Mbar^N^Nbar = -t1^t2^t3^t4.
        """
        pts, vals = _probe([self.volume], self.domain, {**self.params, **(params or {})})
        return 1 if -vals[0, 0].real > 0 else -1


def metric_from_coframe(c: CoframeField, check: bool = True) -> MetricField:
    """g = M (x) Mbar + Mbar (x) M + N (x) Nbar + Nbar (x) N."""
    if check:
        c.check_nondegenerate()
    M, Mb, N, Nb = c.rows()
    g = [[None] * 4 for _ in IDX]
    for a in IDX:
        for b in range(a, 4):
            g[a][b] = E.add(E.mul(M[a], Mb[b]), E.mul(Mb[a], M[b]),
                            E.mul(N[a], Nb[b]), E.mul(Nb[a], N[b]))
    orientation = c.orientation() if check else 1
    return MetricField(g, c.domain, c.params, orientation)


def leading_minors(gn: np.ndarray) -> np.ndarray:
    """Leading principal minors of each (4, 4) matrix: shape (n, 4)."""
    gn = np.asarray(gn)
    return np.stack([np.linalg.det(gn[..., :k, :k]) for k in range(1, 5)], axis=-1)


# ---------------------------------------------------------------------------
# connection and curvature

@dataclass
class Connection:
    """Christoffel symbols gamma[a][b][c] = G^a_{bc}, symmetric in (b, c)."""

    metric: MetricField
    gamma: list

    def exprs(self) -> list[Expr]:
        return [self.gamma[a][b][c] for a in IDX for b in IDX for c in IDX]

    def values(self, points, params=None) -> np.ndarray:
        vals = Program(self.exprs()).run(points, self.metric._params(params))
        return vals.T.reshape(-1, 4, 4, 4).real

    def metricity_residual(self, points, params=None) -> float:
        """max |nabla_a g_{bc}| at ``points``."""
        g = self.metric
        dg = [[[E.differentiate(g.g[b][c], a + 1) for c in IDX] for b in IDX] for a in IDX]
        flat = [dg[a][b][c] for a in IDX for b in IDX for c in IDX]
        prm = g._params(params)
        dgn = Program(flat).run(points, prm).T.reshape(-1, 4, 4, 4).real
        gam = self.values(points, params)
        gn = g.values(points, params)
        cov = (dgn - np.einsum("nDab,nDc->nabc", gam, gn)
               - np.einsum("nDac,nbD->nabc", gam, gn))
        return float(np.max(np.abs(cov)))


def levi_civita(g: MetricField) -> Connection:
    gi = g.inverse
    dg = [[[E.differentiate(g.g[b][c], a + 1) for c in IDX] for b in IDX] for a in IDX]
    # first kind: G_{d,bc} = 1/2 (d_b g_{dc} + d_c g_{db} - d_d g_{bc})
    low = [[[None] * 4 for _ in IDX] for _ in IDX]
    for d in IDX:
        for b in IDX:
            for c in range(b, 4):
                low[d][b][c] = low[d][c][b] = E.mul(
                    E.HALF, E.add(dg[b][d][c], dg[c][d][b], E.neg(dg[d][b][c])))
    gamma = [[[None] * 4 for _ in IDX] for _ in IDX]
    for a in IDX:
        for b in IDX:
            for c in range(b, 4):
                gamma[a][b][c] = gamma[a][c][b] = E.add(
                    *(E.mul(gi[a][d], low[d][b][c]) for d in IDX))
    return Connection(g, gamma)


@dataclass
class CurvatureValues:
    """Curvature tensors evaluated at n points (0-based indices)."""

    points: np.ndarray
    metric: np.ndarray       # g_ab          (n,4,4)
    riemann_up: np.ndarray   # R^a_bcd       (n,4,4,4,4)
    riemann: np.ndarray      # R_abcd        (n,4,4,4,4)
    ricci: np.ndarray        # R_bd          (n,4,4)
    scalar: np.ndarray       # R             (n,)
    weyl: np.ndarray         # C_abcd        (n,4,4,4,4)


def weyl_from(gn: np.ndarray, riem: np.ndarray, ric: np.ndarray, scal: np.ndarray) -> np.ndarray:
    g = gn
    t = (np.einsum("nac,nbd->nabcd", g, ric) - np.einsum("nad,nbc->nabcd", g, ric)
         + np.einsum("nbd,nac->nabcd", g, ric) - np.einsum("nbc,nad->nabcd", g, ric))
    gg = np.einsum("nac,nbd->nabcd", g, g) - np.einsum("nad,nbc->nabcd", g, g)
    return riem - 0.5 * t + (scal / 6.0)[:, None, None, None, None] * gg


class CurvatureBundle:
    """Riemann tensor as cached expressions; Ricci, scalar and Weyl derived.

    The symbolic Riemann components are built once.  Ricci, scalar and Weyl
    are available symbolically (``ricci_exprs`` etc.) but pointwise work goes
    through ``evaluate``, which contracts evaluated Riemann components.
    """

    def __init__(self, g: MetricField, riemann_up: dict):
        self.metric = g
        self._r = riemann_up  # (a, b, c, d) with c < d

    def riemann_up(self, a, b, c, d) -> Expr:
        if c == d:
            return E.ZERO
        if c < d:
            return self._r[(a, b, c, d)]
        return E.neg(self._r[(a, b, d, c)])

    def riemann_exprs(self) -> list[Expr]:
        return list(self._r.values())

    @cached_property
    def ricci_exprs(self) -> list[list[Expr]]:
        return [[E.add(*(self.riemann_up(a, b, a, d) for a in IDX)) for d in IDX] for b in IDX]

    @cached_property
    def scalar_expr(self) -> Expr:
        gi = self.metric.inverse
        return E.add(*(E.mul(gi[b][d], self.ricci_exprs[b][d]) for b in IDX for d in IDX))

    def riemann_low(self, a, b, c, d) -> Expr:
        g = self.metric.g
        return E.add(*(E.mul(g[a][e], self.riemann_up(e, b, c, d)) for e in IDX))

    def weyl_expr(self, a, b, c, d) -> Expr:
        g, ric, s = self.metric.g, self.ricci_exprs, self.scalar_expr
        t = E.add(E.mul(g[a][c], ric[b][d]), E.neg(E.mul(g[a][d], ric[b][c])),
                  E.mul(g[b][d], ric[a][c]), E.neg(E.mul(g[b][c], ric[a][d])))
        gg = E.sub(E.mul(g[a][c], g[b][d]), E.mul(g[a][d], g[b][c]))
        return E.add(self.riemann_low(a, b, c, d), E.mul(E.const(Fraction(-1, 2)), t),
                     E.mul(E.const(Fraction(1, 6)), s, gg))

    @cached_property
    def _program(self) -> Program:
        return Program(self.riemann_exprs())

    def evaluate(self, points, params=None) -> CurvatureValues:
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        prm = self.metric._params(params)
        vals = self._program.run(pts, prm).real
        n = pts.shape[0]
        rup = np.zeros((n, 4, 4, 4, 4))
        for j, (a, b, c, d) in enumerate(self._r):
            rup[:, a, b, c, d] = vals[j]
            rup[:, a, b, d, c] = -vals[j]
        gn = self.metric.values(pts, params)
        riem = np.einsum("nae,nebcd->nabcd", gn, rup)
        ric = np.einsum("nabad->nbd", rup)
        ginv = np.linalg.inv(gn)
        scal = np.einsum("nbd,nbd->n", ginv, ric)
        weyl = weyl_from(gn, riem, ric, scal)
        return CurvatureValues(pts, gn, rup, riem, ric, scal, weyl)


def curvature_bundle(g: MetricField) -> CurvatureBundle:
    gam = g.connection.gamma
    r = {}
    for a in IDX:
        for b in IDX:
            for c, d in itertools.combinations(IDX, 2):
                r[(a, b, c, d)] = E.add(
                    E.differentiate(gam[a][d][b], c + 1),
                    E.neg(E.differentiate(gam[a][c][b], d + 1)),
                    *(E.mul(gam[a][c][e], gam[e][d][b]) for e in IDX),
                    *(E.neg(E.mul(gam[a][d][e], gam[e][c][b])) for e in IDX),
                )
    return CurvatureBundle(g, r)


def orthonormal_coframe(gn: np.ndarray, orientation: int = 1) -> np.ndarray:
    """Rows theta^i_a of an orthonormal coframe at each point, (n, 4, 4).

    Built from the Cholesky factor, so theta^1^...^theta^4 is a positive
    multiple of dx1^...^dx4 times ``orientation``.
    """
    L = np.linalg.cholesky(gn)
    theta = np.swapaxes(L, -1, -2).copy()
    if orientation < 0:
        theta[..., 3, :] *= -1
    return theta


def frame_components(tensor: np.ndarray, gn: np.ndarray, orientation: int = 1) -> np.ndarray:
    """Covariant tensor (n,4,...,4) expressed in the orthonormal frame."""
    frame = np.linalg.inv(orthonormal_coframe(gn, orientation))  # columns e_i
    if tensor.ndim == 3:
        return np.einsum("nab,nai,nbj->nij", tensor, frame, frame)
    if tensor.ndim == 5:
        return np.einsum("nabcd,nai,nbj,nck,ndl->nijkl", tensor, frame, frame, frame, frame,
                         optimize=True)
    raise ValueError("only rank 2 and rank 4 tensors are supported")


# ---------------------------------------------------------------------------
# Hodge star, SD/ASD split, Petrov type

def levi_civita_symbol() -> np.ndarray:
    eps = np.zeros((4, 4, 4, 4))
    for p in itertools.permutations(IDX):
        eps[p] = _perm_sign(p)
    return eps


_EPS = levi_civita_symbol()


def hodge_star(g: MetricField, w: KForm, orientation: int | None = None) -> KForm:
    """(*w)_{ab} = 1/2 sqrt(det g) eps_{cdab} w^{cd} for a 2-form w."""
    if w.degree != 2:
        raise ValueError("hodge_star is implemented for 2-forms")
    o = g.orientation if orientation is None else orientation
    gi = g.inverse
    vol = E.mul(E.const(o), E.sqrt(g.det))
    up = {}
    for c, d in itertools.combinations(IDX, 2):
        up[(c, d)] = E.add(*(E.mul(gi[c][e], gi[d][f], w[e, f])
                             for e in IDX for f in IDX if e != f))
    comps = {}
    for a, b in itertools.combinations(IDX, 2):
        terms = []
        for (c, d), val in up.items():
            s = _EPS[c, d, a, b]
            if s:
                terms.append(E.mul(E.const(int(s)), val))
        comps[(a, b)] = E.mul(vol, E.add(*terms))
    return KForm(2, comps)


def hodge_star_values(gn: np.ndarray, wn: np.ndarray, orientation: int = 1) -> np.ndarray:
    """Numeric Hodge star of dense 2-forms wn (n,4,4) at metrics gn (n,4,4)."""
    ginv = np.linalg.inv(gn)
    vol = orientation * np.sqrt(np.linalg.det(gn))
    wup = np.einsum("nce,ndf,nef->ncd", ginv, ginv, wn)
    return 0.5 * vol[:, None, None] * np.einsum("cdab,ncd->nab", _EPS, wup)


def sd_basis(side: int) -> np.ndarray:
    """Unit-norm basis sigma^i_{+/-} of self-dual (+1) or anti-self-dual (-1) 2-forms.

    sigma1 = t12 +/- t34, sigma2 = t13 +/- t42, sigma3 = t14 +/- t23 in
    orthonormal frame components, each scaled by 1/sqrt2.
    """
    out = np.zeros((3, 4, 4))
    for k, ((i, j), (p, q)) in enumerate([((0, 1), (2, 3)), ((0, 2), (3, 1)), ((0, 3), (1, 2))]):
        out[k, i, j], out[k, j, i] = 1, -1
        out[k, p, q] += side
        out[k, q, p] -= side
    return out / np.sqrt(2)


class Side(str, Enum):
    plus = "plus"
    minus = "minus"

    @property
    def sign(self) -> int:
        return 1 if self is Side.plus else -1


@dataclass(frozen=True)
class WeylHalf:
    side: Side
    matrix: np.ndarray
    point: tuple = ()

    @property
    def eigenvalues(self) -> np.ndarray:
        ev = np.linalg.eigvals(self.matrix)
        return ev[np.argsort(ev.real)]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))


def weyl_half_matrices(weyl: np.ndarray, gn: np.ndarray, orientation: int = 1):
    """(W+, W-) matrices (n,3,3) from Weyl tensors C_abcd and metrics at n points."""
    cf = frame_components(weyl, gn, orientation)
    out = []
    for side in (1, -1):
        s = sd_basis(side)
        out.append(0.25 * np.einsum("iab,nabcd,jcd->nij", s, cf, s))
    return out[0], out[1]


def weyl_halves(g: MetricField, p, params=None, orientation: int | None = None):
    """The trace-free Weyl operators on Lambda^2_+ and Lambda^2_- at point p."""
    o = g.orientation if orientation is None else orientation
    cv = g.curvature.evaluate(np.asarray(p, dtype=float)[None, :], params)
    wp, wm = weyl_half_matrices(cv.weyl, cv.metric, o)
    pt = tuple(float(x) for x in np.ravel(p))
    return WeylHalf(Side.plus, wp[0].astype(complex), pt), WeylHalf(Side.minus, wm[0].astype(complex), pt)


class PetrovType(str, Enum):
    I = "I"
    II = "II"
    D = "D"
    III = "III"
    N = "N"
    O = "O"


class ClassificationError(ValueError):
    pass


def petrov_classify(w, tol_zero: float | None = None, tol_degenerate: float = 1e-6) -> PetrovType:
    """Petrov type of a trace-free 3x3 Weyl half from its eigenstructure."""
    m = np.asarray(w.matrix if isinstance(w, WeylHalf) else w, dtype=complex)
    norm = float(np.linalg.norm(m))
    if tol_zero is None:
        tol_zero = 1e-6 * (1 + norm)
    if abs(np.trace(m)) > max(1e-8, tol_degenerate * norm):
        raise ClassificationError(f"Weyl half is not trace-free (trace {np.trace(m)})")
    if norm <= tol_zero:
        return PetrovType.O
    ev = np.linalg.eigvals(m)
    scale = max(1.0, float(np.max(np.abs(ev))))
    gap = tol_degenerate * scale
    same = [abs(ev[i] - ev[j]) <= gap for i, j in ((0, 1), (0, 2), (1, 2))]
    svals = lambda a: np.linalg.svd(a, compute_uv=False)
    rank = lambda a: int(np.sum(svals(a) > tol_degenerate * max(1.0, norm)))
    if not any(same):
        return PetrovType.I
    if all(same):
        r = rank(m)
        if r == 2:
            return PetrovType.III
        if r == 1:
            return PetrovType.N
        raise ClassificationError("nonzero Weyl half with vanishing rank")
    if sum(same) != 1:
        raise ClassificationError(f"inconsistent eigenvalue coincidences {ev}")
    i, j = [(0, 1), (0, 2), (1, 2)][same.index(True)]
    lam = 0.5 * (ev[i] + ev[j])
    r = rank(m - lam * np.eye(3))
    if r == 1:
        return PetrovType.D
    if r == 2:
        return PetrovType.II
    raise ClassificationError(f"repeated eigenvalue {lam} with rank {r}")


# ---------------------------------------------------------------------------
# pullback

def pullback_metric(mapping: Sequence[Expr], g: MetricField,
                    domain: DomainSpec | None = None) -> MetricField:
    """(phi^* g)_{ab} = d_a phi^c d_b phi^d (g_{cd} o phi)."""
    mapping = [E.as_expr(m) for m in mapping]
    sub = dict(zip((1, 2, 3, 4), mapping))
    composed = E.substitute_all([g.g[c][d] for c in IDX for d in IDX], sub)
    gc = [composed[4 * c:4 * c + 4] for c in IDX]
    jac = [[E.differentiate(mapping[c], a + 1) for c in IDX] for a in IDX]
    out = [[None] * 4 for _ in IDX]
    for a in IDX:
        for b in range(a, 4):
            out[a][b] = E.add(*(E.mul(jac[a][c], jac[b][d], gc[c][d])
                                for c in IDX for d in IDX
                                if jac[a][c] is not E.ZERO and jac[b][d] is not E.ZERO))
    return MetricField(out, domain, g.params, g.orientation)
