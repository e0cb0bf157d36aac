"""Vectorized binary64 evaluation of expression DAGs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .expr import Add, Const, Coord, Exp, Expr, Log, Mul, Param, Pow, postorder, to_text

# relative size of an imaginary part still accepted as "real" by a domain guard
GUARD_IMAG_RTOL = 1e-9


class EvaluationError(ValueError):
    pass


class UnboundParameterError(EvaluationError):
    def __init__(self, name: str):
        super().__init__(f"parameter {name!r} is not bound")
        self.name = name


class DomainViolation(EvaluationError):
    """A guarded node (log, root, reciprocal) left its domain."""

    def __init__(self, node: Expr, point, value):
        self.node = node
        self.point = None if point is None else tuple(float(x) for x in point)
        self.value = complex(value)
        text = to_text(node)
        if len(text) > 120:
            text = text[:117] + "..."
        super().__init__(f"domain violation in {text} at {self.point}: argument {self.value}")


@dataclass(frozen=True)
class Point:
    """A point x = (x1, x2, x3, x4) with optional parameter bindings."""

    x: tuple[float, float, float, float]
    params: Mapping[str, float] | None = None

    def __post_init__(self):
        if len(self.x) != 4 or not all(np.isfinite(self.x)):
            raise ValueError(f"a point needs four finite coordinates, got {self.x}")


def as_points(points) -> np.ndarray:
    if isinstance(points, Point):
        points = [points.x]
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise ValueError(f"expected points of shape (n, 4), got {arr.shape}")
    return arr


def _not_positive(b, n: int) -> np.ndarray:
    b = np.asarray(b)
    re = b.real
    hit = np.logical_or(np.logical_not(re > 0),
                        np.abs(b.imag) > GUARD_IMAG_RTOL * np.abs(re))
    return np.broadcast_to(hit, (n,))


_C, _X, _P, _ADD, _MUL, _POWI, _POWR, _EXP, _LOG = range(9)


class Program:
    """A compiled, topologically ordered evaluation plan for several roots."""

    def __init__(self, roots: Sequence[Expr]):
        self.roots = list(roots)
        nodes = postorder(self.roots)
        slot = {n.serial: k for k, n in enumerate(nodes)}
        self.nodes = nodes
        ops = []
        for n in nodes:
            if isinstance(n, Const):
                ops.append((_C, n.value))
            elif isinstance(n, Coord):
                ops.append((_X, n.index - 1))
            elif isinstance(n, Param):
                ops.append((_P, n.name))
            elif isinstance(n, Add):
                ops.append((_ADD, [slot[t.serial] for t in n.terms]))
            elif isinstance(n, Mul):
                ops.append((_MUL, [slot[t.serial] for t in n.factors]))
            elif isinstance(n, Pow):
                p = n.exponent
                if p.denominator == 1:
                    ops.append((_POWI, (slot[n.base.serial], int(p))))
                else:
                    ops.append((_POWR, (slot[n.base.serial], float(p))))
            elif isinstance(n, Exp):
                ops.append((_EXP, slot[n.arg.serial]))
            elif isinstance(n, Log):
                ops.append((_LOG, slot[n.arg.serial]))
            else:  # pragma: no cover
                raise TypeError(type(n))
        self.ops = ops
        self.out = [slot[r.serial] for r in self.roots]

    def __len__(self) -> int:
        return len(self.ops)

    def run(self, points, params: Mapping[str, float] | None = None, *, mask: bool = False):
        """Evaluate all roots at ``points``.

        Returns a complex array of shape (len(roots), n).  With ``mask=True``
        domain violations do not raise; the result is ``(values, bad)`` where
        ``bad`` flags the points at which any guard failed.
        """
        pts = as_points(points)
        n = pts.shape[0]
        params = params or {}
        bad = np.zeros(n, dtype=bool)
        vals: list = [None] * len(self.ops)

        def violation(k, arg, hit):
            nonlocal bad
            if mask:
                bad |= hit
                return
            j = int(np.argmax(hit))
            raise DomainViolation(self.nodes[k], pts[j], np.broadcast_to(arg, (n,))[j])

        with np.errstate(all="ignore"):
            for k, (op, a) in enumerate(self.ops):
                if op == _C:
                    v = a
                elif op == _X:
                    v = pts[:, a].astype(complex)
                elif op == _P:
                    if a not in params:
                        raise UnboundParameterError(a)
                    v = complex(params[a])
                elif op == _ADD:
                    v = vals[a[0]]
                    for j in a[1:]:
                        v = v + vals[j]
                elif op == _MUL:
                    v = vals[a[0]]
                    for j in a[1:]:
                        v = v * vals[j]
                elif op == _POWI:
                    b, e = vals[a[0]], a[1]
                    m = abs(e)
                    v = b
                    for _ in range(m - 1):
                        v = v * b
                    if e < 0:
                        hit = np.broadcast_to(np.asarray(b) == 0, (n,))
                        if hit.any():
                            violation(k, b, hit)
                        v = 1.0 / v
                elif op == _POWR:
                    b, e = vals[a[0]], a[1]
                    re = np.real(b)
                    hit = _not_positive(b, n)
                    if hit.any():
                        violation(k, b, hit)
                    v = np.power(np.where(re > 0, re, np.nan), e) + 0j
                elif op == _EXP:
                    v = np.exp(vals[a])
                else:  # _LOG
                    b = vals[a]
                    re = np.real(b)
                    hit = _not_positive(b, n)
                    if hit.any():
                        violation(k, b, hit)
                    v = np.log(np.where(re > 0, re, np.nan)) + 0j
                vals[k] = v
        out = np.empty((len(self.out), n), dtype=complex)
        for r, k in enumerate(self.out):
            out[r] = vals[k]
        if mask:
            return out, bad
        return out


def evaluate(e: Expr, point, params: Mapping[str, float] | None = None) -> complex:
    """Value of ``e`` at a single point."""
    if isinstance(point, Point):
        params = {**(point.params or {}), **(params or {})}
        point = point.x
    return complex(Program([e]).run([point], params)[0, 0])


def evaluate_many(exprs: Sequence[Expr], points, params=None) -> np.ndarray:
    return Program(exprs).run(points, params)


@dataclass(frozen=True)
class ZeroTest:
    ok: bool
    max_residual: float
    samples: int
    seed: int
    tol: float

    def __bool__(self) -> bool:
        return self.ok


def good_points(exprs: Sequence[Expr], domain, n: int, seed: int,
                params=None, max_rounds: int = 20):
    """``n`` seeded domain points at which every expression evaluates.

    Candidates that trip a domain guard are dropped and replaced; gives up
    after ``max_rounds`` batches.  Returns (points, values).
    """
    from .domains import sample_domain

    prog = Program(exprs)
    kept_pts, kept_vals = [], []
    have = 0
    for r in range(max_rounds):
        need = n - have
        pts = sample_domain(domain, need if r == 0 else 2 * need, seed + 7919 * r)
        vals, bad = prog.run(pts, params, mask=True)
        vals, pts = vals[:, ~bad], pts[~bad]
        kept_pts.append(pts[:need])
        kept_vals.append(vals[:, :need])
        have += min(need, len(pts))
        if have >= n:
            return np.concatenate(kept_pts), np.concatenate(kept_vals, axis=1)
    raise EvaluationError(
        f"only {have}/{n} sample points satisfied the domain guards after {max_rounds} rounds")


def probable_zero(e: Expr, domain, n: int = 20, seed: int = 42, tol: float = 1e-8,
                  params=None) -> ZeroTest:
    """Randomized identity test: |e| <= tol at ``n`` seeded points of ``domain``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if isinstance(e, Const):
        r = abs(e.value)
        return ZeroTest(r <= tol, r, n, seed, tol)
    _, vals = good_points([e], domain, n, seed, params)
    r = float(np.max(np.abs(vals)))
    return ZeroTest(r <= tol, r, n, seed, tol)
