"""Sampling regions and seeded rejection sampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_SEED = 42


class SamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class DomainSpec:
    """Either the region u = v - 2|z2|^2 in [lo, hi] (``uprime``) or a box.

    For ``uprime`` the sampled points also satisfy |z2| <= ``z2_radius`` and
    Im z1 in ``im_z1``; these keep samples away from the u -> 0 boundary.
    """

    kind: str = "box"
    margin: tuple[float, float] = (0.5, 4.0)
    z2_radius: float = 1.0
    im_z1: tuple[float, float] = (-2.0, 2.0)
    intervals: tuple[tuple[float, float], ...] = field(
        default_factory=lambda: ((-1.0, 1.0),) * 4)

    def __post_init__(self):
        if self.kind not in ("uprime", "box"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if len(self.intervals) != 4:
            raise ValueError("a box needs four intervals")

    @classmethod
    def uprime(cls, lo: float = 0.5, hi: float = 4.0, **kw) -> "DomainSpec":
        return cls(kind="uprime", margin=(float(lo), float(hi)), **kw)

    @classmethod
    def box(cls, *intervals) -> "DomainSpec":
        return cls(kind="box", intervals=tuple((float(a), float(b)) for a, b in intervals))

    def u_value(self, pts: np.ndarray) -> np.ndarray:
        return 2 * pts[:, 0] - 2 * (pts[:, 2] ** 2 + pts[:, 3] ** 2)

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == "box":
            ok = np.ones(len(pts), dtype=bool)
            for k, (a, b) in enumerate(self.intervals):
                ok &= (pts[:, k] >= a) & (pts[:, k] <= b)
            return ok
        lo, hi = self.margin
        u = self.u_value(pts)
        r2 = pts[:, 2] ** 2 + pts[:, 3] ** 2
        return ((u >= lo) & (u <= hi) & (r2 <= self.z2_radius ** 2)
                & (pts[:, 1] >= self.im_z1[0]) & (pts[:, 1] <= self.im_z1[1]))

    def bounding_box(self) -> np.ndarray:
        if self.kind == "box":
            return np.array(self.intervals, dtype=float)
        lo, hi = self.margin
        r = self.z2_radius
        return np.array([
            (lo / 2, hi / 2 + r * r),
            self.im_z1,
            (-r, r),
            (-r, r),
        ], dtype=float)


def sample_domain(domain: DomainSpec, n: int, seed: int = DEFAULT_SEED,
                  *, max_tries: int | None = None) -> np.ndarray:
    """``n`` points of ``domain`` drawn by rejection from its bounding box.

    Deterministic in (domain, n, seed).  Raises SamplingError once
    ``1000 * n`` candidates have been drawn without filling the quota.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    cap = 1000 * n if max_tries is None else max_tries
    rng = np.random.default_rng(seed)
    bb = domain.bounding_box()
    lo, width = bb[:, 0], bb[:, 1] - bb[:, 0]
    if np.any(width < 0):
        raise SamplingError(f"domain {domain} is empty")
    out: list[np.ndarray] = []
    have = drawn = 0
    batch = max(n, 64)
    while have < n:
        if drawn >= cap:
            raise SamplingError(
                f"retry cap exceeded: {have}/{n} points after {drawn} draws in {domain}")
        take = min(batch, cap - drawn)
        cand = lo + width * rng.random((take, 4))
        drawn += take
        ok = cand[domain.contains(cand)]
        out.append(ok)
        have += len(ok)
    return np.concatenate(out)[:n]
