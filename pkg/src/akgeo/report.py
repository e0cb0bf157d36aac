"""Check reports shared by the library checks and the CLI."""

from __future__ import annotations

import json
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any


@dataclass
class CheckReport:
    """Outcome of one named verification.

    ``status`` is "pass" exactly when ``max_residual <= tol``; "error" marks a
    check that raised before producing a residual.
    """

    name: str
    status: str
    max_residual: float
    samples: int
    seed: int
    tol: float
    ms: float = 0.0
    detail: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_residual(cls, name: str, residual: float, tol: float, samples: int = 0,
                      seed: int = 0, ms: float = 0.0, **detail) -> "CheckReport":
        residual = float(residual)
        ok = not math.isnan(residual) and residual <= tol
        return cls(name, "pass" if ok else "fail", residual, samples, seed, tol, ms, detail)

    @classmethod
    def lower_bound(cls, name: str, observed: float, bound: float, samples: int = 0,
                    seed: int = 0, ms: float = 0.0, **detail) -> "CheckReport":
        """A check that ``observed`` reaches ``bound``; the residual is the shortfall."""
        shortfall = max(0.0, bound - float(observed))
        return cls.from_residual(name, shortfall, 0.0, samples, seed, ms,
                                 observed=float(observed), bound=bound, **detail)

    @classmethod
    def error(cls, name: str, exc: BaseException, samples: int = 0, seed: int = 0,
              tol: float = 0.0, ms: float = 0.0) -> "CheckReport":
        return cls(name, "error", math.nan, samples, seed, tol, ms,
                   {"error": f"{type(exc).__name__}: {exc}"})

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict[str, Any]:
        out = {
            "name": self.name,
            "status": self.status,
            "max_residual": _finite_or_none(self.max_residual),
            "samples": self.samples,
            "seed": self.seed,
            "tol": self.tol,
            "ms": round(self.ms, 3),
        }
        if self.detail:
            out["detail"] = {k: _jsonable(v) for k, v in self.detail.items()}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)


def _finite_or_none(x: float):
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _jsonable(v):
    if isinstance(v, float):
        return _finite_or_none(v)
    if isinstance(v, complex):
        return [_finite_or_none(v.real), _finite_or_none(v.imag)]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if hasattr(v, "item"):  # numpy scalar
        return _jsonable(v.item())
    return v


@contextmanager
def stopwatch():
    """Yields a callable returning elapsed milliseconds."""
    t0 = time.perf_counter()
    yield lambda: (time.perf_counter() - t0) * 1e3
