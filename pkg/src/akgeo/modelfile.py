"""Line-oriented model files describing a coframe or a metric.

Example::

    coords: x1 x2 x3 x4
    param: phi
    coframe:
      M = (1/(sqrt(2)*(v - 2*z2*z2b)^(1/4))) * (dz1 - 2*z2b*dz2)
      N = sqrt(2)*(v - 2*z2*z2b)^(1/4) * dz2
    domain:
      uprime 0.5 4

A ``metric:`` block lists ``gab = <expr>`` entries with a <= b; omitted
entries are zero.  ``domain:`` accepts either ``uprime <lo> <hi>`` or lines
``x<k> <lo> <hi>`` (unlisted coordinates default to [-1, 1]).  Exactly one
of ``coframe:`` and ``metric:`` must be present.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import expr as E
from .domains import DomainSpec, SamplingError
from .geometry import CoframeField, DegenerateError, MetricField, metric_from_coframe
from .numeric import EvaluationError, good_points
from .parser import ParseError, parse_expression

_DX = {f"dx{k}": E.param(f"dx{k}") for k in (1, 2, 3, 4)}
_DIFFERENTIALS = {
    **_DX,
    "dz1": E.add(_DX["dx1"], E.mul(E.I, _DX["dx2"])),
    "dz2": E.add(_DX["dx3"], E.mul(E.I, _DX["dx4"])),
    "dz1b": E.sub(_DX["dx1"], E.mul(E.I, _DX["dx2"])),
    "dz2b": E.sub(_DX["dx3"], E.mul(E.I, _DX["dx4"])),
}
_BLOCKS = ("coframe", "metric", "domain")
_ENTRY = re.compile(r"^\s*([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(.*)$")


class ModelError(ValueError):
    """A malformed or invalid model file; ``line``/``col`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = "" if line is None else f"line {line}" + ("" if col is None else f", column {col}") + ": "
        super().__init__(where + message)


@dataclass
class ModelFile:
    params: tuple[str, ...]
    domain: DomainSpec
    coframe: CoframeField | None = None
    metric: MetricField | None = None
    source: str = "<string>"
    param_values: dict[str, float] = field(default_factory=dict)

    def metric_field(self) -> MetricField:
        return self.metric


def _one_form(text: str, params, line: int, col: int) -> tuple[E.Expr, ...]:
    try:
        e = parse_expression(text, params, _DIFFERENTIALS)
    except ParseError as err:
        raise ModelError(str(err).rsplit(" at offset", 1)[0], line, col + err.offset) from None
    zero = {f"dx{k}": 0 for k in (1, 2, 3, 4)}
    if E.expand(E.substitute(e, zero)) is not E.ZERO:
        raise ModelError("1-form has a term without a differential", line, col)
    comps = tuple(E.substitute(e, {**zero, f"dx{k}": 1}) for k in (1, 2, 3, 4))
    # linearity in the differentials: e(2 dx) - 2 e(dx) must vanish
    doubled = E.substitute(e, {f"dx{k}": E.mul(2, _DX[f"dx{k}"]) for k in (1, 2, 3, 4)})
    lin = E.expand(E.sub(doubled, E.mul(2, e)))
    if lin is not E.ZERO:
        raise ModelError("1-form is not linear in the differentials", line, col)
    return comps


def _domain_block(lines: list[tuple[int, str]]) -> DomainSpec:
    intervals = {k: (-1.0, 1.0) for k in (1, 2, 3, 4)}
    uprime = None
    for ln, text in lines:
        parts = text.split()
        try:
            if parts[0] == "uprime":
                lo, hi = (float(x) for x in parts[1:3]) if len(parts) >= 3 else (0.5, 4.0)
                uprime = (lo, hi)
            elif re.fullmatch(r"x[1-4]", parts[0]) and len(parts) == 3:
                intervals[int(parts[0][1])] = (float(parts[1]), float(parts[2]))
            else:
                raise ValueError
        except ValueError:
            raise ModelError(f"bad domain line {text.strip()!r}", ln, 1) from None
    if uprime is not None:
        return DomainSpec.uprime(*uprime)
    return DomainSpec.box(*(intervals[k] for k in (1, 2, 3, 4)))


def parse_model_file(text: str, source: str = "<string>", seed: int = 42,
                     param_values: dict[str, float] | None = None, check: bool = True) -> ModelFile:
    """Parse and validate a model; nondegeneracy is probed at seeded domain points."""
    params: list[str] = []
    blocks: dict[str, list[tuple[int, int, str]]] = {}
    header_line: dict[str, int] = {}
    current = None
    coords_seen = False
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        indent = len(line) - len(line.lstrip())
        key, sep, rest = stripped.partition(":")
        if sep and key in ("coords", "param") and indent == 0:
            current = None
            names = rest.split()
            if key == "coords":
                if names != ["x1", "x2", "x3", "x4"]:
                    raise ModelError("coordinates must be declared as 'coords: x1 x2 x3 x4'", ln, 1)
                coords_seen = True
            else:
                for nm in names:
                    if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", nm):
                        raise ModelError(f"bad parameter name {nm!r}", ln, line.index(nm) + 1)
                    params.append(nm)
            continue
        if sep and key in _BLOCKS and not rest.strip() and indent == 0:
            if key in blocks:
                raise ModelError(f"duplicate '{key}:' block", ln, 1)
            blocks[key] = []
            header_line[key] = ln
            current = key
            continue
        if current is None:
            raise ModelError(f"unexpected line {stripped!r} outside a block", ln, indent + 1)
        blocks[current].append((ln, indent, line))
    if not coords_seen:
        raise ModelError("missing 'coords: x1 x2 x3 x4' declaration")
    if "coframe" in blocks and "metric" in blocks:
        raise ModelError("a model has either a 'coframe:' or a 'metric:' block, not both",
                         header_line["metric"], 1)
    if "coframe" not in blocks and "metric" not in blocks:
        raise ModelError("a model needs a 'coframe:' or a 'metric:' block")

    domain = _domain_block([(ln, l) for ln, _, l in blocks.get("domain", [])])
    pvals = {p: 0.0 for p in params}
    pvals.update({k: v for k, v in (param_values or {}).items() if k in pvals})

    def entries(name):
        out = {}
        for ln, indent, line in blocks[name]:
            m = _ENTRY.match(line)
            if m is None:
                raise ModelError("expected '<name> = <expression>'", ln, indent + 1)
            lhs, rhs = m.group(1), m.group(2)
            if lhs in out:
                raise ModelError(f"duplicate entry {lhs!r}", ln, indent + 1)
            out[lhs] = (ln, m.start(2) + 1, rhs)
        return out

    model = ModelFile(tuple(params), domain, source=source, param_values=pvals)
    if "coframe" in blocks:
        ent = entries("coframe")
        for need in ("M", "N"):
            if need not in ent:
                raise ModelError(f"coframe block needs an entry {need} = ...", header_line["coframe"], 1)
        extra = set(ent) - {"M", "N"}
        if extra:
            ln, col, _ = ent[sorted(extra)[0]]
            raise ModelError(f"unknown coframe entry {sorted(extra)[0]!r}", ln, 1)
        M = _one_form(ent["M"][2], params, ent["M"][0], ent["M"][1])
        N = _one_form(ent["N"][2], params, ent["N"][0], ent["N"][1])
        model.coframe = CoframeField(M, N, domain, pvals)
        if check:
            pts = _probe_points(domain, seed, [c for r in model.coframe.rows() for c in r], pvals)
            try:
                model.coframe.check_nondegenerate(pts)
            except DegenerateError as err:
                raise ModelError(f"degenerate coframe: {err}", ent["M"][0], 1) from None
        model.metric = metric_from_coframe(model.coframe, check=False)
    else:
        ent = entries("metric")
        g = [[E.ZERO] * 4 for _ in range(4)]
        for lhs, (ln, col, rhs) in ent.items():
            m = re.fullmatch(r"g([1-4])([1-4])", lhs)
            if m is None or int(m.group(1)) > int(m.group(2)):
                raise ModelError(f"metric entries are g11..g44 with a <= b, got {lhs!r}", ln, 1)
            a, b = int(m.group(1)) - 1, int(m.group(2)) - 1
            try:
                g[a][b] = g[b][a] = parse_expression(rhs, params)
            except ParseError as err:
                raise ModelError(str(err).rsplit(" at offset", 1)[0], ln, col + err.offset) from None
        model.metric = MetricField(g, domain, pvals)
        if check:
            pts = _probe_points(domain, seed, [x for row in g for x in row], pvals)
            det = np.linalg.det(model.metric.values(pts))
            scale = np.max(np.abs(model.metric.values(pts)), axis=(1, 2)) ** 4
            bad = np.abs(det) <= 1e-12 * np.maximum(scale, 1e-300)
            if bad.any():
                j = int(np.argmax(bad))
                raise ModelError(f"degenerate metric at probe point {tuple(pts[j])}",
                                 header_line["metric"], 1)
    return model


def _probe_points(domain, seed, exprs, params, n: int = 5):
    try:
        pts, _ = good_points(list(exprs), domain, n, seed, params)
    except (SamplingError, EvaluationError) as err:
        raise ModelError(f"cannot sample the declared domain: {err}") from None
    return pts


def load_model(path: str | Path, **kw) -> ModelFile:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as err:
        raise ModelError(f"cannot read {p}: {err.strerror}") from None
    return parse_model_file(text, source=str(p), **kw)
