"""Immutable symbolic expressions over the four real coordinates x1..x4.

Nodes are hash-consed: building the same structure twice returns the same
object, so equality is identity and shared subexpressions form a DAG.  The
constructors (``add``, ``mul``, ``pow_``, ``exp``, ``log``) apply a light
normalization (flattening, constant folding, collecting like terms and like
bases) and nothing more.  Conjugation is an operation, not a node: it is
pushed down to the leaves as soon as it is applied.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from numbers import Number
from typing import Callable, Iterable, Mapping

__all__ = [
    "Expr", "Const", "Coord", "Param", "Add", "Mul", "Pow", "Exp", "Log",
    "const", "coord", "param", "add", "mul", "pow_", "sqrt", "exp", "log",
    "neg", "sub", "div", "conjugate", "differentiate", "wirtinger",
    "substitute", "postorder", "to_text", "as_expr", "ZERO", "ONE", "I",
    "HALF",
]

_serial = itertools.count()
_TABLE: dict[tuple, "Expr"] = {}


class Expr:
    __slots__ = ("serial", "free", "_deriv", "__weakref__")

    def _init(self, free: frozenset) -> None:
        self.serial = next(_serial)
        self.free = free
        self._deriv: dict[int, Expr] = {}

    @property
    def children(self) -> tuple["Expr", ...]:
        return ()

    # arithmetic sugar for building formulas in code
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, p):
        return pow_(self, Fraction(p))

    def __repr__(self) -> str:
        return f"Expr({to_text(self)})"

    def __str__(self) -> str:
        return to_text(self)

    def __reduce__(self):
        # pickling goes through the printer so unpickled nodes are re-interned
        from .parser import parse_expression
        return (parse_expression, (to_text(self), sorted(params_of(self))))

    @property
    def is_zero(self) -> bool:
        return self is ZERO


class Const(Expr):
    """Exact gaussian rational re + i*im."""

    __slots__ = ("re", "im")

    @property
    def value(self) -> complex:
        return complex(float(self.re), float(self.im))

    @property
    def is_real(self) -> bool:
        return self.im == 0


class Coord(Expr):
    __slots__ = ("index",)


class Param(Expr):
    """A named real parameter, bound at evaluation time."""

    __slots__ = ("name",)


class Add(Expr):
    __slots__ = ("terms",)

    @property
    def children(self):
        return self.terms


class Mul(Expr):
    __slots__ = ("factors",)

    @property
    def children(self):
        return self.factors


class Pow(Expr):
    """base**exponent with a rational exponent.

    A non-integer exponent carries a domain guard: the base must evaluate to a
    positive real number.
    """

    __slots__ = ("base", "exponent")

    @property
    def children(self):
        return (self.base,)

    @property
    def guarded(self) -> bool:
        return self.exponent.denominator != 1


class Exp(Expr):
    __slots__ = ("arg",)

    @property
    def children(self):
        return (self.arg,)


class Log(Expr):
    """Natural log; guarded to a positive real argument."""

    __slots__ = ("arg",)

    @property
    def children(self):
        return (self.arg,)


# ---------------------------------------------------------------------------
# raw interned constructors (no normalization)

def _intern(key: tuple, cls, free: frozenset, **fields) -> Expr:
    node = _TABLE.get(key)
    if node is None:
        node = cls.__new__(cls)
        node._init(free)
        for k, v in fields.items():
            object.__setattr__(node, k, v)
        _TABLE[key] = node
    return node


def _free_of(nodes: Iterable[Expr]) -> frozenset:
    out: frozenset = frozenset()
    for n in nodes:
        if n.free:
            out = out | n.free
    return out


def const(re, im=0) -> Const:
    re, im = Fraction(re), Fraction(im)
    return _intern(("c", re, im), Const, frozenset(), re=re, im=im)


def coord(index: int) -> Coord:
    if index not in (1, 2, 3, 4):
        raise ValueError(f"coordinate index must be 1..4, got {index}")
    return _intern(("x", index), Coord, frozenset((index,)), index=index)


def param(name: str) -> Param:
    return _intern(("p", name), Param, frozenset(), name=name)


def _raw_add(terms: tuple) -> Expr:
    return _intern(("+",) + tuple(t.serial for t in terms), Add, _free_of(terms), terms=terms)


def _raw_mul(factors: tuple) -> Expr:
    return _intern(("*",) + tuple(f.serial for f in factors), Mul, _free_of(factors), factors=factors)


def _raw_pow(base: Expr, p: Fraction) -> Expr:
    return _intern(("^", base.serial, p), Pow, base.free, base=base, exponent=p)


ZERO = const(0)
ONE = const(1)
I = const(0, 1)
HALF = const(Fraction(1, 2))


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return const(x)
    if isinstance(x, float):
        return const(Fraction(x))
    if isinstance(x, complex):
        return const(Fraction(x.real), Fraction(x.imag))
    if isinstance(x, Number):
        return const(Fraction(float(x)))
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


# ---------------------------------------------------------------------------
# gaussian rational helpers

def _cmul(a: tuple, b: tuple) -> tuple:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _cpow_int(a: tuple, n: int) -> tuple:
    if n < 0:
        den = a[0] * a[0] + a[1] * a[1]
        if den == 0:
            raise ZeroDivisionError("zero constant raised to a negative power")
        a = (a[0] / den, -a[1] / den)
        n = -n
    out = (Fraction(1), Fraction(0))
    for _ in range(n):
        out = _cmul(out, a)
    return out


def _exact_root(q: Fraction, den: int):
    """Exact den-th root of a positive rational, or None."""
    def iroot(n: int):
        if n < 2:
            return n
        r = 1 << -(-n.bit_length() // den)  # above the root; Newton descends
        while True:
            y = ((den - 1) * r + n // r ** (den - 1)) // den
            if y >= r:
                break
            r = y
        return r if r ** den == n else None

    a, b = iroot(q.numerator), iroot(q.denominator)
    if a is None or b is None:
        return None
    return Fraction(a, b)


# ---------------------------------------------------------------------------
# normalizing constructors

def _split_coeff(t: Expr) -> tuple[tuple, Expr]:
    if isinstance(t, Mul) and isinstance(t.factors[0], Const):
        c = t.factors[0]
        rest = t.factors[1:]
        return (c.re, c.im), (rest[0] if len(rest) == 1 else _raw_mul(rest))
    return (Fraction(1), Fraction(0)), t


def _with_coeff(c: tuple, rest: Expr) -> Expr:
    if c == (1, 0):
        return rest
    k = const(*c)
    if isinstance(rest, Mul):
        return _raw_mul((k,) + rest.factors)
    return _raw_mul((k, rest))


def add(*terms: Expr) -> Expr:
    cre, cim = Fraction(0), Fraction(0)
    coeffs: dict[int, list] = {}
    stack = [as_expr(t) for t in terms]
    stack.reverse()
    while stack:
        t = stack.pop()
        if isinstance(t, Add):
            stack.extend(reversed(t.terms))
            continue
        if isinstance(t, Const):
            cre += t.re
            cim += t.im
            continue
        c, rest = _split_coeff(t)
        slot = coeffs.get(rest.serial)
        if slot is None:
            coeffs[rest.serial] = [rest, c[0], c[1]]
        else:
            slot[1] += c[0]
            slot[2] += c[1]
    out = []
    for key in sorted(coeffs):
        rest, re, im = coeffs[key]
        if re == 0 and im == 0:
            continue
        out.append(_with_coeff((re, im), rest))
    if cre != 0 or cim != 0:
        out.insert(0, const(cre, cim))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return _raw_add(tuple(out))


_MONIC: dict[int, tuple] = {}


def _monic(a: Add) -> tuple[tuple, Expr]:
    """Split a sum as content * monic sum (first term has coefficient 1)."""
    hit = _MONIC.get(a.serial)
    if hit is not None:
        return hit
    first = a.terms[0]
    if isinstance(first, Const):
        c = (first.re, first.im)
    else:
        c = _split_coeff(first)[0]
    if c == (1, 0):
        out = (c, a)
    else:
        inv = const(*_cpow_int(c, -1))
        m = add(*(mul(inv, t) for t in a.terms))
        out = (c, m)
    _MONIC[a.serial] = out
    return out


def mul(*factors: Expr) -> Expr:
    coef = (Fraction(1), Fraction(0))
    bases: dict[int, list] = {}
    exp_args: list[Expr] = []
    stack = [as_expr(f) for f in factors]
    stack.reverse()
    while stack:
        f = stack.pop()
        if isinstance(f, Mul):
            stack.extend(reversed(f.factors))
            continue
        if isinstance(f, Const):
            if f.re == 0 and f.im == 0:
                return ZERO
            coef = _cmul(coef, (f.re, f.im))
            continue
        if isinstance(f, Exp):
            exp_args.append(f.arg)
            continue
        if isinstance(f, Add):
            c, f = _monic(f)
            coef = _cmul(coef, c)
        if isinstance(f, Pow):
            b, p = f.base, f.exponent
        else:
            b, p = f, Fraction(1)
        slot = bases.get(b.serial)
        if slot is None:
            bases[b.serial] = [b, p]
        else:
            slot[1] += p
    out: list[Expr] = []
    again = False
    for key in sorted(bases):
        b, p = bases[key]
        if p == 0:
            continue
        f = b if p == 1 else pow_(b, p)
        if isinstance(f, Const):  # surds such as 2^(1/2) * 2^(1/2)
            coef = _cmul(coef, (f.re, f.im))
            continue
        if p == 1:
            out.append(b)
            continue
        if isinstance(f, (Mul, Exp)):
            again = True
        out.append(f)
    if exp_args:
        e = exp(add(*exp_args))
        if e is not ONE:
            out.append(e)
            again = again or not isinstance(e, Exp)
    if again:
        return mul(const(*coef), *out)
    if not out:
        return const(*coef)
    if coef != (1, 0):
        if len(out) == 1 and isinstance(out[0], Add):
            # c*(a + b) -> c*a + c*b so that scaled sums can cancel
            k = const(*coef)
            return add(*(mul(k, t) for t in out[0].terms))
        out.insert(0, const(*coef))
    if len(out) == 1:
        return out[0]
    return _raw_mul(tuple(out))


def pow_(base: Expr, p) -> Expr:
    p = Fraction(p)
    if p == 0:
        return ONE
    if p == 1:
        return base
    if isinstance(base, Const):
        if p.denominator == 1:
            return const(*_cpow_int((base.re, base.im), int(p)))
        if base.im == 0 and base.re > 0:
            r = _exact_root(base.re, p.denominator)
            if r is not None:
                return const(*_cpow_int((r, Fraction(0)), p.numerator))
            if base.re.denominator != 1 and base.re.numerator == 1:
                # (1/n)^p -> n^(-p), one canonical form per surd
                return _raw_pow(const(base.re.denominator), -p)
        return _raw_pow(base, p)
    if isinstance(base, Pow):
        if p.denominator == 1 or base.exponent.denominator != 1:
            return pow_(base.base, base.exponent * p)
        return _raw_pow(base, p)
    if isinstance(base, Mul):
        if p.denominator == 1:
            return mul(*(pow_(f, p) for f in base.factors))
        head = base.factors[0]
        if isinstance(head, Const) and head.im == 0 and head.re > 0:
            rest = base.factors[1:]
            rest_e = rest[0] if len(rest) == 1 else _raw_mul(rest)
            return mul(pow_(head, p), pow_(rest_e, p))
        return _raw_pow(base, p)
    if isinstance(base, Exp):
        return exp(mul(const(p), base.arg))
    if isinstance(base, Add):
        c, m = _monic(base)
        if c != (1, 0) and (p.denominator == 1 or (c[1] == 0 and c[0] > 0)):
            return mul(pow_(const(*c), p), pow_(m, p))
    return _raw_pow(base, p)


def exp(a: Expr) -> Expr:
    if a is ZERO:
        return ONE
    if isinstance(a, Log):
        return a.arg
    return _intern(("e", a.serial), Exp, a.free, arg=a)


def log(a: Expr) -> Expr:
    if a is ONE:
        return ZERO
    if isinstance(a, Exp) and not a.arg.free and _is_real_const_tree(a.arg):
        return a.arg
    return _intern(("l", a.serial), Log, a.free, arg=a)


def _is_real_const_tree(e: Expr) -> bool:
    return isinstance(e, Const) and e.im == 0


def neg(a: Expr) -> Expr:
    return mul(const(-1), a)


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, neg(b))


def div(a: Expr, b: Expr) -> Expr:
    return mul(a, pow_(b, -1))


def sqrt(a: Expr) -> Expr:
    return pow_(a, Fraction(1, 2))


# ---------------------------------------------------------------------------
# traversals

def postorder(roots: Iterable[Expr]) -> list[Expr]:
    """Unique nodes reachable from ``roots``, children before parents."""
    seen: set[int] = set()
    order: list[Expr] = []
    for root in roots:
        if root.serial in seen:
            continue
        stack = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if node.serial in seen:
                continue
            seen.add(node.serial)
            stack.append((node, True))
            for ch in reversed(node.children):
                if ch.serial not in seen:
                    stack.append((ch, False))
    return order


def _rebuild(node: Expr, kids: list[Expr]) -> Expr:
    if isinstance(node, Add):
        return add(*kids)
    if isinstance(node, Mul):
        return mul(*kids)
    if isinstance(node, Pow):
        return pow_(kids[0], node.exponent)
    if isinstance(node, Exp):
        return exp(kids[0])
    if isinstance(node, Log):
        return log(kids[0])
    return node


def transform(roots: list[Expr], leaf: Callable[[Expr], Expr]) -> list[Expr]:
    """Rebuild each root bottom-up after mapping its leaves through ``leaf``."""
    memo: dict[int, Expr] = {}
    for node in postorder(roots):
        kids = node.children
        if not kids:
            memo[node.serial] = leaf(node)
        else:
            memo[node.serial] = _rebuild(node, [memo[k.serial] for k in kids])
    return [memo[r.serial] for r in roots]


def _distribute(factors: list[Expr]) -> Expr:
    terms = [ONE]
    for f in factors:
        parts = f.terms if isinstance(f, Add) else (f,)
        terms = [mul(t, q) for t in terms for q in parts]
        collected = add(*terms)
        terms = list(collected.terms) if isinstance(collected, Add) else [collected]
    return add(*terms)


def _split_denominator(term: Expr):
    """(numerator, {base: k}) with base^-k the negative integer powers of sums in ``term``."""
    factors = term.factors if isinstance(term, Mul) else (term,)
    den, num = {}, []
    for f in factors:
        if (isinstance(f, Pow) and isinstance(f.base, Add) and f.exponent < 0
                and f.exponent.denominator == 1):
            den[f.base] = -int(f.exponent)
        else:
            num.append(f)
    return mul(*num), den


def _cancel_common_denominator(s: Expr, max_power: int) -> Expr:
    """Collapse N / D when every term shares D and N = K * D with K coordinate-free."""
    if not isinstance(s, Add):
        return s
    parts = [_split_denominator(t) for t in s.terms]
    den = parts[0][1]
    if not den or any(d != den for _, d in parts[1:]) or sum(den.values()) > max_power:
        return s
    denom = _distribute([b for b, k in den.items() for _ in range(k)])
    if not isinstance(denom, Add):
        return s
    _, lead_c, lead = _split_free(denom.terms[0])
    groups: dict[Expr, list[Expr]] = {}
    for n, _ in parts:
        for t in (n.terms if isinstance(n, Add) else (n,)):
            k, c, r = _split_free(t)
            groups.setdefault(k, []).append(mul(c, r))
    out = []
    for k, rs in groups.items():
        numer = add(*rs)
        terms = numer.terms if isinstance(numer, Add) else (numer,)
        ratio = next((mul(c, pow_(lead_c, -1)) for _, c, r in map(_split_free, terms)
                      if r is lead), None)
        if ratio is None or _distribute([add(numer, mul(-1, ratio, denom))]) is not ZERO:
            return s
        out.append(mul(k, ratio))
    return add(*out)


def _split_free(t: Expr):
    """(coordinate-free factor, numeric coefficient, coordinate monomial) of a product."""
    factors = t.factors if isinstance(t, Mul) else (t,)
    return (mul(*(f for f in factors if not f.free and not isinstance(f, Const))),
            mul(*(f for f in factors if isinstance(f, Const))),
            mul(*(f for f in factors if f.free)))


def expand_all(es: list[Expr], max_power: int = 12) -> list[Expr]:
    """Multiply out products of sums and small positive integer powers of sums.

    Bases of fractional or negative powers are expanded and kept as atoms,
    so a rational function of atoms becomes a sum of monomials over
    canonical atoms.  This decides zero for polynomial identities and for
    cancellations that only need exponent collection; a sum N / D over one
    shared denominator with N a constant multiple of D becomes that constant.
    """
    memo: dict[int, Expr] = {}
    for node in postorder(es):
        kids = [memo[k.serial] for k in node.children]
        if isinstance(node, Add):
            out = _cancel_common_denominator(add(*kids), max_power)
        elif isinstance(node, Mul):
            out = _cancel_common_denominator(_distribute(kids), max_power)
        elif isinstance(node, Pow):
            b, p = kids[0], node.exponent
            if isinstance(b, Add) and p.denominator == 1 and 1 < p <= max_power:
                out = _distribute([b] * int(p))
            else:
                out = pow_(b, p)
                if isinstance(out, Mul):
                    out = _distribute(list(out.factors))
        elif isinstance(node, Exp):
            out = exp(kids[0])
        elif isinstance(node, Log):
            out = log(kids[0])
        else:
            out = node
        memo[node.serial] = out
    return [memo[e.serial] for e in es]


def expand(e: Expr) -> Expr:
    return expand_all([e])[0]


def _conj_leaf(node: Expr) -> Expr:
    if isinstance(node, Const) and node.im != 0:
        return const(node.re, -node.im)
    return node


def conjugate(e: Expr) -> Expr:
    """Complex conjugate, distributed down to the leaves."""
    return transform([e], _conj_leaf)[0]


def conjugate_all(es: list[Expr]) -> list[Expr]:
    return transform(es, _conj_leaf)


def substitute(e: Expr, mapping: Mapping) -> Expr:
    """Replace coordinates (keys 1..4) and parameters (keys are names)."""
    return substitute_all([e], mapping)[0]


def substitute_all(es: list[Expr], mapping: Mapping) -> list[Expr]:
    m = {k: as_expr(v) for k, v in mapping.items()}

    def leaf(node):
        if isinstance(node, Coord):
            return m.get(node.index, node)
        if isinstance(node, Param):
            return m.get(node.name, node)
        return node

    return transform(es, leaf)


def params_of(e: Expr) -> set[str]:
    return {n.name for n in postorder([e]) if isinstance(n, Param)}


def differentiate(e: Expr, c: int) -> Expr:
    """Exact partial derivative with respect to coordinate x_c."""
    if c not in e.free:
        return ZERO
    cached = e._deriv.get(c)
    if cached is not None:
        return cached
    for node in postorder([e]):
        if c not in node.free or c in node._deriv:
            continue
        if isinstance(node, Coord):
            d = ONE
        elif isinstance(node, Add):
            d = add(*(_d(t, c) for t in node.terms))
        elif isinstance(node, Mul):
            fs = node.factors
            parts = []
            for k, f in enumerate(fs):
                df = _d(f, c)
                if df is ZERO:
                    continue
                parts.append(mul(df, *fs[:k], *fs[k + 1:]))
            d = add(*parts)
        elif isinstance(node, Pow):
            p = node.exponent
            d = mul(const(p), pow_(node.base, p - 1), _d(node.base, c))
        elif isinstance(node, Exp):
            d = mul(node, _d(node.arg, c))
        elif isinstance(node, Log):
            d = mul(_d(node.arg, c), pow_(node.arg, -1))
        else:  # pragma: no cover
            raise TypeError(type(node))
        node._deriv[c] = d
    return e._deriv[c]


def _d(node: Expr, c: int) -> Expr:
    if c not in node.free:
        return ZERO
    return node._deriv[c]


def wirtinger(e: Expr, k: int, barred: bool = False) -> Expr:
    """d/dz_k (or d/dzbar_k) with z_k = x_{2k-1} + i x_{2k}."""
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    re_part = differentiate(e, 2 * k - 1)
    im_part = differentiate(e, 2 * k)
    sign = 1 if barred else -1
    return mul(HALF, add(re_part, mul(const(0, sign), im_part)))


# ---------------------------------------------------------------------------
# printing

_PREC_ADD, _PREC_MUL, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4


def _frac_text(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _const_text(c: Const) -> tuple[str, int]:
    if c.im == 0:
        if c.re >= 0 and c.re.denominator == 1:
            return str(c.re.numerator), _PREC_ATOM
        return f"({_frac_text(c.re)})", _PREC_ATOM
    if c.re == 0:
        if c.im == 1:
            return "i", _PREC_ATOM
        return f"({_frac_text(c.im)}*i)", _PREC_ATOM
    return f"({_frac_text(c.re)} + {_frac_text(c.im)}*i)", _PREC_ATOM


def to_text(e: Expr) -> str:
    """Render in the input grammar; ``parse_expression`` reads it back."""
    memo: dict[int, tuple[str, int]] = {}

    def wrap(node: Expr, prec: int) -> str:
        s, p = memo[node.serial]
        return s if p >= prec else f"({s})"

    for node in postorder([e]):
        if isinstance(node, Const):
            memo[node.serial] = _const_text(node)
        elif isinstance(node, Coord):
            memo[node.serial] = (f"x{node.index}", _PREC_ATOM)
        elif isinstance(node, Param):
            memo[node.serial] = (node.name, _PREC_ATOM)
        elif isinstance(node, Add):
            memo[node.serial] = (" + ".join(wrap(t, _PREC_ADD) for t in node.terms), _PREC_ADD)
        elif isinstance(node, Mul):
            memo[node.serial] = ("*".join(wrap(f, _PREC_POW) for f in node.factors), _PREC_MUL)
        elif isinstance(node, Pow):
            p = node.exponent
            if p.denominator == 1:
                ptxt = str(p.numerator) if p > 0 else f"({p.numerator})"
            else:
                ptxt = f"({p.numerator}/{p.denominator})"
            memo[node.serial] = (f"{wrap(node.base, _PREC_ATOM)}^{ptxt}", _PREC_POW)
        elif isinstance(node, Exp):
            memo[node.serial] = (f"exp({memo[node.arg.serial][0]})", _PREC_ATOM)
        elif isinstance(node, Log):
            memo[node.serial] = (f"log({memo[node.arg.serial][0]})", _PREC_ATOM)
    return memo[e.serial][0]
