import math
from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st

from akgeo import expr as E
from akgeo.numeric import Program, evaluate
from akgeo.parser import parse_expression

X = [E.coord(k) for k in (1, 2, 3, 4)]


def _leaf():
    return st.one_of(
        st.sampled_from(X),
        st.integers(-3, 3).map(E.const),
        st.sampled_from([E.I, E.HALF]),
    )


def _grow(children):
    pair = st.tuples(children, children)
    return st.one_of(
        pair.map(lambda p: E.add(*p)),
        pair.map(lambda p: E.mul(*p)),
        pair.map(lambda p: E.sub(*p)),
        st.tuples(children, st.integers(2, 3)).map(lambda p: E.pow_(p[0], p[1])),
        children.map(lambda a: E.exp(E.mul(E.const(Fraction(1, 4)), a))),
        # bases kept positive on the real box used below
        children.map(lambda a: E.pow_(E.add(2, E.mul(a, E.conjugate(a))), -1)),
        children.map(lambda a: E.sqrt(E.add(1, E.mul(a, E.conjugate(a))))),
    )


exprs = st.recursive(_leaf(), _grow, max_leaves=8)
points = st.lists(st.floats(-0.8, 0.8), min_size=4, max_size=4)


def _val(e, p):
    return evaluate(e, p)


def test_interning_gives_identity():
    a = E.add(X[0], E.mul(2, X[1]))
    b = E.add(E.mul(X[1], 2), X[0])
    assert a is b


def test_like_terms_and_powers_collect():
    x = X[0]
    assert E.sub(x, x) is E.ZERO
    assert E.mul(x, x) is E.pow_(x, 2)
    assert E.mul(E.pow_(x, Fraction(1, 2)), E.pow_(x, Fraction(-1, 2))) is E.ONE


def test_exp_factors_merge():
    a = E.mul(E.I, E.param("phi"))
    assert E.mul(E.exp(a), E.exp(E.neg(a))) is E.ONE
    assert E.exp(E.ZERO) is E.ONE


def test_conjugate_of_real_sum_is_itself():
    u = parse_expression("v - 2*z2*z2b")
    assert E.conjugate(u) is u


def test_exact_constant_roots():
    assert E.pow_(E.const(4), Fraction(1, 2)) is E.const(2)
    assert E.pow_(E.const(Fraction(1, 8)), Fraction(1, 3)) is E.const(Fraction(1, 2))


@settings(max_examples=60, deadline=None)
@given(exprs, points, st.integers(1, 4))
def test_derivative_matches_central_difference(e, p, c):
    d = E.differentiate(e, c)
    h = 1e-5
    pp, pm = list(p), list(p)
    pp[c - 1] += h
    pm[c - 1] -= h
    fd = (_val(e, pp) - _val(e, pm)) / (2 * h)
    exact = _val(d, p)
    assert abs(fd - exact) <= 1e-5 * (1 + abs(exact) + abs(_val(e, p)))


@settings(max_examples=60, deadline=None)
@given(exprs)
def test_conjugation_is_an_involution(e):
    assert E.conjugate(E.conjugate(e)) is e


@settings(max_examples=60, deadline=None)
@given(exprs, points)
def test_conjugate_evaluates_to_complex_conjugate(e, p):
    assert abs(_val(E.conjugate(e), p) - _val(e, p).conjugate()) <= 1e-9 * (1 + abs(_val(e, p)))


@settings(max_examples=60, deadline=None)
@given(exprs, points)
def test_print_parse_round_trip(e, p):
    back = parse_expression(E.to_text(e))
    assert abs(_val(back, p) - _val(e, p)) <= 1e-9 * (1 + abs(_val(e, p)))


@settings(max_examples=60, deadline=None)
@given(exprs, points)
def test_expand_preserves_value(e, p):
    assert abs(_val(E.expand(e), p) - _val(e, p)) <= 1e-9 * (1 + abs(_val(e, p)))


@settings(max_examples=40, deadline=None)
@given(exprs, points, st.integers(1, 2))
def test_wirtinger_pair_recovers_real_derivatives(e, p, k):
    # d/dx = d_k + d_kbar and d/dy = i (d_k - d_kbar)
    dz = E.wirtinger(e, k)
    dzb = E.wirtinger(e, k, barred=True)
    dx = _val(E.differentiate(e, 2 * k - 1), p)
    dy = _val(E.differentiate(e, 2 * k), p)
    assert abs(_val(dz, p) + _val(dzb, p) - dx) <= 1e-9 * (1 + abs(dx))
    assert abs(1j * (_val(dz, p) - _val(dzb, p)) - dy) <= 1e-9 * (1 + abs(dy))


def test_wirtinger_on_coordinates():
    z1, z1b = parse_expression("z1"), parse_expression("z1b")
    assert E.wirtinger(z1, 1) is E.ONE
    assert E.wirtinger(z1b, 1) is E.ZERO
    assert E.wirtinger(z1b, 1, barred=True) is E.ONE


def test_expand_decides_polynomial_identity():
    e = parse_expression("(x1 + x2)^3 - x1^3 - 3*x1^2*x2 - 3*x1*x2^2 - x2^3")
    assert E.expand(e) is E.ZERO


def test_substitute_coordinates_and_parameters():
    e = parse_expression("phi*x1 + x2", known_parameters=["phi"])
    s = E.substitute(e, {1: E.coord(3), "phi": 2})
    assert s is parse_expression("2*x3 + x2")


def test_program_evaluates_many_points():
    e = parse_expression("x1*x2 + exp(x3)")
    pts = np.array([[1, 2, 0, 0], [0.5, 0.5, 1, 0]])
    vals = Program([e]).run(pts)[0]
    assert np.allclose(vals, [3.0, 0.25 + math.e])


def test_pickle_round_trip():
    import pickle
    e = parse_expression("sqrt(v - 2*z2*z2b) + i*x4")
    assert pickle.loads(pickle.dumps(e)) is e


def test_surd_products_fold_into_the_coefficient():
    r2 = E.sqrt(E.const(2))
    assert E.mul(r2, r2, X[0]) is E.mul(2, X[0])
    assert E.mul(r2, X[0], r2).factors[0] is E.const(2)
