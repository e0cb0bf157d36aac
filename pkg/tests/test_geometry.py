import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from akgeo import expr as E
from akgeo.constructions import coframe_from_fh
from akgeo.domains import DomainSpec, sample_domain
from akgeo.geometry import (ClassificationError, CoframeField, DegenerateError, KForm,
                            MetricField, PetrovType, exterior_derivative, frame_components,
                            hodge_star, hodge_star_values, metric_from_coframe,
                            orthonormal_coframe, petrov_classify, sd_basis, weyl_half_matrices,
                            wedge)
from akgeo.parser import parse_expression

BOX = DomainSpec.box((0.5, 2), (-1, 1), (-1, 1), (-1, 1))


def _hyperbolic():
    w = E.pow_(E.coord(1), -2)
    return MetricField([[w if a == b else E.ZERO for b in range(4)] for a in range(4)], BOX)


def test_flat_coframe_gives_twice_euclidean():
    g = metric_from_coframe(coframe_from_fh(E.ONE, E.ZERO))
    assert np.allclose(g.values([[0.1, 0.2, 0.3, 0.4]])[0], 2 * np.eye(4))


def test_example_metric_at_reference_point(example_metric):
    gv = example_metric.values([[1, 0, 0, 0]])[0]
    expected = np.diag([2 ** -0.5, 2 ** -0.5, 4 * 2 ** 0.5, 4 * 2 ** 0.5])
    assert np.allclose(gv, expected, atol=1e-14)


def test_fh_coframe_volume_is_constant(example_coframe):
    assert example_coframe.volume is E.const(-4)
    assert example_coframe.orientation() == 1


def test_degenerate_coframe_is_rejected():
    dz1 = (E.ONE, E.I, E.ZERO, E.ZERO)
    with pytest.raises(DegenerateError):
        CoframeField(dz1, dz1).check_nondegenerate()


def test_hyperbolic_space_has_constant_curvature():
    g = _hyperbolic()
    pts = sample_domain(BOX, 10, 1)
    cv = g.curvature.evaluate(pts)
    assert np.allclose(cv.ricci, -3 * cv.metric, atol=1e-12)
    assert np.allclose(cv.scalar, -12)
    assert np.abs(cv.weyl).max() < 1e-12
    # R_abcd = -(g_ac g_bd - g_ad g_bc) for sectional curvature -1
    gm = cv.metric
    model = -(np.einsum("nac,nbd->nabcd", gm, gm) - np.einsum("nad,nbc->nabcd", gm, gm))
    assert np.allclose(cv.riemann, model, atol=1e-12)


def test_levi_civita_connection_is_metric(example_metric, uprime_points):
    assert example_metric.connection.metricity_residual(uprime_points) < 1e-12


def test_riemann_symmetries(example_metric, uprime_points):
    r = example_metric.curvature.evaluate(uprime_points[:5]).riemann
    assert np.allclose(r, -np.swapaxes(r, 1, 2))
    assert np.allclose(r, np.transpose(r, (0, 3, 4, 1, 2)))
    bianchi = r + np.transpose(r, (0, 1, 3, 4, 2)) + np.transpose(r, (0, 1, 4, 2, 3))
    assert np.abs(bianchi).max() < 1e-10


def test_weyl_is_trace_free(example_metric, uprime_points):
    cv = example_metric.curvature.evaluate(uprime_points)
    ginv = np.linalg.inv(cv.metric)
    assert np.abs(np.einsum("nac,nabcd->nbd", ginv, cv.weyl)).max() < 1e-10


coeffs = st.lists(st.integers(-3, 3), min_size=4, max_size=4)


@settings(max_examples=30, deadline=None)
@given(coeffs, coeffs)
def test_d_squared_vanishes(a, b):
    x = [E.coord(k) for k in (1, 2, 3, 4)]
    f = E.add(*(E.mul(c, E.pow_(x[k], 2), x[(k + 1) % 4]) for k, c in enumerate(a)))
    w = KForm.one_form([E.mul(c, E.exp(x[k])) for k, c in enumerate(b)])
    assert exterior_derivative(exterior_derivative(KForm(0, {(): f}))).is_structurally_zero()
    assert exterior_derivative(exterior_derivative(w)).expand().is_structurally_zero()


def test_wedge_is_graded_antisymmetric():
    a = KForm.one_form(parse_expression(s) for s in ("x1", "x2^2", "1", "0"))
    b = KForm.one_form(parse_expression(s) for s in ("x3", "0", "exp(x4)", "2"))
    assert wedge(a, a).is_structurally_zero()
    assert (wedge(a, b) + wedge(b, a)).expand().is_structurally_zero()


def test_sd_basis_eigenforms_of_euclidean_star():
    g = np.tile(np.eye(4), (1, 1, 1))
    for side in (1, -1):
        for s in sd_basis(side):
            star = hodge_star_values(g, s[None], 1)[0]
            assert np.allclose(star, side * s)


def test_double_star_is_identity(example_metric, uprime_points, rng):
    gn = example_metric.values(uprime_points)
    w = rng.normal(size=(len(gn), 4, 4))
    w = w - np.swapaxes(w, 1, 2)
    ss = hodge_star_values(gn, hodge_star_values(gn, w))
    assert np.allclose(ss, w)


def test_symbolic_and_numeric_star_agree(example_metric, uprime_points):
    w = KForm.from_matrix([[parse_expression(f"x{(a + b) % 4 + 1}") if a < b else E.ZERO
                            for b in range(4)] for a in range(4)])
    w = KForm(2, {k: v for k, v in w.comps.items()})
    sym = hodge_star(example_metric, w).dense(uprime_points)
    num = hodge_star_values(example_metric.values(uprime_points), w.dense(uprime_points).real)
    assert np.allclose(sym, num)


def test_orthonormal_coframe_orientation(example_metric, uprime_points):
    gn = example_metric.values(uprime_points)
    for o in (1, -1):
        th = orthonormal_coframe(gn, o)
        assert np.allclose(np.einsum("nia,nib->nab", th, th), gn)
        assert np.all(np.sign(np.linalg.det(th)) == o)


# ---------------------------------------------------------------------------
# Petrov classification on synthetic Weyl halves

@pytest.mark.parametrize("matrix,kind", [
    (np.zeros((3, 3)), PetrovType.O),
    (np.diag([1.0, 1.0, -2.0]), PetrovType.D),
    (np.diag([1.0, 2.0, -3.0]), PetrovType.I),
    (np.array([[1.0, 1, 0], [0, 1, 0], [0, 0, -2]]), PetrovType.II),
    (np.array([[0.0, 1, 0], [0, 0, 1], [0, 0, 0]]), PetrovType.III),
    (np.array([[0.0, 1, 0], [0, 0, 0], [0, 0, 0]]), PetrovType.N),
])
def test_petrov_types(matrix, kind):
    assert petrov_classify(matrix) is kind


def test_petrov_rejects_non_trace_free():
    with pytest.raises(ClassificationError):
        petrov_classify(np.eye(3))


def test_petrov_is_basis_independent(rng):
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    assert petrov_classify(q @ np.diag([2.0, 2.0, -4.0]) @ q.T) is PetrovType.D


# ---------------------------------------------------------------------------
# Weyl halves of the example under both orientations

def _halves(g, pts, orientation):
    cv = g.curvature.evaluate(pts)
    return weyl_half_matrices(cv.weyl, cv.metric, orientation)


def test_anchor_orientation_weyl_minus_vanishes_weyl_plus_type_d(example_metric, uprime_points):
    wp, wm = _halves(example_metric, uprime_points, example_metric.orientation)
    assert np.abs(wm).max() < 1e-10
    assert all(petrov_classify(w) is PetrovType.D for w in wp)


def test_reversed_orientation_swaps_the_halves(example_metric, uprime_points):
    wp, wm = _halves(example_metric, uprime_points, -example_metric.orientation)
    assert np.abs(wp).max() < 1e-10
    assert all(petrov_classify(w) is PetrovType.D for w in wm)


def test_frame_components_of_metric_is_identity(example_metric, uprime_points):
    gn = example_metric.values(uprime_points)
    assert np.allclose(frame_components(gn, gn), np.eye(4))
