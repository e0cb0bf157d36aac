import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from akgeo import expr as E
from akgeo.constructions import coframe_from_fh, opposite_kahler_structure, example_structure
from akgeo.domains import sample_domain
from akgeo.geometry import MetricField, hodge_star_values, metric_from_coframe
from akgeo.hermitian import (StructureKind, XiParameter, classify_structure, compatibility_check,
                             fundamental_form, integrability_scan, nijenhuis_tensor,
                             stereographic_grid, unit_circle_grid, xi_fundamental_form,
                             xi_structure)

FLAT = coframe_from_fh(E.ONE, E.ZERO)
BOX_PTS = sample_domain(FLAT.domain, 5, 0)


def _diag_metric(c):
    return MetricField([[E.const(c) if a == b else E.ZERO for b in range(4)] for a in range(4)])


def test_xi_parse():
    assert XiParameter.parse("inf").is_infinite
    xi = XiParameter.parse("0.5+0.25i")
    assert xi.value is E.const(0.5, 0.25)
    with pytest.raises(ValueError):
        XiParameter.parse("1+")


def _vec(v):
    from akgeo.numeric import evaluate
    return np.array([evaluate(c, (0, 0, 0, 0)) for c in v])


def test_flat_j_on_m_and_mbar():
    J = xi_structure(FLAT, XiParameter.finite(0)).values(BOX_PTS[:1])[0]
    m, mbar = _vec(FLAT.dual_frame[0]), _vec(FLAT.dual_frame[1])
    assert np.allclose(J @ m, -1j * m)
    assert np.allclose(J @ mbar, 1j * mbar)


def test_flat_fundamental_forms():
    plus = xi_fundamental_form(FLAT, XiParameter.finite(0), "plus").expand()
    minus = xi_fundamental_form(FLAT, XiParameter.finite(0), "minus").expand()
    assert {k: v for k, v in plus.comps.items() if v is not E.ZERO} == {(0, 1): E.const(2), (2, 3): E.const(2)}
    assert {k: v for k, v in minus.comps.items() if v is not E.ZERO} == {(0, 1): E.const(-2), (2, 3): E.const(2)}


def test_fundamental_form_scales_with_metric():
    J = xi_structure(FLAT, XiParameter.finite(0))
    w2 = fundamental_form(_diag_metric(2), J, BOX_PTS).expand()
    w1 = fundamental_form(_diag_metric(1), J, BOX_PTS).expand()
    assert w2.comps[(0, 1)] is E.const(2) and w2.comps[(2, 3)] is E.const(2)
    assert w1.comps[(0, 1)] is E.ONE and w1.comps[(2, 3)] is E.ONE


def test_compatibility_flat_and_scaled():
    J = xi_structure(FLAT, XiParameter.finite(0))
    ok = compatibility_check(_diag_metric(2), J, BOX_PTS)
    assert ok.passed and ok.max_residual == 0
    bad = compatibility_check(_diag_metric(2), J.scaled(2), BOX_PTS)
    assert not bad.passed and bad.detail["j_squared"] == pytest.approx(3)


def test_incompatible_pair_is_flagged_by_fundamental_form():
    J = xi_structure(FLAT, XiParameter.finite(0))
    g = MetricField([[E.const(1 + (a == 0)) if a == b else E.ZERO for b in range(4)] for a in range(4)])
    with pytest.raises(ValueError, match="antisymmetric"):
        fundamental_form(g, J, BOX_PTS)


def test_plus_infinity_is_minus_plus_zero(example_coframe, uprime_points):
    j0 = xi_structure(example_coframe, XiParameter.finite(0)).values(uprime_points)
    jinf = xi_structure(example_coframe, XiParameter.infinity()).values(uprime_points)
    assert np.allclose(jinf, -j0, atol=1e-12)


def test_large_xi_approaches_infinity(example_coframe, uprime_points):
    jbig = xi_structure(example_coframe, XiParameter.finite(1e6j)).values(uprime_points)
    jinf = xi_structure(example_coframe, XiParameter.infinity()).values(uprime_points)
    assert np.abs(jbig - jinf).max() < 1e-4


@pytest.mark.parametrize("xi", [0.5, 2 - 1j, 1j, None])
def test_minus_family_does_not_depend_on_xi(example_coframe, uprime_points, xi):
    # Mbar_xi and N_xi span the same plane as Mbar and N for every xi
    x = XiParameter.infinity() if xi is None else XiParameter.finite(xi)
    j0 = xi_structure(example_coframe, XiParameter.finite(0), "minus").values(uprime_points)
    jx = xi_structure(example_coframe, x, "minus").values(uprime_points)
    assert np.allclose(jx, j0, atol=1e-12)


def test_nijenhuis_is_antisymmetric(example_coframe):
    N = nijenhuis_tensor(example_structure(0.0))
    for a in range(4):
        for b in range(4):
            assert N[a, b, b] is E.ZERO
            for c in range(4):
                assert N[a, b, c] is E.neg(N[a, c, b])


def test_nijenhuis_of_constant_structure_vanishes():
    J = xi_structure(FLAT, XiParameter.finite(0.3 - 0.7j))
    assert nijenhuis_tensor(J).is_structurally_zero()


def test_example_structure_is_not_integrable_at_probe_point():
    N = nijenhuis_tensor(example_structure(0.0))
    assert N.max_abs([[1, 0, 0.1, 0.1]]) > 1e-3


def test_example_structure_compatible_at_pi_over_3(example_metric, uprime_points):
    assert compatibility_check(example_metric, example_structure(math.pi / 3), uprime_points).passed


xis = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


@settings(max_examples=15, deadline=None)
@given(xis, st.sampled_from(["plus", "minus"]))
def test_xi_family_is_almost_hermitian(example_coframe, uprime_points, xi, side):
    g = metric_from_coframe(example_coframe, check=False)
    J = xi_structure(example_coframe, XiParameter.finite(xi), side)
    assert compatibility_check(g, J, uprime_points).passed
    w = fundamental_form(g, J).dense(uprime_points)
    w2 = xi_fundamental_form(example_coframe, XiParameter.finite(xi), side).dense(uprime_points)
    assert np.abs(w - w2).max() < 1e-10
    star = hodge_star_values(g.values(uprime_points), w2.real)
    sign = 1 if side == "plus" else -1
    assert np.abs(star - sign * w2).max() < 1e-9


def test_classification_verdicts(example_metric, uprime_points):
    flat_g = metric_from_coframe(FLAT)
    assert classify_structure(flat_g, xi_structure(FLAT, XiParameter.finite(0)), BOX_PTS).kind \
        is StructureKind.Kahler
    for phi in (0.0, math.pi / 4):
        verdict = classify_structure(example_metric, example_structure(phi), uprime_points)
        assert verdict.kind is StructureKind.AlmostKahlerNonKahler
    J6, _ = opposite_kahler_structure()
    assert classify_structure(example_metric, J6, uprime_points).kind is StructureKind.Kahler


def test_scan_flat_every_xi_is_a_candidate():
    grid = stereographic_grid(8) + [XiParameter.infinity()]
    scan = integrability_scan(FLAT, "plus", grid, BOX_PTS)
    assert len(scan.candidates) == len(grid)


def test_scan_example_unit_circle_is_not_integrable(example_coframe, uprime_points):
    scan = integrability_scan(example_coframe, "plus", unit_circle_grid(16), uprime_points)
    assert all(r > 1e-3 for _, r in scan.residuals)


def test_scan_example_sphere_grid_has_no_candidate_on_circle(example_coframe, uprime_points):
    scan = integrability_scan(example_coframe, "plus", stereographic_grid(64), uprime_points)
    on_circle = [x for x in scan.candidates if abs(abs(complex(x.value.value)) - 1) < 1e-6]
    assert on_circle == []


def test_xi_zero_is_the_coordinate_complex_structure(example_coframe, uprime_points):
    # span{M, N} = span{dz1, dz2}, so J+_0 is the complex structure of (z1, z2)
    scan = integrability_scan(example_coframe, "plus", [XiParameter.finite(0)], uprime_points)
    assert scan.candidates


def test_minus_structure_is_integrable(example_coframe, uprime_points):
    # d(Mbar) = f'-terms + dhbar ^ dz2b lies in the ideal of (Mbar, N)
    scan = integrability_scan(example_coframe, "minus", [XiParameter.finite(0)], uprime_points)
    assert scan.candidates


@pytest.mark.parametrize("phi", [0.0, 1.1, math.pi])
def test_xi_structure_on_circle_matches_closed_form(example_coframe, uprime_points, phi):
    a = xi_structure(example_coframe, XiParameter.finite(complex(math.cos(phi), math.sin(phi))))
    b = example_structure(phi)
    assert np.abs(a.values(uprime_points) - b.values(uprime_points)).max() < 1e-10


@pytest.mark.parametrize("side, sign", [("plus", 1), ("minus", -1)])
def test_fundamental_forms_match_closed_forms_and_duality(example_coframe, uprime_points, rng,
                                                          side, sign):
    g = metric_from_coframe(example_coframe, check=False)
    gv = g.values(uprime_points)
    for z in rng.normal(size=5) + 1j * rng.normal(size=5):
        xi = XiParameter.finite(complex(z))
        w = fundamental_form(g, xi_structure(example_coframe, xi, side)).dense(uprime_points)
        closed = xi_fundamental_form(example_coframe, xi, side).dense(uprime_points)
        assert np.abs(w - closed).max() < 1e-10
        assert np.abs(hodge_star_values(gv, w) - sign * w).max() < 1e-9
