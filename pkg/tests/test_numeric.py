import numpy as np
import pytest

from akgeo import expr as E
from akgeo.domains import DomainSpec, SamplingError, sample_domain
from akgeo.numeric import DomainViolation, Program, UnboundParameterError, evaluate, probable_zero
from akgeo.parser import parse_expression

UPRIME = DomainSpec.uprime()


def test_uprime_samples_satisfy_margin():
    pts = sample_domain(UPRIME, 10, 42)
    u = 2 * pts[:, 0] - 2 * (pts[:, 2] ** 2 + pts[:, 3] ** 2)
    assert len(pts) == 10
    assert np.all((u >= 0.5) & (u <= 4))


def test_degenerate_box_repeats_point():
    pts = sample_domain(DomainSpec.box((1, 1), (0, 0), (0, 0), (0, 0)), 3, 42)
    assert np.array_equal(pts, np.tile([1.0, 0, 0, 0], (3, 1)))


def test_empty_margin_hits_retry_cap():
    with pytest.raises(SamplingError, match="retry cap"):
        sample_domain(DomainSpec.uprime(5, 4), 5, 42)


def test_sampling_is_deterministic():
    assert np.array_equal(sample_domain(UPRIME, 7, 3), sample_domain(UPRIME, 7, 3))
    assert not np.array_equal(sample_domain(UPRIME, 7, 3), sample_domain(UPRIME, 7, 4))


def test_log_of_negative_is_a_domain_violation():
    with pytest.raises(DomainViolation):
        evaluate(parse_expression("log(x1)"), (-1, 0, 0, 0))


def test_reciprocal_of_zero_is_a_domain_violation():
    with pytest.raises(DomainViolation):
        evaluate(parse_expression("1/x1"), (0, 0, 0, 0))


def test_mask_mode_flags_bad_points():
    vals, bad = Program([parse_expression("sqrt(x1)")]).run([[1, 0, 0, 0], [-1, 0, 0, 0]], mask=True)
    assert bad.tolist() == [False, True]
    assert vals[0, 0] == 1


def test_unbound_parameter():
    with pytest.raises(UnboundParameterError):
        evaluate(E.param("phi"), (0, 0, 0, 0))


def test_probable_zero_on_identity_and_non_identity():
    ident = parse_expression("sqrt(v - 2*z2*z2b)^2 - v + 2*z2*z2b")
    assert probable_zero(ident, UPRIME).ok
    res = probable_zero(parse_expression("x1 - 1"), UPRIME, n=10)
    assert not res.ok and res.max_residual > 0


def test_probable_zero_resamples_around_guards():
    # undefined where x1 <= 0, i.e. on half of the box
    e = parse_expression("log(x1) + log(1/x1)")
    assert not isinstance(e, E.Const)
    res = probable_zero(e, DomainSpec.box(*[(-1, 1)] * 4), n=20)
    assert res.ok and res.samples == 20
