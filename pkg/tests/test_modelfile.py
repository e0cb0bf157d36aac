from pathlib import Path

import numpy as np
import pytest

from akgeo import expr as E
from akgeo.constructions import example_metric
from akgeo.domains import sample_domain
from akgeo.modelfile import ModelError, load_model, parse_model_file

MODELS = Path(__file__).resolve().parents[1] / "models"


@pytest.mark.parametrize("name", ["ricci_flat_coframe.mdl", "ricci_flat_metric.mdl"])
def test_shipped_example_models_match_the_builder(name):
    m = load_model(MODELS / name)
    pts = sample_domain(m.domain, 20, 42)
    assert np.abs(m.metric.values(pts) - example_metric().values(pts)).max() < 1e-12


def test_flat_model():
    m = load_model(MODELS / "flat.mdl")
    assert m.coframe.M == (E.ONE, E.I, E.ZERO, E.ZERO)
    assert np.allclose(m.metric.values([(0, 0, 0, 0)])[0], 2 * np.eye(4))


def test_repeated_differential_is_degenerate():
    text = "coords: x1 x2 x3 x4\ncoframe:\n  M = dz1\n  N = dz1\n"
    with pytest.raises(ModelError, match="degenerate"):
        parse_model_file(text)


def test_both_blocks_is_an_error_at_the_second_header():
    text = ("coords: x1 x2 x3 x4\ncoframe:\n  M = dz1\n  N = dz2\n"
            "metric:\n  g11 = 1\n")
    with pytest.raises(ModelError) as err:
        parse_model_file(text)
    assert err.value.line == 5


def test_parse_error_has_line_and_column():
    text = "coords: x1 x2 x3 x4\ncoframe:\n  M = dz1 +* 2\n  N = dz2\n"
    with pytest.raises(ModelError) as err:
        parse_model_file(text)
    assert (err.value.line, err.value.col) == (3, 12)
    assert str(err.value).startswith("line 3, column 12:")


@pytest.mark.parametrize("rhs, msg", [("dz1*dz2", "linear"), ("dz1 + x1", "without a differential")])
def test_one_forms_must_be_linear_in_differentials(rhs, msg):
    text = f"coords: x1 x2 x3 x4\ncoframe:\n  M = {rhs}\n  N = dz2\n"
    with pytest.raises(ModelError, match=msg):
        parse_model_file(text)


def test_missing_coordinates_and_blocks():
    with pytest.raises(ModelError, match="coords"):
        parse_model_file("coframe:\n  M = dz1\n  N = dz2\n")
    with pytest.raises(ModelError, match="coords"):
        parse_model_file("coords: x y z w\ncoframe:\n  M = dz1\n  N = dz2\n")
    with pytest.raises(ModelError, match="needs a"):
        parse_model_file("coords: x1 x2 x3 x4\n")


def test_metric_block_fills_lower_triangle_and_zeros():
    text = "coords: x1 x2 x3 x4\nmetric:\n  g11 = 2\n  g12 = 1/2\n  g22 = 3\n  g33 = 1\n  g44 = 1\n"
    g = parse_model_file(text).metric.values([(0, 0, 0, 0)])[0]
    assert np.allclose(g, [[2, .5, 0, 0], [.5, 3, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])


def test_lower_triangle_entry_is_rejected():
    with pytest.raises(ModelError, match="a <= b"):
        parse_model_file("coords: x1 x2 x3 x4\nmetric:\n  g21 = 1\n")


def test_degenerate_metric_is_rejected():
    with pytest.raises(ModelError, match="degenerate"):
        parse_model_file("coords: x1 x2 x3 x4\nmetric:\n  g11 = 1\n  g22 = 1\n  g33 = 1\n")


def test_parameters_and_box_domain():
    text = ("coords: x1 x2 x3 x4\nparam: a\ncoframe:\n  M = (1 + a*x1^2) * dz1\n  N = dz2\n"
            "domain:\n  x1 0 1\n  x3 -2 2\n")
    m = parse_model_file(text, param_values={"a": 3.0})
    assert m.params == ("a",)
    assert np.allclose(m.domain.bounding_box(), [[0, 1], [-1, 1], [-2, 2], [-1, 1]])
    g = m.metric.values([(1, 0, 0, 0)], {"a": 3.0})[0]
    assert g[0, 0] == pytest.approx(32)


def test_bad_domain_line():
    text = "coords: x1 x2 x3 x4\ncoframe:\n  M = dz1\n  N = dz2\ndomain:\n  x9 0 1\n"
    with pytest.raises(ModelError) as err:
        parse_model_file(text)
    assert err.value.line == 6


def test_unreadable_file(tmp_path):
    with pytest.raises(ModelError, match="cannot read"):
        load_model(tmp_path / "missing.mdl")
