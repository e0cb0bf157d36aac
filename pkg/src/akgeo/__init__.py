"""Symbolic-numeric tensor calculus for checking a Ricci-flat almost-Kahler metric."""

from .checks import SuiteOptions, run_check_suite
from .constructions import (ChartId, PrzanowskiData, bfp_residual, chart_map, coframe_from_fh,
                            example_metric, example_package, fh_structure, gh_form_metric,
                            log_potential, opposite_kahler_structure, przanowski_metric,
                            przanowski_residual)
from .domains import DomainSpec, sample_domain
from .expr import Expr, conjugate, differentiate, expand, wirtinger
from .geometry import (CoframeField, KForm, MetricField, PetrovType, curvature_bundle,
                       exterior_derivative, hodge_star, levi_civita, metric_from_coframe,
                       petrov_classify, wedge, weyl_halves)
from .hermitian import (AlmostComplexStructure, StructureKind, XiParameter, classify_structure,
                        compatibility_check, fundamental_form, integrability_scan,
                        nijenhuis_tensor, xi_fundamental_form, xi_structure)
from .modelfile import ModelError, load_model, parse_model_file
from .numeric import evaluate, probable_zero
from .parser import ParseError, parse_expression
from .report import CheckReport

__version__ = "0.1.0"

__all__ = [
    "SuiteOptions",
    "run_check_suite",
    "ChartId",
    "PrzanowskiData",
    "bfp_residual",
    "chart_map",
    "coframe_from_fh",
    "example_metric",
    "example_package",
    "fh_structure",
    "gh_form_metric",
    "log_potential",
    "opposite_kahler_structure",
    "przanowski_metric",
    "przanowski_residual",
    "DomainSpec",
    "sample_domain",
    "Expr",
    "conjugate",
    "differentiate",
    "expand",
    "wirtinger",
    "CoframeField",
    "KForm",
    "MetricField",
    "PetrovType",
    "curvature_bundle",
    "exterior_derivative",
    "hodge_star",
    "levi_civita",
    "metric_from_coframe",
    "petrov_classify",
    "wedge",
    "weyl_halves",
    "AlmostComplexStructure",
    "StructureKind",
    "XiParameter",
    "classify_structure",
    "compatibility_check",
    "fundamental_form",
    "integrability_scan",
    "nijenhuis_tensor",
    "xi_fundamental_form",
    "xi_structure",
    "ModelError",
    "load_model",
    "parse_model_file",
    "evaluate",
    "probable_zero",
    "ParseError",
    "parse_expression",
    "CheckReport",
]
