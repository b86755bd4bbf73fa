"""Vologodsky (p-adic) integration on bad-reduction hyperelliptic curves.

Single integrals of meromorphic 1-forms on y^2 = f(x) over Q_p and finite
extensions, at odd primes of bad reduction: Berkovich-Coleman integrals on a
semistable covering, corrected by tropical periods of the skeleton, plus the
p-part of the extended Coleman-Gross height pairing on elliptic curves.
"""

from .covering import CoveringGraph, Skeleton, build_double_cover, build_p1_covering, cluster_roots
from .curve import CurvePoint, HyperellipticCurve, MeromorphicForm, decompose_third_kind, height_integrand, involution
from .errors import VolintError
from .padic import FieldSpec, PadicElement, field_arith, log, sqrt, valuation
from .polyring import LaurentSeries, Poly, antiderivative, hensel_split, inv_sqrt_series, shift_rescale
from .tropical import Graph, TropicalOneForm, cycle_basis, dual_tropical_basis, harmonic_decompose, tropical_integral
from .vologodsky import IntegrationJob, Integrator
from .wideopen import WideOpenModel, build_model, coleman_backend, expand_form, integrate_parametrized, integrate_split, pole_reduce
from .cli import working_precision

__all__ = [
    "CoveringGraph",
    "CurvePoint",
    "FieldSpec",
    "Graph",
    "HyperellipticCurve",
    "IntegrationJob",
    "Integrator",
    "LaurentSeries",
    "MeromorphicForm",
    "PadicElement",
    "Poly",
    "Skeleton",
    "TropicalOneForm",
    "VolintError",
    "WideOpenModel",
    "antiderivative",
    "build_double_cover",
    "build_model",
    "build_p1_covering",
    "cluster_roots",
    "coleman_backend",
    "cycle_basis",
    "decompose_third_kind",
    "dual_tropical_basis",
    "expand_form",
    "field_arith",
    "harmonic_decompose",
    "height_integrand",
    "hensel_split",
    "integrate_parametrized",
    "integrate_split",
    "inv_sqrt_series",
    "involution",
    "log",
    "pole_reduce",
    "shift_rescale",
    "sqrt",
    "tropical_integral",
    "valuation",
    "working_precision",
]

__version__ = "0.1.0"
