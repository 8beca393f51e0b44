"""A_p, doubling and Poincaré constants of weights on the real line."""

from .functionals import (
    ConstantReport,
    GridSpec,
    HolderReport,
    ap_constant,
    ap_functional,
    cw_poincare_constant,
    doubling_constant,
    empirical_pi_ratio,
    extremal_test_function,
    holder_chain_bound,
    poincare_constant_within,
    step_lower_bound,
)
from .parsing import ParseError, format_weight, parse_weight
from .primitives import Interval, PiecewiseLinearFn, Primitive, constant, exponential, power
from .verify import (
    ChainReport,
    SweepReport,
    check_admissible_within,
    counterexample_suite,
    exp_surrogate,
    verify_cor43,
    verify_duality,
    verify_even_reflection,
    verify_lattice_bounds,
    verify_reflection_bound,
    verify_thm45,
    window_sweep,
)
from .weights import (
    LatticeError,
    MeasureModel,
    Weight,
    conjugate,
    essinf,
    integrate,
    integrate_power,
    lattice,
    reflect_even,
    reflect_periodic,
)

__all__ = [
    "ChainReport",
    "ConstantReport",
    "GridSpec",
    "HolderReport",
    "Interval",
    "LatticeError",
    "MeasureModel",
    "ParseError",
    "PiecewiseLinearFn",
    "Primitive",
    "SweepReport",
    "Weight",
    "ap_constant",
    "ap_functional",
    "check_admissible_within",
    "conjugate",
    "constant",
    "counterexample_suite",
    "cw_poincare_constant",
    "doubling_constant",
    "empirical_pi_ratio",
    "essinf",
    "exp_surrogate",
    "exponential",
    "extremal_test_function",
    "format_weight",
    "holder_chain_bound",
    "integrate",
    "integrate_power",
    "lattice",
    "parse_weight",
    "poincare_constant_within",
    "power",
    "reflect_even",
    "reflect_periodic",
    "step_lower_bound",
    "verify_cor43",
    "verify_duality",
    "verify_even_reflection",
    "verify_lattice_bounds",
    "verify_reflection_bound",
    "verify_thm45",
    "window_sweep",
]
