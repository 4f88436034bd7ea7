"""Numerical laboratory for linear hyperbolic relaxation systems.

``U_t + sum_j A_j U_{x_j} = Q U / eps``: stability classification of the
symbol family, the Kreiss resolvent measurement, the explicit estimates
behind the ``eps |log eps|`` relaxation-limit bound, and a Fourier spectral
solver that measures the slow-variable error directly.
"""

__version__ = "1.0.0"

from .linalg import mat_exp, operator_norm, resolvent, spectrum
from .model import (
    RelaxationSystem,
    block_decompose,
    builtin_system,
    family_scan,
    is_stiffly_well_posed,
    jinxin,
    load_system,
    osc3,
    symbol,
)
from .stability import is_quasi_stable, kreiss_measure, sup_semigroup_norm, yong_check
from .mz import convergence_study, coupling_kernel, make_initial_data, mz_residual, slow_error
from .bounds import check_integral_bound, g_bound_check, grl_check, integral_I, integral_I_closed

__all__ = [
    "__version__",
    "spectrum",
    "mat_exp",
    "resolvent",
    "operator_norm",
    "RelaxationSystem",
    "block_decompose",
    "builtin_system",
    "load_system",
    "jinxin",
    "osc3",
    "symbol",
    "family_scan",
    "is_stiffly_well_posed",
    "is_quasi_stable",
    "sup_semigroup_norm",
    "kreiss_measure",
    "yong_check",
    "make_initial_data",
    "coupling_kernel",
    "mz_residual",
    "slow_error",
    "convergence_study",
    "integral_I",
    "integral_I_closed",
    "check_integral_bound",
    "grl_check",
    "g_bound_check",
]
