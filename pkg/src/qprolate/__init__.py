"""q-Fourier analysis on the geometric lattice {q^n}: Hahn-Exton q-Bessel
transforms, q-prolate spheroidal wave functions, and the q-sampling
theorem for extrapolating q-bandlimited functions from their lattice
values.
"""

from .qcalc import (
    DEFAULT_WINDOW,
    LatticeFunction,
    LatticeWindow,
    QParams,
    TailWarning,
    WindowTooSmall,
    inner_product,
    jackson_integral_0a,
    jackson_integral_0inf,
    lattice_weights,
    norm_lqpv,
    qpochhammer,
)
from .qbessel import (
    BesselEvalReport,
    DegenerateArguments,
    jv,
    jv_array,
    jv_at_exponent,
    jv_bound,
    product_integral_closed,
    product_integral_direct,
)
from .qfourier import TransformPlan, convolve, convolve_direct, fqv_transform, make_plan, translate
from .pswf import (
    Bandlimit,
    KernelEvaluator,
    PswfBasis,
    SolverNoConvergence,
    ZeroFunction,
    build_operator_matrix,
    compute_basis,
    concentration_index,
    eigen_report_csv,
    eigen_report_json,
    eigendecompose,
    eval_pswf_at,
    kernel,
    kernel_auto,
    pswf_on_window,
)
from .sampling import (
    DEFAULT_GRID,
    SamplingGrid,
    convergence_study,
    project,
    reconstruct,
    sampling_kernel,
)

__version__ = "0.1.0"

__all__ = [
    "BesselEvalReport",
    "Bandlimit",
    "DEFAULT_GRID",
    "DEFAULT_WINDOW",
    "DegenerateArguments",
    "KernelEvaluator",
    "LatticeFunction",
    "LatticeWindow",
    "PswfBasis",
    "QParams",
    "SamplingGrid",
    "SolverNoConvergence",
    "TailWarning",
    "TransformPlan",
    "WindowTooSmall",
    "ZeroFunction",
    "build_operator_matrix",
    "compute_basis",
    "concentration_index",
    "convergence_study",
    "convolve",
    "convolve_direct",
    "eigen_report_csv",
    "eigen_report_json",
    "eigendecompose",
    "eval_pswf_at",
    "fqv_transform",
    "inner_product",
    "jackson_integral_0a",
    "jackson_integral_0inf",
    "jv",
    "jv_array",
    "jv_at_exponent",
    "jv_bound",
    "kernel",
    "kernel_auto",
    "lattice_weights",
    "make_plan",
    "norm_lqpv",
    "product_integral_closed",
    "product_integral_direct",
    "project",
    "pswf_on_window",
    "qpochhammer",
    "reconstruct",
    "sampling_kernel",
    "translate",
]
