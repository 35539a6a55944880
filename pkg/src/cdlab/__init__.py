"""Numerical laboratory for Christoffel-Darboux kernel measures.

Orthonormal polynomials on the real line and unit circle, their CD
kernels, zero-counting and CD measures, the Bernstein-Szego and
second-kind approximating measures, rank-one spectral perturbations,
Prufer phases, balayage onto circles, and a verification harness for the
moment-discrepancy bound 2 k N^k / (n + 1).
"""

__version__ = "0.1.0"

from .config import DEFAULT_TOL, Tolerances
from .measures import (
    AtomicMeasure,
    CircleAtoms,
    CircleVerblunsky,
    CircleWeighted,
    MeasureSpec,
    MomentVector,
    RealAtoms,
    RealWeighted,
    from_json,
    inner_product,
    is_circle,
    moment,
    moment_vector,
    spec_hash,
    support_radius,
    to_json,
)
from .numerics import (
    ComplexPolynomial,
    QuadratureRule,
    TridiagonalSymmetric,
    aberth_roots,
    newton_power_sums,
    periodic_quadrature,
    realline_quadrature,
    symtridiag_eigen,
    unwrap_phase,
)
from .oprl import (
    JacobiData,
    cd_kernel_diag,
    cd_measure_moment,
    eval_orthonormal,
    jacobi_from_measure,
    perturbed_spectral_measure,
    real_prufer_phase,
    zero_counting_moment,
    zeros_and_weights,
)
from .opuc import (
    VerblunskyData,
    balayage_zero_moment,
    cd_kernel_diag_circle,
    cd_measure_moment_circle,
    circle_prufer_phase,
    eval_szego,
    opuc_zeros,
    prufer_identity_residuals,
    verblunsky_from_measure,
)
from .approx import (
    CutoffWindow,
    SecondKindSpec,
    balayage_circle_moment,
    bernstein_szego_moment,
    cauchy_average,
    christoffel_ratio,
    outlier_point,
    second_kind_integral,
    tail_integral,
)
from .harness import (
    DiscrepancyReport,
    DiscrepancyRow,
    RateFit,
    corollary_check,
    random_measure,
    verify_circle,
    verify_real,
)
