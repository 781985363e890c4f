"""Qubit information geometry from spin tomograms.

Tomograms and state reconstruction, Petz and Tsallis metrics in polar
coordinates, pullbacks under tomographic schemes, operator-monotonicity
tests, and the ODE relating two Petz functions through a scheme change.
"""
from .errors import *  # noqa: F401,F403
from .geometry import (
    MetricCoeffs,
    classical_tsallis_divergence,
    cm_metric_value,
    conformal_factor,
    conformal_quotient,
    extract_petz_function,
    factorize_pullback,
    fisher_from_divergence,
    petz_metric,
    pullback_metric,
    quorum_fisher,
    scheme_fisher,
    tomographic_tensor,
    tsallis_metric,
    von_neumann_metric,
)
from .monotonicity import (
    MonotonicityReport,
    loewner_scan,
    matrix_monotonicity_test,
    metric_monotonicity_test,
)
from .petz import PetzFunction, catalog, parse_function_spec, symmetry_residual
from .qubit import (
    BlochVector,
    Channel,
    QubitDensity,
    TangentVector,
    UnitaryFrame,
    density_from_bloch,
    density_from_signed,
    spectral_decompose,
)
from .scheme_ode import (
    OdeSolution,
    ode_rhs,
    solve_ode,
    solve_separable_power,
    verify_solution,
)
from .tomography import (
    Quorum,
    SpectralMap,
    Tomogram,
    exponential_scheme,
    reconstruct_bloch,
    rotated_quorum,
    scheme_from_matrix_function,
    standard_quorum,
    tomogram,
    tomograms,
)

__version__ = "0.1.0"
