"""Gaussian covariance dynamics of non-Hermitian gain/loss mechanical networks."""

from nhgauss.model import (
    SystemSpec,
    Topology,
    build_diffusion,
    build_drift,
    build_hamiltonian,
    check_pseudo_hermitian,
    effective_gain,
)
from nhgauss.spectral import (
    Phase,
    SpectralReport,
    binary_eigenfrequencies,
    classify_phase,
    drift_spectrum_crosscheck,
    exceptional_point,
    ternary_eigenfrequencies,
)
from nhgauss.dynamics import (
    IntegrationAborted,
    TraceRecord,
    closed_form_covariance,
    evolve,
    initial_state,
    integrate_lyapunov,
    revival_times,
)
from nhgauss.measures import (
    CoefficientSet,
    PhysicalityError,
    TripartiteClass,
    inseparability_S,
    log_negativity,
    one_vs_rest_negativity,
    partial_transpose,
    symplectic_eigenvalues,
    tripartite_class,
    wigner_density,
    wigner_slice,
)

__version__ = "0.1.0"
