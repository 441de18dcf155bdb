"""divkit: density-power divergence families, checks, and robust estimation."""

from .densities import (
    BracketTriple,
    DensityObject,
    DiscreteDensity,
    GaussianDensity,
    GridDensity,
    affine_transform,
    bracket_integrals,
    density_value,
    empirical_brackets,
    gaussian_grid,
    read_discrete_csv,
    read_grid_csv,
    read_samples_csv,
    scale_values,
    write_density_csv,
)
from .errors import (
    DegenerateModelError,
    DivkitError,
    DomainError,
    EvaluationError,
    FitError,
    GeneratorValidityError,
    RepresentationError,
    SupportError,
)
from .estimation import (
    EstimationProblem,
    EstimationResult,
    OptimizerConfig,
    SweepRow,
    contaminated_sample,
    contamination_sweep,
    empirical_score,
    fit,
)
from .generators import (
    EtaCertificate,
    GeneratorEta,
    GeneratorPhi,
    GeneratorXi,
    PsiCertificate,
    bdpd_phi,
    bhd_eta,
    custom_eta,
    custom_phi,
    custom_xi,
    dpd_eta,
    eta_from_table,
    exp_minus_one_phi,
    identity_phi,
    identity_xi,
    jhhb_eta,
    log_phi,
    phi_from_table,
    power_phi,
    power_xi,
    ps_eta,
    signed_power,
    validate_eta,
    validate_phi,
    validate_psi,
    validate_xi,
    xi_from_table,
)
from .scores import (
    DivergenceSpec,
    divergence,
    equivalent_transform,
    fdp_divergence,
    fdp_score,
    holder_divergence,
    holder_score,
    jhhb_divergence,
    jhhb_score,
    score,
    xi_holder_divergence,
    xi_holder_score,
)
from .checks import (
    check_affine_invariance,
    check_fdps_lower_bound,
    check_uv_consistency,
    equality_condition_probe,
    random_brackets,
    random_discrete_density,
    random_discrete_pair,
    verify_jhhb_holder_representation,
)

__version__ = "0.1.0"
