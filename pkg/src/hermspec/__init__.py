"""Hermite-spectral toolkit for the quantum harmonic oscillator.

Evaluates Hermite eigenfunctions and spectral projections, applies the
oscillator Schrodinger propagator by eigen-expansion and by its oscillatory
integral kernel, computes the mixed, Triebel-Lizorkin and Hermite-Sobolev
norms built on the projection family, and ships a verification harness for
the sharp projection exponents and the associated space-time estimates.
"""

__version__ = "0.1.0"

from .hermite import (
    GridSpec,
    QuadratureRule,
    default_grid,
    default_half_width,
    eigenspace_dimension,
    eigenvalue,
    enumerate_eigenspace,
    gauss_hermite_rule,
    hermite_eval_1d,
    hermite_eval_single,
    make_grid,
    phi_eval,
)
from .transform import (
    SampledField,
    SpectralField,
    all_indices,
    analyze,
    apply_multiplier,
    kernel_phi_k,
    mehler_closed_form,
    project,
    projection_values,
    synthesize,
)
from .propagator import (
    PhaseConvention,
    SingularTimeError,
    calibrate_phase,
    evolve_eigen,
    evolve_kernel,
    evolve_time_samples,
    kernel_grid,
    mehler_kernel,
)
from .spaces import (
    MixedNormSpec,
    SpaceTimeSamples,
    lp_norm,
    mixed_norm,
    sobolev_norm,
    time_norms,
    triebel_norm,
)
from .verify import (
    ExcludedExponentError,
    ExperimentConfig,
    ExponentFit,
    Report,
    evolution_mixed_norm,
    fit_exponent,
    kappa_p,
    kappa_pq,
    lemma1_identity_check,
    projection_norm_1d,
    random_band_limited,
    run_suite,
    sharpness_probe,
    strichartz_ratio,
    wainger_probe,
)

__all__ = [name for name in dir() if not name.startswith("_")]
