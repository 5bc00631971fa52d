"""Within-host viral dynamics: latent-reservoir models, stability analysis
and eradication-time metrics.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its public surface.
"""

from hivdyn._core import (  # noqa: F401
    CharCoeffsCubic,
    CharCoeffsQuartic,
    CoreParams,
    CrossingDirection,
    DescentReport,
    DomainError,
    Efficacy,
    EigenSpectrum,
    EndemicAbsentError,
    EquilibriumKind,
    Equilibrium3,
    Equilibrium4,
    EventRecord,
    EventSpec,
    InvalidStateError,
    LatentParams,
    ModelKind,
    NumericError,
    SetpointSensitivity,
    SolverConfig,
    StabilityReport,
    State3,
    State4,
    SweepRow,
    ThresholdMetric,
    ThresholdResult,
    Trajectory,
    Verdict,
    char_coeffs_endemic,
    char_coeffs_noninfective,
    classify_equilibrium,
    classify_spectrum,
    combined_efficacy,
    effective_params,
    efficacy_for_ratio,
    eigen_spectrum,
    equilibria_3cm,
    equilibria_4cm,
    first_crossing,
    integrate,
    jacobian_3cm,
    jacobian_4cm,
    p_n,
    preset_init_default,
    preset_table1,
    q_n,
    q_ratio,
    r0,
    r_l,
    rhs_3cm,
    rhs_4cm,
    routh_hurwitz_cubic,
    routh_hurwitz_quartic,
    setpoint_sensitivity,
    simulate_3cm,
    simulate_4cm,
    sweep,
    u_endemic,
    u_endemic_rate,
    u_noninfective,
    u_noninfective_rate,
    verify_descent,
    viral_setpoint,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
