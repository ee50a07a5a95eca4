"""Numerical laboratory for blow-up of small-data 1D semilinear wave equations.

Simulates u_tt - u_xx = A(x,t)|u_t|^p|u|^q + B(x,t)|u|^r (and relatives) on a
characteristic grid, estimates numerical lifespans, and checks the measured
eps -> T(eps) scaling against the catalogue of sharp lifespan laws.
"""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    Bump,
    CharacteristicWeight,
    ConstantWeight,
    GeneralTheoryParams,
    GradientTerm,
    InitialData,
    MixedDerivativeTerm,
    PowerTerm,
    ProblemSpec,
    SmoothMonomialTerm,
    TimePowerWeight,
    ZeroWeight,
    antisymmetric_speed_data,
    evaluate_source,
    evaluate_weight,
    liouville_transform,
    sample_data,
    symmetric_data,
)
