"""Barrier-crossing kinetics of a particle in structured-noise environments.

Analytic pipeline: :mod:`glekin.model` (kernels, noise covariance),
:mod:`glekin.resolvent` (response function), :mod:`glekin.moments`,
:mod:`glekin.kinetics`. Independent stochastic check: :mod:`glekin.sim`.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AccuracyError,
    ConfluentPolesError,
    CovarianceError,
    DomainError,
    GLEKinError,
    NumericalError,
    ResonanceError,
    ValidationError,
)
from .model import (  # noqa: E402
    Convention,
    CorrelationForm,
    NoiseKind,
    NoiseModel,
    correlation_form,
    kernel_laplace,
    make_noise_model,
)
from .resolvent import (  # noqa: E402
    BarrierSpec,
    SpectralDecomposition,
    characteristic_polynomial,
    decompose,
    find_poles,
    residues,
    response,
    response_integral,
)
from .moments import InitialState, mean_position, variance_closed, variance_quadrature  # noqa: E402
from .kinetics import (  # noqa: E402
    KineticsCurves,
    TstNormalization,
    kinetics_curves,
    late_window_mean,
    passing_probability,
    rate_ratio_by_flux,
    sign_change_rate,
    sign_changes,
    transmission,
    tst_rate,
)
from .sim import (  # noqa: E402
    EnsembleResult,
    TimeGrid,
    empirical_kappa,
    ensemble_stats,
    integrate_gle,
    sample_noise_paths,
    simulate_ensemble,
)
