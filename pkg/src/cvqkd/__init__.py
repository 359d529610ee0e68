"""Secret-key-rate security bounds for continuous-variable QKD with trusted
Gaussian source noise.

The package is organized as:

* :mod:`cvqkd.gaussian` -- covariance matrices, symplectic spectra, entropies,
  and heterodyne/homodyne conditioning;
* :mod:`cvqkd.models` -- the neutral-party, beam-splitter, and untrusted-source
  model matrices and their parameter sets;
* :mod:`cvqkd.keyrate` -- mutual information, Holevo bounds, secret key rates,
  and transmittance sweeps for the no-switching protocol;
* :mod:`cvqkd.verify` -- executable numerical checks (EB/PM equivalence,
  conditional-entropy monotonicity in w, cross-model bound consistency);
* :mod:`cvqkd.cli` -- the ``cvqkd`` command line (sweep / point / verify).
"""

from .gaussian import (
    CovarianceMatrix,
    DisplacementVector,
    ModePartition,
    Quadrature,
    UnphysicalStateError,
    condition_on_heterodyne,
    condition_on_homodyne,
    formal_entropy,
    g_function,
    is_physical,
    symplectic_eigenvalues,
    symplectic_form,
    von_neumann_entropy,
)
from .keyrate import (
    KeyRatePoint,
    ProtocolMismatchError,
    Reconciliation,
    holevo_bound,
    key_rate,
    mutual_information_no_switching,
    sweep,
)
from .models import (
    AmplificationFeasibility,
    BsDerivedParams,
    ChannelParams,
    FeasibilityWarning,
    ModelKind,
    ModelState,
    ParameterError,
    SourceParams,
    build_bs_amplification,
    build_bs_attenuation,
    build_gamma_ab,
    build_gamma_fab_decoupled,
    build_model_state,
    check_amplification_feasibility,
    params_from_excess_noise,
)
from .verify import (
    CheckResult,
    VerificationReport,
    WPoint,
    cross_model_checks,
    eb_pm_equivalence_check,
    gamma_b_af_of_w,
    w_monotonicity_check,
)

__version__ = "0.1.0"
