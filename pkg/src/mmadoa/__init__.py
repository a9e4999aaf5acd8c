"""Direction-of-arrival estimation with multi-port and multi-mode antennas.

The package splits into basis evaluation (:mod:`mmadoa.basis`), calibration
data and synthetic antennas (:mod:`mmadoa.calibration`), continuous response
models (:mod:`mmadoa.models`), snapshot simulation (:mod:`mmadoa.signals`),
maximum-likelihood estimators (:mod:`mmadoa.estimators`), Cramer-Rao bounds
(:mod:`mmadoa.bounds`) and the Monte-Carlo harness (:mod:`mmadoa.harness`).
"""

from .basis import (
    BasisKind,
    BasisSpec,
    Direction,
    assoc_legendre,
    basis_eval,
    basis_grad,
    basis_matrix,
    legendre,
    sh_complex,
    sh_complex_grad,
    sh_real,
    sh_real_grad,
)
from .bounds import CrbResult, crb_coherent, crb_polarimetric, fim_noncoherent
from .calibration import (
    CalibrationGrid,
    CalibrationSet,
    SyntheticAntennaTruth,
    cut_to_sphere,
    gain_of,
    load_calibration,
    save_calibration,
    synth_antenna,
)
from .errors import (
    CalibrationFormatError,
    ConfigError,
    DomainError,
    FieldOfViewError,
    PoleProximityError,
    RankDeficiencyError,
    UnderdeterminedSectorError,
)
from .estimators import (
    EstimationResult,
    NcObservation,
    OptimizerOptions,
    c_ml,
    nc_loglik,
    nc_ml,
    nc_rc,
    noise_power_estimate,
    p_ml,
)
from .harness import run_likelihood_map, run_surface, run_sweep
from .models import (
    AitModel,
    DerivedGainModel,
    PolarimetricModel,
    PolarizationState,
    UlaGeometry,
    UraGeometry,
    WmGainModel,
    WmModel,
    eval_polarimetric,
    eval_response,
    eval_response_grad,
    fit_ait,
    fit_polarimetric_wm,
    fit_wm,
    fit_wm_gain,
    ideal_ula,
    ideal_ura,
    load_model,
    save_model,
    truncation_order,
)
from .signals import (
    Scenario,
    SnapshotBlock,
    gen_snapshots,
    noncentrality,
    rss,
    rss_moments,
    sample_cov,
)

__version__ = "0.1.0"
