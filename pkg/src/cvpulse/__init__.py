"""Time-domain simulation and analysis of quadrature-entangled pulse pairs.

The package covers the full measurement chain of a pulsed
continuous-variable entanglement experiment: Gaussian-state algebra for the
two-mode squeezed source, separability witnesses and the entropy of
formation, a per-pulse Monte Carlo of lossy homodyne detection, and the
analysis pipeline that turns raw pulse records back into a corrected
two-mode covariance matrix.
"""

from .gaussian import (
    PHYSICALITY_TOL,
    SHOT_NOISE_VAR,
    PhysicalityResult,
    SourceSpec,
    apply_transform,
    beamsplitter,
    intensity_gain,
    loss_channel,
    mode_block,
    phase_rotation,
    physicality_check,
    quadrature_variance,
    source_covariance,
    squeezing_from_gain,
    symmetric_two_mode_covariance,
    symplectic_form,
    two_mode_squeezer,
    vacuum_covariance,
)
from .entanglement import (
    EPR_THRESHOLD,
    SEPARABILITY_THRESHOLD,
    EntanglementMeasure,
    WitnessResult,
    duan_simon,
    entropy_from_duan_simon,
    entropy_of_formation,
    evaluate_witnesses,
    formation_entropy,
    random_symmetric_state,
    reid_epr_product,
    variance_to_db,
)
from .simulate import (
    DEFAULT_CHUNK_SIZE,
    DetectorModel,
    PhaseSchedule,
    PulseRecord,
    PulseTrain,
    RunConfig,
    block_variance_trace,
    detected_covariance,
    detected_variance,
    read_metadata,
    read_records,
    sample_pulses,
    sample_pulses_joint,
    shot_noise_linearity_scan,
    theta_scan,
    write_records,
)
from .analysis import (
    EntanglementReport,
    ScanEstimate,
    efficiency_inversion,
    end_to_end_report,
    fit_phase_scan,
    fit_variance_curve,
    reconstruct_covariance,
)
from .scenario import Scenario, ScenarioError, load_scenario, reference_scenario

__version__ = "0.1.0"

__all__ = [
    "PHYSICALITY_TOL",
    "SHOT_NOISE_VAR",
    "PhysicalityResult",
    "SourceSpec",
    "apply_transform",
    "beamsplitter",
    "intensity_gain",
    "loss_channel",
    "mode_block",
    "phase_rotation",
    "physicality_check",
    "quadrature_variance",
    "source_covariance",
    "squeezing_from_gain",
    "symmetric_two_mode_covariance",
    "symplectic_form",
    "two_mode_squeezer",
    "vacuum_covariance",
    "EPR_THRESHOLD",
    "SEPARABILITY_THRESHOLD",
    "EntanglementMeasure",
    "WitnessResult",
    "duan_simon",
    "entropy_from_duan_simon",
    "entropy_of_formation",
    "evaluate_witnesses",
    "formation_entropy",
    "random_symmetric_state",
    "reid_epr_product",
    "variance_to_db",
    "DEFAULT_CHUNK_SIZE",
    "DetectorModel",
    "PhaseSchedule",
    "PulseRecord",
    "PulseTrain",
    "RunConfig",
    "block_variance_trace",
    "detected_covariance",
    "detected_variance",
    "read_metadata",
    "read_records",
    "sample_pulses",
    "sample_pulses_joint",
    "shot_noise_linearity_scan",
    "theta_scan",
    "write_records",
    "EntanglementReport",
    "ScanEstimate",
    "efficiency_inversion",
    "end_to_end_report",
    "fit_phase_scan",
    "fit_variance_curve",
    "reconstruct_covariance",
    "Scenario",
    "ScenarioError",
    "load_scenario",
    "reference_scenario",
]
