"""Bistatic passive sensing on swept synchronization-block beams.

Simulates a transmitter sweeping beamformed OFDM synchronization blocks
across a surveillance sector while a second, synchronized base station
listens for target echoes.  Provides the echo channel synthesis, the
2D-FFT range-velocity estimator with peak-to-average beam aggregation,
threshold detection with Monte Carlo Pd/Pfa evaluation, closed-form
range/velocity estimation bounds, and a reproducible experiment harness.
"""

from ssbsense.array import ArrayConfig, BeamAngle, BeamGrid, beam_gain, beam_grid, precoder, steering_vector
from ssbsense.channel import (
    RxBeamFrame,
    Scene,
    Target,
    draw_swerling1,
    path_gain_beta,
    synthesize_rx_frames,
    unambiguous_limits,
)
from ssbsense.constants import SPEED_OF_LIGHT
from ssbsense.crb import CrbInputs, CrbResult, crb_closed_form, crb_curves, fim, snr_r_from_link
from ssbsense.detector import (
    DeactivationPolicy,
    DetectionResult,
    MonteCarloScenario,
    deactivation_sweep,
    detect,
    monte_carlo_pd_pfa,
)
from ssbsense.errors import ConfigurationError
from ssbsense.estimator import (
    PAF_SCALE,
    PafVector,
    ProfileConfig,
    RangeVelocityProfile,
    aggregate,
    estimate_range_velocity,
    paf,
    paf_vector,
    range_velocity_profile,
)
from ssbsense.constants import PACKAGE_VERSION
from ssbsense.waveform import OfdmFrameConfig, SsbMask, SweepTiming, default_ssb_mask, load_mask_file, sensing_overhead_percent

__version__ = PACKAGE_VERSION

__all__ = [
    "ArrayConfig",
    "BeamAngle",
    "BeamGrid",
    "ConfigurationError",
    "CrbInputs",
    "CrbResult",
    "DeactivationPolicy",
    "DetectionResult",
    "MonteCarloScenario",
    "OfdmFrameConfig",
    "PAF_SCALE",
    "PafVector",
    "ProfileConfig",
    "RangeVelocityProfile",
    "RxBeamFrame",
    "SPEED_OF_LIGHT",
    "Scene",
    "SsbMask",
    "SweepTiming",
    "Target",
    "aggregate",
    "beam_gain",
    "beam_grid",
    "crb_closed_form",
    "crb_curves",
    "deactivation_sweep",
    "default_ssb_mask",
    "detect",
    "draw_swerling1",
    "estimate_range_velocity",
    "fim",
    "load_mask_file",
    "monte_carlo_pd_pfa",
    "paf",
    "paf_vector",
    "path_gain_beta",
    "precoder",
    "range_velocity_profile",
    "sensing_overhead_percent",
    "snr_r_from_link",
    "steering_vector",
    "synthesize_rx_frames",
    "unambiguous_limits",
    "__version__",
]
