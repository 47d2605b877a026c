"""Threshold detection on the peak-to-average statistic and Monte Carlo Pd/Pfa.

The detector compares the largest normalized peak-to-average factor over
the active beams against a threshold.  Monte Carlo trials draw a random
surveillance target (detection runs) or pure noise (false-alarm runs),
synthesize the sweep, and apply the detector; a power-saving policy
deactivates a random subset of beams per trial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ssbsense.array import ArrayConfig, BeamGrid, beam_grid, precoder, steering_vector
from ssbsense.channel import Scene, Target, path_gain_beta, synthesize_rx_frames, unambiguous_limits
from ssbsense.errors import ConfigurationError
from ssbsense.estimator import PAF_SCALE, PafVector, ProfileConfig, profile_magnitudes
from ssbsense.units import dbm_to_watt
from ssbsense.waveform import OfdmFrameConfig, SsbMask, default_ssb_mask

# rng sub-stream tags (spawn-key components)
_STREAM_H1 = 1
_STREAM_H0 = 2
_STREAM_DEACT = 3


def rng_for(seed: int, *path: int) -> np.random.Generator:
    """Deterministic, schedule-independent sub-stream for (seed, path)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=path))


@dataclass(frozen=True)
class DetectionResult:
    """Outcome of one threshold test."""

    statistic: float
    detected: bool
    threshold: float


@dataclass(frozen=True)
class DeactivationPolicy:
    """Power-saving policy: deactivate a random fraction of beams per trial.

    The deactivated subset is drawn uniformly without replacement;
    fraction 1 turns every beam off.  ``stream`` separates the draw from
    the trial noise so paired detection/false-alarm trials share it.
    """

    fraction: float = 0.0
    stream: int = 0

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise ConfigurationError(f"deactivation fraction must be in [0, 1], got {self.fraction}")

    def n_deactivated(self, n_beams: int) -> int:
        return int(round(self.fraction * n_beams))


def detect(pafs: PafVector, gamma: float, active_mask: np.ndarray | None = None) -> DetectionResult:
    """Threshold test on the largest normalized peak-to-average over active beams.

    Declares a detection iff the statistic strictly exceeds ``gamma``.
    With no active beams the statistic is 0 and the decision negative
    (nothing was received).
    """
    if len(pafs) < 1:
        raise ConfigurationError("need at least one beam")
    values = pafs.normalized
    if active_mask is not None:
        active_mask = np.asarray(active_mask, dtype=bool)
        if active_mask.shape != values.shape:
            raise ConfigurationError("active mask must match the beam count")
        values = values[active_mask]
    statistic = float(values.max()) if values.size else 0.0
    return DetectionResult(statistic=statistic, detected=statistic > gamma, threshold=gamma)


@dataclass(frozen=True)
class MonteCarloScenario:
    """Everything a detection trial needs except the threshold and policy.

    ``snr_r`` is the linear receive SNR at the best beam; the transmit
    power is solved per trial from the drawn geometry so that the best
    beam sees exactly this SNR.  With zero noise power the trials are
    noiseless (infinite SNR).
    """

    array_cfg: ArrayConfig = field(default_factory=lambda: ArrayConfig(10, 10))
    ofdm: OfdmFrameConfig = field(default_factory=OfdmFrameConfig)
    profile: ProfileConfig = field(default_factory=ProfileConfig)
    snr_r: float = 10.0 ** -0.85  # calibrated default operating point, -8.5 dB
    noise_power_w: float = dbm_to_watt(-94.0)
    rcs_m2: float = 0.1
    fluctuation: str = "swerling1"
    mask_mode: str = "ssb"

    def build(self):
        """Resolve the grid, precoder, and mask once for a run."""
        grid = beam_grid(self.array_cfg, surveillance_only=True)
        f = precoder(grid, self.array_cfg)
        mask = default_ssb_mask(self.ofdm) if self.mask_mode == "ssb" else SsbMask.full(self.ofdm)
        return grid, f, mask


def draw_surveillance_target(
    rng: np.random.Generator, grid: BeamGrid, ofdm: OfdmFrameConfig, rcs_m2: float
) -> Target:
    """Random target over the unambiguous span and the surveillance sector.

    Bistatic range uniform in (0, d_u], velocity uniform in [-v_u, v_u],
    azimuth and elevation uniform over the sector spanned by the grid.
    Arrival angles are set equal to departure angles (only departure
    matters for first-antenna frames).
    """
    d_u, v_u = unambiguous_limits(ofdm)
    az_max = float(np.max(np.abs(grid.azimuths())))
    el_max = float(np.max(grid.elevations()))
    d = d_u * (1.0 - rng.random())
    v = rng.uniform(-v_u, v_u)
    az = rng.uniform(-az_max, az_max)
    el = rng.uniform(0.0, el_max)
    return Target(
        bistatic_range_m=d,
        radial_velocity_mps=v,
        arrival_azimuth=az,
        arrival_elevation=el,
        departure_azimuth=az,
        departure_elevation=el,
        rcs_m2=rcs_m2,
        tx_distance_m=d / 2.0,
        rx_distance_m=d / 2.0,
    )


def solve_tx_power(
    scenario: MonteCarloScenario, target: Target, precoder_matrix: np.ndarray
) -> float:
    """Transmit power that puts the best beam at the scenario's receive SNR."""
    m = scenario.array_cfg.n_elements
    a_dep = steering_vector(scenario.array_cfg, target.departure_azimuth, target.departure_elevation)
    g_best = float(np.abs(a_dep @ precoder_matrix).max()) * math.sqrt(m)
    beta = path_gain_beta(target, scenario.ofdm.wavelength_m)
    noise = scenario.noise_power_w if scenario.noise_power_w > 0 else 1.0
    return scenario.snr_r * noise * m / (beta * g_best**2)


def _beam_pafs(samples: np.ndarray, profile: ProfileConfig) -> np.ndarray:
    """Normalized peak-to-average statistic per beam from stacked frames.

    Runs in single precision: the statistic is a peak-over-mean ratio a
    few orders above the float32 resolution, and the Monte Carlo loops
    are transform-bound.
    """
    mags = profile_magnitudes(samples.astype(np.complex64), profile.n_fft, profile.l_fft)
    peaks = mags.max(axis=(-2, -1)).astype(np.float64)
    sums = mags.sum(axis=(-2, -1), dtype=np.float64)
    ratios = np.divide(peaks, sums, out=np.zeros_like(peaks), where=sums > 0)
    return ratios * (profile.n_fft * profile.l_fft) / PAF_SCALE


def _trial_statistic(
    scenario: MonteCarloScenario,
    grid: BeamGrid,
    f: np.ndarray,
    mask: SsbMask,
    active: np.ndarray,
    rng: np.random.Generator,
    with_target: bool,
) -> float:
    """Max normalized peak-to-average over the active beams of one trial."""
    if active.size == 0:
        return 0.0
    if with_target:
        target = draw_surveillance_target(rng, grid, scenario.ofdm, scenario.rcs_m2)
        rho = solve_tx_power(scenario, target, f)
        targets: tuple[Target, ...] = (target,)
    else:
        rho = scenario.ofdm.tx_power_per_symbol_w
        targets = ()
    scene = Scene(
        targets=targets,
        noise_power_w=scenario.noise_power_w,
        ofdm=replace(scenario.ofdm, tx_power_per_symbol_w=rho),
        array_cfg=scenario.array_cfg,
        fluctuation=scenario.fluctuation,
    )
    frames = synthesize_rx_frames(scene, grid, f, mask, rng, beam_indices=active)
    samples = np.stack([fr.samples for fr in frames])
    return float(_beam_pafs(samples, scenario.profile).max())


def _active_beams(rng: np.random.Generator, n_beams: int, policy: DeactivationPolicy) -> np.ndarray:
    n_off = policy.n_deactivated(n_beams)
    off = rng.choice(n_beams, size=n_off, replace=False)
    return np.setdiff1d(np.arange(n_beams), off)


def _run_trials(
    scenario: MonteCarloScenario, trials: int, policy: DeactivationPolicy, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial statistics under target-present and noise-only hypotheses.

    Trial i draws its beam-deactivation set once and applies it to both
    hypotheses, so paired comparisons share the active-beam draw.
    """
    grid, f, mask = scenario.build()
    n_beams = len(grid)
    s_h1 = np.empty(trials)
    s_h0 = np.empty(trials)
    for i in range(trials):
        active = _active_beams(rng_for(seed, _STREAM_DEACT, policy.stream, i), n_beams, policy)
        s_h1[i] = _trial_statistic(scenario, grid, f, mask, active, rng_for(seed, _STREAM_H1, i), True)
        s_h0[i] = _trial_statistic(scenario, grid, f, mask, active, rng_for(seed, _STREAM_H0, i), False)
    return s_h1, s_h0


def binomial_se(p: float, n: int) -> float:
    """Standard error of an empirical proportion."""
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


def monte_carlo_pd_pfa(
    scenario: MonteCarloScenario,
    gamma: float,
    trials: int,
    policy: DeactivationPolicy | None = None,
    seed: int = 0,
) -> tuple[float, float, dict]:
    """Detection and false-alarm probabilities at one operating point.

    Each trial independently draws the scattering amplitude, noise, and
    the deactivated beam subset; false-alarm trials are pure noise with
    the same per-trial deactivation draw.  Returns (Pd, Pfa, counts) with
    raw counts for confidence intervals.
    """
    if trials < 1:
        raise ConfigurationError("need at least one trial")
    if policy is None:
        policy = DeactivationPolicy()
    s_h1, s_h0 = _run_trials(scenario, trials, policy, seed)
    n_d = int((s_h1 > gamma).sum())
    n_fa = int((s_h0 > gamma).sum())
    counts = {"h1_detections": n_d, "h0_false_alarms": n_fa, "trials": trials}
    return n_d / trials, n_fa / trials, counts


def deactivation_sweep(
    scenario: MonteCarloScenario,
    gammas: list[float],
    fractions: list[float],
    trials: int,
    seed: int = 0,
) -> list[dict]:
    """Pd/Pfa over a (threshold x deactivation-fraction) grid.

    Per fraction, the per-trial statistics are computed once and every
    threshold row derives from them, so a row at fraction f and threshold
    g matches a direct monte_carlo_pd_pfa call with the same seed.
    """
    rows = []
    for fraction in fractions:
        policy = DeactivationPolicy(fraction=fraction)
        s_h1, s_h0 = _run_trials(scenario, trials, policy, seed)
        for gamma in gammas:
            pd = float((s_h1 > gamma).mean())
            pfa = float((s_h0 > gamma).mean())
            rows.append(
                {
                    "gamma": float(gamma),
                    "fraction": float(fraction),
                    "trials": trials,
                    "pd": pd,
                    "pd_se": binomial_se(pd, trials),
                    "pfa": pfa,
                    "pfa_se": binomial_se(pfa, trials),
                }
            )
    return rows
