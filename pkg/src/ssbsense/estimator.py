"""Range-velocity profiles, peak-to-average beam selection, and peak estimates.

One beam's frame is turned into a non-negative N' x L' profile by a
zero-padded symbol-axis FFT and subcarrier-axis inverse FFT; a target
appears as a peak whose row maps to bistatic range and whose column maps
to radial velocity.  Beams worth combining are picked by the profile's
peak-to-average factor; the selected profiles are averaged and the
global peak read off.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass

import numpy as np
import scipy.fft

from ssbsense.channel import RxBeamFrame
from ssbsense.constants import SPEED_OF_LIGHT
from ssbsense.errors import ConfigurationError

PAF_SCALE = 1.1544
"""Noise calibration of the thresholded peak-to-average statistic.

The statistic compared against the aggregation and detection thresholds
is (peak / mean cell magnitude) / PAF_SCALE.  The constant is pinned by
an offline noise-only run of the default configuration (240x4 block,
960x64 profile, 45 beams) so that the default detection threshold of 4
yields a false-alarm probability of 0.03 for the max over all beams.
"""


@dataclass(frozen=True)
class ProfileConfig:
    """Transform sizes: n_fft rows (range axis), l_fft columns (velocity axis).

    Both must strictly exceed the frame dimensions (zero padding).
    """

    n_fft: int = 960
    l_fft: int = 64

    def __post_init__(self):
        if self.n_fft < 2 or self.l_fft < 2:
            raise ConfigurationError("transform sizes must be at least 2")

    @classmethod
    def for_block(cls, n_subcarriers: int, n_symbols: int, n_factor: int = 4, l_factor: int = 16) -> "ProfileConfig":
        return cls(n_fft=n_factor * n_subcarriers, l_fft=l_factor * n_symbols)


@dataclass
class RangeVelocityProfile:
    """Non-negative magnitude surface with its bin-to-physical mapping."""

    values: np.ndarray
    range_per_bin_m: float
    velocity_per_bin_mps: float

    @property
    def n_cells(self) -> int:
        return self.values.size


@dataclass
class PafVector:
    """Per-beam raw peak-to-sum ratios plus the cell count for normalization."""

    values: np.ndarray
    n_cells: int

    @property
    def normalized(self) -> np.ndarray:
        """Thresholded statistic: peak over mean cell, noise-calibrated."""
        return self.values * self.n_cells / PAF_SCALE

    def __len__(self) -> int:
        return len(self.values)


def profile_magnitudes(samples: np.ndarray, n_fft: int, l_fft: int) -> np.ndarray:
    """Zero-padded transform magnitudes of one or more frames.

    ``samples`` has shape (..., N, L); the result has shape
    (..., n_fft, l_fft) with entry

        | sum_n sum_l Z[n, l] exp(-j 2 pi l' l / l_fft) exp(+j 2 pi n' n / n_fft) |.
    """
    n, l = samples.shape[-2], samples.shape[-1]
    if n_fft <= n or l_fft <= l:
        raise ConfigurationError(
            f"transform sizes ({n_fft}, {l_fft}) must exceed the frame size ({n}, {l})"
        )
    # precision follows the input dtype (complex64 in the Monte Carlo loops)
    spec = scipy.fft.ifft(
        scipy.fft.fft(samples, n=l_fft, axis=-1, workers=-1), n=n_fft, axis=-2, workers=-1
    )
    out = np.abs(spec)
    out *= n_fft
    return out


def range_velocity_profile(frame: RxBeamFrame, cfg: ProfileConfig) -> RangeVelocityProfile:
    """Range-velocity profile of one beam's frame.

    Rows step by c*T_s/n_fft meters of bistatic range; columns step by
    f_delta*lambda/(2*l_fft) meters/second of radial velocity, with the
    upper half of the columns aliasing to negative velocities.
    """
    values = profile_magnitudes(frame.samples, cfg.n_fft, cfg.l_fft)
    ofdm = frame.ofdm
    return RangeVelocityProfile(
        values=values,
        range_per_bin_m=SPEED_OF_LIGHT * ofdm.symbol_duration_s / cfg.n_fft,
        velocity_per_bin_mps=ofdm.subcarrier_spacing_hz * ofdm.wavelength_m / (2.0 * cfg.l_fft),
    )


def paf(profile: RangeVelocityProfile) -> float:
    """Raw peak-to-sum ratio of a profile; 0 for an all-zero profile."""
    total = profile.values.sum()
    if total == 0.0:
        return 0.0
    return float(profile.values.max() / total)


def paf_vector(profiles: list[RangeVelocityProfile]) -> PafVector:
    """Raw peak-to-sum ratios of several same-shaped profiles."""
    if not profiles:
        raise ConfigurationError("need at least one profile")
    cells = profiles[0].n_cells
    if any(p.n_cells != cells for p in profiles):
        raise ConfigurationError("profiles must share a common shape")
    return PafVector(values=np.array([paf(p) for p in profiles]), n_cells=cells)


def aggregate(
    profiles: list[RangeVelocityProfile], gamma_a: float
) -> tuple[RangeVelocityProfile, np.ndarray]:
    """Average the beams whose normalized peak-to-average exceeds gamma_a.

    Returns the element-wise mean profile over the selected index set and
    the set itself.  If no beam passes the threshold, falls back to the
    single beam with the largest ratio so the result is never empty.
    """
    pafs = paf_vector(profiles)
    selected = np.flatnonzero(pafs.normalized > gamma_a)
    if selected.size == 0:
        selected = np.array([int(np.argmax(pafs.values))])
    stacked = np.stack([profiles[i].values for i in selected])
    return (
        RangeVelocityProfile(
            values=stacked.mean(axis=0),
            range_per_bin_m=profiles[0].range_per_bin_m,
            velocity_per_bin_mps=profiles[0].velocity_per_bin_mps,
        ),
        selected,
    )


def estimate_range_velocity(profile: RangeVelocityProfile) -> tuple[float, float, int, int]:
    """Peak location of a profile as physical estimates.

    Returns (d_hat, v_hat, n_hat, l_hat).  Ties at the maximum break to
    the smallest row, then smallest column.  Columns above l_fft/2 map to
    negative velocities.
    """
    flat = int(np.argmax(profile.values))
    n_hat, l_hat = np.unravel_index(flat, profile.values.shape)
    l_fft = profile.values.shape[1]
    l_signed = l_hat - l_fft if l_hat > l_fft // 2 else l_hat
    return (
        n_hat * profile.range_per_bin_m,
        l_signed * profile.velocity_per_bin_mps,
        int(n_hat),
        int(l_hat),
    )


def profile_to_csv(profile: RangeVelocityProfile) -> str:
    """Serialize a profile: '#' metadata line, then one row per range bin."""
    buf = io.StringIO()
    meta = {
        "range_per_bin_m": profile.range_per_bin_m,
        "velocity_per_bin_mps": profile.velocity_per_bin_mps,
        "shape": list(profile.values.shape),
    }
    buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    for row in profile.values:
        buf.write(",".join(repr(float(x)) for x in row) + "\n")
    return buf.getvalue()


def parse_profile_csv(text: str) -> RangeVelocityProfile:
    """Inverse of profile_to_csv."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise ConfigurationError("profile CSV must start with a '#' metadata line")
    meta = json.loads(lines[0][1:])
    values = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    if list(values.shape) != meta["shape"]:
        raise ConfigurationError(f"profile CSV shape {values.shape} != declared {meta['shape']}")
    return RangeVelocityProfile(
        values=values,
        range_per_bin_m=meta["range_per_bin_m"],
        velocity_per_bin_mps=meta["velocity_per_bin_mps"],
    )
