"""Bistatic echo synthesis: the received frames after symbol removal and direct-link cancellation.

Each swept beam yields one N x L complex frame at the sensing receiver.
A target echo contributes a rank-one phase ramp: linear phase across
subcarriers from the bistatic delay and across symbols from Doppler,
weighted by the transmit beamforming gain toward the target, the
two-hop path gain, and a scattering amplitude.  Scattering follows a
slow-fluctuation model: one zero-mean unit-variance complex Gaussian
draw per target per sweep, constant over the whole block and over all
beams of the sweep.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from ssbsense.array import ArrayConfig, BeamGrid, steering_vector
from ssbsense.constants import SPEED_OF_LIGHT
from ssbsense.errors import ConfigurationError
from ssbsense.units import dbm_to_watt
from ssbsense.waveform import OfdmFrameConfig, SsbMask

FLUCTUATION_MODELS = ("swerling1", "fixed")


@dataclass(frozen=True)
class Target:
    """Point scatterer.  Angles in radians; bistatic range is the summed
    transmitter-target-receiver path length."""

    bistatic_range_m: float
    radial_velocity_mps: float
    arrival_azimuth: float = 0.0
    arrival_elevation: float = 0.0
    departure_azimuth: float = 0.0
    departure_elevation: float = 0.0
    rcs_m2: float = 0.1
    tx_distance_m: float = 150.0
    rx_distance_m: float = 150.0

    def __post_init__(self):
        if self.bistatic_range_m < 0:
            raise ValueError("bistatic range must be non-negative")
        if self.tx_distance_m <= 0 or self.rx_distance_m <= 0:
            raise ValueError("tx/rx distances must be positive")
        if self.rcs_m2 <= 0:
            raise ValueError("radar cross section must be positive")


@dataclass(frozen=True)
class Scene:
    """Targets plus the radio configuration for one synthesized sweep.

    ``noise_power_w`` may be zero for noiseless test scenes.
    ``fluctuation`` selects the scattering amplitude model: "swerling1"
    draws one complex Gaussian per target per sweep, "fixed" uses
    amplitude 1 (deterministic cross section).  ``direct_leakage`` is a
    residual linear amplitude factor of the cancelled direct link
    (0 = perfect cancellation); the residual appears as a static ray at
    ``direct_range_m`` with zero Doppler.
    """

    targets: tuple[Target, ...] = field(default_factory=tuple)
    noise_power_w: float = dbm_to_watt(-94.0)
    ofdm: OfdmFrameConfig = field(default_factory=OfdmFrameConfig)
    array_cfg: ArrayConfig = field(default_factory=lambda: ArrayConfig(10, 10))
    rng_seed: int = 0
    fluctuation: str = "swerling1"
    direct_leakage: float = 0.0
    direct_range_m: float = 0.0

    def __post_init__(self):
        if self.noise_power_w < 0:
            raise ConfigurationError("noise power must be non-negative")
        if self.fluctuation not in FLUCTUATION_MODELS:
            raise ConfigurationError(f"unknown fluctuation model {self.fluctuation!r}")
        if self.direct_leakage < 0:
            raise ConfigurationError("direct-link leakage factor must be non-negative")


@dataclass
class RxBeamFrame:
    """Received frame of one beam: first-antenna N x L samples.

    ``tensor`` holds the full per-antenna (M, N, L) block when the
    synthesis was asked for it; ``samples`` is always its first-antenna
    slice.
    """

    beam_index: int
    samples: np.ndarray
    ofdm: OfdmFrameConfig
    tensor: np.ndarray | None = None


def path_gain_beta(target: Target, wavelength_m: float) -> float:
    """Two-hop large-scale power gain of an echo.

    beta = wavelength^2 * rcs / ((4 pi)^3 * d_tx^2 * d_rx^2), linear.
    """
    if target.tx_distance_m <= 0 or target.rx_distance_m <= 0:
        raise ValueError("tx/rx distances must be positive")
    return (
        wavelength_m**2
        * target.rcs_m2
        / ((4.0 * math.pi) ** 3 * target.tx_distance_m**2 * target.rx_distance_m**2)
    )


def draw_swerling1(rng: np.random.Generator, k: int) -> np.ndarray:
    """One slow-fluctuation scattering amplitude per target.

    Circularly-symmetric complex Gaussian with unit variance
    (E|alpha|^2 = 1), held constant across the block and across beams.
    """
    return (rng.standard_normal(k) + 1j * rng.standard_normal(k)) / math.sqrt(2.0)


def unambiguous_limits(cfg: OfdmFrameConfig) -> tuple[float, float]:
    """(d_u, v_u): unambiguous bistatic range c*T_s and velocity span wavelength*f_delta/2."""
    d_u = SPEED_OF_LIGHT * cfg.symbol_duration_s
    v_u = cfg.wavelength_m * cfg.subcarrier_spacing_hz / 2.0
    return d_u, v_u


def synthesize_rx_frames(
    scene: Scene,
    grid: BeamGrid,
    precoder_matrix: np.ndarray,
    mask: SsbMask,
    rng: np.random.Generator,
    beam_indices: list[int] | np.ndarray | None = None,
    full_tensor: bool = False,
) -> list[RxBeamFrame]:
    """Synthesize the post-cancellation received frames of all (or selected) beams.

    For masked-in resource element (n, l) of beam r the sample is

        sqrt(rho) * sum_k alpha_k sqrt(beta_k) (a_dep,k^T f_r)
            * exp(-j 2 pi n f_delta d_k / c) * exp(+j 4 pi v_k l T_s / lambda)

    plus complex white noise of power ``noise_power_w`` on every resource
    element (masked-out elements are noise only).  The first-antenna
    extraction makes the arrival response enter as its unit first element;
    ask for ``full_tensor`` to get the per-antenna (M, N, L) block with the
    arrival response and per-antenna noise applied.

    Draw order (fixed for reproducibility): per-target scattering
    amplitudes first, then noise for the synthesized beams in one block.
    """
    cfg = scene.ofdm
    n, l = cfg.n_subcarriers, cfg.n_symbols
    m = scene.array_cfg.n_elements
    if precoder_matrix.shape != (m, len(grid)):
        raise ConfigurationError(
            f"precoder shape {precoder_matrix.shape} does not match array/grid "
            f"({m}, {len(grid)})"
        )
    if mask.shape != (n, l):
        raise ConfigurationError(f"mask shape {mask.shape} does not match frame ({n}, {l})")
    if beam_indices is None:
        beam_indices = np.arange(len(grid))
    else:
        beam_indices = np.asarray(beam_indices, dtype=int)

    n_idx = np.arange(n)
    l_idx = np.arange(l)
    sqrt_rho = math.sqrt(cfg.tx_power_per_symbol_w)

    k = len(scene.targets)
    if scene.fluctuation == "swerling1":
        alphas = draw_swerling1(rng, k)
    else:
        alphas = np.ones(k, dtype=complex)

    n_beams = len(beam_indices)
    signal = np.zeros((n_beams, n, l), dtype=complex)
    tensor = np.zeros((n_beams, m, n, l), dtype=complex) if full_tensor else None

    for tk, alpha in zip(scene.targets, alphas):
        a_dep = steering_vector(scene.array_cfg, tk.departure_azimuth, tk.departure_elevation)
        tx_gain = a_dep @ precoder_matrix[:, beam_indices]  # (n_beams,) = g_r / sqrt(M)
        beta = path_gain_beta(tk, cfg.wavelength_m)
        u = np.exp(-2j * np.pi * n_idx * cfg.subcarrier_spacing_hz * tk.bistatic_range_m / SPEED_OF_LIGHT)
        w = np.exp(
            4j * np.pi * tk.radial_velocity_mps * l_idx * cfg.symbol_duration_s / cfg.wavelength_m
        )
        ramp = np.outer(u, w)
        amps = sqrt_rho * alpha * math.sqrt(beta) * tx_gain
        contrib = amps[:, None, None] * ramp[None, :, :]
        signal += contrib
        if full_tensor:
            a_arr = steering_vector(scene.array_cfg, tk.arrival_azimuth, tk.arrival_elevation)
            tensor += a_arr[None, :, None, None] * contrib[:, None, :, :]

    if scene.direct_leakage > 0:
        u0 = np.exp(
            -2j * np.pi * n_idx * cfg.subcarrier_spacing_hz * scene.direct_range_m / SPEED_OF_LIGHT
        )
        residual = scene.direct_leakage * sqrt_rho * u0[:, None] * np.ones((1, l))
        signal += residual[None, :, :]
        if full_tensor:
            tensor += residual[None, None, :, :]

    signal *= mask.values
    if full_tensor:
        tensor *= mask.values

    sigma = math.sqrt(scene.noise_power_w / 2.0)
    if full_tensor:
        noise = sigma * (
            rng.standard_normal((n_beams, m, n, l)) + 1j * rng.standard_normal((n_beams, m, n, l))
        )
        tensor = tensor + noise
        samples = tensor[:, 0, :, :]
    else:
        noise = sigma * (rng.standard_normal((n_beams, n, l)) + 1j * rng.standard_normal((n_beams, n, l)))
        samples = signal + noise

    return [
        RxBeamFrame(
            beam_index=int(bi),
            samples=samples[j],
            ofdm=cfg,
            tensor=tensor[j] if full_tensor else None,
        )
        for j, bi in enumerate(beam_indices)
    ]


def scene_from_dict(data: dict) -> Scene:
    """Build a Scene from the JSON scene-file structure (angles in degrees)."""
    try:
        targets = tuple(
            Target(
                bistatic_range_m=t["bistatic_range_m"],
                radial_velocity_mps=t["radial_velocity_mps"],
                arrival_azimuth=math.radians(t.get("arrival_azimuth_deg", 0.0)),
                arrival_elevation=math.radians(t.get("arrival_elevation_deg", 0.0)),
                departure_azimuth=math.radians(t.get("departure_azimuth_deg", 0.0)),
                departure_elevation=math.radians(t.get("departure_elevation_deg", 0.0)),
                rcs_m2=t.get("rcs_m2", 0.1),
                tx_distance_m=t.get("tx_distance_m", 150.0),
                rx_distance_m=t.get("rx_distance_m", 150.0),
            )
            for t in data.get("targets", [])
        )
        ofdm_kwargs = data.get("ofdm", {})
        array_kwargs = data.get("array", {"m_h": 10, "m_v": 10})
        if data.get("noise_power_w") is not None:
            noise_w = float(data["noise_power_w"])
        else:
            noise_w = dbm_to_watt(float(data.get("noise_power_dbm", -94.0)))
        return Scene(
            targets=targets,
            noise_power_w=noise_w,
            ofdm=OfdmFrameConfig(**ofdm_kwargs),
            array_cfg=ArrayConfig(**array_kwargs),
            rng_seed=int(data.get("seed", 0)),
            fluctuation=data.get("fluctuation", "swerling1"),
            direct_leakage=float(data.get("direct_leakage", 0.0)),
            direct_range_m=float(data.get("direct_range_m", 0.0)),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigurationError(f"bad scene structure: {exc}") from exc


def load_scene(path: str | os.PathLike) -> Scene:
    """Load a scene JSON file (schema in docs/config.md)."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read scene file {path}: {exc}") from exc
    return scene_from_dict(data)
