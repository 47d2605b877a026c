"""Planar-array geometry: steering vectors, the sweep-beam grid, and beamforming gain.

The transmit array is a uniform planar array (UPA) with half-wavelength
element spacing.  Sweep beams live on a fixed grid of directions indexed
by an integer q, with sines spaced by 2/sqrt(M); the surveillance subset
keeps only non-negative elevations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ssbsense.errors import ConfigurationError


@dataclass(frozen=True)
class ArrayConfig:
    """Uniform planar array, half-wavelength spacing.

    m_h antennas per row (horizontal), m_v antennas per column (vertical).
    The sweep-beam grid additionally requires a square layout (m_h == m_v);
    steering vectors and gains work for any rectangular layout.
    """

    m_h: int
    m_v: int

    def __post_init__(self):
        if self.m_h < 1 or self.m_v < 1:
            raise ConfigurationError(f"array needs at least one element per axis, got {self.m_h}x{self.m_v}")

    @property
    def n_elements(self) -> int:
        return self.m_h * self.m_v


@dataclass(frozen=True)
class BeamAngle:
    """One sweep direction: angles in radians plus its integer grid indices."""

    azimuth: float
    elevation: float
    q_az: int
    q_el: int


@dataclass(frozen=True)
class BeamGrid:
    """Ordered sweep directions, row-major over (q_el, q_az) ascending."""

    beams: tuple[BeamAngle, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.beams)

    @property
    def surveillance_count(self) -> int:
        """Number of beams with non-negative elevation."""
        return sum(1 for b in self.beams if b.q_el >= 0)

    def azimuths(self) -> np.ndarray:
        return np.array([b.azimuth for b in self.beams])

    def elevations(self) -> np.ndarray:
        return np.array([b.elevation for b in self.beams])


def _check_angle(name: str, value: float) -> None:
    if not -math.pi / 2 < value < math.pi / 2:
        raise ValueError(f"{name} must lie in (-pi/2, pi/2), got {value!r}")


def steering_vector(cfg: ArrayConfig, azimuth: float, elevation: float) -> np.ndarray:
    """Array response toward (azimuth, elevation), both in radians.

    Element (row p, column m) has phase -pi*(p*sin(el) + m*sin(az)*cos(el)),
    i.e. the Kronecker product of the vertical response with the horizontal
    response; ordering is vertical-major.  Every entry has unit modulus.

    Returns
    -------
    Complex vector of length m_v * m_h.
    """
    _check_angle("azimuth", azimuth)
    _check_angle("elevation", elevation)
    a_h = np.exp(-1j * np.pi * np.arange(cfg.m_h) * (math.sin(azimuth) * math.cos(elevation)))
    a_v = np.exp(-1j * np.pi * np.arange(cfg.m_v) * math.sin(elevation))
    return np.kron(a_v, a_h)


def beam_grid(cfg: ArrayConfig, surveillance_only: bool = False) -> BeamGrid:
    """Sweep-beam direction set for a square array.

    Each axis takes angles arcsin(2q/sqrt(M)) for q in
    [0, +-1, ..., floor(sqrt(M)/2 - 1)]; the full grid is the Cartesian
    product of azimuth and elevation choices.  With ``surveillance_only``
    only rows with elevation >= 0 are kept.
    """
    if cfg.m_h != cfg.m_v:
        raise ConfigurationError(
            f"the sweep-beam grid requires a square array, got {cfg.m_h}x{cfg.m_v}"
        )
    root_m = cfg.m_h  # sqrt(M) for a square layout
    q_max = root_m // 2 - 1
    qs = range(-q_max, q_max + 1)
    q_els = [q for q in qs if q >= 0] if surveillance_only else list(qs)
    beams = [
        BeamAngle(
            azimuth=math.asin(2.0 * q_az / root_m),
            elevation=math.asin(2.0 * q_el / root_m),
            q_az=q_az,
            q_el=q_el,
        )
        for q_el in q_els
        for q_az in qs
    ]
    return BeamGrid(beams=tuple(beams))


def precoder(grid: BeamGrid, cfg: ArrayConfig) -> np.ndarray:
    """Normalized precoding matrix, one unit-norm column per beam.

    Column r is conj(steering_vector(beam r)) / sqrt(M), shape (M, R).
    """
    m = cfg.n_elements
    cols = [np.conj(steering_vector(cfg, b.azimuth, b.elevation)) / math.sqrt(m) for b in grid.beams]
    return np.stack(cols, axis=1)


def beam_gain(
    cfg: ArrayConfig,
    target_azimuth: float,
    target_elevation: float,
    beam_azimuth: float,
    beam_elevation: float,
) -> complex:
    """Beamforming gain of one beam toward a target direction.

    g = a(target)^T conj(a(beam)); |g| <= M with equality iff the
    directions coincide.  Computed straight from steering vectors so
    off-grid targets are supported.
    """
    a_t = steering_vector(cfg, target_azimuth, target_elevation)
    a_b = steering_vector(cfg, beam_azimuth, beam_elevation)
    return complex(a_t @ np.conj(a_b))
