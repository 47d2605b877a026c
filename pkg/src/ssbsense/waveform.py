"""OFDM grid parameters, block timing, and the synchronization-block occupancy mask.

A sensing frame is an N-subcarrier by L-symbol OFDM block.  The occupancy
mask marks which resource elements actually carry a transmitted symbol;
the standard synchronization block nulls part of the grid (the receiver
still collects noise there).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ssbsense.constants import SPEED_OF_LIGHT
from ssbsense.errors import ConfigurationError


@dataclass(frozen=True)
class OfdmFrameConfig:
    """OFDM block parameters.

    The symbol duration is derived as 1/subcarrier_spacing so that
    T_s * f_delta == 1 holds exactly.  ``cyclic_prefix_s`` defaults to 7%
    of the symbol duration when not given.
    """

    n_subcarriers: int = 240
    n_symbols: int = 4
    subcarrier_spacing_hz: float = 60e3
    carrier_hz: float = 15e9
    cyclic_prefix_s: float | None = None
    tx_power_per_symbol_w: float = 1.0

    def __post_init__(self):
        if self.n_subcarriers < 1 or self.n_symbols < 1:
            raise ConfigurationError(
                f"block needs at least one subcarrier and one symbol, got "
                f"{self.n_subcarriers}x{self.n_symbols}"
            )
        if self.subcarrier_spacing_hz <= 0:
            raise ConfigurationError("subcarrier spacing must be positive")
        if self.carrier_hz <= 0:
            raise ConfigurationError("carrier frequency must be positive")
        if self.cyclic_prefix_s is None:
            object.__setattr__(self, "cyclic_prefix_s", 0.07 / self.subcarrier_spacing_hz)
        if self.cyclic_prefix_s < 0:
            raise ConfigurationError("cyclic prefix must be non-negative")
        if self.tx_power_per_symbol_w < 0:
            raise ConfigurationError("transmit power must be non-negative")

    @property
    def symbol_duration_s(self) -> float:
        return 1.0 / self.subcarrier_spacing_hz

    @property
    def total_symbol_s(self) -> float:
        """Symbol plus cyclic prefix."""
        return self.symbol_duration_s + self.cyclic_prefix_s

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz


@dataclass(frozen=True)
class SweepTiming:
    """Burst-set duration and repetition period of the beam sweep, in seconds."""

    burst_set_period_s: float = 5e-3
    ssb_periodicity_s: float = 20e-3

    def __post_init__(self):
        if not 0 < self.burst_set_period_s <= self.ssb_periodicity_s:
            raise ConfigurationError(
                "need 0 < burst_set_period_s <= ssb_periodicity_s, got "
                f"{self.burst_set_period_s} / {self.ssb_periodicity_s}"
            )


class SsbMask:
    """Boolean occupancy mask over the N x L resource grid.

    True marks a resource element that carries a transmitted symbol.
    """

    def __init__(self, values: np.ndarray):
        values = np.asarray(values, dtype=bool)
        if values.ndim != 2:
            raise ConfigurationError(f"mask must be 2-D (subcarriers x symbols), got shape {values.shape}")
        self.values = values

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def n_active(self) -> int:
        return int(self.values.sum())

    def apply(self, frame: np.ndarray) -> np.ndarray:
        """Zero the masked-out resource elements of a frame (idempotent)."""
        if frame.shape[-2:] != self.values.shape:
            raise ConfigurationError(f"frame shape {frame.shape} does not match mask {self.values.shape}")
        return frame * self.values

    @classmethod
    def full(cls, cfg: OfdmFrameConfig) -> "SsbMask":
        """All-true mask: every resource element transmitted."""
        return cls(np.ones((cfg.n_subcarriers, cfg.n_symbols), dtype=bool))


def default_ssb_mask(cfg: OfdmFrameConfig) -> SsbMask:
    """Occupancy of the standard 240 x 4 synchronization block.

    Symbol 0 carries the primary sync sequence on the 127 centered
    subcarriers 56..182; symbols 1 and 3 are fully occupied broadcast
    symbols; symbol 2 carries broadcast side bands on subcarriers 0..47
    and 192..239 around the secondary sync sequence on 56..182.
    """
    if (cfg.n_subcarriers, cfg.n_symbols) != (240, 4):
        raise ConfigurationError(
            f"the standard sync-block layout needs a 240x4 grid, got "
            f"{cfg.n_subcarriers}x{cfg.n_symbols}"
        )
    mask = np.zeros((240, 4), dtype=bool)
    mask[56:183, 0] = True          # PSS
    mask[:, 1] = True               # PBCH
    mask[0:48, 2] = True            # PBCH side band
    mask[192:240, 2] = True         # PBCH side band
    mask[56:183, 2] = True          # SSS
    mask[:, 3] = True               # PBCH
    return SsbMask(mask)


def mask_from_text(text: str, cfg: OfdmFrameConfig, source: str = "<mask>") -> SsbMask:
    """Parse a mask override: L lines of N characters, '1' active / '0' inactive."""
    lines = [line for line in text.splitlines() if line.strip() != ""]
    if len(lines) != cfg.n_symbols:
        raise ConfigurationError(f"{source}: expected {cfg.n_symbols} lines, found {len(lines)}")
    mask = np.zeros((cfg.n_subcarriers, cfg.n_symbols), dtype=bool)
    for l, line in enumerate(lines):
        if len(line) != cfg.n_subcarriers or set(line) - {"0", "1"}:
            raise ConfigurationError(
                f"{source}: line {l + 1} must be {cfg.n_subcarriers} characters of '0'/'1'"
            )
        mask[:, l] = np.frombuffer(line.encode("ascii"), dtype=np.uint8) == ord("1")
    return SsbMask(mask)


def load_mask_file(path: str | os.PathLike, cfg: OfdmFrameConfig) -> SsbMask:
    """Read a mask override file (see mask_from_text for the format)."""
    try:
        with open(path, "r", encoding="ascii") as f:
            text = f.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigurationError(f"cannot read mask file {path}: {exc}") from exc
    return mask_from_text(text, cfg, source=str(path))


def sensing_overhead_percent(timing: SweepTiming, r_beams: int, total_symbol_s: float) -> float:
    """Fraction of the duplexing frame spent on sensing reception, in percent.

    Equals 4 * 100 * R * T / T_SP for R swept beams of four T-second
    symbols each, repeated every sweep period.
    """
    if r_beams < 0:
        raise ConfigurationError("beam count must be non-negative")
    return 4.0 * 100.0 * r_beams * total_symbol_s / timing.ssb_periodicity_s
