"""Closed-form estimation bounds for bistatic range and radial velocity.

For a single-target block observed at a given receive SNR, the Fisher
information of (range, velocity) has closed-form entries in the block
size, subcarrier spacing, and carrier wavelength, and its inverse gives
the variance lower bounds.  Subcarrier and symbol indices enter the
information sums 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ssbsense.constants import SPEED_OF_LIGHT
from ssbsense.errors import ConfigurationError
from ssbsense.units import db_to_linear


@dataclass(frozen=True)
class CrbInputs:
    """Block size, numerology, and linear receive SNR for the bound."""

    n: int
    l: int
    subcarrier_spacing_hz: float = 60e3
    carrier_hz: float = 15e9
    snr_r: float = 1.0

    def __post_init__(self):
        if self.n < 1 or self.l < 1:
            raise ConfigurationError("block dimensions must be at least 1")
        if self.snr_r <= 0:
            raise ConfigurationError("snr_r must be positive")
        if self.subcarrier_spacing_hz <= 0 or self.carrier_hz <= 0:
            raise ConfigurationError("frequencies must be positive")
        if 7 * self.n * self.l - self.n - self.l - 5 <= 0:
            raise ConfigurationError(
                f"degenerate information matrix for N={self.n}, L={self.l}"
            )

    @property
    def symbol_duration_s(self) -> float:
        return 1.0 / self.subcarrier_spacing_hz

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz


@dataclass(frozen=True)
class CrbResult:
    """Information matrix, its inverse, and the diagonal variance bounds."""

    fim: np.ndarray
    crb: np.ndarray
    var_d: float   # m^2
    var_v: float   # (m/s)^2


def snr_r_from_link(
    tx_power_w: float, path_gain: float, beam_gain: float, noise_power_w: float, n_elements: int
) -> float:
    """Receive SNR from link quantities: rho * beta * g^2 / (sigma_n^2 * M)."""
    if noise_power_w <= 0 or n_elements < 1:
        raise ConfigurationError("need positive noise power and at least one element")
    return tx_power_w * path_gain * beam_gain**2 / (noise_power_w * n_elements)


def fim(inputs: CrbInputs) -> np.ndarray:
    """2x2 Fisher information of (range, velocity), closed form."""
    n, l, s = inputs.n, inputs.l, inputs.snr_r
    fd = inputs.subcarrier_spacing_hz
    ts = inputs.symbol_duration_s
    lam = inputs.wavelength_m
    c = SPEED_OF_LIGHT
    pi2 = math.pi**2
    f_dd = (4.0 / 3.0) * pi2 * s * (fd**2 / c**2) * n * l * (n + 1) * (2 * n + 1)
    f_vv = (16.0 / 3.0) * pi2 * s * (ts**2 / lam**2) * n * l * (l + 1) * (2 * l + 1)
    f_dv = -4.0 * pi2 * s * (1.0 / (c * lam)) * n * l * (n + 1) * (l + 1)
    return np.array([[f_dd, f_dv], [f_dv, f_vv]])


def crb_closed_form(inputs: CrbInputs) -> CrbResult:
    """Closed-form inverse of the information matrix.

    var_d = 3 T_s^2 c^2 (2L+1) / (pi^2 SNR_r N L (7NL-N-L-5) (N+1)),
    var_v = 3 lambda^2 f_delta^2 (2N+1) / (4 pi^2 SNR_r N L (7NL-N-L-5) (L+1)),
    off-diagonal = (3 / (pi^2 SNR_r N L (7NL-N-L-5))) * (3/4) lambda c.
    """
    n, l, s = inputs.n, inputs.l, inputs.snr_r
    fd = inputs.subcarrier_spacing_hz
    ts = inputs.symbol_duration_s
    lam = inputs.wavelength_m
    c = SPEED_OF_LIGHT
    denom = 7 * n * l - n - l - 5
    pref = 3.0 / (math.pi**2 * s * n * l * denom)
    var_d = pref * ts**2 * c**2 * (2 * l + 1) / (n + 1)
    var_v = pref * 0.25 * lam**2 * fd**2 * (2 * n + 1) / (l + 1)
    off = pref * 0.75 * lam * c
    crb = np.array([[var_d, off], [off, var_v]])
    return CrbResult(fim=fim(inputs), crb=crb, var_d=var_d, var_v=var_v)


def crb_curves(
    block_sizes: list[tuple[int, int]],
    snr_db_grid: list[float],
    subcarrier_spacing_hz: float = 60e3,
    carrier_hz: float = 15e9,
) -> list[dict]:
    """Root-bound curves over an SNR grid for several block sizes.

    One row per (N, L, snr_db) with rmse_d = sqrt(var_d) and
    rmse_v = sqrt(var_v).
    """
    rows = []
    for n, l in block_sizes:
        for snr_db in snr_db_grid:
            res = crb_closed_form(
                CrbInputs(
                    n=n,
                    l=l,
                    subcarrier_spacing_hz=subcarrier_spacing_hz,
                    carrier_hz=carrier_hz,
                    snr_r=db_to_linear(snr_db),
                )
            )
            rows.append(
                {
                    "n": n,
                    "l": l,
                    "snr_db": float(snr_db),
                    "rmse_d": math.sqrt(res.var_d),
                    "rmse_v": math.sqrt(res.var_v),
                }
            )
    return rows
