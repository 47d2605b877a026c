"""Independent oracle implementations used by the unit and acceptance tests.

These deliberately avoid the library's computation paths: the transform
oracle is a literal double-loop DFT, and the information-matrix oracle
differentiates the mean vector numerically.
"""

import math

import numpy as np

from ssbsense.constants import SPEED_OF_LIGHT


def brute_force_profile(z: np.ndarray, n_fft: int, l_fft: int) -> np.ndarray:
    """Double-loop evaluation of the zero-padded transform magnitudes."""
    n, l = z.shape
    out = np.zeros((n_fft, l_fft))
    for n_out in range(n_fft):
        for l_out in range(l_fft):
            acc = 0.0 + 0.0j
            for nn in range(n):
                for ll in range(l):
                    acc += (
                        z[nn, ll]
                        * np.exp(-2j * np.pi * l_out * ll / l_fft)
                        * np.exp(2j * np.pi * n_out * nn / n_fft)
                    )
            out[n_out, l_out] = abs(acc)
    return out


def mean_vector(d: float, v: float, n: int, l: int, subcarrier_spacing_hz: float, carrier_hz: float, snr_r: float) -> np.ndarray:
    """Noise-free mean of the flattened single-target block, unit noise power.

    Subcarrier and symbol indices run 1-based; the deterministic amplitude
    absorbs the link budget so that |amplitude|^2 equals the receive SNR.
    """
    wavelength = SPEED_OF_LIGHT / carrier_hz
    symbol_duration = 1.0 / subcarrier_spacing_hz
    n_idx = np.arange(1, n + 1)
    l_idx = np.arange(1, l + 1)
    phase_n = np.exp(-2j * np.pi * n_idx * subcarrier_spacing_hz * d / SPEED_OF_LIGHT)
    phase_l = np.exp(4j * np.pi * v * l_idx * symbol_duration / wavelength)
    return math.sqrt(snr_r) * np.outer(phase_n, phase_l).ravel()


def finite_difference_fim(
    n: int,
    l: int,
    subcarrier_spacing_hz: float,
    carrier_hz: float,
    snr_r: float,
    d: float = 123.4,
    v: float = -17.2,
    step_d: float = 1e-3,
    step_v: float = 1e-2,
) -> np.ndarray:
    """Numerical 2x2 information matrix: 2 Re{ d_mu^H C^-1 d_mu } with C = I.

    Central differences; the steps keep the quadratic truncation error a
    few orders below the comparison tolerance at the default block sizes.
    """

    def mu(dd, vv):
        return mean_vector(dd, vv, n, l, subcarrier_spacing_hz, carrier_hz, snr_r)

    grad_d = (mu(d + step_d, v) - mu(d - step_d, v)) / (2.0 * step_d)
    grad_v = (mu(d, v + step_v) - mu(d, v - step_v)) / (2.0 * step_v)
    grads = (grad_d, grad_v)
    out = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            out[i, j] = 2.0 * float(np.real(np.vdot(grads[i], grads[j])))
    return out
