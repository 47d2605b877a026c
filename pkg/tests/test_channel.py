import math

import numpy as np
import pytest

from ssbsense.array import steering_vector
from ssbsense.channel import (
    Scene,
    Target,
    draw_swerling1,
    load_scene,
    path_gain_beta,
    scene_from_dict,
    synthesize_rx_frames,
    unambiguous_limits,
)
from ssbsense.constants import SPEED_OF_LIGHT
from ssbsense.errors import ConfigurationError
from ssbsense.estimator import ProfileConfig, profile_magnitudes
from ssbsense.waveform import OfdmFrameConfig, SsbMask, default_ssb_mask


def _target(d=600.0, v=20.0, az=0.0, el=0.0, **kw):
    kw.setdefault("tx_distance_m", max(d / 2, 1.0))
    kw.setdefault("rx_distance_m", max(d / 2, 1.0))
    return Target(
        bistatic_range_m=d,
        radial_velocity_mps=v,
        arrival_azimuth=az,
        arrival_elevation=el,
        departure_azimuth=az,
        departure_elevation=el,
        **kw,
    )


# ---------------------------------------------------------------------------
# path gain


def test_path_gain_value():
    tk = Target(bistatic_range_m=300, radial_velocity_mps=0, rcs_m2=0.1, tx_distance_m=150, rx_distance_m=150)
    beta = path_gain_beta(tk, 0.02)
    # one-line independent evaluation
    expected = 0.02**2 * 0.1 / ((4 * math.pi) ** 3 * 150.0**2 * 150.0**2)
    assert beta == pytest.approx(expected, rel=1e-12)
    assert beta == pytest.approx(3.98e-17, rel=2e-3)


def test_path_gain_distance_law():
    near = _target(d=300.0, tx_distance_m=150, rx_distance_m=150)
    far = _target(d=600.0, tx_distance_m=300, rx_distance_m=300)
    assert path_gain_beta(near, 0.02) / path_gain_beta(far, 0.02) == pytest.approx(16.0, rel=1e-12)


def test_path_gain_vanishes_with_rcs():
    tiny = _target(rcs_m2=1e-12)
    assert 0 < path_gain_beta(tiny, 0.02) < 1e-27


def test_target_validation():
    with pytest.raises(ValueError):
        Target(bistatic_range_m=-1.0, radial_velocity_mps=0.0)
    with pytest.raises(ValueError):
        Target(bistatic_range_m=1.0, radial_velocity_mps=0.0, tx_distance_m=0.0)
    with pytest.raises(ValueError):
        Target(bistatic_range_m=1.0, radial_velocity_mps=0.0, rcs_m2=0.0)


# ---------------------------------------------------------------------------
# scattering amplitude draws


def test_swerling_moments():
    rng = np.random.default_rng(2024)
    alphas = draw_swerling1(rng, 100_000)
    assert abs(np.mean(np.abs(alphas) ** 2) - 1.0) < 0.02
    assert abs(np.var(alphas.real) - 0.5) < 0.01
    assert abs(np.var(alphas.imag) - 0.5) < 0.01


def test_swerling_seed_determinism():
    a = draw_swerling1(np.random.default_rng(5), 16)
    b = draw_swerling1(np.random.default_rng(5), 16)
    assert np.array_equal(a, b)


# ---------------------------------------------------------------------------
# unambiguous limits


def test_unambiguous_limits_values(ofdm_default):
    d_u, v_u = unambiguous_limits(ofdm_default)
    assert d_u == pytest.approx(SPEED_OF_LIGHT / 60e3)
    assert d_u == pytest.approx(4996.5, abs=0.1)
    assert v_u == pytest.approx((SPEED_OF_LIGHT / 15e9) * 60e3 / 2)
    assert v_u == pytest.approx(599.6, abs=0.1)


def test_unambiguous_limits_scaling(ofdm_default):
    doubled = OfdmFrameConfig(subcarrier_spacing_hz=120e3)
    d1, v1 = unambiguous_limits(ofdm_default)
    d2, v2 = unambiguous_limits(doubled)
    assert d2 == pytest.approx(d1 / 2)
    assert v2 == pytest.approx(2 * v1)


# ---------------------------------------------------------------------------
# frame synthesis


def test_empty_noiseless_scene_gives_zero_frames(surveillance_grid, surveillance_precoder, ofdm_default):
    scene = Scene(targets=(), noise_power_w=0.0, ofdm=ofdm_default)
    frames = synthesize_rx_frames(
        scene, surveillance_grid, surveillance_precoder, SsbMask.full(ofdm_default), np.random.default_rng(0)
    )
    assert len(frames) == 45
    assert all(np.all(fr.samples == 0) for fr in frames)


def _boresight_index(grid):
    return next(i for i, b in enumerate(grid.beams) if b.q_az == 0 and b.q_el == 0)


def test_boresight_frame_magnitude_and_phase(surveillance_grid, surveillance_precoder, ofdm_default):
    d, v = 800.0, 25.0
    tk = _target(d=d, v=v)
    scene = Scene(targets=(tk,), noise_power_w=0.0, ofdm=ofdm_default, fluctuation="fixed")
    frames = synthesize_rx_frames(
        scene, surveillance_grid, surveillance_precoder, SsbMask.full(ofdm_default), np.random.default_rng(0)
    )
    s = frames[_boresight_index(surveillance_grid)].samples
    # amplitude sqrt(rho * beta) * M / sqrt(M), constant over the block
    beta = path_gain_beta(tk, ofdm_default.wavelength_m)
    expected = math.sqrt(ofdm_default.tx_power_per_symbol_w * beta) * 100 / math.sqrt(100)
    mags = np.abs(s)
    assert mags.max() == pytest.approx(expected, rel=1e-12)
    assert mags.min() == pytest.approx(expected, rel=1e-12)
    # linear phase ramps with the stated slopes
    slope_n = np.angle(s[1, 0] / s[0, 0])
    assert slope_n == pytest.approx(-2 * math.pi * 60e3 * d / SPEED_OF_LIGHT, rel=1e-9)
    slope_l = np.angle(s[0, 1] / s[0, 0])
    assert slope_l == pytest.approx(
        4 * math.pi * v * ofdm_default.symbol_duration_s / ofdm_default.wavelength_m, rel=1e-9
    )


def test_single_target_frame_is_rank_one(surveillance_grid, surveillance_precoder, ofdm_default):
    scene = Scene(targets=(_target(d=1234.0, v=-80.0),), noise_power_w=0.0, ofdm=ofdm_default, fluctuation="fixed")
    frames = synthesize_rx_frames(
        scene, surveillance_grid, surveillance_precoder, SsbMask.full(ofdm_default), np.random.default_rng(0)
    )
    s = frames[_boresight_index(surveillance_grid)].samples
    singular = np.linalg.svd(s, compute_uv=False)
    assert singular[1] / singular[0] < 1e-9


def test_on_grid_target_peaks_at_predicted_bins(surveillance_grid, surveillance_precoder, ofdm_default):
    # discrete-orthogonality oracle: an on-grid (d, v) peaks exactly at
    # (d N' / (c T_s), v 2 L' / (f_delta lambda))
    pc = ProfileConfig(n_fft=960, l_fft=64)
    d_u, v_u = unambiguous_limits(ofdm_default)
    n0, l0 = 333, 17
    d = n0 * d_u / pc.n_fft
    v = l0 * v_u / pc.l_fft
    scene = Scene(targets=(_target(d=d, v=v),), noise_power_w=0.0, ofdm=ofdm_default, fluctuation="fixed")
    frames = synthesize_rx_frames(
        scene, surveillance_grid, surveillance_precoder, SsbMask.full(ofdm_default), np.random.default_rng(0)
    )
    mags = profile_magnitudes(frames[_boresight_index(surveillance_grid)].samples, pc.n_fft, pc.l_fft)
    assert np.unravel_index(mags.argmax(), mags.shape) == (n0, l0)
    assert n0 == round(d * pc.n_fft / (SPEED_OF_LIGHT * ofdm_default.symbol_duration_s))
    assert l0 == round(v * 2 * pc.l_fft / (60e3 * ofdm_default.wavelength_m))


def test_linearity_in_targets(surveillance_grid, surveillance_precoder, ofdm_default):
    mask = SsbMask.full(ofdm_default)
    t1 = _target(d=500.0, v=10.0, az=0.2, el=0.1)
    t2 = _target(d=1500.0, v=-40.0, az=-0.4, el=0.3)
    noise_w = 1e-18

    def synth(targets, noise, seed):
        scene = Scene(targets=targets, noise_power_w=noise, ofdm=ofdm_default, fluctuation="fixed")
        frames = synthesize_rx_frames(
            scene, surveillance_grid, surveillance_precoder, mask, np.random.default_rng(seed)
        )
        return np.stack([fr.samples for fr in frames])

    both = synth((t1, t2), noise_w, seed=42)
    only_first = synth((t1,), 0.0, seed=42)
    only_second = synth((t2,), noise_w, seed=42)  # same noise draw as `both`
    scale = np.abs(both).max()
    assert np.abs(both - (only_first + only_second)).max() / scale < 1e-12


def test_seed_determinism_bit_identical(surveillance_grid, surveillance_precoder, ofdm_default):
    scene = Scene(targets=(_target(),), ofdm=ofdm_default)
    mask = default_ssb_mask(ofdm_default)
    a = synthesize_rx_frames(scene, surveillance_grid, surveillance_precoder, mask, np.random.default_rng(99))
    b = synthesize_rx_frames(scene, surveillance_grid, surveillance_precoder, mask, np.random.default_rng(99))
    for fa, fb in zip(a, b):
        assert np.array_equal(fa.samples, fb.samples)


def test_masked_out_elements_carry_no_signal(surveillance_grid, surveillance_precoder, ofdm_default):
    mask = default_ssb_mask(ofdm_default)
    scene = Scene(targets=(_target(),), noise_power_w=0.0, ofdm=ofdm_default, fluctuation="fixed")
    frames = synthesize_rx_frames(scene, surveillance_grid, surveillance_precoder, mask, np.random.default_rng(0))
    s = frames[_boresight_index(surveillance_grid)].samples
    assert np.all(s[~mask.values] == 0)
    assert np.all(s[mask.values] != 0)


def test_snr_accounting(surveillance_grid, surveillance_precoder, ofdm_default):
    # empirical per-element signal power over scattering draws matches
    # snr_r = rho beta g^2 / (sigma^2 M) at the boresight beam
    idx = _boresight_index(surveillance_grid)
    tk = _target(d=600.0, v=0.0)
    beta = path_gain_beta(tk, ofdm_default.wavelength_m)
    noise_w = 1e-10
    snr_target = 2.0
    rho = snr_target * noise_w * 100 / (beta * 100.0**2)
    ofdm = OfdmFrameConfig(tx_power_per_symbol_w=rho)
    mask = SsbMask.full(ofdm)
    rng = np.random.default_rng(314)
    scene = Scene(targets=(tk,), noise_power_w=0.0, ofdm=ofdm, fluctuation="swerling1")
    acc = 0.0
    draws = 1000
    for _ in range(draws):
        frames = synthesize_rx_frames(
            scene, surveillance_grid, surveillance_precoder, mask, rng, beam_indices=[idx]
        )
        acc += float(np.mean(np.abs(frames[0].samples) ** 2))
    empirical = acc / draws / noise_w
    assert abs(empirical / snr_target - 1.0) < 0.05


def test_full_tensor_structure(surveillance_grid, surveillance_precoder, ofdm_default):
    tk = _target(d=900.0, v=5.0, az=0.25, el=0.15)
    scene = Scene(targets=(tk,), noise_power_w=0.0, ofdm=ofdm_default, fluctuation="fixed")
    frames = synthesize_rx_frames(
        scene,
        surveillance_grid,
        surveillance_precoder,
        SsbMask.full(ofdm_default),
        np.random.default_rng(0),
        beam_indices=[_boresight_index(surveillance_grid)],
        full_tensor=True,
    )
    fr = frames[0]
    assert fr.tensor.shape == (100, 240, 4)
    assert np.array_equal(fr.samples, fr.tensor[0])
    # antenna m is the first antenna times the arrival response element
    a_arr = steering_vector(scene.array_cfg, tk.arrival_azimuth, tk.arrival_elevation)
    assert np.allclose(fr.tensor[7], a_arr[7] * fr.tensor[0], atol=1e-18)


def test_direct_link_residual(surveillance_grid, surveillance_precoder, ofdm_default):
    scene = Scene(
        targets=(),
        noise_power_w=0.0,
        ofdm=ofdm_default,
        fluctuation="fixed",
        direct_leakage=1e-6,
        direct_range_m=500.0,
    )
    frames = synthesize_rx_frames(
        scene, surveillance_grid, surveillance_precoder, SsbMask.full(ofdm_default), np.random.default_rng(0)
    )
    s = frames[0].samples
    assert np.abs(s).max() > 0
    # static ray: no symbol-to-symbol phase progression
    assert np.allclose(s[:, 1:], s[:, :1], atol=1e-18)


def test_synthesize_rejects_mismatched_shapes(surveillance_grid, surveillance_precoder, ofdm_default):
    scene = Scene(targets=(), ofdm=ofdm_default)
    bad_mask = SsbMask(np.ones((10, 4), dtype=bool))
    with pytest.raises(ConfigurationError):
        synthesize_rx_frames(scene, surveillance_grid, surveillance_precoder, bad_mask, np.random.default_rng(0))
    with pytest.raises(ConfigurationError):
        synthesize_rx_frames(
            scene, surveillance_grid, surveillance_precoder[:, :10], SsbMask.full(ofdm_default), np.random.default_rng(0)
        )


# ---------------------------------------------------------------------------
# scene files


def test_scene_from_dict_and_file(tmp_path):
    data = {
        "targets": [
            {
                "bistatic_range_m": 1200.0,
                "radial_velocity_mps": -30.0,
                "departure_azimuth_deg": 11.5,
                "departure_elevation_deg": 0.0,
                "rcs_m2": 0.1,
                "tx_distance_m": 600.0,
                "rx_distance_m": 600.0,
            }
        ],
        "noise_power_dbm": -94.0,
        "seed": 7,
        "fluctuation": "fixed",
    }
    scene = scene_from_dict(data)
    assert scene.targets[0].departure_azimuth == pytest.approx(math.radians(11.5))
    assert scene.noise_power_w == pytest.approx(10 ** ((-94 - 30) / 10))
    assert scene.rng_seed == 7

    path = tmp_path / "scene.json"
    path.write_text(__import__("json").dumps(data))
    assert load_scene(path).targets == scene.targets


def test_scene_file_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        load_scene(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigurationError):
        load_scene(bad)
    with pytest.raises(ConfigurationError):
        scene_from_dict({"targets": [{"radial_velocity_mps": 1.0}]})
    with pytest.raises(ConfigurationError):
        scene_from_dict({"fluctuation": "swerling9"})
