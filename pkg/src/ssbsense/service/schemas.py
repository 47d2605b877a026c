"""Pydantic request/response models for the HTTP service.

Angles cross the wire in degrees; the core library works in radians.
"""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class ArrayModel(BaseModel):
    m_h: int = 10
    m_v: int = 10


class OfdmModel(BaseModel):
    n_subcarriers: int = 240
    n_symbols: int = 4
    subcarrier_spacing_hz: float = 60e3
    carrier_hz: float = 15e9
    tx_power_per_symbol_w: float = 1.0


class ProfileModel(BaseModel):
    n_fft: int = 960
    l_fft: int = 64


class BeamGridRequest(BaseModel):
    array: ArrayModel = Field(default_factory=ArrayModel)
    surveillance_only: bool = False


class BeamModel(BaseModel):
    q_az: int
    q_el: int
    azimuth_deg: float
    elevation_deg: float


class BeamGridResponse(BaseModel):
    beams: list[BeamModel]
    total: int
    surveillance_count: int


class BeamGainRequest(BaseModel):
    array: ArrayModel = Field(default_factory=ArrayModel)
    target_azimuth_deg: float
    target_elevation_deg: float
    beam_azimuth_deg: float
    beam_elevation_deg: float


class BeamGainResponse(BaseModel):
    gain_real: float
    gain_imag: float
    gain_abs: float


class OverheadRequest(BaseModel):
    burst_set_period_s: float = 5e-3
    ssb_periodicity_s: float = 20e-3
    r_beams: int = 45
    total_symbol_s: float


class OverheadResponse(BaseModel):
    percent: float


class CrbRequest(BaseModel):
    n: int = 240
    l: int = 4
    subcarrier_spacing_hz: float = 60e3
    carrier_hz: float = 15e9
    snr_db: float = 0.0


class CrbResponse(BaseModel):
    var_d: float
    var_v: float
    rmse_d: float
    rmse_v: float
    fim: list[list[float]]
    crb: list[list[float]]


class TargetModel(BaseModel):
    bistatic_range_m: float
    radial_velocity_mps: float
    arrival_azimuth_deg: float = 0.0
    arrival_elevation_deg: float = 0.0
    departure_azimuth_deg: float = 0.0
    departure_elevation_deg: float = 0.0
    rcs_m2: float = 0.1
    tx_distance_m: float = 150.0
    rx_distance_m: float = 150.0


class SceneModel(BaseModel):
    """Mirrors the scene JSON file schema (docs/config.md)."""

    targets: list[TargetModel] = Field(default_factory=list)
    noise_power_dbm: float = -94.0
    noise_power_w: Optional[float] = None
    ofdm: OfdmModel = Field(default_factory=OfdmModel)
    array: ArrayModel = Field(default_factory=ArrayModel)
    seed: int = 0
    fluctuation: Literal["swerling1", "fixed"] = "swerling1"
    direct_leakage: float = 0.0
    direct_range_m: float = 0.0


class SimulateRequest(BaseModel):
    scene: SceneModel
    profile: ProfileModel = Field(default_factory=ProfileModel)
    mask_mode: Literal["full", "ssb", "custom"] = "ssb"
    mask_text: Optional[str] = None
    gamma_a: float = 6.0
    gamma: float = 4.0


class SimulateResponse(BaseModel):
    range_m: float
    velocity_mps: float
    range_bin: int
    velocity_bin: int
    statistic: float
    detected: bool
    selected_beams: list[int]
    paf_normalized: list[float]


class ExperimentRequest(BaseModel):
    """Run one batch experiment; ``config`` follows the config file schema."""

    config: dict[str, Any]
    seed: Optional[int] = None
    trials: Optional[int] = None


class ExperimentResponse(BaseModel):
    experiment: str
    metadata: dict[str, Any]
    columns: list[str]
    rows: list[dict[str, Any]]
    csv_text: str
