"""HTTP service exposing the sensing library.

Quick computations (beam geometry, bounds, one-shot simulate-and-estimate)
are synchronous request/response; the batch experiments run synchronously
too and can take minutes at full trial counts, so remote clients should
use generous timeouts (the bundled CLI talks to the app in-process by
default).
"""

from __future__ import annotations

import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ssbsense.array import ArrayConfig, beam_gain, beam_grid, precoder
from ssbsense.channel import scene_from_dict, synthesize_rx_frames
from ssbsense.constants import PACKAGE_VERSION
from ssbsense.crb import CrbInputs, crb_closed_form
from ssbsense.detector import detect, rng_for
from ssbsense.errors import ConfigurationError
from ssbsense.estimator import (
    ProfileConfig,
    aggregate,
    estimate_range_velocity,
    paf_vector,
    range_velocity_profile,
)
from ssbsense.harness import resolve_config, run_experiment
from ssbsense.service import schemas
from ssbsense.units import db_to_linear
from ssbsense.waveform import SsbMask, SweepTiming, default_ssb_mask, mask_from_text, sensing_overhead_percent


def _json_safe(value):
    """Replace NaN/inf with None so responses stay valid JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_json_safe(v) for v in value]
    return value


def create_app() -> FastAPI:
    app = FastAPI(
        title="ssbsense",
        version=PACKAGE_VERSION,
        description="Bistatic passive sensing on swept synchronization-block beams",
    )

    @app.exception_handler(ConfigurationError)
    async def _config_error(request: Request, exc: ConfigurationError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=PACKAGE_VERSION)

    @app.post("/array/beam-grid", response_model=schemas.BeamGridResponse)
    def beam_grid_endpoint(req: schemas.BeamGridRequest):
        cfg = ArrayConfig(m_h=req.array.m_h, m_v=req.array.m_v)
        grid = beam_grid(cfg, surveillance_only=req.surveillance_only)
        return schemas.BeamGridResponse(
            beams=[
                schemas.BeamModel(
                    q_az=b.q_az,
                    q_el=b.q_el,
                    azimuth_deg=math.degrees(b.azimuth),
                    elevation_deg=math.degrees(b.elevation),
                )
                for b in grid.beams
            ],
            total=len(grid),
            surveillance_count=grid.surveillance_count,
        )

    @app.post("/array/beam-gain", response_model=schemas.BeamGainResponse)
    def beam_gain_endpoint(req: schemas.BeamGainRequest):
        cfg = ArrayConfig(m_h=req.array.m_h, m_v=req.array.m_v)
        g = beam_gain(
            cfg,
            math.radians(req.target_azimuth_deg),
            math.radians(req.target_elevation_deg),
            math.radians(req.beam_azimuth_deg),
            math.radians(req.beam_elevation_deg),
        )
        return schemas.BeamGainResponse(gain_real=g.real, gain_imag=g.imag, gain_abs=abs(g))

    @app.post("/waveform/overhead", response_model=schemas.OverheadResponse)
    def overhead_endpoint(req: schemas.OverheadRequest):
        timing = SweepTiming(
            burst_set_period_s=req.burst_set_period_s,
            ssb_periodicity_s=req.ssb_periodicity_s,
        )
        return schemas.OverheadResponse(
            percent=sensing_overhead_percent(timing, req.r_beams, req.total_symbol_s)
        )

    @app.post("/crb/point", response_model=schemas.CrbResponse)
    def crb_endpoint(req: schemas.CrbRequest):
        result = crb_closed_form(
            CrbInputs(
                n=req.n,
                l=req.l,
                subcarrier_spacing_hz=req.subcarrier_spacing_hz,
                carrier_hz=req.carrier_hz,
                snr_r=db_to_linear(req.snr_db),
            )
        )
        return schemas.CrbResponse(
            var_d=result.var_d,
            var_v=result.var_v,
            rmse_d=math.sqrt(result.var_d),
            rmse_v=math.sqrt(result.var_v),
            fim=result.fim.tolist(),
            crb=result.crb.tolist(),
        )

    @app.post("/simulate/estimate", response_model=schemas.SimulateResponse)
    def simulate_endpoint(req: schemas.SimulateRequest):
        scene = scene_from_dict(req.scene.model_dump())
        grid = beam_grid(scene.array_cfg, surveillance_only=True)
        f = precoder(grid, scene.array_cfg)
        if req.mask_mode == "ssb":
            mask = default_ssb_mask(scene.ofdm)
        elif req.mask_mode == "full":
            mask = SsbMask.full(scene.ofdm)
        else:
            if req.mask_text is None:
                raise ConfigurationError("mask_mode 'custom' requires mask_text")
            mask = mask_from_text(req.mask_text, scene.ofdm, source="mask_text")
        rng = rng_for(scene.rng_seed)
        frames = synthesize_rx_frames(scene, grid, f, mask, rng)
        profile_cfg = ProfileConfig(n_fft=req.profile.n_fft, l_fft=req.profile.l_fft)
        profiles = [range_velocity_profile(fr, profile_cfg) for fr in frames]
        agg, selected = aggregate(profiles, req.gamma_a)
        d_hat, v_hat, n_hat, l_hat = estimate_range_velocity(agg)
        pafs = paf_vector(profiles)
        decision = detect(pafs, req.gamma)
        return schemas.SimulateResponse(
            range_m=d_hat,
            velocity_mps=v_hat,
            range_bin=n_hat,
            velocity_bin=l_hat,
            statistic=decision.statistic,
            detected=decision.detected,
            selected_beams=[int(i) for i in selected],
            paf_normalized=[float(x) for x in pafs.normalized],
        )

    @app.post("/experiments/run", response_model=schemas.ExperimentResponse)
    def experiments_endpoint(req: schemas.ExperimentRequest):
        config = resolve_config(req.config, seed=req.seed, trials=req.trials)
        result = run_experiment(config)
        return schemas.ExperimentResponse(
            experiment=result.experiment,
            metadata=result.metadata,
            columns=result.columns,
            rows=[_json_safe(dict(r)) for r in result.rows],
            csv_text=result.csv_text,
        )

    return app


app = create_app()
