"""HTTP service exposing channel analysis, decompositions, sweeps, and runs.

All numerics live in the core modules; this layer validates payloads,
dispatches by channel kind, and shapes JSON. Domain errors map to 400 with
the error class name, payload-shape errors to FastAPI's standard 422.
"""
from __future__ import annotations

import math
import secrets

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from . import __version__, channels, jsonio
from .decomposition import (
    SignedDecomposition,
    amplitude_damping_decomposition,
    dephasing_decomposition,
    dp_decomposition,
    gad_decomposition,
    to_partition,
)
from .errors import KrausSimError, Unsatisfiable
from .experiment import SourceModel, dynamics_sweep, run_protocol, sweep_to_csv
from .schemas import (
    ChannelParams,
    ChannelReport,
    ChannelRequest,
    DecompositionReport,
    FAPayload,
    HealthResponse,
    SourceSpec,
    SweepRequest,
    SweepResponse,
    TomoRequest,
    TomoResponse,
)
from .states import concurrence, fidelity, purity


def build_channel(params: ChannelParams) -> channels.KrausChannel:
    if params.kind == "dp":
        return channels.depolarizing(params.lam)
    if params.kind == "gad":
        return channels.generalized_amplitude_damping(params.lam, params.gamma)
    if params.kind == "ad":
        return channels.amplitude_damping(params.lam)
    if params.kind == "dephasing":
        return channels.dephasing(params.lam)
    if params.kind == "trig":
        return channels.trig_channel(math.radians(params.theta_deg), math.radians(params.phi_deg))
    return channels.KrausChannel(operators=tuple(jsonio.decode_matrix(op) for op in params.operators))


def build_decomposition(params: ChannelParams) -> SignedDecomposition | None:
    if params.kind == "dp":
        return dp_decomposition(params.lam)
    if params.kind == "gad":
        return gad_decomposition(params.lam, params.gamma)
    if params.kind == "ad":
        return amplitude_damping_decomposition(params.lam)
    if params.kind == "dephasing":
        return dephasing_decomposition(params.lam)
    return None


def build_source(spec: SourceSpec) -> SourceModel:
    if spec.kind == "ideal":
        return SourceModel.ideal(pair_rate=spec.pair_rate)
    if spec.kind == "werner":
        return SourceModel.werner(visibility=spec.visibility, pair_rate=spec.pair_rate)
    return SourceModel.custom(jsonio.decode_matrix(spec.state), pair_rate=spec.pair_rate)


def _resolve_seed(seed: int | None) -> int:
    return secrets.randbits(32) if seed is None else int(seed)


def create_app() -> FastAPI:
    app = FastAPI(title="kraussim", version=__version__)

    @app.exception_handler(KrausSimError)
    async def _domain_error(request, exc: KrausSimError):
        return JSONResponse(
            status_code=400,
            content={"detail": str(exc), "error": type(exc).__name__},
        )

    @app.get("/health", response_model=HealthResponse)
    async def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/channel", response_model=ChannelReport)
    async def channel_report(req: ChannelRequest) -> ChannelReport:
        channel = build_channel(req.params)
        affine = channels.to_affine(channel)
        canonical = channels.canonical_form(affine)
        verdict = channels.fujiwara_algoet_check(canonical.eta, canonical.tau[2])
        residual = channels.trig_family_residual(canonical.eta, canonical.tau[2])
        decomposition = build_decomposition(req.params)
        report = ChannelReport(
            kind=req.params.kind,
            kraus=[jsonio.encode_matrix(k) for k in channel.operators],
            is_minimal=channel.is_minimal,
            completeness_defect=channels.completeness_defect(channel),
            affine={"t": affine.t.tolist(), "tau": affine.tau.tolist()},
            canonical={
                "eta": canonical.eta.tolist(),
                "tau": canonical.tau.tolist(),
                "o1": canonical.o1.tolist(),
                "o2": canonical.o2.tolist(),
            },
            fa=FAPayload(satisfied=verdict.satisfied, margin=verdict.margin),
            trig_family_residual=residual,
        )
        if decomposition is not None:
            report.decomposition = jsonio.decomposition_to_json(decomposition)
            report.partition = jsonio.partition_to_json(to_partition(decomposition, req.dt))
            report.bench_time_overhead = decomposition.bench_time_overhead()
        return report

    @app.post("/decompose", response_model=DecompositionReport)
    async def decompose(req: ChannelRequest) -> DecompositionReport:
        decomposition = build_decomposition(req.params)
        if decomposition is None:
            raise Unsatisfiable(f"kind {req.params.kind!r} has no signed decomposition")
        payload = jsonio.decomposition_to_json(decomposition)
        return DecompositionReport(
            kind=req.params.kind,
            terms=payload["terms"],
            notes=payload["notes"],
            trace_defect=decomposition.trace_defect(),
            bench_time_overhead=decomposition.bench_time_overhead(),
            partition=jsonio.partition_to_json(to_partition(decomposition, req.dt)),
        )

    @app.post("/sweep", response_model=SweepResponse)
    async def sweep(req: SweepRequest) -> SweepResponse:
        seed = _resolve_seed(req.seed)
        result = dynamics_sweep(
            family=req.kind,
            lam_grid=np.linspace(0.0, 1.0, req.steps),
            gamma=req.gamma,
            source=build_source(req.source),
            total_time=req.dt,
            seed=seed,
            method=req.method,
            exact=req.exact,
        )
        payload = jsonio.sweep_to_json(result)
        return SweepResponse(
            seed=seed,
            columns=payload["columns"],
            rows=payload["rows"],
            csv=sweep_to_csv(result),
            death_sim=result.death_sim,
            death_theory=result.death_theory,
            metadata=payload["metadata"],
        )

    @app.post("/tomo", response_model=TomoResponse)
    async def tomo(req: TomoRequest) -> TomoResponse:
        seed = _resolve_seed(req.seed)
        decomposition = build_decomposition(req.params)
        run = run_protocol(
            decomposition,
            build_source(req.source),
            total_time=req.dt,
            seed=seed,
            method=req.method,
            exact=req.exact,
        )
        payload = jsonio.run_to_json(run)
        rho_hat = run.reconstruction.rho_hat
        metrics = {
            "fidelity_to_theory": fidelity(rho_hat, run.theory),
            "purity_sim": purity(rho_hat),
            "purity_theory": purity(run.theory),
            "concurrence_sim": concurrence(rho_hat),
            "concurrence_theory": concurrence(run.theory),
        }
        return TomoResponse(
            seed=seed,
            records=payload["records"],
            effective=payload["effective"],
            reconstruction=payload["reconstruction"],
            theory=payload["theory"],
            metrics=metrics,
        )

    return app


app = create_app()
