"""FastAPI application exposing simulate / analyze endpoints.

The service is stateless: simulate returns the manifest and records as
payload and clients own persistence. Validation failures surface as 422
responses whose detail carries a JSON-pointer location.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..analysis import (
    AnalysisError,
    FitResult,
    aggregate_curve,
    bootstrap,
    bound_analysis,
    curve_from_csv,
    curve_to_csv,
    fit_decay,
    intersection_time,
)
from ..engine import EngineError
from ..experiments import SchemaError, run_experiment, spec_from_dict, verify_decoupling
from ..noise import NoiseModelError, SpinBathModel
from ..qasm import QasmError, export_qasm
from ..quantum import EulerAngles
from ..results import ResultError, records_from_csv, records_to_csv, report_csv
from ..sequences import SequenceDef, SequenceError
from . import models


def _pointer_422(pointer: str, message: str):
    return HTTPException(status_code=422, detail=[{"loc": pointer, "msg": message}])


def _bad_request(exc: Exception):
    return HTTPException(status_code=400, detail=str(exc))


def create_app() -> FastAPI:
    app = FastAPI(
        title="ddsim",
        version=__version__,
        description="Dynamical-decoupling simulator and analysis service",
    )

    @app.get("/health", response_model=models.HealthResponse)
    def health() -> models.HealthResponse:
        return models.HealthResponse(status="ok", version=__version__)

    @app.post("/simulate", response_model=models.SimulateResponse)
    def simulate(req: models.SimulateRequest) -> models.SimulateResponse:
        spec_dict = dict(req.spec)
        if req.seed is not None:
            spec_dict["seed"] = req.seed
        try:
            spec = spec_from_dict(spec_dict)
            result = run_experiment(spec)
        except SchemaError as exc:
            raise _pointer_422(exc.pointer, exc.reason) from None
        except (NoiseModelError, SequenceError, EngineError) as exc:
            raise _bad_request(exc) from None
        return models.SimulateResponse(
            manifest=result.manifest,
            records_csv=records_to_csv(result.records),
            record_count=len(result.records),
        )

    @app.post("/fit", response_model=models.FitResponse)
    def fit(req: models.FitRequest) -> models.FitResponse:
        try:
            if req.curve_csv is not None:
                curve = curve_from_csv(req.curve_csv)
            elif req.records_csv is not None and req.label:
                records = records_from_csv(req.records_csv)
                curve = aggregate_curve(
                    records, req.label, tau=req.tau,
                    resamples=req.resamples, seed=req.seed,
                )
            else:
                raise _pointer_422("/curve_csv", "provide curve_csv, or records_csv with label")
            fit_result = fit_decay(curve, variant=req.variant)
        except HTTPException:
            raise
        except (AnalysisError, ResultError) as exc:
            raise _bad_request(exc) from None
        return models.FitResponse(fit=fit_result.to_dict(), curve_csv=curve_to_csv(curve))

    @app.post("/intersect", response_model=models.IntersectResponse)
    def intersect(req: models.IntersectRequest) -> models.IntersectResponse:
        try:
            fit_free = FitResult.from_dict(req.fit_free)
            fit_dd = FitResult.from_dict(req.fit_dd)
            rng = np.random.default_rng(req.seed)
            result = intersection_time(
                fit_free, fit_dd, resamples=req.resamples, rng=rng,
                n_transient=req.n_transient,
            )
        except (AnalysisError, KeyError, TypeError, ValueError) as exc:
            raise _bad_request(exc) from None
        return models.IntersectResponse(result=result.to_dict())

    @app.post("/bootstrap", response_model=models.BootstrapResponse)
    def bootstrap_endpoint(req: models.BootstrapRequest) -> models.BootstrapResponse:
        try:
            summary = bootstrap(
                req.samples, resamples=req.resamples,
                rng=np.random.default_rng(req.seed),
            )
        except AnalysisError as exc:
            raise _bad_request(exc) from None
        return models.BootstrapResponse(
            mean=summary.mean, ci_low=summary.ci_low, ci_high=summary.ci_high,
            ci_halfwidth=summary.ci_halfwidth, resamples=summary.resamples,
        )

    @app.post("/bound", response_model=models.BoundResponse)
    def bound(req: models.BoundRequest) -> models.BoundResponse:
        constant = req.bound_constant
        try:
            if constant is None:
                if req.bath is None:
                    raise _pointer_422(
                        "/bound_constant", "provide bound_constant or bath parameters"
                    )
                constant = SpinBathModel.from_dict(req.bath).bound_constant()
            analysis = bound_analysis(
                [p.model_dump() for p in req.grid], bound_constant=constant
            )
        except HTTPException:
            raise
        except (AnalysisError, NoiseModelError) as exc:
            raise _bad_request(exc) from None
        return models.BoundResponse(analysis=analysis.to_dict())

    @app.post("/verify-dd", response_model=models.VerifyResponse)
    def verify(req: models.VerifyRequest) -> models.VerifyResponse:
        try:
            seq = SequenceDef(req.family, repetitions=req.repetitions, p1=req.p1, p2=req.p2)
            out = verify_decoupling(
                seq, coupling=req.coupling, trials=req.trials,
                seed=req.seed, n_bath=req.bath_qubits,
            )
        except (SequenceError, EngineError) as exc:
            raise _bad_request(exc) from None
        return models.VerifyResponse(**out)

    @app.post("/export-qasm", response_model=models.QasmResponse)
    def qasm(req: models.QasmRequest) -> models.QasmResponse:
        try:
            seq = SequenceDef(req.family, p1=req.p1, p2=req.p2)
            if req.bell is not None:
                initial: EulerAngles | str = req.bell
            elif req.theta is not None:
                initial = EulerAngles(req.theta, req.phi, req.lam)
            else:
                raise _pointer_422("/theta", "provide theta (angles) or bell")
            text = export_qasm(
                seq, n_pulses=req.n_pulses, initial=initial,
                tau_multiplier=req.tau_multiplier,
            )
        except HTTPException:
            raise
        except (QasmError, SequenceError, ValueError) as exc:
            raise _bad_request(exc) from None
        return models.QasmResponse(qasm=text)

    @app.post("/report", response_model=models.ReportResponse)
    def report(req: models.ReportRequest) -> models.ReportResponse:
        try:
            records = records_from_csv(req.records_csv)
            text = report_csv(records, resamples=req.resamples, seed=req.seed)
        except (ResultError, AnalysisError) as exc:
            raise _bad_request(exc) from None
        return models.ReportResponse(report_csv=text)

    return app


app = create_app()
