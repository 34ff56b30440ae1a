"""Request and response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class SimulateRequest(BaseModel):
    spec: dict
    seed: int | None = None  # optional override of spec["seed"]


class SimulateResponse(BaseModel):
    manifest: dict
    records_csv: str
    record_count: int


class FitRequest(BaseModel):
    curve_csv: str | None = None
    records_csv: str | None = None
    label: str | None = None  # aggregate label when fitting from records
    tau: int = 1
    variant: str = "SELF_CONSISTENT"
    resamples: int = 2000  # bootstrap resamples for curve error bars
    seed: int = 0


class FitResponse(BaseModel):
    fit: dict
    curve_csv: str


class IntersectRequest(BaseModel):
    fit_free: dict
    fit_dd: dict
    resamples: int = 1000
    seed: int = 0
    n_transient: float = 5.0


class IntersectResponse(BaseModel):
    result: dict


class BootstrapRequest(BaseModel):
    samples: list[float] = Field(min_length=1)
    resamples: int = 5000
    seed: int = 0


class BootstrapResponse(BaseModel):
    mean: float
    ci_low: float
    ci_high: float
    ci_halfwidth: float
    resamples: int


class BoundGridPoint(BaseModel):
    tau_ns: float
    n_pulses: int
    fidelity: float


class BoundRequest(BaseModel):
    grid: list[BoundGridPoint] = Field(min_length=1)
    bound_constant: float | None = None
    bath: dict | None = None  # SpinBathModel fields; used when no constant given


class BoundResponse(BaseModel):
    analysis: dict


class VerifyRequest(BaseModel):
    family: str = "XY4"
    repetitions: int = 1
    p1: str = "X"
    p2: str = "Z"
    coupling: str = "random"
    trials: int = 100
    seed: int = 0
    bath_qubits: int = 2


class VerifyResponse(BaseModel):
    sequence: str
    repetitions: int
    coupling: str
    trials: int
    n_labels: int
    max_norm: float
    max_relative: float
    mean_relative: float


class QasmRequest(BaseModel):
    family: str = "XY4"
    p1: str = "X"
    p2: str = "Z"
    n_pulses: int = 4
    tau_multiplier: int = 1
    theta: float | None = None
    phi: float = 0.0
    lam: float = 0.0
    bell: str | None = None  # "phi+" or "psi+"; overrides the angles


class QasmResponse(BaseModel):
    qasm: str


class ReportRequest(BaseModel):
    records_csv: str
    resamples: int = 5000
    seed: int = 0


class ReportResponse(BaseModel):
    report_csv: str
