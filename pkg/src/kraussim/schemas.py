"""Request and response models for the HTTP service."""
from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

# Public parameter names as they appear in payloads and error messages.
_PUBLIC_NAME = {"lam": "lambda"}

_REQUIRED_BY_KIND = {
    "dp": ("lam",),
    "ad": ("lam",),
    "dephasing": ("lam",),
    "gad": ("lam", "gamma"),
    "trig": ("theta_deg", "phi_deg"),
    "kraus": ("operators",),
}

FAMILY_KINDS = ("dp", "gad", "ad", "dephasing")


class ChannelParams(BaseModel):
    """Channel selector: a named family, the trig family, or raw operators."""

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    kind: Literal["dp", "gad", "ad", "dephasing", "trig", "kraus"]
    lam: float | None = Field(default=None, alias="lambda")
    gamma: float | None = None
    theta_deg: float | None = None
    phi_deg: float | None = None
    operators: list[Any] | None = None

    @model_validator(mode="after")
    def _required_fields(self):
        for field in _REQUIRED_BY_KIND[self.kind]:
            if getattr(self, field) is None:
                name = _PUBLIC_NAME.get(field, field)
                raise ValueError(f"{self.kind} channel requires {name}")
        return self


class SourceSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["ideal", "werner", "custom"] = "werner"
    visibility: float | None = None
    pair_rate: float = Field(default=1e4, gt=0)
    state: list[Any] | None = None

    @model_validator(mode="after")
    def _custom_needs_state(self):
        if self.kind == "custom" and self.state is None:
            raise ValueError("custom source requires state")
        return self


class ChannelRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    params: ChannelParams
    dt: float = Field(default=10.0, gt=0)


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["dp", "gad"]
    gamma: float = 0.0
    steps: int = Field(default=101, ge=2, le=2001)
    source: SourceSpec = SourceSpec()
    dt: float = Field(default=10.0, gt=0)
    seed: int | None = Field(default=None, ge=0)
    method: Literal["linear", "mle"] = "linear"
    exact: bool = False


class TomoRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    params: ChannelParams
    source: SourceSpec = SourceSpec()
    dt: float = Field(default=10.0, gt=0)
    seed: int | None = Field(default=None, ge=0)
    method: Literal["linear", "mle"] = "linear"
    exact: bool = False

    @model_validator(mode="after")
    def _family_only(self):
        if self.params.kind not in FAMILY_KINDS:
            raise ValueError(f"tomo requires a decomposable kind, got {self.params.kind}")
        return self


class AffinePayload(BaseModel):
    t: list[list[float]]
    tau: list[float]


class CanonicalPayload(BaseModel):
    eta: list[float]
    tau: list[float]
    o1: list[list[float]]
    o2: list[list[float]]


class FAPayload(BaseModel):
    satisfied: bool
    margin: float


class ChannelReport(BaseModel):
    kind: str
    kraus: list[Any]
    is_minimal: bool
    completeness_defect: float
    affine: AffinePayload
    canonical: CanonicalPayload
    fa: FAPayload
    trig_family_residual: float
    decomposition: dict[str, Any] | None = None
    partition: dict[str, Any] | None = None
    bench_time_overhead: float | None = None


class DecompositionReport(BaseModel):
    kind: str
    terms: list[dict[str, Any]]
    notes: list[str]
    trace_defect: float
    bench_time_overhead: float
    partition: dict[str, Any]


class SweepResponse(BaseModel):
    seed: int
    columns: list[str]
    rows: list[list[float]]
    csv: str
    death_sim: float | None
    death_theory: float | None
    metadata: dict[str, Any]


class TomoResponse(BaseModel):
    seed: int
    records: list[dict[str, Any]]
    effective: dict[str, float]
    reconstruction: dict[str, Any]
    theory: list[Any]
    metrics: dict[str, float]


class HealthResponse(BaseModel):
    status: str
    version: str
