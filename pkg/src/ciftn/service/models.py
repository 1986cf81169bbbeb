"""Pydantic request/response models for the HTTP service.

These mirror the core dataclasses one-to-one so the CLI thin client and any
other HTTP consumer share a single wire schema.
"""
from __future__ import annotations

from pydantic import BaseModel, Field

from ..pulse import PulseSpec
from ..simharness import BerPoint, SimConfig


class PulseParams(BaseModel):
    alpha: float = 0.3
    tau: float = 1.0
    symbol_period: float = 1.0
    oversampling: int = 16
    isi_len: int | None = None

    def to_spec(self) -> PulseSpec:
        return PulseSpec(
            alpha=self.alpha,
            tau=self.tau,
            symbol_period=self.symbol_period,
            oversampling=self.oversampling,
            isi_len=self.isi_len,
        )


class BerRequest(BaseModel):
    mode: str = "ci_ftn"
    detector: str = "pairwise"
    pulse: PulseParams = Field(default_factory=PulseParams)
    ebn0_db: list[float]
    frame_len: int = 672
    coded: bool = False
    ldpc_iters: int = 50
    min_errors: int = 200
    max_bits: float = 2e8
    seed: int = 1
    fidelity: str = "auto"
    workers: int = 1
    zeta: float | None = None
    allow_low_errors: bool = False

    def to_config(self) -> SimConfig:
        return SimConfig(
            mode=self.mode,
            detector=self.detector,
            pulse=self.pulse.to_spec(),
            ebn0_db=tuple(self.ebn0_db),
            frame_len=self.frame_len,
            coded=self.coded,
            ldpc_iters=self.ldpc_iters,
            min_errors=self.min_errors,
            max_bits=self.max_bits,
            master_seed=self.seed,
            fidelity=self.fidelity,
            workers=self.workers,
            zeta=self.zeta,
            allow_low_errors=self.allow_low_errors,
        )


class BerPointModel(BaseModel):
    ebn0_db: float
    bits: int
    errors: int
    ber: float
    ci_halfwidth: float
    wall_time_s: float

    @classmethod
    def from_point(cls, p: BerPoint) -> "BerPointModel":
        return cls(
            ebn0_db=p.ebn0_db,
            bits=p.bits_simulated,
            errors=p.bit_errors,
            ber=p.ber,
            ci_halfwidth=p.ci_halfwidth,
            wall_time_s=p.wall_time_s,
        )


class BerResponse(BaseModel):
    points: list[BerPointModel]
    csv: str


class IsiTableRequest(BaseModel):
    taus: list[float] = [0.9, 0.8, 0.7, 0.6, 0.5, 0.4]
    alpha: float = 0.3
    isi_len: int = 12
    zeta: float | None = None


class IsiTableRowModel(BaseModel):
    tau: float
    conventional: float
    ci: float
    component_magnitude: float
    conventional_ref: float | None
    ci_ref: float | None


class IsiTableResponse(BaseModel):
    rows: list[IsiTableRowModel]
    csv: str


class TraceRequest(BaseModel):
    tau: float = 0.6
    alpha: float = 0.3
    isi_len: int | None = None


class IsiBudgetModel(BaseModel):
    symbol_index: int
    constructive_sum: float
    destructive_sum: float
    total: float
    reference: float


class TraceResponse(BaseModel):
    conventional_y_re: list[float]
    ci_tx_re: list[float]
    ci_tx_im: list[float]
    zeta: float
    component_magnitude: float
    third_symbol_budget: IsiBudgetModel
    text: str
    csv: str


class SeRequest(BaseModel):
    mode: str = "ci_ftn"
    tau: float = 0.45
    alpha: float = 0.3
    bits_per_symbol: float | None = None


class SeResponse(BaseModel):
    mode: str
    tau: float
    alpha: float
    bits_per_symbol: float
    spectral_efficiency: float


class HealthResponse(BaseModel):
    status: str
    version: str
