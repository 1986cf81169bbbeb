"""FastAPI service wrapping the simulation core.

The CLI is a thin client of the handler functions below; remote use hits the
same handlers over HTTP.  BER sweeps run synchronously, so clients submitting
long sweeps should disable their read timeout.
"""
from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import CiftnError
from ..isi_analysis import isi_table, isi_table_csv
from ..simharness import ber_points_csv, run_ber, spectral_efficiency, trace_example
from .models import (
    BerPointModel,
    BerRequest,
    BerResponse,
    HealthResponse,
    IsiBudgetModel,
    IsiTableRequest,
    IsiTableResponse,
    IsiTableRowModel,
    SeRequest,
    SeResponse,
    TraceRequest,
    TraceResponse,
)


def handle_ber(req: BerRequest) -> BerResponse:
    points = run_ber(req.to_config())
    return BerResponse(
        points=[BerPointModel.from_point(p) for p in points],
        csv=ber_points_csv(points),
    )


def handle_isi_table(req: IsiTableRequest) -> IsiTableResponse:
    rows = isi_table(taus=req.taus, alpha=req.alpha, L=req.isi_len, zeta=req.zeta)
    return IsiTableResponse(
        rows=[
            IsiTableRowModel(
                tau=r.tau,
                conventional=r.conventional,
                ci=r.ci,
                component_magnitude=r.component_magnitude,
                conventional_ref=r.conventional_ref,
                ci_ref=r.ci_ref,
            )
            for r in rows
        ],
        csv=isi_table_csv(rows),
    )


def handle_trace(req: TraceRequest) -> TraceResponse:
    rep = trace_example(tau=req.tau, alpha=req.alpha, isi_len=req.isi_len)
    b = rep.third_symbol_budget
    return TraceResponse(
        conventional_y_re=[float(v) for v in rep.conventional_y_real],
        ci_tx_re=[float(v.real) for v in rep.ci_tx],
        ci_tx_im=[float(v.imag) for v in rep.ci_tx],
        zeta=rep.zeta,
        component_magnitude=rep.component_magnitude,
        third_symbol_budget=IsiBudgetModel(
            symbol_index=b.symbol_index,
            constructive_sum=b.constructive_sum,
            destructive_sum=b.destructive_sum,
            total=b.total,
            reference=b.reference,
        ),
        text=rep.as_text(),
        csv=rep.as_csv(),
    )


def handle_se(req: SeRequest) -> SeResponse:
    bps = req.bits_per_symbol
    if bps is None:
        bps = 2.0 if req.mode == "nyquist_qpsk" else 1.0
    se = spectral_efficiency(req.mode, req.tau, req.alpha, bps)
    return SeResponse(
        mode=req.mode,
        tau=req.tau,
        alpha=req.alpha,
        bits_per_symbol=bps,
        spectral_efficiency=se,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="ciftn", version=__version__)

    @app.exception_handler(CiftnError)
    async def _domain_error(_, exc: CiftnError):
        raise HTTPException(status_code=422, detail=str(exc))

    @app.get("/healthz", response_model=HealthResponse)
    def healthz():
        return HealthResponse(status="ok", version=__version__)

    @app.post("/v1/ber", response_model=BerResponse)
    def ber(req: BerRequest):
        try:
            return handle_ber(req)
        except CiftnError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.post("/v1/isi-table", response_model=IsiTableResponse)
    def isi_table_ep(req: IsiTableRequest):
        try:
            return handle_isi_table(req)
        except CiftnError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.post("/v1/trace", response_model=TraceResponse)
    def trace(req: TraceRequest):
        try:
            return handle_trace(req)
        except CiftnError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.post("/v1/se", response_model=SeResponse)
    def se(req: SeRequest):
        try:
            return handle_se(req)
        except (CiftnError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    return app


app = create_app()
