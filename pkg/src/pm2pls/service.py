"""HTTP facade over the analytic model, the simulator and the sweep runner.

Run it directly (``uvicorn pm2pls.service:app``) or drive it in-process; the
bundled command line client does the latter by default.  Request and response
bodies are plain JSON; errors come back as one-line details with a 4xx code.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from . import __version__, analytic
from .engine import TraceLog
from .mpls import overhead_rows
from .params import ALL_SCHEMES, HandoverScheme, TimingParameters
from .scenario import DataFlow, simulate_handover
from .sweep import (
    SCHEME_DATA_PLANE_OVERHEAD,
    ScenarioConfig,
    overhead_table_text,
    run_sweep,
)

app = FastAPI(
    title="pm2pls",
    version=__version__,
    description="Handover delay, loss and overhead for PMIPv6/MPLS schemes",
)


def _parse_scheme(name: str) -> HandoverScheme:
    try:
        return HandoverScheme.parse(name)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None


class TimingParametersModel(BaseModel):
    """JSON mirror of TimingParameters; delays accept scalars or vectors."""

    alpha_rp_ms: float = 0.2
    alpha_aaa_server_ms: float = 0.1
    t_wl_ms: float = 10.0
    t_scanning_ms: float = 100.0
    t_authentication_ms: float = 5.0
    t_association_ms: float = 10.0
    t_ap_mag_ms: float = 2.0
    t_aaa_req_ms: float = 1.0
    t_aaa_resp_ms: float = 1.0
    beta_rp_ms: float = 0.1
    beta_mag_ms: float = 0.2
    beta_lma_ms: float = 0.5
    alpha_mag_ms: float = 0.2
    alpha_lma_ms: float = 0.5
    d_up_ms: float | list[float] = 2.0
    d_down_ms: float | list[float] = 2.0
    lambda_pr_packets_per_s: float = 170.0
    n_hops: int = 1
    m_hops: int = 1
    t_aaa_override_ms: float | None = None

    def to_params(self) -> TimingParameters:
        data = self.model_dump()
        for key in ("d_up_ms", "d_down_ms"):
            if isinstance(data[key], list):
                data[key] = tuple(data[key])
        try:
            return TimingParameters(**data)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None


class DataFlowModel(BaseModel):
    rate_packets_per_s: float | None = None     # default: the parameter set's rate
    packet_size_bytes: int = 100
    post_handover_packets: int = 3

    def to_flow(self, params: TimingParameters) -> DataFlow:
        rate = (
            params.lambda_pr_packets_per_s
            if self.rate_packets_per_s is None
            else self.rate_packets_per_s
        )
        try:
            return DataFlow(
                rate_packets_per_s=rate,
                packet_size_bytes=self.packet_size_bytes,
                post_handover_packets=self.post_handover_packets,
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None


class DelayBreakdownModel(BaseModel):
    scheme: str
    t_l2ho_ms: float
    t_md_ms: float
    t_aaa_ms: float
    t_reg_ms: float
    t_bi_lsp_setup_ms: float
    t_ra_ms: float
    t_l3ho_ms: float
    t_ho_ms: float

    @classmethod
    def from_breakdown(cls, breakdown: analytic.DelayBreakdown) -> "DelayBreakdownModel":
        return cls(
            scheme=breakdown.scheme.value,
            t_l2ho_ms=breakdown.t_l2ho_ms,
            t_md_ms=breakdown.t_md_ms,
            t_aaa_ms=breakdown.t_aaa_ms,
            t_reg_ms=breakdown.t_reg_ms,
            t_bi_lsp_setup_ms=breakdown.t_bi_lsp_setup_ms,
            t_ra_ms=breakdown.t_ra_ms,
            t_l3ho_ms=breakdown.t_l3ho_ms,
            t_ho_ms=breakdown.t_ho_ms,
        )


class AnalyticRequest(BaseModel):
    scheme: str
    params: TimingParametersModel = Field(default_factory=TimingParametersModel)


class AnalyticResponse(BaseModel):
    breakdown: DelayBreakdownModel
    expected_loss_pkts: float
    loss_ceiling_pkts: int
    overhead_bytes_per_pkt: int


class SimulateRequest(BaseModel):
    scheme: str
    params: TimingParametersModel = Field(default_factory=TimingParametersModel)
    flow: DataFlowModel = Field(default_factory=DataFlowModel)
    include_trace: bool = False


class SimulateResponse(BaseModel):
    scheme: str
    breakdown: DelayBreakdownModel | None
    detach_at_ms: float
    completion_at_ms: float | None
    rsvp_message_count: int
    pbu_pba_count: int
    packets_sent: int
    packets_lost: int
    packets_delivered_before: int
    packets_delivered_after: int
    label_misses: int
    failure: str | None
    trace: str | None


class SweepRequest(BaseModel):
    schemes: list[str] = Field(
        default_factory=lambda: [s.value for s in ALL_SCHEMES]
    )
    hop_min: int = 1
    hop_max: int = 15
    m_hops: int | None = None
    params: TimingParametersModel = Field(default_factory=TimingParametersModel)
    scheme_overrides: dict[str, dict[str, float | list[float] | None]] = Field(
        default_factory=dict
    )
    simulate: bool = False
    trace: bool = False
    analytic_only: bool = False


class SweepResponse(BaseModel):
    csv: str
    rows: list[dict[str, object]]
    warnings: list[str]
    traces: dict[str, str]


class OverheadRow(BaseModel):
    mechanism: str
    overhead_bytes: int
    description: str


@app.get("/health")
def health() -> dict[str, str]:
    return {"status": "ok", "version": __version__}


@app.post("/analytic", response_model=AnalyticResponse)
def analytic_point(request: AnalyticRequest) -> AnalyticResponse:
    scheme = _parse_scheme(request.scheme)
    params = request.params.to_params()
    breakdown = analytic.t_ho(scheme, params)
    loss = analytic.packet_loss(breakdown.t_ho_ms, params.lambda_pr_packets_per_s)
    return AnalyticResponse(
        breakdown=DelayBreakdownModel.from_breakdown(breakdown),
        expected_loss_pkts=loss.expected,
        loss_ceiling_pkts=loss.ceiling,
        overhead_bytes_per_pkt=SCHEME_DATA_PLANE_OVERHEAD[scheme],
    )


@app.post("/simulate", response_model=SimulateResponse)
def simulate(request: SimulateRequest) -> SimulateResponse:
    scheme = _parse_scheme(request.scheme)
    params = request.params.to_params()
    if params.n_hops != params.m_hops:
        raise HTTPException(
            status_code=422,
            detail="the simulated topology is symmetric; n_hops must equal m_hops",
        )
    flow = request.flow.to_flow(params)
    trace = TraceLog() if request.include_trace else None
    metrics = simulate_handover(scheme, params, trace=trace, flow=flow)
    breakdown = (
        DelayBreakdownModel.from_breakdown(metrics.breakdown)
        if metrics.breakdown is not None
        else None
    )
    return SimulateResponse(
        scheme=scheme.value,
        breakdown=breakdown,
        detach_at_ms=metrics.detach_at_ms,
        completion_at_ms=None if metrics.failed else metrics.completion_at_ms,
        rsvp_message_count=metrics.rsvp_message_count,
        pbu_pba_count=metrics.pbu_pba_count,
        packets_sent=metrics.packets_sent,
        packets_lost=metrics.packets_lost,
        packets_delivered_before=metrics.packets_delivered_before,
        packets_delivered_after=metrics.packets_delivered_after,
        label_misses=metrics.label_misses,
        failure=metrics.failure,
        trace=trace.text() if trace is not None else None,
    )


@app.post("/sweep", response_model=SweepResponse)
def sweep(request: SweepRequest) -> SweepResponse:
    schemes = tuple(_parse_scheme(name) for name in request.schemes)
    params = request.params.to_params()
    overrides: dict[HandoverScheme, dict[str, object]] = {}
    for name, values in request.scheme_overrides.items():
        cleaned = {
            key: tuple(value) if isinstance(value, list) else value
            for key, value in values.items()
        }
        overrides[_parse_scheme(name)] = cleaned
    try:
        config = ScenarioConfig(
            schemes=schemes,
            hop_min=request.hop_min,
            hop_max=request.hop_max,
            m_hops=request.m_hops,
            params=params,
            scheme_overrides=overrides,
            simulate=request.simulate,
            trace=request.trace,
            analytic_only=request.analytic_only,
        )
        result = run_sweep(config)
    except (TypeError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None
    return SweepResponse(
        csv=result.csv,
        rows=result.rows,
        warnings=result.warnings,
        traces=result.traces,
    )


@app.get("/overhead-table", response_class=PlainTextResponse)
def overhead_table() -> str:
    return overhead_table_text()


@app.get("/overhead-rows", response_model=list[OverheadRow])
def overhead_table_rows() -> list[OverheadRow]:
    return [
        OverheadRow(mechanism=name, overhead_bytes=size, description=description)
        for name, size, description in overhead_rows()
    ]
