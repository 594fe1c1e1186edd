"""Closed-form handover delay and packet loss model.

Every function returns milliseconds (or packets for the loss model) computed
directly from a :class:`~pm2pls.params.TimingParameters`.  The event simulator
in :mod:`pm2pls.scenario` reproduces these numbers by construction; the
acceptance suite holds both sides to that.

Total handover time decomposes as

    t_ho = t_l2ho + t_md + t_l3ho

with movement detection t_md = 0 (the new MAG learns of the attachment from
the link layer) and

    t_l3ho = t_aaa + t_reg [+ lsp setup, scheme dependent] + t_ra

where t_reg is the PBU/PBA round trip and t_ra the router advertisement leg
(MAG -> AP -> MN) that re-creates the home link.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .l2 import l2_handover_delay, phases_from_params
from .params import HandoverScheme, TimingParameters


@dataclass(frozen=True)
class DelayBreakdown:
    """Per-component handover delay, all milliseconds."""

    scheme: HandoverScheme
    t_l2ho_ms: float
    t_md_ms: float
    t_aaa_ms: float
    t_reg_ms: float
    t_bi_lsp_setup_ms: float
    t_ra_ms: float
    t_l3ho_ms: float
    t_ho_ms: float


class PacketLoss(NamedTuple):
    expected: float     # real-valued expectation, packets
    ceiling: int        # whole packets actually unroutable


def t_aaa(params: TimingParameters) -> float:
    """Authentication delay at attachment: request + response + server time.

    ``t_aaa_override_ms`` substitutes the published summary value when set.
    """
    if params.t_aaa_override_ms is not None:
        return params.t_aaa_override_ms
    return params.t_aaa_req_ms + params.t_aaa_resp_ms + params.alpha_aaa_server_ms


def t_reg_mpls(params: TimingParameters) -> float:
    """PBU/PBA round trip when both messages ride an established LSP.

    Transit is the per-link propagation both ways plus label-switching time
    beta_rp at each of the n+m forwarding hops, plus the endpoint processing
    at the LMA (PBU) and the MAG (PBA).
    """
    return (
        sum(params.mag_to_lma_delays())
        + sum(params.lma_to_mag_delays())
        + (params.n_hops + params.m_hops) * params.beta_rp_ms
        + params.beta_lma_ms
        + params.beta_mag_ms
    )


def t_reg_ip(params: TimingParameters) -> float:
    """PBU/PBA round trip over plain IP forwarding (no tunnel yet)."""
    return (
        sum(params.mag_to_lma_delays())
        + sum(params.lma_to_mag_delays())
        + (params.n_hops + params.m_hops) * params.alpha_rp_ms
        + params.alpha_lma_ms
        + params.alpha_mag_ms
    )


def t_bi_lsp_setup(params: TimingParameters) -> float:
    """One bidirectional LSP establishment: a signaling round trip.

    The reservation pass binds labels hop by hop, so the cost is one full
    traversal each way plus alpha_rp per forwarding hop.  In the integrated
    scheme the two unidirectional setups overlap, so one round trip bounds
    the whole bidirectional establishment.
    """
    return (
        sum(params.mag_to_lma_delays())
        + sum(params.lma_to_mag_delays())
        + (params.n_hops + params.m_hops) * params.alpha_rp_ms
    )


def t_ra(params: TimingParameters) -> float:
    """Router advertisement leg: MAG to AP, then the wireless link."""
    return params.t_ap_mag_ms + params.t_wl_ms


def t_l3ho(scheme: HandoverScheme, params: TimingParameters) -> float:
    aaa = t_aaa(params)
    adv = t_ra(params)
    if scheme is HandoverScheme.PM2PLS_WARM:
        return aaa + t_reg_mpls(params) + adv
    if scheme is HandoverScheme.PMIPV6:
        return aaa + t_reg_ip(params) + adv
    if scheme is HandoverScheme.PM2PLS_COLD:
        return aaa + t_reg_ip(params) + t_bi_lsp_setup(params) + adv
    if scheme is HandoverScheme.PMIPV6_MPLS:
        # both unidirectional LSPs set up serially inside the registration
        return aaa + t_reg_ip(params) + 2.0 * t_bi_lsp_setup(params) + adv
    raise ValueError(f"unknown scheme: {scheme}")


def t_ho(scheme: HandoverScheme, params: TimingParameters) -> DelayBreakdown:
    """Full handover breakdown for one scheme."""
    l2 = l2_handover_delay(phases_from_params(params))
    aaa = t_aaa(params)
    adv = t_ra(params)
    if scheme is HandoverScheme.PM2PLS_WARM:
        reg, lsp = t_reg_mpls(params), 0.0
    elif scheme is HandoverScheme.PMIPV6:
        reg, lsp = t_reg_ip(params), 0.0
    elif scheme is HandoverScheme.PM2PLS_COLD:
        reg, lsp = t_reg_ip(params), t_bi_lsp_setup(params)
    elif scheme is HandoverScheme.PMIPV6_MPLS:
        reg, lsp = t_reg_ip(params), 2.0 * t_bi_lsp_setup(params)
    else:
        raise ValueError(f"unknown scheme: {scheme}")
    l3 = aaa + reg + lsp + adv
    return DelayBreakdown(
        scheme=scheme,
        t_l2ho_ms=l2,
        t_md_ms=0.0,
        t_aaa_ms=aaa,
        t_reg_ms=reg,
        t_bi_lsp_setup_ms=lsp,
        t_ra_ms=adv,
        t_l3ho_ms=l3,
        t_ho_ms=l2 + l3,
    )


def packet_loss(t_ho_ms: float, lambda_pr_packets_per_s: float) -> PacketLoss:
    """Packets lost while the mobile node is unreachable.

    A constant-rate flow of lambda packets/s loses t_ho * lambda / 1000 packets
    in expectation; the ceiling is the whole-packet count when the first packet
    of the blackout window departs exactly at detach time.
    """
    if t_ho_ms < 0:
        raise ValueError("t_ho_ms must be >= 0")
    if lambda_pr_packets_per_s < 0:
        raise ValueError("lambda_pr_packets_per_s must be >= 0")
    expected = t_ho_ms * lambda_pr_packets_per_s / 1000.0
    return PacketLoss(expected=expected, ceiling=math.ceil(expected))
