"""PMIPv6 control plane: binding state and the registration message flow.

The LMA keeps a Binding Cache mapping each mobile node to its serving MAG
(the proxy care-of address); each MAG keeps a Binding Update List for the
nodes it serves.  Mobility is network-based: the mobile node never signals,
it just sees the same home network prefix re-advertised after every move, so
its address survives handovers unchanged.

Registration is one PBU/PBA round trip, preceded by an AAA query that gives
the MAG the node's profile, and followed by a router advertisement that
re-creates the home link on the new access point.  Agents charge per-hop and
endpoint processing according to whether the exchange rides an established
label-switched tunnel (beta constants) or plain IP forwarding (alphas).
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING, Callable

from .engine import as_time
from .mpls import Fec
from .rsvp import LspSetupTrigger

if TYPE_CHECKING:  # pragma: no cover
    from .scenario import HandoverScenario


class ConfigurationError(Exception):
    """The mobility domain is missing information it needs to operate."""


# PBA status codes (zero means accepted)
PBA_ACCEPTED = 0
PBA_NOT_AUTHORIZED = 129


@dataclass(frozen=True)
class MobileNodeProfile:
    """Stable identity of one mobile node within the domain."""

    mn_id: str
    home_network_prefix: str
    home_address: str

    def __post_init__(self) -> None:
        network = ipaddress.ip_network(self.home_network_prefix)
        address = ipaddress.ip_address(self.home_address)
        if address not in network:
            raise ValueError(
                f"home address {self.home_address} is outside prefix "
                f"{self.home_network_prefix}"
            )


@dataclass
class BindingCacheEntry:
    mn_id: str
    home_network_prefix: str
    proxy_care_of_address: str      # serving MAG
    registered_at: Fraction


@dataclass
class BindingUpdateListEntry:
    mn_id: str
    lma_address: str
    registered_at: Fraction


class MessageKind(str, Enum):
    PBU = "pbu"
    PBA = "pba"
    RTR_SOL = "rtr_sol"         # defined for completeness; not on the critical path
    RTR_ADV = "rtr_adv"
    AAA_REQUEST = "aaa_request"
    AAA_RESPONSE = "aaa_response"


@dataclass(frozen=True)
class MobilityMessage:
    kind: MessageKind
    mn_id: str
    sender: str
    status: int = PBA_ACCEPTED
    home_network_prefix: str | None = None
    malformed: bool = False     # test hook: parses as garbage at the receiver


@dataclass
class HandoverRecorder:
    """Milestones and counters for the one handover under measurement."""

    mn_id: str | None = None
    milestones: dict[str, Fraction] = field(default_factory=dict)
    pbu_pba_messages: int = 0
    failure: str | None = None

    def watching(self, mn_id: str) -> bool:
        return self.mn_id is not None and mn_id == self.mn_id

    def mark(self, name: str, at: Fraction, mn_id: str) -> None:
        if self.watching(mn_id):
            self.milestones[name] = at

    def count_message(self, mn_id: str) -> None:
        if self.watching(mn_id):
            self.pbu_pba_messages += 1

    def fail(self, reason: str, mn_id: str) -> None:
        if self.watching(mn_id) and self.failure is None:
            self.failure = reason

    @property
    def failed(self) -> bool:
        return self.failure is not None


def relay_control_message(
    ctx: "HandoverScenario",
    msg: MobilityMessage,
    path: list[str],
    per_hop_ms: Fraction,
    deliver: Callable[[], None],
) -> None:
    """Hop-by-hop transit: processing at each transmitter, then the link delay."""
    def hop(index: int) -> None:
        frm, to = path[index], path[index + 1]
        event = f"{msg.kind.value}_sent" if index == 0 else f"{msg.kind.value}_forward"
        ctx.trace.record(ctx.sim.now, "pmip", frm, event, f"mn={msg.mn_id} to={to}")
        delay = per_hop_ms + as_time(ctx.topology.directed_delay_ms(frm, to))
        if index + 1 == len(path) - 1:
            ctx.sim.schedule_in(delay, deliver)
        else:
            ctx.sim.schedule_in(delay, lambda: hop(index + 1))

    hop(0)


class LocalMobilityAnchorAgent:
    """Anchor-side behavior: accept registrations, answer with PBAs."""

    def __init__(self, node_id: str, ctx: "HandoverScenario") -> None:
        self.node_id = node_id
        self.ctx = ctx
        self.binding_cache: dict[str, BindingCacheEntry] = {}

    def handle_pbu(self, msg: MobilityMessage) -> None:
        ctx = self.ctx
        mag_id = msg.sender
        ctx.trace.record(
            ctx.sim.now, "pmip", self.node_id, "pbu_received",
            f"mn={msg.mn_id} from={mag_id}",
        )
        riding_lsp = ctx.tunnel_ready(mag_id, self.node_id)
        charge = ctx.p.beta_lma if riding_lsp else ctx.p.alpha_lma
        ctx.sim.schedule_in(charge, lambda: self._pbu_processed(msg, mag_id))

    def _pbu_processed(self, msg: MobilityMessage, mag_id: str) -> None:
        ctx = self.ctx
        now = ctx.sim.now
        if msg.malformed:
            ctx.trace.record(
                now, "pmip", self.node_id, "pbu_rejected", f"mn={msg.mn_id}"
            )
            self._send_pba(msg.mn_id, mag_id, PBA_NOT_AUTHORIZED, None)
            return
        profile = ctx.profile_of(msg.mn_id)
        self.binding_cache[msg.mn_id] = BindingCacheEntry(
            mn_id=msg.mn_id,
            home_network_prefix=profile.home_network_prefix,
            proxy_care_of_address=mag_id,
            registered_at=now,
        )
        ctx.recorder.mark("pbu_done", now, msg.mn_id)
        ctx.trace.record(
            now, "pmip", self.node_id, "bc_updated",
            f"mn={msg.mn_id} coa={mag_id} prefix={profile.home_network_prefix}",
        )
        if ctx.rsvp is not None and ctx.serialized_lsp_setup:
            # encapsulated mode: the acknowledgement waits for this side's LSP
            fec = Fec(self.node_id, mag_id)
            ctx.rsvp.initiate_lsp(self.node_id, mag_id)
            ctx.rsvp.on_established(
                fec,
                lambda _tunnel: self._send_pba(
                    msg.mn_id, mag_id, PBA_ACCEPTED, profile.home_network_prefix
                ),
            )
            return
        self._send_pba(msg.mn_id, mag_id, PBA_ACCEPTED, profile.home_network_prefix)
        if ctx.rsvp is not None:
            # integrated mode: start this side's LSP without waiting for the
            # acknowledgement to arrive, overlapping the two setups
            ctx.rsvp.ensure_bidirectional(
                self.node_id, mag_id, LspSetupTrigger.FROM_LMA_AFTER_PBA
            )

    def _send_pba(
        self, mn_id: str, mag_id: str, status: int, prefix: str | None
    ) -> None:
        ctx = self.ctx
        ctx.recorder.mark("pba_sent", ctx.sim.now, mn_id)
        ctx.recorder.count_message(mn_id)
        msg = MobilityMessage(
            kind=MessageKind.PBA,
            mn_id=mn_id,
            sender=self.node_id,
            status=status,
            home_network_prefix=prefix,
        )
        per_hop = (
            ctx.p.beta_rp
            if ctx.tunnel_ready(mag_id, self.node_id)
            else ctx.p.alpha_rp
        )
        path = ctx.topology.route(self.node_id, mag_id)
        relay_control_message(
            ctx, msg, path, per_hop, lambda: ctx.mag_agents[mag_id].handle_pba(msg)
        )


class MobileAccessGatewayAgent:
    """Gateway-side behavior: detect attachment, register, emulate the home link."""

    def __init__(self, node_id: str, ctx: "HandoverScenario") -> None:
        self.node_id = node_id
        self.ctx = ctx
        self.binding_update_list: dict[str, BindingUpdateListEntry] = {}
        self.reject_mn_ids: set[str] = set()    # AAA rejection test hook

    # -- attachment / AAA ---------------------------------------------------

    def handle_attach(self, profile: MobileNodeProfile) -> None:
        """Link layer reports the mobile node attached; query AAA, then register."""
        ctx = self.ctx
        lma_id = ctx.lma_for(profile.mn_id)     # ConfigurationError if unknown
        ctx.trace.record(
            ctx.sim.now, "aaa", self.node_id, "aaa_request_sent",
            f"mn={profile.mn_id}",
        )
        if ctx.p.t_aaa_override is not None:
            # summary-value mode: one opaque exchange of the configured length
            ctx.sim.schedule_in(
                ctx.p.t_aaa_override, lambda: self._aaa_done(profile, lma_id)
            )
            return

        def server_received() -> None:
            ctx.trace.record(
                ctx.sim.now, "aaa", "AAA", "aaa_request_received",
                f"mn={profile.mn_id}",
            )
            ctx.sim.schedule_in(ctx.p.alpha_aaa_server, server_responded)

        def server_responded() -> None:
            ctx.trace.record(
                ctx.sim.now, "aaa", "AAA", "aaa_response_sent",
                f"mn={profile.mn_id}",
            )
            ctx.sim.schedule_in(
                ctx.p.t_aaa_resp, lambda: self._aaa_done(profile, lma_id)
            )

        ctx.sim.schedule_in(ctx.p.t_aaa_req, server_received)

    def _aaa_done(self, profile: MobileNodeProfile, lma_id: str) -> None:
        ctx = self.ctx
        if profile.mn_id in self.reject_mn_ids:
            ctx.trace.record(
                ctx.sim.now, "aaa", self.node_id, "aaa_rejected",
                f"mn={profile.mn_id}",
            )
            ctx.recorder.fail("aaa-rejected", profile.mn_id)
            return
        ctx.trace.record(
            ctx.sim.now, "aaa", self.node_id, "aaa_response_received",
            f"mn={profile.mn_id}",
        )
        self._send_pbu(profile, lma_id)

    # -- registration ---------------------------------------------------------

    def _send_pbu(self, profile: MobileNodeProfile, lma_id: str) -> None:
        ctx = self.ctx
        ctx.recorder.mark("pbu_sent", ctx.sim.now, profile.mn_id)
        ctx.recorder.count_message(profile.mn_id)
        msg = MobilityMessage(
            kind=MessageKind.PBU, mn_id=profile.mn_id, sender=self.node_id
        )
        per_hop = (
            ctx.p.beta_rp
            if ctx.tunnel_ready(self.node_id, lma_id)
            else ctx.p.alpha_rp
        )
        path = ctx.topology.route(self.node_id, lma_id)
        relay_control_message(
            ctx, msg, path, per_hop, lambda: ctx.lma_agents[lma_id].handle_pbu(msg)
        )

    def handle_pba(self, msg: MobilityMessage) -> None:
        ctx = self.ctx
        ctx.trace.record(
            ctx.sim.now, "pmip", self.node_id, "pba_received",
            f"mn={msg.mn_id} status={msg.status}",
        )
        riding_lsp = ctx.tunnel_ready(self.node_id, msg.sender)
        charge = ctx.p.beta_mag if riding_lsp else ctx.p.alpha_mag
        ctx.sim.schedule_in(charge, lambda: self._pba_processed(msg))

    def _pba_processed(self, msg: MobilityMessage) -> None:
        ctx = self.ctx
        now = ctx.sim.now
        ctx.recorder.mark("pba_done", now, msg.mn_id)
        if msg.status != PBA_ACCEPTED:
            ctx.trace.record(
                now, "pmip", self.node_id, "binding_rejected",
                f"mn={msg.mn_id} status={msg.status}",
            )
            ctx.recorder.fail(f"pba-status-{msg.status}", msg.mn_id)
            return
        self.binding_update_list[msg.mn_id] = BindingUpdateListEntry(
            mn_id=msg.mn_id, lma_address=msg.sender, registered_at=now
        )
        ctx.trace.record(
            now, "pmip", self.node_id, "bul_updated",
            f"mn={msg.mn_id} lma={msg.sender}",
        )
        if ctx.rsvp is None:
            self._send_rtradv(msg)
            return
        ctx.rsvp.ensure_bidirectional(
            msg.sender, self.node_id, LspSetupTrigger.FROM_MAG_AFTER_PBA
        )
        uplink = Fec(self.node_id, msg.sender)
        if ctx.rsvp.established(uplink):
            self._send_rtradv(msg)
        else:
            ctx.rsvp.on_established(uplink, lambda _tunnel: self._send_rtradv(msg))

    def detach(self, mn_id: str) -> None:
        """Silent removal; the node left and no deregistration is signaled."""
        if self.binding_update_list.pop(mn_id, None) is not None:
            self.ctx.trace.record(
                self.ctx.sim.now, "pmip", self.node_id, "bul_removed", f"mn={mn_id}"
            )

    # -- home link emulation ---------------------------------------------------

    def _send_rtradv(self, msg: MobilityMessage) -> None:
        ctx = self.ctx
        ctx.recorder.mark("rtradv_sent", ctx.sim.now, msg.mn_id)
        ctx.trace.record(
            ctx.sim.now, "pmip", self.node_id, "rtradv_sent",
            f"mn={msg.mn_id} prefix={msg.home_network_prefix}",
        )
        ap_id = ctx.topology.ap_of(msg.mn_id)

        def at_access_point() -> None:
            ctx.trace.record(
                ctx.sim.now, "pmip", ap_id, "rtradv_forward", f"mn={msg.mn_id}"
            )
            ctx.sim.schedule_in(
                ctx.p.t_wl,
                lambda: ctx.on_rtradv_delivered(msg.mn_id, msg.home_network_prefix),
            )

        ctx.sim.schedule_in(ctx.p.t_ap_mag, at_access_point)
