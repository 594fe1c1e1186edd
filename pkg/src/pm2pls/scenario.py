"""Scheme orchestration: one topology, one event loop, one measured handover.

A :class:`HandoverScenario` owns the simulator, the trace log, the MPLS data
plane (when the scheme uses one), the RSVP-TE signaling machine and one agent
per gateway/anchor.  ``setup()`` performs the initial attachment (plus tunnel
pre-establishment for the warm scheme), ``run_handover()`` detaches the
mobile node, replays the link-layer phases, lets the agents re-register it at
the target gateway and measures every component of the outage.

A constant bit rate downlink flow runs across the handover so packet loss is
observable: packets generated while the node has no usable address are counted
lost at the source (nobody buffers them), everything else is forwarded hop by
hop through whichever data plane the scheme configured, so tunnel overhead
bytes show up in the trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .analytic import DelayBreakdown
from .engine import Simulator, TraceLog, as_time
from .mpls import (
    IMPLICIT_NULL,
    INITIAL_TTL,
    IPV6_HEADER_BYTES,
    Fec,
    Label,
    LabelAllocator,
    LabeledPacket,
    LabelForwardingTables,
    LabelMissError,
    LfibAction,
    MplsError,
    MplsHeader,
    TtlExpiredError,
)
from .params import HandoverScheme, TimingParameters
from .pmipv6 import (
    ConfigurationError,
    HandoverRecorder,
    LocalMobilityAnchorAgent,
    MobileAccessGatewayAgent,
    MobileNodeProfile,
)
from .rsvp import RsvpSignaling
from .topology import MPLS_ROLES, NodeRole, Topology, build_linear_topology

# gateways deliver decapsulated traffic toward the access side on this port
ACCESS_INTERFACE = 1


@dataclass(frozen=True)
class DataFlow:
    """Downlink constant bit rate flow riding across the handover."""

    rate_packets_per_s: float = 170.0
    packet_size_bytes: int = 100
    post_handover_packets: int = 3      # generated after completion, then stop

    def __post_init__(self) -> None:
        if self.rate_packets_per_s < 0:
            raise ValueError("rate_packets_per_s must be >= 0")
        if self.packet_size_bytes <= 0:
            raise ValueError("packet_size_bytes must be > 0")
        if self.post_handover_packets < 0:
            raise ValueError("post_handover_packets must be >= 0")


@dataclass
class _FlowCounters:
    sent: int = 0
    lost: int = 0
    delivered_before: int = 0   # generated before detach
    delivered_after: int = 0    # generated at/after completion
    label_misses: int = 0


@dataclass(frozen=True)
class HandoverMetrics:
    """Everything measured across one handover."""

    scheme: HandoverScheme
    breakdown: DelayBreakdown | None    # None when the handover failed
    detach_at_ms: float
    completion_at_ms: float             # NaN when the handover failed
    rsvp_message_count: int             # Path+Resv messages inside the window
    pbu_pba_count: int
    packets_sent: int
    packets_lost: int
    packets_delivered_before: int
    packets_delivered_after: int
    label_misses: int
    failure: str | None = None

    @property
    def failed(self) -> bool:
        return self.failure is not None

    @property
    def t_ho_ms(self) -> float:
        return self.breakdown.t_ho_ms if self.breakdown is not None else math.nan


@dataclass(frozen=True)
class _MsTimings:
    """TimingParameters converted once to exact millisecond Fractions."""

    alpha_rp: Fraction
    beta_rp: Fraction
    alpha_mag: Fraction
    beta_mag: Fraction
    alpha_lma: Fraction
    beta_lma: Fraction
    alpha_aaa_server: Fraction
    t_aaa_req: Fraction
    t_aaa_resp: Fraction
    t_wl: Fraction
    t_ap_mag: Fraction
    t_scanning: Fraction
    t_authentication: Fraction
    t_association: Fraction
    t_aaa_override: Fraction | None

    @classmethod
    def from_params(cls, p: TimingParameters) -> "_MsTimings":
        return cls(
            alpha_rp=as_time(p.alpha_rp_ms),
            beta_rp=as_time(p.beta_rp_ms),
            alpha_mag=as_time(p.alpha_mag_ms),
            beta_mag=as_time(p.beta_mag_ms),
            alpha_lma=as_time(p.alpha_lma_ms),
            beta_lma=as_time(p.beta_lma_ms),
            alpha_aaa_server=as_time(p.alpha_aaa_server_ms),
            t_aaa_req=as_time(p.t_aaa_req_ms),
            t_aaa_resp=as_time(p.t_aaa_resp_ms),
            t_wl=as_time(p.t_wl_ms),
            t_ap_mag=as_time(p.t_ap_mag_ms),
            t_scanning=as_time(p.t_scanning_ms),
            t_authentication=as_time(p.t_authentication_ms),
            t_association=as_time(p.t_association_ms),
            t_aaa_override=(
                None if p.t_aaa_override_ms is None else as_time(p.t_aaa_override_ms)
            ),
        )


class HandoverScenario:
    """A mobility domain instance ready to run handovers."""

    def __init__(
        self,
        scheme: HandoverScheme | str,
        topology: Topology,
        params: TimingParameters | None = None,
        trace: TraceLog | None = None,
        flow: DataFlow | None = None,
    ) -> None:
        if isinstance(scheme, str):
            scheme = HandoverScheme.parse(scheme)
        self.scheme = scheme
        self.topology = topology
        self.params = params or TimingParameters()
        self.p = _MsTimings.from_params(self.params)
        self.sim = Simulator()
        self.trace = trace if trace is not None else TraceLog()
        self.flow = flow or DataFlow(
            rate_packets_per_s=self.params.lambda_pr_packets_per_s
        )

        self.uses_mpls = scheme is not HandoverScheme.PMIPV6
        # in the non-integrated scheme each LSP setup completes inside the
        # registration exchange rather than overlapping it
        self.serialized_lsp_setup = scheme is HandoverScheme.PMIPV6_MPLS

        self.tables: LabelForwardingTables | None = None
        self.allocator: LabelAllocator | None = None
        self.rsvp: RsvpSignaling | None = None
        if self.uses_mpls:
            mpls_nodes = [n.id for n in topology.nodes if n.role in MPLS_ROLES]
            self.tables = LabelForwardingTables(mpls_nodes)
            self.allocator = LabelAllocator(mpls_nodes)
            self.rsvp = RsvpSignaling(
                self.sim,
                topology,
                self.tables,
                self.allocator,
                self.params.alpha_rp_ms,
                trace=self.trace,
            )

        self.lma_agents = {
            nid: LocalMobilityAnchorAgent(nid, self)
            for nid in sorted(topology.nodes_by_role(NodeRole.LMA_LER))
        }
        self.mag_agents = {
            nid: MobileAccessGatewayAgent(nid, self)
            for nid in sorted(topology.nodes_by_role(NodeRole.MAG_LER))
        }
        cns = sorted(topology.nodes_by_role(NodeRole.CN))
        self._cn_id = cns[0] if cns else None

        self.recorder = HandoverRecorder()      # inert until run_handover
        self._counters = _FlowCounters()
        self._detach_at: Fraction | None = None
        self._rsvp_snapshot = 0
        self._mn_detached: set[str] = set()
        self._mn_prefix: dict[str, str] = {}
        self._vp_labels: dict[tuple[str, str], Label] = {}

        self._profiles: dict[str, MobileNodeProfile] = {}
        self._lma_of: dict[str, str] = {}
        lmas = sorted(self.lma_agents)
        if lmas:
            mns = sorted(topology.nodes_by_role(NodeRole.MN))
            for index, mn_id in enumerate(mns, start=1):
                self.register_mobile_node(
                    MobileNodeProfile(
                        mn_id=mn_id,
                        home_network_prefix=f"2001:db8:{index}::/64",
                        home_address=f"2001:db8:{index}::1",
                    ),
                    lmas[0],
                )

    # -- registry -------------------------------------------------------------

    def register_mobile_node(
        self, profile: MobileNodeProfile, lma_id: str
    ) -> None:
        if lma_id not in self.lma_agents:
            raise ConfigurationError(f"{lma_id} is not an anchor in this topology")
        self._profiles[profile.mn_id] = profile
        self._lma_of[profile.mn_id] = lma_id

    def profile_of(self, mn_id: str) -> MobileNodeProfile:
        try:
            return self._profiles[mn_id]
        except KeyError:
            raise ConfigurationError(f"no profile registered for {mn_id}") from None

    def lma_for(self, mn_id: str) -> str:
        try:
            return self._lma_of[mn_id]
        except KeyError:
            raise ConfigurationError(f"no anchor assigned to {mn_id}") from None

    def advertised_prefix(self, mn_id: str) -> str | None:
        """Prefix the node last saw in a router advertisement."""
        return self._mn_prefix.get(mn_id)

    def tunnel_ready(self, mag_id: str, lma_id: str) -> bool:
        """Both directions of the MAG<->LMA tunnel pair are established."""
        return self.rsvp is not None and self.rsvp.pair_established(lma_id, mag_id)

    # -- lifecycle -------------------------------------------------------------

    def setup(self, mn_ids: list[str] | None = None) -> None:
        """Initial attachment(s); for the warm scheme also pre-establish the
        tunnel pair toward every gateway so the measured handover finds its
        target tunnel already up."""
        if mn_ids is None:
            mn_ids = sorted(self._profiles)
        for mn_id in mn_ids:
            self.trigger_attach(mn_id)
        self.sim.run_until_idle()
        if self.scheme is HandoverScheme.PM2PLS_WARM and self.rsvp is not None:
            for lma_id in self.lma_agents:
                for mag_id in self.mag_agents:
                    self.rsvp.initiate_lsp(lma_id, mag_id)
                    self.rsvp.initiate_lsp(mag_id, lma_id)
            self.sim.run_until_idle()

    def trigger_attach(self, mn_id: str) -> None:
        """Report the node attached at its current access point's gateway."""
        ap_id = self.topology.ap_of(mn_id)
        mag_id = self.topology.mag_of_ap(ap_id)
        self.mag_agents[mag_id].handle_attach(self.profile_of(mn_id))

    def on_rtradv_delivered(self, mn_id: str, prefix: str | None) -> None:
        """The advertisement reached the node: its address is usable again."""
        now = self.sim.now
        if prefix is not None:
            self._mn_prefix[mn_id] = prefix
        self._mn_detached.discard(mn_id)
        self.recorder.mark("complete", now, mn_id)
        profile = self._profiles.get(mn_id)
        address = profile.home_address if profile is not None else "?"
        self.trace.record(
            now, "pmip", mn_id, "rtradv_received",
            f"prefix={prefix} address={address}",
        )

    def run_handover(
        self,
        mn_id: str = "MN1",
        target_ap: str | None = None,
        detach_at_ms: float | None = None,
        flow_phase_ms: float = 0.0,
    ) -> HandoverMetrics:
        """Detach ``mn_id``, hand it to ``target_ap`` and measure the outage.

        ``flow_phase_ms`` starts the downlink flow that much before the
        detach so in-flight losses are exercised; by default the first packet
        departs exactly at the detach instant.
        """
        profile = self.profile_of(mn_id)
        current_ap = self.topology.ap_of(mn_id)
        if target_ap is None:
            others = [
                ap
                for ap in sorted(self.topology.nodes_by_role(NodeRole.AP))
                if ap != current_ap
            ]
            if not others:
                raise ConfigurationError(f"no access point to hand {mn_id} over to")
            target_ap = others[0]
        self.topology.mag_of_ap(target_ap)      # must have a gateway

        phase = as_time(flow_phase_ms)
        if phase < 0:
            raise ValueError("flow_phase_ms must be >= 0")
        detach_at = Fraction(math.ceil(self.sim.now + phase))
        if detach_at_ms is not None:
            detach_at = max(detach_at, as_time(detach_at_ms))

        self.recorder = HandoverRecorder(mn_id=mn_id)
        self._counters = _FlowCounters()
        self._detach_at = detach_at
        # detach is scheduled first so a packet generated at the detach
        # instant already sees the node gone
        self.sim.schedule_at(
            detach_at, lambda: self._begin_detach(mn_id, target_ap)
        )
        if self.flow.rate_packets_per_s > 0:
            gap = Fraction(1000) / as_time(self.flow.rate_packets_per_s)
            self._start_flow(mn_id, detach_at - phase, gap)
        self.sim.run_until_idle()
        return self._collect_metrics(profile)

    # -- handover choreography ---------------------------------------------------

    def _begin_detach(self, mn_id: str, target_ap: str) -> None:
        now = self.sim.now
        self._rsvp_snapshot = self.rsvp.message_count if self.rsvp else 0
        self._mn_detached.add(mn_id)
        old_ap = self.topology.ap_of(mn_id)
        old_mag = self.topology.mag_of_ap(old_ap)
        self.recorder.mark("detach", now, mn_id)
        self.trace.record(now, "l2", mn_id, "detached", f"ap={old_ap}")
        self.mag_agents[old_mag].detach(mn_id)

        def scanning_done() -> None:
            self.trace.record(
                self.sim.now, "l2", mn_id, "scanning_done", f"ap={target_ap}"
            )
            self.sim.schedule_in(self.p.t_authentication, authentication_done)

        def authentication_done() -> None:
            self.trace.record(
                self.sim.now, "l2", mn_id, "authentication_done", f"ap={target_ap}"
            )
            self.sim.schedule_in(self.p.t_association, association_done)

        def association_done() -> None:
            self.trace.record(
                self.sim.now, "l2", mn_id, "association_done", f"ap={target_ap}"
            )
            self._complete_l2_attach(mn_id, target_ap)

        self.trace.record(now, "l2", mn_id, "scanning_started", f"from={old_ap}")
        self.sim.schedule_in(self.p.t_scanning, scanning_done)

    def _complete_l2_attach(self, mn_id: str, target_ap: str) -> None:
        now = self.sim.now
        self.topology.attach(mn_id, target_ap)
        self.recorder.mark("l2_attach", now, mn_id)
        self.trace.record(now, "l2", mn_id, "attached", f"ap={target_ap}")
        new_mag = self.topology.mag_of_ap(target_ap)
        self.mag_agents[new_mag].handle_attach(self.profile_of(mn_id))

    def _collect_metrics(self, profile: MobileNodeProfile) -> HandoverMetrics:
        marks = self.recorder.milestones
        failure = self.recorder.failure
        if failure is None and "complete" not in marks:
            failure = "incomplete"
        breakdown = None
        completion = math.nan
        if failure is None:
            detach = marks["detach"]
            l2_attach = marks["l2_attach"]
            pbu_sent = marks["pbu_sent"]
            pbu_done = marks["pbu_done"]
            pba_sent = marks["pba_sent"]
            pba_done = marks["pba_done"]
            rtradv_sent = marks["rtradv_sent"]
            complete = marks["complete"]
            breakdown = DelayBreakdown(
                scheme=self.scheme,
                t_l2ho_ms=float(l2_attach - detach),
                t_md_ms=0.0,
                t_aaa_ms=float(pbu_sent - l2_attach),
                t_reg_ms=float((pbu_done - pbu_sent) + (pba_done - pba_sent)),
                t_bi_lsp_setup_ms=float(
                    (pba_sent - pbu_done) + (rtradv_sent - pba_done)
                ),
                t_ra_ms=float(complete - rtradv_sent),
                t_l3ho_ms=float(complete - l2_attach),
                t_ho_ms=float(complete - detach),
            )
            completion = float(complete)
        rsvp_messages = (
            self.rsvp.message_count - self._rsvp_snapshot if self.rsvp else 0
        )
        counters = self._counters
        return HandoverMetrics(
            scheme=self.scheme,
            breakdown=breakdown,
            detach_at_ms=float(self._detach_at) if self._detach_at is not None else math.nan,
            completion_at_ms=completion,
            rsvp_message_count=rsvp_messages,
            pbu_pba_count=self.recorder.pbu_pba_messages,
            packets_sent=counters.sent,
            packets_lost=counters.lost,
            packets_delivered_before=counters.delivered_before,
            packets_delivered_after=counters.delivered_after,
            label_misses=counters.label_misses,
            failure=failure,
        )

    # -- downlink data plane ----------------------------------------------------

    def _flow_source(self, mn_id: str) -> str:
        return self._cn_id if self._cn_id is not None else self.lma_for(mn_id)

    def _start_flow(self, mn_id: str, start: Fraction, gap: Fraction) -> None:
        state = {"post": 0, "seq": 0}

        def tick() -> None:
            if self.recorder.failed:
                return
            now = self.sim.now
            complete = self.recorder.milestones.get("complete")
            if complete is not None and now >= complete:
                if state["post"] >= self.flow.post_handover_packets:
                    return
                state["post"] += 1
            seq = state["seq"]
            state["seq"] += 1
            self._counters.sent += 1
            self.trace.record(
                now, "data", self._flow_source(mn_id), "cbr_generated",
                f"mn={mn_id} seq={seq} bytes={self.flow.packet_size_bytes}",
            )
            if mn_id in self._mn_detached:
                # nobody buffers for a node that currently has no address
                self._counters.lost += 1
                self.trace.record(
                    now, "data", self._flow_source(mn_id), "cbr_lost",
                    f"mn={mn_id} seq={seq} reason=blackout",
                )
            else:
                self._route_data_packet(mn_id, seq, now)
            self.sim.schedule_in(gap, tick)

        self.sim.schedule_at(start, tick)

    def _route_data_packet(self, mn_id: str, seq: int, gen_t: Fraction) -> None:
        lma_id = self.lma_for(mn_id)
        source = self._flow_source(mn_id)
        if source == lma_id:
            self._tunnel_ingress(mn_id, seq, gen_t, lma_id)
            return
        route = self.topology.route(source, lma_id)
        self._walk_route(
            mn_id, seq, route, 0,
            lambda: self._tunnel_ingress(mn_id, seq, gen_t, lma_id),
        )

    def _walk_route(self, mn_id, seq, route, index, on_arrival) -> None:
        node = route[index]
        if index == len(route) - 1:
            on_arrival()
            return
        if index > 0:
            self.trace.record(
                self.sim.now, "data", node, "ip_forward", f"mn={mn_id} seq={seq}"
            )
        delay = as_time(self.topology.directed_delay_ms(node, route[index + 1]))
        self.sim.schedule_in(
            delay,
            lambda: self._walk_route(mn_id, seq, route, index + 1, on_arrival),
        )

    def _tunnel_ingress(self, mn_id: str, seq: int, gen_t: Fraction, lma_id: str) -> None:
        now = self.sim.now
        entry = self.lma_agents[lma_id].binding_cache.get(mn_id)
        if entry is None:
            self._lose(lma_id, mn_id, seq, "no-binding")
            return
        mag_id = entry.proxy_care_of_address
        if not self.uses_mpls:
            self.trace.record(
                now, "data", lma_id, "tunnel_encap",
                f"mn={mn_id} seq={seq} encap=IPv6-in-IPv6 "
                f"overhead_bytes={IPV6_HEADER_BYTES}",
            )
            route = self.topology.route(lma_id, mag_id)
            self._walk_route(
                mn_id, seq, route, 0,
                lambda: self._ip_tunnel_egress(mn_id, seq, gen_t, mag_id),
            )
            return

        fec = Fec(lma_id, mag_id)
        packet = LabeledPacket(
            destination=mn_id, fec=fec, payload_bytes=self.flow.packet_size_bytes
        )
        assert self.tables is not None
        ftn = self.tables.ftn_entry(lma_id, fec)
        if ftn is None:
            self._counters.label_misses += 1
            self._lose(lma_id, mn_id, seq, "label-miss")
            return
        if self.serialized_lsp_setup:
            # non-integrated data plane: an inner demultiplexer label names the
            # mobility tunnel inside the transport LSP, one extra header
            vp = self._vp_label_for(lma_id, mag_id)
            packet = packet.pushed(
                MplsHeader(label=vp, bottom_of_stack=True, ttl=INITIAL_TTL)
            )
        if ftn.out_label != IMPLICIT_NULL:
            packet = packet.pushed(
                MplsHeader(
                    label=ftn.out_label,
                    bottom_of_stack=not packet.label_stack,
                    ttl=INITIAL_TTL,
                )
            )
        self.trace.record(
            now, "data", lma_id, "tunnel_encap",
            f"mn={mn_id} seq={seq} fec={fec.name} "
            f"label_stack={len(packet.label_stack)} "
            f"overhead_bytes={packet.mpls_overhead_bytes}",
        )
        next_node, link = self.topology.neighbor_via(lma_id, ftn.out_interface)
        self.sim.schedule_in(
            as_time(link.delay_from(lma_id)),
            lambda: self._mpls_hop(
                mn_id, seq, gen_t, packet, next_node, link.iface_of(next_node), mag_id
            ),
        )

    def _mpls_hop(
        self,
        mn_id: str,
        seq: int,
        gen_t: Fraction,
        packet: LabeledPacket,
        node: str,
        arrival_iface: int,
        mag_id: str,
    ) -> None:
        now = self.sim.now
        assert self.tables is not None
        if node == mag_id:
            if packet.label_stack:
                # demultiplexer label of the non-integrated scheme; the
                # transport label itself was removed one hop earlier
                top = packet.top_label
                try:
                    _iface, packet = self.tables.forward(node, packet, arrival_iface)
                except MplsError:
                    self._counters.label_misses += 1
                    self._lose(node, mn_id, seq, "label-miss")
                    return
                self.trace.record(
                    now, "data", node, "vp_label_pop",
                    f"mn={mn_id} seq={seq} label={top.value}",
                )
            self.trace.record(
                now, "data", node, "tunnel_decap",
                f"mn={mn_id} seq={seq} label_stack={len(packet.label_stack)} "
                f"overhead_bytes={packet.mpls_overhead_bytes}",
            )
            self._deliver_from_mag(mn_id, seq, gen_t, node)
            return
        try:
            out_iface, forwarded = self.tables.forward(node, packet, arrival_iface)
        except LabelMissError:
            self._counters.label_misses += 1
            self._lose(node, mn_id, seq, "label-miss")
            return
        except TtlExpiredError:
            self._lose(node, mn_id, seq, "ttl-expired")
            return
        if len(forwarded.label_stack) < len(packet.label_stack):
            self.trace.record(
                now, "data", node, "mpls_pop",
                f"mn={mn_id} seq={seq} label={packet.top_label.value} "
                f"label_stack={len(forwarded.label_stack)}",
            )
        else:
            self.trace.record(
                now, "data", node, "mpls_swap",
                f"mn={mn_id} seq={seq} in={packet.top_label.value} "
                f"out={forwarded.top_label.value}",
            )
        next_node, link = self.topology.neighbor_via(node, out_iface)
        self.sim.schedule_in(
            as_time(link.delay_from(node)),
            lambda: self._mpls_hop(
                mn_id, seq, gen_t, forwarded, next_node,
                link.iface_of(next_node), mag_id,
            ),
        )

    def _ip_tunnel_egress(self, mn_id: str, seq: int, gen_t: Fraction, mag_id: str) -> None:
        self.trace.record(
            self.sim.now, "data", mag_id, "tunnel_decap",
            f"mn={mn_id} seq={seq} encap=IPv6-in-IPv6 "
            f"overhead_bytes={IPV6_HEADER_BYTES}",
        )
        self._deliver_from_mag(mn_id, seq, gen_t, mag_id)

    def _deliver_from_mag(self, mn_id: str, seq: int, gen_t: Fraction, mag_id: str) -> None:
        agent = self.mag_agents[mag_id]
        if mn_id not in agent.binding_update_list:
            self._lose(mag_id, mn_id, seq, "no-binding")
            return
        ap_id = self.topology.ap_of(mn_id)
        if self.topology.mag_of_ap(ap_id) != mag_id:
            self._lose(mag_id, mn_id, seq, "stale-route")
            return

        def at_access_point() -> None:
            self.trace.record(
                self.sim.now, "data", ap_id, "data_forward", f"mn={mn_id} seq={seq}"
            )
            self.sim.schedule_in(self.p.t_wl, at_mobile_node)

        def at_mobile_node() -> None:
            now = self.sim.now
            if mn_id in self._mn_detached:
                self._counters.lost += 1
                self.trace.record(
                    now, "data", mn_id, "cbr_lost",
                    f"mn={mn_id} seq={seq} reason=detached",
                )
                return
            if self._detach_at is not None and gen_t < self._detach_at:
                self._counters.delivered_before += 1
            else:
                self._counters.delivered_after += 1
            self.trace.record(
                now, "data", mn_id, "cbr_delivered",
                f"mn={mn_id} seq={seq} latency_ms={float(now - gen_t):.6f}",
            )

        self.sim.schedule_in(self.p.t_ap_mag, at_access_point)

    def _lose(self, node: str, mn_id: str, seq: int, reason: str) -> None:
        self._counters.lost += 1
        self.trace.record(
            self.sim.now, "data", node, "cbr_dropped",
            f"mn={mn_id} seq={seq} reason={reason}",
        )

    def _vp_label_for(self, lma_id: str, mag_id: str) -> Label:
        """Egress-allocated demultiplexer label for one mobility tunnel."""
        key = (lma_id, mag_id)
        label = self._vp_labels.get(key)
        if label is None:
            assert self.allocator is not None and self.tables is not None
            label = self.allocator.allocate(mag_id)
            route = self.topology.route(lma_id, mag_id)
            last_link = self.topology.link_between(route[-2], route[-1])
            self.tables.install_lfib(
                mag_id,
                label,
                last_link.iface_of(mag_id),
                LfibAction.pop(ACCESS_INTERFACE),
                fec=Fec(lma_id, mag_id),
            )
            self._vp_labels[key] = label
        return label


def simulate_handover(
    scheme: HandoverScheme | str,
    params: TimingParameters | None = None,
    trace: TraceLog | None = None,
    flow: DataFlow | None = None,
) -> HandoverMetrics:
    """Build the symmetric reference topology, run one handover, return metrics."""
    params = params or TimingParameters()
    if params.n_hops != params.m_hops:
        raise ValueError(
            "the generated topology is symmetric: n_hops must equal m_hops "
            "(the analytic model handles asymmetric paths)"
        )
    topology = build_linear_topology(params.n_hops, params)
    scenario = HandoverScenario(scheme, topology, params, trace=trace, flow=flow)
    scenario.setup()
    return scenario.run_handover()
