"""LSP establishment signaling over the event engine.

One tunnel direction is set up by a Path message traveling ingress to egress
followed by a Resv traveling back; labels bind hop by hop on the Resv pass
(downstream on demand): each node advertises its own incoming label upstream
and installs an ILM entry mapping it to whatever its downstream neighbor
advertised.  The egress advertises implicit-null, so its neighbor installs a
pop (penultimate hop popping) and the ingress ends up with an FTN entry for
the FEC.  A "bidirectional tunnel" is simply the pair of opposite FECs.

Every hop charges the IP per-hop processing time plus the directed link
delay, so a full establishment costs one round trip plus processing at each
forwarding hop.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable

from .engine import Simulator, TraceLog, as_time
from .mpls import (
    IMPLICIT_NULL,
    Fec,
    Label,
    LabelAllocator,
    LabelForwardingTables,
    LfibAction,
)
from .topology import Topology


class LspState(Enum):
    PATH_SENT = "path-sent"
    ESTABLISHED = "established"


class LspSetupTrigger(Enum):
    """Who kicks off a tunnel direction during a binding update exchange."""

    FROM_LMA_AFTER_PBA = "from-lma-after-pba"
    FROM_MAG_AFTER_PBA = "from-mag-after-pba"


@dataclass
class LspTunnel:
    fec: Fec
    path: tuple[str, ...]
    state: LspState
    created_at: Fraction
    established_at: Fraction | None = None
    # hop_labels[i] is the label carried on the wire path[i] -> path[i+1];
    # the final entry is implicit-null (nothing on the last wire under PHP).
    hop_labels: list[Label | None] = field(default_factory=list)


@dataclass
class BidirectionalTunnel:
    """Handle pairing the two unidirectional LSPs between a MAG and the LMA."""

    lma_id: str
    mag_id: str
    downstream: LspTunnel | None    # LMA -> MAG
    upstream: LspTunnel | None      # MAG -> LMA

    @property
    def usable(self) -> bool:
        return (
            self.downstream is not None
            and self.upstream is not None
            and self.downstream.state is LspState.ESTABLISHED
            and self.upstream.state is LspState.ESTABLISHED
        )


class RsvpSignaling:
    """Per-domain signaling state machine driving table installation."""

    def __init__(
        self,
        sim: Simulator,
        topology: Topology,
        tables: LabelForwardingTables,
        allocator: LabelAllocator,
        alpha_rp_ms: float,
        trace: TraceLog | None = None,
    ) -> None:
        self._sim = sim
        self._topology = topology
        self._tables = tables
        self._allocator = allocator
        self._alpha = as_time(alpha_rp_ms)
        self._trace = trace
        self._tunnels: dict[Fec, LspTunnel] = {}
        self._callbacks: dict[Fec, list[Callable[[LspTunnel], None]]] = {}
        self.path_message_count = 0
        self.resv_message_count = 0

    @property
    def message_count(self) -> int:
        return self.path_message_count + self.resv_message_count

    def tunnel(self, fec: Fec) -> LspTunnel | None:
        return self._tunnels.get(fec)

    def established(self, fec: Fec) -> bool:
        tunnel = self._tunnels.get(fec)
        return tunnel is not None and tunnel.state is LspState.ESTABLISHED

    def pair_established(self, lma_id: str, mag_id: str) -> bool:
        return self.established(Fec(lma_id, mag_id)) and self.established(
            Fec(mag_id, lma_id)
        )

    def on_established(
        self, fec: Fec, callback: Callable[[LspTunnel], None]
    ) -> None:
        """Run ``callback`` when the FEC's tunnel is up (immediately if it is)."""
        tunnel = self._tunnels.get(fec)
        if tunnel is not None and tunnel.state is LspState.ESTABLISHED:
            callback(tunnel)
            return
        self._callbacks.setdefault(fec, []).append(callback)

    # -- establishment -------------------------------------------------------

    def initiate_lsp(self, ingress: str, egress: str) -> LspTunnel:
        """Start signaling for one direction; reuses an existing tunnel silently."""
        fec = Fec(ingress, egress)
        existing = self._tunnels.get(fec)
        if existing is not None:
            return existing
        path = tuple(self._topology.route(ingress, egress))
        tunnel = LspTunnel(
            fec=fec,
            path=path,
            state=LspState.PATH_SENT,
            created_at=self._sim.now,
            hop_labels=[None] * (len(path) - 1),
        )
        self._tunnels[fec] = tunnel
        self.path_message_count += 1
        self._forward_path(tunnel, 0)
        return tunnel

    def ensure_bidirectional(
        self, lma_id: str, mag_id: str, trigger: LspSetupTrigger
    ) -> BidirectionalTunnel:
        """Kick off this endpoint's direction of the MAG<->LMA tunnel pair.

        Each endpoint initiates only the LSP it is the ingress of, so the two
        setups overlap when both endpoints react to the binding exchange.
        Idempotent: established or pending directions are left alone.
        """
        if trigger is LspSetupTrigger.FROM_LMA_AFTER_PBA:
            self.initiate_lsp(lma_id, mag_id)
        elif trigger is LspSetupTrigger.FROM_MAG_AFTER_PBA:
            self.initiate_lsp(mag_id, lma_id)
        else:  # pragma: no cover - enum is closed
            raise ValueError(f"unknown trigger {trigger}")
        return BidirectionalTunnel(
            lma_id=lma_id,
            mag_id=mag_id,
            downstream=self._tunnels.get(Fec(lma_id, mag_id)),
            upstream=self._tunnels.get(Fec(mag_id, lma_id)),
        )

    # -- message propagation ---------------------------------------------------

    def _record(self, node: str, event: str, details: str) -> None:
        if self._trace is not None:
            self._trace.record(self._sim.now, "rsvp", node, event, details)

    def _forward_path(self, tunnel: LspTunnel, hop: int) -> None:
        frm, to = tunnel.path[hop], tunnel.path[hop + 1]
        event = "path_sent" if hop == 0 else "path_forward"
        self._record(frm, event, f"fec={tunnel.fec.name} to={to}")
        delay = self._alpha + as_time(self._topology.directed_delay_ms(frm, to))
        if hop + 1 == len(tunnel.path) - 1:
            self._sim.schedule_in(delay, lambda: self._path_reached_egress(tunnel))
        else:
            self._sim.schedule_in(delay, lambda: self._forward_path(tunnel, hop + 1))

    def _path_reached_egress(self, tunnel: LspTunnel) -> None:
        egress = tunnel.path[-1]
        self._record(egress, "path_received", f"fec={tunnel.fec.name}")
        # PHP: the egress asks its neighbor to pop by advertising implicit-null
        tunnel.hop_labels[-1] = IMPLICIT_NULL
        self.resv_message_count += 1
        self._forward_resv(tunnel, len(tunnel.path) - 2, IMPLICIT_NULL)

    def _forward_resv(self, tunnel: LspTunnel, to_index: int, advertised: Label) -> None:
        frm = tunnel.path[to_index + 1]
        to = tunnel.path[to_index]
        event = "resv_sent" if to_index + 1 == len(tunnel.path) - 1 else "resv_forward"
        label_text = "-" if advertised == IMPLICIT_NULL else str(advertised.value)
        self._record(frm, event, f"fec={tunnel.fec.name} to={to} label={label_text}")
        delay = self._alpha + as_time(self._topology.directed_delay_ms(frm, to))
        self._sim.schedule_in(
            delay, lambda: self._resv_arrived(tunnel, to_index, advertised)
        )

    def _resv_arrived(self, tunnel: LspTunnel, index: int, advertised: Label) -> None:
        node = tunnel.path[index]
        fec = tunnel.fec
        out_iface = self._topology.link_between(node, tunnel.path[index + 1]).iface_of(node)
        if index == 0:
            # ingress: map the FEC onto whatever the first hop advertised
            self._tables.install_ftn(node, fec, advertised, out_iface)
            if self._trace is not None:
                label_text = "-" if advertised == IMPLICIT_NULL else str(advertised.value)
                self._trace.record(
                    self._sim.now, "mpls", node, "ftn_installed",
                    f"fec={fec.name} out_label={label_text} out_if={out_iface}",
                )
            tunnel.state = LspState.ESTABLISHED
            tunnel.established_at = self._sim.now
            self._record(node, "lsp_established", f"fec={fec.name}")
            for callback in self._callbacks.pop(fec, []):
                callback(tunnel)
            return
        # transit node: bind its own incoming label to the downstream one
        own = self._allocator.allocate(node)
        in_iface = self._topology.link_between(node, tunnel.path[index - 1]).iface_of(node)
        if advertised == IMPLICIT_NULL:
            action = LfibAction.pop(out_iface)
            action_text = f"pop out_if={out_iface}"
        else:
            action = LfibAction.swap(advertised, out_iface)
            action_text = f"swap {advertised.value} out_if={out_iface}"
        self._tables.install_lfib(node, own, in_iface, action, fec=fec)
        if self._trace is not None:
            self._trace.record(
                self._sim.now, "mpls", node, "lfib_installed",
                f"fec={fec.name} in_label={own.value} in_if={in_iface} {action_text}",
            )
        tunnel.hop_labels[index - 1] = own
        self._forward_resv(tunnel, index - 1, own)
