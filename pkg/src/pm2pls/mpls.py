"""MPLS data plane: label spaces, FTN/ILM tables, forwarding and tracing.

Per-platform label spaces: each node allocates its own incoming labels, so the
same numeric value may appear on different nodes.  Dynamic allocation starts
at 16 (0-15 are reserved values); explicit installation accepts any 20-bit
value so known table layouts can be reproduced verbatim.

Penultimate hop popping is always on: an egress advertises the implicit-null
label (reserved value 3), its upstream neighbor installs a pop entry, and the
egress receives the bare inner packet.  On a single-link LSP the ingress
itself is the penultimate hop, so packets cross that wire unlabeled.

No label merging: no two table entries on one node may emit the same
(out_label, out_interface) pair, and aggregation of FECs is out of scope -
one FEC is one ordered (ingress, egress) pair naming a tunnel direction.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING, Iterable

if TYPE_CHECKING:  # pragma: no cover
    from .topology import Topology

MAX_LABEL = 2**20 - 1
RESERVED_LABEL_MAX = 15
FIRST_DYNAMIC_LABEL = 16
INITIAL_TTL = 255

MPLS_HEADER_BYTES = 4
IPV4_HEADER_BYTES = 20
IPV6_HEADER_BYTES = 40
GRE_HEADER_BYTES = 4


class MplsError(Exception):
    """Base class for data-plane errors."""


class LabelSpaceExhausted(MplsError):
    pass


class TableConflictError(MplsError):
    """Install would shadow an existing entry or merge label streams."""


class LabelMissError(MplsError):
    """No matching FTN/ILM entry; the packet would be dropped."""

    def __init__(self, node: str, detail: str) -> None:
        super().__init__(f"label miss at {node}: {detail}")
        self.node = node


class TtlExpiredError(MplsError):
    pass


class IncompleteLspError(MplsError):
    """The installed label chain does not reach the FEC's egress."""


@dataclass(frozen=True)
class Label:
    value: int

    def __post_init__(self) -> None:
        if not 0 <= self.value <= MAX_LABEL:
            raise ValueError(f"label value {self.value} outside 20-bit range")


# Egress-advertised "pop before me" value.
IMPLICIT_NULL = Label(3)


@dataclass(frozen=True)
class MplsHeader:
    label: Label
    traffic_class: int = 0
    bottom_of_stack: bool = True
    ttl: int = INITIAL_TTL

    def __post_init__(self) -> None:
        if not 0 <= self.traffic_class <= 7:
            raise ValueError("traffic_class is a 3-bit field")
        if not 0 <= self.ttl <= 255:
            raise ValueError("ttl is an 8-bit field")


@dataclass(frozen=True)
class Fec:
    """Forwarding equivalence class: one tunnel direction, ingress to egress."""

    ingress: str
    egress: str

    def __post_init__(self) -> None:
        if self.ingress == self.egress:
            raise ValueError("a FEC names two distinct endpoints")

    @property
    def name(self) -> str:
        return f"{self.ingress}-{self.egress}"

    def reversed(self) -> "Fec":
        return Fec(self.egress, self.ingress)

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.name


@dataclass(frozen=True)
class FtnEntry:
    fec: Fec
    out_label: Label
    out_interface: int


@dataclass(frozen=True)
class LfibAction:
    out_label: Label | None     # None means pop
    out_interface: int

    @classmethod
    def swap(cls, out_label: Label, out_interface: int) -> "LfibAction":
        return cls(out_label=out_label, out_interface=out_interface)

    @classmethod
    def pop(cls, out_interface: int) -> "LfibAction":
        return cls(out_label=None, out_interface=out_interface)

    @property
    def is_pop(self) -> bool:
        return self.out_label is None


@dataclass(frozen=True)
class LfibEntry:
    in_label: Label
    in_interface: int
    action: LfibAction
    fec: Fec | None = None      # bookkeeping for table dumps


@dataclass(frozen=True)
class LabeledPacket:
    destination: str                         # semantic address, e.g. the MN
    fec: Fec | None = None                   # ingress classification result
    label_stack: tuple[MplsHeader, ...] = ()
    inner_header_kind: str = "IPv6"
    payload_bytes: int = 100

    @property
    def mpls_overhead_bytes(self) -> int:
        return MPLS_HEADER_BYTES * len(self.label_stack)

    @property
    def top_label(self) -> Label | None:
        return self.label_stack[0].label if self.label_stack else None

    def pushed(self, header: MplsHeader) -> "LabeledPacket":
        return replace(self, label_stack=(header,) + self.label_stack)

    def swapped(self, out_label: Label, ttl: int) -> "LabeledPacket":
        top = self.label_stack[0]
        new_top = replace(top, label=out_label, ttl=ttl)
        return replace(self, label_stack=(new_top,) + self.label_stack[1:])

    def popped(self) -> "LabeledPacket":
        return replace(self, label_stack=self.label_stack[1:])


class LabelAllocator:
    """Per-platform label spaces with optional preset sequences for tests."""

    def __init__(self, mpls_nodes: Iterable[str] | None = None) -> None:
        self._mpls_nodes = set(mpls_nodes) if mpls_nodes is not None else None
        self._allocated: dict[str, set[int]] = {}
        self._next: dict[str, int] = {}
        self._preset: dict[str, deque[int]] = {}

    def _check_node(self, node_id: str) -> None:
        if self._mpls_nodes is not None and node_id not in self._mpls_nodes:
            raise MplsError(f"{node_id} is not a label-switching node")

    def preset(self, node_id: str, values: Iterable[int]) -> None:
        self._check_node(node_id)
        self._preset.setdefault(node_id, deque()).extend(values)

    def allocate(self, node_id: str) -> Label:
        self._check_node(node_id)
        queue = self._preset.get(node_id)
        if queue:
            return self.allocate_explicit(node_id, queue.popleft())
        taken = self._allocated.setdefault(node_id, set())
        candidate = self._next.get(node_id, FIRST_DYNAMIC_LABEL)
        while candidate in taken:
            candidate += 1
        if candidate > MAX_LABEL:
            raise LabelSpaceExhausted(f"label space exhausted on {node_id}")
        taken.add(candidate)
        self._next[node_id] = candidate + 1
        return Label(candidate)

    def allocate_explicit(self, node_id: str, value: int) -> Label:
        self._check_node(node_id)
        label = Label(value)
        taken = self._allocated.setdefault(node_id, set())
        if value in taken:
            raise TableConflictError(f"label {value} already allocated on {node_id}")
        taken.add(value)
        return label


@dataclass
class _NodeTables:
    ftn: dict[Fec, FtnEntry] = field(default_factory=dict)
    ilm: dict[tuple[int, int], LfibEntry] = field(default_factory=dict)
    label_outputs: set[tuple[int, int]] = field(default_factory=set)
    rows: list[tuple[str, object]] = field(default_factory=list)


class LabelForwardingTables:
    """FTN (ingress push) and ILM (swap/pop) tables for every node."""

    def __init__(self, mpls_nodes: Iterable[str] | None = None) -> None:
        self._mpls_nodes = set(mpls_nodes) if mpls_nodes is not None else None
        self._tables: dict[str, _NodeTables] = {}

    def _node(self, node_id: str) -> _NodeTables:
        if self._mpls_nodes is not None and node_id not in self._mpls_nodes:
            raise MplsError(f"{node_id} is not a label-switching node")
        return self._tables.setdefault(node_id, _NodeTables())

    # -- installation ------------------------------------------------------

    def install_ftn(
        self, node_id: str, fec: Fec, out_label: Label, out_interface: int
    ) -> FtnEntry:
        tables = self._node(node_id)
        if fec in tables.ftn:
            raise TableConflictError(f"FTN for {fec.name} already on {node_id}")
        if out_label != IMPLICIT_NULL:
            self._claim_output(tables, node_id, out_label, out_interface)
        entry = FtnEntry(fec=fec, out_label=out_label, out_interface=out_interface)
        tables.ftn[fec] = entry
        tables.rows.append(("ftn", entry))
        return entry

    def install_lfib(
        self,
        node_id: str,
        in_label: Label,
        in_interface: int,
        action: LfibAction,
        fec: Fec | None = None,
    ) -> LfibEntry:
        tables = self._node(node_id)
        key = (in_label.value, in_interface)
        if key in tables.ilm:
            raise TableConflictError(
                f"ILM entry for label {in_label.value} on interface "
                f"{in_interface} already on {node_id}"
            )
        if action.out_label is not None:
            self._claim_output(tables, node_id, action.out_label, action.out_interface)
        entry = LfibEntry(
            in_label=in_label, in_interface=in_interface, action=action, fec=fec
        )
        tables.ilm[key] = entry
        tables.rows.append(("ilm", entry))
        return entry

    @staticmethod
    def _claim_output(
        tables: _NodeTables, node_id: str, out_label: Label, out_interface: int
    ) -> None:
        # label merging would need two streams sharing one outgoing label
        key = (out_label.value, out_interface)
        if key in tables.label_outputs:
            raise TableConflictError(
                f"{node_id} would merge label streams onto label "
                f"{out_label.value} interface {out_interface}"
            )
        tables.label_outputs.add(key)

    # -- lookup / forwarding -------------------------------------------------

    def ftn_entry(self, node_id: str, fec: Fec) -> FtnEntry | None:
        return self._node(node_id).ftn.get(fec)

    def ilm_entry(self, node_id: str, label_value: int, in_interface: int) -> LfibEntry | None:
        return self._node(node_id).ilm.get((label_value, in_interface))

    def forward(
        self,
        node_id: str,
        packet: LabeledPacket,
        arrival_interface: int | None = None,
    ) -> tuple[int, LabeledPacket]:
        """One forwarding decision; returns (out_interface, transformed packet)."""
        if packet.label_stack:
            if arrival_interface is None:
                raise ValueError("labeled packets need an arrival interface")
            top = packet.label_stack[0]
            entry = self.ilm_entry(node_id, top.label.value, arrival_interface)
            if entry is None:
                raise LabelMissError(
                    node_id,
                    f"label {top.label.value} on interface {arrival_interface}",
                )
            if entry.action.is_pop:
                return entry.action.out_interface, packet.popped()
            if top.ttl <= 1:
                raise TtlExpiredError(f"TTL expired at {node_id}")
            return (
                entry.action.out_interface,
                packet.swapped(entry.action.out_label, top.ttl - 1),
            )
        # unlabeled at an ingress LER: classify by FEC
        if packet.fec is None:
            raise LabelMissError(node_id, "unlabeled packet without a FEC")
        entry = self.ftn_entry(node_id, packet.fec)
        if entry is None:
            raise LabelMissError(node_id, f"no FTN entry for {packet.fec.name}")
        if entry.out_label == IMPLICIT_NULL:
            # single-link LSP: the ingress is the penultimate hop
            return entry.out_interface, packet
        header = MplsHeader(
            label=entry.out_label,
            bottom_of_stack=not packet.label_stack,
            ttl=INITIAL_TTL,
        )
        return entry.out_interface, packet.pushed(header)

    # -- diagnostics ---------------------------------------------------------

    def trace_lsp(
        self, topology: "Topology", ingress: str, fec: Fec
    ) -> list[tuple[str, str]]:
        """Walk one FEC's label chain; [(node, action), ...] ending in deliver.

        Raises IncompleteLspError if the chain is broken or does not reach
        the FEC's egress.
        """
        if self.ftn_entry(ingress, fec) is None:
            raise IncompleteLspError(f"no FTN entry for {fec.name} at {ingress}")
        packet = LabeledPacket(destination=fec.egress, fec=fec)
        out_iface, packet = self.forward(ingress, packet)
        if packet.label_stack:
            steps = [(ingress, f"push {packet.top_label.value}")]
        else:
            steps = [(ingress, "forward")]
        node = ingress
        for _ in range(2 * MAX_LABEL.bit_length()):  # generous loop guard
            neighbor, link = topology.neighbor_via(node, out_iface)
            arrival_iface = link.iface_of(neighbor)
            node = neighbor
            if not packet.label_stack:
                if node != fec.egress:
                    raise IncompleteLspError(
                        f"{fec.name}: unlabeled packet reached {node}, "
                        f"expected {fec.egress}"
                    )
                steps.append((node, "deliver"))
                return steps
            depth_before = len(packet.label_stack)
            try:
                out_iface, packet = self.forward(node, packet, arrival_iface)
            except LabelMissError as exc:
                raise IncompleteLspError(f"{fec.name}: {exc}") from exc
            if len(packet.label_stack) < depth_before:
                steps.append((node, "pop"))
            else:
                steps.append((node, f"swap {packet.top_label.value}"))
        raise IncompleteLspError(f"{fec.name}: forwarding loop suspected")

    def dump_node(self, node_id: str) -> str:
        """One node's tables, columns: FEC, In Label, In IF, Out Label, Out IF."""
        lines = [f"=== {node_id} ===", "FEC\tIn Label\tIn IF\tOut Label\tOut IF"]
        for kind, entry in self._tables.get(node_id, _NodeTables()).rows:
            if kind == "ftn":
                out_label = (
                    "-" if entry.out_label == IMPLICIT_NULL else str(entry.out_label.value)
                )
                lines.append(
                    f"{entry.fec.name}\t-\t-\t{out_label}\t{entry.out_interface}"
                )
            else:
                fec_name = entry.fec.name if entry.fec is not None else "-"
                out_label = (
                    "-" if entry.action.is_pop else str(entry.action.out_label.value)
                )
                lines.append(
                    f"{fec_name}\t{entry.in_label.value}\t{entry.in_interface}\t"
                    f"{out_label}\t{entry.action.out_interface}"
                )
        return "\n".join(lines) + "\n"

    def dump(self, node_ids: Iterable[str]) -> str:
        return "".join(self.dump_node(node_id) for node_id in node_ids)


class TunnelKind(str, Enum):
    """Tunneling mechanisms compared for per-packet overhead."""

    PMIPV6_IPV6_IN_IPV6 = "pmipv6-ipv6-in-ipv6"
    PMIPV6_IPV4_IN_IPV6 = "pmipv6-ipv4-in-ipv6"
    PMIPV6_IPV6_IN_IPV4 = "pmipv6-ipv6-in-ipv4"
    PMIPV6_IPV4_IN_IPV4 = "pmipv6-ipv4-in-ipv4"
    PMIPV6_GRE_IPV6 = "pmipv6-gre-ipv6"
    PMIPV6_GRE_IPV4 = "pmipv6-gre-ipv4"
    PMIPV6_MPLS_VP_LABEL = "pmipv6-mpls-vp-label"
    PM2PLS = "pm2pls"


_OVERHEAD: dict[TunnelKind, tuple[str, int, str]] = {
    TunnelKind.PMIPV6_IPV6_IN_IPV6: (
        "PMIPv6, IPv6-in-IPv6 tunnel", IPV6_HEADER_BYTES, "outer IPv6 header"),
    TunnelKind.PMIPV6_IPV4_IN_IPV6: (
        "PMIPv6, IPv4-in-IPv6 tunnel", IPV6_HEADER_BYTES, "outer IPv6 header"),
    TunnelKind.PMIPV6_IPV6_IN_IPV4: (
        "PMIPv6, IPv6-in-IPv4 tunnel", IPV4_HEADER_BYTES, "outer IPv4 header"),
    TunnelKind.PMIPV6_IPV4_IN_IPV4: (
        "PMIPv6, IPv4-in-IPv4 tunnel", IPV4_HEADER_BYTES, "outer IPv4 header"),
    TunnelKind.PMIPV6_GRE_IPV6: (
        "PMIPv6, GRE over IPv6 transport",
        IPV6_HEADER_BYTES + GRE_HEADER_BYTES, "outer IPv6 header + GRE header"),
    TunnelKind.PMIPV6_GRE_IPV4: (
        "PMIPv6, GRE over IPv4 transport",
        IPV4_HEADER_BYTES + GRE_HEADER_BYTES, "outer IPv4 header + GRE header"),
    TunnelKind.PMIPV6_MPLS_VP_LABEL: (
        "PMIPv6/MPLS, VP label (any transport)", 2 * MPLS_HEADER_BYTES,
        "2 MPLS headers"),
    TunnelKind.PM2PLS: (
        "PM2PLS (any transport)", MPLS_HEADER_BYTES, "1 MPLS header"),
}


def overhead_bytes(kind: TunnelKind) -> int:
    """Per-packet tunnel overhead in bytes for one mechanism."""
    return _OVERHEAD[kind][1]


def overhead_rows() -> list[tuple[str, int, str]]:
    """(mechanism, bytes, what the bytes are) for every supported tunnel."""
    return [_OVERHEAD[kind] for kind in TunnelKind]
