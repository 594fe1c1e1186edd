"""PM2PLS: Proxy Mobile IPv6 over MPLS handover modeling.

Closed-form delay/loss model plus a deterministic discrete-event simulator
for four handover schemes (plain PMIPv6, PMIPv6 over MPLS with serialized
LSP setup, and the integrated scheme with cold or warm tunnels), exposed
through a small HTTP service and a CLI.
"""

from . import analytic
from .analytic import DelayBreakdown, PacketLoss, packet_loss, t_ho
from .engine import Simulator, TraceLog
from .l2 import L2HandoverPhases, l2_handover_delay, phases_from_params
from .mpls import (
    Fec,
    Label,
    LabelAllocator,
    LabeledPacket,
    LabelForwardingTables,
    MplsHeader,
    TunnelKind,
    overhead_bytes,
)
from .params import ALL_SCHEMES, HandoverScheme, TimingParameters
from .pmipv6 import (
    BindingCacheEntry,
    BindingUpdateListEntry,
    ConfigurationError,
    MobileNodeProfile,
)
from .rsvp import RsvpSignaling
from .scenario import (
    DataFlow,
    HandoverMetrics,
    HandoverScenario,
    simulate_handover,
)
from .topology import Link, Node, NodeRole, Topology, build_linear_topology

__version__ = "0.1.0"

__all__ = [
    "ALL_SCHEMES",
    "BindingCacheEntry",
    "BindingUpdateListEntry",
    "ConfigurationError",
    "DataFlow",
    "DelayBreakdown",
    "Fec",
    "HandoverMetrics",
    "HandoverScenario",
    "HandoverScheme",
    "L2HandoverPhases",
    "Label",
    "LabelAllocator",
    "LabeledPacket",
    "LabelForwardingTables",
    "Link",
    "MobileNodeProfile",
    "MplsHeader",
    "Node",
    "NodeRole",
    "PacketLoss",
    "RsvpSignaling",
    "Simulator",
    "TimingParameters",
    "Topology",
    "TraceLog",
    "TunnelKind",
    "analytic",
    "build_linear_topology",
    "l2_handover_delay",
    "overhead_bytes",
    "packet_loss",
    "phases_from_params",
    "simulate_handover",
    "t_ho",
    "__version__",
]
