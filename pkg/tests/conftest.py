"""Shared fixtures: default timings, a hand-built label-switched core, golden files.

The reference core is a small MPLS domain with one anchor (LMA1), three
gateways (MAG1..MAG3) and three interior switches (LSR1..LSR3).  Its label
tables are installed verbatim rather than signaled, so forwarding tests can
check exact label values, interfaces and dump output against golden files.

Layout (interface numbers in parens):

    MAG1 (2)----(2) LSR2 (1)----(2) LSR1 (1)----(2) LMA1 (1)
    MAG2 (2)----(3) LSR2 (4)----(3) LSR3 (1)----(3) LMA1
    MAG3 (2)----(2) LSR3
"""

from __future__ import annotations

from pathlib import Path

import pytest

from pm2pls import (
    Fec,
    Label,
    LabelForwardingTables,
    Link,
    Node,
    NodeRole,
    TimingParameters,
    Topology,
)
from pm2pls.mpls import LfibAction

GOLDEN_DIR = Path(__file__).parent / "golden"

REFERENCE_DUMP_ORDER = ["LMA1", "MAG1", "MAG2", "MAG3", "LSR1", "LSR2", "LSR3"]


def read_golden(name: str) -> str:
    return (GOLDEN_DIR / name).read_text()


@pytest.fixture
def default_params() -> TimingParameters:
    return TimingParameters()


def build_reference_topology() -> Topology:
    """Wired-only core used by the forwarding-table tests."""
    nodes = [
        Node("LMA1", NodeRole.LMA_LER),
        Node("MAG1", NodeRole.MAG_LER),
        Node("MAG2", NodeRole.MAG_LER),
        Node("MAG3", NodeRole.MAG_LER),
        Node("LSR1", NodeRole.LSR),
        Node("LSR2", NodeRole.LSR),
        Node("LSR3", NodeRole.LSR),
    ]
    # node_a is always the endpoint farther from the anchor
    links = [
        Link("LSR1", 1, "LMA1", 2),
        Link("LSR2", 1, "LSR1", 2),
        Link("MAG1", 2, "LSR2", 2),
        Link("MAG2", 2, "LSR2", 3),
        Link("LSR2", 4, "LSR3", 3),
        Link("LSR3", 1, "LMA1", 3),
        Link("MAG3", 2, "LSR3", 2),
    ]
    return Topology(nodes=nodes, links=links, attachments={}, ap_to_mag={})


def install_reference_tables(tables: LabelForwardingTables) -> None:
    """Install the six reference LSPs (downlink and uplink per gateway).

    Downlink LSPs from the anchor:
      LMA1-MAG1: push 20, LSR1 swaps 20->15, LSR2 pops (penultimate hop)
      LMA1-MAG2: push 22, LSR3 swaps 22->32, LSR2 pops
      LMA1-MAG3: push 27, LSR3 pops (two-hop path, single swap point)
    Uplink LSPs mirror them with independent label values.
    """
    f = {
        "d1": Fec("LMA1", "MAG1"),
        "u1": Fec("MAG1", "LMA1"),
        "d2": Fec("LMA1", "MAG2"),
        "u2": Fec("MAG2", "LMA1"),
        "d3": Fec("LMA1", "MAG3"),
        "u3": Fec("MAG3", "LMA1"),
    }

    tables.install_ftn("LMA1", f["d1"], Label(20), 2)
    tables.install_ftn("LMA1", f["d2"], Label(22), 3)
    tables.install_ftn("LMA1", f["d3"], Label(27), 3)
    tables.install_ftn("MAG1", f["u1"], Label(40), 2)
    tables.install_ftn("MAG2", f["u2"], Label(55), 2)
    tables.install_ftn("MAG3", f["u3"], Label(60), 2)

    tables.install_lfib("LSR1", Label(20), 1, LfibAction.swap(Label(15), 2), fec=f["d1"])
    tables.install_lfib("LSR1", Label(35), 2, LfibAction.pop(1), fec=f["u1"])

    tables.install_lfib("LSR2", Label(15), 1, LfibAction.pop(2), fec=f["d1"])
    tables.install_lfib("LSR2", Label(40), 2, LfibAction.swap(Label(35), 1), fec=f["u1"])
    tables.install_lfib("LSR2", Label(32), 4, LfibAction.pop(3), fec=f["d2"])
    tables.install_lfib("LSR2", Label(55), 3, LfibAction.swap(Label(50), 4), fec=f["u2"])

    tables.install_lfib("LSR3", Label(22), 1, LfibAction.swap(Label(32), 3), fec=f["d2"])
    tables.install_lfib("LSR3", Label(50), 3, LfibAction.pop(1), fec=f["u2"])
    tables.install_lfib("LSR3", Label(27), 1, LfibAction.pop(2), fec=f["d3"])
    tables.install_lfib("LSR3", Label(60), 2, LfibAction.pop(1), fec=f["u3"])


@pytest.fixture
def reference_topology() -> Topology:
    return build_reference_topology()


@pytest.fixture
def reference_tables() -> LabelForwardingTables:
    tables = LabelForwardingTables(REFERENCE_DUMP_ORDER)
    install_reference_tables(tables)
    return tables
