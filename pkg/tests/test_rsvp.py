"""Downstream-on-demand LSP signaling over the linear core."""

from fractions import Fraction

import pytest

from pm2pls import (
    Fec,
    LabelAllocator,
    LabelForwardingTables,
    NodeRole,
    RsvpSignaling,
    Simulator,
    TimingParameters,
    TraceLog,
    build_linear_topology,
)
from pm2pls.mpls import IMPLICIT_NULL
from pm2pls.rsvp import LspSetupTrigger, LspState
from pm2pls.topology import MPLS_ROLES


def _signaling(n_hops: int):
    params = TimingParameters().with_hops(n_hops)
    topo = build_linear_topology(n_hops, params)
    mpls_nodes = [n.id for n in topo.nodes if n.role in MPLS_ROLES]
    sim = Simulator()
    trace = TraceLog()
    rsvp = RsvpSignaling(
        sim, topo, LabelForwardingTables(mpls_nodes), LabelAllocator(mpls_nodes),
        params.alpha_rp_ms, trace=trace,
    )
    return sim, topo, rsvp, trace


def test_single_hop_setup_time():
    sim, _, rsvp, _ = _signaling(1)
    tunnel = rsvp.initiate_lsp("LMA1", "MAG1")
    assert tunnel.state is LspState.PATH_SENT
    sim.run_until_idle()
    assert tunnel.state is LspState.ESTABLISHED
    # one Path leg and one Resv leg, each costing processing plus the wire
    assert tunnel.established_at - tunnel.created_at == Fraction("4.4")


def test_setup_time_scales_with_path_length():
    sim, _, rsvp, _ = _signaling(2)
    tunnel = rsvp.initiate_lsp("LMA1", "MAG1")
    sim.run_until_idle()
    assert tunnel.established_at - tunnel.created_at == Fraction("8.8")


def test_message_counters_are_per_message_not_per_hop():
    sim, _, rsvp, _ = _signaling(3)
    rsvp.initiate_lsp("LMA1", "MAG1")
    sim.run_until_idle()
    assert rsvp.path_message_count == 1
    assert rsvp.resv_message_count == 1
    assert rsvp.message_count == 2


def test_single_hop_lsp_advertises_implicit_null():
    sim, topo, rsvp, _ = _signaling(1)
    fec = Fec("LMA1", "MAG1")
    rsvp.initiate_lsp("LMA1", "MAG1")
    sim.run_until_idle()
    entry = rsvp._tables.ftn_entry("LMA1", fec)
    assert entry.out_label == IMPLICIT_NULL
    # the packet crosses the single link unlabeled
    assert rsvp._tables.trace_lsp(topo, "LMA1", fec) == [
        ("LMA1", "forward"), ("MAG1", "deliver"),
    ]


def test_multi_hop_lsp_forwards_end_to_end():
    sim, topo, rsvp, _ = _signaling(3)
    fec = Fec("LMA1", "MAG2")
    rsvp.initiate_lsp("LMA1", "MAG2")
    sim.run_until_idle()
    walk = rsvp._tables.trace_lsp(topo, "LMA1", fec)
    assert [node for node, _ in walk] == ["LMA1", "LSR4", "LSR3", "MAG2"]
    assert walk[0][1].startswith("push ")
    assert walk[1][1].startswith("swap ")
    assert walk[2][1] == "pop"          # penultimate hop pops
    assert walk[3][1] == "deliver"


def test_reuse_is_silent():
    sim, _, rsvp, _ = _signaling(2)
    first = rsvp.initiate_lsp("LMA1", "MAG1")
    sim.run_until_idle()
    count = rsvp.message_count
    again = rsvp.initiate_lsp("LMA1", "MAG1")
    assert again is first
    assert rsvp.message_count == count


def test_bidirectional_pair_costs_four_messages():
    sim, _, rsvp, _ = _signaling(2)
    rsvp.ensure_bidirectional("LMA1", "MAG1", LspSetupTrigger.FROM_LMA_AFTER_PBA)
    rsvp.ensure_bidirectional("LMA1", "MAG1", LspSetupTrigger.FROM_MAG_AFTER_PBA)
    sim.run_until_idle()
    assert rsvp.message_count == 4
    assert rsvp.pair_established("LMA1", "MAG1")
    # re-triggering an established pair is free
    pair = rsvp.ensure_bidirectional(
        "LMA1", "MAG1", LspSetupTrigger.FROM_LMA_AFTER_PBA
    )
    assert rsvp.message_count == 4
    assert pair.usable


def test_each_trigger_initiates_its_own_direction():
    sim, _, rsvp, _ = _signaling(1)
    rsvp.ensure_bidirectional("LMA1", "MAG2", LspSetupTrigger.FROM_LMA_AFTER_PBA)
    sim.run_until_idle()
    assert rsvp.established(Fec("LMA1", "MAG2"))
    assert not rsvp.established(Fec("MAG2", "LMA1"))
    assert not rsvp.pair_established("LMA1", "MAG2")


def test_on_established_callback_orders():
    sim, _, rsvp, _ = _signaling(1)
    fec = Fec("LMA1", "MAG1")
    seen = []
    rsvp.on_established(fec, lambda t: seen.append(("pending", sim.now)))
    rsvp.initiate_lsp("LMA1", "MAG1")
    sim.run_until_idle()
    assert seen == [("pending", Fraction("4.4"))]
    rsvp.on_established(fec, lambda t: seen.append(("immediate", sim.now)))
    assert seen[-1] == ("immediate", Fraction("4.4"))


def test_signaling_leaves_a_trace():
    sim, _, rsvp, trace = _signaling(2)
    rsvp.initiate_lsp("LMA1", "MAG1")
    sim.run_until_idle()
    events = [line.split("\t")[3] for line in trace.lines()]
    assert "path_sent" in events
    assert "resv_sent" in events
    assert "ftn_installed" in events
    assert events[-1] == "lsp_established"
