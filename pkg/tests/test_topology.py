"""Topology construction, routing and the linear chain builder."""

import pytest

from pm2pls import Link, Node, NodeRole, TimingParameters, Topology, build_linear_topology
from pm2pls.topology import NoRouteError, TopologyError

from conftest import build_reference_topology


def _wired(*specs):
    return [Node(nid, role) for nid, role in specs]


# -- links ---------------------------------------------------------------------

def test_link_direction_convention():
    # node_a is the endpoint farther from the anchor; a->b runs toward it
    link = Link("MAG1", 2, "LSR1", 2, delay_up_ms=3.0, delay_down_ms=1.0)
    assert link.delay_from("MAG1") == 1.0
    assert link.delay_from("LSR1") == 3.0
    assert link.other_end("MAG1") == ("LSR1", 2)
    assert link.iface_of("LSR1") == 2


def test_link_rejects_self_loop_and_negative_delay():
    with pytest.raises(TopologyError):
        Link("A", 1, "A", 2)
    with pytest.raises(TopologyError):
        Link("A", 1, "B", 1, delay_up_ms=-1.0)


# -- validation ----------------------------------------------------------------

def test_interface_reuse_rejected():
    nodes = _wired(("LMA1", NodeRole.LMA_LER), ("MAG1", NodeRole.MAG_LER),
                   ("MAG2", NodeRole.MAG_LER))
    links = [Link("MAG1", 2, "LMA1", 2), Link("MAG2", 2, "LMA1", 2)]
    with pytest.raises(TopologyError):
        Topology(nodes, links, {}, {})


def test_attachment_roles_checked():
    nodes = [Node("MN1", NodeRole.MN), Node("AP1", NodeRole.AP),
             Node("MAG1", NodeRole.MAG_LER), Node("LMA1", NodeRole.LMA_LER)]
    links = [Link("MAG1", 2, "LMA1", 2)]
    with pytest.raises(TopologyError, match="not an access point"):
        Topology(nodes, links, {"MN1": "MAG1"}, {})
    with pytest.raises(TopologyError, match="not a MAG"):
        Topology(nodes, links, {"MN1": "AP1"}, {"AP1": "LMA1"})


def test_disconnected_wired_graph_rejected():
    nodes = _wired(("LMA1", NodeRole.LMA_LER), ("MAG1", NodeRole.MAG_LER),
                   ("MAG2", NodeRole.MAG_LER))
    links = [Link("MAG1", 2, "LMA1", 2)]
    with pytest.raises(TopologyError, match="disconnected"):
        Topology(nodes, links, {}, {})


def test_gateway_path_must_cross_label_switching_routers():
    # MAG2 only reaches the anchor through MAG1, which is not an LSR
    nodes = _wired(("LMA1", NodeRole.LMA_LER), ("MAG1", NodeRole.MAG_LER),
                   ("MAG2", NodeRole.MAG_LER))
    links = [Link("MAG1", 2, "LMA1", 2), Link("MAG2", 2, "MAG1", 3)]
    with pytest.raises(TopologyError, match="label switching routers"):
        Topology(nodes, links, {}, {})


# -- routing -------------------------------------------------------------------

def test_reference_routes():
    topo = build_reference_topology()
    assert topo.route("LMA1", "MAG1") == ["LMA1", "LSR1", "LSR2", "MAG1"]
    assert topo.route("MAG3", "LMA1") == ["MAG3", "LSR3", "LMA1"]
    assert topo.route("MAG1", "MAG2") == ["MAG1", "LSR2", "MAG2"]
    assert topo.route("LMA1", "LMA1") == ["LMA1"]


def test_route_tie_break_is_lexicographic():
    # LMA1->MAG2 has two three-hop paths (via LSR1 or LSR3)
    topo = build_reference_topology()
    assert topo.route("LMA1", "MAG2") == ["LMA1", "LSR1", "LSR2", "MAG2"]


def test_route_refuses_wireless_nodes():
    topo = build_linear_topology(1, TimingParameters())
    with pytest.raises(TopologyError, match="wired"):
        topo.route("MN1", "LMA1")
    with pytest.raises(TopologyError):
        topo.route("LMA1", "unknown")


def test_directed_delay_lookup():
    topo = build_reference_topology()
    assert topo.directed_delay_ms("MAG1", "LSR2") == 2.0
    with pytest.raises(TopologyError):
        topo.directed_delay_ms("MAG1", "LMA1")    # not adjacent


def test_neighbor_via_interface():
    topo = build_reference_topology()
    neighbor, link = topo.neighbor_via("LSR2", 4)
    assert neighbor == "LSR3"
    assert link.iface_of("LSR3") == 3
    with pytest.raises(TopologyError):
        topo.neighbor_via("LSR2", 9)


# -- the linear chain builder ---------------------------------------------------

def test_builder_single_hop_shape():
    topo = build_linear_topology(1, TimingParameters())
    ids = sorted(n.id for n in topo.nodes)
    assert ids == ["AP1", "AP2", "CN1", "LMA1", "MAG1", "MAG2", "MN1"]
    assert len(topo.links) == 3       # CN tether plus one link per gateway chain
    assert topo.ap_of("MN1") == "AP1"
    assert topo.mag_of_ap("AP2") == "MAG2"
    # single-hop chains tie each gateway directly to the anchor
    assert topo.route("MAG1", "LMA1") == ["MAG1", "LMA1"]
    assert topo.route("MAG2", "LMA1") == ["MAG2", "LMA1"]


def test_builder_inserts_switch_chains():
    topo = build_linear_topology(3, TimingParameters().with_hops(3))
    lsrs = topo.nodes_by_role(NodeRole.LSR)
    assert sorted(lsrs) == ["LSR1", "LSR2", "LSR3", "LSR4"]
    assert topo.route("MAG1", "LMA1") == ["MAG1", "LSR1", "LSR2", "LMA1"]
    assert topo.route("MAG2", "LMA1") == ["MAG2", "LSR3", "LSR4", "LMA1"]
    assert len(topo.links) == 7


def test_builder_correspondent_tether_is_free():
    topo = build_linear_topology(2, TimingParameters().with_hops(2))
    assert topo.directed_delay_ms("CN1", "LMA1") == 0.0
    assert topo.directed_delay_ms("LMA1", "CN1") == 0.0
    assert topo.route("CN1", "MAG1") == ["CN1", "LMA1", "LSR1", "MAG1"]


def test_builder_applies_delay_vectors():
    params = TimingParameters(n_hops=2, m_hops=2, d_down_ms=(1.0, 3.0), d_up_ms=(5.0, 7.0))
    topo = build_linear_topology(2, params)
    # d_down entries run from the MAG toward the anchor
    assert topo.directed_delay_ms("MAG1", "LSR1") == 1.0
    assert topo.directed_delay_ms("LSR1", "LMA1") == 3.0
    # d_up entries run from the anchor toward the MAG
    assert topo.directed_delay_ms("LMA1", "LSR1") == 5.0
    assert topo.directed_delay_ms("LSR1", "MAG1") == 7.0


def test_builder_rejects_bad_hop_counts():
    with pytest.raises(ValueError):
        build_linear_topology(0, TimingParameters())
    with pytest.raises(ValueError):
        build_linear_topology(16, TimingParameters())


def test_attach_moves_the_mobile_node():
    topo = build_linear_topology(1, TimingParameters())
    topo.attach("MN1", "AP2")
    assert topo.ap_of("MN1") == "AP2"
    with pytest.raises(TopologyError):
        topo.attach("MN1", "MAG1")
