"""Nodes, point-to-point links and static shortest-path routing.

The wired part of the network (MAGs, LSRs, the LMA, correspondent nodes) is an
undirected graph of point-to-point links with numbered interfaces and
direction-dependent delays.  The wireless side is deliberately thin: mobile
nodes attach to access points, access points belong to a MAG, and both legs
are modeled as scalar delays (``t_wl_ms``, ``t_ap_mag_ms``) rather than Link
records.

Routing is hop-count shortest path, computed once at construction; equal-cost
ties resolve to the lexicographically smallest node-id sequence so results are
reproducible.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .params import TimingParameters, expand_delays


class TopologyError(Exception):
    """Structural problem with the network description."""


class NoRouteError(TopologyError):
    """No wired path exists between the requested endpoints."""


class NodeRole(str, Enum):
    MN = "mn"
    AP = "ap"
    MAG_LER = "mag"     # access gateway, label edge router
    LSR = "lsr"
    LMA_LER = "lma"     # anchor, label edge router
    CN = "cn"


WIRED_ROLES = frozenset(
    {NodeRole.MAG_LER, NodeRole.LSR, NodeRole.LMA_LER, NodeRole.CN}
)
MPLS_ROLES = frozenset({NodeRole.MAG_LER, NodeRole.LSR, NodeRole.LMA_LER})


@dataclass(frozen=True)
class Node:
    id: str
    role: NodeRole


@dataclass(frozen=True)
class Link:
    """Point-to-point wired link.

    ``node_a`` is by convention the endpoint farther from the anchor, so
    crossing a->b heads toward the LMA and is charged ``delay_down_ms``;
    the reverse crossing is charged ``delay_up_ms``.
    """

    node_a: str
    iface_a: int
    node_b: str
    iface_b: int
    delay_up_ms: float = 2.0
    delay_down_ms: float = 2.0

    def __post_init__(self) -> None:
        if self.node_a == self.node_b:
            raise TopologyError(f"link endpoints must differ: {self.node_a}")
        if self.delay_up_ms < 0 or self.delay_down_ms < 0:
            raise TopologyError("link delays must be >= 0")

    def other_end(self, node_id: str) -> tuple[str, int]:
        """(neighbor id, neighbor interface) as seen from ``node_id``."""
        if node_id == self.node_a:
            return self.node_b, self.iface_b
        if node_id == self.node_b:
            return self.node_a, self.iface_a
        raise TopologyError(f"{node_id} is not an endpoint of this link")

    def iface_of(self, node_id: str) -> int:
        if node_id == self.node_a:
            return self.iface_a
        if node_id == self.node_b:
            return self.iface_b
        raise TopologyError(f"{node_id} is not an endpoint of this link")

    def delay_from(self, node_id: str) -> float:
        """Delay for a message leaving ``node_id`` over this link."""
        if node_id == self.node_a:
            return self.delay_down_ms
        if node_id == self.node_b:
            return self.delay_up_ms
        raise TopologyError(f"{node_id} is not an endpoint of this link")


class Topology:
    """Immutable network description with precomputed routes."""

    def __init__(
        self,
        nodes: Iterable[Node],
        links: Iterable[Link],
        attachments: Mapping[str, str] | None = None,
        ap_to_mag: Mapping[str, str] | None = None,
        validate: bool = True,
    ) -> None:
        self._nodes: dict[str, Node] = {}
        for node in nodes:
            if node.id in self._nodes:
                raise TopologyError(f"duplicate node id {node.id!r}")
            self._nodes[node.id] = node
        self._links: tuple[Link, ...] = tuple(links)
        self._attachments = dict(attachments or {})
        self._ap_to_mag = dict(ap_to_mag or {})

        self._adjacency: dict[str, list[tuple[str, Link]]] = {
            nid: [] for nid in self._nodes
        }
        self._by_iface: dict[tuple[str, int], Link] = {}
        for link in self._links:
            for end, iface in ((link.node_a, link.iface_a), (link.node_b, link.iface_b)):
                if end not in self._nodes:
                    raise TopologyError(f"link references unknown node {end!r}")
                if self._nodes[end].role not in WIRED_ROLES:
                    raise TopologyError(
                        f"{end} has role {self._nodes[end].role.value}; only wired "
                        "nodes may terminate links"
                    )
                key = (end, iface)
                if key in self._by_iface:
                    raise TopologyError(f"interface {iface} reused on {end}")
                self._by_iface[key] = link
            self._adjacency[link.node_a].append((link.node_b, link))
            self._adjacency[link.node_b].append((link.node_a, link))
        for neighbors in self._adjacency.values():
            neighbors.sort(key=lambda pair: pair[0])

        if validate:
            self._validate()
        self._routes = self._compute_routes()
        if validate:
            self._check_gateway_paths()

    # -- accessors ---------------------------------------------------------

    def node(self, node_id: str) -> Node:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise TopologyError(f"unknown node {node_id!r}") from None

    @property
    def nodes(self) -> tuple[Node, ...]:
        return tuple(self._nodes.values())

    @property
    def links(self) -> tuple[Link, ...]:
        return self._links

    def nodes_by_role(self, role: NodeRole) -> tuple[str, ...]:
        return tuple(nid for nid, n in self._nodes.items() if n.role is role)

    def ap_of(self, mn_id: str) -> str:
        try:
            return self._attachments[mn_id]
        except KeyError:
            raise TopologyError(f"{mn_id} is not attached to any AP") from None

    def mag_of_ap(self, ap_id: str) -> str:
        try:
            return self._ap_to_mag[ap_id]
        except KeyError:
            raise TopologyError(f"{ap_id} has no MAG assignment") from None

    def attach(self, mn_id: str, ap_id: str) -> None:
        """Move a mobile node under a (possibly different) access point."""
        if self.node(mn_id).role is not NodeRole.MN:
            raise TopologyError(f"{mn_id} is not a mobile node")
        if self.node(ap_id).role is not NodeRole.AP:
            raise TopologyError(f"{ap_id} is not an access point")
        self._attachments[mn_id] = ap_id

    def link_between(self, a: str, b: str) -> Link:
        for neighbor, link in self._adjacency.get(a, ()):
            if neighbor == b:
                return link
        raise TopologyError(f"no link between {a} and {b}")

    def neighbor_via(self, node_id: str, iface: int) -> tuple[str, Link]:
        link = self._by_iface.get((node_id, iface))
        if link is None:
            raise TopologyError(f"{node_id} has no interface {iface}")
        neighbor, _ = link.other_end(node_id)
        return neighbor, link

    def directed_delay_ms(self, frm: str, to: str) -> float:
        return self.link_between(frm, to).delay_from(frm)

    # -- routing -----------------------------------------------------------

    def route(self, src: str, dst: str) -> list[str]:
        """Hop-count shortest path, lexicographic tie-break, inclusive ends."""
        for nid in (src, dst):
            node = self.node(nid)
            if node.role not in WIRED_ROLES:
                raise TopologyError(
                    f"{nid} ({node.role.value}) is not a wired node; routing "
                    "applies to the wired core only"
                )
        if src == dst:
            return [src]
        path = self._routes.get((src, dst))
        if path is None:
            raise NoRouteError(f"no path from {src} to {dst}")
        return list(path)

    def _compute_routes(self) -> dict[tuple[str, str], tuple[str, ...]]:
        wired = [nid for nid, n in self._nodes.items() if n.role in WIRED_ROLES]
        routes: dict[tuple[str, str], tuple[str, ...]] = {}
        for src in wired:
            # Dijkstra on hop count; the heap orders equal-length candidates
            # by path tuple, which yields the lexicographically smallest one.
            heap: list[tuple[int, tuple[str, ...]]] = [(0, (src,))]
            done: set[str] = set()
            while heap:
                dist, path = heapq.heappop(heap)
                tail = path[-1]
                if tail in done:
                    continue
                done.add(tail)
                routes[(src, tail)] = path
                for neighbor, _link in self._adjacency[tail]:
                    if neighbor not in done and self._nodes[neighbor].role in WIRED_ROLES:
                        heapq.heappush(heap, (dist + 1, path + (neighbor,)))
        return routes

    # -- validation --------------------------------------------------------

    def _validate(self) -> None:
        for mn, ap in self._attachments.items():
            if self.node(mn).role is not NodeRole.MN:
                raise TopologyError(f"attachment source {mn} is not a mobile node")
            if self.node(ap).role is not NodeRole.AP:
                raise TopologyError(f"attachment target {ap} is not an access point")
        for ap, mag in self._ap_to_mag.items():
            if self.node(ap).role is not NodeRole.AP:
                raise TopologyError(f"{ap} is not an access point")
            if self.node(mag).role is not NodeRole.MAG_LER:
                raise TopologyError(f"{mag} is not a MAG")
        wired = [nid for nid, n in self._nodes.items() if n.role in WIRED_ROLES]
        if len(wired) > 1:
            seen = {wired[0]}
            frontier = [wired[0]]
            while frontier:
                current = frontier.pop()
                for neighbor, _link in self._adjacency[current]:
                    if neighbor not in seen:
                        seen.add(neighbor)
                        frontier.append(neighbor)
            missing = [nid for nid in wired if nid not in seen]
            if missing:
                raise TopologyError(f"wired graph is disconnected: {missing}")

    def _check_gateway_paths(self) -> None:
        # every MAG must reach every LMA through LSR-only interiors
        mags = self.nodes_by_role(NodeRole.MAG_LER)
        lmas = self.nodes_by_role(NodeRole.LMA_LER)
        for mag in mags:
            reached = {mag}
            frontier = [mag]
            while frontier:
                current = frontier.pop()
                for neighbor, _link in self._adjacency[current]:
                    if neighbor in reached:
                        continue
                    role = self._nodes[neighbor].role
                    if role is NodeRole.LSR:
                        reached.add(neighbor)
                        frontier.append(neighbor)
                    elif role is NodeRole.LMA_LER:
                        reached.add(neighbor)
            for lma in lmas:
                if lma not in reached:
                    raise TopologyError(
                        f"{mag} cannot reach {lma} through label switching routers"
                    )


def build_linear_topology(
    n_hops: int,
    params: TimingParameters | None = None,
    max_hops: int = 15,
) -> Topology:
    """Two symmetric MAG chains hanging off one LMA.

    MAG1 and MAG2 each sit ``n_hops`` links from LMA1 over disjoint LSR
    chains (so there are no equal-cost alternatives), AP1/AP2 front the two
    MAGs, MN1 starts under AP1, and a correspondent node CN1 is wired to the
    anchor with zero delay.
    """
    if n_hops < 1:
        raise ValueError("n_hops must be >= 1")
    if n_hops > max_hops:
        raise ValueError(f"n_hops must be <= {max_hops}")
    params = params or TimingParameters()
    down = expand_delays(params.d_down_ms, n_hops, "d_down_ms")
    up = expand_delays(params.d_up_ms, n_hops, "d_up_ms")

    nodes = [
        Node("MN1", NodeRole.MN),
        Node("AP1", NodeRole.AP),
        Node("AP2", NodeRole.AP),
        Node("MAG1", NodeRole.MAG_LER),
        Node("MAG2", NodeRole.MAG_LER),
        Node("LMA1", NodeRole.LMA_LER),
        Node("CN1", NodeRole.CN),
    ]
    links = [Link("CN1", 1, "LMA1", 1, delay_up_ms=0.0, delay_down_ms=0.0)]

    lsr_count = 0

    def chain(mag_id: str, lma_iface: int) -> None:
        nonlocal lsr_count
        lsrs = []
        for _ in range(n_hops - 1):
            lsr_count += 1
            lsr_id = f"LSR{lsr_count}"
            nodes.append(Node(lsr_id, NodeRole.LSR))
            lsrs.append(lsr_id)
        seq = [mag_id] + lsrs + ["LMA1"]
        for k in range(n_hops):
            a, b = seq[k], seq[k + 1]
            iface_a = 2 if k == 0 else 1          # MAG core port / LSR anchor-side port
            iface_b = lma_iface if k == n_hops - 1 else 2
            links.append(
                Link(
                    node_a=a,
                    iface_a=iface_a,
                    node_b=b,
                    iface_b=iface_b,
                    delay_up_ms=up[n_hops - 1 - k],
                    delay_down_ms=down[k],
                )
            )

    chain("MAG1", 2)
    chain("MAG2", 3)

    return Topology(
        nodes,
        links,
        attachments={"MN1": "AP1"},
        ap_to_mag={"AP1": "MAG1", "AP2": "MAG2"},
    )
