"""Scheme identifiers and the timing parameter set shared by the analytic
model and the event simulator.

All delay fields are milliseconds; the packet rate is packets per second.
Defaults reproduce the reference parameter table for an 802.11 access network
with 2 ms wired links.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum


class HandoverScheme(str, Enum):
    """The four handover schemes the sweep compares.

    PMIPV6            plain PMIPv6 with an IP-in-IP tunnel (IPv6 outer header).
    PMIPV6_MPLS       PMIPv6 over MPLS where each LSP is established inside the
                      binding update exchange (encapsulated setup, no overlap).
    PM2PLS_COLD       integrated PMIPv6/MPLS, no LSP to the new MAG yet; setup
                      overlaps the binding acknowledgement.
    PM2PLS_WARM       integrated PMIPv6/MPLS with the bidirectional LSP already
                      established, signaling rides the tunnel.
    """

    PMIPV6 = "pmipv6"
    PMIPV6_MPLS = "pmipv6-mpls"
    PM2PLS_COLD = "pm2pls-cold"
    PM2PLS_WARM = "pm2pls-warm"

    @classmethod
    def parse(cls, name: str) -> "HandoverScheme":
        key = name.strip().lower()
        if key in _SCHEME_ALIASES:
            return _SCHEME_ALIASES[key]
        valid = ", ".join(s.value for s in cls)
        raise ValueError(f"unknown scheme {name!r} (valid: {valid})")


_SCHEME_ALIASES: dict[str, HandoverScheme] = {
    **{s.value: s for s in HandoverScheme},
    "warm-pm2pls": HandoverScheme.PM2PLS_WARM,
    "cold-pm2pls": HandoverScheme.PM2PLS_COLD,
    "pm2pls/warm": HandoverScheme.PM2PLS_WARM,
    "pm2pls/cold": HandoverScheme.PM2PLS_COLD,
    "pmipv6/mpls": HandoverScheme.PMIPV6_MPLS,
    "pmipv6-mpls-encapsulated": HandoverScheme.PMIPV6_MPLS,
    "encapsulated": HandoverScheme.PMIPV6_MPLS,
}

ALL_SCHEMES: tuple[HandoverScheme, ...] = tuple(HandoverScheme)

# Published summary value for the whole AAA exchange; the per-component sum
# below gives 2.1 ms instead.  Selectable through t_aaa_override_ms.
AAA_SUMMARY_DELAY_MS = 3.0

DelaySpec = float | tuple[float, ...]


@dataclass(frozen=True)
class TimingParameters:
    """Delay and rate constants for the handover model.

    The per-link delay fields accept either a scalar (uniform delay) or a
    per-link vector.  Note the direction pairing: ``d_down_ms`` is charged on
    links crossed *toward* the LMA (MAG->LMA transit, n_hops links) and
    ``d_up_ms`` on links crossed toward the MAG (LMA->MAG, m_hops links).
    That pairing follows the delay model's link indexing and matters only for
    asymmetric delays.
    """

    alpha_rp_ms: float = 0.2        # per-hop processing, plain IP forwarding
    alpha_aaa_server_ms: float = 0.1
    t_wl_ms: float = 10.0           # wireless link, AP -> MN
    t_scanning_ms: float = 100.0
    t_authentication_ms: float = 5.0
    t_association_ms: float = 10.0
    t_ap_mag_ms: float = 2.0
    t_aaa_req_ms: float = 1.0
    t_aaa_resp_ms: float = 1.0
    beta_rp_ms: float = 0.1         # per-hop processing when label switched
    beta_mag_ms: float = 0.2
    beta_lma_ms: float = 0.5
    alpha_mag_ms: float = 0.2
    alpha_lma_ms: float = 0.5
    d_up_ms: DelaySpec = 2.0        # per link, LMA -> MAG direction
    d_down_ms: DelaySpec = 2.0      # per link, MAG -> LMA direction
    lambda_pr_packets_per_s: float = 170.0
    n_hops: int = 1                 # links on the MAG -> LMA path
    m_hops: int = 1                 # links on the LMA -> MAG path
    t_aaa_override_ms: float | None = None

    def __post_init__(self) -> None:
        if self.n_hops < 1 or self.m_hops < 1:
            raise ValueError("n_hops and m_hops must be >= 1")
        for name in (
            "alpha_rp_ms", "alpha_aaa_server_ms", "t_wl_ms", "t_scanning_ms",
            "t_authentication_ms", "t_association_ms", "t_ap_mag_ms",
            "t_aaa_req_ms", "t_aaa_resp_ms", "beta_rp_ms", "beta_mag_ms",
            "beta_lma_ms", "alpha_mag_ms", "alpha_lma_ms",
            "lambda_pr_packets_per_s",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.t_aaa_override_ms is not None and self.t_aaa_override_ms < 0:
            raise ValueError("t_aaa_override_ms must be >= 0")
        object.__setattr__(self, "d_up_ms", _normalize_delays(self.d_up_ms, "d_up_ms"))
        object.__setattr__(self, "d_down_ms", _normalize_delays(self.d_down_ms, "d_down_ms"))
        # vector lengths are checked eagerly so config errors surface early
        self.lma_to_mag_delays()
        self.mag_to_lma_delays()

    def mag_to_lma_delays(self) -> tuple[float, ...]:
        """Per-link delays crossed by MAG->LMA messages, ordered from the MAG."""
        return expand_delays(self.d_down_ms, self.n_hops, "d_down_ms")

    def lma_to_mag_delays(self) -> tuple[float, ...]:
        """Per-link delays crossed by LMA->MAG messages, ordered from the LMA."""
        return expand_delays(self.d_up_ms, self.m_hops, "d_up_ms")

    def with_hops(self, n_hops: int, m_hops: int | None = None) -> "TimingParameters":
        return dataclasses.replace(
            self, n_hops=n_hops, m_hops=n_hops if m_hops is None else m_hops
        )

    def replace(self, **changes: object) -> "TimingParameters":
        return dataclasses.replace(self, **changes)


def _normalize_delays(value: DelaySpec, name: str) -> DelaySpec:
    if isinstance(value, (int, float)):
        if value < 0:
            raise ValueError(f"{name} must be >= 0")
        return float(value)
    vec = tuple(float(v) for v in value)
    if not vec:
        raise ValueError(f"{name} vector must not be empty")
    if any(v < 0 for v in vec):
        raise ValueError(f"{name} entries must be >= 0")
    return vec


def expand_delays(value: DelaySpec, hops: int, name: str) -> tuple[float, ...]:
    """Expand a scalar-or-vector delay spec to exactly ``hops`` entries."""
    if isinstance(value, (int, float)):
        return (float(value),) * hops
    if len(value) != hops:
        raise ValueError(
            f"{name} has {len(value)} entries but the path has {hops} links"
        )
    return tuple(value)
