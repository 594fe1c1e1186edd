"""Layer-2 (802.11) handover delay: scanning, authentication, association."""

from __future__ import annotations

from dataclasses import dataclass

from .params import TimingParameters


@dataclass(frozen=True)
class L2HandoverPhases:
    scanning_ms: float
    authentication_ms: float
    association_ms: float

    def __post_init__(self) -> None:
        for name in ("scanning_ms", "authentication_ms", "association_ms"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


def phases_from_params(params: TimingParameters) -> L2HandoverPhases:
    return L2HandoverPhases(
        scanning_ms=params.t_scanning_ms,
        authentication_ms=params.t_authentication_ms,
        association_ms=params.t_association_ms,
    )


def l2_handover_delay(phases: L2HandoverPhases) -> float:
    """Total link-layer handover time: the three phases run back to back."""
    return phases.scanning_ms + phases.authentication_ms + phases.association_ms
