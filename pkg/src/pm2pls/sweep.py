"""Parameter sweeps over schemes and hop counts.

Produces one CSV row per (scheme, hop count) with the full delay breakdown,
the expected packet loss, optionally the simulated loss, and the per-packet
tunnel overhead.  The scenario configuration file is line-oriented
``key = value`` text with optional ``[scheme]`` sections whose keys override
timing parameters for that scheme only.
"""

from __future__ import annotations

import csv
import dataclasses
import io
from dataclasses import dataclass, field
from pathlib import Path

from . import analytic
from .engine import TraceLog
from .mpls import TunnelKind, overhead_bytes, overhead_rows
from .params import ALL_SCHEMES, HandoverScheme, TimingParameters
from .scenario import simulate_handover

# what one downlink data packet pays in tunnel headers, per scheme
SCHEME_DATA_PLANE_OVERHEAD: dict[HandoverScheme, int] = {
    HandoverScheme.PMIPV6: overhead_bytes(TunnelKind.PMIPV6_IPV6_IN_IPV6),
    HandoverScheme.PMIPV6_MPLS: overhead_bytes(TunnelKind.PMIPV6_MPLS_VP_LABEL),
    HandoverScheme.PM2PLS_COLD: overhead_bytes(TunnelKind.PM2PLS),
    HandoverScheme.PM2PLS_WARM: overhead_bytes(TunnelKind.PM2PLS),
}

AAA_SUM_WARNING = (
    "authentication delay uses the component sum (2.1 ms with defaults); "
    "set t_aaa_override_ms = 3 to use the published summary value instead"
)

_SETTING_KEYS = {
    "schemes", "hops", "m_hops", "output",
    "simulate", "trace", "loss", "analytic_only",
}
_PARAM_KEYS = {
    f.name for f in dataclasses.fields(TimingParameters)
} - {"n_hops", "m_hops"}
_BOOL_WORDS = {
    "true": True, "yes": True, "on": True, "1": True,
    "false": False, "no": False, "off": False, "0": False,
}


@dataclass
class ScenarioConfig:
    """Everything one sweep needs; built from a file or programmatically."""

    schemes: tuple[HandoverScheme, ...] = ALL_SCHEMES
    hop_min: int = 1
    hop_max: int = 15
    m_hops: int | None = None       # None: symmetric with the hop column
    params: TimingParameters = field(default_factory=TimingParameters)
    scheme_overrides: dict[HandoverScheme, dict[str, object]] = field(
        default_factory=dict
    )
    output: str | None = None
    simulate: bool = False
    trace: bool = False
    loss: bool = True               # loss columns are always emitted; kept for
                                    # command-line compatibility
    analytic_only: bool = False
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.schemes:
            raise ValueError("at least one scheme is required")
        if self.hop_min < 1:
            raise ValueError("hop range must start at 1 or above")
        if self.hop_max < self.hop_min:
            raise ValueError("hop range must not be empty")
        if self.m_hops is not None and self.m_hops < 1:
            raise ValueError("m_hops must be >= 1")
        if self.trace and self.analytic_only:
            raise ValueError("trace output needs a simulation; drop analytic_only")
        if self.trace:
            self.simulate = True
        if self.simulate and self.analytic_only:
            raise ValueError("simulate and analytic_only are mutually exclusive")
        if self.simulate and self.m_hops is not None:
            raise ValueError(
                "the simulated topology is symmetric; m_hops applies to "
                "analytic sweeps only"
            )
        valid_keys = {f.name for f in dataclasses.fields(TimingParameters)}
        checked = list(self.schemes)
        for scheme, overrides in self.scheme_overrides.items():
            for key in overrides:
                if key not in valid_keys:
                    raise ValueError(
                        f"unknown parameter {key!r} in [{scheme.value}] overrides"
                    )
            if scheme not in self.schemes:
                checked.append(scheme)
                self.warnings.append(
                    f"[{scheme.value}] section is unused: scheme not in sweep"
                )
        # every sweep point must yield a valid parameter set, in particular
        # per-link delay vectors must fit each hop count in the range
        for scheme in checked:
            for n in range(self.hop_min, self.hop_max + 1):
                m = self.m_hops if self.m_hops is not None else n
                try:
                    self.params_for(scheme, n, m)
                except ValueError as exc:
                    raise ValueError(f"{scheme.value} at n={n}: {exc}") from None
        if self.params.t_aaa_override_ms is None:
            self.warnings.append(AAA_SUM_WARNING)

    def params_for(
        self,
        scheme: HandoverScheme,
        n_hops: int | None = None,
        m_hops: int | None = None,
    ) -> TimingParameters:
        """Base parameters plus the scheme's overrides, at the given hop counts.

        Hop counts and overrides are applied in one step so a per-link delay
        vector in an override is only ever checked against its target path
        length.
        """
        changes: dict[str, object] = dict(self.scheme_overrides.get(scheme, {}))
        if n_hops is not None:
            changes["n_hops"] = n_hops
            changes["m_hops"] = n_hops if m_hops is None else m_hops
        return self.params.replace(**changes) if changes else self.params


def _parse_bool(value: str, where: str) -> bool:
    try:
        return _BOOL_WORDS[value.strip().lower()]
    except KeyError:
        raise ValueError(f"{where}: expected a boolean, got {value!r}") from None


def _parse_param_value(key: str, value: str, where: str) -> object:
    if key in ("d_up_ms", "d_down_ms") and "," in value:
        try:
            return tuple(float(part) for part in value.split(","))
        except ValueError:
            raise ValueError(f"{where}: bad delay vector {value!r}") from None
    if key == "t_aaa_override_ms" and value.lower() in ("none", ""):
        return None
    try:
        return float(value)
    except ValueError:
        raise ValueError(f"{where}: expected a number, got {value!r}") from None


def _parse_hops(value: str, where: str) -> tuple[int, int]:
    text = value.strip()
    lo, sep, hi = text.partition("..")
    try:
        if sep:
            return int(lo), int(hi)
        single = int(text)
        return single, single
    except ValueError:
        raise ValueError(
            f"{where}: expected MIN..MAX or a single integer, got {value!r}"
        ) from None


def load_scenario_config(path: str | Path) -> ScenarioConfig:
    """Parse a scenario file.  Unknown keys are errors, not typo traps."""
    path = Path(path)
    settings: dict[str, object] = {}
    global_params: dict[str, object] = {}
    overrides: dict[HandoverScheme, dict[str, object]] = {}
    section: HandoverScheme | None = None

    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        where = f"{path}:{lineno}"
        if not line or line.startswith(("#", ";")):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            try:
                section = HandoverScheme.parse(name)
            except ValueError as exc:
                raise ValueError(f"{where}: {exc}") from None
            overrides.setdefault(section, {})
            continue
        if "=" not in line:
            raise ValueError(f"{where}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        value = value.strip()
        if section is not None:
            if key not in _PARAM_KEYS:
                raise ValueError(
                    f"{where}: unknown parameter {key!r} in "
                    f"[{section.value}] section"
                )
            overrides[section][key] = _parse_param_value(key, value, where)
            continue
        if key in _PARAM_KEYS:
            global_params[key] = _parse_param_value(key, value, where)
        elif key == "schemes":
            if value.strip().lower() == "all":
                settings["schemes"] = ALL_SCHEMES
            else:
                try:
                    settings["schemes"] = tuple(
                        HandoverScheme.parse(part)
                        for part in value.split(",")
                        if part.strip()
                    )
                except ValueError as exc:
                    raise ValueError(f"{where}: {exc}") from None
        elif key == "hops":
            settings["hop_min"], settings["hop_max"] = _parse_hops(value, where)
        elif key == "m_hops":
            try:
                settings["m_hops"] = int(value)
            except ValueError:
                raise ValueError(f"{where}: m_hops must be an integer") from None
        elif key == "output":
            settings["output"] = value
        elif key in _SETTING_KEYS:
            settings[key] = _parse_bool(value, where)
        else:
            raise ValueError(f"{where}: unknown key {key!r}")

    # hop counts come from the sweep range, but the parameter set checks
    # delay vector lengths eagerly, so seed them from the vectors themselves
    if isinstance(global_params.get("d_down_ms"), tuple):
        global_params["n_hops"] = len(global_params["d_down_ms"])
    if isinstance(global_params.get("d_up_ms"), tuple):
        global_params["m_hops"] = len(global_params["d_up_ms"])
    try:
        params = TimingParameters(**global_params)  # type: ignore[arg-type]
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{path}: {exc}") from None
    return ScenarioConfig(
        params=params, scheme_overrides=overrides, **settings  # type: ignore[arg-type]
    )


@dataclass(frozen=True)
class SweepResult:
    csv: str
    rows: list[dict[str, object]]
    warnings: list[str]
    traces: dict[str, str]      # "scheme-nK" -> event log text, when tracing


_BASE_COLUMNS = (
    "scheme", "n", "m", "t_l2ho_ms", "t_aaa_ms", "t_reg_ms", "t_lsp_ms",
    "t_ra_ms", "t_l3ho_ms", "t_ho_ms", "expected_loss_pkts",
)


def run_sweep(config: ScenarioConfig) -> SweepResult:
    """Evaluate every (scheme, hop count) point; rows are ordered by the
    scheme list, then ascending hop count, whatever runs first."""
    rows: list[dict[str, object]] = []
    traces: dict[str, str] = {}
    for scheme in config.schemes:
        for n in range(config.hop_min, config.hop_max + 1):
            m = config.m_hops if config.m_hops is not None else n
            params = config.params_for(scheme, n, m)
            breakdown = analytic.t_ho(scheme, params)
            loss = analytic.packet_loss(
                breakdown.t_ho_ms, params.lambda_pr_packets_per_s
            )
            row: dict[str, object] = {
                "scheme": scheme.value,
                "n": n,
                "m": m,
                "t_l2ho_ms": breakdown.t_l2ho_ms,
                "t_aaa_ms": breakdown.t_aaa_ms,
                "t_reg_ms": breakdown.t_reg_ms,
                "t_lsp_ms": breakdown.t_bi_lsp_setup_ms,
                "t_ra_ms": breakdown.t_ra_ms,
                "t_l3ho_ms": breakdown.t_l3ho_ms,
                "t_ho_ms": breakdown.t_ho_ms,
                "expected_loss_pkts": loss.expected,
                "overhead_bytes_per_pkt": SCHEME_DATA_PLANE_OVERHEAD[scheme],
            }
            if config.simulate:
                trace = TraceLog() if config.trace else None
                metrics = simulate_handover(scheme, params, trace=trace)
                if metrics.failed:
                    raise RuntimeError(
                        f"simulation failed for {scheme.value} at n={n}: "
                        f"{metrics.failure}"
                    )
                measured = metrics.breakdown
                assert measured is not None
                row.update(
                    t_l2ho_ms=measured.t_l2ho_ms,
                    t_aaa_ms=measured.t_aaa_ms,
                    t_reg_ms=measured.t_reg_ms,
                    t_lsp_ms=measured.t_bi_lsp_setup_ms,
                    t_ra_ms=measured.t_ra_ms,
                    t_l3ho_ms=measured.t_l3ho_ms,
                    t_ho_ms=measured.t_ho_ms,
                    simulated_loss_pkts=metrics.packets_lost,
                )
                if trace is not None:
                    traces[f"{scheme.value}-n{n}"] = trace.text()
            rows.append(row)
    return SweepResult(
        csv=render_csv(rows, simulated=config.simulate),
        rows=rows,
        warnings=list(config.warnings),
        traces=traces,
    )


def render_csv(rows: list[dict[str, object]], simulated: bool) -> str:
    columns = list(_BASE_COLUMNS)
    if simulated:
        columns.append("simulated_loss_pkts")
    columns.append("overhead_bytes_per_pkt")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(
            f"{value:.6f}" if isinstance(value, float) else str(value)
            for value in (row[column] for column in columns)
        )
    return buffer.getvalue()


def overhead_table_text() -> str:
    """Fixed-width text table of per-packet tunnel overhead, all mechanisms."""
    rows = overhead_rows()
    name_width = max(len(name) for name, _, _ in rows)
    lines = [f"{'Scheme and tunnel':<{name_width}}  Bytes  Per-packet cost"]
    for name, size, description in rows:
        lines.append(f"{name:<{name_width}}  {size:>5}  {description}")
    return "\n".join(lines) + "\n"
