"""Command line client.

All real work happens behind the HTTP API in :mod:`pm2pls.service`; this
client assembles a sweep request from flags and an optional scenario file,
posts it (in-process by default, or to ``--server URL``) and writes the CSV,
warnings and traces where they belong.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import httpx

from . import __version__
from .params import ALL_SCHEMES, HandoverScheme
from .sweep import ScenarioConfig, _parse_hops, load_scenario_config


class ClientError(Exception):
    """Anything that should become a one-line diagnostic and exit code 1."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pm2pls",
        description=(
            "Handover delay, packet loss and tunnel overhead for PMIPv6/MPLS "
            "handover schemes: analytic sweeps, discrete-event simulation, "
            "CSV output."
        ),
    )
    parser.add_argument(
        "--schemes",
        metavar="LIST",
        help="comma-separated scheme names, or 'all' "
             f"(valid: {', '.join(s.value for s in ALL_SCHEMES)})",
    )
    parser.add_argument(
        "--hops", metavar="MIN..MAX",
        help="gateway-to-anchor hop range, e.g. 1..15 (a single integer works)",
    )
    parser.add_argument(
        "--m-hops", dest="m_hops", type=int, metavar="M",
        help="anchor-to-gateway hop count for asymmetric paths "
             "(analytic sweeps only)",
    )
    parser.add_argument(
        "--params", metavar="FILE", help="scenario configuration file"
    )
    parser.add_argument(
        "--output", metavar="FILE", help="write the CSV here instead of stdout"
    )
    parser.add_argument(
        "--simulate", action="store_true",
        help="run the event simulator at every sweep point and add the "
             "simulated loss column",
    )
    parser.add_argument(
        "--trace", action="store_true",
        help="print each simulation's event log after the CSV "
             "(implies --simulate)",
    )
    parser.add_argument(
        "--loss", action="store_true",
        help="kept for compatibility; the loss columns are always emitted",
    )
    parser.add_argument(
        "--overhead-table", action="store_true",
        help="print the per-packet tunnel overhead table and exit",
    )
    parser.add_argument(
        "--server", metavar="URL",
        help="talk to a running service instead of computing in-process",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    return parser


def _make_client(server: str | None):
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=60.0)

    import warnings

    with warnings.catch_warnings():
        # some fastapi/starlette pairings warn on this import
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _checked(response):
    if response.status_code == 200:
        return response
    try:
        detail = response.json().get("detail", response.text)
    except ValueError:
        detail = response.text
    raise ClientError(f"service error {response.status_code}: {detail}")


def _assemble_config(args: argparse.Namespace) -> ScenarioConfig:
    base = load_scenario_config(args.params) if args.params else ScenarioConfig()
    schemes = base.schemes
    if args.schemes:
        text = args.schemes.strip()
        if text.lower() == "all":
            schemes = ALL_SCHEMES
        else:
            schemes = tuple(
                HandoverScheme.parse(part)
                for part in text.split(",")
                if part.strip()
            )
            if not schemes:
                raise ValueError("--schemes must name at least one scheme")
    hop_min, hop_max = base.hop_min, base.hop_max
    if args.hops:
        hop_min, hop_max = _parse_hops(args.hops, "--hops")
    return ScenarioConfig(
        schemes=schemes,
        hop_min=hop_min,
        hop_max=hop_max,
        m_hops=args.m_hops if args.m_hops is not None else base.m_hops,
        params=base.params,
        scheme_overrides=base.scheme_overrides,
        output=args.output or base.output,
        simulate=args.simulate or base.simulate,
        trace=args.trace or base.trace,
        loss=args.loss or base.loss,
        analytic_only=base.analytic_only,
    )


def _sweep_payload(config: ScenarioConfig) -> dict[str, object]:
    return {
        "schemes": [scheme.value for scheme in config.schemes],
        "hop_min": config.hop_min,
        "hop_max": config.hop_max,
        "m_hops": config.m_hops,
        "params": dataclasses.asdict(config.params),
        "scheme_overrides": {
            scheme.value: dict(overrides)
            for scheme, overrides in config.scheme_overrides.items()
        },
        "simulate": config.simulate,
        "trace": config.trace,
        "analytic_only": config.analytic_only,
    }


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        client = _make_client(args.server)
    except Exception as exc:     # import or URL problems
        print(f"pm2pls: {exc}", file=sys.stderr)
        return 1
    try:
        if args.overhead_table:
            response = _checked(client.get("/overhead-table"))
            sys.stdout.write(response.text)
            return 0
        config = _assemble_config(args)
        response = _checked(client.post("/sweep", json=_sweep_payload(config)))
        data = response.json()
        for warning in dict.fromkeys(data["warnings"]):
            print(f"pm2pls: warning: {warning}", file=sys.stderr)
        if config.output:
            Path(config.output).write_text(data["csv"])
        else:
            sys.stdout.write(data["csv"])
        for label, text in data["traces"].items():
            sys.stdout.write(f"# trace {label}\n")
            sys.stdout.write(text)
        return 0
    except ValueError as exc:
        print(f"pm2pls: {exc}", file=sys.stderr)
        return 2
    except ClientError as exc:
        print(f"pm2pls: {exc}", file=sys.stderr)
        return 1
    except httpx.HTTPError as exc:
        print(f"pm2pls: cannot reach {args.server}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"pm2pls: {exc}", file=sys.stderr)
        return 1
    finally:
        client.close()


if __name__ == "__main__":     # pragma: no cover
    sys.exit(main())
