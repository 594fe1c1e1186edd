"""Scheme name parsing and timing parameter validation."""

import pytest

from pm2pls import ALL_SCHEMES, HandoverScheme, TimingParameters
from pm2pls.params import expand_delays


def test_canonical_scheme_values():
    assert [s.value for s in ALL_SCHEMES] == [
        "pmipv6", "pmipv6-mpls", "pm2pls-cold", "pm2pls-warm",
    ]


@pytest.mark.parametrize(
    "name,expected",
    [
        ("pmipv6", HandoverScheme.PMIPV6),
        ("pmipv6-mpls", HandoverScheme.PMIPV6_MPLS),
        ("pmipv6/mpls", HandoverScheme.PMIPV6_MPLS),
        ("encapsulated", HandoverScheme.PMIPV6_MPLS),
        ("pm2pls-cold", HandoverScheme.PM2PLS_COLD),
        ("cold-pm2pls", HandoverScheme.PM2PLS_COLD),
        ("pm2pls-warm", HandoverScheme.PM2PLS_WARM),
        ("warm-pm2pls", HandoverScheme.PM2PLS_WARM),
        ("  PM2PLS-WARM  ", HandoverScheme.PM2PLS_WARM),
    ],
)
def test_scheme_parse(name, expected):
    assert HandoverScheme.parse(name) is expected


def test_scheme_parse_rejects_unknown():
    with pytest.raises(ValueError, match="unknown scheme"):
        HandoverScheme.parse("hmipv6")


def test_default_values(default_params):
    p = default_params
    assert p.alpha_rp_ms == 0.2
    assert p.beta_rp_ms == 0.1
    assert p.t_wl_ms == 10
    assert p.t_scanning_ms == 100
    assert p.t_authentication_ms == 5
    assert p.t_association_ms == 10
    assert p.t_ap_mag_ms == 2
    assert p.lambda_pr_packets_per_s == 170
    assert p.n_hops == 1 and p.m_hops == 1
    assert p.t_aaa_override_ms is None


@pytest.mark.parametrize(
    "field,value",
    [
        ("alpha_rp_ms", -0.1),
        ("t_wl_ms", -1),
        ("lambda_pr_packets_per_s", -5),
        ("n_hops", 0),
        ("m_hops", 0),
        ("t_aaa_override_ms", -3.0),
    ],
)
def test_rejects_invalid_fields(field, value):
    with pytest.raises(ValueError):
        TimingParameters(**{field: value})


def test_delay_vectors_normalized():
    p = TimingParameters(n_hops=3, m_hops=2, d_down_ms=(1, 2, 3), d_up_ms=(4, 5))
    assert p.d_down_ms == (1.0, 2.0, 3.0)
    assert p.mag_to_lma_delays() == (1.0, 2.0, 3.0)
    assert p.lma_to_mag_delays() == (4.0, 5.0)


def test_delay_vector_length_checked_eagerly():
    with pytest.raises(ValueError, match="d_down_ms"):
        TimingParameters(n_hops=2, d_down_ms=(1.0, 2.0, 3.0))


def test_delay_vector_rejects_negative_and_empty():
    with pytest.raises(ValueError):
        TimingParameters(d_down_ms=(-1.0,))
    with pytest.raises(ValueError):
        TimingParameters(n_hops=1, d_up_ms=())


def test_expand_delays():
    assert expand_delays(2.0, 3, "d") == (2.0, 2.0, 2.0)
    assert expand_delays((1.0, 2.0), 2, "d") == (1.0, 2.0)
    with pytest.raises(ValueError, match="2 entries but the path has 3"):
        expand_delays((1.0, 2.0), 3, "d")


def test_with_hops_defaults_m_to_n(default_params):
    p = default_params.with_hops(4)
    assert (p.n_hops, p.m_hops) == (4, 4)
    q = default_params.with_hops(4, 2)
    assert (q.n_hops, q.m_hops) == (4, 2)


def test_replace_revalidates(default_params):
    assert default_params.replace(t_wl_ms=12.0).t_wl_ms == 12.0
    with pytest.raises(ValueError):
        default_params.replace(t_wl_ms=-1.0)
