"""Command line client: flags, files, pipes and exit codes."""

import pytest

from pm2pls.cli import main

from conftest import read_golden

WARM_ROW = (
    "pm2pls-warm,1,1,115.000000,2.100000,4.900000,0.000000,12.000000,"
    "19.000000,134.000000,22.780000,4"
)


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analytic_single_point(capsys):
    code, out, err = _run(capsys, "--schemes", "pm2pls-warm", "--hops", "1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == (
        "scheme,n,m,t_l2ho_ms,t_aaa_ms,t_reg_ms,t_lsp_ms,t_ra_ms,t_l3ho_ms,"
        "t_ho_ms,expected_loss_pkts,overhead_bytes_per_pkt"
    )
    assert lines[1] == WARM_ROW
    assert "warning" in err and "authentication delay" in err


def test_default_sweep_covers_the_full_grid(capsys):
    code, out, _ = _run(capsys)
    assert code == 0
    assert len(out.splitlines()) == 1 + 4 * 15


def test_scheme_aliases_and_ranges(capsys):
    code, out, _ = _run(capsys, "--schemes", "encapsulated,warm-pm2pls",
                        "--hops", "2..3")
    assert code == 0
    rows = [line.split(",")[:2] for line in out.splitlines()[1:]]
    assert rows == [
        ["pmipv6-mpls", "2"], ["pmipv6-mpls", "3"],
        ["pm2pls-warm", "2"], ["pm2pls-warm", "3"],
    ]


def test_simulate_adds_measured_loss(capsys):
    code, out, _ = _run(capsys, "--schemes", "pm2pls-warm", "--hops", "1",
                        "--simulate")
    assert code == 0
    header, row = out.splitlines()
    assert "simulated_loss_pkts" in header
    assert row.split(",")[header.split(",").index("simulated_loss_pkts")] == "23"


def test_trace_blocks_follow_the_csv(capsys):
    code, out, _ = _run(capsys, "--schemes", "pm2pls-warm", "--hops", "1",
                        "--trace")
    assert code == 0
    assert "# trace pm2pls-warm-n1\n" in out
    csv_part, _, trace_part = out.partition("# trace ")
    assert csv_part.splitlines()[-1].startswith("pm2pls-warm,1,")
    assert "rtradv_sent" in trace_part


def test_output_file(tmp_path, capsys):
    target = tmp_path / "sweep.csv"
    code, out, _ = _run(capsys, "--schemes", "pm2pls-warm", "--hops", "1",
                        "--output", str(target))
    assert code == 0
    assert out == ""
    assert target.read_text().splitlines()[1] == WARM_ROW


def test_scenario_file_with_flag_overrides(tmp_path, capsys):
    scenario = tmp_path / "scenario.conf"
    scenario.write_text("schemes = pmipv6\nhops = 5\nt_aaa_override_ms = 3\n")
    code, out, err = _run(capsys, "--params", str(scenario), "--hops", "1")
    assert code == 0
    row = out.splitlines()[1].split(",")
    assert row[0] == "pmipv6" and row[1] == "1"
    assert row[4] == "3.000000"       # the summary authentication value
    assert "authentication delay" not in err


def test_overhead_table(capsys):
    code, out, err = _run(capsys, "--overhead-table")
    assert code == 0
    assert out == read_golden("overhead_table.txt")
    assert err == ""


def test_loss_flag_is_accepted(capsys):
    code, out, _ = _run(capsys, "--schemes", "pm2pls-warm", "--hops", "1",
                        "--loss")
    assert code == 0
    assert "expected_loss_pkts" in out.splitlines()[0]


def test_repeated_runs_are_identical(capsys):
    first = _run(capsys, "--schemes", "pm2pls-cold", "--hops", "1..2", "--trace")
    second = _run(capsys, "--schemes", "pm2pls-cold", "--hops", "1..2", "--trace")
    assert first == second


# -- failure modes ------------------------------------------------------------------

def test_unknown_scheme_is_a_usage_error(capsys):
    code, _, err = _run(capsys, "--schemes", "dsmip")
    assert code == 2
    assert err.startswith("pm2pls: unknown scheme")


def test_bad_hop_range(capsys):
    code, _, err = _run(capsys, "--hops", "x..y")
    assert code == 2
    assert "--hops" in err


def test_asymmetric_simulation_refused(capsys):
    code, _, err = _run(capsys, "--simulate", "--m-hops", "2")
    assert code == 2
    assert "symmetric" in err


def test_broken_scenario_file(tmp_path, capsys):
    scenario = tmp_path / "scenario.conf"
    scenario.write_text("warp = 9\n")
    code, _, err = _run(capsys, "--params", str(scenario))
    assert code == 2
    assert "unknown key 'warp'" in err


def test_missing_scenario_file(tmp_path, capsys):
    code, _, err = _run(capsys, "--params", str(tmp_path / "absent.conf"))
    assert code == 1
    assert err.startswith("pm2pls:")


def test_unwritable_output(tmp_path, capsys):
    code, _, err = _run(capsys, "--schemes", "pm2pls-warm", "--hops", "1",
                        "--output", str(tmp_path / "no" / "dir" / "out.csv"))
    assert code == 1
    assert err.startswith("pm2pls:")


def test_unreachable_server(capsys):
    code, _, err = _run(capsys, "--overhead-table",
                        "--server", "http://127.0.0.1:9")
    assert code == 1
    assert "cannot reach" in err


def test_unknown_flag_exits_two(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--frobnicate"])
    assert excinfo.value.code == 2


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert capsys.readouterr().out.startswith("pm2pls ")
