"""End-to-end CLI behavior: subcommands, exit codes, emitted files."""

import pytest

from helios.cli import cli_main
from helios.config import Config, save_config
from helios.data import load_hourly_csv
from helios.renewable import DEFAULT_COEFFS


@pytest.fixture
def fast_config(tmp_path):
    """Small optimizer budgets so CLI runs stay quick."""
    path = tmp_path / "fast.cfg"
    text_overrides = (
        "horizon_steps = 3\n"
        "evo_population = 20\n"
        "evo_generations = 10\n"
        "evo_local_search_budget = 20\n"
        "aco_ants = 10\n"
        "aco_iterations = 10\n"
    )
    save_config(Config(), str(path))
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(text_overrides)
    return str(path)


def test_generate_then_simulate_smoke(tmp_path):
    csv = tmp_path / "s.csv"
    out = tmp_path / "run"
    assert cli_main(["generate-data", "--days", "1", "--seed", "7",
                     "--out", str(csv)]) == 0
    assert load_hourly_csv(str(csv)).steps == 24
    assert cli_main(["simulate", "--strategy", "renewable_first",
                     "--data", str(csv), "--out-dir", str(out)]) == 0
    trace = (out / "trace_renewable_first.csv").read_text().strip().splitlines()
    assert len(trace) == 25  # header + 24 rows
    assert (out / "summary_renewable_first.kv").exists()
    assert (out / "summary_renewable_first.txt").exists()


def test_unknown_strategy_exits_1_and_echoes_name(tmp_path, capsys):
    csv = tmp_path / "s.csv"
    cli_main(["generate-data", "--days", "1", "--seed", "1", "--out", str(csv)])
    code = cli_main(["simulate", "--strategy", "quantum_annealer",
                     "--data", str(csv), "--out-dir", str(tmp_path / "o")])
    assert code == 1
    assert "quantum_annealer" in capsys.readouterr().err


def test_compare_lists_all_seven_strategies(tmp_path, fast_config):
    csv = tmp_path / "s.csv"
    out = tmp_path / "cmp"
    cli_main(["generate-data", "--days", "1", "--seed", "3", "--out", str(csv)])
    code = cli_main(["compare", "--config", fast_config, "--data", str(csv),
                     "--strategies", "all", "--out-dir", str(out)])
    assert code == 0
    kv = (out / "comparison.kv").read_text()
    totals = [line for line in kv.splitlines() if ".total_cost" in line]
    assert len(totals) == 7


def test_fit_recovers_default_coefficients(tmp_path):
    csv = tmp_path / "fit.csv"
    frag = tmp_path / "renewable.cfg"
    # varied wind keeps the design full rank; with wind >= 5 m/s the raw
    # model output stays inside the clamp band, so recovery is exact
    cli_main(["generate-data", "--days", "3", "--seed", "5", "--out", str(csv),
              "--wind-jitter", "3.0", "--with-renewable"])
    assert cli_main(["fit", str(csv), "--out", str(frag)]) == 0
    from helios.config import load_config
    fitted = load_config(str(frag)).renewable
    for got, want in zip((fitted.a1, fitted.a2, fitted.a3, fitted.a4),
                         DEFAULT_COEFFS):
        assert got == pytest.approx(want, rel=1e-6)


def test_usage_error_exits_1(capsys):
    assert cli_main(["simulate"]) == 1
    assert "usage" in capsys.readouterr().err.lower()


def test_missing_file_exits_1(tmp_path):
    assert cli_main(["simulate", "--strategy", "renewable_first",
                     "--data", str(tmp_path / "nope.csv"),
                     "--out-dir", str(tmp_path / "o")]) == 1


def test_env_seed_override(tmp_path, monkeypatch):
    csv = tmp_path / "s.csv"
    cli_main(["generate-data", "--days", "1", "--seed", "1", "--out", str(csv)])
    out1, out2 = tmp_path / "a", tmp_path / "b"
    monkeypatch.setenv("HELIOS_SEED", "123")
    assert cli_main(["simulate", "--strategy", "renewable_first",
                     "--data", str(csv), "--out-dir", str(out1)]) == 0
    kv = (out1 / "summary_renewable_first.kv").read_text()
    assert "seed = 123" in kv
    monkeypatch.setenv("HELIOS_SEED", "not-a-number")
    assert cli_main(["simulate", "--strategy", "renewable_first",
                     "--data", str(csv), "--out-dir", str(out2)]) == 1


def test_synthetic_data_keyword(tmp_path):
    out = tmp_path / "syn"
    assert cli_main(["simulate", "--strategy", "fifty_fifty",
                     "--data", "synthetic", "--out-dir", str(out),
                     "--seed", "9"]) == 0
    assert (out / "trace_fifty_fifty.csv").exists()


def test_set_overrides_config_keys(tmp_path):
    out = tmp_path / "o"
    code = cli_main(["simulate", "--strategy", "eg_mpc", "--data", "synthetic",
                     "--out-dir", str(out), "--seed", "4",
                     "--set", "horizon_steps=2",
                     "--set", "evo_population=12",
                     "--set", "evo_generations=5",
                     "--set", "evo_local_search_budget=0"])
    assert code == 0
    conv = (out / "convergence_eg_mpc.csv").read_text().strip().splitlines()
    # header + 24 windows x 5 generations
    assert len(conv) == 1 + 24 * 5


def test_set_rejects_unknown_key(tmp_path):
    assert cli_main(["simulate", "--strategy", "eg_mpc", "--data", "synthetic",
                     "--out-dir", str(tmp_path / "o"), "--seed", "1",
                     "--set", "warp_drive=9"]) == 1


def test_fit_on_degenerate_data_exits_1(tmp_path):
    csv = tmp_path / "flat.csv"
    # constant wind: rank-deficient design, a data validation failure
    cli_main(["generate-data", "--days", "1", "--seed", "1", "--out", str(csv),
              "--with-renewable"])
    assert cli_main(["fit", str(csv)]) == 1


def test_budget_exhaustion_exits_2(tmp_path):
    code = cli_main(["simulate", "--strategy", "standard_mpc",
                     "--data", "synthetic", "--out-dir", str(tmp_path / "o"),
                     "--seed", "1",
                     "--set", "max_enumeration=0",
                     "--set", "soc_grid_step_kwh=0.00001"])
    assert code == 2
