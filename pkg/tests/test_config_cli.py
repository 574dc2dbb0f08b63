import filecmp

import pytest

from ncsecsim.cli import main
from ncsecsim.config import (
    RunConfig,
    apply_settings,
    config_items,
    load_config,
    write_config_echo,
)
from ncsecsim.errors import ConfigError
from ncsecsim.keydist import Scheme


def test_defaults_match_reference_scenario():
    cfg = RunConfig()
    sc = cfg.scenario
    assert sc.num_cells == 16
    assert sc.isd_m == 100.0
    assert sc.wrap is True
    assert sc.num_ues == 20
    assert sc.ue_speed_kmh == 60.0
    assert sc.rs_period_ms == 160
    assert sc.ul_offset_db == 1.0
    assert sc.ul_ttt_ms == 32
    sec = cfg.security
    assert (sec.q, sec.n, sec.m, sec.l) == (256, 1024, 32, 8)
    assert cfg.ledger.collection_period_ms == 1000
    assert cfg.scheme is Scheme.BLOCKCHAIN
    assert cfg.horizon_ms == 10_000
    assert cfg.prediction.enabled is False
    assert cfg.prediction.accuracy == 0.8
    assert cfg.prediction.lead_ms == 160


def test_apply_settings_and_sections():
    cfg = apply_settings(
        RunConfig(),
        {
            "scenario.isd_m": "250",
            "scenario.wrap": "false",
            "security.q": "16",
            "prediction.enabled": "on",
            "scheme": "hmac",
            "horizon_ms": "5000",
            "seed": "9",
        },
    )
    assert cfg.scenario.isd_m == 250.0
    assert cfg.scenario.wrap is False
    assert cfg.security.q == 16
    assert cfg.prediction.enabled is True
    assert cfg.scheme is Scheme.C_COVER_FREE
    assert cfg.horizon_ms == 5000 and cfg.seed == 9


@pytest.mark.parametrize(
    "settings",
    [
        {"nonsense": "1"},
        {"scenario.bogus_field": "1"},
        {"bogus.section": "1"},
        {"scenario.isd_m": "not_a_number"},
        {"scheme": "rot13"},
        {"security.q": "100"},  # not a power of two
        {"horizon_ms": "-5"},
        {"scenario.rs_period_ms": "0"},
        {"analyze.epsilon": "2.0"},
    ],
)
def test_bad_settings_raise_config_error(settings):
    with pytest.raises(ConfigError):
        apply_settings(RunConfig(), settings)


def test_config_file_roundtrip(tmp_path):
    cfg = apply_settings(RunConfig(), {"scenario.num_ues": "7", "seed": "42"})
    echo = tmp_path / "config.txt"
    write_config_echo(cfg, echo)
    loaded = load_config(echo)
    assert config_items(loaded) == config_items(cfg)
    assert loaded.scenario.num_ues == 7 and loaded.seed == 42


def test_config_file_parsing_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("scenario.isd_m 100\n")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")


def test_config_comments_and_blanks(tmp_path):
    f = tmp_path / "ok.cfg"
    f.write_text("# comment\n\nscenario.num_ues=3\nseed=5\n")
    cfg = load_config(f)
    assert cfg.scenario.num_ues == 3 and cfg.seed == 5


def test_cli_run_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["run", "--seed", "2", "--horizon-ms", "3000", "--out", str(out)])
    assert code == 0
    for name in ("config.txt", "signals.csv", "ho_summary.csv",
                 "per_second_signaling.csv", "cumulative_key_exchanges.csv"):
        assert (out / name).exists()
    assert "HO triggers" in capsys.readouterr().out


def test_cli_exit_code_1_on_config_errors(tmp_path, capsys):
    assert main(["run", "--scheme", "bogus"]) == 1
    bad = tmp_path / "bad.cfg"
    bad.write_text("security.q=77\n")
    assert main(["run", "--config", str(bad)]) == 1
    assert main(["bogus-subcommand"]) == 1


def test_cli_exit_code_2_on_runtime_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    # output dir path points through a regular file
    assert main(["run", "--horizon-ms", "1000", "--out", str(blocker / "sub")]) == 2


def test_cli_determinism_byte_identical(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        assert main(["run", "--seed", "11", "--horizon-ms", "8000", "--out", str(out)]) == 0
    for name in ("signals.csv", "ho_summary.csv", "per_second_signaling.csv",
                 "cumulative_key_exchanges.csv", "config.txt"):
        assert filecmp.cmp(out_a / name, out_b / name, shallow=False), name


def test_cli_horizon_zero_header_only(tmp_path):
    out = tmp_path / "empty"
    assert main(["run", "--horizon-ms", "0", "--out", str(out)]) == 0
    for name in ("signals.csv", "ho_summary.csv", "per_second_signaling.csv",
                 "cumulative_key_exchanges.csv"):
        lines = (out / name).read_text().strip().splitlines()
        assert len(lines) == 1, name  # header only


def test_cli_analyze_outputs(tmp_path):
    out = tmp_path / "an"
    assert main(["analyze", "--seed", "1", "--out", str(out)]) == 0
    fig4 = (out / "fig4.csv").read_text().strip().splitlines()
    assert fig4[0] == "scheme,c,l,bandwidth"
    rows = [line.split(",") for line in fig4[1:]]
    bc = [float(r[3]) for r in rows if r[0] == "blockchain"]
    ms = [float(r[3]) for r in rows if r[0] == "macsig"]
    hm = [float(r[3]) for r in rows if r[0] == "hmac"]
    assert len(set(bc)) == 1 and bc[0] == pytest.approx(8 / 1056)
    assert all(b > a for a, b in zip(ms, ms[1:]))
    assert all(b > a for a, b in zip(hm, hm[1:]))
    fig5 = (out / "fig5.csv").read_text().strip().splitlines()
    assert fig5[0] == "scheme,c,l,safe_key_prob,ci_low,ci_high"
    probs = [float(line.split(",")[3]) for line in fig5[1:] if line.startswith("blockchain")]
    assert len(set(probs)) == 1
    assert (out / "analytics.csv").exists()


def test_cli_attack_deterministic(tmp_path):
    cfg = tmp_path / "fast.cfg"
    cfg.write_text("attack.trials=2000\n")
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        assert main(["attack", "--config", str(cfg), "--seed", "3", "--out", str(out)]) == 0
    assert filecmp.cmp(out_a / "bypass_rates.csv", out_b / "bypass_rates.csv", shallow=False)
    header = (out_a / "bypass_rates.csv").read_text().splitlines()[0]
    assert header == "scheme,strategy,q,l_prime,trials,rate,ci_low,ci_high"


def test_cli_attack_empty_grid(tmp_path):
    cfg = tmp_path / "none.cfg"
    cfg.write_text("attack.trials=0\n")
    out = tmp_path / "out"
    assert main(["attack", "--config", str(cfg), "--out", str(out)]) == 0
    assert (out / "bypass_rates.csv").read_text().strip().splitlines() == [
        "scheme,strategy,q,l_prime,trials,rate,ci_low,ci_high"
    ]


def test_cli_selftest(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out
