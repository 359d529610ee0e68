"""Command-line interface: sweeps, point evaluation, verification, exit codes."""

from __future__ import annotations

import warnings

import pytest

from cvqkd.cli import (
    CSV_HEADER,
    PRESETS,
    RunConfig,
    cmd_verify,
    format_csv_rows,
    main,
)
from cvqkd.keyrate import Reconciliation, sweep
from cvqkd.models import FeasibilityWarning, ModelKind, SourceParams


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSweepCommand:
    def test_preset_fig2a_writes_expected_csv(self, tmp_path, capsys):
        out = tmp_path / "fig2a.csv"
        code, stdout, _ = run(["sweep", "--preset", "fig2a", "--out", str(out)], capsys)
        assert code == 0
        assert str(out) in stdout
        lines = out.read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 1 + 3 * 100
        # rows sorted by (model, T)
        keys = [(row.split(",")[0], float(row.split(",")[2])) for row in lines[1:]]
        assert keys == sorted(keys)
        assert all(row.endswith(",true") for row in lines[1:])

    def test_csv_is_byte_deterministic(self, tmp_path, capsys):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(["sweep", "--preset", "fig2a", "--out", str(out1)], capsys)[0] == 0
        assert run(["sweep", "--preset", "fig2a", "--out", str(out2)], capsys)[0] == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_amplification_preset_flags_infeasible_rows(self, tmp_path, capsys):
        out = tmp_path / "fig2b.csv"
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", FeasibilityWarning)
            code, _, _ = run(["sweep", "--preset", "fig2b", "--out", str(out)], capsys)
        assert code == 0
        rows = out.read_text().splitlines()[1:]
        bs_rows = [r for r in rows if r.startswith("beam-splitter")]
        assert all(r.endswith(",false") for r in bs_rows)
        # values are still present (formal continuation), not NaN
        assert all("nan" not in r for r in bs_rows)

    def test_format_both_writes_svg11(self, tmp_path, capsys):
        out = tmp_path / "run.csv"
        code, _, _ = run(
            ["sweep", "--preset", "fig3a", "--format", "both", "--out", str(out)], capsys
        )
        assert code == 0
        svg = out.with_suffix(".svg")
        assert svg.exists()
        head = svg.read_text()[:300]
        assert head.startswith("<?xml")
        assert "SVG 1.1" in head

    def test_svg_is_byte_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            run(["sweep", "--preset", "fig3a", "--format", "svg", "--out", str(out)], capsys)
        assert a.with_suffix(".svg").read_bytes() == b.with_suffix(".svg").read_bytes()

    def test_clamp_zero_floors_reported_rates(self, tmp_path, capsys):
        out = tmp_path / "clamped.csv"
        args = ["sweep", "--preset", "fig3a", "--t-max", "0.2", "--clamp-zero", "--out", str(out)]
        assert run(args, capsys)[0] == 0
        rates = [float(r.split(",")[5]) for r in out.read_text().splitlines()[1:]]
        assert all(rate >= 0.0 for rate in rates)

    def test_empty_model_list_is_usage_error(self, tmp_path, capsys):
        code, _, err = run(
            ["sweep", "--model", "", "--out", str(tmp_path / "x.csv")], capsys
        )
        assert code == 2
        assert "model" in err

    def test_bad_grid_is_usage_error(self, tmp_path, capsys):
        code, _, err = run(
            ["sweep", "--t-step", "-0.1", "--out", str(tmp_path / "x.csv")], capsys
        )
        assert code == 2
        assert "t-step" in err

    def test_unknown_preset_is_usage_error(self, tmp_path, capsys):
        code, _, err = run(["sweep", "--preset", "fig9z", "--out", str(tmp_path / "x.csv")], capsys)
        assert code == 2
        assert "preset" in err

    def test_unwritable_output_is_usage_error(self, tmp_path, capsys):
        code, _, err = run(
            ["sweep", "--preset", "fig2a", "--out", str(tmp_path / "missing" / "x.csv")], capsys
        )
        assert code == 2
        assert "error:" in err


class TestPointCommand:
    def test_perfect_point(self, capsys):
        code, out, _ = run(
            ["point", "--T", "1.0", "--eps", "0", "--epsA", "0", "--TA", "1.0",
             "--model", "neutral-party"],
            capsys,
        )
        assert code == 0
        assert "key_rate=3.39231742278" in out
        assert "feasible=true" in out

    def test_untrusted_matches_neutral_without_noise(self, capsys):
        _, out_n, _ = run(
            ["point", "--T", "1.0", "--eps", "0", "--epsA", "0", "--TA", "1.0",
             "--model", "neutral"],
            capsys,
        )
        _, out_u, _ = run(
            ["point", "--T", "1.0", "--eps", "0", "--epsA", "0", "--TA", "1.0",
             "--model", "untrusted"],
            capsys,
        )
        assert out_n.split("key_rate=")[1] == out_u.split("key_rate=")[1]

    def test_beam_splitter_at_unit_gain_exits_2(self, capsys):
        code, _, err = run(
            ["point", "--T", "0.5", "--TA", "1.0", "--model", "beam-splitter"], capsys
        )
        assert code == 2
        assert "undefined at T_A = 1" in err

    def test_missing_transmittance_is_usage_error(self, capsys):
        code, _, err = run(["point", "--model", "neutral"], capsys)
        assert code == 2
        assert "--T" in err


class TestVerifyCommand:
    def test_default_configuration_passes(self, capsys):
        code, out, _ = run(["verify"], capsys)
        assert code == 0
        assert "all checks passed" in out
        assert "FAIL" not in out

    def test_amplification_warns_but_passes(self, capsys):
        with pytest.warns(FeasibilityWarning):
            code = main(["verify", "--TA", "1.1"])
        out = capsys.readouterr().out
        assert code == 0
        assert "all checks passed" in out

    def test_corrupted_tolerance_hook_fails(self, capsys):
        config = RunConfig(t_min=0.25, t_max=0.75, t_step=0.25)
        code = cmd_verify(config, rr_tol=1e-16)
        out = capsys.readouterr().out
        assert code == 1
        assert "FAIL" in out


class TestConfigHandling:
    def test_config_file_applies_and_flags_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("V=10\nTA=0.9\nepsA=0.1\neps=0.04\nrecon=direct\n# comment\n")
        out = tmp_path / "out.csv"
        code, _, _ = run(
            ["sweep", "--config", str(cfg), "--V", "20", "--t-min", "0.5",
             "--t-max", "0.5", "--t-step", "0.1", "--model", "untrusted",
             "--out", str(out)],
            capsys,
        )
        assert code == 0
        row = out.read_text().splitlines()[1]
        # V=20 (flag wins over file) at T=0.5 direct: i_ab from the frozen oracle
        fields = row.split(",")
        assert fields[0] == "untrusted-source"
        assert fields[1] == "direct"
        assert abs(float(fields[3]) - 2.3479233034203069) < 1e-10

    def test_malformed_config_line_is_usage_error(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("this is not a key value pair\n")
        code, _, err = run(["sweep", "--config", str(cfg), "--out", str(tmp_path / "x.csv")], capsys)
        assert code == 2
        assert "key=value" in err


class TestCsvFormatting:
    def test_twelve_significant_digits(self):
        src = SourceParams.from_excess_noise(20.0, 0.9, 0.1)
        points = sweep([ModelKind.NEUTRAL_PARTY], Reconciliation.REVERSE, src, 0.04, [0.5])
        (row,) = format_csv_rows(points)
        i_ab_text = row.split(",")[3]
        assert i_ab_text == "2.34792330342"
        assert len(i_ab_text.replace(".", "").lstrip("0")) <= 12

    def test_preset_table_is_exact(self):
        assert PRESETS["fig2a"] == {"recon": "reverse", "TA": 0.9}
        assert PRESETS["fig2b"] == {"recon": "reverse", "TA": 1.1}
        assert PRESETS["fig3a"] == {"recon": "direct", "TA": 0.9}
        assert PRESETS["fig3b"] == {"recon": "direct", "TA": 1.1}
