"""Command-line interface: argument handling, exit codes, emitted files."""

import json

import pytest

from qbsim.cli import main


def run_cli(*argv):
    return main(list(argv))


class TestListPresets:
    def test_lists_all(self, capsys):
        assert run_cli("list-presets") == 0
        out = capsys.readouterr().out
        for name in ("fig1b", "fig2a", "fig2b", "fig3a", "fig3b", "fig4a",
                     "fig4b", "fig4c", "fig4d", "sm-s1", "sm-s2"):
            assert name in out


class TestValidate:
    def test_ok(self, tmp_path, capsys):
        cfg = tmp_path / "demo.cfg"
        cfg.write_text("kind = spectrum\nkappa = 8.0\nn_side = 4\n")
        assert run_cli("validate", str(cfg)) == 0

    def test_unknown_key(self, tmp_path, capsys):
        cfg = tmp_path / "demo.cfg"
        cfg.write_text("kind = spectrum\nkapa = 8.0\n")
        assert run_cli("validate", str(cfg)) == 1
        assert "kapa" in capsys.readouterr().err

    def test_empty_sweep(self, tmp_path, capsys):
        cfg = tmp_path / "demo.cfg"
        cfg.write_text(
            "kind = kappa-sweep\nkappa_min = 5\nkappa_max = 4\nkappa_step = 0.5\n"
        )
        assert run_cli("validate", str(cfg)) == 1

    def test_missing_file(self, tmp_path):
        assert run_cli("validate", str(tmp_path / "nope.cfg")) == 1


class TestRun:
    def test_preset_bundle(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert run_cli("run", "--preset", "fig1b", "--out", str(out)) == 0
        names = {p.name for p in out.iterdir()}
        assert {"ideal-resonant.csv", "ideal-detuned.csv", "markov.csv",
                "summary.json"} <= names
        summary = json.loads((out / "summary.json").read_text())
        assert summary["preset"] == "fig1b"
        assert len(summary["configs"]) == 3
        assert len(summary["results"]) == 3
        assert "created_at" not in summary  # summary itself is reproducible
        printed = capsys.readouterr().out
        assert "ideal-resonant.csv" in printed

    def test_rerun_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run_cli("run", "--preset", "fig1b", "--out", str(out)) == 0
        for name in ("ideal-resonant.csv", "ideal-detuned.csv", "markov.csv",
                     "summary.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_config_file_with_overrides(self, tmp_path):
        cfg = tmp_path / "spec.cfg"
        cfg.write_text("kind = spectrum\nlabel = tiny\nkappa = 8.0\nn_side = 6\n")
        out = tmp_path / "out"
        assert run_cli("run", "--config", str(cfg), "--set", "n_side=4",
                       "--out", str(out)) == 0
        meta = json.loads((out / "tiny.meta.json").read_text())
        assert meta["config"]["n_side"] == 4

    def test_preset_override_applies_to_all(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli("run", "--preset", "fig1b", "--set", "n_samples=24",
                       "--out", str(out)) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert all(c["n_samples"] == 24 for c in summary["configs"])
        rows = (out / "markov.csv").read_text().splitlines()
        assert len(rows) == 26

    def test_requires_exactly_one_source(self, tmp_path):
        out = str(tmp_path / "out")
        cfg = tmp_path / "c.cfg"
        cfg.write_text("kind = spectrum\nn_side = 4\nkappa = 8\n")
        assert run_cli("run", "--out", out) == 1
        assert run_cli("run", "--preset", "fig1b", "--config", str(cfg),
                       "--out", out) == 1

    def test_unknown_preset(self, tmp_path):
        assert run_cli("run", "--preset", "fig9z", "--out", str(tmp_path)) == 1

    def test_bad_override_value(self, tmp_path, capsys):
        assert run_cli("run", "--preset", "fig1b", "--set", "kappa=fast",
                       "--out", str(tmp_path)) == 1

    def test_runtime_failure_exit_code(self, tmp_path):
        # validates fine but the van Hove point rejects rate evaluation
        cfg = tmp_path / "m.cfg"
        cfg.write_text("kind = markov\nomega_0 = 1.0\nkappa = 15.0\n")
        assert run_cli("run", "--config", str(cfg), "--out", str(tmp_path)) == 2

    def test_missing_subcommand(self):
        assert run_cli() == 1
