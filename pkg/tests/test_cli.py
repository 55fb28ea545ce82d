import json

import numpy as np
import pytest

from lattice_sle.cli import (COMMANDS, ConfigError, ExperimentConfig, main, parse_config,
                             parse_text, run)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestConstantsCommand:
    """The constants command prints exact values as JSON."""

    def test_q2(self, capsys):
        code, out, _ = run_cli(capsys, "constants", "--q", "2")
        assert code == 0
        rep = json.loads(out)
        assert abs(rep["p_sd"] - (2 - np.sqrt(2))) < 1e-12, f"p_sd {rep['p_sd']}"
        assert abs(rep["kappa"] - 16 / 3) < 1e-12
        assert abs(rep["k"] - 0.125) < 1e-12

    def test_missing_q(self, capsys):
        code, _, err = run_cli(capsys, "constants")
        assert code == 2
        assert json.loads(err)["error"]["field"] == "q"

    def test_q_range(self, capsys):
        code, _, err = run_cli(capsys, "constants", "--q", "5")
        e = json.loads(err)["error"]
        assert code == 2 and e["field"] == "q"
        assert "(0, 4]" in e["message"], f"message {e['message']!r}"


class TestParsing:
    """Config text, flags and their error locations."""

    def test_unknown_key_location(self):
        with pytest.raises(ConfigError) as info:
            parse_text(b"command = trace\nbogus = 3\n")
        assert (info.value.line, info.value.column) == (2, 1)
        assert info.value.field == "bogus"

    def test_bad_value_location(self):
        with pytest.raises(ConfigError) as info:
            parse_text(b"command = trace\nwidth = abc\n")
        assert info.value.line == 2 and info.value.column is not None
        assert info.value.field == "width"

    def test_syntax_error(self):
        with pytest.raises(ConfigError) as info:
            parse_text(b"# comment\ncommand trace\n")
        assert info.value.line == 2

    def test_duplicate_key(self):
        with pytest.raises(ConfigError):
            parse_text(b"width = 3\nwidth = 4\n")

    def test_flags_override_file(self):
        cfg = parse_config(b"command = trace\nwidth = 10\nseed = 1\n", {"width": "12"})
        assert cfg.width == 12 and cfg.seed == 1

    def test_text_roundtrip(self):
        cfg = parse_config(b"command = sle\nkappa = 2.5\nsteps = 100\nseed = 9\nformat = svg\n")
        again = parse_config(cfg.to_text().encode())
        assert again.to_dict() == cfg.to_dict()

    def test_unknown_flag(self, capsys):
        code, _, err = run_cli(capsys, "trace", "--bogus", "1")
        assert code == 2 and "error" in json.loads(err)

    def test_unknown_command(self, capsys):
        code, _, _ = run_cli(capsys, "explode")
        assert code == 2

    def test_sle_needs_kappa(self):
        with pytest.raises(ConfigError) as info:
            parse_config(flags={"command": "sle"})
        assert info.value.field == "kappa"

    def test_command_list(self):
        assert len(COMMANDS) == 12 and "estimate-kappa" in COMMANDS


class TestRuns:
    """Each command runs on small inputs and writes a manifest."""

    SMALL = {
        "simulate": {"model": "percolation", "width": 12, "samples": 2},
        "trace": {"model": "fk", "q": 2.0, "width": 8, "sweeps": 5, "format": "svg"},
        "extract": {"model": "percolation", "width": 16, "samples": 2},
        "estimate-kappa": {"model": "sle", "kappa": 3.0, "samples": 20, "steps": 200},
        "crossing": {"samples": 200, "aspect": 1.0, "height": 12},
        "observable": {"q": 2.0, "epsilon": 0.5, "width": 1.5, "height": 1.5},
        "height": {"q": 2.0, "epsilon": 0.5, "width": 1.5, "height": 1.5},
        "sle": {"kappa": 4.0, "steps": 200, "format": "svg"},
        "dimension": {"model": "sle", "kappa": 2.0, "steps": 500},
        "martingale": {"kappa": 4.0, "samples": 200, "observable": "phi"},
        "markov": {"samples": 100, "prefix": 3},
        "constants": {"n": 1.0},
    }

    @pytest.mark.parametrize("command", COMMANDS)
    def test_command(self, command, tmp_path):
        cfg = parse_config(flags=dict(self.SMALL[command], command=command, seed=3,
                                      path=str(tmp_path)))
        manifest = run(cfg)
        names = {o["file"] for o in manifest["outputs"]}
        assert "report.json" in names
        assert (tmp_path / "manifest.json").exists()
        on_disk = json.loads((tmp_path / "manifest.json").read_text())
        assert on_disk["rng_algorithm"] == manifest["rng_algorithm"]
        for o in manifest["outputs"]:
            assert (tmp_path / o["file"]).stat().st_size == o["bytes"]

    @pytest.mark.parametrize("command", ["trace", "sle", "extract", "crossing", "estimate-kappa"])
    def test_digests_repeat(self, command):
        flags = dict(self.SMALL[command], command=command, seed=21)
        a = run(parse_config(flags=flags))["outputs"]
        b = run(parse_config(flags=flags))["outputs"]
        assert a == b, f"{command}: digests differ between identical runs"

    def test_threads_do_not_change_output(self):
        base = dict(self.SMALL["extract"], command="extract", seed=5, samples=4)
        one = run(parse_config(flags=dict(base, threads=1)))["outputs"]
        two = run(parse_config(flags=dict(base, threads=2)))["outputs"]
        assert one == two

    def test_seed_changes_output(self):
        flags = dict(self.SMALL["sle"], command="sle")
        a = run(parse_config(flags=dict(flags, seed=1)))["outputs"]
        b = run(parse_config(flags=dict(flags, seed=2)))["outputs"]
        assert a != b

    def test_dimension_from_file(self, tmp_path):
        z = np.linspace(0, 1, 2000)
        path = tmp_path / "line.csv"
        path.write_text("x,y\n" + "".join(f"{v},{0.5 * v}\n" for v in z))
        rep = run(parse_config(flags={"command": "dimension", "input": str(path)}))["report"]
        assert abs(rep["dimension"] - 1.0) < 0.05, f"line dimension {rep['dimension']}"

    def test_main_prints_report(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "sle", "--kappa", "2", "--steps", "50", "--seed", "4",
                               "--path", str(tmp_path))
        assert code == 0
        assert json.loads(out) == json.loads((tmp_path / "report.json").read_text())

    def test_config_dataclass_defaults(self):
        cfg = ExperimentConfig(command="constants", q=1.0)
        assert "q = 1.0" in cfg.to_text() or "q=1.0" in cfg.to_text().replace(" ", "")
