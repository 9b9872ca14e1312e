"""CLI driver: parsing, reports, exit codes, config files."""

import json
from fractions import Fraction as F

import pytest

from splitmoments import cli
from splitmoments.errors import UsageError


def run_cli(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr().out
    report = json.loads(out) if out.strip() else None
    return code, report


class TestMomentCommand:
    def test_flagship_value(self, capsys):
        code, report = run_cli(["moment", "--sigma", "1/2", "--n", "4", "--sign", "minus"], capsys)
        assert code == 0
        moment = report["results"][0]
        assert moment["exact"] == "31/105"

    def test_report_embeds_config(self, capsys):
        code, report = run_cli(
            ["moment", "--sigma", "3/5", "--n", "2", "--sign", "plus", "--seed", "7"], capsys
        )
        assert code == 0
        assert report["params"]["seed"] == 7
        assert report["params"]["sigma"]["exact"] == "3/5"
        assert report["command"] == "moment"
        assert "timing" in report

    def test_json_file_output(self, capsys, tmp_path):
        path = tmp_path / "out.json"
        code, _ = run_cli(
            ["moment", "--sigma", "1/2", "--n", "4", "--json", str(path)], capsys
        )
        assert code == 0
        on_disk = json.loads(path.read_text())
        assert on_disk["results"][0]["exact"] == "31/105"

    def test_float_sigma_rejected(self, capsys):
        code = cli.main(["moment", "--sigma", "0.5", "--n", "4"])
        assert code == 2


class TestCrosscheck:
    def test_all_pass(self, capsys):
        code, report = run_cli(["crosscheck", "--sigma", "1/2", "--n", "4"], capsys)
        assert code == 0
        assert report["passed"]
        entry = report["results"][0]
        assert entry["exact_paths_equal"]
        assert entry["oracle_within_1e-7"]


class TestVanish:
    def test_flagship(self, capsys):
        code, report = run_cli(
            ["vanish", "--r", "5", "--n", "4", "--sigma", "1/2", "--sign", "minus"], capsys
        )
        assert code == 0
        entry = report["results"][0]
        assert entry["bound"]["exact"] == "496/65625"
        assert entry["threshold"]["exact"] == "5/2"
        assert entry["moment"]["exact"] == "31/105"

    def test_plus_sign_assumption_flagged(self, capsys):
        code, report = run_cli(
            ["vanish", "--r", "5", "--n", "4", "--sigma", "1/2", "--sign", "plus"], capsys
        )
        assert code == 0
        assert any("positive-sign" in a for a in report["assumptions"])

    def test_bad_query_is_usage_error(self, capsys):
        code = cli.main(["vanish", "--r", "5", "--n", "3", "--sigma", "1/2"])
        assert code == 2


class TestVerify:
    def test_combinat_small(self, capsys):
        code, report = run_cli(["verify", "combinat", "--n", "5", "--a", "2"], capsys)
        assert code == 0
        assert report["passed"]

    def test_arith_small(self, capsys):
        code, report = run_cli(["verify", "arith", "--qmax", "20"], capsys)
        assert code == 0
        assert report["passed"]
        idents = {r["identity"]: r for r in report["results"] if "identity" in r}
        assert idents["ramanujan three-way"]["failures"] == 0


class TestRmtCommand:
    def test_small_run_with_csv(self, capsys, tmp_path):
        csv_path = tmp_path / "z.csv"
        code, report = run_cli(
            [
                "rmt", "--M", "12", "--parity", "even", "--samples", "200",
                "--sigma", "3/5", "--nmax", "2", "--seed", "5",
                "--csv", str(csv_path),
            ],
            capsys,
        )
        assert code in (0, 1)  # statistical gate at tiny M may fail; report still emitted
        lines = csv_path.read_text().strip().splitlines()
        assert lines[0] == "sample_index,Z"
        assert len(lines) == 201
        assert report["results"][0]["n"] == 1

    def test_reproducible_z_stream(self, capsys, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["rmt", "--M", "8", "--parity", "even", "--samples", "50",
                "--sigma", "1/2", "--nmax", "2", "--seed", "9"]
        cli.main(args + ["--csv", str(p1)])
        cli.main(args + ["--csv", str(p2)])
        capsys.readouterr()
        assert p1.read_text() == p2.read_text()


class TestConfigFile:
    def test_parse(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text(
            "# demo\ncommand = moment\nsigma = 3/5\nn = 2\nsign = plus\nseed = 11\n"
        )
        cfg = cli.load_config(cfg_file)
        assert cfg.command == "moment"
        assert cfg.params["sigma"] == F(3, 5)
        assert cfg.seed == 11

    def test_float_rejected(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("command = moment\nsigma = 0.6\n")
        with pytest.raises(UsageError, match="exactness"):
            cli.load_config(cfg_file)

    def test_unknown_key(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("command = moment\nwibble = 3\n")
        with pytest.raises(UsageError, match="unknown key"):
            cli.load_config(cfg_file)

    def test_duplicate_key(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("command = moment\nn = 2\nn = 4\n")
        with pytest.raises(UsageError, match="duplicate"):
            cli.load_config(cfg_file)

    def test_cli_flags_override(self, capsys, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("command = moment\nsigma = 1/2\nn = 2\n")
        code, report = run_cli(
            ["--config", str(cfg_file), "moment", "--sigma", "1/2", "--n", "4"], capsys
        )
        assert code == 0
        assert report["results"][0]["n"] == 4

    def test_config_only(self, capsys, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("command = vanish\nr = 5\nn = 4\nsigma = 1/2\nsign = minus\n")
        code, report = run_cli(["--config", str(cfg_file)], capsys)
        assert code == 0
        assert report["results"][0]["bound"]["exact"] == "496/65625"


class TestParseRational:
    def test_fraction(self):
        assert cli.parse_rational("3/5") == F(3, 5)

    def test_integer(self):
        assert cli.parse_rational("2") == 2

    def test_negative(self):
        assert cli.parse_rational("-7/3") == F(-7, 3)

    def test_float_rejected(self):
        with pytest.raises(UsageError):
            cli.parse_rational("0.6")
        with pytest.raises(UsageError):
            cli.parse_rational("1e-3")

    def test_garbage_rejected(self):
        with pytest.raises(UsageError, match="malformed"):
            cli.parse_rational("three")
