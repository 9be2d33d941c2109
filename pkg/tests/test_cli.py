import json
import math
from pathlib import Path

import pytest

from qtm.cli import main
from qtm.config import EXPERIMENTS, config_reference, parse_config_text, parse_items
from qtm.datasets import Column, Dataset, render_csv
from qtm.errors import ConfigError, DatasetError

DATA = Path(__file__).parent / "data"


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def read_header_config(path):
    items = []
    for line in path.read_text().splitlines():
        if line.startswith("# config: "):
            key, _, value = line[len("# config: "):].partition(" = ")
            items.append((key.strip(), value.strip(), 0))
        if not line.startswith("#"):
            break
    return items


class TestConfigParsing:
    def test_defaults_applied(self):
        cfg = parse_config_text("sweep-tau", "")
        assert cfg.params["machine.t_wait"] == 0.0
        assert str(cfg.params["machine.kind"]) == "qubit"

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key 'machine.bogus'"):
            parse_config_text("sweep-tau", "machine.bogus = 1\n")

    def test_parse_error_reports_line(self):
        with pytest.raises(ConfigError, match="line 3"):
            parse_config_text("sweep-tau", "# comment\nmachine.g = 1\nnonsense line\n")

    def test_bad_value_names_key(self):
        with pytest.raises(ConfigError, match="machine.g"):
            parse_config_text("sweep-tau", "machine.g = fast\n")

    def test_negative_temperature_names_bath_key(self):
        with pytest.raises(ConfigError, match="machine.T_c"):
            parse_config_text("sweep-tau", "machine.T_c = -3\n")

    def test_mediator_u_zero_cites_precondition(self):
        with pytest.raises(ConfigError, match=">= 1"):
            parse_config_text("mediator-compare", "mediator.u_values = 1,0\n")

    def test_overrides_win(self):
        cfg = parse_config_text("sweep-tau", "machine.g = 1\n", ["machine.g=2.5"])
        assert cfg.params["machine.g"] == 2.5

    def test_comments_and_blanks_ignored(self):
        cfg = parse_config_text("sweep-tau", "\n# note\nmachine.g = 3\n\n")
        assert cfg.params["machine.g"] == 3.0

    def test_canonical_items_round_trip(self):
        cfg = parse_config_text("frontier", "machine.g = 0.25\ngrid.eta.count = 17\n")
        again = parse_items("frontier", [(k, v, 0) for k, v in cfg.items()])
        assert again.items() == cfg.items()

    def test_reference_lists_defaults(self):
        text = config_reference("sweep-tau")
        assert "machine.kind" in text and "default=qubit" in text

    def test_every_experiment_has_runnable_defaults(self):
        for kind in EXPERIMENTS:
            cfg = parse_config_text(kind, "")
            assert cfg.kind == kind


class TestDataset:
    def test_rejects_non_finite_rows(self):
        ds = Dataset("sweep-tau", [Column("a", "1")])
        ds.append(float("nan"))
        with pytest.raises(DatasetError):
            render_csv(ds)

    def test_rejects_ragged_rows(self):
        ds = Dataset("sweep-tau", [Column("a", "1"), Column("b", "1")])
        with pytest.raises(DatasetError):
            ds.append(1.0)

    def test_floats_round_trip_via_repr(self):
        ds = Dataset("sweep-tau", [Column("a", "1")])
        value = 0.1 + 0.2
        ds.append(value)
        text = render_csv(ds)
        assert float(text.strip().splitlines()[-1]) == value


EXPECTED_COLUMNS = {
    "sweep-tau": ["tau", "k_tau", "coefficient", "v", "v_norm",
                  "work", "heat_c", "heat_h", "power"],
    "optimal-time-curve": ["k_t_wait", "k_tau_star", "v_max_scaled",
                           "v_swap_scaled", "swap_loss"],
    "frontier": ["eta", "power", "power_norm", "omega_c", "omega_h", "tau",
                 "boundary"],
    "freq-maximize": ["eta", "omega_c", "omega_h", "tau", "power",
                      "eta_curzon_ahlborn", "eta_carnot"],
    "mediator-compare": ["g_ratio", "g_m", "u", "k_tau", "tau", "v_m", "v_m_norm"],
    "advantage": ["t_wait", "v_max_direct", "tau_star_direct", "v_m_max",
                  "tau_m_star", "power_direct", "power_mediator",
                  "mediator_wins", "within_validity", "advantage"],
    "otto-compare": ["g", "tau", "value_direct", "value_ideal", "stable"],
    "swap-compare": ["g", "t_swap", "v_max", "v_swap_max", "v_full_swap",
                     "ratio", "threshold_g", "spread_from_k", "exchange_wins"],
    "validate-oracle": ["omega_h", "g", "tau", "temp_c", "temp_h",
                        "n_h_formula", "n_h_oracle", "abs_diff", "certified",
                        "levels_c", "levels_h"],
    "oscillator-profile": ["l", "x", "f", "b", "p_tilde"],
}

FAST_OVERRIDES = {
    "sweep-tau": ["--set", "grid.tau.count=12"],
    "optimal-time-curve": ["--set", "grid.k_t_wait.count=12"],
    "frontier": ["--set", "grid.eta.count=6", "--set", "search.n_omega=16"],
    "freq-maximize": ["--set", "search.n_eta=12", "--set", "search.n_omega=12"],
    "mediator-compare": ["--set", "grid.phase.count=16"],
    "advantage": ["--set", "grid.t_wait.count=8"],
    "otto-compare": ["--set", "grid.tau.count=8", "--set", "grid.g.count=8",
                     "--set", "otto.couplings=0.5"],
    "swap-compare": ["--set", "grid.g.count=8"],
    "validate-oracle": ["--set", "validate.points=12"],
    "oscillator-profile": ["--set", "grid.x.count=8"],
}


class TestRunSchemas:
    @pytest.mark.parametrize("kind", sorted(EXPECTED_COLUMNS))
    def test_column_schema_stable(self, kind, tmp_path):
        assert run(tmp_path, kind, *FAST_OVERRIDES[kind]) == 0
        csv = (tmp_path / f"{kind}.csv").read_text().splitlines()
        names = next(l for l in csv if not l.startswith("#")).split(",")
        assert names == EXPECTED_COLUMNS[kind]
        assert csv[0] == "# qtm-dataset v1"
        assert f"# experiment: {kind}" in csv
        units = [l for l in csv if l.startswith("# column: ")]
        assert len(units) == len(names)
        assert (tmp_path / f"{kind}.json").exists()

    def test_header_round_trips_config(self, tmp_path):
        assert run(tmp_path, "sweep-tau", "--set", "machine.g=0.7",
                   "--set", "grid.tau.count=5") == 0
        items = read_header_config(tmp_path / "sweep-tau.csv")
        cfg = parse_items("sweep-tau", items)
        assert dict(cfg.items()) == dict((k, v) for k, v, _ in items)
        assert cfg.params["machine.g"] == 0.7

    def test_golden_optimal_time_curve(self, tmp_path):
        # regenerate with: qtm optimal-time-curve --set grid.k_t_wait.count=7
        #                  --set output.basename=optimal-time-curve-small
        assert run(tmp_path, "optimal-time-curve",
                   "--set", "grid.k_t_wait.count=7",
                   "--set", "output.basename=optimal-time-curve-small") == 0
        produced = (tmp_path / "optimal-time-curve-small.csv").read_bytes()
        assert produced == (DATA / "optimal-time-curve-small.csv").read_bytes()


class TestDeterminism:
    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["validate-oracle", "--set", "validate.points=25",
                         "--seed", "7", "--threads", "2", "--out", str(out)]) == 0
        assert (a / "validate-oracle.csv").read_bytes() == \
            (b / "validate-oracle.csv").read_bytes()
        assert (a / "validate-oracle.json").read_bytes() == \
            (b / "validate-oracle.json").read_bytes()

    def test_thread_count_does_not_change_values(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["optimal-time-curve", "--set", "grid.k_t_wait.count=40",
                     "--threads", "1", "--out", str(a)]) == 0
        assert main(["optimal-time-curve", "--set", "grid.k_t_wait.count=40",
                     "--threads", "3", "--out", str(b)]) == 0
        skip = lambda t: [l for l in t.splitlines() if not l.startswith("# threads")]
        assert skip((a / "optimal-time-curve.csv").read_text()) == \
            skip((b / "optimal-time-curve.csv").read_text())


class TestExitCodes:
    def test_config_error_is_one(self, tmp_path, capsys):
        assert run(tmp_path, "sweep-tau", "--set", "machine.T_c=-1") == 1
        assert "machine.T_c" in capsys.readouterr().err

    def test_unknown_key_is_one(self, tmp_path):
        assert run(tmp_path, "frontier", "--set", "machine.omega_c=1") == 1

    def test_validation_fail_is_one(self, tmp_path, capsys):
        code = run(tmp_path, "validate-oracle", "--set", "validate.points=5",
                   "--set", "validate.tolerance=1e-18")
        assert code == 1
        assert "FAIL" in capsys.readouterr().out

    def test_uncertified_truncation_is_two_with_sidecar(self, tmp_path, capsys):
        code = run(tmp_path, "validate-oracle",
                   "--set", "validate.pair=oscillator",
                   "--set", "validate.points=3",
                   "--set", "oracle.levels=4")
        assert code == 2
        assert (tmp_path / "validate-oracle.log").exists()
        assert "UNCONVERGED" in capsys.readouterr().out

    def test_dimension_cap_is_two_with_sidecar(self, tmp_path):
        code = run(tmp_path, "validate-oracle",
                   "--set", "validate.pair=oscillator",
                   "--set", "validate.points=3",
                   "--set", "oracle.dim_cap=16")
        assert code == 2
        assert (tmp_path / "validate-oracle.log").exists()

    def test_out_path_collision_is_three(self, tmp_path, capsys):
        blocker = tmp_path / "blocked"
        blocker.write_text("file, not a directory")
        code = main(["optimal-time-curve", "--set", "grid.k_t_wait.count=5",
                     "--out", str(blocker)])
        assert code == 3

    def test_pass_table_printed(self, tmp_path, capsys):
        assert run(tmp_path, "validate-oracle", "--set", "validate.points=10") == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "max|dn_h|" in out

    def test_mixed_pair_is_info(self, tmp_path, capsys):
        assert run(tmp_path, "validate-oracle", "--set", "validate.points=4",
                   "--set", "validate.pair=qubit-oscillator") == 0
        assert "INFO" in capsys.readouterr().out


class TestHelpers:
    def test_help_config_prints_reference(self, capsys):
        assert main(["sweep-tau", "--help-config"]) == 0
        out = capsys.readouterr().out
        assert "machine.omega_c" in out and "grid.tau.count" in out

    def test_chi_in_engine_regime_rejected(self, tmp_path, capsys):
        code = run(tmp_path, "otto-compare", "--set", "otto.merit=chi")
        assert code == 1
        assert "refrigerator" in capsys.readouterr().err

    def test_summary_contents(self, tmp_path):
        assert run(tmp_path, "freq-maximize", "--set", "search.n_eta=12",
                   "--set", "search.n_omega=12", "--set", "machine.g=1000") == 0
        payload = json.loads((tmp_path / "freq-maximize.json").read_text())
        assert payload["summary"]["exceeds_curzon_ahlborn"] is True
        assert payload["summary"]["eta_curzon_ahlborn"] == pytest.approx(
            1 - math.sqrt(0.1), rel=1e-12)
