import json

import pytest
import yaml

from transcheck.cli import main
from transcheck.scenarios import (
    ConfigError,
    builtin_scenario,
    list_scenarios,
    parse_scenario_config,
    run_scenario,
)

PAIR_CONFIG = {
    "name": "pair",
    "series": {
        "mode": "sum-direct",
        "delta": "3/5",
        "denominators": {"kind": "prefix-square-recurrence", "seed": 2},
        "coefficients": [
            {"kind": "constant", "value": 1},
            {"kind": "divisor-count"},
        ],
    },
    "hypotheses": [{"kind": "spike-decay", "delta": "3/5"}],
    "window": [1, 8],
}


class TestScenarioRegistry:
    def test_builtins_listed(self):
        names = list_scenarios()
        assert "corollary" in names
        assert "theoremA-comparison" in names

    def test_listing_stable(self):
        assert list_scenarios() == list_scenarios() == sorted(list_scenarios())

    def test_unknown_builtin(self):
        with pytest.raises(ConfigError):
            builtin_scenario("mystery")


class TestConfigParsing:
    def test_round_trip(self):
        config = parse_scenario_config(PAIR_CONFIG)
        assert config.series.m == 2
        assert config.window == (1, 8)
        assert config.hypotheses[0].kind == "spike-decay"

    def test_unknown_sequence_kind_path(self):
        bad = json.loads(json.dumps(PAIR_CONFIG))
        bad["series"]["coefficients"][1] = {"kind": "fibonacci"}
        with pytest.raises(ConfigError) as err:
            parse_scenario_config(bad)
        assert err.value.path == "series.coefficients[1].kind"

    def test_bad_window(self):
        bad = json.loads(json.dumps(PAIR_CONFIG))
        bad["window"] = [8, 1]
        with pytest.raises(ConfigError) as err:
            parse_scenario_config(bad)
        assert err.value.path == "window"

    def test_pipeline_coupling_rejected(self):
        bad = json.loads(json.dumps(PAIR_CONFIG))
        bad["hypotheses"] = [{"kind": "spike-decay", "delta": "1/3"}]
        with pytest.raises(ConfigError) as err:
            parse_scenario_config(bad)
        assert err.value.path.startswith("hypotheses[0]")

    def test_bad_rational(self):
        bad = json.loads(json.dumps(PAIR_CONFIG))
        bad["series"]["delta"] = "three fifths"
        with pytest.raises(ConfigError) as err:
            parse_scenario_config(bad)
        assert err.value.path == "series.delta"


class TestRunScenario:
    def test_empty_hypotheses_gives_convergent_table_only(self):
        payload = json.loads(json.dumps(PAIR_CONFIG))
        payload["hypotheses"] = []
        payload["window"] = [1, 4]
        report = run_scenario(parse_scenario_config(payload))
        assert report.verdicts == []
        assert len(report.convergents) == 8  # 2 series x 4 orders
        assert report.exit_code() == 0

    def test_corollary_scenario_content(self):
        report = run_scenario(builtin_scenario("corollary"))
        verdicts = {v["hypothesis"]: v["verdict"] for v in report.verdicts}
        assert verdicts["spike-decay(delta=3/5)"] == "satisfied-on-window"
        assert verdicts["spike-decay-strong(delta=3/5)"] == "violated-at(8)"
        assert report.relation_findings["candidates"] == []
        assert report.probe["refuted"] == report.probe["total_candidates"]
        # delta_N for both series at order 3, against the hand-computed tails
        by_key = {(r["series"], r["order"]): r for r in report.convergents}
        assert by_key[(1, 3)]["exponent"] == "1"
        assert abs(eval_fraction(by_key[(2, 3)]["exponent"]) - 0.824) < 1e-3
        assert report.exit_code() == 1  # the strong variant is violated by design

    def test_comparison_scenario_verdict_table(self):
        report = run_scenario(builtin_scenario("theoremA-comparison"))
        outcomes = [(v["hypothesis"], v["verdict"]) for v in report.verdicts]
        plain = [v for h, v in outcomes if h.startswith("spike-decay(")]
        strong = [v for h, v in outcomes if h.startswith("spike-decay-strong")]
        assert plain == ["satisfied-on-window"] * 3
        assert all(v.startswith("violated-at") for v in strong)

    def test_json_reports_byte_identical(self):
        a = run_scenario(builtin_scenario("corollary")).to_json()
        b = run_scenario(builtin_scenario("corollary")).to_json()
        assert a == b

    def test_timing_excluded_from_canonical_json(self):
        report = run_scenario(builtin_scenario("theoremA-comparison"))
        assert "timing" not in report.to_json()
        assert "timing_seconds" in report.to_json(include_timing=True)

    def test_verdicts_reproducible_from_recorded_parameters(self):
        from fractions import Fraction

        from transcheck.criteria import check_spike_decay

        config = builtin_scenario("corollary")
        report = run_scenario(config)
        rec = next(v for v in report.verdicts
                   if v["hypothesis"] == "spike-decay(delta=3/5)")
        again = check_spike_decay(
            list(config.series.coefficients), config.series.denominators,
            Fraction(3, 5), tuple(rec["window"])).to_record()
        assert again == rec


def eval_fraction(text):
    from fractions import Fraction

    return float(Fraction(text))


class TestCliCommands:
    def test_scenario_list(self, capsys):
        assert main(["scenario", "--list"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out == sorted(out) and "corollary" in out

    def test_check_command_table(self, capsys):
        code = main(["check", "--scenario", "corollary"])
        out = capsys.readouterr().out
        assert code == 1
        assert "spike-decay(delta=3/5)" in out
        assert "convergents" not in out

    def test_converge_command_json(self, capsys):
        code = main(["converge", "--scenario", "corollary", "--window", "1..4",
                     "--format", "json"])
        out = capsys.readouterr().out
        assert code == 0
        doc = json.loads(out)
        assert len(doc["convergents"]) == 8
        assert doc["verdicts"] == []

    def test_subspace_command(self, capsys):
        code = main(["subspace", "--scenario", "corollary", "--window", "3..5",
                     "--format", "json"])
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert [row["order"] for row in doc["subspace"]] == [3, 4, 5]

    def test_relations_command(self, capsys):
        code = main(["relations", "--scenario", "corollary", "--bound", "3",
                     "--format", "json"])
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["relations"]["bound"] == 3
        assert doc["relations"]["candidates"] == []
        assert doc["probe"]["witness"] == [[2, 2], [4, 3]]

    def test_config_file_run(self, tmp_path, capsys):
        path = tmp_path / "pair.yaml"
        path.write_text(yaml.safe_dump(PAIR_CONFIG))
        code = main(["check", "--config", str(path), "--format", "json"])
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["scenario"] == "pair"
        assert doc["verdicts"][0]["verdict"] == "satisfied-on-window"

    def test_invalid_config_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.yaml"
        payload = json.loads(json.dumps(PAIR_CONFIG))
        payload["series"]["mode"] = "integral"
        path.write_text(yaml.safe_dump(payload))
        code = main(["check", "--config", str(path)])
        err = capsys.readouterr().err
        assert code == 2
        assert "series.mode" in err

    def test_missing_scenario_name_exits_2(self, capsys):
        assert main(["scenario"]) == 2

    def test_out_file(self, tmp_path):
        target = tmp_path / "report.json"
        code = main(["converge", "--scenario", "corollary", "--window", "1..4",
                     "--format", "json", "--out", str(target)])
        assert code == 0
        doc = json.loads(target.read_text())
        assert doc["scenario"] == "corollary"

    def test_delta_override(self, capsys):
        code = main(["check", "--scenario", "corollary", "--delta", "11/20",
                     "--format", "json"])
        doc = json.loads(capsys.readouterr().out)
        labels = [v["hypothesis"] for v in doc["verdicts"]]
        assert any("delta=11/20" in lbl for lbl in labels)
        assert code in (0, 1)
