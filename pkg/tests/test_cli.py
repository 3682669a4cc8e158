import json
from importlib import resources
from pathlib import Path

import numpy as np
import pytest

from fiscast import cli
from fiscast.config import RunConfig, load_config, parse_config
from fiscast.errors import ConfigError, GapError, NonNumeric, SchemaError, all_error_classes
from fiscast.estimation import ols_fit
from fiscast.ingest import ingest_csv, read_series
from fiscast.reporting import dumps
from fiscast.series import align

FIXTURE = Path(str(resources.files("fiscast") / "data" / "fixture.csv"))
FIXTURE_CONFIG = Path(str(resources.files("fiscast") / "data" / "fixture_config.json"))
ORACLE = Path(__file__).parent / "data" / "evaluate_oracle.json"


def write_csv(path, rows, header="year,series,value"):
    path.write_text("\n".join([header, *rows]) + "\n")
    return path


def make_config(tmp_path, **overrides):
    data = json.loads(FIXTURE_CONFIG.read_text())
    data.update(data_path=str(FIXTURE), output_dir=str(tmp_path / "out"))
    data.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    return path


# -- ingestion -----------------------------------------------------------


def test_three_series_frame(tmp_path):
    rows = [f"{y},{n},{v}" for n, v in (("A", 1), ("B", 2), ("C", 3)) for y in range(2010, 2015)]
    frame = ingest_csv(write_csv(tmp_path / "d.csv", rows))
    assert frame.names == ["A", "B", "C"] and len(frame) == 5


def test_gap_is_rejected(tmp_path):
    rows = [f"{y},A,1" for y in range(2010, 2015) if y != 2012]
    with pytest.raises(GapError) as info:
        read_series(write_csv(tmp_path / "d.csv", rows))
    assert "2012" in str(info.value)


def test_duplicate_row_is_rejected(tmp_path):
    with pytest.raises(SchemaError):
        read_series(write_csv(tmp_path / "d.csv", ["2010,A,1", "2011,A,2", "2011,A,2"]))


def test_bad_header_and_non_numeric(tmp_path):
    with pytest.raises(SchemaError):
        read_series(write_csv(tmp_path / "h.csv", ["2010,A,1"], header="yr,name,value"))
    with pytest.raises(NonNumeric):
        read_series(write_csv(tmp_path / "n.csv", ["2010,A,1", "2011,A,n/a"]))


def test_ragged_series_are_kept_by_read_series():
    series = read_series(FIXTURE)
    assert series["WAGE"].end_year == series["PIT"].end_year + 2
    assert len(series["PIT_MF"]) == 3


# -- configuration -------------------------------------------------------


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="colour"):
        parse_config({"data_path": "x.csv", "colour": "red"})


@pytest.mark.parametrize(
    "bad",
    [{"holdout_years": 0}, {"hp_lambda": 0}, {"significance": 0.7}, {"arima": [1, 3, 0]}, {"tax": "VAT"}, {"seed": -1}],
)
def test_out_of_range_rejected(bad):
    with pytest.raises(ConfigError):
        parse_config({"data_path": "x.csv", **bad})


def test_overrides_and_fingerprint():
    cfg = parse_config({"data_path": "x.csv"})
    new = cfg.with_overrides(seed=5, hp_lambda=6.25, holdout=4)
    assert (new.seed, new.hp_lambda, new.holdout_years) == (5, 6.25, 4)
    assert cfg.with_overrides() is cfg
    assert new.fingerprint() != cfg.fingerprint()
    assert cfg.fingerprint() == parse_config({"data_path": "x.csv"}).fingerprint()


def test_data_path_relative_to_config(tmp_path):
    (tmp_path / "c.json").write_text(json.dumps({"data_path": "d.csv"}))
    assert load_config(tmp_path / "c.json").data_file == tmp_path / "d.csv"


# -- commands ------------------------------------------------------------


def test_evaluate_matches_frozen_oracle(tmp_path):
    cfg = load_config(make_config(tmp_path))
    report = cli.run("evaluate", cfg)
    oracle = json.loads(ORACLE.read_text())
    table = report["result"]["error_tables"]["PIT_MF"]
    for k, v in oracle["PIT_MF"].items():
        assert getattr(table, k) == pytest.approx(v, abs=1e-12)
    published = report["result"]["published"][0]
    assert set(published["flags"]) == {"MAE < |ME|", "RMSE < |ME|"}


def test_fit_with_zero_order_equals_ols(tmp_path):
    cfg = load_config(make_config(tmp_path, arima=[0, 0, 0], transform="level"))
    model = cli.run("fit", cfg)["result"]["model"]
    frame = align([read_series(FIXTURE)[c] for c in ("PIT", "WAGE", "SOC")]).window(2000, 2016)
    ols = ols_fit(frame, "PIT", ["WAGE", "SOC"])
    for name, b in ols.coefficients.items():
        assert model.beta[name] == pytest.approx(b, abs=1e-8)
    assert model.loglik == pytest.approx(ols.loglik, abs=1e-8)


def test_compare_with_baseline_as_proposed_is_zero(tmp_path):
    cfg = load_config(make_config(tmp_path, proposed_column="PIT_MF"))
    result = cli.run("compare", cfg)["result"]
    assert all(result["accuracy_gain"][m] == 0 for m in ("me", "mae", "smae", "rmse", "theil_u1"))


def test_compare_writes_outputs(tmp_path):
    cfg = load_config(make_config(tmp_path))
    cli.run("compare", cfg)
    out = tmp_path / "out" / "compare"
    assert {"report.json", "report.txt", "plotdata_PIT.csv", "figure_PIT.png"} <= {p.name for p in out.iterdir()}
    header = (out / "plotdata_PIT.csv").read_text().splitlines()[0]
    assert header == "year,actual,baseline,proposed"
    text = (out / "report.txt").read_text()
    assert "Accuracy gain" in text and "Proposed model" in text


def test_compare_is_byte_identical_across_runs(tmp_path):
    config = str(make_config(tmp_path))
    report = tmp_path / "out" / "compare" / "report.json"
    assert cli.main(["compare", "--config", config, "--seed", "7"]) == 0
    first = report.read_bytes()
    report.unlink()
    assert cli.main(["compare", "--config", config, "--seed", "7"]) == 0
    assert report.read_bytes() == first


@pytest.mark.parametrize("command", cli.COMMANDS)
def test_every_command_runs_on_fixture(tmp_path, command):
    assert cli.main([command, "--config", str(make_config(tmp_path))]) == 0
    report = json.loads((tmp_path / "out" / command / "report.json").read_text())
    assert report["command"] == command and report["seed"] == 20240601


def test_forecast_extends_past_revenue(tmp_path):
    report = cli.run("forecast", load_config(make_config(tmp_path)))
    assert report["result"]["forecast"]["start_year"] == 2020
    assert len(report["result"]["forecast"]["values"]) == 2


def test_errors_map_to_exit_codes(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    assert cli.main(["fit", "--config", str(missing)]) == ConfigError.exit_code
    assert cli.main(["fit", "--config", str(make_config(tmp_path, data_path="absent.csv"))]) == ConfigError.exit_code
    cfg = make_config(tmp_path, forecast_columns=["NOT_THERE"])
    code = cli.main(["evaluate", "--config", str(cfg)])
    assert code != 0 and "NOT_THERE" in capsys.readouterr().err


def test_exit_codes_are_unique():
    codes = [cls.exit_code for cls in all_error_classes()]
    assert len(codes) == len(set(codes))
    assert all(c >= 10 for c in codes if c != 1)
    assert cli.exit_code_table() == sorted(cli.exit_code_table())


def test_json_is_canonical_and_round_trips():
    report = {"b": [1.0, float("inf")], "a": {"n": np.int64(3), "x": np.float64(0.1)}}
    text = dumps(report)
    assert json.loads(text) == {"a": {"n": 3, "x": 0.1}, "b": [1.0, "inf"]}
    assert dumps(json.loads(text)) == text
    assert text.index('"a"') < text.index('"b"')
