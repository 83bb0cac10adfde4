"""Unit tests for stablelab.experiments and the command line.

These tests cover:
- check records, outcomes and CSV artifacts
- ExperimentConfig defaults and validation
- the experiment registry and run_experiment
- emit_report in the json, csv and human formats
- the stablelab command: exit codes, overrides and determinism
"""

import json

import numpy as np
import pytest
from pydantic import ValidationError

from stablelab.exceptions import ConfigurationError, OutputError
from stablelab.experiments.artifacts import write_csv
from stablelab.experiments.checks import CheckRecord, CheckStatus, ExperimentOutcome
from stablelab.experiments.report import emit_report, write_report
from stablelab.experiments.router import EXPERIMENTS, get_runner, run_experiment
from stablelab.experiments.schemas import ExperimentConfig, ExperimentReport
from stablelab.main import load_config, main

NAMES = [
    "simons-calibration",
    "cone-stability",
    "foliation",
    "hardy",
    "allen-cahn-layer",
    "allen-cahn-saddle",
    "gelfand-branch",
    "isoperimetric",
]


def fake_runner(params, *, tolerance, seed, output_dir, logger):
    """Runner with one passing, one observed and one tolerance dependent check."""
    name = write_csv(output_dir, "fake.csv", ["x", "y"], [(0.5, 1), (1.0, 2)])
    return ExperimentOutcome(
        checks=[
            CheckRecord.assertion(
                "always", "1 > 0", True, reference="order", value=1.0
            ),
            CheckRecord.observation("seen", "anything goes", seed=seed),
            CheckRecord.assertion(
                "tight",
                "1e-7 <= tolerance",
                1e-7 <= tolerance,
                reference="order",
                tolerance=tolerance,
            ),
        ],
        artifacts=[name],
    )


@pytest.fixture
def fake_experiment(monkeypatch):
    """Replace the hardy runner by fake_runner."""
    monkeypatch.setitem(EXPERIMENTS, "hardy", ("hardy", fake_runner))


@pytest.fixture
def report():
    """A report with one check of every status."""
    return ExperimentReport(
        experiment="hardy",
        passed=False,
        config={"experiment": "hardy", "seed": 0},
        checks=[
            CheckRecord.assertion(
                "a", "claim a", True, reference="ref a", tolerance=1e-6, x=0.1
            ),
            CheckRecord.assertion("b", "claim b", False, reference="ref b", y=[1, 2]),
            CheckRecord.observation("c", "claim c", z={"k": 3.0}),
        ],
        artifacts=["a.csv"],
        wall_clock=1.5,
    )


def test_check_record_statuses():
    """Assertions pass or fail, observations never fail."""
    passed = CheckRecord.assertion(
        "p", "anchor", True, reference="ref", value=np.float64(2.0)
    )
    failed = CheckRecord.assertion(
        "f", "anchor", False, reference="ref", values=np.arange(2)
    )
    observed = CheckRecord.observation("o", "anchor")
    assert passed.status == CheckStatus.passed
    assert passed.values == {"value": 2.0}
    assert failed.values == {"values": [0, 1]}
    assert observed.status == CheckStatus.observed
    assert ExperimentOutcome(checks=[passed, observed]).passed
    assert not ExperimentOutcome(checks=[passed, failed]).passed


def test_assertion_requires_reference():
    """Pass and fail records name the result they check, observations need not."""
    with pytest.raises(ValidationError, match="no reference"):
        CheckRecord.assertion("p", "anchor", True, reference="")
    with pytest.raises(ValidationError, match="no reference"):
        CheckRecord(name="f", anchor="anchor", status=CheckStatus.failed)
    assert CheckRecord.observation("o", "anchor").reference is None


def test_write_csv(output_dir):
    """Header line, 17 significant digits and LF endings."""
    name = write_csv(output_dir, "t.csv", ["a", "b", "c"], [(0.1, True, None)])
    text = (output_dir / name).read_bytes().decode()
    assert text == "a,b,c\n0.10000000000000001,true,\n"


def test_write_csv_unwritable(tmp_path):
    """A file in place of the directory raises OutputError."""
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OutputError):
        write_csv(blocker, "t.csv", ["a"], [(1,)])


def test_config_defaults():
    """Every section has defaults, the default experiment is simons-calibration."""
    config = ExperimentConfig()
    assert config.experiment == "simons-calibration"
    assert config.seed == 0
    assert config.output_dir is None
    assert config.tolerance is None
    assert config.isoperimetric.samples == 500
    assert config.gelfand_branch.dimensions == [2, 3]


def test_config_rejects_unknown_keys():
    """Unknown keys are rejected at the top level and inside sections."""
    with pytest.raises(ValidationError, match="foo"):
        ExperimentConfig(foo=1)
    with pytest.raises(ValidationError, match="bar"):
        ExperimentConfig(hardy={"bar": 2})


def test_registry_names():
    """The registry holds the eight experiments, each with its config section."""
    assert list(EXPERIMENTS) == NAMES
    for name in NAMES:
        section, runner = get_runner(name)
        assert section in ExperimentConfig.model_fields
        assert callable(runner)


def test_unknown_experiment():
    """The error lists the valid names."""
    with pytest.raises(ConfigurationError) as exc:
        get_runner("nope")
    assert "nope" in exc.value.message
    for name in NAMES:
        assert name in exc.value.message


def test_run_experiment(fake_experiment, output_dir, mock_logger):
    """The report echoes the config and lists the written files."""
    config = ExperimentConfig(experiment="hardy", output_dir=output_dir, seed=7)
    result = run_experiment(config, logger=mock_logger)
    assert result.passed
    assert result.experiment == "hardy"
    assert result.config["seed"] == 7
    assert result.config["hardy"] == config.hardy.model_dump(mode="json")
    assert result.artifacts == ["fake.csv", "report.json", "checks.csv"]
    assert result.checks[1].values == {"seed": 7}
    for name in result.artifacts:
        assert (output_dir / name).exists()
    assert result.wall_clock >= 0
    assert mock_logger.info.call_count == 2


def test_run_experiment_tolerance(fake_experiment, output_dir, mock_logger):
    """The global tolerance reaches the runner; failed checks are logged."""
    config = ExperimentConfig(experiment="hardy", output_dir=output_dir, tolerance=1e-8)
    result = run_experiment(config, logger=mock_logger)
    assert not result.passed
    assert result.checks[2].tolerance == 1e-8
    mock_logger.warning.assert_called_once()


def test_run_experiment_default_output(fake_experiment, monkeypatch, tmp_path):
    """Without output_dir the Settings.OUTPUT_DIR directory is used."""
    monkeypatch.setenv("OUTPUT_DIR", str(tmp_path / "from_env"))
    run_experiment(ExperimentConfig(experiment="hardy"))
    assert (tmp_path / "from_env" / "report.json").exists()


def test_run_experiment_unwritable(fake_experiment, tmp_path, mock_logger):
    """An output path blocked by a file raises OutputError."""
    blocker = tmp_path / "file"
    blocker.write_text("")
    config = ExperimentConfig(experiment="hardy", output_dir=blocker / "out")
    with pytest.raises(OutputError):
        run_experiment(config, logger=mock_logger)


def test_emit_json_round_trip(report):
    """Parsing the JSON reproduces the report, without the wall clock."""
    text = emit_report(report, "json")
    assert "wall_clock" not in text
    parsed = ExperimentReport.model_validate_json(text)
    assert parsed == report.model_copy(update={"wall_clock": 0.0})
    assert list(json.loads(text)) == [
        "experiment",
        "passed",
        "config",
        "checks",
        "artifacts",
    ]


def test_emit_csv(report):
    """One header line and one line per check."""
    lines = emit_report(report, "csv").splitlines()
    assert lines[0] == "name,status,anchor,reference,tolerance,values"
    assert len(lines) == 1 + len(report.checks)
    assert lines[1].startswith("a,pass,claim a,ref a,9.9999999999999995e-07,")
    assert lines[2].startswith("b,fail,claim b,ref b,,")


def test_emit_human(report):
    """The experiment name comes first, then status, clock and checks."""
    lines = emit_report(report, "human").splitlines()
    assert lines[0] == "experiment: hardy"
    assert lines[1] == "status: FAIL"
    assert lines[2] == "wall clock: 1.50 s"
    assert "[observed] c: claim c" in lines
    assert lines[-1] == "artifact: a.csv"


def test_emit_unknown_format(report):
    """Formats outside json, csv and human are rejected."""
    with pytest.raises(ValueError):
        emit_report(report, "xml")


def test_write_report(report, output_dir):
    """report.json and checks.csv are written."""
    assert write_report(report, output_dir) == ["report.json", "checks.csv"]
    assert (output_dir / "report.json").read_text() == emit_report(report, "json")


def test_write_report_unwritable(report, tmp_path):
    """A missing directory raises OutputError naming the path."""
    with pytest.raises(OutputError) as exc:
        write_report(report, tmp_path / "missing")
    assert "missing" in exc.value.message


def test_load_config_toml(tmp_path):
    """TOML sections fill the parameter models, overrides win."""
    path = tmp_path / "config.toml"
    path.write_text('experiment = "hardy"\nseed = 3\n\n[isoperimetric]\nsamples = 10\n')
    config = load_config(path, experiment="foliation", output_dir=tmp_path / "out")
    assert config.experiment == "foliation"
    assert config.seed == 3
    assert config.isoperimetric.samples == 10
    assert config.output_dir == tmp_path / "out"


def test_load_config_json(tmp_path):
    """JSON files are accepted too."""
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"experiment": "hardy", "tolerance": 1e-8}))
    assert load_config(path).tolerance == 1e-8


def test_load_config_errors(tmp_path):
    """Missing and malformed files raise ConfigurationError."""
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "missing.toml")
    path = tmp_path / "bad.toml"
    path.write_text("experiment = ")
    with pytest.raises(ConfigurationError):
        load_config(path)


def test_main_exit_codes(fake_experiment, output_dir, capsys):
    """0 when every assertion holds, 1 when one fails."""
    assert main(["--experiment", "hardy", "--out", str(output_dir)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["experiment"] == "hardy"
    assert report["passed"] is True

    path = output_dir / "tight.toml"
    path.write_text('experiment = "hardy"\ntolerance = 1e-8\n')
    assert main(["--config", str(path), "--out", str(output_dir)]) == 1


def test_main_unknown_key(tmp_path, capsys):
    """An unknown key exits with code 2 and a message naming it."""
    path = tmp_path / "config.toml"
    path.write_text('experiment = "hardy"\nfoo = 1\n')
    assert main(["--config", str(path), "--out", str(tmp_path)]) == 2
    assert "foo" in capsys.readouterr().err


def test_main_unknown_experiment(tmp_path, capsys):
    """An unknown experiment exits with code 2 and lists the valid names."""
    assert main(["--experiment", "nope", "--out", str(tmp_path)]) == 2
    assert "gelfand-branch" in capsys.readouterr().err


def test_main_human_format(fake_experiment, output_dir, capsys):
    """--format human prints the experiment name first."""
    args = ["--experiment", "hardy", "--out", str(output_dir), "--format", "human"]
    assert main([*args, "--log-level", "ERROR"]) == 0
    assert capsys.readouterr().out.startswith("experiment: hardy\n")


def test_main_deterministic(fake_experiment, tmp_path):
    """Two runs of the same configuration give byte-identical reports."""
    first, second = tmp_path / "first", tmp_path / "second"
    path = tmp_path / "config.toml"
    path.write_text('experiment = "hardy"\noutput_dir = "ignored"\n')
    for out in (first, second):
        assert main(["--config", str(path), "--out", str(out)]) == 0
    a = json.loads((first / "report.json").read_text())
    b = json.loads((second / "report.json").read_text())
    assert a.pop("config")["output_dir"] == str(first)
    assert b.pop("config")["output_dir"] == str(second)
    assert a == b
    assert (first / "checks.csv").read_bytes() == (second / "checks.csv").read_bytes()


def test_real_run_deterministic(tmp_path, mock_logger):
    """The isoperimetric experiment writes identical JSON twice."""
    texts = []
    for _ in range(2):
        config = ExperimentConfig(
            experiment="isoperimetric",
            output_dir=tmp_path,
            isoperimetric={
                "step": 0.06,
                "square_side": 2.0,
                "samples": 20,
                "refinement_factors": [1.0],
                "checkpoint": False,
            },
        )
        result = run_experiment(config, logger=mock_logger)
        assert result.passed
        texts.append((tmp_path / "report.json").read_bytes())
    assert texts[0] == texts[1]


def test_run_experiment_wall_clock(fake_experiment, output_dir, mocker):
    """The wall clock is the perf_counter difference around the runner."""
    mocker.patch(
        "stablelab.experiments.router.time.perf_counter", side_effect=[10.0, 12.5]
    )
    config = ExperimentConfig(experiment="hardy", output_dir=output_dir)
    assert run_experiment(config).wall_clock == pytest.approx(2.5)
