import json

import pytest

from forkentropy.main import build_parser, main

from conftest import MINI_PROJECT, write_matrix_file


def stderr_error(captured):
    """The machine-readable error line printed after any log output."""
    lines = [line for line in captured.err.splitlines() if line.startswith("{")]
    return json.loads(lines[-1])


@pytest.fixture
def two_row_matrix(tmp_path):
    return write_matrix_file(
        tmp_path / "matrix.ndjson",
        [{"fork_id": "a", "cells": {"a.py": 1}}, {"fork_id": "b", "cells": {"b.py": 1}}],
        snapshot_ref="acme/tool@2023-03",
    )


def test_subcommand_is_required():
    with pytest.raises(SystemExit) as excinfo:
        build_parser().parse_args([])
    assert excinfo.value.code == 2


def test_entropy_prints_ten_decimals(two_row_matrix, capsys):
    assert main(["entropy", "--matrix", str(two_row_matrix)]) == 0
    assert capsys.readouterr().out == "0.4323323584\n"


def test_entropy_with_gamma(two_row_matrix, capsys):
    assert main(["entropy", "--matrix", str(two_row_matrix), "--gamma", "0.5"]) == 0
    # 2 * (1 - e^-1) / 4
    assert capsys.readouterr().out == "0.3160602794\n"


def test_what_if_output(tmp_path, capsys):
    matrix = write_matrix_file(tmp_path / "one.ndjson", [{"fork_id": "a", "cells": {"a.py": 3}}])
    assert main(["what-if", "--matrix", str(matrix), "--row", "b.py=1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [line.split()[0] for line in lines] == [
        "mean_distance", "entropy_before", "entropy_after", "delta", "approx_delta", "label",
    ]
    assert lines[1] == "entropy_before  0.0000000000"
    assert lines[3] == "delta           +0.4908421806"
    assert lines[5] == "label           distinctive"


def test_what_if_duplicate_row_is_neutral_on_single_fork(tmp_path, capsys):
    matrix = write_matrix_file(tmp_path / "one.ndjson", [{"fork_id": "a", "cells": {"a.py": 3}}])
    assert main(["what-if", "--matrix", str(matrix), "--row", "a.py=3"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "label           neutral"


def test_bad_row_spec_exits_with_validation_code(two_row_matrix, capsys):
    assert main(["what-if", "--matrix", str(two_row_matrix), "--row", "a.py"]) == 2
    assert stderr_error(capsys.readouterr())["kind"] == "invalid_row_spec"


def test_invalid_gamma_exits_with_config_error(two_row_matrix, capsys):
    assert main(["entropy", "--matrix", str(two_row_matrix), "--gamma=-1"]) == 2
    error = stderr_error(capsys.readouterr())
    assert error["kind"] == "config_error"
    assert error["context"]["knob"] == "gamma"


def test_missing_dataset(tmp_path, capsys):
    code = main(["compute", "--dataset", str(tmp_path / "nowhere"), "--out", str(tmp_path / "out")])
    assert code == 2
    assert stderr_error(capsys.readouterr())["kind"] == "dataset_not_found"


def test_compute_without_dataset(tmp_path, capsys):
    assert main(["compute", "--out", str(tmp_path)]) == 2
    assert stderr_error(capsys.readouterr())["context"]["knob"] == "datasets"


def test_print_config_layers_file_and_flags(tmp_path, capsys):
    config_file = tmp_path / "run.json"
    config_file.write_text(json.dumps({"gamma": 2.0, "jobs": 3, "lint": {"issues": 10}}), encoding="utf-8")
    assert main(["compute", "--config", str(config_file), "--jobs", "5", "--print-config"]) == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed["gamma"] == 2.0
    assert printed["jobs"] == 5
    assert printed["lint"] == {"active_forks": 100, "issues": 10, "external_pull_requests": 100}
    assert printed["hot_window_days"] == 90


def test_validate_reports_lint(capsys):
    assert main(["validate", "--dataset", str(MINI_PROJECT)]) == 0
    (report,) = json.loads(capsys.readouterr().out)
    assert report["project_id"] == "acme/widget"
    assert report["clean"] is True
    assert len(report["lint"]) == 3


@pytest.mark.parametrize("jobs", ["1", "2"])
def test_compute_writes_expected_metrics(tmp_path, capsys, jobs):
    out = tmp_path / "out"
    assert main(["compute", "--dataset", str(MINI_PROJECT), "--out", str(out), "--jobs", jobs]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["rows"] == 6
    assert (out / "metrics.csv").read_bytes() == (MINI_PROJECT / "expected" / "metrics.csv").read_bytes()
    lint = json.loads((out / "lint.json").read_text(encoding="utf-8"))
    assert sorted(lint) == ["acme/widget"]
