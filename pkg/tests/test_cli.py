import json

import pytest

from octlab.cli import EXIT_CONFIG, EXIT_FALSIFIED, EXIT_OK, EXIT_RESOURCE, main


def _run(tmp_path, *args):
    out = tmp_path / "report.json"
    code = main(list(args) + ["--out", str(out), "--cache-dir", str(tmp_path / "cache")])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_build_writes_cache_files(tmp_path, capsys):
    assert main(["build", "--n", "2", "--sign", "plus", "--cache-dir", str(tmp_path)]) == EXIT_OK
    files = list(tmp_path.rglob("*"))
    data = [f for f in files if f.is_file()]
    assert len(data) == 1
    header = json.loads(data[0].read_text().splitlines()[0])
    assert header["dim"] == 10 and len(header["labels"]) == 10
    first = data[0].read_bytes()
    assert main(["build", "--n", "2", "--sign", "plus", "--cache-dir", str(tmp_path)]) == EXIT_OK
    assert data[0].read_bytes() == first


def test_build_minus_order_one(tmp_path):
    assert main(["build", "--n", "1", "--sign", "minus", "--cache-dir", str(tmp_path)]) == EXIT_OK
    (f,) = [f for f in tmp_path.rglob("*") if f.is_file()]
    assert json.loads(f.read_text().splitlines()[0])["dim"] == 7


def test_check_dims(tmp_path):
    code, rep = _run(tmp_path, "check", "dims", "--n", "4", "--sign", "both")
    assert code == EXIT_OK
    assert set(rep) == {"version", "config", "records"}
    computed = {r["id"]: r["computed"] for r in rep["records"]}
    assert computed == {"dims.plus.n4": 52, "dims.minus.n4": 76}
    for r in rep["records"]:
        assert set(r) == {"id", "anchor", "expected", "computed", "verdict", "certification", "ms"}


def test_check_scan(tmp_path):
    code, rep = _run(tmp_path, "check", "scan", "--n", "2", "--sign", "minus")
    assert code == EXIT_OK
    scan = next(r for r in rep["records"] if r["id"] == "scan.minus.n2")
    nonzero = {k for k, v in scan["computed"]["dims"].items() if v}
    assert nonzero == {"1", "1/2"}


def test_check_forms(tmp_path):
    code, rep = _run(tmp_path, "check", "forms", "--n", "3", "--sign", "plus")
    assert code == EXIT_OK
    assert all(r["verdict"] in ("pass", "info") for r in rep["records"])


def test_reports_are_deterministic_apart_from_timings(tmp_path):
    def strip(rep):
        for r in rep["records"]:
            r.pop("ms")
        return rep
    _, a = _run(tmp_path, "check", "dims", "identities", "--n", "2", "--seed", "3")
    _, b = _run(tmp_path, "check", "dims", "identities", "--n", "2", "--seed", "3")
    assert strip(a) == strip(b)


def test_falsified_claim_exits_one(tmp_path, capsys):
    # the commutator-image property fails at order two for delta = -1
    code, rep = _run(tmp_path, "check", "lemmas", "--n", "2", "--sign", "plus")
    assert code == EXIT_FALSIFIED
    assert "first failing record" in capsys.readouterr().err


@pytest.mark.parametrize("args", [
    ["check", "dims", "--delta", "0.5"],
    ["check", "dims", "--field", "fp:4"],
    ["check", "dims", "--field", "fp:2"],
    ["check", "dims", "--field", "fp:3"],
    ["check", "dims", "--n", "0"],
    ["check", "nonsense"],
    ["check", "dims", "--delta", "1,1"],
])
def test_configuration_errors_exit_two(tmp_path, args):
    code, _ = _run(tmp_path, *args)
    assert code == EXIT_CONFIG


def test_char3_is_exploratory_only(tmp_path):
    code, _ = _run(tmp_path, "check", "dims", "--n", "2", "--field", "fp:3", "--exploratory-char3")
    assert code == EXIT_OK


def test_resource_ceiling_exits_three(tmp_path):
    code, _ = _run(tmp_path, "check", "dims", "--n", "5")
    assert code == EXIT_RESOURCE
    code, rep = _run(tmp_path, "check", "dims", "--n", "5", "--max-n", "5")
    assert code == EXIT_OK and rep["records"][0]["computed"] == 85


def test_report_command(tmp_path, capsys):
    _run(tmp_path, "check", "dims", "--n", "3")
    assert main(["report", str(tmp_path / "report.json")]) == EXIT_OK
    assert "dims.plus.n3" in capsys.readouterr().out
    assert main(["report", str(tmp_path / "missing.json")]) == EXIT_CONFIG
