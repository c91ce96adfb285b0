import csv
import io
import json
import subprocess
import sys

import pytest

from mahler_lab import cli
from mahler_lab.errors import ArgumentError
from mahler_lab.suite import (
    CLAIM_IDS,
    CSV_HEADER,
    ClaimResult,
    SuiteConfig,
    claim_rng,
    emit_report,
    exit_code,
    render_report,
    resolve_seed,
    run_suite,
)

REQUIRED_IDS = {
    "thm-2.3", "lemma-2.4", "lemma-2.5", "prop-2.6", "cor-2.8", "lemma-2.9", "prop-2.10", "cor-2.11",
    "thm-3.2", "lemma-3.4", "cor-3.6", "prop-3.3-bound", "prop-3.8", "prop-4.3", "thm-4.1", "prop-4.6",
    "remark-4.7", "kronecker", "lehmer-L", "pierce-growth",
}
FAST = ["kronecker", "pierce-growth", "lemma-2.9", "prop-2.10", "cor-2.11", "lemma-3.4", "cor-3.6"]


def _run_cli(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


# ---- registry and configuration ---------------------------------------------


def test_registry_covers_required_claims():
    assert set(CLAIM_IDS) == REQUIRED_IDS


def test_config_validation():
    with pytest.raises(ArgumentError):
        SuiteConfig(suites=["thm-9.9"])
    with pytest.raises(ArgumentError):
        SuiteConfig(tolerances={"kronecker": 0})
    with pytest.raises(ArgumentError):
        SuiteConfig(tolerances={"nope": 1e-3})
    with pytest.raises(ArgumentError):
        SuiteConfig(output="/nonexistent-dir/report.json")
    with pytest.raises(ArgumentError):
        SuiteConfig.from_json('{"seeds": 1}')


def test_config_from_json_overrides():
    cfg = SuiteConfig.from_json('{"seed": 7, "suites": ["kronecker"]}', jobs=2)
    assert cfg.seed == 7 and cfg.suites == ["kronecker"] and cfg.jobs == 2
    assert cfg.dims["N"] == 512


def test_seed_resolution(monkeypatch):
    monkeypatch.delenv("MAHLER_LAB_SEED", raising=False)
    assert resolve_seed(None) == 42
    monkeypatch.setenv("MAHLER_LAB_SEED", "9")
    assert resolve_seed(None) == 9
    assert resolve_seed(3) == 3
    monkeypatch.setenv("MAHLER_LAB_SEED", "x")
    with pytest.raises(ArgumentError):
        resolve_seed(None)


def test_claim_rng_depends_on_seed_and_claim_only():
    a = claim_rng(42, "thm-2.3").random(4)
    assert (a == claim_rng(42, "thm-2.3").random(4)).all()
    assert not (a == claim_rng(42, "prop-3.8").random(4)).all()
    assert not (a == claim_rng(43, "thm-2.3").random(4)).all()


# ---- suite examples ---------------------------------------------------------


def test_suite_examples():
    res = run_suite(SuiteConfig(suites=["kronecker", "lehmer-L", "thm-2.3"]))
    assert [r.claim_id for r in res] == ["kronecker", "lehmer-L", "thm-2.3"]
    assert all(r.status == "pass" for r in res), [r.to_dict() for r in res]
    # 50 contractions with 4 polynomials each
    assert res[2].observed["instances"] == 200


def test_fast_claims_pass():
    res = run_suite(SuiteConfig(suites=FAST))
    assert all(r.status == "pass" for r in res), [r.to_dict() for r in res if r.status != "pass"]


def test_inconclusive_claim_has_reason():
    (res,) = run_suite(SuiteConfig(suites=["lemma-2.5"]))
    assert res.status == "inconclusive"
    assert res.observed["reason"]
    assert exit_code([res]) == 2


def test_concurrency_does_not_change_results():
    serial = run_suite(SuiteConfig(suites=FAST, jobs=1))
    parallel = run_suite(SuiteConfig(suites=FAST, jobs=3))
    assert render_report(serial) == render_report(parallel)


# ---- reporting --------------------------------------------------------------


def _result(status):
    return ClaimResult("kronecker", status, {"x": 1.5}, {"y": [1, 2]}, "exact identity")


def test_report_examples(tmp_path):
    text = render_report([_result("pass")])
    data = json.loads(text)
    assert isinstance(data, list) and len(data) == 1
    assert set(data[0]) == {"claim_id", "status", "observed", "expected", "provenance", "runtime_ms"}
    assert exit_code([_result("pass"), _result("fail")]) == 1
    assert exit_code([_result("pass"), _result("inconclusive"), _result("fail")]) == 1
    assert exit_code([_result("pass")]) == 0
    rows = list(csv.reader(io.StringIO(render_report([_result("pass")], "csv"))))
    assert rows[0] == CSV_HEADER
    assert ",".join(rows[0]) == "claim_id,status,observed,expected,provenance,runtime_ms"
    assert json.loads(rows[1][2]) == {"x": 1.5}
    path = tmp_path / "r.json"
    emit_report([_result("pass")], "json", str(path))
    assert path.read_text() == text


def test_report_needs_results():
    with pytest.raises(ArgumentError):
        render_report([])


def test_emit_report_surfaces_io_errors(tmp_path):
    with pytest.raises(OSError):
        emit_report([_result("pass")], "json", str(tmp_path / "missing" / "r.json"))


# ---- CLI --------------------------------------------------------------------


def test_cli_mahler(capsys):
    code, out, _ = _run_cli(["mahler", "z^10+z^9-z^7-z^6-z^5-z^4-z^3+z+1", "--method", "both"], capsys)
    assert code == 0
    recs = json.loads(out)
    assert [r["method"] for r in recs] == ["root-product", "circle-quadrature"]
    for r in recs:
        assert set(r) == {"poly", "value", "method", "params", "error_estimate"}
        assert r["value"] == pytest.approx(1.176280, abs=1e-5)


def test_cli_csv(capsys):
    code, out, _ = _run_cli(["mahler", "--csv", "--", "-2,1"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["poly", "value", "method", "params", "error_estimate"]
    assert float(rows[1][1]) == 2


def test_cli_pierce_exact(capsys):
    code, out, _ = _run_cli(["pierce", "z-2", "--n", "64"], capsys)
    vals = [int(v) for v in json.loads(out)["values"]]
    assert vals == [2**n - 1 for n in range(1, 65)]


def test_cli_search(capsys):
    code, out, _ = _run_cli(["search", "--deg", "4", "--height", "1", "--threshold", "1.5"], capsys)
    data = json.loads(out)
    assert code == 0 and all(c["value"] > 1 for c in data["candidates"])


def test_cli_opmahler(tmp_path, capsys):
    code, out, _ = _run_cli(["opmahler", "--shift", "bergman", "--dim", "64", "--e", "unit:1", "--poly", "z^3", "--K", "30"], capsys)
    assert json.loads(out)["value"] == pytest.approx(0.5, abs=1e-12)
    wfile = tmp_path / "w.json"
    wfile.write_text(json.dumps([0.5] * 15))
    code, out, _ = _run_cli(["opmahler", "--shift", f"file:{wfile}", "--dim", "16", "--poly", "z^3", "--K", "8"], capsys)
    assert json.loads(out)["value"] == pytest.approx(0.125, abs=1e-12)
    mfile = tmp_path / "m.json"
    mfile.write_text(json.dumps([[[0, 0], [0, 0]], [[1, 0], [0, 0]]]))
    code, out, _ = _run_cli(["opmahler", "--matrix", str(mfile), "--poly", "1", "--sup", "--restarts", "4"], capsys)
    assert json.loads(out)["value"] == pytest.approx(1, abs=1e-9)


def test_cli_areal_chain_limit(tmp_path, capsys):
    code, out, _ = _run_cli(["areal", "z"], capsys)
    assert json.loads(out)["value"] == pytest.approx(0.6065306597, abs=1e-10)
    code, out, _ = _run_cli(["areal", "z", "--method", "quad"], capsys)
    assert json.loads(out)["value"] == pytest.approx(0.6065306597, abs=1e-8)
    rho = tmp_path / "rho.json"
    rho.write_text(json.dumps({"r": [0, 0.5, 1], "rho": [1, 1, 1]}))
    code, out, _ = _run_cli(["areal", "1", "--rho", str(rho)], capsys)
    assert json.loads(out)["value"] == 1
    code, out, _ = _run_cli(["chain", "2z+1"], capsys)
    assert code == 0 and json.loads(out)["chain_ok"]
    # z + 1 has all three measures equal to 1; the truncated Krylov value overshoots by ~1.5e-5 at K = 256
    code, out, _ = _run_cli(["chain", "z+1", "--tol", "1e-4"], capsys)
    assert code == 0
    code, out, _ = _run_cli(["limit", "--from", "3", "--to", "6", "--dim", "64", "--K", "20", "--csv"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["n", "bergman", "areal", "bergman_error"] and len(rows) == 5


def test_cli_errors(capsys):
    code, _, err = _run_cli(["mahler", "1,,2"], capsys)
    assert code == cli.ERROR_EXIT and "position" in err
    code, _, err = _run_cli(["pierce", "2z+1", "--n", "3"], capsys)
    assert code == cli.ERROR_EXIT
    with pytest.raises(SystemExit):
        cli.main(["verify", "--suite", "nope"])


def test_cli_verify(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, _, _ = _run_cli(["verify", "--suite", "kronecker", "lemma-2.9", "--out", str(out)], capsys)
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == CSV_HEADER and [r[0] for r in rows[1:]] == ["kronecker", "lemma-2.9"]
    code, _, _ = _run_cli(["verify", "--suite", "lemma-2.5", "--out", str(tmp_path / "r.json")], capsys)
    assert code == 2
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 5, "suites": ["kronecker"]}))
    code, out_text, _ = _run_cli(["verify", "--config", str(cfg)], capsys)
    assert code == 0 and json.loads(out_text)[0]["claim_id"] == "kronecker"


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mahler_lab.cli", "mahler", "z-2"], capture_output=True, text=True, check=True
    )
    assert json.loads(proc.stdout)["value"] == 2
