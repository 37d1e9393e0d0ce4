from __future__ import annotations

import json

import pytest

from src.run import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main


WORKED = {"n": 3, "q": 1, "ambient": None, "zeta": [[[1, 0, 0], [0, 1, 0], [0, 0, 2]]]}


@pytest.fixture
def write_doc(tmp_path):
    def _write(payload, name="zeta.json"):
        p = tmp_path / name
        p.write_text(payload if isinstance(payload, str) else json.dumps(payload), encoding="utf-8")
        return p

    return _write


@pytest.fixture
def no_config(tmp_path):
    return ["--config", str(tmp_path / "absent.yaml")]


# -----------------------------
# validate
# -----------------------------
def test_validate_ok(write_doc, no_config):
    assert main(no_config + ["validate", str(write_doc(WORKED))]) == EXIT_OK


def test_validate_asymmetric(write_doc, no_config, capsys, monkeypatch):
    monkeypatch.setenv("CASORATI_QUIET", "0")
    bad = dict(WORKED, zeta=[[[1, 0.1, 0], [0, 1, 0], [0, 0, 2]]])
    assert main(no_config + ["validate", str(write_doc(bad))]) == EXIT_FAIL
    assert "alpha=1, i=1, j=2" in capsys.readouterr().err


def test_validate_malformed_json(write_doc, no_config):
    assert main(no_config + ["validate", str(write_doc('{"n": 3, "q": '))]) == EXIT_INPUT


def test_validate_shape_mismatch(write_doc, no_config):
    bad = dict(WORKED, n=4)
    assert main(no_config + ["validate", str(write_doc(bad))]) == EXIT_INPUT


@pytest.mark.parametrize("entry", [float("nan"), float("inf"), -float("inf")])
def test_validate_rejects_non_finite_zeta(write_doc, no_config, entry):
    bad = dict(WORKED, zeta=[[[entry, 0, 0], [0, 1, 0], [0, 0, 2]]])
    assert main(no_config + ["validate", str(write_doc(bad))]) == EXIT_INPUT


def test_validate_rejects_non_finite_ambient(write_doc, no_config):
    bad = dict(WORKED, ambient={"space_form_c": float("nan")})
    assert main(no_config + ["validate", str(write_doc(bad))]) == EXIT_INPUT


def test_validate_symmetry_tol_flag(write_doc, no_config):
    nearly = dict(WORKED, zeta=[[[1, 1e-6, 0], [0, 1, 0], [0, 0, 2]]])
    assert main(no_config + ["validate", str(write_doc(nearly))]) == EXIT_FAIL
    assert main(no_config + ["validate", str(write_doc(nearly)), "--symmetry-tol", "1e-5"]) == EXIT_OK


def test_validate_curvature_block(write_doc, no_config):
    T = [[[[0.0] * 3 for _ in range(3)] for _ in range(3)] for _ in range(3)]
    assert main(no_config + ["validate", str(write_doc(dict(WORKED, T=T)))]) == EXIT_OK
    T[0][1][0][1] = 1.0
    assert main(no_config + ["validate", str(write_doc(dict(WORKED, T=T)))]) == EXIT_FAIL


# -----------------------------
# report
# -----------------------------
def _report(tmp_path, write_doc, no_config, payload, *flags):
    out = tmp_path / "report.json"
    code = main(no_config + ["report", str(write_doc(payload)), "--json", str(out), "--restarts", "6", *flags])
    return code, json.loads(out.read_text(encoding="utf-8")) if out.exists() else None


def test_report_worked_case(tmp_path, write_doc, no_config):
    code, rep = _report(tmp_path, write_doc, no_config, WORKED, "--r", "3", "--variant", "delta_n_minus_1",
                        "--variant", "delta_hat_n_minus_1")
    assert code == EXIT_OK
    inv = rep["invariants"]
    assert inv["casorati"] == pytest.approx(2.0, abs=1e-10)
    assert inv["tau_T"] == pytest.approx(5.0, abs=1e-10)
    assert inv["tau_T_nor"] == pytest.approx(5.0 / 3.0, abs=1e-10)
    assert rep["extremal"]["inf"]["value"] == pytest.approx(1.0, abs=1e-10)
    assert rep["extremal"]["sup"]["value"] == pytest.approx(2.5, abs=1e-10)

    deltas = {d["variant"]: d for d in rep["deltas"]}
    assert deltas["delta_r"]["a_of_r"] == pytest.approx(4.0, abs=1e-10)
    assert deltas["delta_r"]["delta"] == pytest.approx(10.0, abs=1e-10)
    assert deltas["delta_n_minus_1"]["delta"] == pytest.approx(5.0 / 3.0, abs=1e-10)
    assert deltas["delta_hat_n_minus_1"]["delta"] == pytest.approx(23.0 / 12.0, abs=1e-10)

    v = next(v for v in rep["verdicts"] if v["variant"] == "delta_r")
    assert v["equality"] is True
    cls = next(c for c in rep["classification"] if c["r"] == 3.0)
    assert cls["is_equality_configuration"] is True
    assert cls["distinguished_axis"] == 3
    assert rep["metadata"]["seed"] == 0


def test_report_is_byte_identical(tmp_path, write_doc, no_config):
    doc = write_doc(WORKED)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(no_config + ["report", str(doc), "--r", "3", "--seed", "7", "--restarts", "6", "--json", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_report_umbilical_variant(tmp_path, write_doc, no_config):
    umb = dict(WORKED, zeta=[[[1, 0, 0], [0, 1, 0], [0, 0, 1]]])
    code, rep = _report(tmp_path, write_doc, no_config, umb, "--variant", "delta_n_minus_1")
    assert code == EXIT_OK
    (v,) = rep["verdicts"]
    assert v["rhs"] == pytest.approx(7.0 / 6.0)
    assert v["holds"] and not v["equality"]


def test_report_zero_tensor(tmp_path, write_doc, no_config):
    zero = dict(WORKED, zeta=[[[0, 0, 0], [0, 0, 0], [0, 0, 0]]])
    code, rep = _report(tmp_path, write_doc, no_config, zero, "--r", "3", "--r", "12")
    assert code == EXIT_OK
    assert all(v["equality"] for v in rep["verdicts"])
    assert rep["invariants"]["casorati"] == 0.0


def test_report_submanifold_needs_ambient(tmp_path, write_doc, no_config):
    code, _ = _report(tmp_path, write_doc, no_config, WORKED, "--r", "3", "--submanifold")
    assert code == EXIT_INPUT


def test_report_space_form_adds_submanifold_verdicts(tmp_path, write_doc, no_config):
    doc = dict(WORKED, ambient={"space_form_c": 1.0})
    code, rep = _report(tmp_path, write_doc, no_config, doc, "--r", "3", "--submanifold")
    assert code == EXIT_OK
    sub = next(v for v in rep["verdicts"] if v["scope"] == "submanifold")
    assert sub["lhs"] == pytest.approx(8.0 / 3.0)
    assert sub["equality"] is True
    assert rep["invariants"]["tau_nor"] == pytest.approx(8.0 / 3.0)


def test_report_rejects_forbidden_r(tmp_path, write_doc, no_config):
    code, _ = _report(tmp_path, write_doc, no_config, WORKED, "--r", "6")
    assert code == EXIT_INPUT


@pytest.mark.parametrize("entry", [float("nan"), 1e200])
def test_report_rejects_unusable_entries(tmp_path, write_doc, no_config, entry):
    bad = dict(WORKED, n=2, zeta=[[[entry, 0], [0, 1]]])
    code, rep = _report(tmp_path, write_doc, no_config, bad, "--r", "1")
    assert code == EXIT_INPUT
    assert rep is None


def test_report_r_guard_flag(tmp_path, write_doc, no_config):
    code, rep = _report(tmp_path, write_doc, no_config, WORKED, "--r", "6.000001")
    assert code == EXIT_OK
    assert rep["metadata"]["tolerances"]["r_guard"] == 1e-9
    code, _ = _report(tmp_path, write_doc, no_config, WORKED, "--r", "6.000001", "--r-guard", "1e-6")
    assert code == EXIT_INPUT


def test_report_tolerance_flags_reach_metadata(tmp_path, write_doc, no_config):
    code, rep = _report(tmp_path, write_doc, no_config, WORKED, "--r", "3",
                        "--verdict-tol", "1e-6", "--equality-tol", "1e-5", "--gtol", "1e-9")
    assert code == EXIT_OK
    tols = rep["metadata"]["tolerances"]
    assert tols["verdict"] == 1e-6 and tols["equality"] == 1e-5
    for v in rep["verdicts"]:
        assert v["tol"] == pytest.approx(1e-6 * (1.0 + abs(v["rhs"])))
    (cls,) = rep["classification"]
    assert cls["tol"] == pytest.approx(1e-5 * (1.0 + 2.0**2))


def test_report_rejects_negative_tolerance(tmp_path, write_doc, no_config):
    code, _ = _report(tmp_path, write_doc, no_config, WORKED, "--r", "3", "--verdict-tol", "-1")
    assert code == EXIT_INPUT


def test_samples_env_turns_on_the_oracle(tmp_path, write_doc, no_config, monkeypatch):
    monkeypatch.delenv("CASORATI_SAMPLES", raising=False)
    _, rep = _report(tmp_path, write_doc, no_config, WORKED, "--r", "3")
    assert rep["metadata"]["oracle_samples"] is None
    assert rep["extremal"]["inf"]["oracle_gap"] is None

    monkeypatch.setenv("CASORATI_SAMPLES", "50")
    _, rep = _report(tmp_path, write_doc, no_config, WORKED, "--r", "3")
    assert rep["metadata"]["oracle_samples"] == 50
    assert rep["extremal"]["inf"]["oracle_gap"] >= -1e-12
    assert rep["extremal"]["sup"]["oracle_gap"] >= -1e-12


def test_report_out_dir_and_index(tmp_path, write_doc, no_config):
    doc = write_doc(WORKED, "worked.json")
    out_dir, idx = tmp_path / "out", tmp_path / "idx"
    args = no_config + ["report", str(doc), "--r", "3", "--restarts", "6", "--out-dir", str(out_dir), "--index-dir", str(idx)]
    assert main(args) == EXIT_OK
    assert main(args) == EXIT_OK
    assert (out_dir / "worked.md").exists()
    assert (out_dir / "worked.json").exists()
    rows = json.loads((idx / "report_index.json").read_text(encoding="utf-8"))
    assert len(rows) == 1
    assert rows[0]["equalities"] == ["delta_r"]


def test_report_markdown_on_stdout(write_doc, no_config, capsys):
    assert main(no_config + ["report", str(write_doc(WORKED)), "--r", "3", "--restarts", "6"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("# Casorati report: zeta")
    assert "| delta_r |" in out


# -----------------------------
# gallery / fuzz
# -----------------------------
def test_gallery_emits_tensor_document(tmp_path, no_config):
    out = tmp_path / "g.json"
    assert main(no_config + ["gallery", "equality_r", "--a", "1", "--r", "3", "--n", "3", "--q", "1", "--out", str(out)]) == 0
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["zeta"] == [[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]]]
    assert main(no_config + ["validate", str(out)]) == EXIT_OK


def test_gallery_hypersurface(tmp_path, no_config):
    out = tmp_path / "h.json"
    assert main(no_config + ["gallery", "hypersurface", "--kappa", "1", "1", "1", "--c", "0", "--out", str(out)]) == 0
    assert json.loads(out.read_text(encoding="utf-8"))["ambient"] == {"space_form_c": 0.0}


def test_gallery_rejects_bad_r(no_config):
    assert main(no_config + ["gallery", "equality_r", "--n", "3", "--r", "6"]) == EXIT_INPUT


def test_fuzz_command_writes_csv(tmp_path, no_config):
    out = tmp_path / "fuzz"
    assert main(no_config + ["fuzz", "--samples", "6", "--n-max", "3", "--q-max", "2", "--out-dir", str(out)]) == EXIT_OK
    (csv_path,) = out.glob("*.csv")
    assert csv_path.read_text(encoding="utf-8").splitlines()[0].startswith("index,n,q,r,slack")
