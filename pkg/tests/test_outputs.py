from __future__ import annotations

import json

import pytest

from src.config import LabConfig
from src.datastore import read_campaign_csv, uid_from_input, upsert_report_index, write_campaign_csv
from src.documents import TensorDocument
from src.frame_core import SpaceForm
from src.inequality_lab import FuzzRecord
from src.renderer import _escape_md_cell, render_md, write_outputs
from src.run import build_report

from .conftest import FAST, diag_zeta


@pytest.fixture
def worked_report(worked):
    return build_report(TensorDocument.from_tensor(worked), LabConfig(), FAST, [3.0], ["delta_prime_n_minus_1"])


def test_escape_md_cell():
    assert _escape_md_cell(" a|b ") == "a\\|b"
    assert _escape_md_cell(None) == ""


def test_render_md_sections(worked_report):
    md = render_md("worked", worked_report)
    assert md.startswith("# Casorati report: worked\n")
    for heading in ("## Invariants", "## Hyperplane extrema", "## delta-Casorati curvatures", "## Verdicts", "## Equality configuration"):
        assert heading in md
    assert "legacy coefficient, not verified" in md
    assert "| algebraic | delta_r | 3 |" in md
    assert "| NO |" not in md


def test_render_md_flags_line_extension():
    doc = TensorDocument.from_tensor(diag_zeta([1.0, 2.0]))
    md = render_md("plane", build_report(doc, LabConfig(), FAST, [1.0], []))
    assert "k=1 formula" in md


def test_write_outputs(tmp_path, worked_report):
    md_path, json_path = write_outputs(tmp_path / "out", "worked", worked_report)
    assert md_path.name == "worked.md" and json_path.name == "worked.json"
    assert json.loads(json_path.read_text(encoding="utf-8"))["input"]["n"] == 3
    assert md_path.read_text(encoding="utf-8") == render_md("worked", worked_report)


def test_campaign_csv(tmp_path):
    records = [
        FuzzRecord(0, 3, 1, 1.5, 0.25, True, 1.5),
        FuzzRecord(1, 4, 2, 6.0, 1e-3, True, 0.012, oracle_gap_inf=0.0, oracle_gap_sup=1e-7),
    ]
    p = write_campaign_csv(tmp_path / "fuzz", "c", records)
    rows = read_campaign_csv(p)
    assert len(rows) == 2
    assert rows[0]["oracle_gap_inf"] == ""
    assert float(rows[1]["slack"]) == 1e-3
    assert rows[1]["holds"] == "True"


def test_report_index_upserts_by_input(tmp_path, worked_report):
    upsert_report_index(tmp_path, worked_report)
    upsert_report_index(tmp_path, worked_report, tmp_path / "worked.json")

    other = build_report(
        TensorDocument.from_tensor(diag_zeta([1.0, 1.0, 1.0], ambient=SpaceForm(1.0))), LabConfig(), FAST, [3.0], []
    )
    p = upsert_report_index(tmp_path, other)
    rows = json.loads(p.read_text(encoding="utf-8"))
    assert len(rows) == 2
    by_uid = {row["uid"]: row for row in rows}
    assert by_uid[uid_from_input(worked_report.input)]["report"].endswith("worked.json")
    assert by_uid[uid_from_input(other.input)]["all_hold"] is True


def test_uid_depends_on_tensor_only(worked):
    a = TensorDocument.from_tensor(worked)
    b = TensorDocument.model_validate_json(a.model_dump_json())
    assert uid_from_input(a) == uid_from_input(b)
    assert uid_from_input(a) != uid_from_input(TensorDocument.from_tensor(diag_zeta([1.0, 1.0, 2.5])))
