from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import asdict
from pathlib import Path
from typing import Any, Iterable

from .documents import ReportDocument, TensorDocument, dumps
from .inequality_lab import FuzzRecord


CAMPAIGN_FIELDS = ["index", "n", "q", "r", "slack", "holds", "P", "oracle_gap_inf", "oracle_gap_sup"]


def _ensure_dir(p: Path) -> None:
    p.mkdir(parents=True, exist_ok=True)


def uid_from_input(doc: TensorDocument) -> str:
    """sha1 of the canonical tensor JSON; same tensor, same key."""
    return hashlib.sha1(dumps(doc.model_dump(mode="json")).encode("utf-8")).hexdigest()


def write_campaign_csv(out_dir: Path, stem: str, records: Iterable[FuzzRecord]) -> Path:
    """One row per (sample, r) of a fuzz campaign."""
    _ensure_dir(out_dir)
    p = out_dir / f"{stem}.csv"
    with p.open("w", newline="", encoding="utf-8") as f:
        w = csv.DictWriter(f, fieldnames=CAMPAIGN_FIELDS)
        w.writeheader()
        for rec in records:
            row = asdict(rec)
            w.writerow({k: ("" if row[k] is None else repr(row[k])) for k in CAMPAIGN_FIELDS})
    return p


def read_campaign_csv(path: Path) -> list[dict[str, str]]:
    with path.open("r", newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def upsert_report_index(data_dir: Path, report: ReportDocument, report_path: Path | None = None) -> Path:
    """
    data_dir/report_index.json keeps one summary row per input tensor
    key = uid(sha1(canonical input)); a rerun replaces the row.
    """
    _ensure_dir(data_dir)
    p = data_dir / "report_index.json"

    existing: dict[str, dict[str, Any]] = {}
    if p.exists():
        data = json.loads(p.read_text(encoding="utf-8"))
        if isinstance(data, list):
            for row in data:
                uid = row.get("uid")
                if uid:
                    existing[uid] = row

    uid = uid_from_input(report.input)
    existing[uid] = {
        "uid": uid,
        "n": report.input.n,
        "q": report.input.q,
        "casorati": report.invariants.casorati,
        "tau_T_nor": report.invariants.tau_T_nor,
        "inf": report.extremal.inf.value,
        "sup": report.extremal.sup.value,
        "all_hold": all(v.holds for v in report.verdicts),
        "equalities": sorted({v.variant for v in report.verdicts if v.equality}),
        "seed": report.metadata.seed,
        "report": str(report_path) if report_path is not None else "",
    }

    rows = sorted(existing.values(), key=lambda x: (x.get("n", 0), x.get("q", 0), x.get("uid", "")))
    p.write_text(dumps(rows), encoding="utf-8")
    return p
