from __future__ import annotations

from pathlib import Path
from typing import Any, Optional

from .documents import ReportDocument


def _escape_md_cell(s: Any) -> str:
    """Escape markdown table cell content."""
    if s is None:
        return ""
    return str(s).replace("|", "\\|").strip()


def _num(x: Optional[float]) -> str:
    if x is None:
        return "-"
    return f"{x:.12g}"


def _vec(v: list[float]) -> str:
    return "(" + ", ".join(f"{x:.6g}" for x in v) + ")"


def render_md(title: str, report: ReportDocument) -> str:
    inv, ex, meta = report.invariants, report.extremal, report.metadata
    lines: list[str] = []
    lines.append(f"# Casorati report: {_escape_md_cell(title)}")
    lines.append("")
    amb = report.input.ambient
    amb_s = "none" if amb is None else (
        f"space form c={amb.space_form_c}" if amb.space_form_c is not None else f"tau~_Nor={amb.tau_tilde_nor}"
    )
    lines.append(f"- n={report.input.n}, q={report.input.q}, ambient: {amb_s}")
    lines.append(f"- seed={meta.seed}, version={meta.version}, schema={meta.schema_version}")
    if meta.k1_extension:
        lines.append("- n=2: hyperplanes are lines, C(Pi_1) uses the k=1 formula")
    lines.append("")

    lines.append("## Invariants")
    lines.append("")
    lines.append("| quantity | value |")
    lines.append("|:---|---:|")
    rows = [
        ("C", inv.casorati),
        ("tau_T", inv.tau_T),
        ("(tau_T)_Nor", inv.tau_T_nor),
        ("||trace zeta||^2", inv.trace_norm_sq),
        ("||H||^2", inv.mean_curv_sq),
        ("||sigma||^2", inv.sigma_norm_sq),
        ("tau~_Nor", inv.tau_tilde_nor),
        ("tau_Nor", inv.tau_nor),
    ]
    for name, val in rows:
        lines.append(f"| {_escape_md_cell(name)} | {_num(val)} |")
    lines.append(f"| Ric_T(e_i) | {_vec(inv.ricci)} |")
    lines.append("")

    lines.append("## Hyperplane extrema")
    lines.append("")
    lines.append("| mode | C(Pi) | normal | restarts | multiplicity | oracle gap |")
    lines.append("|:---:|---:|:---|---:|---:|---:|")
    for e in (ex.inf, ex.sup):
        lines.append(
            f"| {e.mode} | {_num(e.value)} | {_vec(e.normal)} | {e.restarts} | {e.multiplicity} | {_num(e.oracle_gap)} |"
        )
    lines.append("")

    if report.deltas:
        lines.append("## delta-Casorati curvatures")
        lines.append("")
        lines.append("| variant | r | a(r) | value | note |")
        lines.append("|:---|---:|---:|---:|:---|")
        for d in report.deltas:
            note = "legacy coefficient, not verified" if d.legacy else ""
            lines.append(f"| {d.variant} | {_num(d.r)} | {_num(d.a_of_r)} | {_num(d.delta)} | {note} |")
        lines.append("")

    if report.verdicts:
        lines.append("## Verdicts")
        lines.append("")
        lines.append("| scope | variant | r | lhs | rhs | slack | holds | equality |")
        lines.append("|:---|:---|---:|---:|---:|---:|:---:|:---:|")
        for v in report.verdicts:
            r = v.r_used if isinstance(v.r_used, str) else _num(v.r_used)
            lines.append(
                f"| {v.scope} | {v.variant} | {r} | {_num(v.lhs)} | {_num(v.rhs)} | {_num(v.slack)} "
                f"| {'yes' if v.holds else 'NO'} | {'yes' if v.equality else 'no'} |"
            )
        lines.append("")

    if report.classification:
        lines.append("## Equality configuration")
        lines.append("")
        lines.append("| r | equality shape | axis | frame | off-diag max | ratio defect | a | max commutator |")
        lines.append("|---:|:---:|---:|:---|---:|---:|---:|---:|")
        for c in report.classification:
            lines.append(
                f"| {_num(c.r)} | {'yes' if c.is_equality_configuration else 'no'} | e_{c.distinguished_axis} "
                f"| {c.frame} | {_num(c.offdiag_max)} | {_num(max(c.ratio_defects))} | {_num(c.a_value)} "
                f"| {_num(c.commutator_max)} |"
            )
        lines.append("")

    return "\n".join(lines)


def write_outputs(base_dir: Path, stem: str, report: ReportDocument) -> tuple[Path, Path]:
    base_dir.mkdir(parents=True, exist_ok=True)
    md_path = base_dir / f"{stem}.md"
    json_path = base_dir / f"{stem}.json"

    md_path.write_text(render_md(stem, report), encoding="utf-8")
    json_path.write_text(report.to_json(), encoding="utf-8")

    return md_path, json_path
