# src/run.py
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from . import __version__
from .config import FuzzDefaults, LabConfig, OptimizerConfig, Tolerances, load_config
from .datastore import upsert_report_index, write_campaign_csv
from .delta_casorati import Variant, delta_r, delta_variant
from .documents import (
    ClassificationDoc,
    DeltaDoc,
    ExtremaDoc,
    InvariantsDoc,
    MetadataDoc,
    ReportDocument,
    TensorDocument,
    VerdictDoc,
    dumps,
)
from .extremizer import hyperplane_extrema
from .frame_core import GeometrySetup, SpaceForm, gauss_defect, validate_curvature_like
from .gallery import GallerySpec, Kind, generate, hypersurface_from_principal_curvatures
from .inequality_lab import (
    FIXED_R,
    classify_equality,
    fuzz_campaign,
    verify_algebraic,
    verify_fixed,
    verify_submanifold,
)
from .invariants import submanifold_relations
from .renderer import render_md, write_outputs
from .utils import AsymmetryError, LabError, MissingAmbientError, log, tick


EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


# -----------------------------
# Input helpers
# -----------------------------
def load_document(path: Path) -> TensorDocument:
    """Raises OSError / pydantic ValidationError (covers malformed JSON)."""
    return TensorDocument.model_validate_json(Path(path).read_text(encoding="utf-8"))


def _flags(args: argparse.Namespace, names: dict[str, str]) -> dict:
    return {key: getattr(args, attr) for key, attr in names.items() if getattr(args, attr, None) is not None}


def _optimizer(cfg: LabConfig, doc: TensorDocument, args: argparse.Namespace) -> OptimizerConfig:
    """lab.yaml + env < tensor document block < command-line flags."""
    base = cfg.optimizer.model_dump()
    if doc.optimizer is not None:
        base.update(doc.optimizer.model_dump(exclude_unset=True))
    base.update(_flags(args, {"seed": "seed", "restarts": "restarts", "samples": "oracle_samples", "gtol": "gtol"}))
    return OptimizerConfig(**base)


TOLERANCE_FLAGS = {
    "curvature_like": "tol",
    "symmetry_reject": "symmetry_tol",
    "verdict": "verdict_tol",
    "equality": "equality_tol",
    "r_guard": "r_guard",
}


def _tolerances(cfg: LabConfig, args: argparse.Namespace) -> LabConfig:
    tols = Tolerances(**{**cfg.tolerances.model_dump(), **_flags(args, TOLERANCE_FLAGS)})
    return cfg.model_copy(update={"tolerances": tols})


# -----------------------------
# validate
# -----------------------------
def cmd_validate(args: argparse.Namespace) -> int:
    try:
        cfg = _tolerances(load_config(args.config), args)
        doc = load_document(args.file)
        zeta = doc.to_tensor(cfg.tolerances.symmetry_reject)
        T = doc.curvature()
    except AsymmetryError as e:
        log(f"[FAIL] {args.file}: {e}")
        return EXIT_FAIL
    except (OSError, ValidationError, LabError) as e:
        log(f"[ERROR] {args.file}: {e}")
        return EXIT_INPUT

    log(f"[OK] zeta well-formed: n={zeta.n} q={zeta.q} asymmetry={zeta.asymmetry:.3g}")
    if T is None:
        return EXIT_OK

    violations = validate_curvature_like(T, cfg.tolerances.curvature_like)
    for v in violations:
        i, j, k, l = v.where
        log(f"[FAIL] {v.family}: max violation {v.max_violation:.3g} at (i={i}, j={j}, k={k}, l={l})")
    log(f"[INFO] Gauss defect |T - T(zeta)|_max = {gauss_defect(T, zeta):.3g}")
    if violations:
        return EXIT_FAIL
    log("[OK] T is curvature-like")
    return EXIT_OK


# -----------------------------
# report
# -----------------------------
def build_report(
    doc: TensorDocument,
    cfg: LabConfig,
    opt: OptimizerConfig,
    r_values: Sequence[float],
    variants: Sequence[str],
    submanifold: bool = False,
) -> ReportDocument:
    tols = cfg.tolerances
    zeta = doc.to_tensor(tols.symmetry_reject)
    if submanifold and zeta.setup.ambient is None:
        raise MissingAmbientError("--submanifold needs an ambient block in the tensor document")
    with_ambient = zeta.setup.ambient is not None

    log(f"[STEP] invariants (n={zeta.n}, q={zeta.q}) ...")
    bundle = submanifold_relations(zeta)

    log(f"[STEP] hyperplane extrema (restarts={opt.restarts_for(zeta.n)}, seed={opt.seed}) ...")
    t1 = tick()
    ex = hyperplane_extrema(zeta, opt, oracle_samples=opt.samples)
    log(f"[DONE] inf={ex.inf.value:.12g} sup={ex.sup.value:.12g} in {(tick() - t1):.2f}s")

    deltas: list[DeltaDoc] = []
    verdicts: list[VerdictDoc] = []
    class_r: list[float] = []

    for r in r_values:
        deltas.append(DeltaDoc.from_family(delta_r(zeta, r, extrema=ex, guard=tols.r_guard)))
        v = verify_algebraic(zeta, r, extrema=ex, rel_tol=tols.verdict, guard=tols.r_guard)
        verdicts.append(VerdictDoc.from_verdict(v, "algebraic"))
        if with_ambient:
            v = verify_submanifold(zeta, r=r, extrema=ex, rel_tol=tols.verdict, guard=tols.r_guard)
            verdicts.append(VerdictDoc.from_verdict(v, "submanifold"))
        class_r.append(float(r))

    for name in variants:
        variant = Variant(name)
        deltas.append(DeltaDoc.from_family(delta_variant(zeta, variant, extrema=ex)))
        if variant not in FIXED_R:
            continue  # legacy coefficient: reported only
        verdicts.append(VerdictDoc.from_verdict(verify_fixed(zeta, variant, extrema=ex, rel_tol=tols.verdict), "algebraic"))
        if with_ambient:
            v = verify_submanifold(zeta, variant=variant, extrema=ex, rel_tol=tols.verdict)
            verdicts.append(VerdictDoc.from_verdict(v, "submanifold"))
        r_fixed = FIXED_R[variant](zeta.n)
        if r_fixed not in class_r:
            class_r.append(r_fixed)

    classification = [
        ClassificationDoc.from_classification(r, classify_equality(zeta, r, rel_tol=tols.equality, guard=tols.r_guard))
        for r in class_r
    ]

    return ReportDocument(
        input=doc,
        invariants=InvariantsDoc.from_bundle(bundle),
        extremal=ExtremaDoc.from_extrema(ex),
        deltas=deltas,
        verdicts=verdicts,
        classification=classification,
        metadata=MetadataDoc(
            version=__version__,
            seed=opt.seed,
            restarts=opt.restarts_for(zeta.n),
            oracle_samples=opt.samples,
            tolerances=tols,
            k1_extension=(zeta.n == 2),
        ),
    )


def cmd_report(args: argparse.Namespace) -> int:
    t0 = tick()
    try:
        cfg = _tolerances(load_config(args.config), args)
        doc = load_document(args.file)
        opt = _optimizer(cfg, doc, args)
        variants = list(args.variant or [])
        if not args.r and not variants:
            variants = list(cfg.report.variants)
        report = build_report(doc, cfg, opt, args.r or [], variants, submanifold=args.submanifold)
    except (OSError, ValidationError, LabError) as e:
        log(f"[ERROR] {args.file}: {e}")
        return EXIT_INPUT

    stem = Path(args.file).stem
    if args.json:
        out = Path(args.json)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(report.to_json(), encoding="utf-8")
        log(f"[OK] Wrote report JSON: {out}")
    if args.out_dir:
        md_path, json_path = write_outputs(Path(args.out_dir), stem, report)
        log(f"[OK] Wrote outputs: {md_path}, {json_path}")
        if args.index_dir:
            p = upsert_report_index(Path(args.index_dir), report, json_path)
            log(f"[OK] Upserted report index: {p}")
    elif args.index_dir:
        p = upsert_report_index(Path(args.index_dir), report)
        log(f"[OK] Upserted report index: {p}")
    if not args.json and not args.out_dir:
        sys.stdout.write(render_md(stem, report) + "\n")

    failed = [v for v in report.verdicts if not v.holds]
    for v in failed:
        log(f"[FAIL] {v.scope} {v.variant} r={v.r_used}: slack={v.slack:.3g} < -{v.tol:.3g}")
    log(f"[DONE] total {(tick() - t0):.1f}s")
    return EXIT_FAIL if failed else EXIT_OK


# -----------------------------
# gallery
# -----------------------------
def cmd_gallery(args: argparse.Namespace) -> int:
    try:
        if args.kind == "hypersurface":
            if not args.kappa:
                raise LabError("hypersurface needs --kappa")
            point = hypersurface_from_principal_curvatures(args.kappa, args.c if args.c is not None else 0.0)
            zeta = point.zeta
            log(f"[INFO] expected C={point.casorati:.12g} tau_Nor={point.tau_nor:.12g}")
        else:
            ambient = SpaceForm(args.c) if args.c is not None else None
            setup = GeometrySetup(args.n, args.q, ambient)
            zeta = generate(GallerySpec(Kind(args.kind), setup, a=args.a, r=args.r, seed=args.seed, scale=args.scale))
    except LabError as e:
        log(f"[ERROR] gallery {args.kind}: {e}")
        return EXIT_INPUT

    text = dumps(TensorDocument.from_tensor(zeta).model_dump(mode="json", exclude_none=True))
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        log(f"[OK] Wrote tensor document: {out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -----------------------------
# fuzz
# -----------------------------
def cmd_fuzz(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    updates = {
        k: v
        for k, v in {"samples": args.samples, "seed": args.seed, "n_max": args.n_max, "q_max": args.q_max}.items()
        if v is not None
    }
    try:
        fuzz = FuzzDefaults(**{**cfg.fuzz.model_dump(), **updates})
        opt = OptimizerConfig(**{**cfg.optimizer.model_dump(), **_flags(args, {"workers": "workers"})})
    except ValidationError as e:
        log(f"[ERROR] fuzz options: {e}")
        return EXIT_INPUT

    oracle = args.oracle_samples if args.oracle_samples is not None else opt.samples
    summary = fuzz_campaign(fuzz, opt, oracle_samples=oracle)
    p = write_campaign_csv(Path(args.out_dir), f"fuzz_seed{fuzz.seed}_n{fuzz.samples}", summary.records)
    log(f"[OK] Wrote campaign CSV: {p}")
    if summary.violations:
        log(f"[FAIL] {summary.violations} violated verdicts (worst slack {summary.worst_slack:.3g})")
        return EXIT_FAIL
    return EXIT_OK


# -----------------------------
# Entry point
# -----------------------------
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="python -m src.run", description="Algebraic Casorati curvature lab")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--config", type=Path, default=None, help="lab.yaml (default: config/lab.yaml)")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check zeta (and an optional T block)")
    v.add_argument("file", type=Path)
    v.add_argument("--tol", type=float, default=None, help="curvature-like tolerance (default 1e-12)")
    v.add_argument("--symmetry-tol", type=float, default=None, help="reject zeta above this asymmetry (default 1e-9)")
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("report", help="invariants, extrema, delta-Casorati curvatures and verdicts")
    r.add_argument("file", type=Path)
    r.add_argument("--r", type=float, action="append", help="r for delta(r; n-1) / delta^(r; n-1); repeatable")
    r.add_argument("--variant", action="append", choices=[x.value for x in Variant if x not in (Variant.DELTA_R, Variant.DELTA_HAT_R)])
    r.add_argument("--oracle-samples", type=int, default=None, help="cross-check the extrema by sampling")
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--restarts", type=int, default=None)
    r.add_argument("--gtol", type=float, default=None, help="optimizer gradient tolerance")
    r.add_argument("--verdict-tol", type=float, default=None)
    r.add_argument("--equality-tol", type=float, default=None)
    r.add_argument("--r-guard", type=float, default=None, help="relative exclusion band around r = n(n-1)")
    r.add_argument("--symmetry-tol", type=float, default=None)
    r.add_argument("--submanifold", action="store_true", help="require ambient data and add submanifold verdicts")
    r.add_argument("--json", default=None, help="write the JSON report here")
    r.add_argument("--out-dir", default=None, help="write <stem>.md and <stem>.json here")
    r.add_argument("--index-dir", default=None, help="upsert report_index.json here")
    r.set_defaults(func=cmd_report)

    g = sub.add_parser("gallery", help="emit a distinguished configuration as a tensor document")
    g.add_argument("kind", choices=[k.value for k in Kind] + ["hypersurface"])
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--q", type=int, default=1)
    g.add_argument("--a", type=float, default=1.0)
    g.add_argument("--r", type=float, default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--scale", type=float, default=1.0)
    g.add_argument("--c", type=float, default=None, help="space-form curvature of the ambient")
    g.add_argument("--kappa", type=float, nargs="+", default=None, help="principal curvatures (hypersurface)")
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gallery)

    f = sub.add_parser("fuzz", help="random soundness campaign for the algebraic inequalities")
    f.add_argument("--samples", type=int, default=None)
    f.add_argument("--seed", type=int, default=None)
    f.add_argument("--n-max", type=int, default=None)
    f.add_argument("--q-max", type=int, default=None)
    f.add_argument("--workers", type=int, default=None)
    f.add_argument("--oracle-samples", type=int, default=None)
    f.add_argument("--out-dir", default="outputs/fuzz")
    f.set_defaults(func=cmd_fuzz)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    log(f"[BOOT] src.run {args.command} (v{__version__})")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
