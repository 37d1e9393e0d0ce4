"""
JSON documents read and written by the CLI.

Tensor document:
  {"n": int, "q": int,
   "ambient": null | {"space_form_c": float} | {"tau_tilde_nor": float},
   "zeta": [[[float]]],                # [alpha][i][j]
   "T": [[[[float]]]] (optional),      # curvature-like tensor to validate
   "optimizer": {...} (optional)}

Report floats are written as the shortest repr that reads back to the same
double (at most 17 significant digits), keys sorted.
"""
from __future__ import annotations

import json
from typing import Any, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import __version__
from .config import OptimizerConfig, Tolerances
from .delta_casorati import DeltaFamily
from .extremizer import ExtremalResult, HyperplaneExtrema
from .frame_core import (
    ASYMMETRY_REJECT,
    AmbientScalar,
    BundleSymTensor,
    CurvatureTensor,
    GeometrySetup,
    SpaceForm,
)
from .inequality_lab import EqualityClassification, InequalityVerdict
from .invariants import InvariantBundle


SCHEMA_VERSION = 1


class AmbientDoc(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    space_form_c: Optional[float] = None
    tau_tilde_nor: Optional[float] = None

    @model_validator(mode="after")
    def _exactly_one(self) -> "AmbientDoc":
        if (self.space_form_c is None) == (self.tau_tilde_nor is None):
            raise ValueError("ambient needs exactly one of space_form_c, tau_tilde_nor")
        return self

    def to_ambient(self) -> Union[SpaceForm, AmbientScalar]:
        if self.space_form_c is not None:
            return SpaceForm(self.space_form_c)
        return AmbientScalar(self.tau_tilde_nor)

    @classmethod
    def from_ambient(cls, ambient) -> Optional["AmbientDoc"]:
        if ambient is None:
            return None
        if isinstance(ambient, SpaceForm):
            return cls(space_form_c=float(ambient.c))
        return cls(tau_tilde_nor=float(ambient.tau_tilde_nor_value))


class TensorDocument(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    n: int
    q: int
    ambient: Optional[AmbientDoc] = None
    zeta: list[list[list[float]]]
    T: Optional[list[list[list[list[float]]]]] = None
    optimizer: Optional[OptimizerConfig] = None

    def setup(self) -> GeometrySetup:
        return GeometrySetup(self.n, self.q, self.ambient.to_ambient() if self.ambient else None)

    def to_tensor(self, reject: float = ASYMMETRY_REJECT) -> BundleSymTensor:
        return BundleSymTensor.from_components(self.setup(), self.zeta, reject)

    def curvature(self) -> Optional[CurvatureTensor]:
        return CurvatureTensor(self.setup(), self.T) if self.T is not None else None

    @classmethod
    def from_tensor(
        cls,
        zeta: BundleSymTensor,
        T: Optional[CurvatureTensor] = None,
        optimizer: Optional[OptimizerConfig] = None,
    ) -> "TensorDocument":
        return cls(
            n=zeta.n,
            q=zeta.q,
            ambient=AmbientDoc.from_ambient(zeta.setup.ambient),
            zeta=zeta.comps.tolist(),
            T=T.comps.tolist() if T is not None else None,
            optimizer=optimizer,
        )


# -----------------------------
# Report
# -----------------------------
class InvariantsDoc(BaseModel):
    tau_T: float
    tau_T_nor: float
    ricci: list[float]
    casorati: float
    trace_norm_sq: float
    mean_curv_sq: float
    sigma_norm_sq: float
    tau_tilde_nor: Optional[float] = None
    tau_nor: Optional[float] = None
    gauss_identity_defect: Optional[float] = None

    @classmethod
    def from_bundle(cls, b: InvariantBundle) -> "InvariantsDoc":
        return cls(
            tau_T=b.tau_T,
            tau_T_nor=b.tau_T_nor,
            ricci=[float(x) for x in b.ricci],
            casorati=b.casorati,
            trace_norm_sq=b.trace_norm_sq,
            mean_curv_sq=b.mean_curv_sq,
            sigma_norm_sq=b.sigma_norm_sq,
            tau_tilde_nor=b.tau_tilde_nor,
            tau_nor=b.tau_nor,
            gauss_identity_defect=b.gauss_identity_defect,
        )


class ExtremalDoc(BaseModel):
    mode: str
    value: float
    normal: list[float]
    restarts: int
    iterations: int
    candidates: int
    multiplicity: int
    hit_max_iter: int
    oracle_value: Optional[float] = None
    oracle_gap: Optional[float] = None
    line_extension: bool = False

    @classmethod
    def from_result(cls, res: ExtremalResult) -> "ExtremalDoc":
        d = res.diagnostics
        return cls(
            mode=res.mode.value,
            value=res.value,
            normal=[float(x) for x in res.argmin_or_argmax.normal],
            restarts=d.restarts,
            iterations=d.iterations,
            candidates=d.candidates,
            multiplicity=d.multiplicity,
            hit_max_iter=d.hit_max_iter,
            oracle_value=d.oracle_value,
            oracle_gap=d.oracle_gap,
            line_extension=res.line_extension,
        )


class ExtremaDoc(BaseModel):
    inf: ExtremalDoc
    sup: ExtremalDoc

    @classmethod
    def from_extrema(cls, ex: HyperplaneExtrema) -> "ExtremaDoc":
        return cls(inf=ExtremalDoc.from_result(ex.inf), sup=ExtremalDoc.from_result(ex.sup))


class DeltaDoc(BaseModel):
    variant: str
    delta: float
    r: Optional[float] = None
    a_of_r: Optional[float] = None
    legacy: bool = False

    @classmethod
    def from_family(cls, f: DeltaFamily) -> "DeltaDoc":
        return cls(variant=f.variant.value, delta=f.delta, r=f.r, a_of_r=f.a_of_r, legacy=f.legacy)


class VerdictDoc(BaseModel):
    scope: str  # algebraic | submanifold
    variant: str
    lhs: float
    rhs: float
    slack: float
    holds: bool
    equality: bool
    r_used: Union[float, str]
    tol: float
    ambient_shift: float = 0.0

    @classmethod
    def from_verdict(cls, v: InequalityVerdict, scope: str) -> "VerdictDoc":
        return cls(
            scope=scope,
            variant=v.variant,
            lhs=v.lhs,
            rhs=v.rhs,
            slack=v.slack,
            holds=v.holds,
            equality=v.equality,
            r_used=v.r_used,
            tol=v.tol,
            ambient_shift=v.ambient_shift,
        )


class ClassificationDoc(BaseModel):
    r: float
    is_equality_configuration: bool
    offdiag_max: float
    ratio_defects: list[float]
    ratio: float
    commutator_max: float
    distinguished_axis: int
    distinguished_direction: list[float]
    frame: str
    a_value: float
    bundle_residual: float
    single_slice: bool
    tol: float

    @classmethod
    def from_classification(cls, r: float, c: EqualityClassification) -> "ClassificationDoc":
        return cls(
            r=float(r),
            is_equality_configuration=c.is_equality_configuration,
            offdiag_max=c.offdiag_max,
            ratio_defects=list(c.ratio_defects),
            ratio=c.ratio,
            commutator_max=c.commutator_max,
            distinguished_axis=c.distinguished_axis,
            distinguished_direction=[float(x) for x in c.distinguished_direction],
            frame=c.frame,
            a_value=c.a_value,
            bundle_residual=c.bundle_residual,
            single_slice=c.single_slice,
            tol=c.tol,
        )


class MetadataDoc(BaseModel):
    version: str = __version__
    schema_version: int = SCHEMA_VERSION
    seed: int
    restarts: Optional[int] = None
    oracle_samples: Optional[int] = None
    tolerances: Tolerances = Field(default_factory=Tolerances)
    k1_extension: bool = False   # n = 2: hyperplanes are lines


class ReportDocument(BaseModel):
    input: TensorDocument
    invariants: InvariantsDoc
    extremal: ExtremaDoc
    deltas: list[DeltaDoc] = Field(default_factory=list)
    verdicts: list[VerdictDoc] = Field(default_factory=list)
    classification: list[ClassificationDoc] = Field(default_factory=list)
    metadata: MetadataDoc

    def to_json(self) -> str:
        return dumps(self.model_dump(mode="json"))


def dumps(payload: Any) -> str:
    """Sorted keys, shortest round-trip floats, no NaN/inf, trailing newline."""
    return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True, allow_nan=False) + "\n"
