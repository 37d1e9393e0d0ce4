"""Casorati inequalities at a point, their equality cases and the soundness campaign."""
from __future__ import annotations

import multiprocessing as mp
from dataclasses import dataclass
from functools import partial
from typing import Optional, Sequence, Union

import numpy as np
from scipy.linalg import null_space

from .config import FuzzDefaults, OptimizerConfig
from .delta_casorati import (
    R_GUARD,
    Variant,
    a_coeff,
    check_r,
    delta_r,
    delta_variant,
)
from .extremizer import Hyperplane, HyperplaneExtrema, casorati_of_normal, hyperplane_extrema
from .frame_core import BundleSymTensor, GeometrySetup, commutator_max, gauss_tensor, shape_operators
from .gallery import GallerySpec, Kind, generate
from .invariants import casorati, normalized_scalar, submanifold_relations
from .quadratic_lemma import f_eval, per_alpha_problem
from .utils import DomainError, MissingAmbientError, log, one_based, tick


VERDICT_TOL = 1e-9
EQUALITY_TOL = 1e-8
TIE_TOL = 1e-12

FIXED_R = {
    Variant.DELTA: lambda n: n * (n - 1) / 2.0,
    Variant.DELTA_HAT: lambda n: 2.0 * n * (n - 1),
}


@dataclass(frozen=True)
class InequalityVerdict:
    variant: str
    lhs: float
    rhs: float
    slack: float
    holds: bool
    equality: bool
    r_used: Union[float, str]   # r, or "fixed" for delta(n-1) / delta^(n-1)
    tol: float
    ambient_shift: float = 0.0


def _verdict(
    variant: str,
    lhs: float,
    rhs: float,
    r_used,
    tol: Optional[float],
    shift: float = 0.0,
    rel_tol: float = VERDICT_TOL,
) -> InequalityVerdict:
    t = tol if tol is not None else rel_tol * (1.0 + abs(rhs))
    slack = rhs - lhs
    return InequalityVerdict(variant, lhs, rhs, slack, slack >= -t, abs(slack) <= t, r_used, t, shift)


def verify_algebraic(
    zeta: BundleSymTensor,
    r: float,
    cfg: Optional[OptimizerConfig] = None,
    extrema: Optional[HyperplaneExtrema] = None,
    tol: Optional[float] = None,
    rel_tol: float = VERDICT_TOL,
    guard: float = R_GUARD,
) -> InequalityVerdict:
    n = zeta.n
    fam = delta_r(zeta, r, cfg, extrema, guard)
    lhs = normalized_scalar(gauss_tensor(zeta))
    return _verdict(fam.variant.value, lhs, fam.delta / (n * (n - 1)), float(r), tol, rel_tol=rel_tol)


def verify_fixed(
    zeta: BundleSymTensor,
    variant: Variant | str,
    cfg: Optional[OptimizerConfig] = None,
    extrema: Optional[HyperplaneExtrema] = None,
    tol: Optional[float] = None,
    rel_tol: float = VERDICT_TOL,
) -> InequalityVerdict:
    variant = Variant(variant)
    if variant not in FIXED_R:
        raise DomainError(f"{variant.value} is not a verified fixed-coefficient variant")
    fam = delta_variant(zeta, variant, cfg, extrema)
    lhs = normalized_scalar(gauss_tensor(zeta))
    return _verdict(variant.value, lhs, fam.delta, "fixed", tol, rel_tol=rel_tol)


def verify_submanifold(
    zeta: BundleSymTensor,
    r: Optional[float] = None,
    variant: Optional[Variant | str] = None,
    cfg: Optional[OptimizerConfig] = None,
    extrema: Optional[HyperplaneExtrema] = None,
    tol: Optional[float] = None,
    rel_tol: float = VERDICT_TOL,
    guard: float = R_GUARD,
) -> InequalityVerdict:
    """tau_Nor(p) <= (normalized delta) + tau~_Nor(T_pM)."""
    ambient = zeta.setup.ambient
    if ambient is None:
        raise MissingAmbientError("submanifold verdict needs an ambient (space form c or tau~_Nor)")
    if (r is None) == (variant is None):
        raise DomainError("give exactly one of r or variant")
    base = (
        verify_algebraic(zeta, r, cfg, extrema, tol, rel_tol, guard)
        if r is not None
        else verify_fixed(zeta, variant, cfg, extrema, tol, rel_tol)
    )
    shift = ambient.tau_tilde_nor(zeta.n)
    return _verdict(base.variant, base.lhs + shift, base.rhs + shift, base.r_used, base.tol, shift)


# -----------------------------
# Equality cases
# -----------------------------
@dataclass(frozen=True, eq=False)
class EqualityClassification:
    offdiag_max: float
    ratio_defects: tuple[float, ...]          # per alpha
    commutator_max: float
    is_equality_configuration: bool
    distinguished_axis: int                   # 1-based, within `frame`
    distinguished_direction: np.ndarray
    frame: str                                # coordinate | eigenbasis
    a_value: float
    bundle_residual: float
    ratio: float                              # r / (n(n-1))
    tol: float

    @property
    def single_slice(self) -> bool:
        """At most one nonzero shape operator after a bundle rotation."""
        return self.bundle_residual <= self.tol


def equality_ratio(n: int, r: float, guard: float = R_GUARD) -> float:
    return check_r(n, r, guard) / (n * (n - 1))


def _candidate_frames(zeta: BundleSymTensor) -> list[tuple[str, np.ndarray]]:
    S = np.einsum("aij,ajk->ik", zeta.comps, zeta.comps)
    _, V = np.linalg.eigh(S)
    return [("coordinate", np.eye(zeta.n)), ("eigenbasis", V)]


def classify_equality(
    zeta: BundleSymTensor,
    r: float,
    tol: Optional[float] = None,
    rel_tol: float = EQUALITY_TOL,
    guard: float = R_GUARD,
) -> EqualityClassification:
    """
    Search the coordinate frame and the eigenframe of sum (zeta^alpha)^2, and every
    axis of each, for zeta_ij = 0 (i != j) and zeta_ii = r/(n(n-1)) zeta_dd (i != d).
    """
    n, q = zeta.n, zeta.q
    rho = equality_ratio(n, r, guard)
    t = tol if tol is not None else rel_tol * (1.0 + zeta.max_abs() ** 2)

    scored = []
    for name, V in _candidate_frames(zeta):
        Zf = np.einsum("ia,xij,jb->xab", V, zeta.comps, V)
        off = np.abs(Zf - np.einsum("xii->xi", Zf)[:, :, None] * np.eye(n))
        off_max = float(off.max())
        D = np.einsum("xii->xi", Zf)
        for d in range(n):
            others = np.delete(D, d, axis=1)
            defects = np.max(np.abs(others - rho * D[:, [d]]), axis=1)
            scored.append((max(off_max, float(defects.max())), name, V, Zf, d, off_max, defects))

    # roundoff ties go to the coordinate frame, then to the lowest axis
    lowest = min(s[0] for s in scored)
    _, name, V, Zf, d, off_max, defects = next(s for s in scored if s[0] <= lowest + TIE_TOL * (1.0 + lowest))

    # bundle rotation: largest slice absorbs the configuration
    _, s, Vt = np.linalg.svd(Zf.reshape(q, n * n), full_matrices=False)
    principal = (s[0] * Vt[0]).reshape(n, n)
    ref = principal[d, d] if abs(principal[d, d]) > 0 else np.trace(principal)
    if ref < 0:
        principal = -principal
    a_value = float(np.mean(np.delete(np.diag(principal), d))) if n > 1 else 0.0
    residual = float(np.sqrt(np.sum(s[1:] ** 2)))

    return EqualityClassification(
        offdiag_max=off_max,
        ratio_defects=tuple(float(x) for x in defects),
        commutator_max=commutator_max(shape_operators(zeta)),
        is_equality_configuration=bool(off_max <= t and float(defects.max()) <= t),
        distinguished_axis=one_based(d),
        distinguished_direction=V[:, d].copy(),
        frame=name,
        a_value=a_value,
        bundle_residual=residual,
        ratio=rho,
        tol=t,
    )


# -----------------------------
# Proof quantities
# -----------------------------
def proof_quantity(zeta: BundleSymTensor, r: float, u: np.ndarray, tau_T: Optional[float] = None) -> float:
    """P = r C + a(r) C(u^perp) - 2 tau_T, nonnegative for every hyperplane."""
    if tau_T is None:
        tau_T = submanifold_relations(zeta).tau_T
    return r * casorati(zeta) + a_coeff(zeta.n, r) * casorati_of_normal(zeta, u) - 2.0 * tau_T


def extremal_proof_quantity(
    zeta: BundleSymTensor,
    r: float,
    cfg: Optional[OptimizerConfig] = None,
    extrema: Optional[HyperplaneExtrema] = None,
) -> float:
    ex = extrema if extrema is not None else hyperplane_extrema(zeta, cfg)
    plane = ex.inf if r < zeta.n * (zeta.n - 1) else ex.sup
    return proof_quantity(zeta, r, plane.argmin_or_argmax.normal)


@dataclass(frozen=True)
class ProofDecomposition:
    P: float
    f_alpha: tuple[float, ...]

    @property
    def lower_bound(self) -> float:
        return float(sum(self.f_alpha))


def proof_decomposition(zeta: BundleSymTensor, r: float, u: np.ndarray) -> ProofDecomposition:
    """
    Rotate the frame so that u^perp = span(e_1..e_{n-1}); then
    P >= sum_alpha f_alpha(zeta_11^alpha, ..., zeta_nn^alpha) >= 0.
    """
    n = zeta.n
    plane = Hyperplane.from_direction(zeta.setup, u)
    B = np.column_stack([null_space(plane.normal[None, :]), plane.normal])
    Zf = np.einsum("ia,xij,jb->xab", B, zeta.comps, B)
    prob = per_alpha_problem(n, r)
    fs = tuple(f_eval(prob, np.diag(Zf[a])) for a in range(zeta.q))
    return ProofDecomposition(proof_quantity(zeta, r, plane.normal), fs)


# -----------------------------
# Fuzz campaign
# -----------------------------
R_FACTORS = (0.25, 0.5, 1.5, 2.0, 3.0)


@dataclass(frozen=True)
class FuzzRecord:
    index: int
    n: int
    q: int
    r: float
    slack: float
    holds: bool
    P: float
    oracle_gap_inf: Optional[float] = None
    oracle_gap_sup: Optional[float] = None


@dataclass(frozen=True)
class FuzzSummary:
    records: tuple[FuzzRecord, ...]
    violations: int
    worst_slack: float
    seconds: float


def _fuzz_one(
    index: int,
    fuzz: FuzzDefaults,
    opt: OptimizerConfig,
    r_factors: Sequence[float],
    oracle_samples: Optional[int],
) -> list[FuzzRecord]:
    rng = np.random.default_rng([fuzz.seed, index])
    n = int(rng.integers(fuzz.n_min, fuzz.n_max + 1))
    q = int(rng.integers(fuzz.q_min, fuzz.q_max + 1))
    zeta = generate(GallerySpec(Kind.RANDOM, GeometrySetup(n, q), seed=int(rng.integers(2**31)), scale=fuzz.scale))
    use_oracle = oracle_samples if (oracle_samples and n <= 4) else None
    ex = hyperplane_extrema(zeta, opt, oracle_samples=use_oracle)
    bundle = submanifold_relations(zeta)
    nn = n * (n - 1)
    out = []
    for fac in r_factors:
        r = fac * nn
        fam = delta_r(zeta, r, extrema=ex)
        v = _verdict(fam.variant.value, bundle.tau_T_nor, fam.delta / nn, r, fuzz.slack_floor)
        plane = ex.inf if r < nn else ex.sup
        out.append(
            FuzzRecord(
                index=index,
                n=n,
                q=q,
                r=r,
                slack=v.slack,
                holds=v.holds,
                P=proof_quantity(zeta, r, plane.argmin_or_argmax.normal, bundle.tau_T),
                oracle_gap_inf=ex.inf.diagnostics.oracle_gap,
                oracle_gap_sup=ex.sup.diagnostics.oracle_gap,
            )
        )
    return out


def fuzz_campaign(
    fuzz: Optional[FuzzDefaults] = None,
    opt: Optional[OptimizerConfig] = None,
    r_factors: Sequence[float] = R_FACTORS,
    oracle_samples: Optional[int] = None,
) -> FuzzSummary:
    """Random zeta, r = factor * n(n-1); deterministic per fuzz.seed regardless of workers."""
    fuzz = fuzz or FuzzDefaults()
    opt = opt or OptimizerConfig()
    t0 = tick()
    log(
        f"[STEP] fuzz campaign: samples={fuzz.samples} n={fuzz.n_min}..{fuzz.n_max} "
        f"q={fuzz.q_min}..{fuzz.q_max} workers={opt.workers}"
    )

    job = partial(_fuzz_one, fuzz=fuzz, opt=opt, r_factors=tuple(r_factors), oracle_samples=oracle_samples)
    if opt.workers > 1:
        chunksize = max(1, fuzz.samples // (4 * opt.workers))
        with mp.Pool(processes=opt.workers) as pool:
            chunks = pool.map(job, range(fuzz.samples), chunksize=chunksize)
    else:
        chunks = [job(i) for i in range(fuzz.samples)]

    records = tuple(rec for chunk in chunks for rec in chunk)
    violations = sum(1 for rec in records if not rec.holds)
    worst = min((rec.slack for rec in records), default=0.0)
    secs = tick() - t0
    log(f"[DONE] fuzz campaign: records={len(records)} violations={violations} worst_slack={worst:.3g} in {secs:.1f}s")
    return FuzzSummary(records, violations, worst, secs)
