"""inf / sup of C(Pi_{n-1}) over tangent hyperplanes, each given by its unit normal u (u ~ -u)."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.linalg import null_space

from .config import OptimizerConfig
from .frame_core import BundleSymTensor, GeometrySetup
from .invariants import SubspaceBasis, casorati_subspace
from .utils import DomainError, canonical_sign, frozen, log


UNIT_TOL = 1e-12
TIE_TOL = 1e-12
SAME_PLANE_TOL = 1e-6


class Mode(str, Enum):
    INF = "inf"
    SUP = "sup"


@dataclass(frozen=True, eq=False)
class Hyperplane:
    setup: GeometrySetup
    normal: np.ndarray

    def __post_init__(self) -> None:
        u = np.asarray(self.normal, dtype=float)
        if u.shape != (self.setup.n,):
            raise DomainError(f"normal has shape {u.shape}, expected ({self.setup.n},)")
        if abs(np.linalg.norm(u) - 1.0) > UNIT_TOL:
            raise DomainError(f"normal not unit (|u| = {np.linalg.norm(u):.15g})")
        object.__setattr__(self, "normal", frozen(canonical_sign(u)))

    @classmethod
    def from_direction(cls, setup: GeometrySetup, v: np.ndarray) -> "Hyperplane":
        v = np.asarray(v, dtype=float)
        return cls(setup, v / np.linalg.norm(v))

    def basis(self) -> SubspaceBasis:
        """An orthonormal basis of u^perp."""
        return SubspaceBasis(self.setup, null_space(self.normal[None, :]).T)

    def same_as(self, other: "Hyperplane", tol: float = SAME_PLANE_TOL) -> bool:
        return abs(abs(float(self.normal @ other.normal)) - 1.0) <= tol


@dataclass(frozen=True)
class ExtremalDiagnostics:
    restarts: int
    iterations: int
    candidates: int
    multiplicity: int
    hit_max_iter: int = 0
    oracle_value: Optional[float] = None
    oracle_gap: Optional[float] = None


@dataclass(frozen=True)
class ExtremalResult:
    value: float
    argmin_or_argmax: Hyperplane
    mode: Mode
    diagnostics: ExtremalDiagnostics
    line_extension: bool = False  # n = 2: hyperplanes are lines (k = 1)


# -----------------------------
# Objective
# -----------------------------
def _check_unit(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if abs(np.linalg.norm(u) - 1.0) > 1e-10:
        raise DomainError(f"normal not unit (|u| = {np.linalg.norm(u):.15g})")
    return u


def _objective(Z: np.ndarray, Z2: np.ndarray, fro: float, u: np.ndarray) -> float:
    n = Z.shape[1]
    s = np.einsum("i,aij,j->a", u, Z, u)
    s2 = np.einsum("i,aij,j->a", u, Z2, u)
    return float((fro - 2.0 * np.sum(s2) + np.sum(s * s)) / (n - 1))


def _gradient(Z: np.ndarray, Z2: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Euclidean gradient of the objective in u (before projection)."""
    n = Z.shape[1]
    s = np.einsum("i,aij,j->a", u, Z, u)
    Zu = np.einsum("aij,j->ai", Z, u)
    Z2u = np.einsum("aij,j->ai", Z2, u)
    return (-4.0 * Z2u.sum(axis=0) + 4.0 * np.einsum("a,ai->i", s, Zu)) / (n - 1)


def _squares(zeta: BundleSymTensor) -> tuple[np.ndarray, np.ndarray, float]:
    Z = zeta.comps
    return Z, np.einsum("aij,ajk->aik", Z, Z), zeta.norm_sq()


def casorati_of_normal(zeta: BundleSymTensor, u: np.ndarray) -> float:
    """C(u^perp) in closed form; equals casorati_subspace on any basis of u^perp."""
    Z, Z2, fro = _squares(zeta)
    return _objective(Z, Z2, fro, _check_unit(u))


def casorati_of_normal_grad(zeta: BundleSymTensor, u: np.ndarray) -> np.ndarray:
    """Euclidean gradient of the closed form (no projection, no unit check)."""
    Z, Z2, _ = _squares(zeta)
    return _gradient(Z, Z2, np.asarray(u, dtype=float))


def riemannian_grad(zeta: BundleSymTensor, u: np.ndarray) -> np.ndarray:
    g = casorati_of_normal_grad(zeta, u)
    u = np.asarray(u, dtype=float)
    return g - (g @ u) * u


# -----------------------------
# Sphere optimizer
# -----------------------------
NEWTON_FLOOR = 1e-8   # smallest tangent Hessian eigenvalue (relative) that still takes a Newton step
ARMIJO = 1e-4


@dataclass
class _Run:
    value: float
    u: np.ndarray
    iterations: int = 0
    hit_max_iter: bool = False


def _batch_objective(Z: np.ndarray, fro: float, U: np.ndarray) -> np.ndarray:
    """Objective for every row of U; u^T Z_a^2 u is taken as |Z_a u|^2."""
    n = Z.shape[1]
    W = np.matmul(U, Z)                              # (q, R, n), rows (Z_a u)^T
    S = np.einsum("arj,rj->ra", W, U)
    return (fro - 2.0 * np.einsum("arj,arj->r", W, W) + np.einsum("ra,ra->r", S, S)) / (n - 1)


def _batch_grad_hess(Z: np.ndarray, M: np.ndarray, U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Euclidean gradient (R, n) and Hessian (R, n, n); M = sum_a Z_a^2."""
    n = Z.shape[1]
    W = np.matmul(U, Z)
    S = np.einsum("arj,rj->ra", W, U)
    g = (-4.0 * U @ M + 4.0 * np.einsum("ra,arj->rj", S, W)) / (n - 1)
    H = (-4.0 * M + 4.0 * np.einsum("ra,aij->rij", S, Z) + 8.0 * np.einsum("ari,arj->rij", W, W)) / (n - 1)
    return g, H


def _descend(Z, M, fro, U0: np.ndarray, sign: float, cfg: OptimizerConfig) -> list[_Run]:
    """
    Minimize sign * objective on the sphere from every row of U0 at once
    (sign=+1 for inf, -1 for sup). Rows whose tangent Hessian is positive
    definite take a Newton step, the rest a gradient step; both are
    backtracked along the retraction u -> (u + t d)/|u + t d|.
    """
    R, n = U0.shape
    U = U0 / np.linalg.norm(U0, axis=1, keepdims=True)
    f = sign * _batch_objective(Z, fro, U)
    step = np.ones(R)
    iters = np.zeros(R, dtype=int)
    active = np.ones(R, dtype=bool)
    eye = np.eye(n)

    for _ in range(cfg.max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        iters[idx] += 1
        u = U[idx]
        g, H = _batch_grad_hess(Z, M, u)
        g, H = sign * g, sign * H
        gu = np.einsum("ri,ri->r", g, u)
        G = g - gu[:, None] * u
        converged = np.linalg.norm(G, axis=1) <= cfg.gtol
        active[idx[converged]] = False
        keep = ~converged
        if not keep.any():
            break
        idx, u, G, H, gu = idx[keep], u[keep], G[keep], H[keep], gu[keep]
        fu = f[idx]

        # tangent Hessian P H P - (u.g) P, with u u^T filling the normal direction
        uu = u[:, :, None] * u[:, None, :]
        P = eye - uu
        lam, V = np.linalg.eigh(P @ H @ P - gu[:, None, None] * P + uu)
        newton = lam[:, 0] > NEWTON_FLOOR * np.abs(lam).max(axis=1)
        D = -G
        if newton.any():
            coef = np.einsum("rji,rj->ri", V[newton], G[newton]) / lam[newton]
            D[newton] = -np.einsum("rij,rj->ri", V[newton], coef)
        slope = np.einsum("ri,ri->r", G, D)

        t = np.where(newton, 1.0, np.minimum(2.0 * step[idx], 1e6))
        new_u, new_f = u.copy(), fu.copy()
        pending = np.ones(idx.size, dtype=bool)
        stalled = np.zeros(idx.size, dtype=bool)
        while pending.any():
            p = np.flatnonzero(pending)
            cand = u[p] + t[p, None] * D[p]
            cand /= np.linalg.norm(cand, axis=1, keepdims=True)
            fc = sign * _batch_objective(Z, fro, cand)
            ok = fc <= fu[p] + ARMIJO * t[p] * slope[p]
            new_u[p[ok]], new_f[p[ok]] = cand[ok], fc[ok]
            pending[p[ok]] = False
            bad = p[~ok]
            t[bad] *= 0.5
            # no representable descent left
            low = bad[t[bad] < 1e-16]
            stalled[low] = True
            pending[low] = False

        U[idx], f[idx] = new_u, new_f
        step[idx] = np.where(newton, step[idx], t)
        small = (fu - new_f) <= cfg.ftol * (1.0 + np.abs(new_f))
        active[idx[stalled | small]] = False

    return [_Run(float(sign * f[i]), U[i].copy(), int(iters[i]), bool(active[i])) for i in range(R)]


def candidate_normals(zeta: BundleSymTensor) -> np.ndarray:
    """Eigenvectors of every zeta^alpha and of sum_alpha (zeta^alpha)^2, as rows."""
    Z, Z2, _ = _squares(zeta)
    vecs = [np.eye(zeta.n)]
    for A in list(Z) + [Z2.sum(axis=0)]:
        _, V = np.linalg.eigh(A)
        vecs.append(V.T)
    return np.vstack(vecs)


def _seeded_starts(n: int, restarts: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((restarts, n))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def _rank_key(run: _Run, sign: float) -> tuple:
    return (sign * run.value, tuple(np.round(canonical_sign(run.u), 12)))


def extremize(
    zeta: BundleSymTensor,
    mode: Mode | str,
    cfg: Optional[OptimizerConfig] = None,
) -> ExtremalResult:
    mode = Mode(mode)
    cfg = cfg or OptimizerConfig()
    n = zeta.n
    sign = 1.0 if mode is Mode.INF else -1.0
    Z, Z2, fro = _squares(zeta)

    cands = candidate_normals(zeta)
    cand_runs = [_Run(float(v), c) for v, c in zip(_batch_objective(Z, fro, cands), cands)]

    # polish the best candidate too: it is exact only when the slices commute
    best_cand = min(cand_runs, key=lambda r: _rank_key(r, sign))
    starts = np.vstack([_seeded_starts(n, cfg.restarts_for(n), cfg.seed), best_cand.u[None, :]])
    runs = _descend(Z, Z2.sum(axis=0), fro, starts, sign, cfg)

    hit = sum(1 for r in runs if r.hit_max_iter)
    if hit:
        log(f"[WARN] extremize({mode.value}): {hit}/{len(runs)} restarts hit max_iter={cfg.max_iter}")

    pool_runs = cand_runs + runs
    best_val = min(sign * r.value for r in pool_runs)
    tie = TIE_TOL * (1.0 + abs(best_val))
    tied = [r for r in pool_runs if sign * r.value <= best_val + tie]
    tied.sort(key=lambda r: tuple(canonical_sign(r.u)))
    best = tied[0]

    distinct: list[np.ndarray] = []
    for r in tied:
        if not any(abs(abs(float(r.u @ d)) - 1.0) <= SAME_PLANE_TOL for d in distinct):
            distinct.append(r.u)

    plane = Hyperplane.from_direction(zeta.setup, best.u)
    value = max(0.0, _objective(Z, Z2, fro, plane.normal))
    diag = ExtremalDiagnostics(
        restarts=len(starts),
        iterations=sum(r.iterations for r in runs),
        candidates=len(cand_runs),
        multiplicity=len(distinct),
        hit_max_iter=hit,
    )
    return ExtremalResult(value, plane, mode, diag, line_extension=(n == 2))


@dataclass(frozen=True)
class HyperplaneExtrema:
    inf: ExtremalResult
    sup: ExtremalResult


def hyperplane_extrema(
    zeta: BundleSymTensor,
    cfg: Optional[OptimizerConfig] = None,
    oracle_samples: Optional[int] = None,
) -> HyperplaneExtrema:
    """Both extrema at once; with oracle_samples, diagnostics carry the oracle gap."""
    lo = extremize(zeta, Mode.INF, cfg)
    hi = extremize(zeta, Mode.SUP, cfg)
    if oracle_samples:
        o_lo, o_hi = oracle_range(zeta, oracle_samples, (cfg or OptimizerConfig()).seed)
        lo = _with_oracle(lo, o_lo)
        hi = _with_oracle(hi, o_hi)
    return HyperplaneExtrema(lo, hi)


def _with_oracle(res: ExtremalResult, oracle_value: float) -> ExtremalResult:
    # gap > 0 means the optimizer beat the oracle (as it should)
    gap = oracle_value - res.value if res.mode is Mode.INF else res.value - oracle_value
    d = res.diagnostics
    diag = ExtremalDiagnostics(
        d.restarts, d.iterations, d.candidates, d.multiplicity, d.hit_max_iter, oracle_value, gap
    )
    return ExtremalResult(res.value, res.argmin_or_argmax, res.mode, diag, res.line_extension)


# -----------------------------
# Oracle
# -----------------------------
def oracle_range(zeta: BundleSymTensor, samples: int, seed: int = 0, chunk: int = 20_000) -> tuple[float, float]:
    """(min, max) of the objective over `samples` uniform unit normals; independent of the optimizer."""
    if samples < 1:
        raise DomainError("oracle needs samples >= 1")
    Z, _, fro = _squares(zeta)
    n = zeta.n
    rng = np.random.default_rng(seed)
    lo, hi = np.inf, -np.inf
    left = samples
    while left > 0:
        m = min(chunk, left)
        U = rng.standard_normal((m, n))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        vals = _batch_objective(Z, fro, U)
        lo, hi = min(lo, float(vals.min())), max(hi, float(vals.max()))
        left -= m
    return lo, hi


def oracle_extremize(zeta: BundleSymTensor, mode: Mode | str, samples: int, seed: int = 0) -> float:
    lo, hi = oracle_range(zeta, samples, seed)
    return lo if Mode(mode) is Mode.INF else hi


def casorati_by_restriction(zeta: BundleSymTensor, u: np.ndarray) -> float:
    """Restriction oracle: complete u to an orthonormal frame and restrict zeta."""
    return casorati_subspace(zeta, Hyperplane.from_direction(zeta.setup, _check_unit(u)).basis())
