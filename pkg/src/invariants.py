"""Scalar invariants of T and zeta at one point."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .frame_core import BundleSymTensor, CurvatureTensor, GeometrySetup, gauss_tensor
from .utils import DimensionError, DomainError, frozen


ORTHONORMAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """k orthonormal n-vectors spanning Pi_k, stored as rows of `vectors`."""

    setup: GeometrySetup
    vectors: np.ndarray

    def __post_init__(self) -> None:
        v = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        k, n = v.shape
        if n != self.setup.n:
            raise DimensionError(f"basis vectors have length {n}, setup has n={self.setup.n}")
        if not (1 <= k <= n):
            raise DomainError(f"k={k} outside 1..{n}")
        gram = v @ v.T
        err = float(np.max(np.abs(gram - np.eye(k))))
        if err > ORTHONORMAL_TOL:
            raise DomainError(f"basis not orthonormal (max |<v_i,v_j> - delta_ij| = {err:.3g})")
        object.__setattr__(self, "vectors", frozen(v))

    @property
    def k(self) -> int:
        return self.vectors.shape[0]

    @classmethod
    def full(cls, setup: GeometrySetup) -> "SubspaceBasis":
        return cls(setup, np.eye(setup.n))

    @classmethod
    def coordinate(cls, setup: GeometrySetup, axes: Sequence[int]) -> "SubspaceBasis":
        """span(e_a : a in axes), 0-based axes."""
        return cls(setup, np.eye(setup.n)[list(axes)])


# -----------------------------
# T-curvatures
# -----------------------------
def _check_unit_pair(X: np.ndarray, Y: np.ndarray) -> None:
    if abs(np.linalg.norm(X) - 1.0) > ORTHONORMAL_TOL or abs(np.linalg.norm(Y) - 1.0) > ORTHONORMAL_TOL:
        raise DomainError("sectional curvature needs unit vectors")
    if abs(float(X @ Y)) > ORTHONORMAL_TOL:
        raise DomainError("sectional curvature needs orthogonal vectors")


def sectional(T: CurvatureTensor, X: Sequence[float], Y: Sequence[float]) -> float:
    """K_T(X ^ Y) = T(X, Y, Y, X)."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    _check_unit_pair(X, Y)
    return float(np.einsum("ijkl,i,j,k,l->", T.comps, X, Y, Y, X))


def sectional_matrix(T: CurvatureTensor, basis: SubspaceBasis) -> np.ndarray:
    """K[i, j] = K_T(e_i ^ e_j) over the basis of Pi_k (zero diagonal)."""
    V = basis.vectors
    K = np.einsum("abcd,ia,jb,jc,id->ij", T.comps, V, V, V, V)
    np.fill_diagonal(K, 0.0)
    return K


def k_scalar(T: CurvatureTensor, basis: SubspaceBasis) -> float:
    """tau_T(Pi_k) = sum_{i<j} K_T(e_i ^ e_j)."""
    K = sectional_matrix(T, basis)
    return float(np.sum(np.triu(K, 1)))


def k_ricci(T: CurvatureTensor, basis: SubspaceBasis, i: int) -> float:
    """(Ric_T)_{Pi_k}(e_i) = sum_{j != i} K_T(e_i ^ e_j); i is 0-based."""
    if not (0 <= i < basis.k):
        raise DomainError(f"index {i} outside 0..{basis.k - 1}")
    return float(np.sum(sectional_matrix(T, basis)[i]))


def normalized_scalar(T: CurvatureTensor, basis: Optional[SubspaceBasis] = None) -> float:
    """(tau_T)_Nor(Pi_k) = 2 tau_T(Pi_k) / (k(k-1)); full tangent space by default."""
    basis = basis if basis is not None else SubspaceBasis.full(T.setup)
    k = basis.k
    if k < 2:
        raise DomainError("normalized scalar curvature needs k >= 2")
    return 2.0 * k_scalar(T, basis) / (k * (k - 1))


def ricci_tensor(T: CurvatureTensor) -> np.ndarray:
    """S_T(e_i, e_j) = sum_k T(e_k, e_i, e_j, e_k)."""
    return np.einsum("kijk->ij", T.comps)


def ricci(T: CurvatureTensor, X: Sequence[float]) -> float:
    X = np.asarray(X, dtype=float)
    if abs(np.linalg.norm(X) - 1.0) > ORTHONORMAL_TOL:
        raise DomainError("Ricci curvature needs a unit vector")
    return float(X @ ricci_tensor(T) @ X)


# -----------------------------
# Casorati curvatures
# -----------------------------
def casorati(zeta: BundleSymTensor) -> float:
    """C = (1/n) sum_{alpha,i,j} (zeta_ij^alpha)^2."""
    return zeta.norm_sq() / zeta.n


def restrict(zeta: BundleSymTensor, basis: SubspaceBasis) -> np.ndarray:
    """zeta~_ij^alpha = sum_{a,b} v_i^a v_j^b zeta_ab^alpha, shape (q, k, k)."""
    if basis.setup.n != zeta.n:
        raise DimensionError("basis and zeta live in different tangent spaces")
    V = basis.vectors
    return np.einsum("ia,xab,jb->xij", V, zeta.comps, V)


def casorati_subspace(zeta: BundleSymTensor, basis: SubspaceBasis) -> float:
    """C(Pi_k) = (1/k) sum_alpha sum_{i,j<=k} (zeta~_ij^alpha)^2; k = 1 uses the same formula."""
    z = restrict(zeta, basis)
    return float(np.sum(z * z)) / basis.k


def trace_identity_defect(zeta: BundleSymTensor) -> float:
    """|n C - ||trace zeta||^2 + 2 tau_T| with T = gauss_tensor(zeta); zero in exact arithmetic."""
    T = gauss_tensor(zeta)
    tau = k_scalar(T, SubspaceBasis.full(zeta.setup))
    tr = zeta.trace_vector()
    return abs(zeta.n * casorati(zeta) - float(tr @ tr) + 2.0 * tau)


# -----------------------------
# Bundle of invariants
# -----------------------------
@dataclass(frozen=True, eq=False)
class InvariantBundle:
    tau_T: float
    tau_T_nor: float
    ricci: np.ndarray
    casorati: float
    trace_norm_sq: float
    mean_curv_sq: float
    sigma_norm_sq: float
    # ambient part, present only when the setup carries one
    tau_tilde_nor: Optional[float] = None
    tau_nor: Optional[float] = None
    gauss_identity_defect: Optional[float] = None


def submanifold_relations(zeta: BundleSymTensor) -> InvariantBundle:
    n = zeta.n
    T = gauss_tensor(zeta)
    full = SubspaceBasis.full(zeta.setup)
    tau_T = k_scalar(T, full)
    ric = np.sum(sectional_matrix(T, full), axis=1)
    sigma_sq = zeta.norm_sq()
    tr = zeta.trace_vector()
    trace_sq = float(tr @ tr)
    mean_sq = trace_sq / (n * n)

    tau_tilde_nor = tau_nor = defect = None
    if zeta.setup.ambient is not None:
        tau_tilde_nor = zeta.setup.ambient.tau_tilde_nor(n)
        tau_tilde = tau_tilde_nor * n * (n - 1) / 2.0
        tau_nor = tau_tilde_nor + n / (n - 1) * mean_sq - sigma_sq / (n * (n - 1))
        # 2 tau = 2 tau~ + n^2 ||H||^2 - ||sigma||^2, tau = tau~ + tau_T
        defect = abs(2.0 * (tau_tilde + tau_T) - (2.0 * tau_tilde + n * n * mean_sq - sigma_sq))

    return InvariantBundle(
        tau_T=tau_T,
        tau_T_nor=2.0 * tau_T / (n * (n - 1)),
        ricci=frozen(ric),
        casorati=sigma_sq / n,
        trace_norm_sq=trace_sq,
        mean_curv_sq=mean_sq,
        sigma_norm_sq=sigma_sq,
        tau_tilde_nor=tau_tilde_nor,
        tau_nor=tau_nor,
        gauss_identity_defect=defect,
    )
