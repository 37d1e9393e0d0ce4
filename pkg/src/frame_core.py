"""zeta, curvature-like tensors and the algebraic Gauss equation at one point (0-based, read-only arrays)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .utils import AsymmetryError, DimensionError, DomainError, frozen, one_based


MAX_N = 16
MAX_Q = 8
ASYMMETRY_REJECT = 1e-9
MAX_ENTRY = 1e50      # keeps ||zeta||^4 and every curvature product finite


# -----------------------------
# Ambient descriptors
# -----------------------------
@dataclass(frozen=True)
class SpaceForm:
    """Real space form M~(c): constant sectional curvature c."""

    c: float

    def tau_tilde_nor(self, n: int) -> float:
        return float(self.c)


@dataclass(frozen=True)
class AmbientScalar:
    """General ambient, supplied only through its normalized scalar curvature of T_pM."""

    tau_tilde_nor_value: float

    def tau_tilde_nor(self, n: int) -> float:
        return float(self.tau_tilde_nor_value)


Ambient = Union[SpaceForm, AmbientScalar]


@dataclass(frozen=True)
class GeometrySetup:
    n: int
    q: int
    ambient: Optional[Ambient] = None

    def __post_init__(self) -> None:
        if not (2 <= int(self.n) <= MAX_N):
            raise DimensionError(f"n must be in 2..{MAX_N}, got {self.n}")
        if not (1 <= int(self.q) <= MAX_Q):
            raise DimensionError(f"q must be in 1..{MAX_Q}, got {self.q}")

    @property
    def m(self) -> int:
        return self.n + self.q

    def with_ambient(self, ambient: Optional[Ambient]) -> "GeometrySetup":
        return GeometrySetup(self.n, self.q, ambient)


def _check_entries(a: np.ndarray, what: str) -> None:
    bad = ~np.isfinite(a)
    if bad.any():
        where = tuple(one_based(i) for i in np.argwhere(bad)[0])
        raise DomainError(f"{what} has a non-finite entry at {where}")
    if a.size and float(np.max(np.abs(a))) > MAX_ENTRY:
        raise DomainError(f"{what} has an entry above {MAX_ENTRY:g} in magnitude")


def _as_components(comps, setup: GeometrySetup) -> np.ndarray:
    try:
        a = np.asarray(comps, dtype=float)
    except (TypeError, ValueError) as e:
        raise DimensionError(f"zeta is not a (q, n, n) array: {e}") from e
    if a.shape != (setup.q, setup.n, setup.n):
        raise DimensionError(f"zeta shape {a.shape} != (q, n, n) = {(setup.q, setup.n, setup.n)}")
    _check_entries(a, "zeta")
    return a


# -----------------------------
# zeta
# -----------------------------
@dataclass(frozen=True, eq=False)
class BundleSymTensor:
    """zeta_ij^alpha stored as comps[alpha, i, j]; exactly symmetric in (i, j)."""

    setup: GeometrySetup
    comps: np.ndarray
    asymmetry: float = field(default=0.0, compare=False)

    def __post_init__(self) -> None:
        # direct construction: components must already be exactly symmetric
        a = _as_components(self.comps, self.setup)
        if not np.array_equal(a, a.transpose(0, 2, 1)):
            diff = np.abs(a - a.transpose(0, 2, 1))
            alpha, i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
            raise AsymmetryError(one_based(alpha), one_based(i), one_based(j), float(diff.max()))
        if a.flags.writeable:
            object.__setattr__(self, "comps", frozen(a))

    @classmethod
    def from_components(
        cls,
        setup: GeometrySetup,
        comps: np.ndarray | Sequence,
        reject: float = ASYMMETRY_REJECT,
    ) -> "BundleSymTensor":
        a = _as_components(comps, setup)
        diff = np.abs(a - a.transpose(0, 2, 1))
        defect = float(diff.max()) if diff.size else 0.0
        if defect > reject:
            alpha, i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
            raise AsymmetryError(one_based(alpha), one_based(i), one_based(j), defect)
        sym = 0.5 * (a + a.transpose(0, 2, 1))
        return cls(setup, frozen(sym), defect)

    @classmethod
    def zeros(cls, setup: GeometrySetup) -> "BundleSymTensor":
        return cls(setup, frozen(np.zeros((setup.q, setup.n, setup.n))))

    @property
    def n(self) -> int:
        return self.setup.n

    @property
    def q(self) -> int:
        return self.setup.q

    def norm_sq(self) -> float:
        """||zeta||^2 = sum_{alpha,i,j} (zeta_ij^alpha)^2."""
        return float(np.sum(self.comps * self.comps))

    def trace_vector(self) -> np.ndarray:
        """trace zeta as a q-vector."""
        return np.einsum("aii->a", self.comps)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.comps))) if self.comps.size else 0.0

    def rotated(self, Q: np.ndarray) -> "BundleSymTensor":
        """Components in the tangent frame whose vectors are the columns of Q."""
        Q = np.asarray(Q, dtype=float)
        out = np.einsum("ai,xij,jb->xab", Q.T, self.comps, Q)
        return BundleSymTensor.from_components(self.setup, 0.5 * (out + out.transpose(0, 2, 1)))

    def mixed(self, O: np.ndarray) -> "BundleSymTensor":
        """Bundle frame change: new slice b = sum_alpha O[b, alpha] zeta^alpha."""
        out = np.einsum("ba,aij->bij", np.asarray(O, dtype=float), self.comps)
        return BundleSymTensor.from_components(self.setup, out)

    def permuted(self, perm: Sequence[int]) -> "BundleSymTensor":
        p = np.asarray(perm, dtype=int)
        return BundleSymTensor(self.setup, frozen(self.comps[:, p][:, :, p]))

    def scaled(self, lam: float) -> "BundleSymTensor":
        return BundleSymTensor(self.setup, frozen(lam * self.comps))


# -----------------------------
# Curvature-like tensors
# -----------------------------
@dataclass(frozen=True, eq=False)
class CurvatureTensor:
    """T_{ijkl} = T(e_i, e_j, e_k, e_l)."""

    setup: GeometrySetup
    comps: np.ndarray

    def __post_init__(self) -> None:
        n = self.setup.n
        try:
            t = np.asarray(self.comps, dtype=float)
        except (TypeError, ValueError) as e:
            raise DimensionError(f"T is not an (n, n, n, n) array: {e}") from e
        if t.shape != (n, n, n, n):
            raise DimensionError(f"T shape {t.shape} != {(n, n, n, n)}")
        _check_entries(t, "T")
        if t.flags.writeable:
            object.__setattr__(self, "comps", frozen(t))
        else:
            object.__setattr__(self, "comps", t)

    @classmethod
    def zeros(cls, setup: GeometrySetup) -> "CurvatureTensor":
        n = setup.n
        return cls(setup, np.zeros((n, n, n, n)))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.comps)))

    def rotated(self, Q: np.ndarray) -> "CurvatureTensor":
        Q = np.asarray(Q, dtype=float)
        return CurvatureTensor(self.setup, np.einsum("ijkl,ia,jb,kc,ld->abcd", self.comps, Q, Q, Q, Q))

    def __add__(self, other: "CurvatureTensor") -> "CurvatureTensor":
        if other.setup.n != self.setup.n:
            raise DimensionError("curvature tensors of different dimension")
        return CurvatureTensor(self.setup, self.comps + other.comps)


@dataclass(frozen=True)
class SymmetryViolation:
    family: str            # antisymmetry | pair_symmetry | bianchi | antisymmetry_last
    max_violation: float
    where: tuple[int, int, int, int]  # 1-based (i, j, k, l)


def _worst(diff: np.ndarray) -> tuple[float, tuple[int, int, int, int]]:
    a = np.abs(diff)
    idx = np.unravel_index(int(np.argmax(a)), a.shape)
    return float(a[idx]), tuple(one_based(i) for i in idx)  # type: ignore[return-value]


def symmetry_defects(T: CurvatureTensor) -> dict[str, tuple[float, tuple[int, int, int, int]]]:
    t = T.comps
    return {
        "antisymmetry": _worst(t + t.transpose(1, 0, 2, 3)),
        "pair_symmetry": _worst(t - t.transpose(2, 3, 0, 1)),
        # T_ijkl + T_jkil + T_kijl
        "bianchi": _worst(t + t.transpose(2, 0, 1, 3) + t.transpose(1, 2, 0, 3)),
        "antisymmetry_last": _worst(t + t.transpose(0, 1, 3, 2)),
    }


def validate_curvature_like(T: CurvatureTensor, tol: float = 1e-12) -> list[SymmetryViolation]:
    """Empty iff T is curvature-like within tol (absolute, per family)."""
    out: list[SymmetryViolation] = []
    for family, (val, where) in symmetry_defects(T).items():
        if val > tol:
            out.append(SymmetryViolation(family, val, where))
    return out


def gauss_tensor(zeta: BundleSymTensor) -> CurvatureTensor:
    """T_ijkl = sum_alpha (zeta_il zeta_jk - zeta_ik zeta_jl)."""
    z = zeta.comps
    t = np.einsum("ail,ajk->ijkl", z, z) - np.einsum("aik,ajl->ijkl", z, z)
    return CurvatureTensor(zeta.setup, t)


def gauss_defect(T: CurvatureTensor, zeta: BundleSymTensor) -> float:
    if T.setup.n != zeta.setup.n:
        raise DimensionError(f"T has n={T.setup.n}, zeta has n={zeta.setup.n}")
    return float(np.max(np.abs(T.comps - gauss_tensor(zeta).comps)))


def space_form_tensor(setup: GeometrySetup, c: float | None = None) -> CurvatureTensor:
    """R~_ijkl = c (delta_il delta_jk - delta_ik delta_jl), so K~(X^Y) = c."""
    if c is None:
        c = setup.ambient.c if isinstance(setup.ambient, SpaceForm) else 0.0
    g = np.eye(setup.n)
    return CurvatureTensor(setup, c * (np.einsum("il,jk->ijkl", g, g) - np.einsum("ik,jl->ijkl", g, g)))


def submanifold_curvature(sigma: BundleSymTensor) -> CurvatureTensor:
    """Gauss equation R = R~ + (sigma terms) for a space-form ambient."""
    return space_form_tensor(sigma.setup) + gauss_tensor(sigma)


# -----------------------------
# Shape operators
# -----------------------------
@dataclass(frozen=True, eq=False)
class ShapeOperatorSet:
    setup: GeometrySetup
    ops: np.ndarray  # (q, n, n), ops[alpha] = A_alpha

    def __getitem__(self, alpha: int) -> np.ndarray:
        return self.ops[alpha]

    def __len__(self) -> int:
        return self.ops.shape[0]


def shape_operators(zeta: BundleSymTensor) -> ShapeOperatorSet:
    return ShapeOperatorSet(zeta.setup, frozen(zeta.comps))


def commutators(ops: ShapeOperatorSet) -> np.ndarray:
    """[A_alpha, A_beta] for all pairs, shape (q, q, n, n)."""
    A = ops.ops
    return np.einsum("aij,bjk->abik", A, A) - np.einsum("bij,ajk->abik", A, A)


def normal_curvature(ops: ShapeOperatorSet) -> np.ndarray:
    """R_perp(e_i, e_j, e_alpha, e_beta) = g([A_alpha, A_beta] e_i, e_j), space-form ambient."""
    return np.einsum("abji->ijab", commutators(ops))


def commutator_max(ops: ShapeOperatorSet) -> float:
    if len(ops) < 2:
        return 0.0
    C = commutators(ops)
    norms = np.sqrt(np.einsum("abik,abik->ab", C, C))
    return float(norms.max())
