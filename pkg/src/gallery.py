from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .delta_casorati import check_r
from .frame_core import BundleSymTensor, GeometrySetup, SpaceForm
from .utils import DimensionError, DomainError


class Kind(str, Enum):
    ZERO = "zero"
    TOTALLY_GEODESIC = "totally_geodesic"   # alias of zero
    UMBILICAL = "umbilical"
    EQUALITY_R = "equality_r"
    EQUALITY_DELTA = "equality_delta"
    EQUALITY_DELTA_HAT = "equality_delta_hat"
    RANDOM = "random"


@dataclass(frozen=True)
class GallerySpec:
    kind: Kind
    setup: GeometrySetup
    a: float = 1.0
    r: Optional[float] = None
    seed: int = 0
    scale: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.EQUALITY_R:
            if self.r is None:
                raise DomainError("equality_r needs r")
            check_r(self.setup.n, self.r)
        if self.kind is Kind.RANDOM and not self.scale > 0:
            raise DomainError(f"scale must be positive, got {self.scale}")


def _first_slice(setup: GeometrySetup, diag: Sequence[float]) -> BundleSymTensor:
    comps = np.zeros((setup.q, setup.n, setup.n))
    comps[0] = np.diag(diag)
    return BundleSymTensor.from_components(setup, comps)


def _last_axis(n: int, a: float, last: float) -> list[float]:
    return [a] * (n - 1) + [last]


def generate(spec: GallerySpec) -> BundleSymTensor:
    """
    The distinguished direction is always e_n:
      equality_r          diag(a, ..., a, n(n-1)a/r)
      equality_delta      diag(a, ..., a, 2a)
      equality_delta_hat  diag(a, ..., a, a/2)
    on the first slice, all other slices zero.
    """
    s, n = spec.setup, spec.setup.n
    kind = spec.kind
    if kind in (Kind.ZERO, Kind.TOTALLY_GEODESIC):
        return BundleSymTensor.zeros(s)
    if kind is Kind.UMBILICAL:
        return _first_slice(s, [spec.a] * n)
    if kind is Kind.EQUALITY_R:
        return _first_slice(s, _last_axis(n, spec.a, n * (n - 1) * spec.a / spec.r))
    if kind is Kind.EQUALITY_DELTA:
        return _first_slice(s, _last_axis(n, spec.a, 2.0 * spec.a))
    if kind is Kind.EQUALITY_DELTA_HAT:
        return _first_slice(s, _last_axis(n, spec.a, spec.a / 2.0))

    rng = np.random.default_rng(spec.seed)
    A = rng.uniform(-spec.scale, spec.scale, size=(s.q, n, n))
    upper = np.triu(A)
    return BundleSymTensor.from_components(s, upper + np.triu(A, 1).transpose(0, 2, 1))


@dataclass(frozen=True)
class HypersurfacePoint:
    """zeta = diag(kappa) in M~(c) and the invariants it must produce."""

    zeta: BundleSymTensor
    casorati: float
    tau_nor: float
    mean_curv_sq: float
    sigma_norm_sq: float


def hypersurface_from_principal_curvatures(kappa: Sequence[float], c: float = 0.0) -> HypersurfacePoint:
    k = np.asarray(kappa, dtype=float)
    if k.ndim != 1:
        raise DimensionError(f"principal curvatures must be a vector, got shape {k.shape}")
    n = k.shape[0]
    setup = GeometrySetup(n, 1, SpaceForm(c))
    sigma_sq = float(k @ k)
    mean_sq = float(k.sum()) ** 2 / (n * n)
    return HypersurfacePoint(
        zeta=BundleSymTensor.from_components(setup, np.diag(k)[None, :, :]),
        casorati=sigma_sq / n,
        tau_nor=c + n / (n - 1) * mean_sq - sigma_sq / (n * (n - 1)),
        mean_curv_sq=mean_sq,
        sigma_norm_sq=sigma_sq,
    )
