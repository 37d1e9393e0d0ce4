from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .config import OptimizerConfig
from .extremizer import HyperplaneExtrema, hyperplane_extrema
from .frame_core import BundleSymTensor
from .invariants import casorati
from .utils import DomainError


R_GUARD = 1e-9


class Variant(str, Enum):
    DELTA_R = "delta_r"                       # delta(r; n-1), 0 < r < n(n-1)
    DELTA_HAT_R = "delta_hat_r"               # delta^(r; n-1), r > n(n-1)
    DELTA = "delta_n_minus_1"                 # delta(n-1)
    DELTA_HAT = "delta_hat_n_minus_1"         # delta^(n-1)
    DELTA_PRIME = "delta_prime_n_minus_1"     # legacy coefficient (n+1)/(2n(n-1))


@dataclass(frozen=True)
class DeltaFamily:
    variant: Variant
    delta: float
    r: Optional[float] = None
    a_of_r: Optional[float] = None
    legacy: bool = False

    def __post_init__(self) -> None:
        if self.variant is Variant.DELTA_R and not (self.a_of_r is not None and self.a_of_r > 0):
            raise DomainError("delta(r; n-1) needs a(r) > 0, i.e. r < n(n-1)")
        if self.variant is Variant.DELTA_HAT_R and not (self.a_of_r is not None and self.a_of_r < 0):
            raise DomainError("delta^(r; n-1) needs a(r) < 0, i.e. r > n(n-1)")


def check_r(n: int, r: float, guard: float = R_GUARD) -> float:
    r = float(r)
    crit = n * (n - 1)
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    if abs(r - crit) <= guard * crit:
        raise DomainError(f"r={r} too close to the excluded value n(n-1)={crit}")
    return r


def a_coeff(n: int, r: float, guard: float = R_GUARD) -> float:
    """a(r) = (n-1)(n+r)(n^2-n-r) / (n r)."""
    r = check_r(n, r, guard)
    return (n - 1) * (n + r) * (n * n - n - r) / (n * r)


def _extrema(zeta: BundleSymTensor, extrema: Optional[HyperplaneExtrema], cfg: Optional[OptimizerConfig]):
    return extrema if extrema is not None else hyperplane_extrema(zeta, cfg)


def delta_r(
    zeta: BundleSymTensor,
    r: float,
    cfg: Optional[OptimizerConfig] = None,
    extrema: Optional[HyperplaneExtrema] = None,
    guard: float = R_GUARD,
) -> DeltaFamily:
    """r C + a(r) inf C(Pi) below n(n-1), r C + a(r) sup C(Pi) above it."""
    n = zeta.n
    a = a_coeff(n, r, guard)
    ex = _extrema(zeta, extrema, cfg)
    if r < n * (n - 1):
        return DeltaFamily(Variant.DELTA_R, r * casorati(zeta) + a * ex.inf.value, float(r), a)
    return DeltaFamily(Variant.DELTA_HAT_R, r * casorati(zeta) + a * ex.sup.value, float(r), a)


def delta_n_minus_1(
    zeta: BundleSymTensor,
    cfg: Optional[OptimizerConfig] = None,
    extrema: Optional[HyperplaneExtrema] = None,
) -> DeltaFamily:
    n = zeta.n
    ex = _extrema(zeta, extrema, cfg)
    return DeltaFamily(Variant.DELTA, 0.5 * casorati(zeta) + (n + 1) / (2 * n) * ex.inf.value)


def delta_hat_n_minus_1(
    zeta: BundleSymTensor,
    cfg: Optional[OptimizerConfig] = None,
    extrema: Optional[HyperplaneExtrema] = None,
) -> DeltaFamily:
    n = zeta.n
    ex = _extrema(zeta, extrema, cfg)
    return DeltaFamily(Variant.DELTA_HAT, 2.0 * casorati(zeta) - (2 * n - 1) / (2 * n) * ex.sup.value)


def delta_prime_n_minus_1(
    zeta: BundleSymTensor,
    cfg: Optional[OptimizerConfig] = None,
    extrema: Optional[HyperplaneExtrema] = None,
) -> DeltaFamily:
    """Superseded coefficient (n+1)/(2n(n-1)); reported, never verified."""
    n = zeta.n
    ex = _extrema(zeta, extrema, cfg)
    value = 0.5 * casorati(zeta) + (n + 1) / (2 * n * (n - 1)) * ex.inf.value
    return DeltaFamily(Variant.DELTA_PRIME, value, legacy=True)


def delta_variant(
    zeta: BundleSymTensor,
    variant: Variant | str,
    cfg: Optional[OptimizerConfig] = None,
    extrema: Optional[HyperplaneExtrema] = None,
) -> DeltaFamily:
    fn = {
        Variant.DELTA: delta_n_minus_1,
        Variant.DELTA_HAT: delta_hat_n_minus_1,
        Variant.DELTA_PRIME: delta_prime_n_minus_1,
    }.get(Variant(variant))
    if fn is None:
        raise DomainError(f"{variant} needs r; use delta_r")
    return fn(zeta, cfg, extrema)


def scaling_identities_defect(
    zeta: BundleSymTensor,
    cfg: Optional[OptimizerConfig] = None,
    extrema: Optional[HyperplaneExtrema] = None,
) -> float:
    """
    delta(n-1)  = delta(n(n-1)/2; n-1) / (n(n-1))
    delta^(n-1) = delta^(2n(n-1); n-1) / (n(n-1))
    """
    n = zeta.n
    ex = _extrema(zeta, extrema, cfg)
    nn = n * (n - 1)
    d1 = abs(delta_n_minus_1(zeta, extrema=ex).delta - delta_r(zeta, nn / 2, extrema=ex).delta / nn)
    d2 = abs(delta_hat_n_minus_1(zeta, extrema=ex).delta - delta_r(zeta, 2 * nn, extrema=ex).delta / nn)
    return max(d1, d2)
