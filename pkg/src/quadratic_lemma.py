"""
The constrained extremum problem behind the Casorati inequalities:

    f(x) = a sum_{i<n} x_i^2 + b x_n^2 - 2 sum_{i<j} x_i x_j,   a, b > 0,

minimized on the affine hyperplane sum x = k. When b = (n-1)/(a-n+2) the
minimizer is x_1 = ... = x_{n-1} = k/(a+1), x_n = k/(b+1) and f = 0 there.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import eigh, null_space

from .delta_casorati import a_coeff, check_r
from .utils import DimensionError, DomainError


COMPAT_TOL = 1e-10
PSD_TOL = 1e-10


@dataclass(frozen=True)
class QuadraticProblem:
    n: int
    a: float
    b: float
    k: float = 0.0

    def __post_init__(self) -> None:
        if self.n < 2:
            raise DomainError(f"n must be >= 2, got {self.n}")
        if not (self.a > 0 and self.b > 0):
            raise DomainError(f"need a > 0 and b > 0, got a={self.a}, b={self.b}")

    @property
    def compatible(self) -> bool:
        if self.a <= self.n - 2:
            return False
        return abs(self.b - (self.n - 1) / (self.a - self.n + 2)) <= COMPAT_TOL

    def at_level(self, k: float) -> "QuadraticProblem":
        return QuadraticProblem(self.n, self.a, self.b, k)


def _vec(p: QuadraticProblem, x: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (p.n,):
        raise DimensionError(f"x has shape {x.shape}, expected ({p.n},)")
    return x


def f_eval(p: QuadraticProblem, x: Sequence[float]) -> float:
    x = _vec(p, x)
    s = float(x.sum())
    cross = 0.5 * (s * s - float(x @ x))  # sum_{i<j} x_i x_j
    return p.a * float(x[:-1] @ x[:-1]) + p.b * float(x[-1] ** 2) - 2.0 * cross


def f_grad(p: QuadraticProblem, x: Sequence[float]) -> np.ndarray:
    x = _vec(p, x)
    diag = np.full(p.n, p.a + 1.0)
    diag[-1] = p.b + 1.0
    return 2.0 * diag * x - 2.0 * x.sum()


def f_hess(p: QuadraticProblem) -> np.ndarray:
    H = -np.ones((p.n, p.n))
    np.fill_diagonal(H, p.a)
    H[-1, -1] = p.b
    return 2.0 * H


class TangentCheck(NamedTuple):
    psd: bool
    min_eig: float


def tangent_basis(n: int) -> np.ndarray:
    """Orthonormal basis (columns) of {X : sum X = 0}."""
    return null_space(np.ones((1, n)))


def tangent_psd_check(p: QuadraticProblem) -> TangentCheck:
    """Hessian restricted to the constraint tangent; PSD iff smallest eigenvalue >= -1e-10."""
    B = tangent_basis(p.n)
    w = eigh(B.T @ f_hess(p) @ B, eigvals_only=True)
    lo = float(w[0])
    return TangentCheck(lo >= -PSD_TOL, lo)


def global_min_point(p: QuadraticProblem) -> np.ndarray:
    if not p.compatible:
        raise DomainError(f"b={p.b} != (n-1)/(a-n+2) for n={p.n}, a={p.a}: no closed-form minimizer")
    x = np.full(p.n, p.k / (p.a + 1.0))
    x[-1] = p.k / (p.b + 1.0)
    return x


def theorem_coefficients(n: int, r: float) -> tuple[float, float]:
    """(a, b) = (r/n + a(r)/(n-1), r/n) of the per-alpha form."""
    return r / n + a_coeff(n, r) / (n - 1), r / n


def per_alpha_problem(n: int, r: float, k: float = 0.0) -> QuadraticProblem:
    a, b = theorem_coefficients(n, r)
    return QuadraticProblem(n, a, b, k)


def critical_diagonal(n: int, r: float, k: float) -> np.ndarray:
    """zeta_ii = r k / ((n-1)(n+r)) for i < n, zeta_nn = n k / (n+r)."""
    r = check_r(n, r)
    x = np.full(n, r * k / ((n - 1) * (n + r)))
    x[-1] = n * k / (n + r)
    return x
