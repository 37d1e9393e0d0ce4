from __future__ import annotations

import os

import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

os.environ.setdefault("CASORATI_QUIET", "1")

from src.config import OptimizerConfig  # noqa: E402
from src.frame_core import BundleSymTensor, GeometrySetup, SpaceForm  # noqa: E402


FAST = OptimizerConfig(restarts=6, seed=0)


def diag_zeta(values, q: int = 1, ambient=None) -> BundleSymTensor:
    n = len(values)
    comps = np.zeros((q, n, n))
    comps[0] = np.diag(values)
    return BundleSymTensor.from_components(GeometrySetup(n, q, ambient), comps)


def random_zeta(rng: np.random.Generator, n: int, q: int, scale: float = 2.0, ambient=None) -> BundleSymTensor:
    A = rng.uniform(-scale, scale, size=(q, n, n))
    return BundleSymTensor.from_components(GeometrySetup(n, q, ambient), 0.5 * (A + A.transpose(0, 2, 1)))


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def central_difference(f, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    e = np.zeros_like(x)
    for i in range(x.shape[0]):
        e[i] = 1.0
        g[i] = 0.5 * (f(x + h * e) - f(x - h * e)) / h
        e[i] = 0.0
    return g


@st.composite
def zetas(draw, n_min: int = 2, n_max: int = 6, q_max: int = 4, bound: float = 3.0) -> BundleSymTensor:
    n = draw(st.integers(n_min, n_max))
    q = draw(st.integers(1, q_max))
    elems = st.floats(-bound, bound, allow_nan=False, allow_infinity=False, width=64)
    A = draw(arrays(np.float64, (q, n, n), elements=elems))
    return BundleSymTensor.from_components(GeometrySetup(n, q), 0.5 * (A + A.transpose(0, 2, 1)))


@pytest.fixture
def worked() -> BundleSymTensor:
    """zeta = diag(1, 1, 2), n=3, q=1."""
    return diag_zeta([1.0, 1.0, 2.0])


@pytest.fixture
def umbilical3() -> BundleSymTensor:
    return diag_zeta([1.0, 1.0, 1.0])


@pytest.fixture
def zero3() -> BundleSymTensor:
    return BundleSymTensor.zeros(GeometrySetup(3, 1))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def fast() -> OptimizerConfig:
    return FAST


@pytest.fixture
def unit_space_form():
    return SpaceForm(1.0)
