from __future__ import annotations

import numpy as np
import pytest

from src.extremizer import hyperplane_extrema
from src.frame_core import GeometrySetup
from src.gallery import GallerySpec, Kind, generate, hypersurface_from_principal_curvatures
from src.invariants import submanifold_relations
from src.utils import DomainError

from .conftest import FAST


S31 = GeometrySetup(3, 1)


def test_equality_shapes():
    assert np.array_equal(generate(GallerySpec(Kind.EQUALITY_R, S31, a=1.0, r=3.0)).comps[0], np.diag([1.0, 1.0, 2.0]))
    assert np.array_equal(generate(GallerySpec(Kind.EQUALITY_DELTA, S31, a=1.0)).comps[0], np.diag([1.0, 1.0, 2.0]))
    assert np.array_equal(generate(GallerySpec(Kind.EQUALITY_DELTA_HAT, S31, a=2.0)).comps[0], np.diag([2.0, 2.0, 1.0]))


def test_other_slices_are_zero():
    z = generate(GallerySpec(Kind.EQUALITY_DELTA, GeometrySetup(4, 3), a=0.5))
    assert np.all(z.comps[1:] == 0.0)


def test_zero_and_totally_geodesic():
    for kind in (Kind.ZERO, Kind.TOTALLY_GEODESIC):
        assert generate(GallerySpec(kind, GeometrySetup(4, 2))).norm_sq() == 0.0


def test_equality_r_validates_r():
    with pytest.raises(DomainError):
        GallerySpec(Kind.EQUALITY_R, S31, a=1.0, r=6.0)
    with pytest.raises(DomainError):
        GallerySpec(Kind.EQUALITY_R, S31, a=1.0)


def test_umbilical_has_constant_hyperplane_casorati():
    z = generate(GallerySpec("umbilical", GeometrySetup(4, 2), a=1.5))
    ex = hyperplane_extrema(z, FAST)
    assert ex.sup.value - ex.inf.value <= 1e-12
    assert submanifold_relations(z).tau_T_nor == pytest.approx(1.5**2)


def test_random_is_reproducible_and_bounded():
    spec = GallerySpec(Kind.RANDOM, GeometrySetup(5, 3), seed=42, scale=0.5)
    a, b = generate(spec), generate(spec)
    assert np.array_equal(a.comps, b.comps)
    assert a.max_abs() <= 0.5
    assert a.asymmetry == 0.0
    c = generate(GallerySpec(Kind.RANDOM, GeometrySetup(5, 3), seed=43, scale=0.5))
    assert not np.array_equal(a.comps, c.comps)


@pytest.mark.parametrize(
    "kappa, c, C, tau_nor",
    [
        ([1.0, 1.0, 1.0], 0.0, 1.0, 1.0),
        ([0.0, 0.0, 0.0], -1.0, 0.0, -1.0),
        ([1.0, 1.0, 2.0], 0.0, 2.0, 5.0 / 3.0),
    ],
)
def test_hypersurface_expected_values(kappa, c, C, tau_nor):
    point = hypersurface_from_principal_curvatures(kappa, c)
    assert point.casorati == pytest.approx(C)
    assert point.tau_nor == pytest.approx(tau_nor)
    b = submanifold_relations(point.zeta)
    assert b.tau_nor == pytest.approx(point.tau_nor)
    assert b.mean_curv_sq == pytest.approx(point.mean_curv_sq)


@pytest.mark.parametrize("c", [-1.0, 0.0, 1.0])
def test_gauss_identity_on_hypersurfaces(c):
    rng = np.random.default_rng(int(c) + 10)
    for _ in range(10):
        kappa = rng.uniform(-2.0, 2.0, size=int(rng.integers(2, 7)))
        b = submanifold_relations(hypersurface_from_principal_curvatures(kappa, c).zeta)
        n = kappa.shape[0]
        two_tau = n * (n - 1) * b.tau_nor
        assert b.gauss_identity_defect <= 1e-12 * (1.0 + abs(two_tau))
