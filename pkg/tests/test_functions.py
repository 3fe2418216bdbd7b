import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hausdorff_choquet.content import ParameterError
from hausdorff_choquet.domains import Annulus, Ball, Box, Spire, rasterize
from hausdorff_choquet.functions import (DistancePower, FourierField, PowerProfile, RadialBump,
                                         SupportError, finite_difference_check, sample_function,
                                         signed_values, validate_support)


def test_bump_outside_support_is_zero():
    dom = rasterize(Box(), 6)
    f = sample_function(RadialBump((0.5, 0.5), 0.0, 0.1), dom)
    g = dom.geometry
    far = np.linalg.norm(g.centers - 0.5, axis=1) >= 0.1
    assert np.all(f.flat[far] == 0) and np.all(f.gradient_magnitude.reshape(-1)[far] == 0)


def test_power_profile_linear():
    dom = rasterize(Box(), 6)
    f = sample_function(PowerProfile(1.0), dom)
    occ = dom.set.flat
    np.testing.assert_allclose(f.flat[occ], dom.geometry.centers[occ, 0], rtol=1e-15)
    np.testing.assert_allclose(f.gradient_magnitude.reshape(-1)[occ], 1.0, rtol=1e-15)


def test_fourier_resolution_independent():
    # a level-6 centre is also a point of the level-8 lattice of centres shifted by
    # h8 * 1.5; sampling is pointwise, so any common point gets the same bits
    fn = FourierField(7, 3)
    dom6, dom7 = rasterize(Box(lo=0.0, hi=1.0), 6), rasterize(Box(lo=0.0, hi=1.0), 7)
    a, b = sample_function(fn, dom6), sample_function(fn, dom7)
    for f, dom in ((a, dom6), (b, dom7)):
        occ = dom.set.flat
        np.testing.assert_array_equal(f.flat[occ], np.abs(fn.value(dom.geometry.centers[occ])))
    X = dom6.geometry.centers[::37]
    one_by_one = np.array([fn.value(x[None])[0] for x in X])
    np.testing.assert_array_equal(fn.value(X), one_by_one)


def test_fourier_seed_determinism():
    X = np.random.default_rng(1).random((50, 2))
    np.testing.assert_array_equal(FourierField(5).value(X), FourierField(5).value(X))
    assert not np.array_equal(FourierField(5).value(X), FourierField(6).value(X))


def test_fourier_gradient_bound():
    fn = FourierField(3)
    X = np.random.default_rng(2).random((2000, 2))
    assert np.max(np.linalg.norm(fn.gradient(X), axis=1)) <= fn.gradient_bound() * (1 + 1e-12)


@given(st.floats(0.01, 20.0), st.integers(0, 50))
def test_sampling_commutes_with_scaling(a, seed):
    dom = rasterize(Ball(), 5)
    fn = FourierField(seed)
    base = sample_function(fn, dom)
    sc = sample_function(fn.scaled(a), dom)
    np.testing.assert_allclose(sc.values, a * base.values, rtol=1e-13, atol=1e-300)
    np.testing.assert_allclose(sc.gradient_magnitude, a * base.gradient_magnitude, rtol=1e-13, atol=1e-300)


def test_shift_changes_only_values():
    dom = rasterize(Box(), 5)
    fn = FourierField(2)
    u = signed_values(fn, dom)
    v = signed_values(fn.shifted(3.0), dom)
    occ = dom.set.flat
    np.testing.assert_allclose(v[occ], u[occ] + 3.0, rtol=1e-14)
    g0 = sample_function(fn, dom).gradient_magnitude
    g1 = sample_function(fn.shifted(3.0), dom).gradient_magnitude
    np.testing.assert_array_equal(g0, g1)


def test_gradients_match_numeric_derivative():
    X = np.random.default_rng(4).uniform(0.3, 0.7, (40, 2))
    eps = 1e-6
    for fn in (FourierField(1), RadialBump((0.5, 0.5), 0.05, 0.3), PowerProfile(2.5, origin=0.0),
               DistancePower(2.0).bind(Ball())):
        num = np.stack([(fn.value(X + eps * e) - fn.value(X - eps * e)) / (2 * eps)
                        for e in np.eye(2)], axis=1)
        np.testing.assert_allclose(fn.gradient(X), num, atol=1e-6)


def test_compact_support_certificate():
    dom = rasterize(Annulus(0.25, 0.45), 7)
    validate_support(RadialBump((0.85, 0.5), 0.0, 0.08), dom)
    g = dom.geometry
    near = dom.set.flat & (dom.dist.reshape(-1) <= g.h)
    f = sample_function(RadialBump((0.85, 0.5), 0.02, 0.09), dom, compact=True)
    assert np.all(f.flat[near] == 0) and np.all(f.gradient_magnitude.reshape(-1)[near] == 0)
    with pytest.raises(SupportError):
        validate_support(RadialBump((0.85, 0.5), 0.0, 0.12), dom)
    with pytest.raises(SupportError):
        validate_support(FourierField(0), dom)


def test_fd_affine_exact():
    for a in (1.0, 2.0):
        assert finite_difference_check(PowerProfile(a), rasterize(Box(), 6)) <= 1e-12


def test_fd_bump_fourth_order():
    dom = rasterize(Annulus(0.25, 0.45), 8)
    assert finite_difference_check(RadialBump((0.85, 0.5), 0.0, 0.09), dom, order=4) <= 1e-3


def test_fd_fourier_second_order_rate():
    fn = FourierField(7)
    dom = rasterize(Box(), 6)
    e6 = finite_difference_check(fn, dom, L=6)
    e8 = finite_difference_check(fn, dom, L=8)
    assert 10.0 <= e6 / e8 <= 20.0


def test_fd_parameter_checks():
    dom = rasterize(Box(), 4)
    with pytest.raises(ParameterError):
        finite_difference_check(PowerProfile(1.0), dom)
    with pytest.raises(ParameterError):
        finite_difference_check(PowerProfile(1.0), rasterize(Box(), 6), order=3)


def test_power_profile_on_spire_starts_at_tip():
    sp = Spire(1.5)
    fn = PowerProfile(2.0).bind(sp)
    tip = sp.from_local(np.array([0.0, 0.0]))
    assert fn.value(tip[None])[0] == pytest.approx(0.0, abs=1e-15)


def test_bad_bump_radii():
    with pytest.raises(ParameterError):
        RadialBump((0.5, 0.5), 0.2, 0.1)
