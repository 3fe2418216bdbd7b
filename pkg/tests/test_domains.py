import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hausdorff_choquet.content import ParameterError
from hausdorff_choquet.domains import (PRESET_DOMAINS, Annulus, Ball, Box, RoomWithCusp, Spire,
                                       closest_on_curve, domain_from_record, john_ball,
                                       outer_regularity_estimate, rasterize)
from hausdorff_choquet.grid import GridGeometry


def test_ball_area():
    dom = rasterize(Ball(), 6)
    expected = math.pi * 0.25 ** 2 / dom.geometry.h ** 2
    assert dom.set.count == pytest.approx(expected, rel=0.03)


def test_annulus_distance():
    ann = Annulus(0.25, 0.45)
    x = np.array([[0.5 + 0.35, 0.5], [0.5, 0.5 - 0.35]])
    np.testing.assert_allclose(ann.distance(x), 0.1, atol=1e-14)


@pytest.mark.parametrize("name", sorted(PRESET_DOMAINS))
def test_raster_invariants(name):
    spec = PRESET_DOMAINS[name]()
    dom = rasterize(spec, 6)
    g = dom.geometry
    occ = dom.set.flat
    d = dom.dist.reshape(-1)
    assert np.all(d[occ] > 0)
    assert np.all(d[~occ] == 0)
    assert d.max() <= math.sqrt(g.n)
    assert not np.any(spec.contains(g.centers[~occ]))
    assert dom.set.flat[dom.john_center]


@pytest.mark.parametrize("name", sorted(PRESET_DOMAINS))
def test_distance_lipschitz(name):
    dom = rasterize(PRESET_DOMAINS[name](), 6)
    g = dom.geometry
    occ = dom.set.occupied
    d = dom.dist
    for ax in range(g.n):
        a = [slice(None)] * g.n
        b = [slice(None)] * g.n
        a[ax], b[ax] = slice(0, -1), slice(1, None)
        both = occ[tuple(a)] & occ[tuple(b)]
        assert np.all(np.abs(d[tuple(a)] - d[tuple(b)])[both] <= g.h + 1e-9)


@pytest.mark.parametrize("name", sorted(PRESET_DOMAINS))
def test_refinement_symmetric_difference(name):
    spec = PRESET_DOMAINS[name]()
    diffs = []
    for L in (5, 6, 7):
        coarse = rasterize(spec, L).set.occupied
        fine = rasterize(spec, L + 1).set.occupied
        up = coarse.repeat(2, axis=0).repeat(2, axis=1)
        h = 2.0 ** -(L + 1)
        diffs.append(np.count_nonzero(up != fine) * h ** 2 / 2.0 ** -L)
    # measure / h stays bounded
    assert max(diffs) <= 8.0


def test_projection_lands_on_boundary():
    rng = np.random.default_rng(0)
    Y = rng.random((4000, 2))
    for spec in (Ball(), Box(), Annulus(0.25, 0.45), Spire(1.5), RoomWithCusp(4.0, 3.0),
                 RoomWithCusp(4.0, 1.0)):
        X = Y[spec.contains(Y)][:200]
        P = spec.project(X)
        assert np.all(np.linalg.norm(P - X, axis=1) <= spec.distance(X) + 1e-12)
        # points on the boundary are their own projection
        np.testing.assert_allclose(spec.distance(P), 0.0, atol=1e-8)


def test_spire_distance_against_dense_polyline():
    sp = Spire(1.5)
    t = np.linspace(0, 1, 200001)
    curve = np.stack([t, t ** 1.5], axis=1)
    base = np.stack([np.ones_like(t), t], axis=1)
    wall = sp.from_local(np.concatenate([curve, base]))
    X = sp.from_local(np.array([0.7, 0.1]))
    brute = np.min(np.linalg.norm(wall - X, axis=1))
    assert sp.distance(X[None])[0] == pytest.approx(brute, abs=1e-4)


def test_closest_on_curve_circle():
    P = np.array([[2.0, 0.0], [0.0, 0.5]])
    t, d2 = closest_on_curve(P, lambda t: (np.cos(t), np.sin(t)), 0.0, math.pi)
    np.testing.assert_allclose(np.sqrt(d2), [1.0, 0.5], atol=1e-9)
    assert t[0] == pytest.approx(0.0, abs=1e-6)


def test_spire_axis_cells_occupied():
    sp = Spire(1.5)
    dom = rasterize(sp, 7)
    g = dom.geometry
    for x in np.linspace(0.05, 0.95, 10):
        cell = g.index(g.cell_of(sp.from_local(np.array([x, 0.0]))))
        assert dom.set.flat[cell]


def test_outer_regularity_discriminates():
    L = 7
    radii = np.array([4, 8, 16]) * 2.0 ** -L
    for name in ("box", "ball", "annulus"):
        est = outer_regularity_estimate(rasterize(PRESET_DOMAINS[name](), L), radii)
        assert est.b >= 0.1, name
    bad = outer_regularity_estimate(rasterize(PRESET_DOMAINS["room-inward-cusp"](), L), radii)
    assert bad.per_radius[0] < 0.05


def test_outer_regularity_box_near_half():
    L = 7
    est = outer_regularity_estimate(rasterize(Box(), L), np.array([8]) * 2.0 ** -L)
    assert 0.4 <= est.b <= 0.5 + 1e-12


def test_cusp_estimate_nonincreasing_with_smaller_radii():
    dom = rasterize(PRESET_DOMAINS["room-inward-cusp"](), 7)
    h = dom.geometry.h
    big = outer_regularity_estimate(dom, np.array([8, 16]) * h).b
    more = outer_regularity_estimate(dom, np.array([2, 4, 8, 16]) * h).b
    assert more <= big


def test_john_ball_small_k_is_single_cell():
    dom = rasterize(Ball(), 6)
    b = john_ball(dom, 1e-3)
    assert b.count == 1 and b.flat[dom.john_center]


def test_john_ball_in_ball():
    dom = rasterize(Ball(), 7)
    b = john_ball(dom, 0.5)
    h = dom.geometry.h
    inrad = dom.dist.reshape(-1)[dom.john_center]
    assert b.count == pytest.approx(math.pi * (0.5 * inrad) ** 2 / h ** 2, rel=0.1)


def test_john_ball_spire_strictly_inside():
    dom = rasterize(Spire(1.5), 7)
    b = john_ball(dom, 0.5)
    assert b.count > 0 and b <= dom.set
    assert np.all(dom.dist.reshape(-1)[b.flat] > 0)
    with pytest.raises(ParameterError):
        john_ball(dom, 1.0)


def test_rasterize_level_floor():
    with pytest.raises(ParameterError):
        rasterize(Ball(), 2)


def test_three_dimensional_ball():
    dom = rasterize(Ball(center=(0.5, 0.5, 0.5), radius=0.3, n=3), 5)
    expected = 4 / 3 * math.pi * 0.3 ** 3 / dom.geometry.h ** 3
    assert dom.set.count == pytest.approx(expected, rel=0.05)
    assert dom.geometry == GridGeometry(3, 5)


def test_domain_records():
    spec = domain_from_record({"variant": "Annulus", "r": "0.2", "R": "0.4"})
    assert isinstance(spec, Annulus) and spec.R == 0.4
    assert isinstance(domain_from_record({"variant": "spire-1.5"}), Spire)
    with pytest.raises(ParameterError):
        domain_from_record({"variant": "torus"})
    with pytest.raises(ParameterError):
        domain_from_record({"variant": "Ball", "colour": "1"})


@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_analytic_distance_lipschitz(x0, y0, x1, y1):
    a, b = np.array([[x0, y0]]), np.array([[x1, y1]])
    for spec in (Annulus(0.25, 0.45), Spire(1.2), RoomWithCusp(4.0, 1.0)):
        assert abs(spec.distance(a)[0] - spec.distance(b)[0]) <= np.linalg.norm(a - b) + 1e-9
