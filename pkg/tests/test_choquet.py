import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hausdorff_choquet.choquet import (check_choquet_axioms, check_content_embedding,
                                       choquet_integral, choquet_integral_power, integrate)
from hausdorff_choquet.content import ParameterError, content_value, superlevel_contents
from hausdorff_choquet.grid import GridFunction, GridGeometry, GridSet

from conftest import random_function, random_set

GEO = GridGeometry(2, 4)


def test_power_identity_on_indicator(rng):
    e = random_set(GEO, rng)
    f = GridFunction.indicator(e, 2.0)
    r = choquet_integral_power(f, 2.0, 1.0)
    assert r.value == pytest.approx(4.0 * content_value(e, 1.0), rel=1e-14)
    assert r.residual <= 1e-12


def test_indicator_integral_is_content(rng):
    e = random_set(GEO, rng)
    assert integrate(GridFunction.indicator(e), 1.5) == pytest.approx(content_value(e, 1.5), rel=1e-15)


def test_zero_function():
    v = choquet_integral(GridFunction.zeros(GEO), 1.0)
    assert v.value == 0.0 and v.levels_used == 0


@given(st.integers(0, 10**6), st.floats(0.3, 4.0), st.sampled_from([0.5, 1.0, 2.0]))
def test_power_residual(seed, p, delta):
    rng = np.random.default_rng(seed)
    f = random_function(GEO, rng)
    r = choquet_integral_power(f, p, delta)
    assert r.residual <= 1e-10 * max(1.0, r.value)


def test_extra_levels_do_not_change_value(rng):
    # resampling the step content at a superset of thresholds gives the same sum
    f = random_function(GEO, rng, levels=6)
    d = 1.3
    exact = choquet_integral(f, d).value
    t = np.unique(np.concatenate(([0.0], f.flat, rng.uniform(0, f.max(), 25))))
    c = superlevel_contents(GEO, f.flat, t[:-1], d)
    assert math.fsum(np.diff(t) * c) == pytest.approx(exact, rel=1e-13)


@given(st.integers(0, 10**6), st.floats(0.01, 3.0))
def test_truncation_monotone(seed, cap):
    rng = np.random.default_rng(seed)
    f = random_function(GEO, rng)
    g = f.with_values(np.minimum(f.values, cap))
    assert integrate(g, 1.0) <= integrate(f, 1.0) * (1 + 1e-14)


@given(st.integers(0, 10**6), st.floats(0.0, 10.0))
def test_homogeneity(seed, a):
    f = random_function(GEO, np.random.default_rng(seed))
    assert integrate(f.scaled(a), 1.2) == pytest.approx(a * integrate(f, 1.2), rel=1e-13, abs=1e-300)


def test_quantized_brackets_exact(rng):
    f = GridFunction.on(GridSet.full(GEO), rng.random(GEO.shape))
    exact = choquet_integral(f, 1.0).value
    for k in (4, 16, 64):
        q = choquet_integral(f, 1.0, quantized=k)
        assert abs(q.value - exact) <= q.error_bound * (1 + 1e-12) + 1e-15
    with pytest.raises(ParameterError):
        choquet_integral(f, 1.0, quantized=0)


def test_embedding_on_indicator(rng):
    e = random_set(GEO, rng)
    rep = check_content_embedding(GridFunction.indicator(e), 1.0, 2.0)
    assert rep.passed
    # for chi_E: H^2(E) <= 2 H^1(E)^2
    assert rep.lhs == pytest.approx(content_value(e, 2.0))
    assert rep.rhs == pytest.approx(2.0 * content_value(e, 1.0) ** 2)


def test_embedding_needs_increasing_deltas(rng):
    with pytest.raises(ParameterError):
        check_content_embedding(random_function(GEO, rng), 2.0, 1.0)


def test_axiom_suite(rng):
    for d in (0.5, 1.0, 1.5, 2.0):
        f, g = random_function(GEO, rng), random_function(GEO, rng)
        rep = check_choquet_axioms(f, g, d)
        assert rep.passed, rep.lines()


def test_power_rejects_nonpositive_p(rng):
    with pytest.raises(ParameterError):
        choquet_integral_power(random_function(GEO, rng), 0.0, 1.0)
