import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrleak.source import (
    NoEquivalentSource,
    SourceCharacterization,
    correlation_adjusted_vacuum,
    equivalent_intensity,
    equivalent_source,
    vacuum_bounds_from_intensity,
)


def test_xi_zero_leaves_bounds():
    src = SourceCharacterization(0, 0.97, 0.41, 0.3)
    assert correlation_adjusted_vacuum(src) == (0.97, 0.41)


def test_perfect_vacuum_unchanged():
    assert correlation_adjusted_vacuum(SourceCharacterization(7, 1.0, 1.0, 0.2)) == (1.0, 1.0)


def test_adjusted_high_precision():
    v0, v1 = correlation_adjusted_vacuum(SourceCharacterization(2, 0.999, 0.60, 0.1))
    assert v0 == pytest.approx(0.91025009176285564543, rel=1e-12)
    assert v1 == pytest.approx(0.54669675180952291017, rel=1e-12)


def test_equivalent_intensity_identities():
    assert equivalent_intensity(1.0, 1.0) == 0.0
    assert equivalent_intensity(1.0, math.exp(-0.1)) == pytest.approx(0.1, rel=1e-14)


def test_equivalent_intensity_high_precision():
    assert equivalent_intensity(0.99, 0.90) == pytest.approx(0.18356142057916668812, rel=1e-12)


@pytest.mark.parametrize("v0,v1", [(0.5, 0.5), (0.3, 0.6), (0.0, 1.0), (0.2, 0.1)])
def test_no_equivalent_source(v0, v1):
    with pytest.raises(NoEquivalentSource):
        equivalent_intensity(v0, v1)


def test_vacuum_bounds_from_intensity():
    assert vacuum_bounds_from_intensity(0.0, 0.3) == (1.0, 1.0)
    assert vacuum_bounds_from_intensity(0.5, 0.0) == (1.0, math.exp(-0.5))
    v0, v1 = vacuum_bounds_from_intensity(0.5, 1e-3)
    assert v0 == pytest.approx(0.99950012497916927057, rel=1e-14)
    assert v1 == pytest.approx(0.6065306597126334236, rel=1e-14)
    with pytest.raises(ValueError):
        vacuum_bounds_from_intensity(-0.1, 0.0)


@pytest.mark.parametrize("mu", [1e-4, 1e-3, 0.01, 0.1, 1.0, 5.0])
def test_round_trip(mu):
    src = SourceCharacterization.from_intensity(0, mu, 0.0, 0.4)
    assert equivalent_source(src).mu_equ == pytest.approx(mu, rel=1e-12)


@pytest.mark.parametrize("mu", [1e-8, 1e-7, 1e-6, 1e-5])
def test_round_trip_tiny_intensity_is_conditioning_limited(mu):
    src = SourceCharacterization.from_intensity(0, mu, 0.0, 0.4)
    assert abs(equivalent_source(src).mu_equ - mu) <= np.finfo(float).eps


def test_validation():
    with pytest.raises(ValueError):
        SourceCharacterization(0, 1.2, 0.5, 0.3)
    with pytest.raises(ValueError):
        SourceCharacterization(0, 0.9, 0.5, 1.0)
    with pytest.raises(ValueError):
        SourceCharacterization(-1, 0.9, 0.5, 0.3)
    # v1 > v0 is allowed
    SourceCharacterization(0, 0.5, 0.9, 0.3)


def test_mu_equ_monotone_grid():
    grid = np.linspace(0.5, 1.0, 50)
    mu = np.full((50, 50), np.nan)
    for i, a in enumerate(grid):
        for j, b in enumerate(grid):
            try:
                mu[i, j] = equivalent_intensity(a, b)
            except NoEquivalentSource:
                mu[i, j] = np.inf
    # nonincreasing along both axes
    assert np.all(np.diff(mu, axis=0) <= 1e-12)
    assert np.all(np.diff(mu, axis=1) <= 1e-12)


@settings(max_examples=60, deadline=None)
@given(
    mu=st.floats(1e-4, 0.3),
    delta=st.floats(0, 0.01),
    p=st.floats(0.01, 0.9),
)
def test_xi_degradation(mu, delta, p):
    prev_v, prev_mu = None, 0.0
    for xi in range(0, 6):
        src = SourceCharacterization.from_intensity(xi, mu, delta, p)
        v0, v1 = correlation_adjusted_vacuum(src)
        if prev_v is not None:
            assert v0 < prev_v[0] and v1 < prev_v[1]
        prev_v = (v0, v1)
        try:
            m = equivalent_intensity(v0, v1)
        except NoEquivalentSource:
            break
        assert m >= prev_mu
        prev_mu = m
