import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_jacobi

from temkin_poet.basis import (
    AngularPoint,
    ChannelBasis,
    Symmetry,
    angular_fn,
    gram_matrix,
    jacobi,
    jacobi_norm,
    nu_index,
)


@given(
    n=st.integers(0, 14),
    a=st.floats(-0.9, 3.0),
    b=st.floats(-0.9, 3.0),
    x=st.floats(-1.0, 1.0),
)
@settings(max_examples=200, deadline=None)
def test_jacobi_matches_scipy(n, a, b, x):
    ref = eval_jacobi(n, a, b, x)
    assert jacobi(n, a, b, x) == pytest.approx(ref, rel=1e-11, abs=1e-11)


def test_jacobi_array_shape_and_validation():
    x = np.linspace(-1, 1, 7).reshape(7, 1)
    assert jacobi(3, 0.5, 0.5, x).shape == (7, 1)
    assert isinstance(jacobi(0, 0.5, 0.5, 0.3), float)
    with pytest.raises(ValueError):
        jacobi(-1, 0.5, 0.5, 0.0)
    with pytest.raises(ValueError):
        jacobi(2, -1.0, 0.5, 0.0)


@pytest.mark.parametrize("n", [0, 1, 4, 9])
def test_jacobi_norm_against_quadrature(n):
    from scipy.integrate import quad

    val, _ = quad(lambda x: math.sqrt(1 - x * x) * eval_jacobi(n, 0.5, 0.5, x) ** 2, -1, 1, limit=200)
    assert jacobi_norm(n, 0.5, 0.5) == pytest.approx(val, rel=1e-10)


def test_nu_index():
    assert nu_index(0) == 1.5
    assert nu_index(5) == 11.5
    with pytest.raises(ValueError):
        nu_index(-2)


@pytest.mark.parametrize("n", range(8))
def test_exchange_parity(n):
    # alpha -> pi/2 - alpha flips cos(2 alpha), so P_n picks up (-1)^n
    alpha = np.linspace(0.01, 1.5, 11)
    s = n % 2
    lhs = angular_fn(n, s, 0.5 * math.pi - alpha)
    rhs = (-1) ** n * angular_fn(n, s, alpha)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-13, atol=1e-15)


def test_forbidden_degree_vanishes():
    assert angular_fn(1, Symmetry.SINGLET, 0.4) == 0.0
    assert angular_fn(2, Symmetry.TRIPLET, AngularPoint(0.4)) == 0.0


@pytest.mark.parametrize("sym", [Symmetry.SINGLET, Symmetry.TRIPLET])
def test_gram_identity(sym):
    g = gram_matrix(ChannelBasis.default(sym, 8))
    np.testing.assert_allclose(g, np.eye(8), atol=1e-12)


def test_gram_insensitive_to_quadrature():
    b = ChannelBasis.default(0)
    assert np.max(np.abs(gram_matrix(b, 48) - gram_matrix(b, 128))) < 1e-13


def test_default_bases():
    assert ChannelBasis.default(0).degrees == (0, 2, 4, 6, 8, 10)
    assert ChannelBasis.default("triplet").degrees == (1, 3, 5, 7, 9, 11)
    b = ChannelBasis.default(1, 3)
    np.testing.assert_allclose(b.centrifugal, b.nus * (b.nus + 1))
    assert len(b) == 3


def test_pairs_are_row_major():
    pairs = ChannelBasis(Symmetry.SINGLET, (0, 2)).pairs()
    assert pairs == [(1, 0, 0), (2, 0, 2), (3, 2, 0), (4, 2, 2)]


@pytest.mark.parametrize(
    "degrees, message",
    [((), "at least one"), ((0, 1), "s \\+ n must be even"), ((2, 0), "strictly increasing"), ((-2,), ">= 0")],
)
def test_basis_validation(degrees, message):
    with pytest.raises(ValueError, match=message):
        ChannelBasis(Symmetry.SINGLET, degrees)


@pytest.mark.parametrize("value, expected", [("Singlet", 0), ("s1", 1), (1, 1), (Symmetry.TRIPLET, 1)])
def test_symmetry_parse(value, expected):
    assert Symmetry.parse(value) == expected


@pytest.mark.parametrize("value", ["quartet", 2, None])
def test_symmetry_parse_rejects(value):
    with pytest.raises(ValueError):
        Symmetry.parse(value)


def test_angular_point_range():
    with pytest.raises(ValueError):
        AngularPoint(-0.1)
    with pytest.raises(ValueError):
        AngularPoint(2.0)
