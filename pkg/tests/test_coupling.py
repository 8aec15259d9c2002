import math

import mpmath
import numpy as np
import pytest

from temkin_poet.basis import ChannelBasis, Symmetry, angular_fn
from temkin_poet.coupling import (
    CouplingMatrix,
    charge_eigensystem,
    coupling_matrix,
    cusp_potential,
)


def oracle_alpha(n, m, s, P):
    """-<phi_n|C|phi_m>/P by adaptive mpmath quadrature split at pi/4."""
    mpmath.mp.dps = 20

    def f(a):
        a = float(a)
        if not 0.0 < a < 0.5 * math.pi:
            return 0.0  # the weighted integrand vanishes at both ends
        return (
            cusp_potential(a)
            * angular_fn(n, s, a)
            * angular_fn(m, s, a)
            * (math.sin(a) * math.cos(a)) ** 2
        )

    val = mpmath.quad(f, [0, mpmath.pi / 4, mpmath.pi / 2])
    return -float(val) * (4 * math.pi) ** 2 / P


@pytest.mark.parametrize("s, i, j", [(0, 0, 0), (0, 1, 3), (1, 0, 0), (1, 2, 5)])
def test_entries_against_adaptive_oracle(s, i, j):
    b = ChannelBasis.default(s)
    m = coupling_matrix(b, 1.3)
    ref = oracle_alpha(b.degrees[i], b.degrees[j], s, 1.3)
    assert m.values[i, j] == pytest.approx(ref, rel=1e-11, abs=1e-13)


def test_lowest_singlet_entry_value():
    # golden value, itself produced by the oracle above
    m = coupling_matrix(ChannelBasis.default(0), 1.0)
    assert m.values[0, 0] == pytest.approx(2.1948836977509587, rel=1e-13)


@pytest.mark.parametrize("s", [0, 1])
def test_symmetric_and_scaled(s):
    b = ChannelBasis.default(s)
    m1, m2 = coupling_matrix(b, 1.0).values, coupling_matrix(b, 2.5).values
    np.testing.assert_array_equal(m1, m1.T)
    np.testing.assert_allclose(2.5 * m2, m1, rtol=1e-15)


def test_split_panel_beats_single_panel():
    b = ChannelBasis.default(0)
    ref = coupling_matrix(b, 1.0, quad_order=200).values
    split = coupling_matrix(b, 1.0, quad_order=48).values
    single = coupling_matrix(b, 1.0, quad_order=48, split=False).values
    err_split = np.max(np.abs(split - ref))
    err_single = np.max(np.abs(single - ref))
    assert err_split < 1e-13
    assert err_single > 100 * err_split


def test_values_are_read_only():
    m = coupling_matrix(ChannelBasis.default(0, 2), 1.0)
    with pytest.raises(ValueError):
        m.values[0, 0] = 1.0


@pytest.mark.parametrize("kwargs", [{"P": 0.0}, {"P": -1.0}, {"P": 1.0, "quad_order": 8}])
def test_argument_validation(kwargs):
    with pytest.raises(ValueError):
        coupling_matrix(ChannelBasis.default(0, 2), **kwargs)


def test_cusp_potential():
    a = 0.3
    expected = -1 / math.cos(a) - 1 / math.sin(a) + 1 / math.cos(a)
    assert cusp_potential(a) == pytest.approx(expected, rel=1e-15)
    # symmetric about pi/4
    assert cusp_potential(0.2) == pytest.approx(cusp_potential(math.pi / 2 - 0.2), rel=1e-14)
    for bad in (0.0, math.pi / 2, [0.1, 0.0]):
        with pytest.raises(ValueError):
            cusp_potential(bad)


def test_charge_eigensystem():
    m = coupling_matrix(ChannelBasis.default(1), 1.7)
    eig = charge_eigensystem(m)
    assert np.all(np.diff(eig.eigenvalues) <= 0)
    np.testing.assert_allclose(eig.eigenvectors.T @ eig.eigenvectors, np.eye(6), atol=1e-13)
    np.testing.assert_allclose(eig.reconstruct(), m.values, atol=1e-13)
    for k in range(6):
        col = eig.eigenvectors[:, k]
        assert col[np.argmax(np.abs(col))] > 0


def test_charge_eigensystem_rejects_asymmetric():
    with pytest.raises(ValueError, match="not symmetric"):
        charge_eigensystem(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_to_rows():
    b = ChannelBasis(Symmetry.SINGLET, (0, 2))
    m = CouplingMatrix(values=np.array([[1.0, 2.0], [2.0, 3.0]]), momentum=1.0, basis=b)
    assert m.to_rows() == [(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 3.0)]
    assert m.size == 2
