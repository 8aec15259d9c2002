"""Channel coupling for the Temkin-Poet (cusp) interaction.

The net interaction in hyperangle form is

    C(alpha) = -1/cos(alpha) - 1/sin(alpha) + 1/max(cos(alpha), sin(alpha))

and the coupling entering the radial equations is

    alpha_nn' = -<phi_n | C | phi_n'> / P.

The max() switch puts a derivative kink at alpha = pi/4, so the angular
integral is done as two Gauss-Legendre panels meeting there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import DEFAULT_QUAD_ORDER, FOUR_PI, ChannelBasis, AngularPoint, _basis_table, gauss_legendre

__all__ = [
    "CouplingMatrix",
    "ChargeEigensystem",
    "EigensolveError",
    "cusp_potential",
    "coupling_matrix",
    "charge_eigensystem",
]


class EigensolveError(RuntimeError):
    pass


@dataclass(frozen=True)
class CouplingMatrix:
    values: np.ndarray
    momentum: float
    basis: ChannelBasis
    quad_order: int = DEFAULT_QUAD_ORDER

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def to_rows(self):
        """(row, col, value) triples for a debug dump."""
        n = self.size
        return [(i, j, float(self.values[i, j])) for i in range(n) for j in range(n)]


@dataclass(frozen=True)
class ChargeEigensystem:
    """Effective asymptotic charges q_k and the orthogonal rotation Q."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.T


def cusp_potential(p) -> float | np.ndarray:
    """C(alpha); endpoints are integrable singularities and are rejected."""
    alpha = p.alpha if isinstance(p, AngularPoint) else p
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha <= 0.0) or np.any(alpha >= 0.5 * math.pi):
        raise ValueError("cusp potential is singular at alpha = 0 and alpha = pi/2")
    c, s = np.cos(alpha), np.sin(alpha)
    out = -1.0 / c - 1.0 / s + 1.0 / np.maximum(c, s)
    return out if out.ndim else float(out)


def _reduced_integrand(alpha: np.ndarray) -> np.ndarray:
    # C(alpha) sin^2 cos^2 written without the 1/sin, 1/cos divisions
    c, s = np.cos(alpha), np.sin(alpha)
    return -s * c * (s + c) + (s * c) ** 2 / np.maximum(c, s)


def coupling_matrix(
    basis: ChannelBasis,
    P: float,
    quad_order: int = DEFAULT_QUAD_ORDER,
    split: bool = True,
) -> CouplingMatrix:
    """alpha_nn' for ``basis`` at hypermomentum ``P`` (a.u.).

    ``quad_order`` Gauss-Legendre nodes are used on each panel.  ``split=False``
    integrates over [0, pi/2] in one panel and exists for convergence studies.
    """
    if not P > 0:
        raise ValueError(f"hypermomentum must be positive, got {P}")
    if quad_order < 32:
        raise ValueError(f"quad_order must be >= 32, got {quad_order}")
    if split:
        a1, w1 = gauss_legendre(quad_order, 0.0, 0.25 * math.pi)
        a2, w2 = gauss_legendre(quad_order, 0.25 * math.pi, 0.5 * math.pi)
        alpha, w = np.concatenate([a1, a2]), np.concatenate([w1, w2])
    else:
        alpha, w = gauss_legendre(quad_order, 0.0, 0.5 * math.pi)
    phi = _basis_table(basis.degrees, basis.symmetry, alpha) * FOUR_PI
    g = (phi * (w * _reduced_integrand(alpha))) @ phi.T
    values = -0.5 * (g + g.T) / P
    return CouplingMatrix(values=values, momentum=float(P), basis=basis, quad_order=quad_order)


def charge_eigensystem(m: CouplingMatrix | np.ndarray) -> ChargeEigensystem:
    """Eigenvalues (descending) and eigenvectors of the coupling matrix.

    Each eigenvector is signed so its largest-magnitude component is positive.
    """
    values = m.values if isinstance(m, CouplingMatrix) else np.asarray(m, dtype=float)
    if not np.allclose(values, values.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(values).max())):
        raise ValueError("coupling matrix is not symmetric")
    try:
        lam, vec = np.linalg.eigh(values)
    except np.linalg.LinAlgError as exc:
        raise EigensolveError(f"eigensolve failed for matrix\n{values!r}") from exc
    order = np.argsort(lam)[::-1]
    lam, vec = lam[order], vec[:, order].copy()
    for k in range(vec.shape[1]):
        i = np.argmax(np.abs(vec[:, k]))
        if vec[i, k] < 0:
            vec[:, k] = -vec[:, k]
    return ChargeEigensystem(eigenvalues=lam, eigenvectors=vec)
