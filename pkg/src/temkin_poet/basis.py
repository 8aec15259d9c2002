"""Channel bookkeeping and zero-angular-momentum hyperspherical harmonics.

With l1 = l2 = L = 0 the angular basis reduces to functions of the
hyperangle alone,

    phi_n^s(alpha) = N_n P_n^{(1/2,1/2)}(cos 2 alpha) / (4 pi),

nonzero only when s + n is even.  The factor 1/(4 pi) is the product of the
two constant spherical harmonics Y_00.  N_n is fixed so that

    (4 pi)^2 * int_0^{pi/2} phi_n phi_m sin^2(alpha) cos^2(alpha) d alpha = delta_nm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from typing import Sequence

import numpy as np

__all__ = [
    "Symmetry",
    "ChannelBasis",
    "AngularPoint",
    "nu_index",
    "jacobi",
    "jacobi_norm",
    "angular_fn",
    "gauss_legendre",
    "gram_matrix",
    "DEFAULT_QUAD_ORDER",
]

DEFAULT_QUAD_ORDER = 96
FOUR_PI = 4.0 * math.pi


class Symmetry(IntEnum):
    SINGLET = 0
    TRIPLET = 1

    @classmethod
    def parse(cls, value) -> "Symmetry":
        if isinstance(value, Symmetry):
            return value
        if isinstance(value, str):
            key = value.strip().lower()
            if key in ("singlet", "s0", "0"):
                return cls.SINGLET
            if key in ("triplet", "s1", "1"):
                return cls.TRIPLET
            raise ValueError(f"unknown symmetry {value!r}")
        if value in (0, 1):
            return cls(int(value))
        raise ValueError(f"symmetry must be 0 (singlet) or 1 (triplet), got {value!r}")

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class ChannelBasis:
    """Ordered set of Jacobi degrees for one spin symmetry."""

    symmetry: Symmetry
    degrees: tuple[int, ...]

    def __post_init__(self):
        sym = Symmetry.parse(self.symmetry)
        object.__setattr__(self, "symmetry", sym)
        degs = tuple(int(n) for n in self.degrees)
        object.__setattr__(self, "degrees", degs)
        if not degs:
            raise ValueError("basis needs at least one channel")
        for n in degs:
            if n < 0:
                raise ValueError(f"Jacobi degree must be >= 0, got {n}")
            if (int(sym) + n) % 2:
                raise ValueError(
                    f"degree {n} is annihilated by the {sym.label} symmetrization (s + n must be even)"
                )
        if any(b <= a for a, b in zip(degs, degs[1:])):
            raise ValueError(f"degrees must be strictly increasing, got {degs}")

    @classmethod
    def default(cls, symmetry, size: int = 6) -> "ChannelBasis":
        """Lowest ``size`` allowed degrees: 0,2,..,10 (singlet) or 1,3,..,11 (triplet)."""
        sym = Symmetry.parse(symmetry)
        return cls(sym, tuple(int(sym) + 2 * k for k in range(size)))

    def __len__(self) -> int:
        return len(self.degrees)

    @property
    def nus(self) -> np.ndarray:
        return np.array([nu_index(n) for n in self.degrees])

    @property
    def centrifugal(self) -> np.ndarray:
        """Diagonal nu (nu + 1) for every channel."""
        nu = self.nus
        return nu * (nu + 1.0)

    def pairs(self) -> list[tuple[int, int, int]]:
        """Row-major (label, n, n') with labels 1..N^2."""
        out = []
        label = 1
        for n in self.degrees:
            for m in self.degrees:
                out.append((label, n, m))
                label += 1
        return out


@dataclass(frozen=True)
class AngularPoint:
    alpha: float

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 0.5 * math.pi):
            raise ValueError(f"hyperangle must lie in [0, pi/2], got {self.alpha}")


def nu_index(n: int) -> float:
    """Effective angular index nu = 2n + 3/2 of the l1 = l2 = 0 channel n."""
    if n < 0:
        raise ValueError(f"Jacobi degree must be >= 0, got {n}")
    return 2.0 * n + 1.5


def jacobi(n: int, a: float, b: float, x):
    """Jacobi polynomial P_n^{(a,b)}(x) by forward three-term recurrence.

    ``x`` may be a scalar or an array; the result has the same shape.
    """
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    if a <= -1.0 or b <= -1.0:
        raise ValueError(f"Jacobi parameters must exceed -1, got a={a}, b={b}")
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0)
    for k in range(1, n):
        s = 2 * k + a + b
        c1 = 2.0 * (k + 1) * (k + a + b + 1) * s
        c2 = (s + 1.0) * ((s + 2.0) * s * x + a * a - b * b)
        c3 = 2.0 * (k + a) * (k + b) * (s + 2.0)
        p_prev, p = p, (c2 * p - c3 * p_prev) / c1
    return p if p.ndim else float(p)


def jacobi_norm(n: int, a: float, b: float) -> float:
    """int_{-1}^{1} (1-x)^a (1+x)^b P_n^{(a,b)}(x)^2 dx."""
    log_h = (
        (a + b + 1.0) * math.log(2.0)
        - math.log(2 * n + a + b + 1.0)
        + math.lgamma(n + a + 1.0)
        + math.lgamma(n + b + 1.0)
        - math.lgamma(n + a + b + 1.0)
        - math.lgamma(n + 1.0)
    )
    return math.exp(log_h)


@lru_cache(maxsize=None)
def _harmonic_norm(n: int) -> float:
    # sin^2 cos^2 d(alpha) = (1/8) sqrt(1 - x^2) dx with x = cos 2 alpha
    return math.sqrt(8.0 / jacobi_norm(n, 0.5, 0.5))


def angular_fn(basis_n: int, s, p) -> float | np.ndarray:
    """phi_n^s at hyperangle ``p`` (an AngularPoint, float or array of radians)."""
    sym = Symmetry.parse(s)
    alpha = p.alpha if isinstance(p, AngularPoint) else p
    alpha = np.asarray(alpha, dtype=float)
    if (int(sym) + basis_n) % 2:
        out = np.zeros_like(alpha)
    else:
        out = _harmonic_norm(basis_n) / FOUR_PI * jacobi(basis_n, 0.5, 0.5, np.cos(2.0 * alpha))
    out = np.asarray(out)
    return out if out.ndim else float(out)


def gauss_legendre(order: int, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def gram_matrix(basis: ChannelBasis, quad_order: int = DEFAULT_QUAD_ORDER) -> np.ndarray:
    """Overlap matrix of the basis under the hyperspherical measure."""
    alpha, w = gauss_legendre(quad_order, 0.0, 0.5 * math.pi)
    weight = w * (np.sin(alpha) * np.cos(alpha)) ** 2 * FOUR_PI**2
    phi = _basis_table(basis.degrees, basis.symmetry, alpha)
    return (phi * weight) @ phi.T


def _basis_table(degrees: Sequence[int], s, alpha: np.ndarray) -> np.ndarray:
    return np.array([angular_fn(n, s, alpha) for n in degrees])
