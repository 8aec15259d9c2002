"""T-matrix tables and single differential cross-sections.

For an amplitude vector C the table T_nn' = C(n) conj(C(n')) is Hermitian
and of rank one.  The squared T-matrix element at final hyperangle alpha_0
is the quadratic form

    |T|^2 = sum_nn' T_nn' phi_n(alpha_0) phi_n'(alpha_0),

and the SDCS is kappa |T|^2 with an overall constant kappa (default 1) that
the pipeline carries through to every output.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .basis import ChannelBasis, Symmetry, angular_fn
from .matcher import AmplitudeVector

__all__ = [
    "RYDBERG_EV",
    "EnergyPartition",
    "TMatrixTable",
    "SdcsCurve",
    "incident_to_total",
    "tmatrix_table",
    "t_mod_squared",
    "sdcs_curve",
    "DEFAULT_SAMPLES",
]

# The pipeline uses 1 Ry = 13.6 eV so that 27.2, 40.8 and 54.4 eV map to 1, 2, 3 Ry.
RYDBERG_EV = 13.6

logger = logging.getLogger(__name__)
DEFAULT_SAMPLES = 80


def incident_to_total(incident_ev: float) -> float:
    """Final-channel energy (Ry) for an electron of ``incident_ev`` on ground-state hydrogen."""
    total = incident_ev / RYDBERG_EV - 1.0
    if not total > 0:
        raise ValueError(f"incident energy {incident_ev} eV is below the ionization threshold")
    return total


@dataclass(frozen=True)
class EnergyPartition:
    """Split of the final-channel energy between the two electrons (Ry)."""

    E_total: float
    E_b: float

    def __post_init__(self):
        if not self.E_total > 0:
            raise ValueError(f"total energy must be positive, got {self.E_total}")
        if not (0.0 <= self.E_b <= self.E_total):
            raise ValueError(f"E_b = {self.E_b} outside [0, {self.E_total}]")

    @classmethod
    def from_fraction(cls, E_total: float, fraction: float) -> "EnergyPartition":
        return cls(E_total, fraction * E_total)

    @property
    def fraction(self) -> float:
        return self.E_b / self.E_total

    @property
    def alpha0(self) -> float:
        """arctan(p2/p1); pi/2 exactly when E_b = E_total."""
        return math.atan2(math.sqrt(self.E_b), math.sqrt(self.E_total - self.E_b))

    @property
    def P(self) -> float:
        """Hypermomentum in a.u. (P^2 / 2 hartree = E_total)."""
        return math.sqrt(self.E_total)

    @property
    def momenta(self) -> tuple[float, float]:
        """(p1, p2) in a.u."""
        return math.sqrt(self.E_total - self.E_b), math.sqrt(self.E_b)


@dataclass(frozen=True)
class TMatrixTable:
    """T_nn' over the channel degrees, with the run it came from.

    ``h`` is the step length (a.u.) or None for an extrapolated table.
    """

    entries: np.ndarray
    degrees: tuple[int, ...]
    symmetry: Symmetry
    energy: float
    h: float | None = None

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        n = len(self.degrees)
        if entries.shape != (n, n):
            raise ValueError(f"table shape {entries.shape} does not match {n} channels")
        if not np.all(np.isfinite(entries)):
            raise ValueError("table has non-finite entries")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        object.__setattr__(self, "symmetry", Symmetry.parse(self.symmetry))

    @property
    def basis(self) -> ChannelBasis:
        return ChannelBasis(self.symmetry, self.degrees)

    def rows(self):
        """(label, n, n', T) in row-major order with labels 1..N^2."""
        flat = self.entries.ravel()
        return [(label, n, m, flat[label - 1]) for label, n, m in self.basis.pairs()]

    def is_hermitian(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.entries - self.entries.conj().T) <= tol))


@dataclass(frozen=True)
class SdcsCurve:
    fractions: np.ndarray
    values: np.ndarray
    symmetry: Symmetry
    energy: float
    tag: str
    kappa: float = 1.0

    def __post_init__(self):
        f = np.asarray(self.fractions, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if f.shape != v.shape or f.ndim != 1:
            raise ValueError("fractions and values must be 1-D arrays of equal length")
        if f.size and (f[0] < 0 or f[-1] > 1 or np.any(np.diff(f) <= 0)):
            raise ValueError("fractions must be strictly increasing within [0, 1]")
        if not np.all(np.isfinite(v)):
            raise ValueError("SDCS values must be finite")
        object.__setattr__(self, "fractions", f)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "symmetry", Symmetry.parse(self.symmetry))

    @property
    def energies(self) -> np.ndarray:
        """Secondary-electron energies E_b in Ry."""
        return self.fractions * self.energy

    def symmetry_defect(self) -> float:
        """max |v(f) - v(1-f)| / max |v| over mirrored sample pairs."""
        scale = float(np.max(np.abs(self.values))) or 1.0
        return float(np.max(np.abs(self.values - self.values[::-1]))) / scale


def tmatrix_table(C: AmplitudeVector, h: float | None) -> TMatrixTable:
    """Rank-one table T_nn' = C(n) conj(C(n'))."""
    c = np.asarray(C.C, dtype=complex)
    outer = np.outer(c, c.conj())
    # complex rounding leaves ~1e-17 imaginary parts on the diagonal
    return TMatrixTable(
        entries=0.5 * (outer + outer.conj().T),
        degrees=C.degrees,
        symmetry=C.symmetry,
        energy=C.energy,
        h=h,
    )


def _phi_matrix(degrees, symmetry, alpha) -> np.ndarray:
    return np.array([np.atleast_1d(angular_fn(n, symmetry, alpha)) for n in degrees])


def t_mod_squared(T: TMatrixTable, part: EnergyPartition) -> float:
    """Hermitian quadratic form of ``T`` with the angular functions at alpha_0."""
    if not np.isclose(T.energy, part.E_total, rtol=1e-12, atol=0.0):
        raise ValueError(f"table energy {T.energy} Ry differs from partition energy {part.E_total} Ry")
    phi = _phi_matrix(T.degrees, T.symmetry, part.alpha0)[:, 0]
    return float(np.real(phi @ T.entries @ phi))


def sdcs_curve(
    T: TMatrixTable,
    E: float | None = None,
    num_samples: int = DEFAULT_SAMPLES,
    kappa: float = 1.0,
    tag: str | None = None,
) -> SdcsCurve:
    """kappa |T|^2 on a uniform grid of energy fractions E_b/E in [0, 1].

    ``tag`` defaults to the table's step length, or ``"corrected"`` when it
    has none.
    """
    if num_samples < 2:
        raise ValueError(f"need at least 2 samples, got {num_samples}")
    E = T.energy if E is None else E
    if not np.isclose(T.energy, E, rtol=1e-12, atol=0.0):
        raise ValueError(f"table energy {T.energy} Ry differs from requested {E} Ry")
    fractions = np.linspace(0.0, 1.0, num_samples)
    alpha = np.arctan2(np.sqrt(fractions), np.sqrt(1.0 - fractions))
    phi = _phi_matrix(T.degrees, T.symmetry, alpha)
    quad = np.einsum("ik,ij,jk->k", phi, T.entries, phi).real
    # rank-one tables give a semidefinite form: clip rounding-level negatives
    floor = 1e-12 * float(np.max(np.abs(quad), initial=0.0))
    if np.any(quad < -floor):
        logger.warning("SDCS quadratic form is negative at %d samples (table not semidefinite)", int(np.sum(quad < -floor)))
    quad = np.where((quad < 0) & (quad >= -floor), 0.0, quad)
    values = kappa * quad
    if tag is None:
        tag = "corrected" if T.h is None else f"h={T.h:g}"
    return SdcsCurve(fractions=fractions, values=values, symmetry=T.symmetry, energy=float(E), tag=tag, kappa=kappa)
