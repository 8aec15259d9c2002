"""Two-term step-length error elimination.

A quantity computed with step h is modelled as

    T(h) = T* + A (h/u)^p + B (h/u)^(p+2),

with u a reference length used to nondimensionalise the steps.  Three runs
at h1 < h2 < h3 give two differences, which fix A and B; T* then follows
from any one of the runs.  The corrected value does not depend on u, while
A and B scale as u^p and u^(p+2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .observables import TMatrixTable

__all__ = [
    "StepTriple",
    "ErrorModel",
    "CorrectedTable",
    "MetadataMismatch",
    "DEFAULT_STEPS",
    "DEFAULT_UNIT",
    "extrapolation_weights",
    "two_term_correct",
    "correct_table",
]

DEFAULT_STEPS = (0.0075, 0.009, 0.01)
DEFAULT_UNIT = 0.005


class MetadataMismatch(ValueError):
    """Tables handed to the correction do not describe the same run family."""


@dataclass(frozen=True)
class StepTriple:
    """Three step lengths (a.u.) and the unit they are measured in."""

    h1: float
    h2: float
    h3: float
    unit: float = DEFAULT_UNIT

    def __post_init__(self):
        if not self.unit > 0:
            raise ValueError(f"StepTriple unit must be positive, got {self.unit}")
        if not (0 < self.h1 < self.h2 < self.h3):
            raise ValueError(
                f"StepTriple requires 0 < h1 < h2 < h3, got ({self.h1}, {self.h2}, {self.h3})"
            )

    @classmethod
    def default(cls) -> "StepTriple":
        return cls(*DEFAULT_STEPS)

    @property
    def steps(self) -> tuple[float, float, float]:
        return (self.h1, self.h2, self.h3)

    def scaled(self) -> np.ndarray:
        """Steps in units of ``unit``."""
        return np.array(self.steps) / self.unit


@dataclass(frozen=True)
class ErrorModel:
    """Fitted error coefficients (per entry), in units of T per (h/unit)^p."""

    A: np.ndarray
    B: np.ndarray
    exponents: tuple[int, int] = (8, 10)
    unit: float = DEFAULT_UNIT

    def error(self, h: float) -> np.ndarray:
        p, q = self.exponents
        x = h / self.unit
        return self.A * x**p + self.B * x**q


@dataclass(frozen=True)
class CorrectedTable:
    Tstar: np.ndarray
    model: ErrorModel
    steps: StepTriple
    source: TMatrixTable = field(repr=False, compare=False, default=None)

    def as_table(self) -> TMatrixTable:
        """The corrected entries as a table, with ``h`` set to None."""
        src = self.source
        return TMatrixTable(
            entries=self.Tstar,
            degrees=src.degrees,
            symmetry=src.symmetry,
            energy=src.energy,
            h=None,
        )


def extrapolation_weights(steps: StepTriple, p: int = 8) -> tuple[float, float, float, float]:
    """Weights (wA21, wA32, wB21, wB32) with

        A = wA21 (T(h2) - T(h1)) + wA32 (T(h3) - T(h2))
        B = wB21 (T(h2) - T(h1)) + wB32 (T(h3) - T(h2))

    for the error model with exponents (p, p + 2), steps in ``steps.unit``.
    """
    if p < 1:
        raise ValueError(f"leading exponent must be positive, got {p}")
    h1, h2, h3 = steps.scaled()
    q = p + 2
    d21p, d32p = h2**p - h1**p, h3**p - h2**p
    d21q, d32q = h2**q - h1**q, h3**q - h2**q
    D = d21p * d32q - d32p * d21q
    scale = abs(d21p * d32q) + abs(d32p * d21q)
    if D == 0 or abs(D) <= 1e-13 * scale:
        raise ValueError(f"degenerate step choice {steps.steps}: error-model determinant vanishes")
    return (d32q / D, -d21q / D, -d32p / D, d21p / D)


def two_term_correct(t1, t2, t3, steps: StepTriple, p: int = 8):
    """Corrected value and error coefficients from three step-length results.

    Works entrywise on scalars or arrays (real or complex).

    Returns
    -------
    Tstar, A, B
    """
    t1, t2, t3 = (np.asarray(t) for t in (t1, t2, t3))
    wA21, wA32, wB21, wB32 = extrapolation_weights(steps, p)
    d21 = t2 - t1
    d32 = t3 - t2
    A = wA21 * d21 + wA32 * d32
    B = wB21 * d21 + wB32 * d32
    x1 = steps.h1 / steps.unit
    Tstar = t1 - A * x1**p - B * x1 ** (p + 2)
    if Tstar.ndim == 0:
        return Tstar[()], A[()], B[()]
    return Tstar, A, B


def correct_table(tables, steps: StepTriple | None = None, p: int = 8) -> CorrectedTable:
    """Entrywise two-term correction of three tables computed at h1 < h2 < h3.

    ``steps`` defaults to the tables' own step lengths with the default unit;
    when given, it must agree with them.
    """
    tables = list(tables)
    if len(tables) != 3:
        raise ValueError(f"need exactly three tables, got {len(tables)}")
    if any(t.h is None for t in tables):
        raise MetadataMismatch("every table must carry its step length")
    tables.sort(key=lambda t: t.h)
    ref = tables[0]
    for t in tables[1:]:
        if t.degrees != ref.degrees:
            raise MetadataMismatch(f"basis mismatch: {t.degrees} vs {ref.degrees}")
        if int(t.symmetry) != int(ref.symmetry):
            raise MetadataMismatch("tables mix singlet and triplet symmetry")
        if not np.isclose(t.energy, ref.energy, rtol=1e-12, atol=0.0):
            raise MetadataMismatch(f"energy mismatch: {t.energy} vs {ref.energy} Ry")
    hs = [t.h for t in tables]
    if steps is None:
        steps = StepTriple(*hs)
    elif not np.allclose(steps.steps, hs, rtol=1e-12, atol=0.0):
        raise MetadataMismatch(f"table step lengths {hs} do not match {steps.steps}")
    Tstar, A, B = two_term_correct(*(t.entries for t in tables), steps=steps, p=p)
    model = ErrorModel(A=A, B=B, exponents=(p, p + 2), unit=steps.unit)
    return CorrectedTable(Tstar=Tstar, model=model, steps=steps, source=ref)
