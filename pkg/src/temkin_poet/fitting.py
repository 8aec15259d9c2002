"""Model fits for SDCS curves.

Two families are supported, both in the secondary-electron energy x (Ry):

* ``LinLin``: y = a + b x + c |x - d|, a line with one kink at d;
* ``Poly``: y = sum_k coeffs[k] x^k with degree at most 6.

Before fitting, a few points at the extreme ends of the energy range can be
dropped when they sit far off a preliminary fit (see ``trim_extremes``).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Union

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "DataSet",
    "LinLin",
    "Poly",
    "FitModel",
    "FitError",
    "MAX_DEGREE",
    "KINK_GRID",
    "trim_extremes",
    "fit_linlin",
    "fit_poly",
    "eval_model",
    "residual_norm",
]

logger = logging.getLogger(__name__)

MAX_DEGREE = 6
KINK_GRID = 1000
# Robust outlier cut: residual > OUTLIER_SIGMAS * 1.4826 * MAD
OUTLIER_SIGMAS = 3.0
# Tukey bisquare tuning constant (95% efficiency for Gaussian residuals)
BISQUARE_C = 4.685


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class DataSet:
    """Samples (x in Ry, y in pi a0^2 / Ry) with optional weights.

    ``trimmed`` lists indices (into the full arrays) excluded from fits.
    """

    x: np.ndarray
    y: np.ndarray
    trimmed: tuple[int, ...] = ()
    weights: np.ndarray | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape:
            raise ValueError("x and y must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("data contain non-finite values")
        if x.size > 1 and np.any(np.diff(x) <= 0):
            raise ValueError("x must be strictly increasing")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "trimmed", tuple(sorted(int(i) for i in self.trimmed)))
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != x.shape or np.any(w <= 0):
                raise ValueError("weights must be positive and match the data length")
            object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.x.size

    @property
    def mask(self) -> np.ndarray:
        keep = np.ones(self.x.size, dtype=bool)
        keep[list(self.trimmed)] = False
        return keep

    def active(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(x, y, sqrt-weights) of the points that take part in fits."""
        m = self.mask
        w = np.ones(self.x.size) if self.weights is None else self.weights
        return self.x[m], self.y[m], np.sqrt(w[m])


@dataclass(frozen=True)
class LinLin:
    a: float
    b: float
    c: float
    d: float
    kink_identified: bool = True
    residual: float = float("nan")

    @property
    def coefficients(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.a + self.b * x + self.c * np.abs(x - self.d)


@dataclass(frozen=True)
class Poly:
    coeffs: tuple[float, ...]
    residual: float = float("nan")

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("polynomial needs at least one coefficient")
        if len(coeffs) - 1 > MAX_DEGREE:
            raise ValueError(f"degree {len(coeffs) - 1} exceeds {MAX_DEGREE}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def coefficients(self) -> tuple[float, ...]:
        return self.coeffs

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        # Horner, highest power first
        out = np.zeros_like(x) + self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            out = out * x + c
        return out


FitModel = Union[LinLin, Poly]


def eval_model(m: FitModel, x, axis: str = "energy", E: float | None = None):
    """Evaluate ``m`` at ``x``.

    ``axis="energy"`` takes x as the secondary-electron energy in Ry (the
    fit variable); ``axis="fraction"`` takes E_b/E and needs the total
    energy ``E`` in Ry.
    """
    if axis == "fraction":
        if E is None:
            raise ValueError("evaluation on the fraction axis needs the total energy E")
        x = np.asarray(x, dtype=float) * E
    elif axis != "energy":
        raise ValueError(f"axis must be 'energy' or 'fraction', got {axis!r}")
    out = m(x)
    return float(out) if np.ndim(out) == 0 else out


def residual_norm(m: FitModel, data: DataSet) -> float:
    x, y, sw = data.active()
    return float(np.linalg.norm(sw * (m(x) - y)))


# ----------------------------------------------------------------------------
# Polynomial fits
# ----------------------------------------------------------------------------


def fit_poly(data: DataSet, degree: int) -> Poly:
    """Weighted least-squares polynomial of ``degree`` on the monomial basis.

    Columns are scaled (x is divided by max |x|) before the solve.
    """
    if not (0 <= degree <= MAX_DEGREE):
        raise FitError(f"polynomial degree must lie in [0, {MAX_DEGREE}], got {degree}")
    x, y, sw = data.active()
    if x.size < degree + 1:
        raise FitError(f"degree {degree} needs at least {degree + 1} points, got {x.size}")
    scale = float(np.max(np.abs(x))) or 1.0
    V = np.vander(x / scale, degree + 1, increasing=True)
    sol, _, rank, sv = np.linalg.lstsq(sw[:, None] * V, sw * y, rcond=None)
    if rank < degree + 1:
        raise FitError(f"rank-deficient polynomial design (rank {rank} < {degree + 1})")
    coeffs = sol / scale ** np.arange(degree + 1)
    model = Poly(tuple(coeffs))
    return replace(model, residual=residual_norm(model, data))


# ----------------------------------------------------------------------------
# Kinked-line fits
# ----------------------------------------------------------------------------


def _linlin_at(x, y, sw, d):
    """Best (a, b, c) and residual sum of squares for a fixed kink d."""
    X = np.column_stack([np.ones_like(x), x, np.abs(x - d)]) * sw[:, None]
    sol, _, rank, _ = np.linalg.lstsq(X, sw * y, rcond=None)
    r = X @ sol - sw * y
    return sol, float(r @ r), rank


def _line(x, y, sw):
    X = np.column_stack([np.ones_like(x), x]) * sw[:, None]
    sol, _, rank, _ = np.linalg.lstsq(X, sw * y, rcond=None)
    return sol if rank == 2 else None


def _split_intersection(x, y, sw, d):
    """Kink position from separate lines fitted left and right of ``d``."""
    left = x < d
    if left.sum() < 2 or (~left).sum() < 2:
        return None
    p = _line(x[left], y[left], sw[left])
    q = _line(x[~left], y[~left], sw[~left])
    if p is None or q is None or q[1] == p[1]:
        return None
    cross = (p[0] - q[0]) / (q[1] - p[1])
    # the crossing must fall between the last left and first right sample
    if x[left][-1] <= cross <= x[~left][0]:
        return float(cross)
    return None


def fit_linlin(data: DataSet, grid: int = KINK_GRID) -> LinLin:
    """Least-squares y = a + b x + c |x - d|.

    d is located by scanning ``grid`` nodes across the x-range, refining the
    best node by golden-section search inside its neighbouring interval, and
    finally trying the crossing point of separate left/right line fits, which
    is the exact optimum when the data are noise-free.  (a, b, c) come from a
    linear solve at each trial d.
    """
    x, y, sw = data.active()
    if x.size < 4:
        raise FitError(f"kinked-line fit needs at least 4 points, got {x.size}")
    lo, hi = float(x[0]), float(x[-1])
    nodes = np.linspace(lo, hi, grid)
    sse = np.array([_linlin_at(x, y, sw, d)[1] for d in nodes])
    i = int(np.argmin(sse))
    best_d, best_sse = float(nodes[i]), float(sse[i])

    if 0 < i < grid - 1:
        f = lambda d: _linlin_at(x, y, sw, d)[1]
        res = minimize_scalar(f, bracket=(nodes[i - 1], nodes[i], nodes[i + 1]), method="golden", tol=1e-10)
        if lo <= res.x <= hi and res.fun <= best_sse:
            best_d, best_sse = float(res.x), float(res.fun)

    cross = _split_intersection(x, y, sw, best_d)
    if cross is not None:
        s = _linlin_at(x, y, sw, cross)[1]
        if s <= best_sse:
            best_d, best_sse = cross, s

    (a, b, c), _, rank = _linlin_at(x, y, sw, best_d)
    if rank < 2:
        raise FitError("degenerate design matrix: data are collinear in x")
    scale = float(np.max(np.abs(y))) or 1.0
    identified = rank == 3 and abs(c) * max(hi - lo, 1.0) > 1e-9 * scale
    if not identified:
        logger.warning("kink amplitude c is negligible; d = %.6g is not identifiable", best_d)
    model = LinLin(float(a), float(b), float(c), best_d, kink_identified=identified)
    return replace(model, residual=residual_norm(model, data))


# ----------------------------------------------------------------------------
# Trimming
# ----------------------------------------------------------------------------


def _robust_fit(data: DataSet, fit, start: FitModel, floor: float, iterations: int = 50):
    """Tukey-bisquare reweighted fit of all points in ``data``, seeded with ``start``.

    Returns the model and the robust scale (1.4826 times the median absolute
    residual of the final fit).
    """
    base = np.ones(len(data)) if data.weights is None else data.weights
    model = start
    weights = None
    scale = floor
    for _ in range(iterations):
        r = np.abs(model(data.x) - data.y)
        scale = max(1.4826 * float(np.median(r)), floor)
        u = r / (BISQUARE_C * scale)
        w = np.where(u < 1.0, (1.0 - u * u) ** 2, 0.0)
        w = np.maximum(w, 1e-12)
        if weights is not None and np.max(np.abs(w - weights)) < 1e-10:
            break
        weights = w
        model = fit(replace(data, weights=base * w, trimmed=()))
    r = np.abs(model(data.x) - data.y)
    return model, max(1.4826 * float(np.median(r)), floor)


def trim_extremes(
    data: DataSet,
    max_drop: int = 8,
    fit: Callable[[DataSet], FitModel] | None = None,
) -> DataSet:
    """Drop up to ``max_drop`` outlying points from the two ends of the range.

    Only the ``max_drop`` outermost points on each side are candidates.  A
    preliminary fit of all points is made robust to the outliers it is
    meant to find: it starts from a fit without the candidates and is then
    iterated with Tukey bisquare weights over the full data.  Candidates
    whose absolute residual exceeds 3 robust standard deviations (1.4826
    times the median absolute residual) are dropped, largest first, at most
    ``max_drop`` of them.  Ties go to the smaller index.  ``fit`` defaults to
    a degree-6 polynomial and must honour ``DataSet.weights``.
    """
    if max_drop < 0:
        raise ValueError("max_drop must be non-negative")
    n = len(data)
    cap = int(math.floor(0.1 * n))
    if max_drop > cap:
        raise FitError(f"max_drop = {max_drop} exceeds 10% of the {n} points (cap {cap})")
    if max_drop == 0:
        return data
    fit = fit or (lambda d: fit_poly(d, MAX_DEGREE))
    candidates = sorted((set(range(max_drop)) | set(range(n - max_drop, n))) - set(data.trimmed))
    full = replace(data, trimmed=())
    floor = 1e-9 * (float(np.max(np.abs(data.y))) or 1.0)
    try:
        start = fit(replace(full, trimmed=tuple(candidates)))
    except FitError:
        start = fit(full)
    model, scale = _robust_fit(full, fit, start, floor)
    resid = np.abs(model(data.x) - data.y)
    cut = OUTLIER_SIGMAS * scale
    flagged = sorted((i for i in candidates if resid[i] > cut), key=lambda i: (-resid[i], i))
    return replace(data, trimmed=data.trimmed + tuple(flagged[:max_drop]))
