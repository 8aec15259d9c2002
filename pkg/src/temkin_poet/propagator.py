"""Radial propagation of the coupled channel equations.

The equations are written as F'' = W(rho) F with

    W(rho) = nu(nu+1)/rho^2 - 1 - 2 A / rho,

A being the (already 1/P scaled) coupling matrix and nu(nu+1) diagonal.  F is
an N x N array whose columns are independent regular solutions.

Three stages are used:

* a Frobenius series (with the logarithmic terms forced by integer index
  differences) at the first SERIES_NODES inner nodes,
* a 7-node implicit finite-difference scheme over the inner region
  [0, P*Delta] with Delta = 100 h, solved globally as one banded system,
* order-10 Taylor stepping with step 2 P h out to P*R0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import solve_banded

from .basis import ChannelBasis
from .coupling import CouplingMatrix

__all__ = [
    "RadialGrid",
    "SolutionSet",
    "PropagationError",
    "STENCIL_WEIGHTS",
    "build_grid",
    "regular_series",
    "series_start",
    "fd_bvp_solve",
    "bessel_oracle_errors",
    "centered_derivative",
    "fd_inner_solve",
    "taylor_coefficients",
    "taylor_step",
    "taylor_outer_propagate",
    "measure_inner_order",
    "INNER_INTERVALS",
    "START_NODES",
    "SERIES_NODES",
]

INNER_INTERVALS = 100
START_NODES = 6
# Nodes taken from the series in the production inner solve.  Near the origin
# F ~ rho^(nu+1) is not smooth on the scale of the grid, so the difference
# rows closest to rho = 0 carry a relative error that does not shrink with h
# (about 4e-8 when only START_NODES are used, 1e-14 with 31).
SERIES_NODES = 31
# extra nodes marched past P*Delta so the slope there comes from a centred formula
OVERHANG = 5

# Weights b_j of the 7-node right-hand side in
#   F_{k-1} - 2 F_k + F_{k+1} = h^2 sum_j b_j (W F)_{k+j},
# fixed by Taylor matching through h^8 (local error O(h^10)).  The shifted
# variants serve the two rows next to the right boundary.
_STENCIL_FRACS = {
    "centred": [Fraction(31, 60480), Fraction(-73, 10080), Fraction(2171, 20160), Fraction(12067, 15120),
                Fraction(2171, 20160), Fraction(-73, 10080), Fraction(31, 60480)],
    "shift1": [Fraction(31, 60480), Fraction(-31, 10080), Fraction(71, 20160), Fraction(1357, 15120),
               Fraction(16451, 20160), Fraction(977, 10080), Fraction(-221, 60480)],
    "shift2": [Fraction(-221, 60480), Fraction(263, 10080), Fraction(-1609, 20160), Fraction(1987, 15120),
               Fraction(-769, 20160), Fraction(8999, 10080), Fraction(863, 12096)],
}
STENCIL_WEIGHTS = {key: np.array([float(f) for f in val]) for key, val in _STENCIL_FRACS.items()}

# 11-point centred first derivative, error O(h^10)
_D1 = np.array([1 / 1260, -5 / 504, 5 / 84, -5 / 21, 5 / 6])
_D1_WEIGHTS = np.concatenate([-_D1, [0.0], _D1[::-1]])


class PropagationError(RuntimeError):
    pass


@dataclass(frozen=True)
class RadialGrid:
    """Inner nodes rho_k = k P h on [0, P Delta]; outer steps 2 P h up to P R0."""

    h: float
    R0: float
    P: float

    @property
    def delta(self) -> float:
        return INNER_INTERVALS * self.h

    @property
    def inner_step(self) -> float:
        return self.P * self.h

    @property
    def outer_step(self) -> float:
        return 2.0 * self.P * self.h

    @property
    def rho_delta(self) -> float:
        return self.P * self.delta

    @property
    def rho_match(self) -> float:
        return self.P * self.R0

    def inner_nodes(self, overhang: int = 0) -> np.ndarray:
        return self.inner_step * np.arange(INNER_INTERVALS + 1 + overhang)

    @property
    def outer_steps(self) -> int:
        """Number of outer Taylor steps (the last one may be shorter)."""
        span = self.rho_match - self.rho_delta
        return int(math.ceil(span / self.outer_step - 1e-9))

    def outer_nodes(self) -> np.ndarray:
        n = self.outer_steps
        nodes = self.rho_delta + self.outer_step * np.arange(n + 1)
        nodes[-1] = self.rho_match
        return nodes

    @property
    def node_count(self) -> int:
        return INNER_INTERVALS + 1 + self.outer_steps


def build_grid(h: float, R0: float, P: float) -> RadialGrid:
    if not h > 0:
        raise ValueError(f"step length must be positive, got {h}")
    if not P > 0:
        raise ValueError(f"hypermomentum must be positive, got {P}")
    if not R0 > INNER_INTERVALS * h:
        raise ValueError(f"R0 = {R0} must exceed Delta = 100 h = {INNER_INTERVALS * h}")
    return RadialGrid(h=float(h), R0=float(R0), P=float(P))


@dataclass
class SolutionSet:
    """Columns of independent regular solutions on a set of nodes.

    ``values[k]`` is the N x N matrix (channel, column) at ``rho[k]``.  The
    columns are ``original_columns @ transform``, where the original columns
    are the series-normalised regular solutions (leading term rho^(nu_j+1) in
    channel j).  ``derivs`` is filled only where slopes are known.
    """

    rho: np.ndarray
    values: np.ndarray
    derivs: np.ndarray | None = None
    transform: np.ndarray | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.transform is None:
            self.transform = np.eye(self.values.shape[-1])

    @property
    def size(self) -> int:
        return self.values.shape[-1]

    def end_state(self) -> tuple[float, np.ndarray, np.ndarray]:
        if self.derivs is None:
            raise ValueError("no slope tabulated at the last node")
        return float(self.rho[-1]), self.values[-1], self.derivs[-1]

    def condition_number(self, k: int = -1) -> float:
        """Condition number of the column-normalised value matrix at node ``k``."""
        v = self.values[k]
        v = v / np.linalg.norm(v, axis=0)
        return float(np.linalg.cond(v))


# ----------------------------------------------------------------------------
# Series start
# ----------------------------------------------------------------------------


def _series_coefficients(nu: np.ndarray, A: np.ndarray, terms: int) -> list[np.ndarray]:
    """Frobenius coefficients for every column.

    Returns a list over columns j of arrays c[k, i, m] such that column j is
    sum_k sum_m c[k, i, m] rho^(nu_j + 1 + k) (ln rho)^m.
    """
    n = len(nu)
    lam = nu * (nu + 1.0)
    out = []
    for j in range(n):
        mmax = n
        c = np.zeros((terms + 1, n, mmax + 2))
        c[0, j, 0] = 1.0
        for k in range(1, terms + 1):
            s = nu[j] + 1.0 + k
            rhs = 2.0 * (A @ c[k - 1])
            if k >= 2:
                rhs += c[k - 2]
            for i in range(n):
                resonant = abs((nu[i] - nu[j]) - k) < 1e-12
                if resonant:
                    # indicial factor vanishes: c[k,i,0] is free (0), logs absorb the rest
                    for m in range(mmax, -1, -1):
                        acc = rhs[i, m]
                        if m + 2 <= mmax + 1:
                            acc += (m + 2) * (m + 1) * c[k, i, m + 2]
                        c[k, i, m + 1] = -acc / ((m + 1) * (2.0 * s - 1.0))
                    c[k, i, 0] = 0.0
                else:
                    d = s * (s - 1.0) - lam[i]
                    for m in range(mmax + 1, -1, -1):
                        acc = rhs[i, m]
                        if m + 1 <= mmax + 1:
                            acc += (m + 1) * (2.0 * s - 1.0) * c[k, i, m + 1]
                        if m + 2 <= mmax + 1:
                            acc += (m + 2) * (m + 1) * c[k, i, m + 2]
                        c[k, i, m] = -acc / d
        out.append(c)
    return out


def regular_series(
    nu,
    A,
    rho,
    terms: int = 16,
    derivative: bool = False,
):
    """Evaluate the regular solutions of F'' = W F from their series at ``rho``.

    Parameters
    ----------
    nu : array_like
        Channel indices nu_i.
    A : array_like
        Coupling matrix (dimensionless, same channel order as ``nu``).
    rho : array_like
        Evaluation points, rho >= 0.
    terms : int
        Number of correction orders beyond the leading power.
    derivative : bool
        Also return d/d rho.

    Returns
    -------
    values : ndarray, shape (len(rho), N, N)
        ``values[p, i, j]`` is channel i of column j; column j starts as
        rho^(nu_j + 1) in channel j.
    """
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    A = np.atleast_2d(np.asarray(A, dtype=float))
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    coeffs = _series_coefficients(nu, A, terms)
    n = len(nu)
    vals = np.zeros((len(rho), n, n))
    ders = np.zeros_like(vals)
    pos = rho > 0
    r = rho[pos]
    logr = np.log(r)
    for j, c in enumerate(coeffs):
        mmax = c.shape[2] - 1
        for k in range(c.shape[0]):
            s = nu[j] + 1.0 + k
            pw = r**s
            for m in range(mmax + 1):
                cm = c[k, :, m]
                if not np.any(cm):
                    continue
                lm = logr**m
                vals[pos, :, j] += np.outer(pw * lm, cm)
                if derivative:
                    dl = s * lm + (m * logr ** (m - 1) if m else 0.0)
                    ders[pos, :, j] += np.outer(pw / r * dl, cm)
    return (vals, ders) if derivative else vals


def series_start(
    basis: ChannelBasis,
    coupling: CouplingMatrix,
    grid: RadialGrid,
    terms: int = 16,
    nodes: int = SERIES_NODES,
) -> np.ndarray:
    """Regular-solution values at the first ``nodes`` inner nodes, shape (nodes, N, N)."""
    if coupling.basis != basis or abs(coupling.momentum - grid.P) > 1e-14 * grid.P:
        raise ValueError("coupling matrix was built for a different basis or momentum")
    rho = grid.inner_step * np.arange(nodes)
    return regular_series(basis.nus, coupling.values, rho, terms=terms)


# ----------------------------------------------------------------------------
# Inner region
# ----------------------------------------------------------------------------


def _weight(rho: float, lam: np.ndarray, A: np.ndarray, n: int) -> np.ndarray:
    w = -2.0 * A / rho
    w[np.diag_indices(n)] += lam / rho**2 - 1.0
    return w


def _stencil_for(k: int, n_nodes: int, weights=None):
    """(weights, first node) of the F'' stencil used on row ``k``."""
    w = STENCIL_WEIGHTS if weights is None else weights
    if k + 3 <= n_nodes - 1:
        return w["centred"], k - 3
    if k + 2 == n_nodes - 1:
        return w["shift1"], k - 4
    return w["shift2"], k - 5


def _assemble(weight, rho0, h, n_nodes, left, right, weights, zero, one):
    """Dense system for the unknowns [c, F_6, ..., F_{n-2}] (see fd_bvp_solve)."""
    n_left, n, nc = left.shape
    m = right.shape[1]
    size = nc + n * (n_nodes - n_left - 1)
    A = np.full((size, size), zero, dtype=left.dtype)
    rhs = np.full((size, m), zero, dtype=left.dtype)
    eye = np.eye(n, dtype=left.dtype)
    if left.dtype == object:
        eye = np.where(eye == 1, one, zero).astype(object)
    h2 = h * h
    W = {}

    def w_at(node):
        if node not in W:
            rho = rho0 + node * h
            W[node] = weight(rho) if rho > 0 else np.full((n, n), zero, dtype=left.dtype)
        return W[node]

    def add(rows, node, blk):
        if node < n_left:
            A[rows, :nc] += blk @ left[node]
        elif node == n_nodes - 1:
            rhs[rows] -= blk @ right
        else:
            col = nc + n * (node - n_left)
            A[rows, col : col + n] += blk

    for e, k in enumerate(range(n_left - 1, n_nodes - 1)):
        rows = slice(n * e, n * e + n)
        add(rows, k - 1, eye)
        add(rows, k, -2 * eye)
        add(rows, k + 1, eye)
        b, first = _stencil_for(k, n_nodes, weights)
        for j in range(7):
            add(rows, first + j, -(h2 * b[j]) * w_at(first + j))
    return A, rhs


def _band_solve_generic(A, rhs, lower: int, upper: int):
    """Gaussian elimination with partial pivoting inside the band.

    Works on object arrays (e.g. mpmath numbers); used for extended-precision
    order measurements where LAPACK is not available.
    """
    A = A.copy()
    rhs = rhs.copy()
    size = A.shape[0]
    width = lower + upper
    for j in range(size):
        last = min(size, j + lower + 1)
        piv = j + max(range(last - j), key=lambda i: abs(A[j + i, j]))
        if A[piv, j] == 0:
            raise PropagationError("singular band matrix")
        if piv != j:
            A[[j, piv]] = A[[piv, j]]
            rhs[[j, piv]] = rhs[[piv, j]]
        stop = min(size, j + width + 1)
        for i in range(j + 1, last):
            f = A[i, j] / A[j, j]
            if f != 0:
                A[i, j:stop] -= f * A[j, j:stop]
                rhs[i] -= f * rhs[j]
    x = rhs.copy()
    for j in range(size - 1, -1, -1):
        stop = min(size, j + width + 1)
        acc = rhs[j] - A[j, j + 1 : stop] @ x[j + 1 : stop]
        x[j] = acc / A[j, j]
    return x


def fd_bvp_solve(weight, rho0: float, h: float, n_nodes: int, left, right, precision=None):
    """Solve F'' = W(rho) F on equally spaced nodes as one banded system.

    Every node k from L - 1 to n_nodes - 2 carries the equation

        F_{k-1} - 2 F_k + F_{k+1} = h^2 sum_j b_j W_{k+j} F_{k+j}

    over a 7-node window (centred, or shifted near the right end).  The
    first L nodes (L >= 6) are tied to a given basis, F_k = left[k] @ c,
    with c an unknown coefficient matrix; the last node is fixed to
    ``right``.

    Parameters
    ----------
    weight : callable
        ``weight(rho)`` returns the N x N matrix W; never called at rho = 0.
    rho0, h : float
        First node and spacing.
    n_nodes : int
        Total number of nodes (>= 13).
    left : array, shape (L, N, K)
        Basis values on the first L nodes.
    right : array, shape (N, M)
        Values on the last node.
    precision : int, optional
        Decimal digits for an mpmath evaluation of the same scheme (slow;
        intended for order measurements).  Default is float64 with LAPACK.

    Returns
    -------
    values : ndarray, shape (n_nodes, N, M)
    c : ndarray, shape (K, M)
    """
    if precision is None:
        left = np.asarray(left, dtype=float)
        right = np.asarray(right, dtype=float)
    if left.ndim != 3 or left.shape[0] < START_NODES:
        raise ValueError(f"left basis must have shape (L, N, K) with L >= {START_NODES}")
    n_left = left.shape[0]
    if n_nodes < n_left + START_NODES + 1:
        raise ValueError(f"need at least {n_left + START_NODES + 1} nodes, got {n_nodes}")
    n, nc = left.shape[1:]
    if right.shape[0] != n:
        raise ValueError("right boundary values do not match the channel count")
    lower, upper = 6 * n - 1, 4 * n - 1
    if precision is None:
        # columns of the left basis can differ by tens of orders of magnitude
        scale = np.max(np.abs(left[-1]), axis=0)
        scale[scale == 0] = 1.0
        left = left / scale
        A, rhs = _assemble(weight, rho0, h, n_nodes, left, right, STENCIL_WEIGHTS, 0.0, 1.0)
        if not np.all(np.isfinite(A)):
            raise PropagationError("non-finite entry in the inner band matrix")
        ab = np.zeros((lower + upper + 1, A.shape[0]))
        for d in range(-lower, upper + 1):
            diag = np.diagonal(A, offset=d)
            if d >= 0:
                ab[upper - d, d:] = diag
            else:
                ab[upper - d, : A.shape[0] + d] = diag
        try:
            sol = solve_banded((lower, upper), ab, rhs, check_finite=False)
        except np.linalg.LinAlgError as exc:
            raise PropagationError("singular band matrix in the inner region; check h and the basis") from exc
        if not np.all(np.isfinite(sol)):
            raise PropagationError("singular band matrix in the inner region; check h and the basis")
        sol[:nc] /= scale[:, None]
        left = left * scale
        dtype = float
    else:
        import mpmath

        with mpmath.workdps(precision):
            weights = {key: [mpmath.mpf(f.numerator) / f.denominator for f in val] for key, val in _STENCIL_FRACS.items()}
            A, rhs = _assemble(weight, rho0, h, n_nodes, left, right, weights, mpmath.mpf(0), mpmath.mpf(1))
            sol = _band_solve_generic(A, rhs, lower, upper)
        dtype = object
    c = sol[:nc]
    values = np.empty((n_nodes, n, right.shape[1]), dtype=dtype)
    for k in range(n_left):
        values[k] = left[k] @ c
    values[n_left:-1] = sol[nc:].reshape(-1, n, right.shape[1])
    values[-1] = right
    return values, c


def centered_derivative(values: np.ndarray, k: int, h: float) -> np.ndarray:
    """O(h^10) centred first derivative at node ``k`` (needs 5 nodes each side)."""
    if k < 5 or k + 5 >= len(values):
        raise ValueError("centred derivative needs five nodes on each side")
    window = values[k - 5 : k + 6]
    return np.tensordot(_D1_WEIGHTS, window, axes=(0, 0)) / h


def fd_inner_solve(
    grid: RadialGrid,
    coupling: CouplingMatrix,
    starts: np.ndarray,
) -> SolutionSet:
    """Inner-region solution on rho in [0, P Delta] (plus a 5-node overhang).

    ``starts`` are the series values on the first few nodes (see
    ``series_start``).  The solution
    columns are normalised to the identity at the last overhang node, so the
    returned ``transform`` is the coefficient matrix relating them to the
    series-normalised regular solutions.  The slope at P Delta is stored in
    ``info["boundary_slope"]``.
    """
    lam = coupling.basis.centrifugal
    A = np.asarray(coupling.values)
    n = len(lam)
    h = grid.inner_step
    total = INNER_INTERVALS + 1 + OVERHANG
    y, c = fd_bvp_solve(lambda r: _weight(r, lam, A, n), 0.0, h, total, starts, np.eye(n))
    if not np.all(np.isfinite(y)):
        bad = int(np.argmax(~np.all(np.isfinite(y), axis=(1, 2))))
        raise PropagationError(f"non-finite value in inner region at node {bad}")
    cond = float(np.linalg.cond(c / np.max(np.abs(c), axis=1, keepdims=True)))
    if not cond < 1e14:
        raise PropagationError(f"inner coefficient matrix is ill-conditioned (cond = {cond:.3e})")
    slope = centered_derivative(y, INNER_INTERVALS, h)
    rho = grid.inner_nodes(OVERHANG)
    info = {"boundary_index": INNER_INTERVALS, "boundary_slope": slope, "coefficient_condition": cond}
    return SolutionSet(rho=rho, values=y, transform=c, info=info)


def bessel_oracle_errors(h: float, lo: float = 0.5, hi: float = 1.5, precision=None) -> float:
    """Max nodal error of the inner scheme on F'' + (1 - (15/4)/rho^2) F = 0.

    The exact solution sqrt(rho) J_2(rho) supplies the six left values and
    the right end value.  ``precision`` selects an mpmath evaluation.
    """
    n_nodes = int(math.floor((hi - lo) / h + 1e-9)) + 1
    if precision is None:
        from scipy.special import jv

        rho = lo + h * np.arange(n_nodes)
        exact = np.sqrt(rho) * jv(2, rho)
        y, _ = fd_bvp_solve(
            lambda r: np.array([[3.75 / r**2 - 1.0]]),
            lo, h, n_nodes, exact[:START_NODES, None, None], exact[-1:, None],
        )
        return float(np.max(np.abs(y[:, 0, 0] - exact)))
    import mpmath

    with mpmath.workdps(precision):
        hm = mpmath.mpf(h)
        lo_m = mpmath.mpf(lo)
        rho = [lo_m + k * hm for k in range(n_nodes)]
        exact = np.array([mpmath.sqrt(r) * mpmath.besselj(2, r) for r in rho], dtype=object)
        y, _ = fd_bvp_solve(
            lambda r: np.array([[mpmath.mpf(15) / 4 / r**2 - 1]], dtype=object),
            lo_m, hm, n_nodes,
            exact[:START_NODES].reshape(-1, 1, 1), exact[-1:].reshape(1, 1),
            precision=precision,
        )
        return float(max(abs(a - b) for a, b in zip(y[:, 0, 0], exact)))


def measure_inner_order(
    steps=(0.02, 0.01, 0.005),
    lo: float = 0.5,
    hi: float = 1.5,
    precision: int | None = 40,
) -> tuple[float, list[float]]:
    """Observed convergence order of the inner scheme on the Bessel test.

    The order is the least-squares slope of log(max error) against log(h).
    In float64 the truncation error of this scheme falls below rounding on
    this test, so by default the identical discrete equations are evaluated
    with ``precision`` decimal digits; pass ``precision=None`` for float64.
    """
    errors = [bessel_oracle_errors(h, lo, hi, precision) for h in steps]
    slope = np.polyfit(np.log(steps), np.log(errors), 1)[0]
    return float(slope), errors


# ----------------------------------------------------------------------------
# Outer region
# ----------------------------------------------------------------------------


def taylor_coefficients(rho0: float, F: np.ndarray, dF: np.ndarray, lam, A, order: int) -> np.ndarray:
    """Taylor coefficients f_k of F about rho0, from rho^2 F'' = (lam - rho^2 - 2 rho A) F.

    Multiplying through by rho^2 = (rho0 + t)^2 gives a recursion with
    polynomial coefficients in t:

        rho0^2 (k+2)(k+1) f_{k+2} = -[ 2 rho0 (k+1) k f_{k+1}
            + (k(k-1) + rho0^2 - lam) f_k + 2 A (rho0 f_k + f_{k-1})
            + 2 rho0 f_{k-1} + f_{k-2} ].
    """
    lam = np.asarray(lam, dtype=float).reshape(-1, 1)
    coeffs = np.zeros((order + 1,) + F.shape)
    coeffs[0] = F
    if order >= 1:
        coeffs[1] = dF
    r2 = rho0 * rho0
    for k in range(0, order - 1):
        fk = coeffs[k]
        acc = 2.0 * rho0 * (k + 1) * k * coeffs[k + 1] + (k * (k - 1) + r2 - lam) * fk
        src = rho0 * fk
        if k >= 1:
            fkm1 = coeffs[k - 1]
            src = src + fkm1
            acc += 2.0 * rho0 * fkm1
        if k >= 2:
            acc += coeffs[k - 2]
        acc += 2.0 * (A @ src)
        coeffs[k + 2] = -acc / (r2 * (k + 2) * (k + 1))
    return coeffs


def taylor_step(rho0, F, dF, H, lam, A, order: int = 10):
    """Advance (F, F') from rho0 to rho0 + H with a Taylor series of degree ``order``."""
    c = taylor_coefficients(rho0, F, dF, lam, A, order)
    val = c[order].copy()
    der = order * c[order]
    for k in range(order - 1, -1, -1):
        val = val * H + c[k]
        if k >= 1:
            der = der * H + k * c[k]
    return val, der


def _reorthonormalize(F, dF, T):
    # QR in reverse column order: column 0 is only ever cleaned of the others,
    # never mixed into them.
    n = F.shape[1]
    stacked = np.vstack([F, dF])[:, ::-1]
    q, r = np.linalg.qr(stacked)
    sign = np.sign(np.diag(r))
    sign[sign == 0] = 1.0
    q, r = q * sign, r * sign[:, None]
    rinv = np.linalg.solve(r, np.eye(n))
    perm = np.arange(n)[::-1]
    step = rinv[np.ix_(perm, perm)]
    q = q[:, ::-1]
    return q[:n], q[n:], T @ step


def taylor_outer_propagate(
    grid: RadialGrid,
    coupling: CouplingMatrix,
    inner: SolutionSet,
    order: int = 10,
    reorth_every: int = 20,
    keep_last: int = 2,
) -> SolutionSet:
    """Carry the inner solution from P Delta to P R0 in Taylor steps of 2 P h.

    Columns are periodically re-orthonormalised (value and slope stacked) to
    keep them numerically independent; the accumulated change of basis is
    returned in ``transform``.  Only the last ``keep_last`` nodes are
    tabulated.
    """
    lam = coupling.basis.centrifugal
    A = np.asarray(coupling.values)
    k0 = inner.info["boundary_index"]
    F = inner.values[k0].copy()
    dF = inner.info["boundary_slope"].copy()
    T = inner.transform.copy()
    nodes = grid.outer_nodes()
    n_steps = len(nodes) - 1
    kept_rho, kept_F, kept_dF = [], [], []
    F, dF, T = _reorthonormalize(F, dF, T)
    last_reorth = n_steps - keep_last
    for step in range(n_steps):
        rho0 = nodes[step]
        H = nodes[step + 1] - rho0
        F, dF = taylor_step(rho0, F, dF, H, lam, A, order)
        if (step + 1) % reorth_every == 0 or step == n_steps - 1:
            if not (np.all(np.isfinite(F)) and np.all(np.isfinite(dF))):
                raise PropagationError(f"overflow/NaN in outer propagation near node {k0 + step + 1}")
            # tabulated tail nodes must share one basis
            if step < last_reorth:
                F, dF, T = _reorthonormalize(F, dF, T)
        if step >= last_reorth:
            kept_rho.append(nodes[step + 1])
            kept_F.append(F.copy())
            kept_dF.append(dF.copy())
    info = {
        "taylor_order": order,
        "outer_steps": n_steps,
        "start_rho": float(nodes[0]),
    }
    return SolutionSet(
        rho=np.array(kept_rho),
        values=np.array(kept_F),
        derivs=np.array(kept_dF),
        transform=T,
        info=info,
    )
