"""Asymptotic matching and extraction of channel amplitudes.

Beyond P*R0 the coupled equations are handled in the eigenbasis of the
coupling matrix, where the 1/rho term is diagonal with effective charges
q_k.  The outgoing solutions are written as

    H_j(rho) = exp(i theta_j) sum_p c_p^(j) rho^-p,   theta_j = rho + q_j ln(2 rho),

with c_0 = e_j.  Substituting into the equations (including the
centrifugal term rotated into the eigenbasis, which couples the
eigenchannels at order 1/rho^2) gives

    [2 (q - q_j) - 2 i p] c_p = [M + q_j^2 + i q_j (2p - 1) - p (p - 1)] c_{p-1},

M = Q^T diag(nu(nu+1)) Q.  The sine- and cosine-like solutions are
Im H and Re H.  With p_max = 0 this reduces to the WKB-normalised pair
sin(theta)/sqrt(theta'), cos(theta)/sqrt(theta').

Amplitude convention
--------------------
The regular solutions are matched to F = U a + V b.  Since
F = H (b - i a)/2 + conj(H) (b + i a)/2, the combination whose incoming part
is conj(H_j) in eigenchannel j alone (times the constant i/2) is X = F M
with M = (a - i b)^-1.  The amplitude for asymptotic channel
direction k is the weight of the lowest regular solution (leading behaviour
rho^(nu_0 + 1), unit coefficient) in that combination, C = Q M[0, :].  This is the near-origin strength of the
physical final-state wave and carries no initial-state overlap factor; any
overall constant is left to the cross-section prefactor.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .coupling import ChargeEigensystem
from .propagator import RadialGrid, SolutionSet

__all__ = [
    "AsymptoticForm",
    "AmplitudeVector",
    "MatchingError",
    "asymptotic_basis",
    "asymptotic_solutions",
    "match_coefficients",
    "extract_amplitudes",
    "ASYMPTOTIC_TERMS",
]

logger = logging.getLogger(__name__)

ASYMPTOTIC_TERMS = 60
CONDITION_LIMIT = 1e12


class MatchingError(RuntimeError):
    pass


@dataclass(frozen=True)
class AsymptoticForm:
    """Sine/cosine-like solution values at one rho, shape (N, N) each.

    Column j is the solution whose leading behaviour lives in eigenchannel j.
    """

    rho: float
    u: np.ndarray
    v: np.ndarray
    du: np.ndarray
    dv: np.ndarray
    terms: int = 0

    def wronskian(self) -> np.ndarray:
        """v^T u' - v'^T u; the identity for an exact solution pair."""
        return self.v.T @ self.du - self.dv.T @ self.u


@dataclass(frozen=True)
class AmplitudeVector:
    C: np.ndarray
    symmetry: int
    energy: float
    degrees: tuple[int, ...] = ()
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not np.all(np.isfinite(self.C)):
            raise MatchingError("non-finite amplitude")


def asymptotic_basis(eig: ChargeEigensystem, rho: float, validity: float = 1e-6, centrifugal=None) -> AsymptoticForm:
    """Leading-order sine/cosine-like pair per eigenchannel at ``rho``.

    u_k = sin(theta_k) / sqrt(theta_k'), v_k = cos(theta_k) / sqrt(theta_k').
    When ``centrifugal`` (the diagonal nu(nu+1)) is given, a warning is logged
    if the dropped term max nu(nu+1)/rho^2 exceeds ``validity``.
    """
    q = np.asarray(eig.eigenvalues, dtype=float)
    if centrifugal is not None:
        dropped = float(np.max(centrifugal)) / rho**2
        if dropped > validity:
            logger.warning("rho = %.4g is inside the asymptotic validity range (dropped %.2e)", rho, dropped)
    theta = rho + q * np.log(2.0 * rho)
    tp = 1.0 + q / rho
    amp = tp**-0.5
    damp = 0.5 * q / rho**2 * tp**-1.5
    s, c = np.sin(theta), np.cos(theta)
    u = amp * s
    v = amp * c
    du = damp * s + amp * tp * c
    dv = damp * c - amp * tp * s
    return AsymptoticForm(rho=rho, u=np.diag(u), v=np.diag(v), du=np.diag(du), dv=np.diag(dv))


def asymptotic_solutions(
    eig: ChargeEigensystem,
    centrifugal,
    rho: float,
    max_terms: int = ASYMPTOTIC_TERMS,
    tol: float = 1e-17,
) -> AsymptoticForm:
    """Coupled asymptotic expansion of the sine/cosine-like solutions at ``rho``.

    The series is summed until a term falls below ``tol`` relative to the
    leading one, or until it stops decreasing (optimal truncation).
    """
    if max_terms == 0:
        return asymptotic_basis(eig, rho)
    q = np.asarray(eig.eigenvalues, dtype=float)
    Q = np.asarray(eig.eigenvectors, dtype=float)
    M = (Q.T * np.asarray(centrifugal, dtype=float)) @ Q
    n = len(q)
    H = np.zeros((n, n), dtype=complex)
    dH = np.zeros((n, n), dtype=complex)
    used = 0
    for j in range(n):
        c = np.zeros(n, dtype=complex)
        c[j] = 1.0
        w = c.copy()
        dw = np.zeros(n, dtype=complex)
        last = 1.0
        for p in range(1, max_terms + 1):
            rhs = M @ c + (q[j] ** 2 + 1j * q[j] * (2 * p - 1) - p * (p - 1)) * c
            c = rhs / (2.0 * (q - q[j]) - 2j * p)
            term = c * rho**-p
            size = float(np.max(np.abs(term)))
            if size > last:
                break
            w += term
            dw += -p * c * rho ** (-p - 1)
            last = size
            used = max(used, p)
            if size < tol:
                break
        theta = rho + q[j] * np.log(2.0 * rho)
        phase = np.exp(1j * theta)
        H[:, j] = phase * w
        dH[:, j] = phase * (1j * (1.0 + q[j] / rho) * w + dw)
    return AsymptoticForm(rho=rho, u=H.imag, v=H.real, du=dH.imag, dv=dH.real, terms=used)


def match_coefficients(G: np.ndarray, dG: np.ndarray, form: AsymptoticForm) -> tuple[np.ndarray, np.ndarray, float]:
    """Solve G = U a + V b, G' = U' a + V' b for real (a, b); returns (a, b, cond)."""
    n = G.shape[0]
    system = np.block([[form.u, form.v], [form.du, form.dv]])
    cond = float(np.linalg.cond(system))
    if not cond < CONDITION_LIMIT:
        raise MatchingError(f"matching system ill-conditioned (cond = {cond:.3e}); R0 too small or columns degenerate")
    sol = np.linalg.solve(system, np.vstack([G, dG]))
    return sol[:n], sol[n:], cond


def extract_amplitudes(
    sol: SolutionSet,
    eig: ChargeEigensystem,
    grid: RadialGrid,
    centrifugal=None,
    asymptotic_terms: int = ASYMPTOTIC_TERMS,
    symmetry: int = 0,
    energy: float = float("nan"),
    degrees=(),
) -> AmplitudeVector:
    """Amplitude vector C(n) from the propagated solutions at P*R0.

    ``centrifugal`` is the diagonal nu(nu+1); it is required unless
    ``asymptotic_terms`` is 0 (leading-order matching).
    """
    if sol.derivs is None or len(sol.rho) < 1:
        raise ValueError("solution set carries no slopes at the matching radius")
    rho, F, dF = sol.end_state()
    if abs(rho - grid.rho_match) > 1e-9 * grid.rho_match:
        raise ValueError(f"solution ends at rho = {rho}, expected P*R0 = {grid.rho_match}")
    Q = np.asarray(eig.eigenvectors)
    if asymptotic_terms and centrifugal is None:
        raise ValueError("centrifugal diagonal required for the coupled asymptotic expansion")
    form = (
        asymptotic_solutions(eig, centrifugal, rho, max_terms=asymptotic_terms)
        if asymptotic_terms
        else asymptotic_basis(eig, rho)
    )
    a, b, cond = match_coefficients(Q.T @ F, Q.T @ dF, form)
    try:
        M = np.linalg.inv(a - 1j * b)
    except np.linalg.LinAlgError as exc:
        raise MatchingError("incoming-wave coefficient matrix is singular") from exc
    M = sol.transform @ M
    C = Q @ M[0, :]
    info = {"matching_condition": cond, "asymptotic_terms": form.terms, "rho_match": rho}
    return AmplitudeVector(C=C, symmetry=int(symmetry), energy=float(energy), degrees=tuple(degrees), info=info)
