"""One solve: basis -> coupling -> inner/outer propagation -> amplitudes."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from .basis import ChannelBasis, DEFAULT_QUAD_ORDER, Symmetry
from .coupling import CouplingMatrix, charge_eigensystem, coupling_matrix
from .matcher import ASYMPTOTIC_TERMS, AmplitudeVector, extract_amplitudes
from .propagator import build_grid, fd_inner_solve, series_start, taylor_outer_propagate

__all__ = ["SolveResult", "solve_amplitudes", "default_R0"]

# Matching radii used for the three standard energies (a.u.); other energies
# scale as 1/sqrt(E).
_STANDARD_R0 = {1.0: 5000.0, 2.0: 3000.0, 3.0: 2500.0}


def default_R0(E_total: float) -> float:
    for E, R0 in _STANDARD_R0.items():
        if math.isclose(E, E_total, rel_tol=1e-9):
            return R0
    return 5000.0 / math.sqrt(E_total)


@dataclass(frozen=True)
class SolveResult:
    amplitudes: AmplitudeVector
    coupling: CouplingMatrix
    info: dict


def solve_amplitudes(
    symmetry,
    E_total: float,
    h: float,
    R0: float,
    basis_size: int = 6,
    quad_order: int = DEFAULT_QUAD_ORDER,
    taylor_order: int = 10,
    asymptotic_terms: int = ASYMPTOTIC_TERMS,
) -> SolveResult:
    """Amplitude vector C(n) for one symmetry, energy (Ry) and step length (a.u.)."""
    sym = Symmetry.parse(symmetry)
    t0 = time.perf_counter()
    P = math.sqrt(E_total)
    basis = ChannelBasis.default(sym, basis_size)
    coupling = coupling_matrix(basis, P, quad_order)
    eig = charge_eigensystem(coupling)
    grid = build_grid(h, R0, P)
    inner = fd_inner_solve(grid, coupling, series_start(basis, coupling, grid))
    outer = taylor_outer_propagate(grid, coupling, inner, order=taylor_order)
    amp = extract_amplitudes(
        outer,
        eig,
        grid,
        basis.centrifugal,
        asymptotic_terms=asymptotic_terms,
        symmetry=int(sym),
        energy=E_total,
        degrees=basis.degrees,
    )
    info = dict(amp.info)
    info.update(
        {
            "h": h,
            "R0": R0,
            "P": P,
            "charges": [float(q) for q in eig.eigenvalues],
            "inner_coefficient_condition": inner.info["coefficient_condition"],
            "outer_steps": outer.info["outer_steps"],
            "seconds": time.perf_counter() - t0,
        }
    )
    return SolveResult(amplitudes=amp, coupling=coupling, info=info)
