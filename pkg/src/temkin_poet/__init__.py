"""Temkin-Poet electron-hydrogen ionization amplitudes with two-term step-length error correction."""

__version__ = "0.1.0"

from .basis import ChannelBasis, Symmetry, angular_fn, gram_matrix, nu_index  # noqa: E402
from .coupling import charge_eigensystem, coupling_matrix  # noqa: E402
from .extrapolation import StepTriple, correct_table, extrapolation_weights, two_term_correct  # noqa: E402
from .fitting import DataSet, LinLin, Poly, eval_model, fit_linlin, fit_poly, trim_extremes  # noqa: E402
from .observables import EnergyPartition, incident_to_total, sdcs_curve, t_mod_squared, tmatrix_table  # noqa: E402
from .pipeline import solve_amplitudes  # noqa: E402

__all__ = [
    "__version__",
    "ChannelBasis",
    "Symmetry",
    "angular_fn",
    "gram_matrix",
    "nu_index",
    "coupling_matrix",
    "charge_eigensystem",
    "StepTriple",
    "extrapolation_weights",
    "two_term_correct",
    "correct_table",
    "DataSet",
    "LinLin",
    "Poly",
    "eval_model",
    "fit_linlin",
    "fit_poly",
    "trim_extremes",
    "EnergyPartition",
    "incident_to_total",
    "tmatrix_table",
    "t_mod_squared",
    "sdcs_curve",
    "solve_amplitudes",
]
