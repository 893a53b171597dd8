"""Toric quaternionic quotients of HP^{k-1}: combinatorial data, moment maps and certificates."""
from ._kernels import BACKEND
from .group_action import integer_kernel, kernel_for, locally_free_screen, quotient_is_F
from .joyce import correspondence_check, f_p, nondegeneracy_scan, p_from_R
from .moment import build_Bstar, holomorphicity_residual, mu, nu, sample_P, scan_transversality, spec_for
from .qalg import Quaternion, UPoint
from .quotient_geom import conformal_rep, descend_H, descend_nu1, descend_summary, fixed_point_probe
from .toric_data import ConformalData, DataError, derive_T, is_convex, parse_input, recover_S, validate_R, validate_S
from .twistor_class import Psi, classification_report, deformability, line_point, psi

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConformalData",
    "DataError",
    "Psi",
    "Quaternion",
    "UPoint",
    "build_Bstar",
    "classification_report",
    "conformal_rep",
    "correspondence_check",
    "deformability",
    "derive_T",
    "descend_H",
    "descend_nu1",
    "descend_summary",
    "f_p",
    "fixed_point_probe",
    "holomorphicity_residual",
    "integer_kernel",
    "is_convex",
    "kernel_for",
    "line_point",
    "locally_free_screen",
    "mu",
    "nondegeneracy_scan",
    "nu",
    "p_from_R",
    "parse_input",
    "psi",
    "quotient_is_F",
    "recover_S",
    "sample_P",
    "scan_transversality",
    "spec_for",
    "validate_R",
    "validate_S",
]
