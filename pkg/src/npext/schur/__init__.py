"""Schur-class functions on the disc and their unitary realizations."""
from .colligation import (Colligation, check_schur, full_transfer, pad_pair, pick_matrix,
                          realize, realize_divided, transfer_eval, transfer_function)
from .operators import (UnitaryEigen, adjoint, haar_unitary, operator_moebius, opnorm,
                        psd_sqrt, unitarity_residual, unitary_eig)
from .polynomial import MatrixPolynomial
from .scalar import MagicFunction, MoebiusMap, magic_eval, moebius_eval

__all__ = [
    "Colligation", "MagicFunction", "MatrixPolynomial", "MoebiusMap", "UnitaryEigen",
    "adjoint", "check_schur", "full_transfer", "haar_unitary", "magic_eval", "moebius_eval",
    "operator_moebius", "opnorm", "pad_pair", "pick_matrix", "psd_sqrt", "realize",
    "realize_divided", "transfer_eval", "transfer_function", "unitarity_residual", "unitary_eig",
]
