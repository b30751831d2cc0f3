"""Numerical tolerances used across the package.

Every check that compares floating point quantities reads its threshold from a
:class:`Tolerances` instance so the CLI can override them and embed the full set
in reports.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    boundary_margin: float = 1e-12
    unimodular: float = 1e-14
    colligation_unitarity: float = 1e-10
    eig_unitarity: float = 1e-10
    eig_residual: float = 1e-9
    eig_modulus: float = 1e-10
    unitary_input: float = 1e-8
    feedback_condition: float = 1e12
    singular_denominator: float = 1e-13
    schur_certificate: float = 1e-10
    pick_psd: float = 1e-9
    rank_cutoff: float = 1e-11
    contraction_margin: float = 1e-6
    branch_consistency: float = 1e-12
    restriction: float = 1e-8
    supnorm: float = 1e-8

    def as_dict(self) -> dict:
        return asdict(self)

    def updated(self, **overrides) -> "Tolerances":
        unknown = set(overrides) - set(asdict(self))
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        return replace(self, **overrides)


DEFAULT = Tolerances()
