"""Scalar Schur functions: disc automorphisms and the magic functions of G2."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, SingularEvaluationError
from ..tolerances import DEFAULT


def _unimodular(z, name):
    z = complex(z)
    if abs(abs(z) - 1) > DEFAULT.unimodular:
        raise DomainError(f"{name} must be unimodular, got |{name}| = {abs(z)!r}")
    return z


@dataclass(frozen=True)
class MoebiusMap:
    """``lam -> prefactor * (b - lam) / (1 - conj(b) lam)``, an involution when ``prefactor == 1``."""

    b: complex
    prefactor: complex = 1.0

    def __post_init__(self):
        b = complex(self.b)
        if not abs(b) < 1:
            raise DomainError(f"Moebius parameter must satisfy |b| < 1, got {abs(b)!r}")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "prefactor", _unimodular(self.prefactor, "prefactor"))

    def __call__(self, lam):
        return moebius_eval(self, lam)

    def inverse(self, w):
        """Solve ``m(lam) = w`` for ``lam``."""
        w = np.asarray(w, dtype=complex) / self.prefactor
        return (self.b - w) / (1 - np.conj(self.b) * w)


def moebius_eval(m: MoebiusMap, lam):
    lam = np.asarray(lam, dtype=complex)
    out = m.prefactor * (m.b - lam) / (1 - np.conj(m.b) * lam)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MagicFunction:
    """``Phi_omega(s, p) = (s/2 + omega p) / (1 + omega s/2)`` for unimodular ``omega``."""

    omega: complex

    def __post_init__(self):
        object.__setattr__(self, "omega", _unimodular(self.omega, "omega"))

    def __call__(self, s, p):
        return magic_eval(self, s, p)


def magic_eval(phi: MagicFunction, s, p, tol: float = DEFAULT.singular_denominator):
    s = np.asarray(s, dtype=complex)
    p = np.asarray(p, dtype=complex)
    den = 1 + phi.omega * s / 2
    if np.any(np.abs(den) < tol):
        raise SingularEvaluationError(f"magic function denominator below {tol:g}")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (s / 2 + phi.omega * p) / den
    # complex division by 1+0j is not exact in numpy; keep omega*p bitwise on s = 0
    out = np.where(s == 0, phi.omega * p, out)
    return complex(out) if out.ndim == 0 else out
