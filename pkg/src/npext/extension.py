"""Norm-preserving extension of matrix Schur functions from crossed discs.

Given ``phi`` on the two branches of the variety, the construction is:

1. move ``phi(a)`` to ``0`` with a ball automorphism and realize each
   ``phi(psi_i(lam)) / lam`` by a unitary colligation ``U_i``;
2. pad ``U_1``, ``U_2`` onto a common space ``M = H (+) E (+) K``;
3. diagonalize ``U_1* U_2 = W diag(tau) W*``;
4. set ``Phi(z) = U_1 W diag(g_k(z)) W*`` where ``g_k`` is the scalar Schur
   function of the domain equal to ``lam`` on branch 1 and ``tau_k lam`` on
   branch 2, and return the feedback transform
   ``Phi_HH + Phi_HK (I - Phi_KK)^{-1} Phi_KH`` (composed back with the
   automorphism).

On branch 1 ``Phi = lam U_1`` and on branch 2 ``Phi = lam U_2``, so the
feedback transform reproduces the realized branch functions exactly, while
``||Phi(z)|| = max_k |g_k(z)| <= 1`` bounds the norm everywhere.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .domains import (Branch, DomainTag, SampleKind, coords_of, in_diamond, in_g2,
                      sample_domain, variety_coords)
from .errors import DomainError, IllConditionedFeedbackError, InvalidInputError, NotSchurError
from .schur import MatrixPolynomial, operator_moebius, opnorm, pad_pair, unitary_eig
from .schur.colligation import _decode, _encode, realize_divided
from .schur.operators import adjoint, unitarity_residual
from .tolerances import DEFAULT, Tolerances

CHUNK = 16384


@dataclass(frozen=True, eq=False)
class VarietyFunction:
    """Matrix function on the variety, given branchwise as polynomials in the disc parameter."""

    branch1: MatrixPolynomial
    branch2: MatrixPolynomial
    domain: DomainTag = DomainTag.G2
    tol: Tolerances = field(default=DEFAULT, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "domain", DomainTag(self.domain))
        if self.branch1.shape != self.branch2.shape:
            raise InvalidInputError(
                f"branch shapes differ: {self.branch1.shape} vs {self.branch2.shape}")
        if self.branch1.shape[0] != self.branch1.shape[1]:
            raise InvalidInputError(f"values must be square matrices, got {self.branch1.shape}")
        gap = opnorm(self.branch1.coeffs[0] - self.branch2.coeffs[0])
        if gap > self.tol.branch_consistency:
            raise InvalidInputError(
                f"branch values disagree at the base point a (difference {gap:.3g}); "
                "branch1(0) must equal branch2(0)")
        for name, b in (("branch1", self.branch1), ("branch2", self.branch2)):
            sup = b.boundary_sup(512)
            if sup > 1 + self.tol.schur_certificate:
                raise NotSchurError(f"{name} has boundary sup-norm {sup:.12g} > 1")

    @property
    def dim(self) -> int:
        return self.branch1.shape[0]

    @property
    def base_value(self) -> np.ndarray:
        return self.branch1.coeffs[0]

    def branch(self, b) -> MatrixPolynomial:
        return self.branch1 if Branch(b) is Branch.BRANCH1 else self.branch2

    def values(self, branch, lam):
        return self.branch(branch)(lam)

    def supnorm(self, n: int = 512) -> float:
        return max(self.branch1.boundary_sup(n), self.branch2.boundary_sup(n))

    def conjugated(self, left, right) -> "VarietyFunction":
        return VarietyFunction(self.branch1.conjugated(left, right),
                               self.branch2.conjugated(left, right), self.domain, self.tol)

    def to_dict(self) -> dict:
        return {"domain": self.domain.value, "branch1": self.branch1.to_dict(),
                "branch2": self.branch2.to_dict()}

    @classmethod
    def from_dict(cls, d, domain=None, tol: Tolerances = DEFAULT) -> "VarietyFunction":
        try:
            b1, b2 = d["branch1"], d["branch2"]
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"variety function JSON needs 'branch1' and 'branch2': {exc}") from exc
        tag = domain if domain is not None else d.get("domain", DomainTag.G2)
        return cls(MatrixPolynomial.from_dict(b1), MatrixPolynomial.from_dict(b2), DomainTag(tag), tol)

    @classmethod
    def scalar(cls, coeffs1, coeffs2, domain=DomainTag.G2) -> "VarietyFunction":
        return cls(MatrixPolynomial.scalar(coeffs1), MatrixPolynomial.scalar(coeffs2), domain)


# ---------------------------------------------------------------------------
# scalar branch interpolants


def extender_values(domain, taus, coords) -> np.ndarray:
    """Values ``g_k(z)`` for every ``tau_k``; shape ``(n, len(taus))``.

    G2: the magic functions ``(s/2 + tau p) / (1 + tau s/2)``.
    Diamond: the linear functions ``z1 + tau z2``.
    """
    taus = np.asarray(taus, dtype=complex)
    c1, c2 = coords[:, 0:1], coords[:, 1:2]
    if DomainTag(domain) is DomainTag.G2:
        return (c1 / 2 + taus * c2) / (1 + taus * c1 / 2)
    return c1 + taus * c2


def branch_extender(domain, tau) -> Callable:
    """Scalar Schur function of the domain equal to ``lam`` on branch 1 and ``tau lam`` on branch 2."""
    tau = complex(tau)
    if abs(abs(tau) - 1) > 1e-12:
        raise DomainError(f"tau must be unimodular, got |tau| = {abs(tau)!r}")
    domain = DomainTag(domain)

    def g(z):
        c = coords_of(z)
        out = extender_values(domain, [tau], c)[:, 0]
        return complex(out[0]) if len(out) == 1 and np.ndim(z) < 2 else out

    return g


def _check_interior(domain, coords, margin):
    inside = (in_g2(coords[:, 0], coords[:, 1], margin) if domain is DomainTag.G2
              else in_diamond(coords[:, 0], coords[:, 1], margin))
    inside = np.atleast_1d(inside)
    if not np.all(inside):
        bad = coords[~inside][0]
        raise DomainError(f"point {tuple(bad)} is not strictly inside {domain.value}")


# ---------------------------------------------------------------------------
# the extension


@dataclass(frozen=True, eq=False)
class ExtensionFunction:
    """Evaluator for the constructed extension.

    ``U1`` and ``W`` act on ``M = H (+) E (+) K`` with ``dim H = dH``,
    ``dim E = dE`` (realization ancilla) and ``dim K = dK`` (state).
    ``base_value`` is ``phi(a)``; when nonzero the feedback output is mapped
    back through the ball automorphism exchanging it with ``0``.
    """

    U1: np.ndarray
    W: np.ndarray
    taus: np.ndarray
    dH: int
    dE: int
    dK: int
    domain: DomainTag
    base_value: np.ndarray
    tol: Tolerances = field(default=DEFAULT, repr=False)
    _L: np.ndarray = field(init=False, repr=False)
    _kernel: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "domain", DomainTag(self.domain))
        for name in ("U1", "W", "taus", "base_value"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=complex))
        M = self.dH + self.dE + self.dK
        if self.U1.shape != (M, M) or self.W.shape != (M, M) or self.taus.shape != (M,):
            raise InvalidInputError("inconsistent extension dimensions")
        for name in ("U1", "W"):
            res = unitarity_residual(getattr(self, name))
            if res > 1e-9:
                raise InvalidInputError(f"{name} is not unitary (residual {res:.3g})")
        if np.max(np.abs(np.abs(self.taus) - 1), initial=0) > self.tol.eig_modulus:
            raise InvalidInputError("taus must be unimodular")
        # rows/cols of Phi that survive the compression: H and K (ancilla E is dropped)
        keep = np.r_[np.arange(self.dH), np.arange(self.dH + self.dE, M)]
        L = (self.U1 @ self.W)[keep, :]
        R = adjoint(self.W)[:, keep]
        m = len(keep)
        kernel = (L.T[:, :, None] * R[:, None, :]).reshape(M, m * m)
        object.__setattr__(self, "_L", L)
        object.__setattr__(self, "_kernel", kernel)

    @property
    def size(self) -> int:
        return self.dH + self.dE + self.dK

    def __call__(self, z):
        return eval_extension(self, z)

    def phi(self, z) -> np.ndarray:
        """The full ``M x M`` contraction ``U1 W diag(g_k(z)) W*``."""
        g = extender_values(self.domain, self.taus, coords_of(z))
        return (self.U1 @ self.W)[None] * g[:, None, :] @ adjoint(self.W)[None]

    def to_dict(self) -> dict:
        return {
            "domain": self.domain.value,
            "dims": {"H": self.dH, "E": self.dE, "K": self.dK},
            "U1": _encode(self.U1),
            "W": _encode(self.W),
            "taus": [[t.real, t.imag] for t in self.taus],
            "base_value": _encode(self.base_value),
        }

    @classmethod
    def from_dict(cls, d, tol: Tolerances = DEFAULT) -> "ExtensionFunction":
        try:
            h, e, k = (int(d["dims"][x]) for x in ("H", "E", "K"))
            M = h + e + k
            taus = np.asarray(d["taus"], dtype=float).reshape(M, 2)
            return cls(_decode(d["U1"], (M, M)), _decode(d["W"], (M, M)),
                       taus[:, 0] + 1j * taus[:, 1], h, e, k, DomainTag(d["domain"]),
                       _decode(d["base_value"], (h, h)), tol)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"bad extension JSON: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def build_extension(f: VarietyFunction, n_samples: int = 64, tol: float = 1e-10) -> ExtensionFunction:
    """Construct the norm-preserving extension of ``f`` to its ambient domain."""
    tols = f.tol
    base = f.base_value
    if opnorm(base) > 1 - tols.contraction_margin:
        raise DomainError(
            f"||f(a)|| = {opnorm(base):.12g}; the construction needs a strict contraction "
            f"(<= 1 - {tols.contraction_margin:g}) at the base point")
    col1 = realize_divided(f.branch1, n_samples, tol, tols)
    col2 = realize_divided(f.branch2, n_samples, tol, tols)
    if (col1.dE == 0) != (col2.dE == 0):
        # both branches must carry the same copy H' of H in their ancillas
        if col1.dE == 0:
            col1 = realize_divided(f.branch1, n_samples, tol, tols, force_ancilla=True)
        else:
            col2 = realize_divided(f.branch2, n_samples, tol, tols, force_ancilla=True)
    # sharing H' (rather than padding two private copies) makes the result
    # covariant under f -> V f V' and sends f = 0 to F = 0
    p1, p2 = pad_pair(col1, col2, shared_ancilla=col1.dH if col1.dE else 0)
    U1, U2 = p1.matrix, p2.matrix
    eig = unitary_eig(adjoint(U1) @ U2, tols)
    return ExtensionFunction(U1, eig.W, eig.taus, p1.dH, p1.dE, p1.dK, f.domain, base, tols)


def eval_extension(F: ExtensionFunction, z) -> np.ndarray:
    """Extension values at interior points; returns ``(n, dH, dH)``."""
    coords = coords_of(z)
    _check_interior(F.domain, coords, 0.0)
    h, m = F.dH, F.dH + F.dK
    out = np.empty((len(coords), h, h), dtype=complex)
    for start in range(0, len(coords), CHUNK):
        c = coords[start:start + CHUNK]
        g = extender_values(F.domain, F.taus, c)
        rho = np.abs(g).max(axis=1, initial=0.0)
        with np.errstate(divide="ignore"):
            bound = np.where(rho < 1, (1 + rho) / (1 - rho), np.inf)
        if F.dK and np.any(bound > F.tol.feedback_condition):
            raise IllConditionedFeedbackError(
                f"(I - Phi_KK) condition bound {bound.max():.3g} exceeds {F.tol.feedback_condition:g}")
        phi = (g @ F._kernel).reshape(len(c), m, m)
        val = phi[:, :h, :h]
        if F.dK:
            IK = np.eye(F.dK) - phi[:, h:, h:]
            val = val + phi[:, :h, h:] @ np.linalg.solve(IK, phi[:, h:, :h])
        out[start:start + CHUNK] = val
    if np.any(F.base_value):
        out = operator_moebius(F.base_value, out, F.tol.contraction_margin)
    return out


@dataclass
class VerificationReport:
    restriction_max_error: float
    supnorm_estimate: float
    variety_supnorm: float
    n_samples: int
    seed: int
    witnesses: list

    def passed(self, tol: Tolerances = DEFAULT) -> bool:
        return (self.restriction_max_error <= tol.restriction
                and self.supnorm_estimate <= 1 + tol.supnorm)

    def to_dict(self) -> dict:
        return {
            "restriction_max_error": self.restriction_max_error,
            "supnorm_estimate": self.supnorm_estimate,
            "variety_supnorm": self.variety_supnorm,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "witnesses": self.witnesses,
        }


def verify_extension(F: ExtensionFunction, f: VarietyFunction, n: int = 10_000, seed: int = 0,
                     n_witnesses: int = 10) -> VerificationReport:
    """Sampled check of restriction and sup-norm.

    ``n`` variety samples give the restriction error. The sup-norm estimate
    (largest singular value) runs over ``n`` interior samples of the ambient
    domain together with the variety samples, which also lie in the domain.
    The ``n_witnesses`` largest-norm points are listed.
    """
    var = sample_domain(F.domain, n, seed, SampleKind.VARIETY)
    err, vsup = 0.0, 0.0
    points, norms = [], []
    for b in (1, 2):
        mask = var.branch == b
        if not np.any(mask):
            continue
        lam = var.param[mask]
        coords = variety_coords(F.domain, b, lam)
        expected = f.values(b, lam)
        got = eval_extension(F, coords)
        err = max(err, float(opnorm(got - expected).max()))
        vsup = max(vsup, float(opnorm(expected).max()))
        points.append(coords)
        norms.append(opnorm(got))
    dom = sample_domain(F.domain, n, seed + 1, SampleKind.INTERIOR)
    points.append(dom.coords)
    norms.append(opnorm(eval_extension(F, dom.coords)))
    points, norms = np.concatenate(points), np.concatenate(norms)
    top = np.argsort(norms, kind="stable")[::-1][:n_witnesses]
    witnesses = [{"point": [[float(c.real), float(c.imag)] for c in points[i]], "norm": float(norms[i])}
                 for i in top]
    return VerificationReport(err, float(norms.max()), vsup, n, seed, witnesses)


def diamond_linear_extension(f: VarietyFunction) -> Callable:
    """``z -> f_1(z1) + f_2(z2)``: the linear extension available on the diamond."""
    if f.domain is not DomainTag.DIAMOND:
        raise InvalidInputError("the additive extension is only defined for the diamond")
    if np.any(np.abs(f.base_value) > f.tol.branch_consistency):
        raise InvalidInputError("the additive extension needs f(a) = 0")

    def F(z):
        c = coords_of(z)
        return f.branch1(c[:, 0]) + f.branch2(c[:, 1])

    return F
