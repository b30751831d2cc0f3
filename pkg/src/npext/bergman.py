"""Minimal-norm polynomial extension from the variety in a discretized Bergman space.

The trial space is spanned by the monomials ``c1^i c2^j`` with ``i + j <= degree``
(``c = (s, p)`` on G2, ``c = (z1, z2)`` on the diamond). Given values on the
variety samples, the operator returns the interpolating polynomial that
minimizes

    sum_k w_k |P(c_k)|^2,   w_k = exp(-|c_k|^2) / n,

over a Monte Carlo sample of the domain. The map is solved once by the
nullspace method and stored as a dense matrix, so applying it is exactly
linear.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .domains import DomainTag, SampleSet, _disc, coords_of, sample_domain, variety_coords
from .errors import InfeasibleConstraintsError, InvalidInputError, RankDeficientError
from .tolerances import DEFAULT, Tolerances

TIKHONOV = 1e-12
GRAM_CUTOFF = 1e-12


def monomial_exponents(degree: int) -> np.ndarray:
    """Exponent pairs ``(i, j)`` with ``i + j <= degree``, graded order."""
    if degree < 0:
        raise InvalidInputError("degree must be non-negative")
    return np.array([(i, d - i) for d in range(degree + 1) for i in range(d, -1, -1)], dtype=int)


def vandermonde(exponents: np.ndarray, coords) -> np.ndarray:
    c = coords_of(coords)
    return c[:, :1] ** exponents[:, 0] * c[:, 1:] ** exponents[:, 1]


def evaluate_polynomial(exponents: np.ndarray, coeffs, coords) -> np.ndarray:
    """Values of ``sum_m coeffs[m] c1^i_m c2^j_m``; ``coeffs`` may carry trailing batch axes."""
    return np.tensordot(vandermonde(exponents, coords), np.asarray(coeffs, dtype=complex), axes=(1, 0))


def _rotations(domain: DomainTag, degree: int) -> list:
    # the circle action z -> e^{it} z acts on G2 coordinates with weights (1, 2)
    weights = (1, 1) if domain is DomainTag.DIAMOND else (1, 2)
    k = weights[1] * degree + 1
    return [(np.exp(2j * np.pi * r * weights[0] / k), np.exp(2j * np.pi * r * weights[1] / k)) for r in range(k)]


@dataclass(frozen=True)
class BergmanProblem:
    """Discretized weighted least-squares extension problem.

    ``variety_branch``/``variety_param`` label each interpolation node by its
    branch and disc parameter; ``variety_coords`` are the ambient points.
    """

    domain: DomainTag
    degree: int
    exponents: np.ndarray
    domain_samples: SampleSet
    weights: np.ndarray
    variety_branch: np.ndarray
    variety_param: np.ndarray
    variety_coords: np.ndarray
    seed: int
    symmetric: bool = False

    @property
    def n_basis(self) -> int:
        return len(self.exponents)

    def __post_init__(self):
        if not (np.all(np.isfinite(self.weights)) and np.all(self.weights > 0)):
            raise InvalidInputError("weights must be positive and finite")


def make_problem(domain, degree: int, n_domain: int, n_variety: int, seed: int,
                 symmetric: bool = False) -> BergmanProblem:
    """Seeded problem with Gaussian weights.

    ``n_variety`` nodes are drawn on each branch. With ``symmetric=True`` the
    domain sample is closed under the finite rotation group that annihilates
    every non-constant monomial of the trial space, so averages of such
    monomials vanish exactly as they do for the continuous rotation-invariant
    measure.
    """
    domain = DomainTag(domain)
    if n_variety < 2 * degree + 1:
        raise InvalidInputError(f"need at least {2 * degree + 1} variety samples per branch, got {n_variety}")
    samples = sample_domain(domain, n_domain, seed)
    coords = samples.coords
    if symmetric:
        coords = np.concatenate([coords * np.array(rot) for rot in _rotations(domain, degree)])
        samples = SampleSet(domain, samples.kind, samples.seed, coords)
    weights = np.exp(-np.sum(np.abs(coords) ** 2, axis=1)) / len(coords)

    rng = np.random.default_rng([seed, 1])
    params = _disc(rng, 2 * n_variety)
    branch = np.repeat([1, 2], n_variety)
    vc = np.concatenate([variety_coords(domain, b, params[branch == b]) for b in (1, 2)])
    return BergmanProblem(domain, degree, monomial_exponents(degree), samples, weights,
                          branch, params, vc, int(seed), symmetric)


def restricted_dimension(domain: DomainTag, exponents: np.ndarray, branch: int) -> int:
    """Dimension of the trial space restricted to one branch (distinct powers of the parameter)."""
    i, j = exponents[:, 0], exponents[:, 1]
    if domain is DomainTag.G2:
        powers = i + 2 * j if branch == 1 else j[i == 0]
    else:
        powers = i[j == 0] if branch == 1 else j[i == 0]
    return len(np.unique(powers))


def _rank(M, cutoff) -> int:
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > cutoff * s[0])) if s.size and s[0] > 0 else 0


@dataclass(frozen=True)
class LinearExtensionOperator:
    """Precomputed linear map from variety values to polynomial coefficients."""

    problem: BergmanProblem
    matrix: np.ndarray          # (n_basis, n_variety_total)
    range_basis: np.ndarray     # orthonormal basis of the attainable value vectors
    nullspace: np.ndarray       # coefficients vanishing at every variety sample
    weighted_basis: np.ndarray  # sqrt(w) * Vandermonde on domain samples
    restriction: np.ndarray     # Vandermonde on variety samples
    feasibility_tol: float

    def objective(self, coeffs) -> np.ndarray:
        """Discrete weighted squared norm ``sum_k w_k |P(c_k)|^2``."""
        v = self.weighted_basis @ np.asarray(coeffs, dtype=complex)
        return np.sum(np.abs(v) ** 2, axis=0)

    def evaluate(self, coeffs, coords) -> np.ndarray:
        return evaluate_polynomial(self.problem.exponents, coeffs, coords)

    def infeasibility(self, values) -> np.ndarray:
        f = np.asarray(values, dtype=complex)
        r = f - self.range_basis @ (self.range_basis.conj().T @ f)
        return np.linalg.norm(r, axis=0) / np.maximum(1.0, np.linalg.norm(f, axis=0))


def build_bergman_operator(problem: BergmanProblem, tol: Tolerances = DEFAULT) -> LinearExtensionOperator:
    """Factor the equality-constrained least-squares problem once.

    Coefficients are split as ``x = V^+ f + N y`` with ``N`` spanning the
    nullspace of the restriction matrix ``V``; ``y`` then solves a
    Tikhonov-regularized least-squares problem on the domain samples.
    """
    exps = problem.exponents
    weighted = np.sqrt(problem.weights)[:, None] * vandermonde(exps, problem.domain_samples.coords)
    sv = np.linalg.svd(weighted / np.linalg.norm(weighted, axis=0), compute_uv=False)
    rel = sv[-1] ** 2 / sv[0] ** 2 if len(sv) == len(exps) else 0.0
    if rel <= GRAM_CUTOFF:
        raise RankDeficientError(
            f"Gram matrix of the monomial basis is singular (relative eigenvalue {rel:.2e}); "
            "increase domain samples or lower the degree")

    V = vandermonde(exps, problem.variety_coords)
    for b in (1, 2):
        rows = np.flatnonzero(problem.variety_branch == b)
        need = restricted_dimension(problem.domain, exps, b)
        if _rank(V[rows], tol.rank_cutoff) < need:
            _, first = np.unique(np.round(problem.variety_param[rows], 12), return_index=True)
            dup = sorted(set(range(len(rows))) - set(first.tolist()))
            offending = [int(rows[k]) for k in dup] or [int(k) for k in rows]
            raise RankDeficientError(
                f"branch {b} samples do not determine the restriction ({len(rows)} samples, {need} needed)",
                offending)

    U, S, Vh = np.linalg.svd(V)
    r = int(np.sum(S > tol.rank_cutoff * S[0])) if S[0] > 0 else 0
    Ur, Sr, Vr = U[:, :r], S[:r], Vh[:r].conj().T
    N = Vh[r:].conj().T
    pinv_V = Vr @ (Ur.conj().T / Sr[:, None])

    if N.shape[1]:
        A = weighted @ N
        aug = np.vstack([A, np.sqrt(TIKHONOV) * np.eye(N.shape[1])])
        K = np.linalg.pinv(aug)[:, : A.shape[0]]
        matrix = pinv_V - N @ (K @ (weighted @ pinv_V))
    else:
        matrix = pinv_V
    return LinearExtensionOperator(problem, matrix, Ur, N, weighted, V, tol.restriction)


def apply_extension(op: LinearExtensionOperator, f_values) -> np.ndarray:
    """Coefficients of the minimal-norm interpolant; columns of ``f_values`` are mapped independently."""
    f = np.asarray(f_values, dtype=complex)
    if f.shape[0] != op.matrix.shape[1]:
        raise InvalidInputError(f"expected {op.matrix.shape[1]} variety values, got {f.shape[0]}")
    bad = op.infeasibility(f)
    if np.any(bad > op.feasibility_tol):
        raise InfeasibleConstraintsError(
            f"values are not the restriction of any trial polynomial (relative residual {np.max(bad):.2e}); "
            "check agreement of the branches at the base point and the degree bound")
    return op.matrix @ f


def variety_values(problem: BergmanProblem, f) -> np.ndarray:
    """Values of a scalar variety function at the problem's interpolation nodes.

    ``f`` is a pair ``(g1, g2)`` of callables of the branch parameter, or an
    object with a ``values(branch, lam)`` method returning ``(n, 1, 1)``.
    """
    out = np.empty(len(problem.variety_param), dtype=complex)
    for b in (1, 2):
        mask = problem.variety_branch == b
        lam = problem.variety_param[mask]
        if hasattr(f, "values"):
            out[mask] = np.asarray(f.values(b, lam)).reshape(len(lam), -1)[:, 0]
        else:
            out[mask] = np.asarray(f[b - 1](lam), dtype=complex) * np.ones(len(lam))
    return out


@dataclass(frozen=True)
class SublevelReport:
    coords: np.ndarray
    max_abs: np.ndarray
    inside: np.ndarray
    dictionary_size: int

    @property
    def fraction_inside(self) -> float:
        return float(np.mean(self.inside)) if len(self.inside) else 0.0

    def to_dict(self) -> dict:
        return {"n_grid": int(len(self.coords)), "dictionary_size": self.dictionary_size,
                "fraction_inside": self.fraction_inside,
                "max_over_grid": float(np.max(self.max_abs)) if len(self.max_abs) else 0.0}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re1", "im1", "re2", "im2", "max_abs", "inside"])
        for (c1, c2), m, ins in zip(self.coords, self.max_abs, self.inside):
            w.writerow([repr(float(x)) for x in (c1.real, c1.imag, c2.real, c2.imag, m)] + [int(ins)])
        return buf.getvalue()


def sublevel_estimate(op: LinearExtensionOperator, dictionary: Iterable, grid,
                      tol: Tolerances = DEFAULT) -> SublevelReport:
    """Sampled region where every extended dictionary function has modulus below one.

    Members must be scalar Schur functions on the variety vanishing at the
    base point. A finite dictionary only bounds the true region from above
    in the sense of set inclusion, i.e. the estimate is never too small.
    """
    coords = coords_of(grid)
    members = list(dictionary)
    if not members:
        m = np.zeros(len(coords))
        return SublevelReport(coords, m, m < 1, 0)
    values = np.stack([variety_values(op.problem, f) for f in members], axis=1)
    for k, f in enumerate(members):
        if abs(_value_at_zero(f)) > tol.branch_consistency:
            raise InvalidInputError(f"dictionary member {k} does not vanish at the base point")
        if np.max(np.abs(values[:, k])) > 1 + tol.supnorm:
            raise InvalidInputError(f"dictionary member {k} is not contractive on the variety samples")
    coeffs = apply_extension(op, values)
    m = np.max(np.abs(op.evaluate(coeffs, coords)), axis=1)
    return SublevelReport(coords, m, m < 1, len(members))


def _value_at_zero(f) -> complex:
    if hasattr(f, "values"):
        return complex(np.asarray(f.values(1, np.zeros(1))).ravel()[0])
    return complex(np.asarray(f[0](np.zeros(1)), dtype=complex).ravel()[0])
