"""Numerical checks behind the absence of a linear isometric extension operator on G2.

Scalar functions of G2 are plain callables ``F(s, p)`` acting elementwise on
complex arrays. Variety functions are written ``[f1, f2]``: ``f1(lam)`` on the
royal disc ``(2 lam, lam^2)`` and ``f2(lam)`` on ``(0, lam)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .domains import _disc, in_g2, pi_map, sample_domain
from .errors import DomainError, InvalidInputError, NumericalFailureError, SingularEvaluationError
from .schur.scalar import MagicFunction, MoebiusMap, _unimodular
from .tolerances import DEFAULT

FOURIER_NODES = 256
ALIAS_GUARD = 1e-6
TAYLOR_RADIUS = 0.5
CASE2_MIN_S = 0.05


class Case(str, Enum):
    CASE_I = "i"
    CASE_II = "ii"


class Side(str, Enum):
    LHS = "lhs"
    RHS = "rhs"


# ---------------------------------------------------------------------------
# extremal extensions


def royal_extension(alpha, beta) -> Callable:
    """``alpha * Phi_{beta/alpha}``, the extension of ``[alpha lam, beta lam]``."""
    alpha, beta = _unimodular(alpha, "alpha"), _unimodular(beta, "beta")
    phi = MagicFunction(beta / alpha)
    return lambda s, p: alpha * phi(s, p)


@dataclass(frozen=True)
class RoyalPair:
    """The variety function ``[m(alpha lam), m(beta lam)]`` with ``m = m_{beta lam0}``
    together with its extension ``m(alpha Phi_{beta/alpha})``. Calling the
    object evaluates the extension."""

    alpha: complex
    beta: complex
    lambda0: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", _unimodular(self.alpha, "alpha"))
        object.__setattr__(self, "beta", _unimodular(self.beta, "beta"))
        if not abs(complex(self.lambda0)) < 1:
            raise DomainError("lambda0 must lie in the open unit disc")
        object.__setattr__(self, "lambda0", complex(self.lambda0))

    @property
    def omega(self) -> complex:
        return self.beta / self.alpha

    @property
    def t(self) -> float:
        return abs(self.lambda0)

    @property
    def moebius(self) -> MoebiusMap:
        return MoebiusMap(self.beta * self.lambda0)

    def branch1(self, lam):
        return self.moebius(self.alpha * np.asarray(lam, dtype=complex))

    def branch2(self, lam):
        return self.moebius(self.beta * np.asarray(lam, dtype=complex))

    def __call__(self, s, p):
        return self.moebius(self.alpha * MagicFunction(self.omega)(s, p))

    def restriction_error(self, lam) -> float:
        lam = np.asarray(lam, dtype=complex)
        e1 = np.abs(self(2 * lam, lam ** 2) - self.branch1(lam))
        e2 = np.abs(self(np.zeros_like(lam), lam) - self.branch2(lam))
        return float(max(e1.max(initial=0), e2.max(initial=0)))


def unique_extension(alpha, beta, lambda0=0.0) -> RoyalPair:
    return RoyalPair(alpha, beta, lambda0)


# ---------------------------------------------------------------------------
# slices lam -> F(pi(lam, omega lam))


def _slice(F, omega, lam):
    s, p = pi_map(lam, omega * lam)
    return np.asarray(F(s, p), dtype=complex)


@dataclass(frozen=True)
class CoefficientSeries:
    """Power-series coefficients ``c_0..c_order`` recovered from samples on a circle.

    ``tail`` is the largest scaled DFT coefficient beyond ``order`` (including
    the aliased negative frequencies); ``reconstruction_error`` compares the
    full DFT series against the samples on the circle.
    """

    coefficients: np.ndarray
    radius: np.ndarray
    n_nodes: int
    variable: str
    tail: float
    reconstruction_error: float

    def __getitem__(self, k):
        return self.coefficients[k]

    def to_dict(self) -> dict:
        c = np.asarray(self.coefficients)
        return {"variable": self.variable, "n_nodes": self.n_nodes,
                "radius": np.asarray(self.radius, dtype=float).ravel().tolist(),
                "tail": self.tail, "reconstruction_error": self.reconstruction_error,
                "coefficients": [[float(z.real), float(z.imag)] for z in c.reshape(len(c), -1)[:, 0]]
                if c.ndim == 1 else [_encode_complex(row) for row in c]}


def _encode_complex(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [_encode_complex(x) for x in a]


def _circle_coefficients(g, radius, order: int, n_nodes: int, variable: str, guard: float = ALIAS_GUARD):
    """Taylor coefficients of ``x -> g(x)`` by the trapezoid rule on ``|x| = radius``.

    ``g`` maps an array of nodes of shape ``(n_nodes, *batch)`` to values of the
    same shape; ``radius`` broadcasts against the batch shape.
    """
    if order >= n_nodes // 2:
        raise InvalidInputError("order must be below half the number of nodes")
    radius = np.asarray(radius, dtype=float)
    roots = np.exp(2j * np.pi * np.arange(n_nodes) / n_nodes)
    x = roots.reshape((n_nodes,) + (1,) * radius.ndim) * radius
    vals = g(x)
    d = np.fft.fft(vals, axis=0) / n_nodes
    tail = float(np.max(np.abs(d[order + 1:]))) if n_nodes > order + 1 else 0.0
    if tail > guard:
        raise NumericalFailureError(
            f"coefficients beyond order {order} reach {tail:.2e} (> {guard:g}); raise the order")
    recon = np.fft.ifft(d, axis=0) * n_nodes
    err = float(np.max(np.abs(recon - vals)))
    k = np.arange(order + 1).reshape((order + 1,) + (1,) * radius.ndim)
    coeffs = d[: order + 1] / radius ** k
    return CoefficientSeries(coeffs, radius, n_nodes, variable, tail, err)


def slice_taylor(F, omega, order: int = 40, radius: float = TAYLOR_RADIUS,
                 n_nodes: int = FOURIER_NODES) -> CoefficientSeries:
    """Taylor coefficients of ``lam -> F(pi(lam, omega lam))`` from a circle of the given radius."""
    omega = _unimodular(omega, "omega")
    return _circle_coefficients(lambda x: _slice(F, omega, x), radius, order, n_nodes, "lambda")


@dataclass(frozen=True)
class SliceProbeReport:
    """Fit of ``h(lam) = F(pi(lam, omega lam)) / lam`` by a linear fractional map.

    ``fit_residual`` is the mismatch on fresh points; ``automorphism_defect``
    is ``max | |fit(e^{it})| - 1 |``, which vanishes exactly for disc
    automorphisms. ``deviation`` is the larger of the two.
    """

    omega: complex
    fit: tuple
    fit_residual: float
    automorphism_defect: float
    degenerate: bool
    pole_inside: bool = False

    @property
    def deviation(self) -> float:
        # a pole in the closed disc rules out a self-map of the disc outright
        return max(self.fit_residual, self.automorphism_defect, 1.0 if self.pole_inside else 0.0)

    def to_dict(self) -> dict:
        return {"omega": [self.omega.real, self.omega.imag], "fit_residual": self.fit_residual,
                "automorphism_defect": self.automorphism_defect, "deviation": self.deviation,
                "degenerate": self.degenerate, "pole_inside": self.pole_inside}


def mobius_slice_probe(F, omega, n_fit: int = 32, fit_radius: float = 0.5) -> SliceProbeReport:
    """Test whether ``lam -> F(pi(lam, omega lam)) / lam`` is a disc automorphism.

    A linear fractional map ``(a lam + b) / (c lam + d)`` is fitted through
    three slice values and checked on ``n_fit`` further points inside the disc
    and for unimodularity on the circle. A constant slice is flagged as
    degenerate; its deviation is then measured against that constant.
    """
    omega = _unimodular(omega, "omega")
    if abs(complex(np.asarray(F(0.0, 0.0)))) > DEFAULT.branch_consistency:
        raise InvalidInputError("the probe needs F(0, 0) = 0")
    h = lambda lam: _slice(F, omega, lam) / lam
    nodes = fit_radius * np.exp(2j * np.pi * (np.arange(3) / 3 + 0.1))
    hv = h(nodes)
    k = np.arange(n_fit)
    fresh = 0.9 * np.sqrt((k + 0.5) / n_fit) * np.exp(2j * np.pi * k * 0.6180339887498949)
    circle = np.exp(2j * np.pi * np.arange(128) / 128)

    if np.max(np.abs(hv - hv[0])) < 1e-12:
        resid = float(np.max(np.abs(h(fresh) - hv[0])))
        return SliceProbeReport(omega, (0j, complex(hv[0]), 0j, 1 + 0j), resid, float(abs(abs(hv[0]) - 1)), True)

    # a lam + b - h c lam - h d = 0 at the three nodes
    M = np.stack([nodes, np.ones(3), -hv * nodes, -hv], axis=1)
    a, b, c, d = np.linalg.svd(M)[2][-1].conj()
    lft = lambda lam: (a * lam + b) / (c * lam + d)
    pole_inside = abs(c) > 0 and abs(d / c) <= 1
    resid = float(np.max(np.abs(lft(fresh) - h(fresh))))
    with np.errstate(divide="ignore", invalid="ignore"):
        defect = float(np.nan_to_num(np.max(np.abs(np.abs(lft(circle)) - 1)), nan=1.0, posinf=1.0))
    return SliceProbeReport(omega, (complex(a), complex(b), complex(c), complex(d)), resid, defect, False,
                            bool(pole_inside))


# ---------------------------------------------------------------------------
# expansions in omega


def _radius_rule(poles) -> np.ndarray:
    """Half the distance to the nearest singularity, capped at the unit circle."""
    rho = np.min(np.abs(poles), axis=-1) if np.ndim(poles) and np.shape(poles)[-1] else np.inf
    return np.minimum(1.0, np.asarray(rho) / 2)


def _quadratic_roots(a, b, c):
    """Roots of ``a x^2 + b x + c`` per element; degree drops are represented by ``inf``."""
    out = np.full(np.shape(a) + (2,), np.inf, dtype=complex)
    for idx in np.ndindex(np.shape(a)):
        coeffs = np.array([a[idx], b[idx], c[idx]])
        nz = np.flatnonzero(np.abs(coeffs) > 1e-15)
        if nz.size == 0 or nz[0] == 2:
            continue
        r = np.roots(coeffs[nz[0]:])
        out[idx][: len(r)] = r
    return out


@dataclass(frozen=True)
class OmegaSeries:
    """Coefficients of one side of the expansion in ``conj(omega)`` (case i) or ``omega`` (case ii).

    LHS: ``coefficients[n, b, k]`` is the order-``n`` coefficient on branch
    ``b + 1`` at parameter ``lam[k]``. RHS: ``coefficients[n, k]`` at the
    G2 point ``(s[k], p[k])``.
    """

    case: Case
    side: Side
    lambda0: complex
    series: CoefficientSeries
    lam: Optional[np.ndarray] = None
    points: Optional[np.ndarray] = None

    @property
    def coefficients(self) -> np.ndarray:
        return self.series.coefficients


def omega_fourier(case, lambda0, side, order: int = 40, samples: int = FOURIER_NODES, lam=None,
                  points=None) -> OmegaSeries:
    """Expand one side of the identity satisfied by a putative linear extension operator.

    Case i uses base point ``(0, lam0)``; case ii uses ``(2 lam0, lam0^2)``.
    ``lam`` are branch parameters (LHS); ``points`` are ``(n, 2)`` G2
    coordinates (RHS). The expansion variable ``x`` is sampled on a circle
    of radius ``min(1, rho/2)`` with ``rho`` the distance to the nearest
    singularity in ``x``, which is the unit circle whenever that is safe.
    """
    case, side = Case(case), Side(side)
    l0 = complex(lambda0)
    if not abs(l0) < 1:
        raise DomainError("lambda0 must lie in the open unit disc")
    if case is Case.CASE_II and l0 == 0:
        raise DomainError("case ii needs lambda0 != 0")
    m0 = MoebiusMap(l0)
    variable = "conj_omega" if case is Case.CASE_I else "omega"

    if side is Side.LHS:
        if lam is None:
            raise InvalidInputError("LHS expansion needs branch parameters lam")
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        moving = lambda x: (l0 - lam * x) / (1 - lam * np.conj(l0) * x)
        fixed = m0(lam)
        prod = lam * np.conj(l0)
        poles = np.where(np.abs(prod) > 0, 1 / np.where(prod == 0, 1, prod), np.inf)[:, None]
        radius = _radius_rule(poles)[None, :]

        def g(x):
            a = moving(x)
            b = np.broadcast_to(fixed, a.shape)
            pair = (a, b) if case is Case.CASE_I else (b, a)
            return np.stack(pair, axis=1)

        series = _circle_coefficients(lambda x: g(x[:, 0]), radius, order, samples, variable)
        return OmegaSeries(case, side, l0, series, lam=lam)

    if points is None:
        raise InvalidInputError("RHS expansion needs G2 points")
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    s, p = pts[:, 0], pts[:, 1]
    if not np.all(in_g2(s, p)):
        raise DomainError("RHS points must lie in G2")
    if case is Case.CASE_I:
        if np.any(np.abs(s) < CASE2_MIN_S):
            raise DomainError(f"case i RHS needs |s| >= {CASE2_MIN_S} (the expansion divides by s)")
        # x Phi = x (x s/2 + p) / (x + s/2); poles where (x + s/2) = conj(l0) x (x s/2 + p)
        poles = _quadratic_roots(-np.conj(l0) * s / 2, 1 - np.conj(l0) * p, s / 2)

        def g(x):
            y = x * (x * s / 2 + p) / (x + s / 2)
            return (l0 - y) / (1 - np.conj(l0) * y)
    else:
        # Phi = (s/2 + x p) / (1 + x s/2); poles where 1 + x s/2 = conj(l0)(s/2 + x p)
        poles = _quadratic_roots(np.zeros_like(s), s / 2 - np.conj(l0) * p, 1 - np.conj(l0) * s / 2)

        def g(x):
            y = (s / 2 + x * p) / (1 + x * s / 2)
            return (l0 - y) / (1 - np.conj(l0) * y)

    radius = _radius_rule(poles)
    series = _circle_coefficients(g, radius, order, samples, variable)
    return OmegaSeries(case, side, l0, series, points=pts)


@dataclass(frozen=True)
class CaseOneReport:
    lambda0: complex
    lhs_order0_error: float
    lhs_order1_error: float
    rhs_order0_error: float
    rhs_order1_error: float
    contradiction_margin: float
    witness_lambda: complex
    higher_order_tail: float

    @property
    def violation_found(self) -> bool:
        return self.contradiction_margin > 0

    def to_dict(self) -> dict:
        w = self.witness_lambda
        return {"lambda0": [self.lambda0.real, self.lambda0.imag],
                "lhs_order0_error": self.lhs_order0_error, "lhs_order1_error": self.lhs_order1_error,
                "rhs_order0_error": self.rhs_order0_error, "rhs_order1_error": self.rhs_order1_error,
                "contradiction_margin": self.contradiction_margin,
                "witness_lambda": [w.real, w.imag], "higher_order_tail": self.higher_order_tail,
                "violation_found": self.violation_found}


def case_one_report(lambda0, n: int = 2000, seed: int = 0, order: int = 40) -> CaseOneReport:
    """Compare both sides of the case-i expansion with the closed-form coefficients.

    The contradiction margin is ``max |m_{lam0}(lam) - lam0|`` over branch
    samples: the order-0 LHS term is non-constant on ``{0} x D`` while the
    order-0 RHS term is the constant ``lam0``.
    """
    l0 = complex(lambda0)
    rng = np.random.default_rng(seed)
    lam = _disc(rng, n)
    # |m(lam) - lam0| = (1 - |lam0|^2)|lam| / |1 - conj(lam0) lam| peaks towards lam0/|lam0|
    lam = np.append(lam, 0.999 * (l0 / abs(l0) if l0 else 1))
    lhs = omega_fourier(Case.CASE_I, l0, Side.LHS, order=order, lam=lam)
    c = lhs.coefficients
    m0 = MoebiusMap(l0)(lam)
    e0 = max(np.max(np.abs(c[0, 0] - l0)), np.max(np.abs(c[0, 1] - m0)))
    e1 = max(np.max(np.abs(c[1, 0] - (abs(l0) ** 2 - 1) * lam)), np.max(np.abs(c[1, 1])))

    pts = sample_domain("g2", n, seed + 1).coords
    pts = pts[np.abs(pts[:, 0]) >= CASE2_MIN_S]
    rhs = omega_fourier(Case.CASE_I, l0, Side.RHS, order=order, points=pts)
    r = rhs.coefficients
    s, p = pts[:, 0], pts[:, 1]
    r0 = float(np.max(np.abs(r[0] - l0)))
    r1 = float(np.max(np.abs(r[1] + 2 * p / s * (1 - abs(l0) ** 2))))

    gap = np.abs(m0 - l0)
    k = int(np.argmax(gap))
    tail = max(lhs.series.tail, rhs.series.tail)
    return CaseOneReport(l0, float(e0), float(e1), r0, r1, float(gap[k]), complex(lam[k]), tail)


# ---------------------------------------------------------------------------
# case ii


def case2_candidate(lambda0, s, p, tol: float = DEFAULT.singular_denominator):
    """``(p - (s/2)^2) / (1 - conj(lam0) s/2)^2``, the forced image of ``[0, lam]``."""
    l0 = complex(lambda0)
    s = np.asarray(s, dtype=complex)
    p = np.asarray(p, dtype=complex)
    den = (1 - np.conj(l0) * s / 2) ** 2
    if np.any(np.abs(den) < tol):
        raise SingularEvaluationError(f"candidate denominator below {tol:g}")
    out = (p - (s / 2) ** 2) / den
    return complex(out) if out.ndim == 0 else out


def unimodular_lhs(t, theta):
    """Left side ``-2(1+t^2) cos 2theta + 8 t cos theta`` for ``lam = e^{i theta}``, ``mu = e^{-i theta}``."""
    return -2 * (1 + t ** 2) * np.cos(2 * theta) + 8 * t * np.cos(theta)


def unimodular_gap(t) -> tuple:
    """Closed-form maximum of :func:`unimodular_lhs` over theta, the bound ``2 + 2t^2``, and their gap."""
    t = float(t)
    if not 0 <= t < 1 + 1e-15:
        raise DomainError("t must lie in [0, 1]")
    lhs_max = 2 * (1 + 4 * t ** 2 + t ** 4) / (1 + t ** 2)
    rhs = 2 * (1 + t ** 2)
    return lhs_max, rhs, lhs_max - rhs


def unimodular_grid_max(t, n: int = 200_001) -> tuple:
    """Brute-force maximum of :func:`unimodular_lhs` over a uniform theta grid; returns ``(max, theta)``."""
    theta = np.linspace(0, np.pi, n)
    v = unimodular_lhs(t, theta)
    k = int(np.argmax(v))
    return float(v[k]), float(theta[k])


@dataclass(frozen=True)
class InequalityWitness:
    lam: complex
    mu: complex
    lhs: float
    rhs: float

    @property
    def gap(self) -> float:
        return self.lhs - self.rhs

    def to_dict(self) -> dict:
        return {"lambda": [self.lam.real, self.lam.imag], "mu": [self.mu.real, self.mu.imag],
                "lhs": self.lhs, "rhs": self.rhs, "gap": self.gap}


def inequality_sides(lambda0, lam, mu):
    """``(|(lam - mu)/2|, |1 - conj(lam0)(lam + mu)/2|)``."""
    l0 = complex(lambda0)
    return np.abs((lam - mu) / 2), np.abs(1 - np.conj(l0) * (lam + mu) / 2)


def find_inequality_violation(lambda0, grid_n: int = 4096) -> Optional[InequalityWitness]:
    """Search the closed bidisc for ``|(lam - mu)/2| > |1 - conj(lam0)(lam + mu)/2|``.

    The scan covers the rotated boundary family ``lam = e^{i(phi + theta)}``,
    ``mu = e^{i(phi - theta)}`` with ``phi = arg lam0`` on a theta grid that
    includes the optimal angle ``cos theta = t / (1 + t^2)``, plus radial
    shrinkings of each grid pair. Returns the largest violation, or ``None``.
    """
    l0 = complex(lambda0)
    t = abs(l0)
    phi = np.angle(l0) if t else 0.0
    theta = np.linspace(0, np.pi, grid_n)
    theta = np.append(theta, np.arccos(t / (1 + t ** 2)))
    radii = np.array([1.0, 1 - 1e-3, 0.99, 0.9, 0.5])
    lam = (radii[:, None] * np.exp(1j * (phi + theta))).ravel()
    mu = (radii[:, None] * np.exp(1j * (phi - theta))).ravel()
    lhs, rhs = inequality_sides(l0, lam, mu)
    k = int(np.argmax(lhs - rhs))
    if lhs[k] - rhs[k] <= 0:
        return None
    return InequalityWitness(complex(lam[k]), complex(mu[k]), float(lhs[k]), float(rhs[k]))


@dataclass(frozen=True)
class Case2Witness:
    lambda0: complex
    s: complex
    p: complex
    lam: complex
    mu: complex
    value: complex
    n_grid: int

    def to_dict(self) -> dict:
        enc = lambda z: [z.real, z.imag]
        return {"lambda0": enc(self.lambda0), "s": enc(self.s), "p": enc(self.p), "lambda": enc(self.lam),
                "mu": enc(self.mu), "modulus": abs(self.value), "n_grid": self.n_grid}


def case2_witness(lambda0, grid_n: int = 1000) -> Case2Witness:
    """Largest ``|case2_candidate|`` on a ``grid_n^2`` grid of G2 points.

    Points are ``pi(r e^{i(phi+theta)}, r e^{i(phi-theta)})`` with theta in
    ``[0, pi]`` and radii clustered towards 1 (all strictly inside).
    """
    l0 = complex(lambda0)
    phi = np.angle(l0) if l0 else 0.0
    theta = np.linspace(0, np.pi, grid_n)
    r = (1 - 1e-6) * np.sin(0.5 * np.pi * np.arange(1, grid_n + 1) / grid_n)
    lam = r[:, None] * np.exp(1j * (phi + theta))[None, :]
    mu = r[:, None] * np.exp(1j * (phi - theta))[None, :]
    s, p = pi_map(lam, mu)
    v = case2_candidate(l0, s, p)
    k = np.unravel_index(int(np.argmax(np.abs(v))), v.shape)
    return Case2Witness(l0, complex(s[k]), complex(p[k]), complex(lam[k]), complex(mu[k]), complex(v[k]),
                        int(v.size))


# ---------------------------------------------------------------------------
# uniqueness


def default_perturbations() -> list:
    """Polynomials vanishing on the variety: ``s (s^2 - 4p)`` times ``1, s, p``."""
    base = lambda s, p: s * (s ** 2 - 4 * p)
    return [("s(s^2-4p)", base),
            ("s^2(s^2-4p)", lambda s, p: s * base(s, p)),
            ("p s(s^2-4p)", lambda s, p: p * base(s, p))]


@dataclass(frozen=True)
class UniquenessEntry:
    name: str
    epsilon: float
    slice_deviation: float
    supnorm: float
    excluded: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "epsilon": self.epsilon, "slice_deviation": self.slice_deviation,
                "supnorm": self.supnorm, "excluded": self.excluded}


@dataclass(frozen=True)
class UniquenessReport:
    alpha: complex
    beta: complex
    seed: int
    n: int
    entries: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        """The unperturbed extension survives and every perturbed one is excluded."""
        return all(e.excluded == (e.epsilon != 0) for e in self.entries)

    def to_dict(self) -> dict:
        return {"alpha": [self.alpha.real, self.alpha.imag], "beta": [self.beta.real, self.beta.imag],
                "seed": self.seed, "n": self.n, "consistent": self.consistent,
                "entries": [e.to_dict() for e in self.entries]}


def uniqueness_scan(alpha, beta, perturbation_family: Optional[Sequence] = None,
                    epsilons: Sequence = (0.0, 0.1, 0.01), n: int = 100_000, seed: int = 0,
                    n_slices: int = 8, slice_tol: float = 1e-4) -> UniquenessReport:
    """Falsification scan: ``F + eps q`` with ``q`` vanishing on the variety.

    A candidate is excluded when some slice fails the automorphism test by
    more than ``slice_tol`` or its sampled sup-norm exceeds one.
    """
    alpha, beta = _unimodular(alpha, "alpha"), _unimodular(beta, "beta")
    family = list(perturbation_family) if perturbation_family is not None else default_perturbations()
    F = royal_extension(alpha, beta)
    pts = sample_domain("g2", n, seed).coords
    rng = np.random.default_rng([seed, 2])
    # slice directions away from omega = 1, where the slice degenerates to a constant
    omegas = np.exp(1j * rng.uniform(0.2, 2 * np.pi - 0.2, n_slices))
    entries = []
    for name, q in family:
        for eps in epsilons:
            if eps == 0 and entries and any(e.epsilon == 0 for e in entries):
                continue
            G = (lambda e, qq: (lambda s, p: F(s, p) + e * qq(s, p)))(eps, q)
            dev = max(mobius_slice_probe(G, w).deviation for w in omegas)
            sup = float(np.max(np.abs(G(pts[:, 0], pts[:, 1]))))
            excluded = bool(dev > slice_tol or sup > 1)
            entries.append(UniquenessEntry("none" if eps == 0 else name, float(eps), float(dev), sup, excluded))
    return UniquenessReport(alpha, beta, int(seed), int(n), entries)
