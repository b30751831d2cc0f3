"""Unitary colligations and exact realization of contractive matrix functions.

A colligation is a unitary block matrix ``U = [[A, B], [C, D]]`` on
``X (+) K``. Its transfer function is ``A + lam B (I - lam D)^{-1} C``.

A finite unitary colligation always has an inner transfer function, so a
contractive but non-inner polynomial cannot be realized exactly with
``X = H``. :func:`realize` therefore lets the external space carry an
ancilla, ``X = H (+) E``, and the function of interest is the compression of
the transfer function to ``H``. The realization is built in three exact steps:

1. a minimal state-space realization (shift register, then Kalman reduction);
2. a state similarity from the minimal solution of the bounded-real Riccati
   equation, which makes the system matrix a contraction ``T``;
3. the Halmos dilation ``[[T, D_{T*}], [D_T, -T*]]`` with the second copy of
   ``X`` taken as ancilla.

None of the steps changes the ``H``-compressed transfer function, so the
result matches the input everywhere in the disc, not only at sample nodes.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import (IllConditionedFeedbackError, InvalidInputError, NotSchurError,
                      RealizationError)
from ..tolerances import DEFAULT, Tolerances
from .operators import adjoint, opnorm, psd_sqrt, unitarity_residual
from .polynomial import MatrixPolynomial

log = logging.getLogger(__name__)


def _encode(M) -> list:
    return [[[v.real, v.imag] for v in row] for row in np.asarray(M)]


def _decode(rows, shape) -> np.ndarray:
    if shape[0] * shape[1] == 0:
        return np.zeros(shape, dtype=complex)
    arr = np.asarray(rows, dtype=float)
    if arr.shape != tuple(shape) + (2,):
        raise InvalidInputError(f"matrix entries have shape {arr.shape}, expected {tuple(shape) + (2,)}")
    return arr[..., 0] + 1j * arr[..., 1]


@dataclass(frozen=True, eq=False)
class Colligation:
    """Unitary ``[[A, B], [C, D]]`` on ``(H (+) E) (+) K``.

    ``ancilla`` is ``dim E``; the physical space ``H`` is the leading
    ``dH = A.shape[0] - ancilla`` coordinates of the external space.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    ancilla: int = 0
    tol: float = DEFAULT.colligation_unitarity

    def __post_init__(self):
        A, B, C, D = (np.asarray(M, dtype=complex) for M in (self.A, self.B, self.C, self.D))
        dx, dk = A.shape[0], D.shape[0]
        if A.shape != (dx, dx) or B.shape != (dx, dk) or C.shape != (dk, dx) or D.shape != (dk, dk):
            raise InvalidInputError(
                f"inconsistent block shapes A{A.shape} B{B.shape} C{C.shape} D{D.shape}")
        if not 0 <= self.ancilla <= dx:
            raise InvalidInputError(f"ancilla dimension {self.ancilla} out of range")
        for name, M in zip("ABCD", (A, B, C, D)):
            object.__setattr__(self, name, M)
        res = unitarity_residual(self.matrix)
        if res > self.tol:
            raise RealizationError(f"colligation is not unitary: ||U*U - I|| = {res:.3g}")

    @classmethod
    def from_matrix(cls, U, external: int, ancilla: int = 0, tol: float = DEFAULT.colligation_unitarity):
        U = np.asarray(U, dtype=complex)
        x = external
        return cls(U[:x, :x], U[:x, x:], U[x:, :x], U[x:, x:], ancilla, tol)

    @property
    def dX(self) -> int:
        return self.A.shape[0]

    @property
    def dH(self) -> int:
        return self.dX - self.ancilla

    @property
    def dE(self) -> int:
        return self.ancilla

    @property
    def dK(self) -> int:
        return self.D.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.A, self.B], [self.C, self.D]])

    def unitarity_residual(self) -> float:
        return unitarity_residual(self.matrix)

    def to_dict(self) -> dict:
        return {
            "dims": {"external": self.dX, "state": self.dK, "ancilla": self.ancilla},
            "A": _encode(self.A), "B": _encode(self.B), "C": _encode(self.C), "D": _encode(self.D),
        }

    @classmethod
    def from_dict(cls, d) -> "Colligation":
        try:
            x, k, e = (int(d["dims"][key]) for key in ("external", "state", "ancilla"))
            blocks = [_decode(d[n], s) for n, s in zip("ABCD", [(x, x), (x, k), (k, x), (k, k)])]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"bad colligation JSON: {exc}") from exc
        return cls(*blocks, ancilla=e)


def _feedback_bound(D, lam, limit):
    rho = np.abs(lam) * (opnorm(D) if D.size else 0.0)
    with np.errstate(divide="ignore"):
        bound = np.where(rho < 1, (1 + rho) / (1 - rho), np.inf)
    if np.any(bound > limit):
        raise IllConditionedFeedbackError(
            f"(I - lam D) condition bound {np.max(bound):.3g} exceeds {limit:g}")


def full_transfer(col: Colligation, lam, tol: Tolerances = DEFAULT):
    """``A + lam B (I - lam D)^{-1} C`` on the whole external space; batched over ``lam``."""
    lam = np.asarray(lam, dtype=complex)
    out = np.broadcast_to(col.A, lam.shape + col.A.shape).copy()
    if col.dK == 0:
        return out
    _feedback_bound(col.D, lam, tol.feedback_condition)
    M = np.eye(col.dK) - lam[..., None, None] * col.D
    out += lam[..., None, None] * (col.B @ np.linalg.solve(M, np.broadcast_to(col.C, M.shape[:-1] + (col.dX,))))
    return out


def transfer_function(col: Colligation, lam, tol: Tolerances = DEFAULT):
    """Transfer function compressed to the physical space ``H``."""
    h = col.dH
    return full_transfer(col, lam, tol)[..., :h, :h]


def transfer_eval(col: Colligation, lam, tol: Tolerances = DEFAULT):
    """``A lam + B lam (I - D lam)^{-1} C lam``: the transfer function times ``lam``.

    This is the normalization that vanishes at ``lam = 0``; it is what a
    crossed-disc branch of the extension reproduces.
    """
    lam = np.asarray(lam, dtype=complex)
    return lam[..., None, None] * transfer_function(col, lam, tol)


# ---------------------------------------------------------------------------
# state-space machinery (blocks in colligation order: A in->out, B state->out,
# C in->state, D state->state)


def _orth(M, cutoff):
    if M.shape[1] == 0 or M.shape[0] == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    if s[0] == 0:
        return u[:, :0]
    return u[:, s > cutoff * s[0]]


def shift_realization(g: MatrixPolynomial):
    """Shift-register realization of a polynomial: the state holds past inputs."""
    G = g.coeffs
    N, (r, c) = g.degree, g.shape
    if r != c:
        raise InvalidInputError(f"realization needs a square matrix function, got shape {g.shape}")
    n = N * c
    B = np.concatenate(list(G[1:]), axis=1) if N else np.zeros((r, 0), complex)
    C = np.zeros((n, c), complex)
    if N:
        C[:c] = np.eye(c)
    D = np.zeros((n, n), complex)
    for k in range(1, N):
        D[k * c:(k + 1) * c, (k - 1) * c:k * c] = np.eye(c)
    return G[0].copy(), B, C, D


def minimal_realization(A, B, C, D, cutoff=DEFAULT.rank_cutoff):
    """Kalman reduction to the reachable, then observable, part."""
    n = D.shape[0]
    if n == 0:
        return A, B, C, D
    blocks = [C]
    for _ in range(n - 1):
        blocks.append(D @ blocks[-1])
    V = _orth(np.concatenate(blocks, axis=1), cutoff)
    B, C, D = B @ V, adjoint(V) @ C, adjoint(V) @ D @ V
    n = D.shape[0]
    if n == 0:
        return A, B, C, D
    blocks = [B]
    for _ in range(n - 1):
        blocks.append(blocks[-1] @ D)
    V = _orth(adjoint(np.concatenate(blocks, axis=0)), cutoff)
    return A, B @ V, adjoint(V) @ C, adjoint(V) @ D @ V


def bounded_real_gramian(A, B, C, D, max_iter=20000, rtol=1e-15):
    """Minimal Hermitian ``Q >= 0`` with ``U (I (+) Q) U* <= I (+) Q``.

    Fixed-point iteration of the bounded-real Riccati map from ``Q = 0``:

        Q <- C C* + D Q D* + X R^+ X*,
        R = I - A A* - B Q B*,  X = C A* + D Q B*.

    The iterates increase monotonically to the minimal solution, which is
    bounded below by the reachability Gramian, hence invertible for a
    reachable realization. Returns ``(None, it)`` when ``R`` loses
    positivity or the iteration stalls, i.e. the system is not contractive.
    """
    n, m = D.shape[0], A.shape[0]
    Q = np.zeros((n, n), complex)
    eye = np.eye(m)
    for it in range(1, max_iter + 1):
        R = eye - A @ adjoint(A) - B @ Q @ adjoint(B)
        R = (R + adjoint(R)) / 2
        if m and np.linalg.eigvalsh(R)[0] < -1e-12:
            return None, it
        X = C @ adjoint(A) + D @ Q @ adjoint(B)
        Qn = C @ adjoint(C) + D @ Q @ adjoint(D) + X @ np.linalg.pinv(R, rcond=1e-13, hermitian=True) @ adjoint(X)
        Qn = (Qn + adjoint(Qn)) / 2
        step = np.linalg.norm(Qn - Q)
        Q = Qn
        if step <= rtol * max(1.0, np.linalg.norm(Q)):
            return Q, it
    return None, max_iter


# squared defects below this are rounding noise of singular values equal to 1
DEFECT_FLOOR = 1e-13

# contraction levels tried in turn; 1.0 is the non-strict fallback for inner data
_RHOS = (0.99, 0.999, 0.9999, 1.0)


def contractive_realization(A, B, C, D):
    """Similar realization whose system matrix is a contraction.

    For the first ``rho`` in ``_RHOS`` for which the scaled system
    ``U / rho`` is still bounded-real, the state similarity ``Q^{1/2}`` from
    its minimal Gramian gives ``||T|| <= rho``. A margin below one keeps the
    defect operators of the dilation well conditioned.
    """
    if D.shape[0] == 0:
        return np.asarray(A)
    for rho in _RHOS:
        Q, iters = bounded_real_gramian(A / rho, B / rho, C / rho, D / rho)
        if Q is None:
            continue
        w = np.linalg.eigvalsh(Q)
        if w[0] <= 0:
            raise RealizationError("bounded-real Gramian is singular; realization is not minimal")
        S, Si = psd_sqrt(Q), psd_sqrt(Q, inverse=True)
        T = np.block([[A, B @ S], [Si @ C, Si @ D @ S]])
        if opnorm(T) <= rho + 1e-12:
            log.debug("rho %g after %d Riccati iterations, cond(Q) %.3g", rho, iters, w[-1] / w[0])
            return T
    raise RealizationError("no contractive realization found; the function is not Schur class")


def halmos_colligation(T, d_ext, d_phys, tol: Tolerances = DEFAULT,
                       force_ancilla: bool = False) -> Colligation:
    """Unitary colligation from a contractive system matrix ``T`` on ``X (+) K``.

    If ``T`` is already unitary it is used as is, unless ``force_ancilla``.
    Otherwise a copy ``X' (+) K'`` of the whole space is appended to the
    external space as ancilla (in that order), which keeps the construction
    canonical (basis independent).
    """
    n = T.shape[0]
    excess = opnorm(T) - 1
    if excess > 1e-12:
        raise RealizationError(f"system matrix is not contractive (||T|| - 1 = {excess:.3g})")
    if not force_ancilla and unitarity_residual(T) <= 1e-13:
        return Colligation.from_matrix(T, d_ext, ancilla=d_ext - d_phys, tol=tol.colligation_unitarity)
    # both defect operators from one SVD so that T D_T = D_T* T holds to rounding
    P, sig, Qh = np.linalg.svd(T)
    # 1 - sig^2 at rounding level would become a ~1e-8 defect under the square root
    gap = 1 - np.minimum(sig, 1) ** 2
    defect = np.sqrt(np.where(gap < DEFECT_FLOOR, 0.0, gap))
    Dt = (adjoint(Qh) * defect) @ Qh
    Dts = (P * defect) @ adjoint(P)
    U = np.block([[T, Dts], [Dt, -adjoint(T)]])
    order = np.r_[np.arange(d_ext), np.arange(n, 2 * n), np.arange(d_ext, n)]
    U = U[np.ix_(order, order)]
    return Colligation.from_matrix(U, d_ext + n, ancilla=d_ext + n - d_phys, tol=tol.colligation_unitarity)


def colligation_from_state_space(A, B, C, D, tol: Tolerances = DEFAULT,
                                 force_ancilla: bool = False) -> Colligation:
    """Unitary colligation realizing ``A + lam B (I - lam D)^{-1} C`` on ``H``.

    The input realization need not be contractive or minimal, but its
    transfer function must be a contraction on the disc.
    """
    A, B, C, D = minimal_realization(*(np.asarray(M, dtype=complex) for M in (A, B, C, D)),
                                     cutoff=tol.rank_cutoff)
    T = contractive_realization(A, B, C, D)
    d = A.shape[0]
    return halmos_colligation(T, d, d, tol, force_ancilla)


def chebyshev_disc_nodes(n: int, radius: float = 0.9) -> np.ndarray:
    """Interior nodes: Chebyshev-distributed radii in ``(0, radius)``, golden-angle phases."""
    k = np.arange(n)
    r = radius * (1 + np.cos(np.pi * (2 * k + 1) / (2 * n))) / 2
    return r * np.exp(2j * np.pi * k * (np.sqrt(5) - 1) / 2)


def pick_matrix(values, nodes) -> np.ndarray:
    """Block Pick matrix ``(I - g_i g_j*) / (1 - lam_i conj(lam_j))``."""
    n, d = values.shape[0], values.shape[1]
    num = np.eye(d)[None, None] - np.einsum("iab,jcb->ijac", values, values.conj())
    den = 1 - nodes[:, None] * nodes[None, :].conj()
    P = num / den[:, :, None, None]
    return P.transpose(0, 2, 1, 3).reshape(n * d, n * d)


def check_schur(g: MatrixPolynomial, n_samples: int = 64, tol: Tolerances = DEFAULT):
    """Desk-scale Schur certificate: boundary sup-norm and Pick-matrix positivity."""
    sup = g.boundary_sup(512)
    if sup > 1 + tol.schur_certificate:
        raise NotSchurError(f"boundary sup-norm {sup:.12g} exceeds 1 + {tol.schur_certificate:g}")
    nodes = chebyshev_disc_nodes(n_samples)
    P = pick_matrix(g(nodes), nodes)
    low = np.linalg.eigvalsh((P + adjoint(P)) / 2)[0]
    if low < -tol.pick_psd:
        raise NotSchurError(f"Pick matrix has eigenvalue {low:.3g} < -{tol.pick_psd:g}")
    return sup


def realize(g: MatrixPolynomial, n_samples: int = 64, tol: float = 1e-10,
            tolerances: Tolerances = DEFAULT) -> Colligation:
    """Unitary colligation whose ``H``-compressed transfer function equals ``g``.

    ``n_samples`` interior nodes are used for the Pick-matrix certificate and
    for the post-construction match check at level ``tol``.
    """
    if g.shape[0] != g.shape[1]:
        raise InvalidInputError(f"realization needs a square matrix function, got shape {g.shape}")
    g = g.trimmed()
    check_schur(g, n_samples, tolerances)
    col = colligation_from_state_space(*shift_realization(g), tol=tolerances)
    nodes = chebyshev_disc_nodes(n_samples)
    err = float(opnorm(transfer_function(col, nodes, tolerances) - g(nodes)).max())
    if err > tol:
        raise RealizationError(f"realization mismatch {err:.3g} at interior nodes exceeds {tol:g}")
    return col


def realize_divided(f: MatrixPolynomial, n_samples: int = 64, tol: float = 1e-10,
                    tolerances: Tolerances = DEFAULT, force_ancilla: bool = False) -> Colligation:
    """Realize ``f(lam) / lam`` after moving ``f(0)`` to the origin.

    With ``W = f(0)``, the function realized is ``m_W(f(lam)) / lam`` where
    ``m_W`` is :func:`~npext.schur.operators.operator_moebius`. The ball
    automorphism is a constant linear-fractional map, so it is absorbed into
    the shift-register realization of ``f`` exactly; the division by ``lam``
    is then a state-space identity because the normalized function vanishes
    at the origin. When ``f(0) = 0`` this is the plain coefficient shift.
    """
    from .operators import operator_moebius

    f = f.trimmed()
    if f.shape[0] != f.shape[1]:
        raise InvalidInputError(f"realization needs a square matrix function, got shape {f.shape}")
    check_schur(f, n_samples, tolerances)
    W = f.coeffs[0]
    nodes = chebyshev_disc_nodes(n_samples)
    if not np.any(W):
        g = f.divide_by_lambda()
        target = g(nodes)
        col = colligation_from_state_space(*shift_realization(g), tol=tolerances,
                                           force_ancilla=force_ancilla)
    else:
        eye = np.eye(W.shape[0])
        if opnorm(W) > 1 - tolerances.contraction_margin:
            raise NotSchurError(f"||f(0)|| = {opnorm(W):.12g} is not a strict contraction")
        dW, dWs = psd_sqrt(eye - adjoint(W) @ W), psd_sqrt(eye - W @ adjoint(W))
        J11, J12, J21, J22 = W, -dWs, dW, adjoint(W)
        A, B, C, D = shift_realization(f)
        Rinv = np.linalg.inv(eye - A @ J22)
        Ah = J11 + J12 @ Rinv @ A @ J21
        Bh = J12 @ Rinv @ B
        Ch = C @ (J21 + J22 @ Rinv @ A @ J21)
        Dh = D + C @ J22 @ Rinv @ B
        if opnorm(Ah) > 1e-10:
            raise RealizationError(f"normalized function does not vanish at 0 ({opnorm(Ah):.3g})")
        col = colligation_from_state_space(Bh @ Ch, Bh @ Dh, Ch, Dh, tol=tolerances,
                                           force_ancilla=force_ancilla)
        target = operator_moebius(W, f(nodes), tolerances.contraction_margin) / nodes[:, None, None]
    err = float(opnorm(transfer_function(col, nodes, tolerances) - target).max())
    if err > tol:
        raise RealizationError(f"realization mismatch {err:.3g} at interior nodes exceeds {tol:g}")
    return col


def pad_pair(col1: Colligation, col2: Colligation, shared_ancilla: int = 0):
    """Bring two colligations onto the common space ``H (+) S (+) E1 (+) E2 (+) K1 (+) K2``.

    The first ``shared_ancilla`` ancilla coordinates ``S`` of both
    colligations are identified; the rest of each ancilla and each state
    space is private, and a colligation acts as the identity on the other
    one's private coordinates. Both compressed transfer functions are
    unchanged.
    """
    if col1.dH != col2.dH:
        raise InvalidInputError(f"physical dimensions differ: {col1.dH} vs {col2.dH}")
    sh = shared_ancilla
    if not 0 <= sh <= min(col1.dE, col2.dE):
        raise InvalidInputError(f"shared ancilla dimension {sh} exceeds an ancilla "
                                f"({col1.dE}, {col2.dE})")
    h, e1, e2, k1, k2 = col1.dH, col1.dE - sh, col2.dE - sh, col1.dK, col2.dK
    offs = np.cumsum([0, h, sh, e1, e2, k1, k2])
    H, S, E1, E2, K1, K2 = (np.arange(offs[i], offs[i + 1]) for i in range(6))
    total = offs[-1]

    def embed(col, own):
        U = np.eye(total, dtype=complex)
        U[np.ix_(own, own)] = col.matrix
        return U

    U1 = embed(col1, np.r_[H, S, E1, K1])
    U2 = embed(col2, np.r_[H, S, E2, K2])
    ext = h + sh + e1 + e2
    return (Colligation.from_matrix(U1, ext, ext - h, col1.tol),
            Colligation.from_matrix(U2, ext, ext - h, col2.tol))
