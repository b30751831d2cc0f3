"""Finite-dimensional operator tools: unitary diagonalization and ball automorphisms."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..errors import DomainError, NumericalFailureError
from ..tolerances import DEFAULT


def adjoint(M):
    return np.swapaxes(np.conj(M), -1, -2)


def opnorm(M):
    """Spectral norm; batched over leading axes."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0 if M.ndim == 2 else np.zeros(M.shape[:-2])
    if M.ndim == 2:
        return np.linalg.norm(M, ord=2)
    if M.shape[-2:] == (1, 1):
        return np.abs(M[..., 0, 0])
    # batched: largest eigenvalue of the Gram matrix is cheaper than a batched SVD
    G = adjoint(M) @ M if M.shape[-1] <= M.shape[-2] else M @ adjoint(M)
    if G.shape[-1] == 2:
        # closed form; the larger root involves no cancellation
        a, d, b = G[..., 0, 0].real, G[..., 1, 1].real, G[..., 0, 1]
        top = (a + d) / 2 + np.hypot((a - d) / 2, np.abs(b))
        return np.sqrt(np.clip(top, 0, None))
    return np.sqrt(np.clip(np.linalg.eigvalsh(G)[..., -1], 0, None))


def unitarity_residual(U) -> float:
    U = np.asarray(U)
    if U.size == 0:
        return 0.0
    return float(opnorm(adjoint(U) @ U - np.eye(U.shape[-1])))


def psd_sqrt(H, inverse: bool = False):
    """Square root (or inverse square root) of a Hermitian PSD matrix.

    Eigenvalues are clamped at zero before the root is taken.
    """
    H = (H + adjoint(H)) / 2
    w, V = np.linalg.eigh(H)
    w = np.clip(w, 0, None)
    r = 1 / np.sqrt(w) if inverse else np.sqrt(w)
    return (V * r[..., None, :]) @ adjoint(V)


@dataclass(frozen=True, eq=False)
class UnitaryEigen:
    """``U = W diag(taus) W*`` with ``W`` unitary and ``taus`` on the unit circle."""

    W: np.ndarray
    taus: np.ndarray

    def residual(self, U) -> float:
        return float(opnorm(U @ self.W - self.W * self.taus[None, :]))

    def reconstruct(self):
        return (self.W * self.taus[None, :]) @ self.W.conj().T


def unitary_eig(U, tol=DEFAULT) -> UnitaryEigen:
    """Diagonalize a unitary matrix.

    Uses the complex Schur form, which is diagonal for normal matrices; this
    keeps eigenvectors orthonormal inside degenerate eigenspaces. Eigenvalues
    are projected onto the circle and sorted by argument in ``[0, 2 pi)``.
    """
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {U.shape}")
    n = U.shape[0]
    if n == 0:
        return UnitaryEigen(np.zeros((0, 0), complex), np.zeros(0, complex))
    if unitarity_residual(U) > tol.unitary_input:
        raise DomainError(f"matrix is not unitary (residual {unitarity_residual(U):.3g})")
    try:
        T, Z = scipy.linalg.schur(U, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailureError(f"Schur decomposition failed: {exc}") from exc
    d = np.diag(T)
    taus = d / np.abs(d)
    order = np.argsort(np.mod(np.angle(taus), 2 * np.pi), kind="stable")
    eig = UnitaryEigen(Z[:, order], taus[order])
    if unitarity_residual(eig.W) > tol.eig_unitarity:
        raise NumericalFailureError("eigenvector matrix lost unitarity")
    if eig.residual(U) > tol.eig_residual:
        raise NumericalFailureError(f"eigen-residual {eig.residual(U):.3g} exceeds {tol.eig_residual:g}")
    return eig


def operator_moebius(Wc, X, margin: float = DEFAULT.contraction_margin):
    """Automorphism of the operator unit ball exchanging ``Wc`` and ``0``.

    ``m(X) = (I - Wc Wc*)^{-1/2} (Wc - X) (I - Wc* X)^{-1} (I - Wc* Wc)^{1/2}``.
    ``X`` may carry leading batch axes. The map is an involution.
    """
    Wc = np.asarray(Wc, dtype=complex)
    X = np.asarray(X, dtype=complex)
    if opnorm(Wc) > 1 - margin:
        raise DomainError(
            f"base value has norm {opnorm(Wc):.12g}; needs <= 1 - {margin:g} (boundary case unsupported)")
    n = Wc.shape[0]
    eye = np.eye(n)
    left = psd_sqrt(eye - Wc @ Wc.conj().T, inverse=True)
    right = psd_sqrt(eye - Wc.conj().T @ Wc)
    inner = np.linalg.solve(adjoint(eye - Wc.conj().T @ X), adjoint(Wc - X))
    return left @ adjoint(inner) @ right


def haar_unitary(n: int, rng: np.random.Generator):
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))[None, :]
