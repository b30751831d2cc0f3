"""Matrix-coefficient polynomials in one complex variable."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError


@dataclass(frozen=True, eq=False)
class MatrixPolynomial:
    """``g(lam) = sum_k coeffs[k] lam^k`` with ``coeffs`` of shape ``(deg + 1, rows, cols)``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim == 2:
            c = c[:, :, None]
        if c.ndim != 3 or c.shape[0] == 0:
            raise InvalidInputError(f"coefficients must have shape (deg+1, r, c), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InvalidInputError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def scalar(cls, coeffs) -> "MatrixPolynomial":
        return cls(np.asarray(coeffs, dtype=complex).reshape(-1, 1, 1))

    @classmethod
    def constant(cls, G) -> "MatrixPolynomial":
        return cls(np.asarray(G, dtype=complex)[None])

    @property
    def shape(self) -> tuple:
        return self.coeffs.shape[1:]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def __call__(self, lam):
        """Evaluate by Horner; ``lam`` of shape ``S`` gives values of shape ``S + (r, c)``."""
        lam = np.asarray(lam, dtype=complex)
        out = np.broadcast_to(self.coeffs[-1], lam.shape + self.shape).copy()
        for c in self.coeffs[-2::-1]:
            out = out * lam[..., None, None] + c
        return out

    def trimmed(self) -> "MatrixPolynomial":
        """Drop exactly-zero leading coefficients (keeps at least the constant term)."""
        nz = np.flatnonzero(np.any(self.coeffs != 0, axis=(1, 2)))
        top = nz[-1] + 1 if len(nz) else 1
        return MatrixPolynomial(self.coeffs[:top])

    def divide_by_lambda(self) -> "MatrixPolynomial":
        """Exact coefficient shift ``g(lam) / lam``; requires ``g(0) == 0``."""
        if np.any(self.coeffs[0] != 0):
            raise InvalidInputError("division by lambda needs a vanishing constant term")
        if self.degree == 0:
            return MatrixPolynomial(np.zeros((1,) + self.shape))
        return MatrixPolynomial(self.coeffs[1:])

    def __add__(self, other):
        if not isinstance(other, MatrixPolynomial):
            return NotImplemented
        if other.shape != self.shape:
            raise InvalidInputError(f"shape mismatch {self.shape} vs {other.shape}")
        n = max(len(self.coeffs), len(other.coeffs))
        out = np.zeros((n,) + self.shape, dtype=complex)
        out[: len(self.coeffs)] += self.coeffs
        out[: len(other.coeffs)] += other.coeffs
        return MatrixPolynomial(out)

    def __mul__(self, a):
        return MatrixPolynomial(self.coeffs * complex(a))

    __rmul__ = __mul__

    def conjugated(self, left, right) -> "MatrixPolynomial":
        """``lam -> left @ g(lam) @ right`` for constant matrices."""
        return MatrixPolynomial(np.asarray(left) @ self.coeffs @ np.asarray(right))

    def boundary_sup(self, n: int = 512) -> float:
        """Largest singular value over ``n`` equispaced points of the unit circle."""
        lam = np.exp(2j * np.pi * np.arange(n) / n)
        return float(np.linalg.norm(self(lam), ord=2, axis=(1, 2)).max())

    def to_dict(self) -> dict:
        return {
            "shape": list(self.shape),
            "coeffs": [[[[v.real, v.imag] for v in row] for row in c] for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, d) -> "MatrixPolynomial":
        try:
            shape = tuple(int(x) for x in d["shape"])
            arr = np.asarray(d["coeffs"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"bad matrix polynomial JSON: {exc}") from exc
        if len(shape) != 2 or arr.ndim != 4 or arr.shape[1:] != shape + (2,):
            raise InvalidInputError(
                f"coeffs must be nested as [degree][row][col][re, im] with shape {shape}, got {arr.shape}")
        return cls(arr[..., 0] + 1j * arr[..., 1])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "MatrixPolynomial":
        return cls.from_dict(json.loads(text))
