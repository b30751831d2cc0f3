"""Ambient domains and crossed-disc varieties.

Two model pairs are supported:

* the symmetrized bidisc ``G2 = {(z + w, zw) : z, w in D}`` with the variety
  ``V = {(2l, l^2)} u {(beta + conj(beta) l, l)}`` (``beta = 0`` gives the royal
  disc together with ``{0} x D``);
* the diamond ``{|z1| + |z2| < 1}`` with the crossed discs
  ``(D x {0}) u ({0} x D)``.

Coordinates are handled as complex numpy arrays of shape ``(n, 2)`` for the
vectorised paths; the small frozen point classes exist for validated, single
point use.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np

from .errors import DomainError
from .tolerances import DEFAULT


class DomainTag(str, Enum):
    G2 = "g2"
    DIAMOND = "diamond"


class Branch(int, Enum):
    BRANCH1 = 1
    BRANCH2 = 2


class SampleKind(str, Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    VARIETY = "variety"


def _scalar(z, name="value") -> complex:
    z = complex(z)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise DomainError(f"{name} must be finite, got {z!r}")
    return z


def pi_map(z1, z2):
    """Symmetrization map ``(z1, z2) -> (z1 + z2, z1 z2)``; works elementwise."""
    return z1 + z2, z1 * z2


def g2_roots(s, p):
    """Both roots of ``zeta^2 - s zeta + p``, computed without cancellation.

    The larger root comes from the sign of the square root that adds to ``s``;
    the smaller one is recovered from Vieta's product ``p``.
    """
    s = np.asarray(s, dtype=complex)
    p = np.asarray(p, dtype=complex)
    disc = np.sqrt(s * s - 4 * p)
    flip = (s.real * disc.real + s.imag * disc.imag) < 0
    disc = np.where(flip, -disc, disc)
    big = (s + disc) / 2
    # Vieta is only needed when |big| is large; tiny (even subnormal) roots take the direct formula
    safe = np.abs(big) > 1e-150
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        small = np.where(safe, p / np.where(safe, big, 1), (s - disc) / 2)
    return big, small


def g2_max_root_modulus(s, p):
    r1, r2 = g2_roots(s, p)
    return np.maximum(np.abs(r1), np.abs(r2))


def in_g2(s, p, margin: float = 0.0):
    """True iff both roots of ``zeta^2 - s zeta + p`` lie in ``|zeta| < 1 - margin``."""
    out = g2_max_root_modulus(s, p) < 1.0 - margin
    return bool(out) if np.ndim(out) == 0 else out


def in_diamond(z1, z2, margin: float = 0.0):
    out = np.abs(z1) + np.abs(z2) < 1.0 - margin
    return bool(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class G2Point:
    s: complex
    p: complex

    def __post_init__(self):
        object.__setattr__(self, "s", _scalar(self.s, "s"))
        object.__setattr__(self, "p", _scalar(self.p, "p"))
        if not in_g2(self.s, self.p, DEFAULT.boundary_margin):
            raise DomainError(f"({self.s}, {self.p}) is not strictly inside G2")

    @property
    def coords(self) -> tuple:
        return (self.s, self.p)


@dataclass(frozen=True)
class DiamondPoint:
    z1: complex
    z2: complex

    def __post_init__(self):
        object.__setattr__(self, "z1", _scalar(self.z1, "z1"))
        object.__setattr__(self, "z2", _scalar(self.z2, "z2"))
        if not in_diamond(self.z1, self.z2, DEFAULT.boundary_margin):
            raise DomainError(f"({self.z1}, {self.z2}) is not strictly inside the diamond")

    @property
    def coords(self) -> tuple:
        return (self.z1, self.z2)


DomainPoint = Union[G2Point, DiamondPoint]


def make_point(domain, c1, c2) -> DomainPoint:
    domain = DomainTag(domain)
    return G2Point(c1, c2) if domain is DomainTag.G2 else DiamondPoint(c1, c2)


@dataclass(frozen=True)
class VarietyPoint:
    branch: Branch
    param: complex
    ambient: DomainPoint

    @property
    def coords(self) -> tuple:
        return self.ambient.coords


def _branch_coords(domain: DomainTag, branch: Branch, lam, beta: complex = 0.0):
    lam = np.asarray(lam, dtype=complex)
    if domain is DomainTag.DIAMOND:
        zero = np.zeros_like(lam)
        return (lam, zero) if branch is Branch.BRANCH1 else (zero, lam)
    if branch is Branch.BRANCH1:
        return 2 * lam, lam * lam
    return beta + np.conj(beta) * lam, lam


def variety_coords(domain, branch, lam, beta: complex = 0.0) -> np.ndarray:
    """Vectorised branch parametrization; returns an ``(n, 2)`` complex array."""
    c1, c2 = _branch_coords(DomainTag(domain), Branch(branch), lam, beta)
    return np.stack(np.broadcast_arrays(c1, c2), axis=-1)


def variety_param(domain, branch, lam, beta: complex = 0.0) -> VarietyPoint:
    """Point of the variety on ``branch`` with disc parameter ``lam``.

    For G2 the first branch is ``l -> (2l, l^2)`` and the second
    ``l -> (beta + conj(beta) l, l)``; for the diamond they are the two
    coordinate discs. ``beta`` is ignored for the diamond.
    """
    domain, branch = DomainTag(domain), Branch(branch)
    lam = _scalar(lam, "lambda")
    if abs(lam) >= 1:
        raise DomainError(f"branch parameter must satisfy |lambda| < 1, got {lam}")
    beta = _scalar(beta, "beta")
    c1, c2 = _branch_coords(domain, branch, lam, beta)
    return VarietyPoint(branch, lam, make_point(domain, complex(c1), complex(c2)))


def variety_intersection(beta: complex = 0.0):
    """Common point of ``{(2l, l^2)}`` and ``{(beta + conj(beta) l, l)}``.

    Returns ``(a, lam1, lam2)`` where ``a`` is a :class:`G2Point` and ``lam1``,
    ``lam2`` are the branch parameters hitting it. The first-branch parameter
    solves ``conj(beta) l^2 - 2 l + beta = 0``; the root in the disc is written
    as ``beta / (1 + sqrt(1 - |beta|^2))`` to avoid cancellation.
    """
    beta = _scalar(beta, "beta")
    if abs(beta) >= 1:
        raise DomainError(f"|beta| must be < 1, got {abs(beta)}")
    lam1 = beta / (1 + np.sqrt(1 - abs(beta) ** 2))
    lam2 = lam1 * lam1
    return G2Point(2 * lam1, lam1 * lam1), complex(lam1), complex(lam2)


def base_point(domain, beta: complex = 0.0) -> DomainPoint:
    if DomainTag(domain) is DomainTag.DIAMOND:
        return DiamondPoint(0, 0)
    return variety_intersection(beta)[0]


def normalized_variety_param(branch, lam, beta: complex = 0.0) -> VarietyPoint:
    """G2 variety parametrized so that both branches send ``0`` to the base point.

    Each branch is precomposed with the disc automorphism
    ``l -> (l + c) / (1 + conj(c) l)`` where ``c`` is that branch's parameter
    at the intersection.
    """
    branch = Branch(branch)
    _, lam1, lam2 = variety_intersection(beta)
    c = lam1 if branch is Branch.BRANCH1 else lam2
    lam = _scalar(lam, "lambda")
    moved = (lam + c) / (1 + np.conj(c) * lam)
    vp = variety_param(DomainTag.G2, branch, moved, beta)
    return VarietyPoint(branch, lam, vp.ambient)


# ---------------------------------------------------------------------------
# Sampling


@dataclass(frozen=True)
class SampleSet:
    """Reproducible batch of points.

    ``coords`` has shape ``(n, 2)``. Variety samples additionally carry the
    branch label and disc parameter of every point.
    """

    domain: DomainTag
    kind: SampleKind
    seed: int
    coords: np.ndarray
    branch: Optional[np.ndarray] = field(default=None)
    param: Optional[np.ndarray] = field(default=None)

    def __len__(self) -> int:
        return len(self.coords)

    def points(self) -> list:
        """Materialise validated point objects (interior and variety kinds only)."""
        if self.kind is SampleKind.BOUNDARY:
            raise DomainError("boundary samples are not interior points")
        if self.kind is SampleKind.VARIETY:
            return [
                VarietyPoint(Branch(int(b)), complex(l), make_point(self.domain, *c))
                for b, l, c in zip(self.branch, self.param, self.coords)
            ]
        return [make_point(self.domain, *c) for c in self.coords]

    def to_rows(self) -> list:
        rows = []
        for i, (c1, c2) in enumerate(self.coords):
            row = {"re1": float(c1.real), "im1": float(c1.imag), "re2": float(c2.real), "im2": float(c2.imag)}
            if self.branch is not None:
                row["branch"] = int(self.branch[i])
                row["param_re"] = float(self.param[i].real)
                row["param_im"] = float(self.param[i].imag)
            rows.append(row)
        return rows

    def to_csv(self) -> str:
        rows = self.to_rows()
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["re1", "im1", "re2", "im2"],
                                lineterminator="\n")
        writer.writeheader()
        writer.writerows({k: repr(v) if isinstance(v, float) else v for k, v in r.items()} for r in rows)
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({
            "domain": self.domain.value,
            "kind": self.kind.value,
            "seed": self.seed,
            "n": len(self),
            "points": self.to_rows(),
        }, indent=2, sort_keys=True)


def _disc(rng: np.random.Generator, n: int, radius: float = 1.0) -> np.ndarray:
    # sqrt for area-uniform radii; the factor keeps samples off the unit circle
    r = radius * np.sqrt(rng.random(n)) * (1 - 4 * DEFAULT.boundary_margin)
    return r * np.exp(2j * np.pi * rng.random(n))


def _circle(rng: np.random.Generator, n: int) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random(n))


def sample_domain(domain, n: int, seed: int, kind=SampleKind.INTERIOR, beta: complex = 0.0) -> SampleSet:
    """Draw ``n`` seeded points of the requested kind.

    * interior G2: uniform samples of the bidisc pushed through :func:`pi_map`;
    * interior diamond: rejection sampling from the bidisc (acceptance ~1/6);
    * boundary: G2 distinguished boundary ``pi(T^2)``, or ``|z1| + |z2| = 1``;
    * variety: random branch labels and uniform disc parameters.
    """
    domain, kind = DomainTag(domain), SampleKind(kind)
    if n <= 0:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    branch = param = None
    if kind is SampleKind.INTERIOR:
        if domain is DomainTag.G2:
            s, p = pi_map(_disc(rng, n), _disc(rng, n))
            coords = np.stack([s, p], axis=1)
        else:
            chunks, have = [], 0
            while have < n:
                z1, z2 = _disc(rng, 7 * n), _disc(rng, 7 * n)
                keep = in_diamond(z1, z2, 4 * DEFAULT.boundary_margin)
                chunk = np.stack([z1[keep], z2[keep]], axis=1)
                chunks.append(chunk)
                have += len(chunk)
            coords = np.concatenate(chunks)[:n]
    elif kind is SampleKind.BOUNDARY:
        if domain is DomainTag.G2:
            s, p = pi_map(_circle(rng, n), _circle(rng, n))
            coords = np.stack([s, p], axis=1)
        else:
            t = rng.random(n)
            coords = np.stack([t * _circle(rng, n), (1 - t) * _circle(rng, n)], axis=1)
    else:
        branch = rng.integers(1, 3, size=n)
        param = _disc(rng, n)
        coords = np.empty((n, 2), dtype=complex)
        for b in (1, 2):
            mask = branch == b
            coords[mask] = variety_coords(domain, b, param[mask], beta)
    return SampleSet(domain, kind, int(seed), coords, branch, param)


def coords_of(points) -> np.ndarray:
    """Coerce a point object, a list of them, or an array into ``(n, 2)`` coords."""
    if isinstance(points, (G2Point, DiamondPoint, VarietyPoint)):
        return np.array([points.coords], dtype=complex)
    if isinstance(points, SampleSet):
        return points.coords
    arr = np.asarray(points if not isinstance(points, list) or not points
                     or not hasattr(points[0], "coords") else [q.coords for q in points],
                     dtype=complex)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.shape[-1] != 2:
        raise DomainError(f"expected coordinates of shape (n, 2), got {arr.shape}")
    return arr
