"""Generalized Gell-Mann basis of H_n and Bloch-vector coordinates.

Every Hermitian ``a`` is written as ``a = (Tr a / n) 1 + sum_k x_k f_k`` where
``f_1 .. f_{n^2-1}`` are orthonormal (w.r.t. ``Tr(ab)``) traceless Hermitian
generators, ordered as all diagonal ``d_l``, then all symmetric ``u_kl``,
then all antisymmetric ``v_kl`` (pairs in lexicographic order).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import (
    DimensionMismatchError,
    InvalidDimensionError,
    NotHermitianError,
    PreconditionError,
)

__all__ = [
    "HermitianMatrix",
    "BlochVector",
    "GellMannBasis",
    "RegionKind",
    "Region",
    "build_basis",
    "bloch_encode",
    "bloch_decode",
    "region_contains",
    "epsilon_p",
]


def _asymmetry(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Dense Hermitian matrix; Hermiticity is checked at construction."""

    entries: np.ndarray
    max_asymmetry: float = 0.0

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
        asym = _asymmetry(a)
        scale = max(1.0, float(np.max(np.abs(a))))
        if asym > DEFAULT_TOLERANCES.construction * scale:
            raise NotHermitianError(f"matrix is not Hermitian (max |a - a^*| = {asym:.3e})")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def symmetrize(cls, a) -> "HermitianMatrix":
        """Build from ``(a + a^*)/2``, remembering how far ``a`` was from Hermitian."""
        a = np.asarray(a, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
        return cls(0.5 * (a + a.conj().T), max_asymmetry=_asymmetry(a))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def inner(self, other) -> float:
        """Hilbert-Schmidt scalar product ``Tr(ab)``."""
        b = np.asarray(other)
        return float(np.real(np.sum(self.entries * b.T)))

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def __repr__(self):
        return f"HermitianMatrix(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class GellMannBasis:
    dim: int
    generators: np.ndarray = field(repr=False)
    labels: tuple = field(repr=False)

    @property
    def size(self) -> int:
        return self.generators.shape[0]

    @property
    def identity_element(self) -> np.ndarray:
        """The implicit last basis element ``1_n / sqrt(n)``."""
        return np.eye(self.dim, dtype=complex) / np.sqrt(self.dim)

    @property
    def full(self) -> np.ndarray:
        """All ``n^2`` orthonormal elements, with ``1_n/sqrt(n)`` last."""
        return _full_basis(self.dim)

    def __getitem__(self, idx) -> HermitianMatrix:
        return HermitianMatrix(self.generators[idx])

    def __len__(self):
        return self.size


def _generators(n: int):
    gens, labels = [], []
    for l in range(1, n):
        d = np.zeros((n, n), dtype=complex)
        d[np.arange(l), np.arange(l)] = 1.0
        d[l, l] = -l
        gens.append(d / np.sqrt(l * (l + 1)))
        labels.append(("d", l))
    pairs = [(k, l) for k in range(n) for l in range(k + 1, n)]
    for k, l in pairs:
        u = np.zeros((n, n), dtype=complex)
        u[k, l] = u[l, k] = 1.0
        gens.append(u / np.sqrt(2))
        labels.append(("u", k + 1, l + 1))
    for k, l in pairs:
        v = np.zeros((n, n), dtype=complex)
        v[k, l] = -1j
        v[l, k] = 1j
        gens.append(v / np.sqrt(2))
        labels.append(("v", k + 1, l + 1))
    return np.array(gens), tuple(labels)


@lru_cache(maxsize=None)
def build_basis(n: int) -> GellMannBasis:
    """Orthonormal traceless Hermitian generators of SU(n), ``n^2 - 1`` of them."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidDimensionError(f"basis dimension must be an integer >= 2, got {n!r}")
    gens, labels = _generators(int(n))
    gens.setflags(write=False)
    return GellMannBasis(int(n), gens, labels)


@lru_cache(maxsize=None)
def _full_basis(n: int) -> np.ndarray:
    full = np.concatenate([build_basis(n).generators, np.eye(n, dtype=complex)[None] / np.sqrt(n)])
    full.setflags(write=False)
    return full


@dataclass(frozen=True, eq=False)
class BlochVector:
    dim: int
    trace_part: float
    coords: np.ndarray

    def __post_init__(self):
        x = np.array(self.coords, dtype=float).reshape(-1)
        if x.shape[0] != self.dim**2 - 1:
            raise DimensionMismatchError(
                f"Bloch coords for n={self.dim} need length {self.dim**2 - 1}, got {x.shape[0]}"
            )
        x.setflags(write=False)
        object.__setattr__(self, "coords", x)
        object.__setattr__(self, "trace_part", float(self.trace_part))

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))


def _basis_for(n: int, basis: GellMannBasis | None) -> GellMannBasis:
    if basis is None:
        return build_basis(n)
    if basis.dim != n:
        raise DimensionMismatchError(f"basis is for n={basis.dim}, matrix has n={n}")
    return basis


def bloch_encode(a, basis: GellMannBasis | None = None) -> BlochVector:
    """Coordinates ``x_k = Tr(a f_k)`` and trace part ``Tr a``."""
    if not isinstance(a, HermitianMatrix):
        a = HermitianMatrix(a)
    basis = _basis_for(a.dim, basis)
    x = np.einsum("kij,ji->k", basis.generators, a.entries).real
    return BlochVector(a.dim, a.trace(), x)


def bloch_decode(v: BlochVector, basis: GellMannBasis | None = None) -> HermitianMatrix:
    basis = _basis_for(v.dim, basis)
    a = v.trace_part / v.dim * np.eye(v.dim, dtype=complex)
    a = a + np.einsum("k,kij->ij", v.coords, basis.generators)
    return HermitianMatrix(a)


class RegionKind(enum.Enum):
    BALL = "ball"
    POSITIVE_SECTION = "positive_section"
    INSCRIBED_BALL = "inscribed_ball"


@dataclass(frozen=True)
class Region:
    """One of the trace-``p`` slices B_n(p), S_n(p) or the inscribed ball B_n^0(p)."""

    kind: RegionKind
    p: float

    def __post_init__(self):
        if not self.p > 0:
            raise PreconditionError(f"region trace p must be > 0, got {self.p}")

    def radius(self, n: int) -> float:
        """Radius of the ball (in Bloch coordinates) bounding the region."""
        if self.kind is RegionKind.INSCRIBED_BALL:
            return self.p / np.sqrt(n * (n - 1))
        return self.p * np.sqrt((n - 1) / n)


def region_contains(a, region: Region, tol: float | None = None) -> bool:
    if tol is None:
        tol = DEFAULT_TOLERANCES.region
    if not isinstance(a, HermitianMatrix):
        a = HermitianMatrix(a)
    n, p = a.dim, region.p
    if abs(a.trace() - p) > tol:
        raise PreconditionError(f"Tr a = {a.trace()!r} does not match region trace p = {p!r}")
    dist2 = np.linalg.norm(a.entries - p / n * np.eye(n)) ** 2
    if region.kind is RegionKind.INSCRIBED_BALL:
        return bool(dist2 <= p**2 / (n * (n - 1)) + tol)
    in_ball = bool(dist2 <= (n - 1) * p**2 / n + tol)
    if region.kind is RegionKind.BALL or not in_ball:
        return in_ball
    return bool(np.linalg.eigvalsh(a.entries)[0] >= -tol)


def epsilon_p(a) -> HermitianMatrix:
    """Shrink ``a`` towards ``(Tr a / n) 1`` by the factor ``1/(n-1)``.

    Sends B_n(p) onto the inscribed ball B_n^0(p), hence into positive matrices.
    """
    if not isinstance(a, HermitianMatrix):
        a = HermitianMatrix(a)
    n = a.dim
    if n < 2:
        raise InvalidDimensionError("epsilon_p needs n >= 2")
    center = a.trace() / n * np.eye(n)
    return HermitianMatrix(center + (a.entries - center) / (n - 1))
