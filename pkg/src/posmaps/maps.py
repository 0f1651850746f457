"""Self-adjoint linear maps on M_n as real superoperators in the Gell-Mann basis.

A map is stored as the real ``n^2 x n^2`` matrix ``L`` acting on coordinates
with respect to ``(f_1, ..., f_{n^2-1}, 1_n/sqrt(n))``.  The top-left block
acts on Bloch vectors, the last column carries the trace-dependent shift and
the last row is ``(0, ..., 0, 1)`` exactly when the map preserves the trace.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .ballmaps import AffineBallMap, ball_image_max
from .bloch import _full_basis, build_basis
from .config import DEFAULT_TOLERANCES
from .errors import (
    DimensionMismatchError,
    InvalidDimensionError,
    NotHermitianError,
    ParameterError,
)

__all__ = [
    "DynamicalMap",
    "ChoiMatrix",
    "AffineAction",
    "Membership",
    "build_phi",
    "apply_map",
    "choi_matrix",
    "identity_map",
    "transpose_map",
    "compose",
    "convex_combine_maps",
    "affine_action_extract",
    "recompose",
    "class_membership",
]

PROVENANCES = ("theorem1", "catalog", "imported")


@dataclass(frozen=True, eq=False)
class DynamicalMap:
    dim: int
    L: np.ndarray
    provenance: str = "imported"

    def __post_init__(self):
        n = int(self.dim)
        if n < 2:
            raise InvalidDimensionError(f"map dimension must be >= 2, got {n}")
        L = np.array(self.L, dtype=float)
        if L.shape != (n * n, n * n):
            raise DimensionMismatchError(f"superoperator for n={n} must be {n*n}x{n*n}, got {L.shape}")
        if self.provenance not in PROVENANCES:
            raise ParameterError(f"unknown provenance {self.provenance!r}")
        L.setflags(write=False)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "dim", n)

    @classmethod
    def from_function(cls, n: int, fn: Callable[[np.ndarray], np.ndarray], provenance: str = "imported"):
        """Tabulate ``L[a, b] = Tr(f_a fn(f_b))`` for a linear, self-adjoint ``fn``."""
        full = _full_basis(n)
        images = np.array([np.asarray(fn(f), dtype=complex) for f in full])
        Lc = np.einsum("aij,bji->ab", full, images)
        if np.max(np.abs(Lc.imag)) > 1e-10:
            raise NotHermitianError("map does not send Hermitian matrices to Hermitian matrices")
        return cls(n, Lc.real.copy(), provenance)

    @property
    def trace_row_error(self) -> float:
        target = np.zeros(self.dim**2)
        target[-1] = 1.0
        return float(np.max(np.abs(self.L[-1] - target)))

    @property
    def trace_preserving(self) -> bool:
        return self.trace_row_error <= DEFAULT_TOLERANCES.trace_preserving

    def __call__(self, a):
        return apply_map(self, a)

    def __repr__(self):
        return f"DynamicalMap(dim={self.dim}, provenance={self.provenance!r})"


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """``C = sum_ij e_ij (x) phi(e_ij)``; block ``(i, j)`` is ``phi(e_ij)``."""

    entries: np.ndarray

    def __post_init__(self):
        C = np.array(self.entries, dtype=complex)
        asym = np.max(np.abs(C - C.conj().T))
        if asym > DEFAULT_TOLERANCES.hermitian * max(1.0, np.max(np.abs(C))):
            raise NotHermitianError(f"Choi matrix is not Hermitian (asymmetry {asym:.2e})")
        C.setflags(write=False)
        object.__setattr__(self, "entries", C)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


def build_phi(ball_map: AffineBallMap, n: int | None = None, shift: str = "ball", tol: float | None = None) -> DynamicalMap:
    """Positive trace-preserving map induced by an affine contraction ``(T, y)``.

    ``a -> 1_n Tr(a)/n + <f, T x + y sqrt((n-1)/n) Tr a> / (n-1)`` where ``x``
    is the Bloch vector of ``a``.  With ``shift="per_unit_trace"`` the map's
    ``b`` is read as the output shift per unit trace, ``y / sqrt(n(n-1))``.

    The contraction is verified (not trusted); a violation raises
    :class:`~posmaps.errors.NotAContractionError` carrying the certificate.
    """
    m = ball_map.dim
    if n is None:
        n = int(round(np.sqrt(m + 1)))
    if n < 2 or m != n * n - 1:
        raise DimensionMismatchError(f"affine map of dimension {m} does not match n={n} (need n^2-1)")
    if shift == "per_unit_trace":
        ball_map = AffineBallMap(ball_map.T, ball_map.b * np.sqrt(n * (n - 1)))
    elif shift != "ball":
        raise ParameterError(f"unknown shift interpretation {shift!r}")
    ball_map = ball_map.certify(tol)
    L = np.zeros((n * n, n * n))
    L[:m, :m] = ball_map.T / (n - 1)
    # coordinate of 1_n/sqrt(n) is Tr(a)/sqrt(n)
    L[:m, m] = ball_map.b / np.sqrt(n - 1)
    L[m, m] = 1.0
    return DynamicalMap(n, L, "theorem1")


def _coords(a: np.ndarray, n: int) -> np.ndarray:
    # Tr(f_k a) = sum_ij conj(f_k)_ij a_ij for Hermitian f_k
    flat = _full_basis(n).reshape(n * n, n * n).conj()
    return (a.reshape(a.shape[:-2] + (n * n,)) @ flat.T).real


def _from_coords(x: np.ndarray, n: int) -> np.ndarray:
    flat = _full_basis(n).reshape(n * n, n * n)
    return (x @ flat).reshape(x.shape[:-1] + (n, n))


def apply_map(phi: DynamicalMap, a) -> np.ndarray:
    """Apply ``phi`` to a complex matrix (or a stack of them, shape ``(..., n, n)``).

    ``a = c + i d`` with ``c, d`` Hermitian; each part goes through the real
    superoperator and the results are recombined.
    """
    a = np.asarray(a, dtype=complex)
    n = phi.dim
    if a.shape[-2:] != (n, n):
        raise DimensionMismatchError(f"map acts on {n}x{n} matrices, got shape {a.shape}")
    ah = np.swapaxes(a, -1, -2).conj()
    c = 0.5 * (a + ah)
    d = -0.5j * (a - ah)
    out_c = _from_coords(_coords(c, n) @ phi.L.T, n)
    out_d = _from_coords(_coords(d, n) @ phi.L.T, n)
    return out_c + 1j * out_d


def choi_matrix(phi: DynamicalMap) -> ChoiMatrix:
    n = phi.dim
    units = np.eye(n * n, dtype=complex).reshape(n * n, n, n)  # e_ij at index i*n + j
    images = apply_map(phi, units).reshape(n, n, n, n)
    return ChoiMatrix(images.transpose(0, 2, 1, 3).reshape(n * n, n * n))


def identity_map(n: int) -> DynamicalMap:
    return DynamicalMap(n, np.eye(n * n), "catalog")


def transpose_map(n: int) -> DynamicalMap:
    """``a -> a^T``: +1 on the d and u generators, -1 on the v generators."""
    signs = np.array([-1.0 if lab[0] == "v" else 1.0 for lab in build_basis(n).labels] + [1.0])
    return DynamicalMap(n, np.diag(signs), "catalog")


def compose(outer: DynamicalMap, inner: DynamicalMap) -> DynamicalMap:
    """``outer o inner``."""
    if outer.dim != inner.dim:
        raise DimensionMismatchError(f"cannot compose maps on M_{outer.dim} and M_{inner.dim}")
    prov = "catalog" if outer.provenance == inner.provenance == "catalog" else "imported"
    return DynamicalMap(outer.dim, outer.L @ inner.L, prov)


def convex_combine_maps(terms: Sequence[tuple[float, DynamicalMap]]) -> DynamicalMap:
    if not terms:
        raise ParameterError("need at least one term")
    weights = np.array([w for w, _ in terms], dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise ParameterError(f"weights must be non-negative and sum to 1, got sum {weights.sum()!r}")
    n = terms[0][1].dim
    if any(mp.dim != n for _, mp in terms):
        raise DimensionMismatchError("all maps must act on the same M_n")
    L = sum(w * mp.L for w, mp in terms)
    provs = {mp.provenance for _, mp in terms}
    return DynamicalMap(n, L, provs.pop() if len(provs) == 1 else "imported")


class AffineAction(NamedTuple):
    """Decomposition of ``L``: Bloch block, shift per unit trace, trace row."""

    M: np.ndarray
    t: np.ndarray
    trace_row: np.ndarray
    dim: int


def affine_action_extract(phi: DynamicalMap) -> AffineAction:
    n, m = phi.dim, phi.dim**2 - 1
    L = phi.L
    return AffineAction(L[:m, :m].copy(), L[:m, m] / np.sqrt(n), L[m].copy(), n)


def recompose(action: AffineAction, provenance: str = "imported") -> DynamicalMap:
    n, m = action.dim, action.dim**2 - 1
    L = np.zeros((n * n, n * n))
    L[:m, :m] = action.M
    L[:m, m] = action.t * np.sqrt(n)
    L[m] = action.trace_row
    return DynamicalMap(n, L, provenance)


@dataclass(frozen=True, eq=False)
class Membership:
    """Verdict on whether a map has the form ``phi[T, y]`` with ``(T, y)`` in D.

    ``ball_max``/``direction`` certify the affine part ``(T_hat, y_hat)``;
    ``trace_row_error`` certifies trace preservation.
    """

    member: bool
    reason: str
    ball_max: float
    direction: np.ndarray
    trace_row_error: float
    T_hat: np.ndarray
    y_hat: np.ndarray

    def as_dict(self) -> dict:
        return {
            "member": self.member,
            "reason": self.reason,
            "ball_max": self.ball_max,
            "direction": self.direction.tolist(),
            "trace_row_error": self.trace_row_error,
        }


def class_membership(phi: DynamicalMap, tol: float | None = None) -> Membership:
    if tol is None:
        tol = DEFAULT_TOLERANCES.contraction
    n = phi.dim
    action = affine_action_extract(phi)
    T_hat = (n - 1) * action.M
    y_hat = np.sqrt(n * (n - 1)) * action.t
    value, direction = ball_image_max(AffineBallMap(T_hat, y_hat))
    trace_err = phi.trace_row_error
    if trace_err > DEFAULT_TOLERANCES.trace_preserving:
        reason = f"not trace-preserving (trace row deviates by {trace_err:.6g})"
        member = False
    elif value > 1 + tol:
        reason = f"affine part leaves the unit ball (max |T x + y| = {value:.12g} > 1)"
        member = False
    else:
        reason = f"affine part is a unit-ball contraction (max |T x + y| = {value:.12g})"
        member = True
    return Membership(member, reason, value, direction, trace_err, T_hat, y_hat)
