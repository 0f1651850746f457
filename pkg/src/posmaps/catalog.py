"""Named families of positive maps and the 9x9 PPT witness matrix.

Shift convention: ``s = [delta_{i,j+1}]`` with indices mod n, so
``s e_j = e_{j+1}`` and ``(s a s^*)_{ij} = a_{i-1,j-1}``.  Under this
convention ``tau_1`` on M_3 coincides with the rotation map at ``+pi/3``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ballmaps import AffineBallMap
from .errors import InvalidDimensionError, ParameterError
from .maps import DynamicalMap, build_phi

__all__ = [
    "PMapParams",
    "lambda_mu_nu",
    "rotation_matrix",
    "choi_rotation_map",
    "psi_map",
    "diagonal_projection",
    "shift_matrix",
    "phi_k_map",
    "tau_k_map",
    "p_family_map",
    "witness_matrix",
]


def lambda_mu_nu(alpha: float) -> tuple[float, float, float]:
    """Diagonal mixing weights of the rotation map; they always sum to 2."""
    c, s = np.cos(alpha), np.sin(alpha)
    lam = 2.0 / 3.0 * (1.0 + c)
    mu = 2.0 / 3.0 * (1.0 - 0.5 * c - np.sqrt(3.0) / 2.0 * s)
    nu = 2.0 / 3.0 * (1.0 - 0.5 * c + np.sqrt(3.0) / 2.0 * s)
    return float(lam), float(mu), float(nu)


def _reduce_angle(alpha: float) -> float:
    return float(np.mod(alpha, 2.0 * np.pi))


def rotation_matrix(alpha: float) -> np.ndarray:
    """Element of SO(8): rotation by ``alpha`` in the (d_1, d_2) plane, -1 elsewhere."""
    alpha = _reduce_angle(alpha)
    R = -np.eye(8)
    c, s = np.cos(alpha), np.sin(alpha)
    R[:2, :2] = [[c, -s], [s, c]]
    return R


def choi_rotation_map(alpha: float) -> DynamicalMap:
    """The M_3 map induced by ``(R(alpha), 0)``.

    ``alpha = pi/3`` and ``-pi/3`` give the two Choi maps, ``pi`` gives
    ``a -> (Tr(a) 1 - a)/2`` and ``0`` the decomposable map ``phi[pi]/3 + 2 psi/3``.
    """
    phi = build_phi(AffineBallMap(rotation_matrix(alpha), np.zeros(8)), n=3)
    return DynamicalMap(3, phi.L, "catalog")


def psi_map(n: int = 3) -> DynamicalMap:
    """Keep the diagonal, send off-diagonal entries to ``-a_ij/2``."""

    def fn(a):
        out = -0.5 * a
        idx = np.arange(n)
        out[idx, idx] = a[idx, idx]
        return out

    return DynamicalMap.from_function(n, fn, "catalog")


def diagonal_projection(a: np.ndarray) -> np.ndarray:
    return np.diag(np.diag(a))


def shift_matrix(n: int) -> np.ndarray:
    """``s[i, j] = 1`` iff ``i = j + 1 (mod n)``."""
    return np.roll(np.eye(n), 1, axis=0)


def _check_nk(n: int, k: int):
    if n < 3:
        raise InvalidDimensionError(f"phi_k needs n >= 3, got {n}")
    if not 1 <= k <= n - 2:
        raise ParameterError(f"k must satisfy 1 <= k <= n-2 = {n - 2}, got {k}")


def phi_k_map(n: int, k: int) -> DynamicalMap:
    """``a -> (n-k) eps(a) + sum_{i=1}^k eps(s^i a s^{*i}) - a``."""
    _check_nk(n, k)
    powers = [np.linalg.matrix_power(shift_matrix(n), i) for i in range(1, k + 1)]

    def fn(a):
        out = (n - k) * diagonal_projection(a) - a
        for s in powers:
            out = out + diagonal_projection(s @ a @ s.T)
        return out

    return DynamicalMap.from_function(n, fn, "catalog")


def tau_k_map(n: int, k: int) -> DynamicalMap:
    """Bistochastic normalization ``phi_k / (n-1)``."""
    phi = phi_k_map(n, k)
    return DynamicalMap(n, phi.L / (n - 1), "catalog")


@dataclass(frozen=True)
class PMapParams:
    """Parameters ``p_0, p_1, ..., p_n`` of the cyclic family on M_n, n >= 3."""

    n: int
    p: tuple

    def __post_init__(self):
        p = tuple(float(v) for v in self.p)
        object.__setattr__(self, "p", p)
        n = self.n
        if n < 3:
            raise InvalidDimensionError(f"p-family needs n >= 3, got {n}")
        if len(p) != n + 1:
            raise ParameterError(f"need n+1 = {n + 1} parameters p_0..p_n, got {len(p)}")
        if any(v <= 0 for v in p):
            raise ParameterError("p_i > 0 violated: all parameters must be positive")
        if not n - 1 > p[0]:
            raise ParameterError(f"n-1 > p_0 violated: p_0 = {p[0]} with n = {n}")
        if not p[0] >= n - 2:
            raise ParameterError(f"p_0 >= n-2 violated: p_0 = {p[0]} with n = {n}")
        prod = float(np.prod(p[1:]))
        bound = (n - 1 - p[0]) ** n
        if not prod >= bound:
            raise ParameterError(
                f"p_1*...*p_n >= (n-1-p_0)^n violated: {prod:.6g} < {bound:.6g}"
            )


def p_family_map(params: PMapParams) -> DynamicalMap:
    """``a'_ii = p_0 a_ii + p_{i-1} a_{i-1,i-1}`` (cyclically, ``a'_11`` uses ``p_n a_nn``), ``a'_ij = -a_ij``.

    Not trace-preserving in general; it keeps that flag false.
    """
    n, p = params.n, params.p
    # weight of a_{i-1,i-1} in row i (0-based): p_i for i >= 1, p_n for i = 0
    prev_weight = np.array([p[n]] + list(p[1:n]))

    def fn(a):
        d = np.diag(a)
        out = -np.array(a, dtype=complex)
        idx = np.arange(n)
        out[idx, idx] = p[0] * d + prev_weight * np.roll(d, 1)
        return out

    return DynamicalMap.from_function(n, fn, "catalog")


def witness_matrix(p: float) -> np.ndarray:
    """The 9x9 block matrix ``[x_ij]`` in M_3(M_3).

    Diagonal blocks ``diag(1, p, 1/p)``, ``diag(1/p, 1, p)``, ``diag(p, 1/p, 1)``
    and unit entries linking ``|11>, |22>, |33>``.  Both it and its block
    transpose are PSD for every ``p > 0``.
    """
    if not p > 0:
        raise ParameterError(f"witness parameter p must be > 0, got {p}")
    W = np.diag([1.0, p, 1 / p, 1 / p, 1.0, p, p, 1 / p, 1.0])
    idx = [0, 4, 8]
    W[np.ix_(idx, idx)] = 1.0
    return W
