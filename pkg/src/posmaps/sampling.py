"""Random test inputs: Haar orthogonal/unitary matrices, balls, density matrices."""
from __future__ import annotations

import numpy as np


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def haar_orthogonal(m: int, seed=None) -> np.ndarray:
    """Haar-distributed element of O(m): QR of a Gaussian matrix with sign fix."""
    rng = _rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((m, m)))
    return q * np.sign(np.diag(r))


def haar_unitary(n: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def uniform_ball(m: int, radius: float, size: int, seed=None) -> np.ndarray:
    """``size`` points uniform in the closed ball of the given radius in R^m."""
    rng = _rng(seed)
    g = rng.standard_normal((size, m))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * (radius * rng.random(size) ** (1.0 / m))[:, None]


def uniform_sphere(m: int, radius: float, size: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    g = rng.standard_normal((size, m))
    return radius * g / np.linalg.norm(g, axis=1, keepdims=True)


def random_density_matrices(n: int, size: int, seed=None, rank: int | None = None) -> np.ndarray:
    """Batch of Hilbert-Schmidt random density matrices, shape ``(size, n, n)``."""
    rng = _rng(seed)
    k = n if rank is None else rank
    g = rng.standard_normal((size, n, k)) + 1j * rng.standard_normal((size, n, k))
    rho = g @ g.conj().transpose(0, 2, 1)
    return rho / np.trace(rho, axis1=1, axis2=2).real[:, None, None]


def random_unit_vectors(n: int, size: int, seed=None) -> np.ndarray:
    """Complex unit vectors in C^n, shape ``(size, n)``."""
    rng = _rng(seed)
    z = rng.standard_normal((size, n)) + 1j * rng.standard_normal((size, n))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def random_hermitian(n: int, seed=None, size: int | None = None) -> np.ndarray:
    rng = _rng(seed)
    shape = (n, n) if size is None else (size, n, n)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return 0.5 * (z + np.swapaxes(z, -1, -2).conj())
