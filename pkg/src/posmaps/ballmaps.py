"""Affine self-maps of R^m and the unit-ball contraction test.

An affine map ``x -> T x + b`` belongs to D_m when it sends the closed unit
ball into itself, i.e. when ``max_{|x| <= 1} |T x + b| <= 1``.  That maximum
is a convex quadratic maximized over the ball; it is attained on the sphere
and solved exactly through the secular equation in the right-singular basis
of ``T``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import DimensionMismatchError, NotAContractionError, ParameterError
from .sampling import _rng, haar_orthogonal

logger = logging.getLogger(__name__)

__all__ = [
    "AffineBallMap",
    "ExtremePointParams",
    "BallMax",
    "extreme_point",
    "degenerate_extreme_point",
    "ball_image_max",
    "ball_image_max_ascent",
    "is_contraction",
    "convex_combine",
    "sample_dm",
]

# Hard-case threshold for the component of T^T b in the top eigenspace.
HARD_CASE_TOL = 1e-13


class BallMax(NamedTuple):
    value: float
    argmax: np.ndarray


@dataclass(frozen=True, eq=False)
class AffineBallMap:
    """The affine map ``x -> T x + b`` on R^m.

    ``certificate`` is the computed ``max_{|x|<=1} |Tx + b|``; it is only set
    by :meth:`certify` (or constructors that call it) and never exceeds
    ``1 + 1e-9``.
    """

    T: np.ndarray
    b: np.ndarray
    certificate: float | None = None

    def __post_init__(self):
        T = np.array(self.T, dtype=float)
        b = np.array(self.b, dtype=float).reshape(-1)
        if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] != b.shape[0]:
            raise DimensionMismatchError(f"inconsistent shapes T{T.shape}, b{b.shape}")
        T.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "b", b)
        if self.certificate is not None and self.certificate > 1 + DEFAULT_TOLERANCES.contraction:
            raise NotAContractionError(
                f"certificate {self.certificate!r} exceeds 1", ball_max=self.certificate
            )

    @property
    def dim(self) -> int:
        return self.b.shape[0]

    @property
    def is_certified(self) -> bool:
        return self.certificate is not None

    def __call__(self, x):
        return np.asarray(x) @ self.T.T + self.b

    def certify(self, tol: float | None = None) -> "AffineBallMap":
        """Return a copy carrying its contraction certificate.

        Raises :class:`NotAContractionError` (with the maximizing direction)
        when the ball image leaves the unit ball by more than ``tol``.
        """
        if tol is None:
            tol = DEFAULT_TOLERANCES.contraction
        value, x = ball_image_max(self)
        if value > 1 + tol:
            raise NotAContractionError(
                f"affine map sends the unit ball outside itself: max |Tx+b| = {value:.12g}",
                ball_max=value,
                direction=x,
            )
        return AffineBallMap(self.T, self.b, certificate=value)

    @classmethod
    def identity(cls, m: int) -> "AffineBallMap":
        return cls(np.eye(m), np.zeros(m)).certify()


@dataclass(frozen=True, eq=False)
class ExtremePointParams:
    kappa: float
    delta: float
    R1: np.ndarray
    R2: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.kappa <= 1.0:
            raise ParameterError(f"kappa must lie in [0, 1], got {self.kappa}")
        if not 0.0 < self.delta <= 1.0:
            raise ParameterError(f"delta must lie in (0, 1], got {self.delta}")
        R1, R2 = _check_orthogonal(self.R1, "R1"), _check_orthogonal(self.R2, "R2")
        if R1.shape != R2.shape:
            raise DimensionMismatchError("R1 and R2 must have the same size")
        object.__setattr__(self, "R1", R1)
        object.__setattr__(self, "R2", R2)

    @property
    def dim(self) -> int:
        return self.R1.shape[0]


def _check_orthogonal(R, name: str) -> np.ndarray:
    R = np.array(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {R.shape}")
    err = np.max(np.abs(R.T @ R - np.eye(R.shape[0])))
    if err > 1e-10:
        raise ParameterError(f"{name} is not orthogonal (max |R^T R - I| = {err:.2e})")
    return R


def extreme_point(params: ExtremePointParams) -> AffineBallMap:
    """The extreme element ``(R1 Lambda R2, R1 c)`` of D_m.

    For ``m >= 2`` the image of the unit ball touches the unit sphere.  With
    ``m = 1`` there are no transverse axes and the result is merely a contraction.
    """
    m, kappa, delta = params.dim, params.kappa, params.delta
    scale = np.sqrt(1.0 - delta**2 * (1.0 - kappa**2))
    lam = np.full(m, scale)
    lam[-1] = kappa * scale
    c = np.zeros(m)
    c[-1] = delta * (1.0 - kappa**2)
    return AffineBallMap(params.R1 @ (lam[:, None] * params.R2), params.R1 @ c).certify()


def degenerate_extreme_point(kappa: float, R1, R2) -> AffineBallMap:
    """The ``delta -> 0`` limit: ``(R1 diag(1,..,1,kappa) R2, 0)``."""
    if not 0.0 <= kappa <= 1.0:
        raise ParameterError(f"kappa must lie in [0, 1], got {kappa}")
    R1, R2 = _check_orthogonal(R1, "R1"), _check_orthogonal(R2, "R2")
    lam = np.ones(R1.shape[0])
    lam[-1] = kappa
    return AffineBallMap(R1 @ (lam[:, None] * R2), np.zeros(R1.shape[0])).certify()


def _secular_root(gap: np.ndarray, g2: np.ndarray, hi: float) -> float:
    """Root ``t`` in (0, hi] of ``1/|y(t)| - 1`` with ``y_i = g_i / (t + gap_i)``.

    Safeguarded Newton; the function is increasing in ``t``.
    """

    def psi(t):
        d = t + gap
        n2 = np.sum(g2 / d**2)
        dn2 = -2.0 * np.sum(g2 / d**3)
        inv = 1.0 / np.sqrt(n2)
        return inv - 1.0, -0.5 * inv**3 * dn2

    lo, t = 0.0, hi
    for _ in range(200):
        f, df = psi(t)
        if f == 0.0:
            return t
        if f > 0:
            hi = t
        else:
            lo = t
        step = t - f / df if df > 0 else 0.5 * (lo + hi)
        if not lo < step < hi:
            step = 0.5 * (lo + hi)
        if abs(step - t) <= 4 * np.finfo(float).eps * max(t, 1e-300) or hi - lo <= 1e-300:
            return step
        t = step
    return t


def ball_image_max(amap: AffineBallMap, crosscheck: bool = False, seed: int = 0) -> BallMax:
    """Exact ``max_{|x|<=1} |T x + b|`` and a maximizer.

    Maximizes ``x^T (T^T T) x + 2 (T^T b)^T x`` on the unit sphere via the
    Lagrange condition ``(mu - T^T T) x = T^T b`` with ``mu >= sigma_max^2``.
    With ``crosscheck=True`` a multistart ascent is run as well and a warning
    is logged if it beats the secular solution.
    """
    T, b = amap.T, amap.b
    m = amap.dim
    U, s, Vt = np.linalg.svd(T)
    g = s * (U.T @ b)  # T^T b in the right-singular basis
    gap = (s[0] - s) * (s[0] + s)
    top = gap <= 1e-14 * max(1.0, s[0] ** 2)
    gnorm = float(np.linalg.norm(g))
    g2 = g**2

    if np.linalg.norm(g[top]) > HARD_CASE_TOL * max(1.0, gnorm):
        t = _secular_root(gap, g2, gnorm)
        y = g / (t + gap)
    else:
        y = np.zeros(m)
        rest = ~top
        y[rest] = g[rest] / gap[rest]
        rest_norm = float(np.linalg.norm(y))
        if rest_norm > 1.0:
            t = _secular_root(gap[rest], g2[rest], gnorm)
            y[rest] = g[rest] / (t + gap[rest])
        else:
            i = int(np.flatnonzero(top)[0])
            sign = 1.0 if g[i] >= 0 else -1.0
            y[i] = sign * np.sqrt(max(0.0, 1.0 - rest_norm**2))
    x = Vt.T @ y
    nx = np.linalg.norm(x)
    x = x / nx if nx > 0 else np.eye(m)[0]
    value = float(np.linalg.norm(T @ x + b))
    result = BallMax(value, x)
    if crosscheck:
        other = ball_image_max_ascent(amap, seed=seed)
        if other.value > value + 1e-9:
            logger.warning("ascent cross-check beat secular solve: %.15g > %.15g", other.value, value)
            result = other
    return result


def ball_image_max_ascent(amap: AffineBallMap, starts: int = 16, iters: int = 5000, seed: int = 0) -> BallMax:
    """Multistart ascent ``x <- grad / |grad|`` on the sphere.

    For a convex objective each step cannot decrease the value, so every start
    climbs to a stationary point.  Starts are reduced in index order.
    """
    T, b = amap.T, amap.b
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((starts, amap.dim))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    prev = None
    for _ in range(iters):
        G = (X @ T.T + b) @ T
        nrm = np.linalg.norm(G, axis=1, keepdims=True)
        if np.all(nrm == 0):
            break
        X = np.where(nrm > 0, G / np.where(nrm > 0, nrm, 1.0), X)
        vals = np.linalg.norm(X @ T.T + b, axis=1)
        if prev is not None and np.max(np.abs(vals - prev)) < 1e-15:
            break
        prev = vals
    vals = np.linalg.norm(X @ T.T + b, axis=1)
    k = int(np.argmax(vals))
    return BallMax(float(vals[k]), X[k])


def is_contraction(amap: AffineBallMap, tol: float | None = None) -> bool:
    if tol is None:
        tol = DEFAULT_TOLERANCES.contraction
    return ball_image_max(amap).value <= 1 + tol


def convex_combine(terms: Sequence[tuple[float, AffineBallMap]]) -> AffineBallMap:
    """Componentwise convex combination ``(sum w_i T_i, sum w_i b_i)``.

    The result is certified when every input is.
    """
    if not terms:
        raise ParameterError("need at least one term")
    weights = np.array([w for w, _ in terms], dtype=float)
    maps = [mp for _, mp in terms]
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise ParameterError(f"weights must be non-negative and sum to 1, got sum {weights.sum()!r}")
    m = maps[0].dim
    if any(mp.dim != m for mp in maps):
        raise DimensionMismatchError("all maps must share the same dimension")
    T = sum(w * mp.T for w, mp in zip(weights, maps))
    b = sum(w * mp.b for w, mp in zip(weights, maps))
    out = AffineBallMap(T, b)
    if all(mp.is_certified for mp in maps):
        out = out.certify()
    return out


def sample_dm(m: int, seed: int, k_extremes: int = 3, kappa: float | None = None) -> AffineBallMap:
    """Random certified member of D_m: a Dirichlet-weighted mix of extreme points.

    ``kappa`` pins every extreme point's kappa (``kappa=1`` gives orthogonal maps).
    """
    if m < 1 or k_extremes < 1:
        raise ParameterError("need m >= 1 and k_extremes >= 1")
    rng = _rng(seed)
    terms = []
    for _ in range(k_extremes):
        kap = rng.random() if kappa is None else kappa
        delta = 1.0 - rng.random()
        params = ExtremePointParams(kap, delta, haar_orthogonal(m, rng), haar_orthogonal(m, rng))
        terms.append(extreme_point(params))
    weights = rng.dirichlet(np.ones(k_extremes))
    weights /= weights.sum()
    return convex_combine(list(zip(weights, terms)))
