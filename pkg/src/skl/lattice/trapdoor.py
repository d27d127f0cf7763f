"""Gadget trapdoors: generation, preimage sampling and LWE inversion.

``trapgen`` returns ``A = [Abar | Abar Rbar + G_w]`` with ``w = n ceil(log q)``,
``Abar`` uniform and ``Rbar`` ternary. For a target ``V`` the preimage is
``X = [-Rbar Z; Z]`` where ``Z`` is a gadget sample of ``V``; then
``A X = G_w Z = V`` and every entry of ``X`` is at most ``w * DIGIT_BOUND``.

For any ``[A_0 | A_0 R + G]`` the matrix ``R`` is an LWE trapdoor: from
``y = s^T [A_0 | A_0 R + G] + e^T`` the vector ``y_2 - y_1 R`` equals
``s^T G`` plus short noise, so gadget inversion recovers ``s`` and then ``e``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gadget import GadgetParams, InversionError, gadget, gadget_invert
from .gaussian import DIGIT_BOUND, SIGMA_G, gadget_sample
from .zq import big, ceil_log2, inf_norm, mul_mod, small_matmul, uniform, zq

__all__ = [
    "Trapdoor",
    "trapgen",
    "sam",
    "sampre",
    "invert_lwe",
    "m_star",
    "sampler_bound",
    "lwe_error_bound",
]


def m_star(n: int, q: int) -> int:
    """Smallest supported width: twice the gadget width n ceil(log q)."""
    return 2 * n * ceil_log2(q)


def sampler_bound(n: int, q: int) -> int:
    """Entry bound on every preimage: n ceil(log q) * DIGIT_BOUND."""
    return n * ceil_log2(q) * DIGIT_BOUND


def lwe_error_bound(q: int, k: int, m: int, r_norm: int) -> int:
    """floor(q / (5 k (m |R|_inf + 1))): noise bound for :func:`invert_lwe`."""
    return q // (5 * k * (m * r_norm + 1))


@dataclass(frozen=True, eq=False)
class Trapdoor:
    A: np.ndarray  # n x m residues
    R: np.ndarray  # (m - w) x w ternary
    n: int
    m: int
    q: int

    @property
    def w(self) -> int:
        return self.n * ceil_log2(self.q)

    @property
    def beta_sam(self) -> int:
        return sampler_bound(self.n, self.q)


def trapgen(n: int, m: int, q: int, rng) -> Trapdoor:
    w = n * ceil_log2(q)
    if m < m_star(n, q):
        raise ValueError(f"m = {m} is below m* = {m_star(n, q)}")
    Abar = uniform((n, m - w), q, rng)
    R = rng.np.integers(-1, 2, size=(m - w, w), dtype=np.int64)
    G = gadget(GadgetParams(n, w, q))
    right = zq(mul_mod(Abar, R, q) + G, q)
    A = np.concatenate([Abar, right], axis=1)
    return Trapdoor(A, R, n, m, q)


def sampre(td: Trapdoor, V, rng) -> np.ndarray:
    """Short X (m x cols) with A X = V mod q and |X|_inf <= beta_sam."""
    V = zq(np.asarray(V), td.q)
    if V.ndim == 1:
        V = V.reshape(-1, 1)
    if V.shape[0] != td.n:
        raise ValueError(f"target must have {td.n} rows")
    Z = gadget_sample(V, td.q, td.n, td.w, rng)
    X = np.concatenate([-small_matmul(td.R, Z), Z], axis=0)
    if inf_norm(X) > td.beta_sam:
        raise AssertionError("preimage norm bound violated")
    if not np.all(mul_mod(td.A, X, td.q) == V):
        raise AssertionError("preimage membership violated")
    return X


def sam(m: int, k: int, q: int, rng, *, n: int = 1) -> np.ndarray:
    """Short m x k matrix with entries i.i.d. from a width SIGMA_G*sqrt(w) Gaussian.

    Matches the scale of :func:`sampre` outputs; truncated at the same bound.
    """
    w = n * ceil_log2(q)
    bound = sampler_bound(n, q)
    std = SIGMA_G * math.sqrt(w) / math.sqrt(2 * math.pi)
    X = np.rint(rng.np.normal(0.0, std, size=(m, k))).astype(np.int64)
    return np.clip(X, -bound, bound)


def invert_lwe(A, R, y, q: int, *, beta_err: int | None = None):
    """Recover (s, e) from y = s^T [A | A R + G] + e^T.

    ``A`` is n x m, ``R`` is m x k with k >= n ceil(log q). Raises
    :class:`InversionError` when the recovered noise exceeds ``beta_err``
    (default :func:`lwe_error_bound`).
    """
    A = zq(np.asarray(A), q)
    R = np.asarray(R)
    n, m = A.shape
    k = R.shape[1]
    if R.shape[0] != m:
        raise ValueError("R must have as many rows as A has columns")
    p = GadgetParams(n, k, q)
    y = zq(np.asarray(y).reshape(-1), q)
    if y.shape[0] != m + k:
        raise ValueError(f"y must have {m + k} entries")
    if beta_err is None:
        beta_err = lwe_error_bound(q, k, m, inf_norm(R))
    y1, y2 = y[:m], y[m:]
    t = zq(y2 - mul_mod(y1.reshape(1, -1), R, q).reshape(-1), q)
    s, _ = gadget_invert(p, t)
    s = np.array(s, dtype=object if big(q) else np.int64)
    M = np.concatenate([A, zq(mul_mod(A, R, q) + gadget(p), q)], axis=1)
    sM = zq(np.dot(s.astype(object), M.astype(object)), q)
    e = np.array([v - q if v > q // 2 else v for v in zq(y - sM, q)], dtype=object)
    if max((abs(int(v)) for v in e), default=0) > beta_err:
        raise InversionError("noise exceeds the inversion bound")
    if not big(q):
        s, e = s.astype(np.int64), e.astype(np.int64)
    return s, e
