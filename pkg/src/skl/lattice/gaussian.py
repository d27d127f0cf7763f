"""Discrete Gaussian sampling.

Widths follow ``rho_s(x) = exp(-pi |x|^2 / s^2)``, so a width ``s`` has
standard deviation ``s / sqrt(2 pi)``.

* :func:`dgauss_z` samples ``D_{Z,s}`` (optionally truncated) by inverse CDF
  over a precomputed table.
* :func:`gadget_sample` samples a short ``z`` with ``G z = v`` digit by digit.
  Digit ``i`` comes from ``D_{2Z + c, SIGMA_G}`` truncated to ``|z| <= ZMAX``,
  where the parity ``c`` makes the running carry even; the last digit absorbs
  the remaining carry, so every entry is at most ``ZMAX + 2``.
* :func:`dgauss_coset` samples ``x`` in ``(-q/2, q/2]^m`` with ``A x = y``.
  Without a trapdoor it is exact for small ``q``: free coordinates are drawn
  from ``D_Z`` and the pivot coordinates are accepted with probability
  ``rho_s`` of their forced value. With an LWE trapdoor ``T`` for
  ``M = [A_0 | A_0 T + G]`` it uses the perturbation method: a continuous
  perturbation with covariance ``s^2 I - SIGMA_G^2 U U^T`` (``U = [-T; I]``) is
  rounded and then corrected by a gadget sample.
"""
from __future__ import annotations

import math
from collections import OrderedDict
from functools import lru_cache

import numpy as np

from .gadget import g_inverse
from .zq import ceil_log2, mul_mod, zq

__all__ = [
    "SIGMA_G",
    "ZMAX",
    "DIGIT_BOUND",
    "rho",
    "dgauss_z",
    "gadget_sample",
    "LweTrapdoor",
    "dgauss_coset",
    "check_width",
]

SIGMA_G = 6.0
ZMAX = 32
DIGIT_BOUND = ZMAX + 2
_TABLE_LIMIT = 1 << 22


def rho(x, sigma: float):
    x = np.asarray(x, dtype=np.float64)
    return np.exp(-math.pi * x * x / (sigma * sigma))


@lru_cache(maxsize=256)
def _cdt(sigma: float, lo: int, hi: int, step: int = 1, offset: int = 0):
    support = np.arange(lo, hi + 1, dtype=np.int64)
    support = support[(support - offset) % step == 0]
    if support.size == 0:
        raise ValueError("empty support")
    w = rho(support, sigma)
    cdf = np.cumsum(w)
    cdf /= cdf[-1]
    cdf[-1] = 1.0
    return support, cdf


def _draw(table, size, rng):
    support, cdf = table
    u = rng.np.random(size)
    return support[np.searchsorted(cdf, u, side="right").clip(max=support.size - 1)]


def dgauss_z(shape, sigma: float, rng, *, lo: int | None = None, hi: int | None = None, tail: float = 12.0):
    """D_{Z,sigma} restricted to [lo, hi] (default +-ceil(tail * sigma))."""
    t = int(math.ceil(tail * sigma))
    lo = -t if lo is None else max(lo, -t)
    hi = t if hi is None else min(hi, t)
    if hi - lo + 1 > _TABLE_LIMIT:
        raise ValueError("width too large for the table sampler")
    size = int(np.prod(shape)) if shape != () else 1
    return _draw(_cdt(float(sigma), lo, hi), size, rng).reshape(shape)


def _digits(parity: np.ndarray, rng) -> np.ndarray:
    """One draw from D_{2Z + parity, SIGMA_G}, |z| <= ZMAX, per entry."""
    out = np.empty(parity.shape, dtype=np.int64)
    for c in (0, 1):
        idx = parity == c
        k = int(idx.sum())
        if k:
            out[idx] = _draw(_cdt(SIGMA_G, -ZMAX, ZMAX, 2, c), k, rng)
    return out


def gadget_sample(V, q: int, n: int, k: int, rng) -> np.ndarray:
    """Short Z (k x cols, entries <= DIGIT_BOUND) with G Z = V mod q."""
    V = np.asarray(V)
    if V.ndim == 1:
        V = V.reshape(-1, 1)
    if V.shape[0] != n:
        raise ValueError(f"expected {n} rows, got {V.shape[0]}")
    K = ceil_log2(q)
    b = g_inverse(V, q, n, k)
    cols = V.shape[1]
    Z = np.zeros((k, cols), dtype=np.int64)
    for r in range(n):
        c = np.zeros(cols, dtype=np.int64)
        for i in range(K - 1):
            bi = b[r * K + i]
            z = _digits((bi + c) & 1, rng)
            Z[r * K + i] = z
            c = (bi + c - z) >> 1
        Z[r * K + K - 1] = b[r * K + K - 1] + c
    if k > n * K:
        Z[n * K:] = dgauss_z((k - n * K, cols), SIGMA_G, rng, lo=-ZMAX, hi=ZMAX)
    return Z


class LweTrapdoor:
    """Trapdoor ``T`` for matrices of the form ``[A_0 | A_0 T + G]``.

    The singular value decomposition of ``U = [-T; I]`` is computed once.
    """

    def __init__(self, T):
        T = np.asarray(T)
        if T.dtype == object:
            T = T.astype(np.int64)
        self.T = T
        m0, k = T.shape
        U = np.vstack([-T.astype(np.float64), np.eye(k)])
        W, s, _ = np.linalg.svd(U, full_matrices=False)
        self.W = W
        self.s = s
        self.m0 = m0
        self.k = k

    @property
    def s1(self) -> float:
        return float(self.s[0])


_TD_CACHE: OrderedDict = OrderedDict()


def _trapdoor_for(T) -> LweTrapdoor:
    if isinstance(T, LweTrapdoor):
        return T
    T = np.ascontiguousarray(np.asarray(T, dtype=np.int64))
    key = (T.shape, T.tobytes())
    td = _TD_CACHE.get(key)
    if td is None:
        td = LweTrapdoor(T)
        _TD_CACHE[key] = td
        if len(_TD_CACHE) > 32:
            _TD_CACHE.popitem(last=False)
    else:
        _TD_CACHE.move_to_end(key)
    return td


def check_width(sigma: float, m: int, q: int):
    """Require sqrt(8m) < sigma < q / sqrt(8m)."""
    lo = math.sqrt(8 * m)
    if not (lo < sigma and sigma * lo < q):
        raise ValueError(f"width {sigma} outside ({lo:.3f}, q/{lo:.3f})")


def _inv_mod(M, q):
    n = len(M)
    a = [[int(M[i][j]) % q for j in range(n)] + [int(i == j) for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return None
        a[c], a[piv] = a[piv], a[c]
        inv = pow(a[c][c], -1, q)
        a[c] = [v * inv % q for v in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [(x - f * y) % q for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def _pivots(A, q):
    """n columns (preferring the rightmost) whose minor is invertible mod q, and its inverse."""
    n, m = A.shape
    rows = [[int(v) % q for v in A[i]] for i in range(n)]
    cols, r = [], 0
    for c in range(m - 1, -1, -1):
        piv = next((i for i in range(r, n) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, q)
        rows[r] = [v * inv % q for v in rows[r]]
        for i in range(n):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % q for x, y in zip(rows[i], rows[r])]
        cols.append(c)
        r += 1
        if r == n:
            break
    if r < n:
        raise ValueError("matrix does not have full row rank mod q")
    cols = sorted(cols)
    inv = _inv_mod([[int(A[i, c]) for c in cols] for i in range(n)], q)
    return cols, np.array(inv, dtype=np.int64)


def _exact(A, y, q, sigma, rng, count):
    n, m = A.shape
    cols, inv = _pivots(A, q)
    free = [j for j in range(m) if j not in cols]
    lo, hi = -((q - 1) // 2), q // 2
    out, need = [], count
    batch = max(256, 8 * count)
    while need > 0:
        Xf = dgauss_z((batch, len(free)), sigma, rng, lo=lo, hi=hi)
        rest = np.mod(y[None, :] - Xf @ A[:, free].T, q)
        piv = np.mod(rest @ inv.T, q)
        piv = np.where(piv > hi, piv - q, piv)
        acc = rng.np.random(batch) < np.prod(rho(piv, sigma), axis=1)
        X = np.zeros((batch, m), dtype=np.int64)
        X[:, free] = Xf
        X[:, cols] = piv
        X = X[acc][:need]
        out.append(X)
        need -= X.shape[0]
    return np.vstack(out)


def _perturbed(M, y, q, sigma, td: LweTrapdoor, rng, count):
    n, width = M.shape
    if width != td.m0 + td.k:
        raise ValueError("trapdoor does not match the matrix width")
    sg = SIGMA_G * td.s
    if sigma <= sg[0]:
        raise ValueError(f"width {sigma} does not exceed SIGMA_G * s1(U) = {sg[0]:.1f}")
    scale = np.sqrt(sigma * sigma - sg * sg) - sigma
    lo, hi = -((q - 1) // 2), q // 2
    out, need = [], count
    while need > 0:
        g = rng.np.standard_normal((width, need))
        P = np.rint((sigma * g + td.W @ (scale[:, None] * (td.W.T @ g))) / math.sqrt(2 * math.pi)).astype(np.int64)
        V = zq(zq(y, q).reshape(n, 1) - mul_mod(M, P, q), q)
        Z = gadget_sample(V, q, n, td.k, rng)
        X = P.copy()
        X[:td.m0] -= td.T @ Z
        X[td.m0:] += Z
        ok = (X.min(axis=0) >= lo) & (X.max(axis=0) <= hi)
        out.append(X[:, ok].T)
        need -= int(ok.sum())
    return np.vstack(out)[:count]


def dgauss_coset(A, y, q: int, sigma: float, td=None, rng=None, *, count: int | None = None, m: int | None = None):
    """Sample x in (-q/2, q/2]^width with A x = y mod q and Gaussian width ``sigma``.

    ``td`` is an LWE trapdoor ``T`` (array or :class:`LweTrapdoor`) such that
    ``A = [A_0 | A_0 T + G]``; without it the exact sampler is used, which needs
    ``q < 2**20``. ``m`` sets the dimension used for the admissible width
    interval (default: the width of ``A``). Returns one vector, or a
    ``(count, width)`` array when ``count`` is given.
    """
    if rng is None:
        raise ValueError("an explicit rng is required")
    A = zq(A, q)
    n, width = A.shape
    check_width(sigma, width if m is None else m, q)
    y = zq(np.asarray(y).reshape(-1), q)
    if y.shape[0] != n:
        raise ValueError("target has the wrong length")
    N = 1 if count is None else int(count)
    if td is None:
        if q >= (1 << 20):
            raise ValueError("the exact sampler needs q < 2**20; pass a trapdoor")
        X = _exact(A.astype(np.int64), y.astype(np.int64), q, float(sigma), rng, N)
    else:
        X = _perturbed(A, y, q, float(sigma), _trapdoor_for(td), rng, N)
    got = mul_mod(A, X.T, q)
    if not np.all(got == y.reshape(n, 1)):
        raise AssertionError("coset membership violated")
    return X[0] if count is None else X
