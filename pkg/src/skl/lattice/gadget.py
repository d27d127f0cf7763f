"""The gadget matrix G = I_n (x) (1, 2, ..., 2^(K-1)), K = ceil(log2 q).

Columns past ``n*K`` are zero. Inversion uses the short basis ``S`` of the
kernel lattice of one gadget block::

    column j < K-1 : 2 at row j, -1 at row j+1
    column K-1     : the binary digits of q (or 2 at row K-1 when q = 2^K)

Given ``y = s^T G + e^T`` the product ``S^T y`` equals ``S^T e`` mod q; when
every entry of ``S^T e`` lies strictly inside (-q/2, q/2) the centered lift is
exact and ``e`` follows by back-substitution. Outside that region the solve
still returns an integral pair (``q S^-T`` is an integer matrix), so misuse is
only detectable against a noise bound supplied by the caller.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .zq import big, ceil_log2, zq

__all__ = [
    "GadgetParams",
    "InversionError",
    "gadget",
    "gadget_basis",
    "g_inverse",
    "gadget_invert",
    "gadget_invert_batch",
    "safe_radius",
]


class InversionError(ArithmeticError):
    """The input is outside the region where inversion is guaranteed."""


@dataclass(frozen=True)
class GadgetParams:
    n: int
    k: int
    q: int

    def __post_init__(self):
        if self.n < 1 or self.q < 2:
            raise ValueError("need n >= 1 and q >= 2")
        if self.k < self.n * ceil_log2(self.q):
            raise ValueError(f"k = {self.k} is below n*ceil(log q) = {self.n * ceil_log2(self.q)}")

    @property
    def K(self) -> int:
        return ceil_log2(self.q)


def gadget(p: GadgetParams) -> np.ndarray:
    K = p.K
    dtype = object if big(p.q) else np.int64
    G = np.zeros((p.n, p.k), dtype=dtype)
    for r in range(p.n):
        for j in range(K):
            G[r, r * K + j] = 1 << j
    return zq(G, p.q)


def gadget_basis(q: int) -> np.ndarray:
    K = ceil_log2(q)
    S = np.zeros((K, K), dtype=np.int64)
    for j in range(K - 1):
        S[j, j] = 2
        S[j + 1, j] = -1
    if _pow2(q):
        S[K - 1, K - 1] = 2
    else:
        for j in range(K):
            S[j, K - 1] = (q >> j) & 1
    return S


def _pow2(q: int) -> bool:
    return q & (q - 1) == 0


def safe_radius(q: int) -> int:
    """Largest B such that every e with |e|_inf <= B has |S^T e|_inf < q/2."""
    row = max(3, bin(q).count("1"))
    return (q - 1) // (2 * row)


def g_inverse(V, q: int, n: int, k: int) -> np.ndarray:
    """Binary G^{-1}(V): a (k x cols) 0/1 matrix X with G X = V (V in [0, q))."""
    V = zq(V, q)
    K = ceil_log2(q)
    cols = V.shape[1]
    X = np.zeros((k, cols), dtype=np.int64)
    for r in range(n):
        row = V[r]
        if row.dtype == object:
            nb = (K + 7) // 8
            raw = np.frombuffer(b"".join(int(v).to_bytes(nb, "little") for v in row), dtype=np.uint8).reshape(cols, nb)
            bitsm = np.unpackbits(raw, axis=1, bitorder="little")[:, :K]
            X[r * K:(r + 1) * K] = bitsm.T
        else:
            X[r * K:(r + 1) * K] = (row[None, :] >> np.arange(K)[:, None]) & 1
    return X


def _centered_int(v, q):
    v %= q
    return v - q if v > q // 2 else v


def gadget_invert(p: GadgetParams, y, bound: int | None = None):
    """Recover ``(s, e)`` from ``y = s^T G + e^T`` (length k, entries mod q).

    Exact whenever ``|S^T e|_inf < q/2``. When ``bound`` is given, a recovered
    ``e`` with an entry above it raises :class:`InversionError`.
    """
    y = [int(v) % p.q for v in np.asarray(y).ravel()]
    if len(y) != p.k:
        raise ValueError(f"expected {p.k} entries, got {len(y)}")
    q, K = p.q, p.K
    s = []
    e = [0] * p.k
    for r in range(p.n):
        blk = y[r * K:(r + 1) * K]
        # c = S^T y, centered
        c = [_centered_int(2 * blk[j] - blk[j + 1], q) for j in range(K - 1)]
        if _pow2(q):
            # bidiagonal S: 2 e_{K-1} = c_{K-1}, then e_j = (c_j + e_{j+1}) / 2
            eb = [0] * K
            eb[K - 1] = _centered_int(2 * blk[K - 1], q) >> 1
            for j in range(K - 2, -1, -1):
                eb[j] = (c[j] + eb[j + 1]) >> 1
            e[r * K:(r + 1) * K] = eb
            s.append((blk[0] - eb[0]) % q)
            continue
        c.append(_centered_int(sum(((q >> j) & 1) * blk[j] for j in range(K)), q))
        # e_j = 2^j e_0 - t_j with t_0 = 0, t_{j+1} = 2 t_j + c_j
        t = [0] * K
        for j in range(K - 1):
            t[j + 1] = 2 * t[j] + c[j]
        num = c[K - 1] + sum(((q >> j) & 1) * t[j] for j in range(K))
        e0 = num // q  # exact: the lifted system is always integral
        eb = [(e0 << j) - t[j] for j in range(K)]
        e[r * K:(r + 1) * K] = eb
        s.append((blk[0] - eb[0]) % q)
    for j in range(p.n * K, p.k):
        e[j] = _centered_int(y[j], q)
    if bound is not None and max((abs(v) for v in e), default=0) > bound:
        raise InversionError("recovered noise exceeds the bound")
    return s, e


def gadget_invert_batch(p: GadgetParams, Y: np.ndarray, bound: int | None = None):
    """Vectorized inversion for ``q < 2**30``; rows of ``Y`` are inputs.

    Returns ``(S, E, ok)``; ``ok[i]`` is False when row i's noise exceeds ``bound``.
    """
    if p.q >= (1 << 30):
        raise ValueError("batch inversion is for small moduli")
    if _pow2(p.q):
        rows = [gadget_invert(p, y) for y in np.asarray(Y)]
        Sout = np.array([r[0] for r in rows], dtype=np.int64).reshape(-1, p.n)
        E = np.array([r[1] for r in rows], dtype=np.int64).reshape(-1, p.k)
        ok = np.ones(len(rows), dtype=bool) if bound is None else np.abs(E).max(axis=1) <= bound
        return Sout, E, ok
    q, K = p.q, p.K
    Y = np.mod(np.asarray(Y, dtype=np.int64), q)
    N = Y.shape[0]
    Sout = np.zeros((N, p.n), dtype=np.int64)
    E = np.zeros((N, p.k), dtype=np.int64)
    ok = np.ones(N, dtype=bool)
    qb = np.array([(q >> j) & 1 for j in range(K)], dtype=np.int64)

    def cent(v):
        v = np.mod(v, q)
        return np.where(v > q // 2, v - q, v)

    for r in range(p.n):
        blk = Y[:, r * K:(r + 1) * K]
        c = np.empty((N, K), dtype=np.int64)
        c[:, :K - 1] = cent(2 * blk[:, :K - 1] - blk[:, 1:])
        c[:, K - 1] = cent(blk @ qb)
        t = np.zeros((N, K), dtype=np.int64)
        for j in range(K - 1):
            t[:, j + 1] = 2 * t[:, j] + c[:, j]
        num = c[:, K - 1] + t @ qb
        e0 = num // q
        eb = (e0[:, None] << np.arange(K)[None, :]) - t
        E[:, r * K:(r + 1) * K] = eb
        Sout[:, r] = np.mod(blk[:, 0] - eb[:, 0], q)
    if p.k > p.n * K:
        E[:, p.n * K:] = cent(Y[:, p.n * K:])
    if bound is not None:
        ok = np.abs(E).max(axis=1) <= bound
    return Sout, E, ok
