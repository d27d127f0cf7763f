"""Arithmetic on matrices over Z_q.

Matrices mod q are numpy arrays holding canonical residues in ``[0, q)``:
``int64`` when ``q < 2**62`` and Python ints (``dtype=object``) above that.
Short integer matrices (trapdoors, preimages, evaluation matrices) are
``int64``. Products of a residue matrix with a short matrix are split into
limbs so that each partial product runs through float64 BLAS exactly.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "ceil_log2",
    "big",
    "zq",
    "centered",
    "uniform",
    "mul_mod",
    "small_matmul",
    "inf_norm",
    "equal_mod",
]

_EXACT = 1 << 53


def ceil_log2(q: int) -> int:
    """Ceiling of log2(q) for q >= 2."""
    if q < 2:
        raise ValueError("modulus must be at least 2")
    return (q - 1).bit_length()


def big(q: int) -> bool:
    return q >= (1 << 62)


def zq(x, q: int) -> np.ndarray:
    """Reduce to canonical residues in [0, q)."""
    a = np.asarray(x)
    if big(q):
        return np.array([int(v) % q for v in a.ravel()], dtype=object).reshape(a.shape)
    if a.dtype == object:
        return np.array([int(v) % q for v in a.ravel()], dtype=np.int64).reshape(a.shape)
    return np.mod(a.astype(np.int64), q)


def centered(x, q: int) -> np.ndarray:
    """Representatives in (-q/2, q/2]."""
    a = zq(x, q)
    half = q // 2
    if a.dtype == object:
        return np.array([v - q if v > half else v for v in a.ravel()], dtype=object).reshape(a.shape)
    return np.where(a > half, a - q, a)


def uniform(shape, q: int, rng) -> np.ndarray:
    if big(q):
        size = int(np.prod(shape))
        return np.array([rng.below(q) for _ in range(size)], dtype=object).reshape(shape)
    return rng.np.integers(0, q, size=shape, dtype=np.int64)


def inf_norm(x) -> int:
    a = np.asarray(x)
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(v)) for v in a.ravel())
    return int(np.abs(a).max())


def small_matmul(X, Y) -> np.ndarray:
    """Exact product of short integer matrices."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    if X.dtype == object or Y.dtype == object:
        return np.dot(X.astype(object), Y.astype(object))
    bound = inf_norm(X) * inf_norm(Y) * max(X.shape[-1], 1)
    if bound < _EXACT:
        return np.rint(X.astype(np.float64) @ Y.astype(np.float64)).astype(np.int64)
    if bound < (1 << 62):
        return X.astype(np.int64) @ Y.astype(np.int64)
    return np.dot(X.astype(object), Y.astype(object))


def mul_mod(A, X, q: int) -> np.ndarray:
    """(A @ X) mod q for a residue matrix A and a short integer matrix X."""
    A = np.asarray(A)
    X = np.asarray(X)
    if X.dtype == object:
        if inf_norm(X) >= (1 << 62):
            return zq(np.dot(A.astype(object), X), q)
        X = X.astype(np.int64)
    inner = X.shape[0]
    xb = inf_norm(X) * max(inner, 1) + 1
    limb = 52 - xb.bit_length()
    if limb < 4:
        return zq(np.dot(A.astype(object), X.astype(object)), q)
    Xf = X.astype(np.float64)
    if not big(q) and q.bit_length() <= limb:
        return np.mod(np.rint(A.astype(np.float64) @ Xf).astype(np.int64), q)
    # split A into limbs of `limb` bits and recombine with Python integers
    Ai = A.astype(object) if A.dtype == object else A.astype(np.int64)
    nlimbs = (q.bit_length() + limb - 1) // limb
    mask = (1 << limb) - 1
    acc = None
    for j in range(nlimbs):
        if Ai.dtype == object:
            part = np.array([(int(v) >> (j * limb)) & mask for v in Ai.ravel()], dtype=np.float64).reshape(Ai.shape)
        else:
            part = ((Ai >> (j * limb)) & mask).astype(np.float64)
        prod = np.rint(part @ Xf).astype(np.int64).astype(object)
        term = prod * (1 << (j * limb))
        acc = term if acc is None else acc + term
    return zq(acc, q)


def equal_mod(X, Y, q: int) -> bool:
    return bool(np.all(zq(X, q) == zq(Y, q)))
