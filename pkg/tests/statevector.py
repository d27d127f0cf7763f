"""Brute-force statevector oracle for one control qubit plus an L-qubit payload.

Basis index ``b | p << 1`` (control is qubit 0, payload bit i is qubit i+1).
Everything here is plain linear algebra on ``2**(1+L)`` amplitudes and is
independent of the symbolic simulator it is used to check.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np

H1 = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def basis(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1
    return v


def hadamard_all(k: int) -> np.ndarray:
    M = np.array([[1]], dtype=complex)
    for _ in range(k):
        M = np.kron(H1, M)
    return M


def bb84_leg(x: int, theta: int, p0: int, p1: int, L: int) -> np.ndarray:
    """Prepare |x^theta> on the control, then apply |b>|y> -> |b>|y XOR p_b>."""
    dim = 1 << (1 + L)
    q = basis(x, 2)
    if theta:
        q = H1 @ q
    state = np.zeros(dim, dtype=complex)
    state[0], state[1] = q[0], q[1]
    U = np.zeros((dim, dim), dtype=complex)
    for idx in range(dim):
        b, y = idx & 1, idx >> 1
        U[b | ((y ^ (p1 if b else p0)) << 1), idx] = 1
    return U @ state


def collapsed(b: int, p: int, L: int) -> np.ndarray:
    return basis(b | (p << 1), 1 << (1 + L))


def superposed(p0: int, p1: int, phase: int, L: int) -> np.ndarray:
    dim = 1 << (1 + L)
    v = np.zeros(dim, dtype=complex)
    v[0 | (p0 << 1)] += 1 / np.sqrt(2)
    v[1 | (p1 << 1)] += (-1) ** phase / np.sqrt(2)
    return v


def probs(state: np.ndarray) -> np.ndarray:
    return np.abs(state) ** 2


def computational_dist(state: np.ndarray) -> dict:
    """Outcome (b, payload) -> probability."""
    return {(i & 1, i >> 1): p for i, p in enumerate(probs(state)) if p > 1e-12}


def hadamard_dist(state: np.ndarray, L: int) -> dict:
    """Outcome (e, d) -> probability after H on all 1 + L qubits."""
    out = hadamard_all(1 + L) @ state
    return {(i & 1, i >> 1): p for i, p in enumerate(probs(out)) if p > 1e-12}


def oracle_dist(state: np.ndarray, f) -> dict:
    """Measure f(b, payload) coherently: outcome -> (probability, post-state)."""
    groups = {}
    for i, a in enumerate(state):
        if abs(a) < 1e-12:
            continue
        v = f(i & 1, i >> 1)
        groups.setdefault(v, np.zeros_like(state))[i] = a
    out = {}
    for v, proj in groups.items():
        pr = float(np.vdot(proj, proj).real)
        out[v] = (pr, proj / np.sqrt(pr))
    return out


def same_state(a: np.ndarray, b: np.ndarray) -> bool:
    """Equal up to global phase."""
    return abs(abs(np.vdot(a, b)) - 1) < 1e-9


def tv(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(float(p.get(k, 0)) - float(q.get(k, 0))) for k in keys)


# -- certified-deletion game on n <= 3 qubits ------------------------------

def bb84_state(x: int, theta: int, n: int) -> np.ndarray:
    v = np.array([1], dtype=complex)
    for i in range(n):
        q = basis((x >> i) & 1, 2)
        if (theta >> i) & 1:
            q = H1 @ q
        v = np.kron(q, v)
    return v


def measure_dist(state: np.ndarray, n: int, hadamard_mask: int) -> dict:
    """Distribution of an n-qubit product measurement; qubit i in the
    Hadamard basis when bit i of ``hadamard_mask`` is set."""
    M = np.array([[1]], dtype=complex)
    for i in range(n):
        M = np.kron(H1 if (hadamard_mask >> i) & 1 else np.eye(2), M)
    return {i: p for i, p in enumerate(probs(M @ state)) if p > 1e-12}


def cd_win_probability(strategy: str, x: int, theta: int, n: int) -> Fraction:
    """Exact win probability of a shipped strategy on |x^theta>.

    Measurement probabilities here are 0, 1/2 or 1 and are rounded to exact
    fractions before combining.
    """
    full = (1 << n) - 1
    st = bb84_state(x, theta, n)
    had, comp = theta & full, full ^ theta
    total = Fraction(0)
    if strategy == "honest-deleter":
        for y, p in measure_dist(st, n, full).items():
            if (y ^ x) & had:
                continue
            for z in range(1 << n):  # blind uniform guess
                if not (z ^ x) & comp:
                    total += Fraction(round(p * 2 ** n), 2 ** n) / 2 ** n
        return total
    if strategy == "basis-hoarder":
        for seen, p in measure_dist(st, n, 0).items():
            if (seen ^ x) & comp:
                continue
            for y in range(1 << n):
                if not (y ^ x) & had:
                    total += Fraction(round(p * 2 ** n), 2 ** n) / 2 ** n
        return total
    if strategy == "cert-forger":
        for y, z in product(range(1 << n), repeat=2):
            if not (y ^ x) & had and not (z ^ x) & comp:
                total += Fraction(1, 4 ** n)
        return total
    raise KeyError(strategy)
