"""Homomorphic evaluation of NAND circuits on matrix encodings.

Input ``B = [B_0 | ... | B_{l-1}]`` (n x m l) encodes wires ``0..l-1``; wire
``0`` is the constant 1, so inputs must have ``x[0] = 1``. Gate ``j`` is the
NAND of two earlier wires and is wire ``l + j``. With ``G`` the n x m gadget
(zero-padded), every wire ``u`` carries ``B_u = B H_u`` and satisfies::

    (B - x (x) G) Hhat_u = B_u - x_u G

Multiplication uses ``B_x = B_u G^-1(B_v)``, ``Hhat_x = Hhat_u G^-1(B_v) +
x_u Hhat_v``; NAND is ``B_w = B_0 - B_x``. Entry norms of ``H`` and ``Hhat``
stay below ``(2m)^depth``.

:func:`eval_trapdoor` tracks ``R Hhat_u`` directly for a short ``R`` with
``A R = B - x (x) G``, which is all signing needs, without forming ``Hhat``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .gadget import g_inverse
from .zq import inf_norm, mul_mod, small_matmul, zq

__all__ = [
    "Circuit",
    "eval_f",
    "eval_fx",
    "eval_f_out",
    "eval_trapdoor",
    "projection",
    "constant_one",
    "nand_circuit",
    "and_circuit",
    "xor_circuit",
    "table_check",
    "builtin_circuits",
    "DepthError",
]


class DepthError(ValueError):
    """The circuit is deeper than the allowed depth."""


@dataclass(frozen=True)
class Circuit:
    """NAND circuit over ``ell`` input wires (wire 0 is the constant 1)."""

    ell: int
    gates: tuple = ()
    output: int = 0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(tuple(g) for g in self.gates))
        for j, (a, b) in enumerate(self.gates):
            if not (0 <= a < self.ell + j and 0 <= b < self.ell + j):
                raise ValueError(f"gate {j} reads a wire that is not yet defined")
        if not 0 <= self.output < self.ell + len(self.gates):
            raise ValueError("output wire out of range")

    @cached_property
    def depths(self) -> tuple:
        d = [0] * self.ell
        for a, b in self.gates:
            d.append(1 + max(d[a], d[b]))
        return tuple(d)

    @property
    def depth(self) -> int:
        return self.depths[self.output]

    def evaluate(self, x) -> int:
        x = _check_input(self, x)
        w = list(x)
        for a, b in self.gates:
            w.append(1 - w[a] * w[b])
        return w[self.output]


def _check_input(c: Circuit, x):
    x = [int(v) for v in x]
    if len(x) != c.ell:
        raise ValueError(f"input must have {c.ell} bits")
    if x[0] != 1:
        raise ValueError("the first input bit must be 1")
    if any(v not in (0, 1) for v in x):
        raise ValueError("inputs are bits")
    return x


def _blocks(B, ell: int, m: int):
    B = np.asarray(B)
    if B.shape[1] != m * ell:
        raise ValueError(f"B must have {m * ell} columns")
    return [B[:, i * m:(i + 1) * m] for i in range(ell)]


def _live(c: Circuit):
    """Wires that the output depends on (avoids evaluating dead gates)."""
    need = {c.output}
    for j in range(len(c.gates) - 1, -1, -1):
        if c.ell + j in need:
            need.update(c.gates[j])
    return need


def _check_depth(c: Circuit, d):
    if d is not None and c.depth > d:
        raise DepthError(f"circuit depth {c.depth} exceeds {d}")


def _run(c: Circuit, B, q: int, n: int, m: int, x=None, track_h=False, R=None, d=None):
    """Shared evaluation loop; returns the record of the output wire."""
    _check_depth(c, d)
    Bs = [zq(b, q) for b in _blocks(B, c.ell, m)]
    live = _live(c)
    ell = c.ell
    eye = np.eye(m, dtype=np.int64)
    wires = {}
    for i in range(ell):
        if i not in live and i != 0:
            continue
        entry = {"B": Bs[i], "x": None if x is None else x[i]}
        if track_h:
            H = np.zeros((m * ell, m), dtype=np.int64)
            H[i * m:(i + 1) * m] = eye
            entry["H"] = H
            if x is not None:
                entry["Hx"] = H.copy()
        if R is not None:
            entry["W"] = np.asarray(R[:, i * m:(i + 1) * m], dtype=np.int64)
        wires[i] = entry
    for j, (a, b) in enumerate(c.gates):
        w = ell + j
        if w not in live:
            continue
        u, v = wires[a], wires[b]
        Gi = g_inverse(v["B"], q, n, m)
        Bx = mul_mod(u["B"], Gi, q)
        xu = u["x"]
        out = {"B": zq(wires[0]["B"] - Bx, q), "x": None if x is None else 1 - xu * v["x"]}
        if track_h:
            out["H"] = wires[0]["H"] - small_matmul(u["H"], Gi)
            if x is not None:
                hx = small_matmul(u["Hx"], Gi) + xu * v["Hx"]
                out["Hx"] = wires[0]["Hx"] - hx
        if R is not None:
            wx = small_matmul(u["W"], Gi) + xu * v["W"]
            out["W"] = wires[0]["W"] - wx
        wires[w] = out
    return wires[c.output]


def _norm_bound(m: int, depth: int) -> int:
    return (2 * m) ** depth


def eval_f(c: Circuit, B, q: int, n: int, m: int, *, d: int | None = None) -> np.ndarray:
    """H (m ell x m) with B_out = B H, |H|_inf <= (2m)^depth."""
    H = _run(c, B, q, n, m, track_h=True, d=d)["H"]
    if inf_norm(H) > _norm_bound(m, c.depth):
        raise AssertionError("evaluation norm bound violated")
    return H


def eval_fx(c: Circuit, x, B, q: int, n: int, m: int, *, d: int | None = None) -> np.ndarray:
    """Hhat with (B - x (x) G) Hhat = B H - f(x) G mod q."""
    x = _check_input(c, x)
    Hx = _run(c, B, q, n, m, x=x, track_h=True, d=d)["Hx"]
    if inf_norm(Hx) > _norm_bound(m, c.depth):
        raise AssertionError("evaluation norm bound violated")
    return Hx


def eval_f_out(c: Circuit, B, q: int, n: int, m: int, *, d: int | None = None) -> np.ndarray:
    """B H mod q without forming H."""
    return _run(c, B, q, n, m, d=d)["B"]


def eval_trapdoor(c: Circuit, x, B, R, q: int, n: int, m: int, *, d: int | None = None):
    """(B H mod q, R Hhat) for a short R (m x m ell)."""
    x = _check_input(c, x)
    out = _run(c, B, q, n, m, x=x, R=np.asarray(R), d=d)
    return out["B"], out["W"]


def projection(ell: int, j: int) -> Circuit:
    return Circuit(ell, (), j, f"proj{j}")


def constant_one(ell: int) -> Circuit:
    return Circuit(ell, (), 0, "one")


def nand_circuit(ell: int, a: int, b: int) -> Circuit:
    return Circuit(ell, ((a, b),), ell, f"nand{a}{b}")


def and_circuit(ell: int, a: int, b: int) -> Circuit:
    """AND as NOT(NAND), depth 2."""
    return Circuit(ell, ((a, b), (ell, ell)), ell + 1, f"and{a}{b}")


def xor_circuit(ell: int, a: int, b: int) -> Circuit:
    """XOR from four NANDs, depth 3."""
    t = ell
    return Circuit(ell, ((a, b), (a, t), (b, t), (t + 1, t + 2)), t + 3, f"xor{a}{b}")


def table_check(ell_in: int, s: int, t: int) -> Circuit:
    """Circuit on ``1 || table`` that outputs 1 iff ``table[s] == t``.

    ``table`` has ``2**ell_in`` bits; wire ``1 + s`` holds ``table[s]``.
    """
    ell = (1 << ell_in) + 1
    if not 0 <= s < (1 << ell_in) or t not in (0, 1):
        raise ValueError("bad message")
    if t == 1:
        return Circuit(ell, (), 1 + s, f"check{s}=1")
    return Circuit(ell, ((1 + s, 1 + s),), ell, f"check{s}=0")


def builtin_circuits(ell: int = 4) -> list:
    """The fixed circuit family used by the identity tests."""
    return [
        projection(ell, 1),
        projection(ell, ell - 1),
        constant_one(ell),
        nand_circuit(ell, 1, 2),
        and_circuit(ell, 1, 2),
        xor_circuit(ell, 1, 2),
    ]
