"""Lattice parameters for the constrained-signature scheme and their checker.

:func:`validate_params` evaluates the seven conditions with exact arithmetic
(sympy), so boundary cases such as ``sigma = sqrt(8m)`` are decided exactly
and astronomically large bounds never overflow:

1. ``m >= m*(n, q)`` and ``beta_sam >= n ceil(log q) * DIGIT_BOUND`` (the
   trapdoor sampler works and its outputs respect ``beta_sam``).
2. ``m >= 2 n ceil(log q)``.
3. ``sigma >= (5 m^3 l beta_sam (2m)^d + 5m) sqrt((n log q + m) / pi)``.
4. ``sqrt(8m) < sigma < q / sqrt(8m)``.
5. ``beta_ver >= ceil(log^2 m) sigma``.
6. ``beta_SIS >= 4 m^2 l beta_sam (2m)^d beta_ver``.
7. ``q`` is prime and ``beta_SIS < q``. SIS hardness itself is assumed, not
   checked; these are its necessary arithmetic preconditions.

Logarithms are base 2.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache

import sympy as sp

from .gaussian import DIGIT_BOUND
from .trapdoor import m_star, sampler_bound
from .zq import ceil_log2

__all__ = [
    "LatticeParams",
    "ConditionResult",
    "ParamReport",
    "InvalidParams",
    "validate_params",
    "preset",
    "PRESETS",
    "schema_params",
    "sigma_lower",
    "quality_width",
]


class InvalidParams(ValueError):
    """Parameters fail a condition the operation relies on."""


@dataclass(frozen=True)
class LatticeParams:
    n: int
    m: int
    q: int
    sigma: object  # int, float, or an exact sympy expression
    beta_sam: int
    beta_ver: object
    beta_sis: object
    d: int
    ell: int
    iota: int
    k: int | None = None
    name: str = "custom"
    strict: bool = True

    def __post_init__(self):
        if self.k is None:
            object.__setattr__(self, "k", self.m)

    @property
    def log_q(self) -> int:
        return ceil_log2(self.q)

    @property
    def table_bits(self) -> int:
        """Input length of the tabulated functions this instance constrains to."""
        return self.iota - 1

    @property
    def beta_err(self) -> int:
        """Noise bound guaranteed for the derived signing trapdoor."""
        return self.q // (5 * self.m ** 3 * self.ell * self.beta_sam * (2 * self.m) ** self.d + 5 * self.m)

    @property
    def sigma_float(self) -> float:
        return float(sp.N(sp.sympify(self.sigma), 30))

    def with_(self, **kw) -> "LatticeParams":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("sigma", "beta_ver", "beta_sis"):
            v = out[key]
            out[key] = int(v) if isinstance(v, int) or (isinstance(v, sp.Integer)) else str(v)
        return out


@dataclass(frozen=True)
class ConditionResult:
    index: int
    relation: str
    lhs: str
    rhs: str
    passed: bool
    log2_lhs: float | None = None
    log2_rhs: float | None = None


@dataclass(frozen=True)
class ParamReport:
    params: LatticeParams
    conditions: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.conditions)

    def failed(self) -> list:
        return [c.index for c in self.conditions if not c.passed]

    def __getitem__(self, i: int) -> ConditionResult:
        return self.conditions[i - 1]

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "ok": self.ok,
            "conditions": [asdict(c) for c in self.conditions],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def lines(self) -> list:
        out = []
        for c in self.conditions:
            tag = "PASS" if c.passed else "FAIL"
            out.append(f"condition {c.index} {tag}: {c.relation}  lhs={c.lhs}  rhs={c.rhs}")
        return out


def _exact(v):
    return sp.sympify(v) if not isinstance(v, float) else sp.Float(v, 30)


def _log2(v) -> float | None:
    v = sp.sympify(v)
    if v.is_number and v > 0:
        return float(sp.N(sp.log(v, 2), 20))
    return None


def _fmt(v) -> str:
    v = sp.sympify(v)
    if v.is_Integer:
        return str(int(v))
    if v.is_Float:
        return sp.sstr(v)
    approx = sp.N(v, 25)
    return f"{v} ~ {approx}"


def sigma_lower(n: int, m: int, q: int, ell: int, beta_sam: int, d: int, log_q=None):
    """Exact right-hand side of condition 3 (``log_q`` defaults to log2 q)."""
    lq = sp.log(sp.Integer(q), 2) if log_q is None else sp.sympify(log_q)
    return (5 * sp.Integer(m) ** 3 * ell * beta_sam * (2 * sp.Integer(m)) ** d + 5 * m) * sp.sqrt((n * lq + m) / sp.pi)


def quality_width(n: int, m: int, q: int, t_norm: int) -> float:
    """Smallest width the signing trapdoor of norm ``t_norm`` supports."""
    return 5 * m * (m * t_norm + 1) * math.sqrt((n * math.log2(q) + m) / math.pi)


def _ceil_log_sq(m: int) -> int:
    return int(sp.ceiling(sp.log(sp.Integer(m), 2) ** 2))


def validate_params(p: LatticeParams) -> ParamReport:
    n, m, q, d, ell = p.n, p.m, p.q, p.d, p.ell
    K = ceil_log2(q)
    sigma = _exact(p.sigma)
    bver = _exact(p.beta_ver)
    bsis = _exact(p.beta_sis)
    res = []

    ms, bs = m_star(n, q), sampler_bound(n, q)
    res.append(ConditionResult(
        1, "m >= m*(n,q) and beta_sam >= n*ceil(log q)*%d" % DIGIT_BOUND,
        f"m={m}, beta_sam={p.beta_sam}", f"m*={ms}, bound={bs}",
        bool(m >= ms and p.beta_sam >= bs)))

    res.append(ConditionResult(2, "m >= 2n*ceil(log q)", str(m), str(2 * n * K), bool(m >= 2 * n * K)))

    lower = sigma_lower(n, m, q, ell, p.beta_sam, d)
    res.append(ConditionResult(3, "sigma >= (5m^3 l beta_sam (2m)^d + 5m) sqrt((n log q + m)/pi)",
                               _fmt(sigma), _fmt(lower), bool(sigma >= lower), _log2(sigma), _log2(lower)))

    edge = sp.sqrt(8 * sp.Integer(m))
    c4 = bool(sp.And(edge < sigma, sigma < sp.Integer(q) / edge))
    res.append(ConditionResult(4, "sqrt(8m) < sigma < q/sqrt(8m)", _fmt(sigma),
                               f"({_fmt(edge)}, {_fmt(sp.Integer(q) / edge)})", c4, _log2(sigma), None))

    need_ver = _ceil_log_sq(m) * sigma
    res.append(ConditionResult(5, "beta_ver >= ceil(log^2 m) sigma", _fmt(bver), _fmt(need_ver),
                               bool(bver >= need_ver), _log2(bver), _log2(need_ver)))

    need_sis = 4 * sp.Integer(m) ** 2 * ell * p.beta_sam * (2 * sp.Integer(m)) ** d * bver
    res.append(ConditionResult(6, "beta_SIS >= 4 m^2 l beta_sam (2m)^d beta_ver", _fmt(bsis), _fmt(need_sis),
                               bool(bsis >= need_sis), _log2(bsis), _log2(need_sis)))

    prime = bool(sp.isprime(q))
    res.append(ConditionResult(7, "q prime and beta_SIS < q", f"q={q} ({'prime' if prime else 'composite'})",
                               _fmt(bsis), bool(prime and bsis < q), _log2(q), _log2(bsis)))
    return ParamReport(p, tuple(res))


def _derive(n, m, q, ell, d, beta_sam=None):
    beta_sam = sampler_bound(n, q) if beta_sam is None else beta_sam
    sigma = int(sp.ceiling(sigma_lower(n, m, q, ell, beta_sam, d)))
    beta_ver = _ceil_log_sq(m) * sigma
    beta_sis = 4 * m * m * ell * beta_sam * (2 * m) ** d * beta_ver
    return beta_sam, sigma, beta_ver, beta_sis


@lru_cache(maxsize=None)
def _toy() -> LatticeParams:
    n, ell_in, d = 1, 4, 1
    ell = (1 << ell_in) + 1
    K = 64
    for _ in range(50):
        m = 2 * n * K
        beta_sam = sampler_bound(n, 1 << K)
        sigma = int(sp.ceiling(sigma_lower(n, m, 1 << K, ell, beta_sam, d, log_q=K)))
        beta_ver = _ceil_log_sq(m) * sigma
        beta_sis = 4 * m * m * ell * beta_sam * (2 * m) ** d * beta_ver
        q = int(sp.nextprime(beta_sis))
        if ceil_log2(q) == K:
            return LatticeParams(n, m, q, sigma, beta_sam, beta_ver, beta_sis, d, ell, ell_in + 1, name="toy")
        K = ceil_log2(q)
    raise RuntimeError("toy parameter search did not converge")


@lru_cache(maxsize=None)
def _small() -> LatticeParams:
    n, m, ell_in, d = 1, 80, 4, 1
    q = int(sp.prevprime(1 << 40))
    ell = (1 << ell_in) + 1
    beta_sam = sampler_bound(n, q)
    # widest signing trapdoor for the table-check circuits: (m + 3) beta_sam
    sigma = int(math.ceil(quality_width(n, m, q, (m + 3) * beta_sam)))
    beta_ver = _ceil_log_sq(m) * sigma
    beta_sis = 4 * m * m * ell * beta_sam * (2 * m) ** d * beta_ver
    return LatticeParams(n, m, q, sigma, beta_sam, beta_ver, beta_sis, d, ell, ell_in + 1, name="small", strict=False)


@lru_cache(maxsize=None)
def _micro() -> LatticeParams:
    n, q, ell_in, d = 1, 257, 2, 1
    m = m_star(n, q)
    ell = (1 << ell_in) + 1
    beta_sam, sigma, beta_ver, beta_sis = _derive(n, m, q, ell, d)
    return LatticeParams(n, m, q, sigma, beta_sam, beta_ver, beta_sis, d, ell, ell_in + 1, name="micro", strict=False)


PRESETS = {"toy": _toy, "small": _small, "micro": _micro}


def preset(name: str) -> LatticeParams:
    """``toy`` passes all seven conditions; ``small`` signs quickly but is not
    condition-valid; ``micro`` supports key generation and deletion only."""
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def schema_params(lam: int, *, n: int = 1, d: int = 1, ell: int = 17, iota: int = 5) -> LatticeParams:
    """The generic assignment: beta_SIS = 2^(d ceil(log^2 lam)), q the next prime,
    m = max(m*, 2n ceil(log q)), sigma from condition 3, beta_ver = ceil(log^2 m) sigma."""
    beta_sis = 1 << (d * _ceil_log_sq(lam))
    q = int(sp.nextprime(beta_sis))
    m = max(m_star(n, q), 2 * n * ceil_log2(q))
    beta_sam, sigma, beta_ver, _ = _derive(n, m, q, ell, d)
    return LatticeParams(n, m, q, sigma, beta_sam, beta_ver, beta_sis, d, ell, iota, name=f"schema-{lam}", strict=False)
