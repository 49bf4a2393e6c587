"""Scalar layer: quantum parameter, quantum integers, theta nets, admissibility."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "AdmissibilityError",
    "AdmissibleTriple",
    "GroupSpec",
    "dim_irrep",
    "is_admissible",
    "onplus",
    "quantum_factorial_log",
    "quantum_integer",
    "su2",
    "theta_net",
]

# Absolute tolerance when rounding a quantum integer to a representation dimension.
DIM_ROUND_TOL = 1e-6


class AdmissibilityError(ValueError):
    """Raised when a label triple violates the parity or triangle condition."""


def _quantum_parameter(N: int) -> float:
    if N == 2:
        return 1.0
    return 2.0 / (N * (1.0 + math.sqrt(1.0 - 4.0 / N**2)))


@dataclass(frozen=True)
class GroupSpec:
    """Which Kac-type category is in play.

    ``kind`` is ``"onplus"`` (parameter matrix F = identity on C^N) or ``"su2"``
    (F = [[0, 1], [-1, 0]], N fixed to 2).
    """

    kind: str
    N: int = 2
    q: float = field(init=False, repr=False)
    loop_value: float = field(init=False, repr=False)

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in ("onplus", "su2"):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if kind == "su2" and self.N != 2:
            raise ValueError("SU(2) has N = 2")
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "q", 1.0 if kind == "su2" else _quantum_parameter(self.N))
        object.__setattr__(self, "loop_value", float(self.N))

    @property
    def F(self) -> np.ndarray:
        if self.kind == "su2":
            return np.array([[0.0, 1.0], [-1.0, 0.0]])
        return np.eye(self.N)

    @property
    def snake_sign(self) -> int:
        """Sign of the zig-zag identity: +1 when F is symmetric, -1 when antisymmetric."""
        return -1 if self.kind == "su2" else 1

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        """Parse ``"su2"`` or ``"onplus:<N>"``."""
        text = text.strip().lower()
        if text == "su2":
            return cls("su2")
        if text.startswith("onplus:"):
            try:
                N = int(text.split(":", 1)[1])
            except ValueError as exc:
                raise ValueError(f"bad group {text!r}") from exc
            return cls("onplus", N)
        raise ValueError(f"bad group {text!r}; expected 'su2' or 'onplus:<N>'")

    def __str__(self):
        return "su2" if self.kind == "su2" else f"onplus:{self.N}"


def onplus(N: int) -> GroupSpec:
    return GroupSpec("onplus", N)


def su2() -> GroupSpec:
    return GroupSpec("su2")


def is_admissible(k: int, l: int, m: int) -> bool:
    """True iff H_k occurs in H_l (x) H_m, i.e. k = l + m - 2r with 0 <= r <= min(l, m)."""
    if min(k, l, m) < 0:
        return False
    return (l + m - k) % 2 == 0 and abs(l - m) <= k <= l + m


@dataclass(frozen=True)
class AdmissibleTriple:
    k: int
    l: int
    m: int

    def __post_init__(self):
        k, l, m = self.k, self.l, self.m
        if min(k, l, m) < 0:
            raise AdmissibilityError(f"labels must be nonnegative, got {(k, l, m)}")
        if (l + m - k) % 2:
            raise AdmissibilityError(f"parity violation: l + m - k = {l + m - k} is odd for (k,l,m)={(k, l, m)}")
        if not abs(l - m) <= k <= l + m:
            raise AdmissibilityError(
                f"triangle violation: need |l-m| <= k <= l+m for (k,l,m)={(k, l, m)}")

    @property
    def r(self) -> int:
        return (self.l + self.m - self.k) // 2

    def __iter__(self):
        return iter((self.k, self.l, self.m))

    @classmethod
    def coerce(cls, triple) -> "AdmissibleTriple":
        if isinstance(triple, cls):
            return triple
        k, l, m = (int(x) for x in triple)
        return cls(k, l, m)


def _integral_loop(q: float) -> int | None:
    s = q + 1.0 / q
    n = round(s)
    if abs(s - n) < 1e-9:
        return int(n)
    return None


@lru_cache(maxsize=4096)
def quantum_integer(n: int, q: float) -> float:
    """[n]_q = q^{-(n-1)} (1 - q^{2n}) / (1 - q^2), with [n]_1 = n.

    For an integral loop value q + 1/q the three-term recursion
    [n+1] = (q + 1/q)[n] - [n-1] is used instead; it is exact in floating point
    up to 2**53 where the closed form loses the last few units.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not 0 < q <= 1:
        raise ValueError("q must lie in (0, 1]")
    if n == 0:
        return 0.0
    if q == 1.0:
        return float(n)
    s = _integral_loop(q)
    if s is not None:
        prev, cur = 0, 1
        for _ in range(n - 1):
            prev, cur = cur, s * cur - prev
        return float(cur)
    return q ** (-(n - 1)) * (1.0 - q ** (2 * n)) / (1.0 - q * q)


@lru_cache(maxsize=4096)
def quantum_factorial_log(n: int, q: float) -> float:
    """ln([n]_q!) accumulated in the log domain; [0]_q! = 1."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return float(sum(math.log(quantum_integer(j, q)) for j in range(1, n + 1)))


def theta_net(triple, q: float) -> float:
    """Theta net [r]![l-r]![m-r]![k+r+1]! / ([l]![m]![k]!) for an admissible (k, l, m)."""
    t = AdmissibleTriple.coerce(triple)
    k, l, m, r = t.k, t.l, t.m, t.r
    f = quantum_factorial_log
    log_theta = (f(r, q) + f(l - r, q) + f(m - r, q) + f(k + r + 1, q)
                 - f(l, q) - f(m, q) - f(k, q))
    return math.exp(log_theta)


def dim_irrep(k: int, group: GroupSpec) -> int:
    """dim H_k = [k+1]_q, returned as an integer."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if group.kind == "su2":
        return k + 1
    value = quantum_integer(k + 1, group.q)
    d = round(value)
    if abs(value - d) > DIM_ROUND_TOL:
        raise ArithmeticError(f"[{k + 1}]_q = {value!r} is not an integer; broken quantum parameter")
    return int(d)
