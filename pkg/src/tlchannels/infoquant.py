"""Entropies, minimum output entropy searches and capacity estimates.

All entropies are in nats.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .channels import LEFT, StinespringChannel, TLChannel, _stinespring
from .qalg import quantum_integer, theta_net
from .tlrep import jones_wenzl_basis
from .validation import STATE_TOL, check_density_matrix

__all__ = [
    "CapacityBounds",
    "Descent",
    "Ensemble",
    "MOEReport",
    "PaperWitness",
    "RandomPure",
    "capacity_bounds",
    "coherent_information",
    "holevo_of_ensemble",
    "min_output_entropy",
    "moe_witness_state",
    "q1_witness_state",
    "theory_lower_bound",
    "von_neumann_entropy",
]

ZERO_EIGENVALUE = 1e-12
WITNESS_NORM_TOL = 1e-8


def _entropy_from_eigenvalues(w: np.ndarray, tol: float = STATE_TOL) -> float:
    if w.size and w.min() < -tol:
        raise ValueError(f"state has eigenvalue {w.min():.3e} below -{tol:g}")
    w = w[w >= ZERO_EIGENVALUE]
    return max(0.0, float(-np.sum(w * np.log(w))))


def von_neumann_entropy(rho, tol: float = STATE_TOL) -> float:
    """-sum lambda ln lambda; eigenvalues below 1e-12 count as zero."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > 1e-8:
        raise ValueError("state is not Hermitian")
    if abs(np.trace(rho).real - 1) > 1e-8:
        raise ValueError(f"state has trace {np.trace(rho).real:.12g}")
    return _entropy_from_eigenvalues(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)), tol)


def _output(channel, rho):
    return _stinespring(channel).apply_linear(rho)


def _require_onplus_witness(channel: TLChannel):
    if not isinstance(channel, TLChannel):
        raise TypeError("witness states are defined for TL channels")
    g = channel.group_
    if g.kind != "onplus" or g.N < 3:
        raise ValueError("witness states need O_N^+ with N >= 3 (adjacent-distinct indices "
                         "do not lie in H_k for SU(2))")


def _index_state(indices: Sequence[int], channel: TLChannel) -> np.ndarray:
    # reduced coordinates of the ambient basis vector |i_1 ... i_k>, 0-based
    g, k = channel.group_, channel.triple_.k
    pos = 0
    for i in indices:
        pos = pos * g.N + i
    basis = jones_wenzl_basis(k, g, channel.max_ambient)
    v = basis.B[pos, :].conj()
    norm = np.linalg.norm(v)
    if abs(norm - 1) > WITNESS_NORM_TOL:
        raise ArithmeticError(f"index {tuple(indices)} is not in H_{k} (norm {norm:.3e})")
    return v / norm


def _alternating(length: int, start: int = 0) -> list[int]:
    return [(start + s) % 2 for s in range(length)]


def _adjacent_distinct(length: int, N: int, first_not=None, last_not=None):
    for j in itertools.product(range(N), repeat=length):
        if any(a == b for a, b in zip(j, j[1:])):
            continue
        if length and first_not is not None and j[0] == first_not:
            continue
        if length and last_not is not None and j[-1] == last_not:
            continue
        yield list(j)


def moe_witness_state(channel: TLChannel) -> np.ndarray:
    """|m><m| for the alternating index m = (1,2,1,...) of length k."""
    _require_onplus_witness(channel)
    v = _index_state(_alternating(channel.triple_.k), channel)
    return np.outer(v, v.conj())


def q1_witness_state(channel: TLChannel) -> np.ndarray:
    """Uniform mixture of adjacent-distinct index states probing the coherent information.

    With r = (l+m-k)/2: for a right-traced channel (output H_l) the free part
    j of length l-r sits on the left and is followed by the alternating
    n = (1,2,...) of length m-r, with j ending away from n's first letter.
    For a left-traced channel (output H_m) the picture is mirrored: a fixed
    alternating prefix of length l-r followed by a free suffix of length m-r
    that starts away from the prefix's last letter. Either way the mixture has
    (N-1)^{free length} terms.
    """
    _require_onplus_witness(channel)
    k, l, m = channel.triple_
    r = (l + m - k) // 2
    N = channel.group_.N
    if channel.traced_ == LEFT:
        fixed = _alternating(l - r)
        first_not = fixed[-1] if fixed else None
        words = [fixed + j for j in _adjacent_distinct(m - r, N, first_not=first_not)]
    else:
        fixed = _alternating(m - r)
        last_not = fixed[0] if fixed else None
        words = [j + fixed for j in _adjacent_distinct(l - r, N, last_not=last_not)]
    vecs = np.stack([_index_state(w, channel) for w in words], axis=1)
    return vecs @ vecs.conj().T / len(words)


@dataclass(frozen=True)
class PaperWitness:
    """Alternating-index witness; falls back to ``fallback`` when not applicable."""

    fallback: "RandomPure" = field(default_factory=lambda: RandomPure())


@dataclass(frozen=True)
class RandomPure:
    samples: int = 2000
    seed: int = 0


@dataclass(frozen=True)
class Descent:
    """Projected gradient refinement from the best of ``samples`` random starts."""

    iters: int = 200
    seed: int = 0
    samples: int = 200


Strategy = Union[PaperWitness, RandomPure, Descent]


@dataclass(frozen=True, eq=False)
class MOEReport:
    """Best output entropy found: an upper bound on the minimum output entropy."""

    best_entropy: float
    argmin: np.ndarray
    strategy: Strategy
    theory_lower: float
    theory_upper_hint: float

    def as_dict(self) -> dict:
        return {
            "best_entropy": self.best_entropy,
            "strategy": type(self.strategy).__name__,
            "theory_lower": self.theory_lower,
            "theory_upper_hint": self.theory_upper_hint,
            "label": "upper bound on H_min",
        }


def theory_lower_bound(channel: TLChannel) -> float:
    """ln(theta_q(k,l,m) / [k+1]_q), a lower bound on the minimum output entropy."""
    k, l, m = channel.triple_
    q = channel.group_.q
    return math.log(theta_net((k, l, m), q) / quantum_integer(k + 1, q))


def _pure_output_entropies(ch: StinespringChannel, psi: np.ndarray) -> np.ndarray:
    # psi: (n, d_A); output spectra are squared singular values of (V psi) as d_B x d_E
    M = (psi @ ch.V.T).reshape(-1, ch.d_B, ch.d_E)
    s = np.linalg.svd(M, compute_uv=False) ** 2
    s = np.where(s >= ZERO_EIGENVALUE, s, 1.0)
    return -np.sum(s * np.log(s), axis=1)


def _random_pure(d: int, samples: int, seed: int) -> np.ndarray:
    # one stream per sample index, so results do not depend on batching
    out = np.empty((samples, d), dtype=complex)
    for i in range(samples):
        rng = np.random.default_rng([seed, i])
        z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        out[i] = z / np.linalg.norm(z)
    return out


def _random_search(ch: StinespringChannel, samples: int, seed: int):
    if samples < 1:
        raise ValueError("samples must be positive")
    psi = _random_pure(ch.d_A, samples, seed)
    H = _pure_output_entropies(ch, psi)
    best = int(np.argmin(H))
    return float(H[best]), psi[best]


def _descent(ch: StinespringChannel, psi: np.ndarray, iters: int):
    T = ch.V.reshape(ch.d_B, ch.d_E, ch.d_A)

    def value(v):
        return float(_pure_output_entropies(ch, v[None, :])[0])

    def gradient(v):
        M = (ch.V @ v).reshape(ch.d_B, ch.d_E)
        w, U = np.linalg.eigh(M @ M.conj().T)
        L = (U * np.log(np.maximum(w, ZERO_EIGENVALUE))) @ U.conj().T
        # Phi*(-ln sigma) psi, projected onto the tangent space of the sphere
        g = -np.einsum("bea,bc,cef,f->a", T.conj(), L, T, v, optimize=True)
        return g - np.vdot(v, g) * v

    current, step = value(psi), 0.5
    for _ in range(iters):
        trial = psi - step * gradient(psi)
        trial /= np.linalg.norm(trial)
        h = value(trial)
        if h < current:
            psi, current = trial, h
        else:
            step *= 0.5
            if step < 1e-12:
                break
    return current, psi


def min_output_entropy(channel, strategy: Strategy | None = None) -> MOEReport:
    """Search for a low-entropy output; the result bounds H_min from above."""
    strategy = PaperWitness() if strategy is None else strategy
    ch = _stinespring(channel)
    used = strategy
    if isinstance(strategy, PaperWitness):
        try:
            rho = moe_witness_state(channel)
        except (TypeError, ValueError, ArithmeticError):
            used = strategy.fallback
        else:
            H = von_neumann_entropy(_output(channel, rho))
            return _report(channel, H, rho, strategy)
    if isinstance(used, RandomPure):
        H, psi = _random_search(ch, used.samples, used.seed)
    elif isinstance(used, Descent):
        _, start = _random_search(ch, used.samples, used.seed)
        H, psi = _descent(ch, start, used.iters)
    else:
        raise TypeError(f"unknown strategy {strategy!r}")
    return _report(channel, H, np.outer(psi, psi.conj()), used)


def _report(channel, H, rho, strategy) -> MOEReport:
    if isinstance(channel, TLChannel):
        lower = theory_lower_bound(channel)
        r = (channel.triple_.l + channel.triple_.m - channel.triple_.k) // 2
        hint = r * math.log(channel.group_.N)
    else:
        lower, hint = 0.0, math.log(_stinespring(channel).d_B)
    return MOEReport(H, rho, strategy, lower, hint)


def coherent_information(channel, rho) -> float:
    """H(Phi(rho)) - H(Phi~(rho))."""
    ch = _stinespring(channel)
    rho = check_density_matrix(rho, ch.d_A)
    return von_neumann_entropy(ch.apply_linear(rho)) - von_neumann_entropy(
        ch.complementary().apply_linear(rho))


@dataclass(frozen=True, eq=False)
class Ensemble:
    probabilities: np.ndarray
    states: tuple

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 1 or p.size == 0 or p.size != len(self.states):
            raise ValueError("ensemble needs one probability per state and at least one state")
        if p.min() < 0 or p.max() > 1 or abs(p.sum() - 1) > 1e-10:
            raise ValueError("probabilities must lie in [0, 1] and sum to 1")
        states = tuple(check_density_matrix(s) for s in self.states)
        if len({s.shape for s in states}) != 1:
            raise ValueError("ensemble states must share one dimension")
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "states", states)

    @property
    def average(self) -> np.ndarray:
        return sum(p * s for p, s in zip(self.probabilities, self.states))


def holevo_of_ensemble(channel, ensemble: Ensemble) -> float:
    """H(Phi(sum p rho)) - sum p H(Phi(rho)), a lower bound on the Holevo capacity."""
    ch = _stinespring(channel)
    if ensemble.states[0].shape[0] != ch.d_A:
        raise ValueError("ensemble dimension does not match the channel input")
    mixed = von_neumann_entropy(ch.apply_linear(ensemble.average))
    parts = sum(p * von_neumann_entropy(ch.apply_linear(s))
                for p, s in zip(ensemble.probabilities, ensemble.states))
    return mixed - parts


@dataclass(frozen=True)
class CapacityBounds:
    """ln(d_B/d_E) <= Q1 <= C <= min(c_upper_list), all in nats."""

    q1_lower: float
    c_upper_list: tuple

    @property
    def c_upper(self) -> float:
        return min(self.c_upper_list)

    def as_dict(self) -> dict:
        return {"q1_lower": self.q1_lower, "c_upper_list": list(self.c_upper_list)}


def _assert_bistochastic(ch: StinespringChannel, tol: float = 1e-10):
    mixed = np.eye(ch.d_A) / ch.d_A
    for s in (ch, ch.complementary()):
        err = np.abs(s.apply_linear(mixed) - np.eye(s.d_B) / s.d_B).max()
        if err > tol:
            raise ArithmeticError(f"channel is not bistochastic (error {err:.2e})")


def capacity_bounds(channel) -> CapacityBounds:
    """Capacity sandwich for a bistochastic channel with bistochastic complement."""
    ch = _stinespring(channel)
    _assert_bistochastic(ch)
    dA, dB, dE = ch.d_A, ch.d_B, ch.d_E
    uppers = (math.log(dA), math.log(dB), math.log(dA * dB / dE))
    return CapacityBounds(math.log(dB / dE), uppers)

