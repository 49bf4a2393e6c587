"""Dense realization of the Temperley-Lieb category inside (C^N)^{(x)k}.

Operators are plain ``numpy`` arrays. A vector of ``k`` ambient legs has length
``N**k`` with the first leg most significant (``np.kron`` order). Operators
between irreducibles are expressed in the reduced orthonormal bases returned by
:func:`jones_wenzl_basis`; an operator H_k -> H_l (x) H_m is a
``(d_l * d_m, d_k)`` matrix.

For SU(2) the reduced basis of H_k is the weight basis: column ``j`` is the
normalized symmetrization of ``e_1^{(x)(k-j)} (x) e_2^{(x)j}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .qalg import AdmissibleTriple, GroupSpec, dim_irrep, quantum_integer, theta_net

__all__ = [
    "DEFAULT_MAX_AMBIENT",
    "IrrepBasis",
    "NumericalError",
    "ResourceCapError",
    "cg_isometry",
    "check_ambient",
    "cup_vector",
    "jones_wenzl_basis",
    "jones_wenzl_projector",
    "markov_trace",
    "nested_cup",
    "su2_rep",
    "three_vertex",
]

DEFAULT_MAX_AMBIENT = 250_000

ISOMETRY_TOL = 1e-8


class ResourceCapError(MemoryError):
    """The requested construction needs an ambient space larger than allowed."""


class NumericalError(ArithmeticError):
    """A numerical self-check (rank, isometry, positivity) failed."""


def check_ambient(legs: int, group: GroupSpec, max_ambient: int | None) -> None:
    cap = DEFAULT_MAX_AMBIENT if max_ambient is None else max_ambient
    size = group.N ** legs
    if size > cap:
        raise ResourceCapError(f"{group}: ambient dimension N^{legs} = {size} exceeds cap {cap}")


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def cup_vector(group: GroupSpec) -> np.ndarray:
    """The cup sum_i e_i (x) F e_i as a length N**2 vector."""
    return group.F.T.reshape(-1).astype(complex)


@lru_cache(maxsize=None)
def nested_cup(r: int, group: GroupSpec) -> np.ndarray:
    """``r`` nested cups as an ``(N**r, N**r)`` matrix C with cup^r = vec(C).

    Rows index the left ``r`` legs, columns the right ``r`` legs.
    """
    N = group.N
    C = np.ones((1, 1), dtype=complex)
    single = group.F.T.astype(complex)
    for s in range(1, r + 1):
        # insert a fresh cup between the two halves of the previous one
        prev = C.reshape(N ** (s - 1), N ** (s - 1))
        C = np.einsum("xy,ab->xaby", prev, single).reshape(N ** s, N ** s)
    return _readonly(C)


def markov_trace(X: np.ndarray) -> complex:
    """Quantum trace tau_k. For unitary F it coincides with the ordinary trace."""
    return np.trace(X)


def jones_wenzl_projector(k: int, group: GroupSpec, max_ambient: int | None = None) -> np.ndarray:
    """Dense p_k on (C^N)^{(x)k} from the Wenzl recursion (no basis reduction)."""
    check_ambient(k, group, max_ambient)
    N = group.N
    if k == 0:
        return np.ones((1, 1), dtype=complex)
    p = np.eye(N, dtype=complex)
    cup = cup_vector(group)
    E2 = np.outer(cup, cup.conj())
    for j in range(2, k + 1):
        Q = np.kron(np.eye(N), p)
        E = np.kron(E2, np.eye(N ** (j - 2)))
        c = quantum_integer(j - 1, group.q) / quantum_integer(j, group.q)
        p = Q - c * Q @ E @ Q
    return p


@dataclass(frozen=True, eq=False)
class IrrepBasis:
    """Orthonormal columns ``B`` (N**k x d_k) spanning H_k = p_k (C^N)^{(x)k}."""

    k: int
    group: GroupSpec
    B: np.ndarray

    @property
    def dim(self) -> int:
        return self.B.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.B @ self.B.conj().T

    def tensor(self) -> np.ndarray:
        """B reshaped to (N, ..., N, d_k)."""
        return self.B.reshape((self.group.N,) * self.k + (self.dim,))

    def reduce(self, vec: np.ndarray) -> np.ndarray:
        """Coordinates B* v of an ambient vector."""
        return self.B.conj().T @ np.asarray(vec)


def _fix_phases(B: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(B) > np.abs(B).max(axis=0) * (1 - 1e-9), axis=0)
    pivots = B[idx, np.arange(B.shape[1])]
    B = B * (np.abs(pivots) / pivots)[None, :]
    return B


def _weight_diagonal(k: int) -> np.ndarray:
    # number of legs carrying e_2, for every ambient basis vector
    w = np.zeros(1)
    for _ in range(k):
        w = (w[:, None] + np.array([0.0, 1.0])[None, :]).reshape(-1)
    return w


@lru_cache(maxsize=None)
def _jw_basis(k: int, group: GroupSpec) -> IrrepBasis:
    N = group.N
    if k == 0:
        return IrrepBasis(0, group, _readonly(np.ones((1, 1), dtype=complex)))
    if k == 1:
        return IrrepBasis(1, group, _readonly(np.eye(N, dtype=complex)))
    prev = _jw_basis(k - 1, group)
    d_prev = prev.dim
    # Bprev[b, rest, c]: first leg of H_{k-1} split off
    Bprev = prev.B.reshape(N, N ** (k - 2), d_prev)
    cup = cup_vector(group).reshape(N, N)
    # Z = (cup* (x) 1) (1 (x) B_{k-1}), columns indexed by (a, c)
    Z = np.einsum("ab,brc->rac", cup.conj(), Bprev).reshape(N ** (k - 2), N * d_prev)
    c = quantum_integer(k - 1, group.q) / quantum_integer(k, group.q)
    P = np.eye(N * d_prev) - c * (Z.conj().T @ Z)
    P = 0.5 * (P + P.conj().T)
    evals, evecs = np.linalg.eigh(P)
    keep = evecs[:, evals > 0.5]
    d_k = dim_irrep(k, group)
    if keep.shape[1] != d_k:
        raise NumericalError(f"Jones-Wenzl rank {keep.shape[1]} != dim H_{k} = {d_k} for {group}")
    U = keep.reshape(N, d_prev, d_k)
    B = np.einsum("brc,acj->abrj", Bprev, U).reshape(N ** k, d_k)
    if group.kind == "su2":
        w = _weight_diagonal(k)
        Wr = B.conj().T @ (w[:, None] * B)
        _, V = np.linalg.eigh(0.5 * (Wr + Wr.conj().T))
        B = B @ V
    B = _fix_phases(B)
    return IrrepBasis(k, group, _readonly(B))


def jones_wenzl_basis(k: int, group: GroupSpec, max_ambient: int | None = None) -> IrrepBasis:
    """Orthonormal basis of H_k built by the Wenzl recursion.

    Each step works inside the range of 1 (x) p_{k-1}, where p_k acts as
    ``1 - ([k-1]/[k]) Z*Z``; its eigenvectors with eigenvalue above 1/2 span H_k.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    check_ambient(k, group, max_ambient)
    return _jw_basis(k, group)


@lru_cache(maxsize=None)
def _three_vertex(k: int, l: int, m: int, group: GroupSpec) -> np.ndarray:
    t = AdmissibleTriple(k, l, m)
    r = t.r
    N = group.N
    Bk = _jw_basis(k, group)
    Bl = _jw_basis(l, group)
    Bm = _jw_basis(m, group)
    C = nested_cup(r, group)
    Tl = Bl.B.reshape(N ** (l - r), N ** r, Bl.dim)
    Tm = Bm.B.reshape(N ** r, N ** (m - r), Bm.dim)
    Tk = Bk.B.reshape(N ** (l - r), N ** (m - r), Bk.dim)
    # contract the l-legs first, then the cups together with the m-legs
    U = np.tensordot(Tl.conj(), Tk, axes=([0], [0]))              # (x, p, b, c)
    Tm_cup = np.tensordot(C, Tm.conj(), axes=([1], [0]))          # (x, b, q)
    A = np.tensordot(U, Tm_cup, axes=([0, 2], [0, 1]))            # (p, c, q)
    A = A.transpose(0, 2, 1).reshape(Bl.dim * Bm.dim, Bk.dim)
    if np.linalg.norm(A) < 1e-12:
        raise NumericalError(f"three-vertex {(k, l, m)} vanished numerically")
    return _readonly(A)


def three_vertex(triple, group: GroupSpec, max_ambient: int | None = None) -> np.ndarray:
    """Reduced matrix of A_k^{l,m} = (p_l (x) p_m)(1 (x) cup^r (x) 1) p_k, shape (d_l d_m, d_k)."""
    k, l, m = AdmissibleTriple.coerce(triple)
    check_ambient(max(k, l, m), group, max_ambient)
    return _three_vertex(k, l, m, group)


@lru_cache(maxsize=None)
def _cg_isometry(k: int, l: int, m: int, group: GroupSpec) -> np.ndarray:
    A = _three_vertex(k, l, m, group)
    scale = np.sqrt(quantum_integer(k + 1, group.q) / theta_net((k, l, m), group.q))
    alpha = scale * A
    err = np.linalg.norm(alpha.conj().T @ alpha - np.eye(alpha.shape[1]))
    if err > ISOMETRY_TOL:
        raise NumericalError(f"alpha_{k}^{{{l},{m}}} is not an isometry (error {err:.2e})")
    return _readonly(alpha)


def cg_isometry(triple, group: GroupSpec, max_ambient: int | None = None) -> np.ndarray:
    """Intertwining isometry alpha_k^{l,m} = ([k+1]_q / theta_q(k,l,m))^{1/2} A_k^{l,m}."""
    k, l, m = AdmissibleTriple.coerce(triple)
    check_ambient(max(k, l, m), group, max_ambient)
    return _cg_isometry(k, l, m, group)


def su2_rep(m: int, g: np.ndarray) -> np.ndarray:
    """pi_m(g) = B_m* g^{(x)m} B_m for g in SU(2)."""
    g = np.asarray(g, dtype=complex)
    if g.shape != (2, 2):
        raise ValueError("g must be 2x2")
    if np.abs(g.conj().T @ g - np.eye(2)).max() > 1e-10 or abs(np.linalg.det(g) - 1) > 1e-10:
        raise ValueError("g must be special unitary")
    basis = _jw_basis(m, GroupSpec("su2"))
    T = basis.tensor()
    for leg in range(m):
        T = np.moveaxis(np.tensordot(g, T, axes=([1], [leg])), 0, leg)
    return basis.B.conj().T @ T.reshape(2 ** m, basis.dim)
