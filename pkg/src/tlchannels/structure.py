"""Structural properties: PPT, entanglement-breaking witnesses, Haar averaging, degradability."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import LEFT, RIGHT, TLChannel, build_channel, choi, compose, kraus_operators
from .qalg import GroupSpec
from .tlrep import cg_isometry, jones_wenzl_basis
from .validation import check_density_matrix, check_square

__all__ = [
    "PPTReport",
    "ebt_submatrix_witness",
    "haar_average_state",
    "haar_su2",
    "witness_vectors",
    "partial_transpose",
    "ppt_check",
    "purity",
    "range_dimension",
    "verify_degrading_identity",
]

PPT_ACCEPT_TOL = 1e-10
PPT_REJECT_TOL = 1e-8
PRODUCT_TOL = 1e-8


def partial_transpose(M, dims, factor: str = "first") -> np.ndarray:
    """Transpose one tensor factor of an operator on C^{d_1} (x) C^{d_2}."""
    d1, d2 = (int(d) for d in dims)
    M = check_square(M, d1 * d2, "operator")
    T = M.reshape(d1, d2, d1, d2)
    if factor == "first":
        T = T.transpose(2, 1, 0, 3)
    elif factor == "second":
        T = T.transpose(0, 3, 2, 1)
    else:
        raise ValueError("factor must be 'first' or 'second'")
    return T.reshape(d1 * d2, d1 * d2)


@dataclass(frozen=True)
class PPTReport:
    """Outcome of a PPT test with a dead band between the two tolerances."""

    min_eigenvalue: float
    is_ppt: bool
    tol: float
    reject_tol: float = PPT_REJECT_TOL

    @property
    def status(self) -> str:
        if self.min_eigenvalue >= -self.tol:
            return "ppt"
        if self.min_eigenvalue < -self.reject_tol:
            return "not_ppt"
        return "indeterminate"

    def as_dict(self) -> dict:
        return {"is_ppt": self.is_ppt, "status": self.status,
                "min_eigenvalue": self.min_eigenvalue, "tol": self.tol, "reject_tol": self.reject_tol}


def _dims(channel):
    ops = kraus_operators(channel)
    return ops[0].shape


def ppt_check(channel, tol: float = PPT_ACCEPT_TOL, reject_tol: float = PPT_REJECT_TOL) -> PPTReport:
    """Smallest eigenvalue of the output-transposed normalized Choi matrix."""
    d_B, d_A = _dims(channel)
    C = partial_transpose(choi(channel, normalized=True), (d_B, d_A), "first")
    lam = float(np.linalg.eigvalsh(0.5 * (C + C.conj().T))[0])
    return PPTReport(lam, lam >= -tol, tol, reject_tol)


def ebt_submatrix_witness(channel, v1, v2, orth_tol: float = 1e-10) -> float:
    """Determinant a c - |b|^2 of the compression of the output-transposed Choi to span(v1, v2).

    A negative value certifies that the channel is not PPT, hence not EBT.
    """
    d_B, d_A = _dims(channel)
    v1 = np.asarray(v1, dtype=complex).reshape(-1)
    v2 = np.asarray(v2, dtype=complex).reshape(-1)
    if v1.size != d_B * d_A or v2.size != d_B * d_A:
        raise ValueError(f"witness vectors must have length d_B * d_A = {d_B * d_A}")
    if (abs(np.linalg.norm(v1) - 1) > orth_tol or abs(np.linalg.norm(v2) - 1) > orth_tol
            or abs(np.vdot(v1, v2)) > orth_tol):
        raise ValueError("witness vectors must be orthonormal")
    C = partial_transpose(choi(channel, normalized=True), (d_B, d_A), "first")
    V = np.stack([v1, v2], axis=1)
    S = V.conj().T @ C @ V
    return float((S[0, 0] * S[1, 1]).real - abs(S[0, 1]) ** 2)


def _basis_product(i: int, j: int, d_B: int, d_A: int) -> np.ndarray:
    v = np.zeros(d_B * d_A, dtype=complex)
    v[i * d_A + j] = 1.0
    return v


def witness_vectors(channel: TLChannel):
    """Weight-basis pair (v1, v2) in H_B (x) H_A exposing non-PPT SU(2) channels.

    Returns ``None`` on the PPT cases (k = 0 for the channel that keeps the
    larger label, k = |l - m| for the one that keeps the smaller). Right-traced
    channels with l < m are handled through the identity
    Phi_k^{l, m-bar} = Phi_k^{m-bar, l}, and symmetrically for left-traced ones.
    """
    if channel.group_.kind != "su2":
        raise ValueError("the weight-basis witness is defined for SU(2)")
    k, l, m = channel.triple_
    d_B, d_A = channel.d_B_, channel.d_A_
    keep, other = (l, m) if channel.traced_ == RIGHT else (m, l)
    # keep = label of the output factor, other = label of the traced factor
    if keep >= other:
        if k == 0:
            return None
        if k > keep:
            pair = ((keep, 0), (0, keep))
        else:
            pair = ((keep, 0), (keep - k, k))
    else:
        if k == other - keep:
            return None
        if k <= keep:
            pair = ((keep, 0), (keep - k, k))
        else:
            pair = ((keep, 0), (0, keep))
    return tuple(_basis_product(i, j, d_B, d_A) for i, j in pair)


def haar_su2(rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar-distributed SU(2) elements from uniformly random unit quaternions."""
    shape = (4,) if size is None else (size, 4)
    x = rng.standard_normal(shape)
    x /= np.linalg.norm(x, axis=-1, keepdims=True)
    a, b, c, d = np.moveaxis(x, -1, 0)
    g = np.stack([np.stack([a + 1j * b, c + 1j * d], -1),
                  np.stack([-c + 1j * d, a - 1j * b], -1)], -2)
    return g


def _rep_apply(m: int, G: np.ndarray, v: np.ndarray) -> np.ndarray:
    # pi_m(g) v for a stack of g, acting leg by leg on the ambient vector
    basis = jones_wenzl_basis(m, GroupSpec("su2"))
    n = G.shape[0]
    T = np.broadcast_to(basis.B @ v, (n, 2 ** m)).reshape((n,) + (2,) * m)
    for leg in range(1, m + 1):
        T = np.moveaxis(T, leg, 1)
        shape = T.shape
        T = np.matmul(G, T.reshape(n, 2, -1)).reshape(shape)
        T = np.moveaxis(T, 1, leg)
    return T.reshape(n, 2 ** m) @ basis.B.conj()


def _product_vector(l: int, m: int):
    alpha = np.asarray(cg_isometry((l, m, l - m), GroupSpec("su2")))
    w = alpha[:, 0].reshape(m + 1, l - m + 1)
    U, s, Vh = np.linalg.svd(w)
    if s[1:].sum() > PRODUCT_TOL:
        raise ArithmeticError(f"top vector of H_{l} in H_{m} (x) H_{l - m} is not a product vector")
    return U[:, 0] * s[0], Vh[0, :].conj()


def haar_average_state(l: int, m: int, samples: int, seed: int = 0):
    """Monte Carlo Haar average of rotated product vectors from H_l inside H_m (x) H_{l-m}.

    Returns ``(average, distance)`` where ``distance`` is the Frobenius distance
    to the normalized covariant-frame Choi matrix of Phi_{l-m}^{l-bar, m}.
    """
    if not (0 <= m <= l):
        raise ValueError("need 0 <= m <= l")
    if samples < 1:
        raise ValueError("samples must be positive")
    e, f = _product_vector(l, m)
    G = np.stack([haar_su2(np.random.default_rng([seed, i])) for i in range(samples)])
    # pi(g^{-1}) = pi(g)*: act with the inverse elements
    Ginv = np.conj(np.swapaxes(G, 1, 2))
    E = _rep_apply(m, Ginv, e)
    F = _rep_apply(l - m, Ginv, f)
    P = np.einsum("ni,nj->nij", E, F).reshape(samples, -1)
    avg = P.T @ P.conj() / samples
    target = choi(build_channel("su2", (l - m, l, m), LEFT), normalized=True, frame="covariant")
    return avg, float(np.linalg.norm(avg - target))


def verify_degrading_identity(l: int, m: int, max_ambient: int | None = None) -> float:
    """Largest entry of |Choi(Phi_l^{m, (l-m)-bar} o Phi_{l+m}^{l, m-bar}) - Choi(Phi_{l+m}^{m, l-bar})|."""
    if not (0 <= m <= l):
        raise ValueError("need 0 <= m <= l")
    first = build_channel("su2", (l + m, l, m), RIGHT, max_ambient)
    degrade = build_channel("su2", (l, m, l - m), RIGHT, max_ambient)
    target = build_channel("su2", (l + m, m, l), RIGHT, max_ambient)
    lhs = choi(compose(degrade, first), normalized=True)
    rhs = choi(target, normalized=True)
    return float(np.abs(lhs - rhs).max())


def range_dimension(channel, tol: float = 1e-10) -> int:
    """Dimension of {Phi(X)} as X runs over all d_A x d_A matrices."""
    ops = kraus_operators(channel)
    S = sum(np.kron(K, K.conj()) for K in ops)
    s = np.linalg.svd(S, compute_uv=False)
    return int(np.sum(s > tol * max(s[0], 1.0)))


def purity(rho) -> float:
    rho = check_density_matrix(rho)
    return float(np.real(np.vdot(rho, rho)))
