"""Temperley-Lieb channels as Stinespring isometries.

Every channel is stored as an isometry ``V`` of shape ``(d_B * d_E, d_A)`` whose
codomain is ordered output first, environment second, so that
``apply(rho) = Tr_E(V rho V*)``. Kraus operators are the environment slices of
``V``. Choi matrices live on ``C^{d_B} (x) C^{d_A}`` (output first).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .qalg import AdmissibleTriple, GroupSpec, dim_irrep
from .tlrep import DEFAULT_MAX_AMBIENT, ISOMETRY_TOL, NumericalError, ResourceCapError, cg_isometry
from .validation import check_density_matrix, check_kraus, check_square

__all__ = [
    "StinespringChannel",
    "TLChannel",
    "apply",
    "build_channel",
    "choi",
    "choi_factor",
    "choi_theorem_deviation",
    "choi_theorem_factor",
    "choi_theorem_target",
    "complementary",
    "compose",
    "covariant_state",
    "kraus_operators",
    "lowrank_frobenius_distance",
    "tensor",
]

LEFT = "left"
RIGHT = "right"


def _parse_traced(traced) -> str:
    t = str(traced).strip().lower()
    if t not in (LEFT, RIGHT):
        raise ValueError(f"traced must be 'left' (trace H_l) or 'right' (trace H_m), got {traced!r}")
    return t


def _parse_group(group) -> GroupSpec:
    if isinstance(group, GroupSpec):
        return group
    return GroupSpec.parse(str(group))


@dataclass(frozen=True, eq=False)
class StinespringChannel:
    """A CPTP map given by an isometry V: C^{d_A} -> C^{d_B} (x) C^{d_E}."""

    V: np.ndarray
    d_B: int
    d_E: int

    def __post_init__(self):
        V = np.asarray(self.V, dtype=complex)
        if V.ndim != 2 or V.shape[0] != self.d_B * self.d_E:
            raise ValueError(f"V has shape {V.shape}, expected ({self.d_B * self.d_E}, d_A)")
        err = np.abs(V.conj().T @ V - np.eye(V.shape[1])).max()
        if err > ISOMETRY_TOL:
            raise NumericalError(f"Stinespring operator is not an isometry (error {err:.2e})")
        V.setflags(write=False)
        object.__setattr__(self, "V", V)

    @property
    def d_A(self) -> int:
        return self.V.shape[1]

    def apply_linear(self, X: np.ndarray) -> np.ndarray:
        """Tr_E(V X V*) for any d_A x d_A matrix X, or a stack of them."""
        X = np.asarray(X, dtype=complex)
        T = self.V.reshape(self.d_B, self.d_E, self.d_A)
        if X.ndim == 2:
            return np.einsum("bea,ac,dec->bd", T, X, T.conj(), optimize=True)
        return np.einsum("bea,nac,dec->nbd", T, X, T.conj(), optimize=True)

    def complementary(self) -> "StinespringChannel":
        T = self.V.reshape(self.d_B, self.d_E, self.d_A).transpose(1, 0, 2)
        return StinespringChannel(T.reshape(-1, self.d_A), self.d_E, self.d_B)

    def kraus(self) -> list[np.ndarray]:
        T = self.V.reshape(self.d_B, self.d_E, self.d_A)
        return [T[:, e, :].copy() for e in range(self.d_E)]


class TLChannel(TransformerMixin, BaseEstimator):
    """Temperley-Lieb channel built from the isometry alpha_k^{l,m}.

    ``traced="left"`` traces out H_l (output H_m); ``traced="right"`` traces out
    H_m (output H_l). ``fit`` assembles the Stinespring isometry and ignores
    its data argument; ``transform`` applies the channel to one density matrix
    or to a stack of shape ``(n, d_A, d_A)``.

    Examples
    --------
    >>> ch = TLChannel("su2", (1, 2, 1), "left").fit()
    >>> np.round(ch.transform(np.diag([1.0, 0.0])).real, 6)
    array([[0.333333, 0.      ],
           [0.      , 0.666667]])
    """

    def __init__(self, group="su2", triple=(0, 0, 0), traced="left", max_ambient=DEFAULT_MAX_AMBIENT):
        self.group = group
        self.triple = triple
        self.traced = traced
        self.max_ambient = max_ambient

    def fit(self, X=None, y=None):
        group = _parse_group(self.group)
        triple = AdmissibleTriple.coerce(self.triple)
        traced = _parse_traced(self.traced)
        alpha = np.asarray(cg_isometry(triple, group, self.max_ambient))
        d_l, d_m = dim_irrep(triple.l, group), dim_irrep(triple.m, group)
        if traced == RIGHT:
            V, d_B, d_E = alpha, d_l, d_m
        else:
            T = alpha.reshape(d_l, d_m, -1).transpose(1, 0, 2)
            V, d_B, d_E = T.reshape(d_l * d_m, -1), d_m, d_l
        self.group_ = group
        self.triple_ = triple
        self.traced_ = traced
        self.stinespring_ = StinespringChannel(V, d_B, d_E)
        self.d_A_ = self.stinespring_.d_A
        self.d_B_ = d_B
        self.d_E_ = d_E
        return self

    @property
    def V_(self) -> np.ndarray:
        check_is_fitted(self, "stinespring_")
        return self.stinespring_.V

    def transform(self, X):
        check_is_fitted(self, "stinespring_")
        X = np.asarray(X, dtype=complex)
        if X.ndim == 2:
            check_density_matrix(X, self.d_A_)
        elif X.ndim == 3:
            for rho in X:
                check_density_matrix(rho, self.d_A_)
        else:
            raise ValueError(f"expected a density matrix or a stack of them, got shape {X.shape}")
        return self.stinespring_.apply_linear(X)

    def complementary(self) -> "TLChannel":
        check_is_fitted(self, "stinespring_")
        flipped = RIGHT if self.traced_ == LEFT else LEFT
        return TLChannel(self.group_, tuple(self.triple_), flipped, self.max_ambient).fit()

    def kraus_operators(self) -> list[np.ndarray]:
        check_is_fitted(self, "stinespring_")
        return self.stinespring_.kraus()

    def choi(self, normalized: bool = True, frame: str = "standard") -> np.ndarray:
        return choi(self, normalized=normalized, frame=frame)

    def __repr__(self):
        return f"TLChannel(group={str(self.group)!r}, triple={tuple(self.triple)}, traced={self.traced!r})"


def build_channel(group, triple, traced, max_ambient: int | None = None) -> TLChannel:
    """Fitted :class:`TLChannel` for ``group`` and an admissible ``(k, l, m)``."""
    cap = DEFAULT_MAX_AMBIENT if max_ambient is None else max_ambient
    return TLChannel(group, tuple(AdmissibleTriple.coerce(triple)), traced, cap).fit()


def _stinespring(channel) -> StinespringChannel:
    if isinstance(channel, StinespringChannel):
        return channel
    if isinstance(channel, TLChannel):
        check_is_fitted(channel, "stinespring_")
        return channel.stinespring_
    raise TypeError(f"expected a channel, got {type(channel).__name__}")


def kraus_operators(channel) -> list[np.ndarray]:
    """Kraus list of a channel; a Kraus list passes through after validation."""
    if isinstance(channel, (TLChannel, StinespringChannel)):
        return _stinespring(channel).kraus()
    return check_kraus(channel)


def apply(channel, rho, validate: bool = True) -> np.ndarray:
    """Output state of ``channel`` on ``rho``.

    ``channel`` may be a TL channel, a Stinespring channel or a Kraus list.
    """
    if isinstance(channel, (TLChannel, StinespringChannel)):
        ch = _stinespring(channel)
        rho = check_density_matrix(rho, ch.d_A) if validate else check_square(rho, ch.d_A)
        return ch.apply_linear(rho)
    ops = kraus_operators(channel)
    rho = check_density_matrix(rho, ops[0].shape[1]) if validate else check_square(rho, ops[0].shape[1])
    return sum(K @ rho @ K.conj().T for K in ops)


def complementary(channel):
    if isinstance(channel, TLChannel):
        return channel.complementary()
    return _stinespring(channel).complementary()


def compose(second: Sequence[np.ndarray], first) -> list[np.ndarray]:
    """Kraus list of ``second o first``; ``second`` is a Kraus list or a channel."""
    outer = kraus_operators(second)
    inner = kraus_operators(first)
    if outer[0].shape[1] != inner[0].shape[0]:
        raise ValueError(
            f"cannot compose: first maps into dimension {inner[0].shape[0]}, "
            f"second expects {outer[0].shape[1]}")
    return check_kraus([L @ K for L in outer for K in inner])


def tensor(ch1, ch2, max_ambient: int | None = None) -> StinespringChannel:
    """Tensor product channel acting on C^{d_A1} (x) C^{d_A2}."""
    s1, s2 = _stinespring(ch1), _stinespring(ch2)
    cap = DEFAULT_MAX_AMBIENT if max_ambient is None else max_ambient
    rows = s1.V.shape[0] * s2.V.shape[0]
    if rows > cap:
        raise ResourceCapError(f"tensor channel dilation dimension {rows} exceeds cap {cap}")
    T1 = s1.V.reshape(s1.d_B, s1.d_E, s1.d_A)
    T2 = s2.V.reshape(s2.d_B, s2.d_E, s2.d_A)
    T = np.einsum("bea,cfg->bcefag", T1, T2)
    V = T.reshape(s1.d_B * s2.d_B * s1.d_E * s2.d_E, s1.d_A * s2.d_A)
    return StinespringChannel(V, s1.d_B * s2.d_B, s1.d_E * s2.d_E)


def _covariant_frame(channel: TLChannel) -> np.ndarray:
    # W = sqrt(d_A) * M where alpha_0^{k,k} = vec(M); the left-traced case needs M^T
    k = channel.triple_.k
    vec = np.asarray(cg_isometry((0, k, k), channel.group_, channel.max_ambient))[:, 0]
    d = channel.d_A_
    M = np.sqrt(d) * vec.reshape(d, d)
    return M.T if channel.traced_ == LEFT else M


MAX_DENSE_SIDE = 8192


def choi_factor(channel, frame: str = "standard") -> np.ndarray:
    """Matrix X with unnormalized Choi matrix X X*; columns are vectorized Kraus operators.

    X has shape ``(d_B * d_A, #Kraus)``, so rank and distances to low-rank
    targets can be computed without forming the dense Choi matrix.
    """
    if isinstance(channel, (TLChannel, StinespringChannel)):
        s = _stinespring(channel)
        d_B, d_A = s.d_B, s.d_A
        X = s.V.reshape(d_B, s.d_E, d_A).transpose(0, 2, 1).reshape(d_B * d_A, s.d_E)
    else:
        ops = kraus_operators(channel)
        d_B, d_A = ops[0].shape
        X = np.stack([K.reshape(-1) for K in ops], axis=1)
    if frame == "covariant":
        if not isinstance(channel, TLChannel):
            raise ValueError("the covariant frame is defined for TL channels only")
        W = _covariant_frame(channel)
        X = np.matmul(W, X.reshape(d_B, d_A, -1)).reshape(d_B * d_A, -1)
    elif frame != "standard":
        raise ValueError(f"unknown frame {frame!r}")
    return X


def choi(channel, normalized: bool = True, frame: str = "standard") -> np.ndarray:
    """Choi matrix sum_ij Phi(e_ij) (x) e_ij on output (x) input.

    ``normalized`` divides by d_A. ``frame="covariant"`` replaces the standard
    maximally entangled vector by the covariant one alpha_0^{k,k}: the channel
    acts on the first factor for left-traced channels and on the second factor
    for right-traced ones, with the reference moved to the second factor. In
    that frame the Choi matrix of a TL channel is a multiple of a covariant
    projector.
    """
    X = choi_factor(channel, frame)
    if X.shape[0] > MAX_DENSE_SIDE:
        raise ResourceCapError(
            f"dense Choi matrix of side {X.shape[0]} exceeds {MAX_DENSE_SIDE}; use choi_factor")
    d_A = _input_dim(channel)
    C = X @ X.conj().T
    return C / d_A if normalized else C


def _input_dim(channel) -> int:
    if isinstance(channel, (TLChannel, StinespringChannel)):
        return _stinespring(channel).d_A
    return kraus_operators(channel)[0].shape[1]


def choi_theorem_factor(channel: TLChannel) -> np.ndarray:
    """Isometry a whose range the covariant-frame Choi matrix projects onto.

    Left-traced Phi_k^{l-bar,m}: a = alpha_l^{m,k}. Right-traced
    Phi_k^{l,m-bar}: a = alpha_m^{k,l} with its two factors swapped into
    (output H_l, reference H_k) order.
    """
    check_is_fitted(channel, "stinespring_")
    k, l, m = channel.triple_
    g, cap = channel.group_, channel.max_ambient
    if channel.traced_ == LEFT:
        return np.asarray(cg_isometry((l, m, k), g, cap))
    a = np.asarray(cg_isometry((m, k, l), g, cap))
    d_k, d_l = channel.d_A_, channel.d_B_
    return a.reshape(d_k, d_l, -1).transpose(1, 0, 2).reshape(d_k * d_l, -1)


def choi_theorem_target(channel: TLChannel) -> np.ndarray:
    """Trace-normalized covariant projector a a* / rank predicted for the covariant-frame Choi."""
    a = choi_theorem_factor(channel)
    if a.shape[0] > MAX_DENSE_SIDE:
        raise ResourceCapError(f"dense target of side {a.shape[0]} exceeds {MAX_DENSE_SIDE}")
    return a @ a.conj().T / a.shape[1]


def lowrank_frobenius_distance(X: np.ndarray, Y: np.ndarray) -> float:
    """||X X* - Y Y*||_F evaluated inside the joint column space of X and Y."""
    R = np.linalg.qr(np.hstack([X, Y]), mode="r")
    Rx, Ry = R[:, : X.shape[1]], R[:, X.shape[1]:]
    return float(np.linalg.norm(Rx @ Rx.conj().T - Ry @ Ry.conj().T))


def choi_theorem_deviation(channel: TLChannel) -> tuple[float, int]:
    """Frobenius distance between the normalized covariant-frame Choi and its predicted projector,
    together with the numerical rank of the Choi matrix."""
    X = choi_factor(channel, "covariant") / np.sqrt(channel.d_A_)
    a = choi_theorem_factor(channel)
    Y = a / np.sqrt(a.shape[1])
    sv = np.linalg.svd(X, compute_uv=False)
    rank = int(np.sum(sv > 1e-8 * max(sv.max(), 1.0)))
    return lowrank_frobenius_distance(X, Y), rank


def covariant_state(i: int, k1: int, k2: int, group) -> np.ndarray:
    """rho_i^{k1,k2} = alpha_i^{k1,k2} alpha_i^{k1,k2}* / [i+1] on H_k1 (x) H_k2."""
    a = np.asarray(cg_isometry((i, k1, k2), _parse_group(group)))
    return a @ a.conj().T / a.shape[1]
