"""Tetrahedral nets, quantum 6j-symbols and spectra of tensor-product channel outputs.

Sextuples are passed in reading order of the array [a b i; c d j]; a sextuple
is valid when (a,d,i), (b,c,i), (a,b,j) and (d,c,j) are all admissible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .channels import LEFT, RIGHT, build_channel, covariant_state, tensor
from .infoquant import PaperWitness, min_output_entropy
from .qalg import AdmissibilityError, AdmissibleTriple, GroupSpec, dim_irrep, is_admissible, quantum_integer, theta_net
from .tlrep import DEFAULT_MAX_AMBIENT, cg_isometry, check_ambient, three_vertex

__all__ = [
    "AdditivityReport",
    "SpectrumReport",
    "additivity_probe",
    "basis_change_coefficients",
    "check_basis_change",
    "check_rotated_basis_change",
    "compare_spectra",
    "h_diagram",
    "i_diagram",
    "lemma_deviation",
    "rotated_sign",
    "six_j",
    "tensor_output_spectrum_bruteforce",
    "tensor_output_spectrum_formula",
    "tet_net",
    "zero_eigenvalue_formula",
]

CLUSTER_GAP = 1e-7


def _is_valid_sextuple(a, b, i, c, d, j) -> bool:
    return all(is_admissible(*t) for t in ((i, a, d), (i, b, c), (j, a, b), (j, d, c)))


def _check_sextuple(a, b, i, c, d, j):
    for name, t in (("(a,d,i)", (i, a, d)), ("(b,c,i)", (i, b, c)),
                    ("(a,b,j)", (j, a, b)), ("(d,c,j)", (j, d, c))):
        if not is_admissible(*t):
            raise AdmissibilityError(f"sextuple [{a} {b} {i}; {c} {d} {j}]: triple {name} is not admissible")


def _vertex(k, l, m, group, max_ambient):
    # A_k^{l,m} as a (d_l, d_m, d_k) tensor
    A = np.asarray(three_vertex((k, l, m), group, max_ambient))
    return A.reshape(dim_irrep(l, group), dim_irrep(m, group), dim_irrep(k, group))


def _cup(j, group, max_ambient):
    d = dim_irrep(j, group)
    return np.asarray(three_vertex((0, j, j), group, max_ambient)).reshape(d, d)


def _h_tensor(a, b, c, d, j, group, max_ambient):
    # (1_b (x) A_0^{j,j}* (x) 1_c)(A_a^{b,j} (x) A_d^{j,c}) as [b, c, a, d]
    A1 = _vertex(a, b, j, group, max_ambient)
    A2 = _vertex(d, j, c, group, max_ambient)
    Z = _cup(j, group, max_ambient)
    left = np.einsum("bxa,xy->bya", A1, Z.conj())
    return np.einsum("bya,ycd->bcad", left, A2)


def h_diagram(a, b, c, d, j, group: GroupSpec, max_ambient: int | None = None) -> np.ndarray:
    """H-shaped basis element H_a (x) H_d -> H_b (x) H_c with horizontal edge j."""
    _check_pair(a, b, c, d, j, vertical=False)
    H = _h_tensor(a, b, c, d, j, group, max_ambient)
    db, dc, da, dd = H.shape
    return H.reshape(db * dc, da * dd)


def i_diagram(a, b, c, d, i, group: GroupSpec, max_ambient: int | None = None) -> np.ndarray:
    """I-shaped basis element A_i^{b,c}(A_i^{a,d})*: H_a (x) H_d -> H_b (x) H_c."""
    _check_pair(a, b, c, d, i, vertical=True)
    top = np.asarray(three_vertex((i, b, c), group, max_ambient))
    bottom = np.asarray(three_vertex((i, a, d), group, max_ambient))
    return top @ bottom.conj().T


def _check_pair(a, b, c, d, x, vertical):
    pairs = ((x, a, d), (x, b, c)) if vertical else ((x, a, b), (x, d, c))
    for t in pairs:
        AdmissibleTriple.coerce(t)


@lru_cache(maxsize=None)
def _tet(a, b, i, c, d, j, group, cap):
    H = _h_tensor(a, b, c, d, j, group, cap)
    Aad = _vertex(i, a, d, group, cap)
    Abc = _vertex(i, b, c, group, cap)
    val = np.einsum("bcad,adp,bcp->", H, Aad, Abc.conj())
    if abs(val.imag) > 1e-9 * max(1.0, abs(val.real)):
        raise ArithmeticError(f"tetrahedral net has imaginary part {val.imag:.3e}")
    return float(val.real)


def tet_net(a, b, i, c, d, j, group: GroupSpec, max_ambient: int | None = None) -> float:
    """Tet[a b i; c d j] = tau_i((A_i^{b,c})* (1 (x) (A_0^{j,j})* (x) 1)(A_a^{b,j} (x) A_d^{j,c}) A_i^{a,d})."""
    _check_sextuple(a, b, i, c, d, j)
    check_ambient(max(a, b, c, d, i, j), group, max_ambient)
    cap = DEFAULT_MAX_AMBIENT if max_ambient is None else max_ambient
    return _tet(a, b, i, c, d, j, group, cap)


def six_j(a, b, i, c, d, j, group: GroupSpec, max_ambient: int | None = None) -> float:
    """{a b i; c d j}_q = Tet[a b i; c d j] [i+1]_q / (theta_q(a,d,i) theta_q(b,c,i))."""
    q = group.q
    tet = tet_net(a, b, i, c, d, j, group, max_ambient)
    return tet * quantum_integer(i + 1, q) / (theta_net((i, a, d), q) * theta_net((i, b, c), q))


def _i_range(a, b, c, d):
    return [i for i in range(0, max(a + d, b + c) + 1) if is_admissible(i, a, d) and is_admissible(i, b, c)]


def check_basis_change(a, b, c, d, j, group: GroupSpec, max_ambient: int | None = None) -> float:
    """Max entry of |H_j - sum_i {a b i; c d j} I_i| as maps H_a (x) H_d -> H_b (x) H_c."""
    H = h_diagram(a, b, c, d, j, group, max_ambient)
    S = sum(six_j(a, b, i, c, d, j, group, max_ambient) * i_diagram(a, b, c, d, i, group, max_ambient)
            for i in _i_range(a, b, c, d))
    return float(np.abs(H - S).max())


def rotated_sign(a, b, c, i, j, group: GroupSpec) -> int:
    """Sign picked up by the i-term of the rotated identity: snake_sign^((a+b-j)/2 + (b+c-i)/2)."""
    return group.snake_sign ** ((a + b - j) // 2 + (b + c - i) // 2)


def check_rotated_basis_change(a, b, c, d, j, group: GroupSpec, max_ambient: int | None = None) -> float:
    """Max entry of |A_j^{a,b}(A_j^{d,c})* - sum_i s_i {a b i; c d j} H'_i| as maps H_d (x) H_c -> H_a (x) H_b.

    H'_i is the H-shaped diagram with strands d -> a and c -> b joined by an
    edge i, i.e. the quarter turn of the I-shaped basis element. For a
    symmetric F every s_i is 1; for SU(2) s_i is :func:`rotated_sign`.
    """
    for t in ((j, a, b), (j, d, c)):
        AdmissibleTriple.coerce(t)
    lhs = (np.asarray(three_vertex((j, a, b), group, max_ambient))
           @ np.asarray(three_vertex((j, d, c), group, max_ambient)).conj().T)
    rhs = np.zeros_like(lhs)
    for i in _i_range(a, b, c, d):
        rhs = rhs + (rotated_sign(a, b, c, i, j, group) * six_j(a, b, i, c, d, j, group, max_ambient)
                     * h_diagram(d, a, b, c, i, group, max_ambient))
    return float(np.abs(lhs - rhs).max())


def basis_change_coefficients(a, b, c, d, j, group: GroupSpec, max_ambient: int | None = None) -> dict:
    """Least-squares coordinates of H_j in the I_i basis, keyed by i."""
    H = h_diagram(a, b, c, d, j, group, max_ambient).reshape(-1)
    labels = _i_range(a, b, c, d)
    M = np.stack([i_diagram(a, b, c, d, i, group, max_ambient).reshape(-1) for i in labels], axis=1)
    coef, *_ = np.linalg.lstsq(M, H, rcond=None)
    return {i: complex(x) for i, x in zip(labels, coef)}


def lemma_deviation(a, b, i, c, d, j, group: GroupSpec, max_ambient: int | None = None) -> float:
    """Max entry of |B - (Tet / theta_q(i,b,c)) A_i^{b,c}| with B the tetrahedron opened along i."""
    tet = tet_net(a, b, i, c, d, j, group, max_ambient)
    H = _h_tensor(a, b, c, d, j, group, max_ambient)
    B = np.einsum("bcad,adp->bcp", H, _vertex(i, a, d, group, max_ambient))
    A = _vertex(i, b, c, group, max_ambient)
    return float(np.abs(B - tet / theta_net((i, b, c), group.q) * A).max())


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues of X_i grouped by the irreducible label l of H_m1 (x) H_l2."""

    entries: tuple
    source: str
    total_trace: float
    flagged: bool = False
    notes: tuple = field(default_factory=tuple)

    def as_rows(self) -> list[dict]:
        return [{"l": l, "eigenvalue": lam, "multiplicity": mult} for l, lam, mult in self.entries]

    def entropy(self) -> float:
        return float(-sum(mult * lam * math.log(lam) for _, lam, mult in self.entries if lam > 1e-12))


def _coerce_channels(triples):
    (k1, l1, m1), (k2, l2, m2) = (tuple(AdmissibleTriple.coerce(t)) for t in triples)
    return (k1, l1, m1), (k2, l2, m2)


def _output_labels(m1, l2):
    return [m1 + l2 - 2 * r for r in range(min(m1, l2) + 1)]


def _valid_or_zero(fn, *args):
    # terms whose sextuple is not admissible vanish
    if not _is_valid_sextuple(*args[:6]):
        return 0.0
    return fn(*args)


def tensor_output_spectrum_formula(i, triples, group: GroupSpec, max_ambient: int | None = None) -> SpectrumReport:
    """Closed-form eigenvalues lambda_{i,l} of X_i assembled from theta nets, Tet nets and 6j-symbols.

    The sum runs over the even labels j joining the two channel blocks. Each
    term is the rotated 6j coefficient of the input projector, one Tet net per
    partially traced vertex and a final 6j-symbol onto the output label l. For
    SU(2) the rotation and the two bent strands contribute snake signs.
    """
    (k1, l1, m1), (k2, l2, m2) = _coerce_channels(triples)
    AdmissibleTriple.coerce((i, k1, k2))
    q = group.q
    qi = lambda n: quantum_integer(n, q)  # noqa: E731
    th = lambda *t: theta_net(t, q)  # noqa: E731
    bent = group.snake_sign ** ((k1 + m1 - l1) // 2 + (k2 + l2 - m2) // 2)
    entries = []
    for l in _output_labels(m1, l2):
        pref = (bent * qi(k1 + 1) * qi(k2 + 1) * th(l, m1, l2)
                / (qi(l + 1) * th(k1, l1, m1) * th(k2, l2, m2) * th(i, k1, k2)))
        total = 0.0
        for t in range(min(k1, k2) + 1):
            j = 2 * t
            term = (_valid_or_zero(six_j, k1, k2, j, k2, k1, i, group, max_ambient)
                    * _valid_or_zero(tet_net, l1, m1, m1, j, k1, k1, group, max_ambient)
                    * _valid_or_zero(tet_net, k2, j, l2, l2, m2, k2, group, max_ambient)
                    * _valid_or_zero(six_j, m1, m1, l, l2, l2, j, group, max_ambient))
            if term:
                sign = rotated_sign(k1, k2, k2, j, i, group)
                total += sign * term / (th(m1, m1, j) * th(l2, j, l2))
        entries.append((l, pref * total, dim_irrep(l, group)))
    trace = float(sum(lam * mult for _, lam, mult in entries))
    return SpectrumReport(tuple(entries), "Formula", trace)


def zero_eigenvalue_formula(triples, group: GroupSpec, max_ambient: int | None = None) -> SpectrumReport:
    """Simplified eigenvalues of X_0 when k1 = k2 = k (maximally entangled covariant input)."""
    (k, l1, m1), (k2, l2, m2) = _coerce_channels(triples)
    if k != k2:
        raise ValueError("the simplified formula needs k1 = k2")
    q = group.q
    entries = []
    for l in _output_labels(m1, l2):
        if _is_valid_sextuple(m1, l1, l, m2, l2, k):
            tet = tet_net(m1, l1, l, m2, l2, k, group, max_ambient)
            lam = (quantum_integer(k + 1, q) * tet ** 2
                   / (theta_net((k, l1, m1), q) * theta_net((k, l2, m2), q)
                      * theta_net((l, m1, l2), q) * theta_net((l, l1, m2), q)))
        else:
            lam = 0.0
        entries.append((l, lam, dim_irrep(l, group)))
    trace = float(sum(lam * mult for _, lam, mult in entries))
    return SpectrumReport(tuple(entries), "Formula", trace)


def _x_i(i, triples, group, max_ambient):
    (k1, l1, m1), (k2, l2, m2) = _coerce_channels(triples)
    cap = DEFAULT_MAX_AMBIENT if max_ambient is None else max_ambient
    ch1 = build_channel(group, (k1, l1, m1), LEFT, cap)
    ch2 = build_channel(group, (k2, l2, m2), RIGHT, cap)
    rho = covariant_state(i, k1, k2, group)
    return tensor(ch1, ch2, cap).apply_linear(rho)


def tensor_output_spectrum_bruteforce(i, triples, group: GroupSpec, max_ambient: int | None = None,
                                      gap: float = CLUSTER_GAP) -> SpectrumReport:
    """Eigendecompose X_i = (Phi_{k1}^{l1-bar,m1} (x) Phi_{k2}^{l2,m2-bar})(rho_i^{k1,k2}) directly.

    Eigenvalues are clustered (consecutive gap above ``gap`` starts a new
    cluster) and each cluster's eigenspace is split among the isotypic
    subspaces alpha_l^{m1,l2} by the traces Tr(P_cluster P_l).
    """
    (k1, l1, m1), (k2, l2, m2) = _coerce_channels(triples)
    AdmissibleTriple.coerce((i, k1, k2))
    X = _x_i(i, triples, group, max_ambient)
    X = 0.5 * (X + X.conj().T)
    w, U = np.linalg.eigh(X)
    breaks = np.flatnonzero(np.diff(w) > gap) + 1
    clusters = np.split(np.arange(w.size), breaks)
    projectors = {l: np.asarray(cg_isometry((l, m1, l2), group, max_ambient)) for l in _output_labels(m1, l2)}
    entries, notes = [], []
    flagged = False
    gaps = np.diff([w[c].mean() for c in clusters])
    if gaps.size and gaps.min() < 10 * gap:
        flagged = True
        notes.append(f"clusters only {gaps.min():.2e} apart")
    for c in clusters:
        Uc = U[:, c]
        lam = float(w[c].mean())
        for l, a in projectors.items():
            overlap = float(np.linalg.norm(a.conj().T @ Uc) ** 2)
            mult = round(overlap)
            if abs(overlap - mult) > 1e-6:
                flagged = True
                notes.append(f"cluster at {lam:.3e} overlaps H_{l} by a non-integer {overlap:.6f}")
            if mult:
                entries.append((l, lam, mult))
    entries.sort(key=lambda e: (e[0], e[1]))
    trace = float(np.trace(X).real)
    return SpectrumReport(tuple(entries), "BruteForce", trace, flagged, tuple(notes))


def compare_spectra(first: SpectrumReport, second: SpectrumReport, tol: float = 1e-8):
    """Greedy match of (l, eigenvalue, multiplicity) entries.

    Returns ``(ok, max_eigenvalue_error)``; ``ok`` requires every entry to
    find a partner with the same label and multiplicity within ``tol``.
    """
    pool = list(second.entries)
    worst = 0.0
    ok = len(first.entries) == len(second.entries)
    for l, lam, mult in sorted(first.entries, key=lambda e: e[1]):
        candidates = [e for e in pool if e[0] == l and e[2] == mult]
        if not candidates:
            ok = False
            continue
        best = min(candidates, key=lambda e: abs(e[1] - lam))
        err = abs(best[1] - lam)
        worst = max(worst, err)
        ok = ok and err <= tol
        pool.remove(best)
    return ok and not pool, worst


@dataclass(frozen=True)
class AdditivityReport:
    H_Xi: float
    moe1: float
    moe2: float
    gap: float
    theory_gap: float

    def as_dict(self) -> dict:
        return {"H_Xi": self.H_Xi, "moe1": self.moe1, "moe2": self.moe2,
                "gap": self.gap, "theory_gap": self.theory_gap}


def additivity_probe(i, triples, group: GroupSpec, moe_strategy=None,
                     max_ambient: int | None = None) -> AdditivityReport:
    """Compare H(X_i) with single-channel minimum output entropy estimates.

    ``gap`` subtracts the numerical MOE estimates; ``theory_gap`` subtracts the
    asymptotic values r_1 ln N + r_2 ln N with r_j = (l_j + m_j - k_j)/2.
    """
    (k1, l1, m1), (k2, l2, m2) = _coerce_channels(triples)
    strategy = PaperWitness() if moe_strategy is None else moe_strategy
    spec = tensor_output_spectrum_formula(i, triples, group, max_ambient)
    H = spec.entropy()
    cap = DEFAULT_MAX_AMBIENT if max_ambient is None else max_ambient
    moe1 = min_output_entropy(build_channel(group, (k1, l1, m1), LEFT, cap), strategy).best_entropy
    moe2 = min_output_entropy(build_channel(group, (k2, l2, m2), RIGHT, cap), strategy).best_entropy
    r1, r2 = (l1 + m1 - k1) // 2, (l2 + m2 - k2) // 2
    theory = (r1 + r2) * math.log(group.N)
    return AdditivityReport(H, moe1, moe2, H - moe1 - moe2, H - theory)

