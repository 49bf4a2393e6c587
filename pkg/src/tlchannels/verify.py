"""Invariant suites run by ``tlchannels verify`` and the acceptance tests.

Each check yields a :class:`CheckResult`. Checks whose construction would
exceed the ambient cap are reported as ``skipped`` rather than failed.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass
from typing import Callable, Iterator

import numpy as np

from .channels import LEFT, RIGHT, build_channel, choi_theorem_deviation
from .qalg import GroupSpec, dim_irrep, is_admissible, quantum_integer
from .recoupling import (
    check_basis_change,
    check_rotated_basis_change,
    compare_spectra,
    lemma_deviation,
    tensor_output_spectrum_bruteforce,
    tensor_output_spectrum_formula,
)
from .structure import verify_degrading_identity
from .tlrep import (
    DEFAULT_MAX_AMBIENT,
    ResourceCapError,
    cg_isometry,
    check_ambient,
    cup_vector,
    jones_wenzl_projector,
)

__all__ = ["CheckResult", "SUITES", "run_suite", "default_groups"]

EXACT_TOL = 1e-10
CHANNEL_TOL = 1e-8


@dataclass(frozen=True)
class CheckResult:
    suite: str
    check: str
    group: str
    params: tuple
    status: str
    value: float | None
    tol: float

    def as_dict(self) -> dict:
        d = asdict(self)
        d["params"] = list(self.params)
        return d


def default_groups() -> list[tuple[GroupSpec, int]]:
    """Groups with the largest label each suite visits for them."""
    return [(GroupSpec("su2"), 6), (GroupSpec("onplus", 2), 6),
            (GroupSpec("onplus", 3), 5), (GroupSpec("onplus", 4), 4)]


def _triples(kmax: int):
    for k, l, m in itertools.product(range(kmax + 1), repeat=3):
        if is_admissible(k, l, m):
            yield k, l, m


def _snake(group, kmax, cap):
    N = group.N
    cup = cup_vector(group).reshape(N, N)
    eye = np.eye(N)
    # (cap (x) 1)(1 (x) cup) and (1 (x) cap)(cup (x) 1)
    left = (cup.conj() @ cup).T
    right = cup @ cup.conj()
    err = max(np.abs(left - group.snake_sign * eye).max(), np.abs(right - group.snake_sign * eye).max())
    yield "zigzag", (), lambda: err, EXACT_TOL


def _loop(group, kmax, cap):
    cup = cup_vector(group)
    yield "loop_value", (), lambda: abs(np.vdot(cup, cup) - group.loop_value), EXACT_TOL


def _projector(group, kmax, cap):
    for k in range(kmax + 1):
        def run(k=k):
            p = jones_wenzl_projector(k, group, cap)
            return max(np.abs(p @ p - p).max(), np.abs(p - p.conj().T).max(),
                       abs(np.trace(p).real - quantum_integer(k + 1, group.q)))
        yield "idempotent_selfadjoint_trace", (k,), run, 1e-9


def _jw_kills_cups(group, kmax, cap):
    N = group.N
    cup = cup_vector(group)
    for k in range(2, kmax + 1):
        def run(k=k):
            check_ambient(k, group, cap)
            p = jones_wenzl_projector(k, group, cap)
            worst = 0.0
            for i in range(k - 1):
                v = np.kron(np.kron(np.eye(N ** i), cup[:, None]), np.eye(N ** (k - i - 2)))
                worst = max(worst, np.abs(p @ v).max())
            return worst
        yield "jw_kills_cups", (k,), run, 1e-9


def _isometry(group, kmax, cap):
    for t in _triples(kmax):
        def run(t=t):
            a = np.asarray(cg_isometry(t, group, cap))
            return np.abs(a.conj().T @ a - np.eye(a.shape[1])).max()
        yield "alpha_isometry", t, run, EXACT_TOL


def _bistochastic(group, kmax, cap):
    for t in _triples(kmax):
        for traced in (LEFT, RIGHT):
            def run(t=t, traced=traced):
                ch = build_channel(group, t, traced, cap)
                worst = 0.0
                for s in (ch.stinespring_, ch.stinespring_.complementary()):
                    out = s.apply_linear(np.eye(s.d_A) / s.d_A)
                    worst = max(worst, np.abs(out - np.eye(s.d_B) / s.d_B).max())
                return worst
            yield f"bistochastic_{traced}", t, run, EXACT_TOL


def _choi(group, kmax, cap):
    for k, l, m in _triples(min(kmax, 5)):
        if l + m > 5:
            continue
        for traced in (LEFT, RIGHT):
            def run(t=(k, l, m), traced=traced):
                ch = build_channel(group, t, traced, cap)
                dist, rank = choi_theorem_deviation(ch)
                expected = dim_irrep(t[1] if traced == LEFT else t[2], group)
                return dist if rank == expected else float("inf")
            yield f"choi_{traced}", (k, l, m), run, CHANNEL_TOL


def _recoupling(group, kmax, cap):
    # four-point spaces grow like d^4, so large-N groups stop at label 2
    top = min(kmax, 3 if group.N == 2 else 2)
    for a, b, c, d in itertools.product(range(top + 1), repeat=4):
        for j in range(top + 1):
            if not (is_admissible(j, a, b) and is_admissible(j, d, c)):
                continue
            yield "basis_change", (a, b, c, d, j), \
                (lambda a=a, b=b, c=c, d=d, j=j: check_basis_change(a, b, c, d, j, group, cap)), 1e-9
            yield "rotated_basis_change", (a, b, c, d, j), \
                (lambda a=a, b=b, c=c, d=d, j=j: check_rotated_basis_change(a, b, c, d, j, group, cap)), 1e-9
            for i in range(top + 1):
                if is_admissible(i, a, d) and is_admissible(i, b, c):
                    yield "tet_lemma", (a, b, i, c, d, j), \
                        (lambda a=a, b=b, i=i, c=c, d=d, j=j: lemma_deviation(a, b, i, c, d, j, group, cap)), 1e-9


def _spectrum(group, kmax, cap):
    trips = list(_triples(min(kmax, 2)))
    for t1, t2 in itertools.product(trips, repeat=2):
        k1, k2 = t1[0], t2[0]
        for i in range(abs(k1 - k2), k1 + k2 + 1, 2):
            def run(i=i, t1=t1, t2=t2):
                f = tensor_output_spectrum_formula(i, (t1, t2), group, cap)
                b = tensor_output_spectrum_bruteforce(i, (t1, t2), group, cap)
                ok, err = compare_spectra(f, b, CHANNEL_TOL)
                return err if ok and not b.flagged else float("inf")
            yield "formula_vs_bruteforce", (i,) + t1 + t2, run, CHANNEL_TOL


def _degrading(group, kmax, cap):
    if group.kind != "su2":
        return
    for l, m in ((1, 1), (2, 1), (2, 2), (3, 2)):
        yield "degrading_identity", (l, m), \
            (lambda l=l, m=m: verify_degrading_identity(l, m, cap)), CHANNEL_TOL


SUITES: dict[str, Callable] = {
    "snake": _snake,
    "loop": _loop,
    "projector": _projector,
    "jw": _jw_kills_cups,
    "isometry": _isometry,
    "bistochastic": _bistochastic,
    "choi": _choi,
    "recoupling": _recoupling,
    "spectrum": _spectrum,
    "degrading": _degrading,
}

CATEGORICAL = ("snake", "loop", "projector", "jw", "isometry", "bistochastic")


def run_suite(suite: str = "all", groups=None, max_ambient: int | None = None) -> Iterator[CheckResult]:
    """Run one suite, ``"categorical"`` or ``"all"``, yielding results as they finish."""
    if suite == "all":
        names = tuple(SUITES)
    elif suite == "categorical":
        names = CATEGORICAL
    elif suite in SUITES:
        names = (suite,)
    else:
        raise ValueError(f"unknown suite {suite!r}; choose from all, categorical, {', '.join(SUITES)}")
    cap = DEFAULT_MAX_AMBIENT if max_ambient is None else max_ambient
    groups = default_groups() if groups is None else groups
    for name in names:
        for group, kmax in groups:
            for check, params, run, tol in SUITES[name](group, kmax, cap):
                try:
                    value = float(run())
                except ResourceCapError:
                    yield CheckResult(name, check, str(group), params, "skipped", None, tol)
                    continue
                status = "pass" if value <= tol else "fail"
                yield CheckResult(name, check, str(group), params, status, value, tol)
