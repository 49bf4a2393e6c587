"""Acceptance criteria 1-11, each printing one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the summary lines are
printed even when output capture is on.
"""

import itertools
import math
import time

import numpy as np
import pytest

from tlchannels import (
    LEFT,
    RIGHT,
    GroupSpec,
    apply,
    build_channel,
    choi_theorem_deviation,
    coherent_information,
    compare_spectra,
    dim_irrep,
    moe_witness_state,
    ppt_check,
    purity,
    q1_witness_state,
    quantum_integer,
    range_dimension,
    tensor_output_spectrum_bruteforce,
    tensor_output_spectrum_formula,
    theta_net,
    verify_degrading_identity,
    von_neumann_entropy,
)
from tlchannels.qalg import is_admissible
from tlchannels.structure import haar_average_state
from tlchannels.verify import run_suite


@pytest.fixture
def report(capsys):
    def _report(number: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    return _report


def _triples(kmax):
    return [t for t in itertools.product(range(kmax + 1), repeat=3) if is_admissible(*t)]


def test_01_example_reproduction(report):
    t0 = time.perf_counter()
    rho = np.diag([0.25, 0.75, 0.0, 0.0])
    left = build_channel("su2", (3, 3, 2), LEFT)
    right = build_channel("su2", (3, 3, 2), RIGHT)
    out_left, out_right = apply(left, rho), apply(right, rho)
    spec_left = np.sort(np.linalg.eigvalsh(out_left))
    spec_right = np.sort(np.linalg.eigvalsh(out_right))
    diff = von_neumann_entropy(out_left) - von_neumann_entropy(out_right)
    elapsed = time.perf_counter() - t0
    ok = (abs(diff - 0.0192) <= 5e-4
          and np.allclose(spec_left, [0.2, 0.3, 0.5], atol=1e-8, rtol=0)
          and np.allclose(spec_right, [0.0, 0.15, 0.4, 0.45], atol=1e-8, rtol=0)
          and elapsed < 1.0)
    report(1, ok, f"entropy difference {diff:.6f} nats, {elapsed:.3f}s")
    assert abs(diff - 0.0192) <= 5e-4
    np.testing.assert_allclose(spec_left, [0.2, 0.3, 0.5], atol=1e-8, rtol=0)
    np.testing.assert_allclose(spec_right, [0.0, 0.15, 0.4, 0.45], atol=1e-8, rtol=0)
    assert elapsed < 1.0
    # the complement of the left-traced channel is the right-traced one
    assert abs(coherent_information(left, rho) - diff) < 1e-12


def test_02_non_tro_test_vectors(report):
    ch = build_channel("su2", (1, 2, 1), LEFT)
    # |1> is the first weight vector; basis labels start at 1
    out = apply(ch, np.diag([1.0, 0.0]))
    p = purity(out)
    rdim = range_dimension(ch)
    ok = (np.abs(out - np.diag([1 / 3, 2 / 3])).max() <= 1e-10 and abs(p - 5 / 9) <= 1e-10 and rdim == 4)
    report(2, ok, f"output diag {np.real(np.diag(out)).round(12).tolist()}, purity {p:.12f}, range dim {rdim}")
    np.testing.assert_allclose(out, np.diag([1 / 3, 2 / 3]), atol=1e-10)
    assert abs(p - 5 / 9) <= 1e-10
    assert rdim == 4


def test_03_choi_theorem(report):
    t0 = time.perf_counter()
    worst, checked, bad = 0.0, 0, []
    for group in ("su2", "onplus:2", "onplus:3", "onplus:4"):
        g = GroupSpec.parse(group)
        for k, l, m in _triples(5):
            if l + m > 5:
                continue
            for traced in (LEFT, RIGHT):
                dist, rank = choi_theorem_deviation(build_channel(g, (k, l, m), traced))
                expected = dim_irrep(l if traced == LEFT else m, g)
                worst = max(worst, dist)
                checked += 1
                if dist > 1e-8 or rank != expected:
                    bad.append((group, (k, l, m), traced, dist, rank, expected))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 30
    report(3, ok, f"{checked} channels, max Frobenius distance {worst:.2e}, {elapsed:.1f}s")
    assert not bad, bad[:5]
    assert elapsed < 30


def test_04_highest_weight_moe(report):
    worst = 0.0
    for N, (l, m), traced in itertools.product((3, 4, 5), ((1, 1), (2, 1)), (LEFT, RIGHT)):
        ch = build_channel(f"onplus:{N}", (l + m, l, m), traced)
        worst = max(worst, von_neumann_entropy(apply(ch, moe_witness_state(ch))))
    report(4, worst <= 1e-8, f"max witness output entropy {worst:.2e}")
    assert worst <= 1e-8


def test_05_highest_weight_q1(report):
    slack = math.inf
    for N, (l, m) in itertools.product((3, 4, 5), ((1, 1), (2, 1))):
        ch = build_channel(f"onplus:{N}", (l + m, l, m), LEFT)
        ci = coherent_information(ch, q1_witness_state(ch))
        slack = min(slack, ci - m * math.log(N - 1))
    report(5, slack >= -1e-8, f"min of coherent info - m ln(N-1): {slack:.2e}")
    assert slack >= -1e-8


def test_06_asymptotic_trend_and_lemma(report):
    gaps = {}
    for traced in (LEFT, RIGHT):
        gaps[traced] = []
        for N in (5, 10, 20):
            ch = build_channel(f"onplus:{N}", (1, 2, 1), traced)
            H = von_neumann_entropy(apply(ch, moe_witness_state(ch)))
            gaps[traced].append(abs(H - math.log(N)))
    decreasing = all(g[0] > g[1] > g[2] and g[2] <= 0.5 for g in gaps.values())
    q = GroupSpec("onplus", 40).q

    def ratio_gap(k, l, m):
        return abs(40 ** ((l + m - k) // 2) * quantum_integer(k + 1, q) / theta_net((k, l, m), q) - 1)

    lemma = max([ratio_gap(1, 2, 1)] + [ratio_gap(*t) for t in _triples(3)])
    ok = decreasing and lemma <= 4 / 40 ** 2
    report(6, ok, f"|H - ln N| at N=5,10,20: {[round(x, 6) for x in gaps[LEFT]]}; "
                  f"lemma gap {lemma:.2e} <= {4 / 1600:.2e}")
    assert decreasing
    assert lemma <= 4 / 40 ** 2


def test_07_ppt_characterization(report):
    t0 = time.perf_counter()
    wrong, indeterminate, count = [], 0, 0
    for k, l, m in _triples(5):
        if l < m:
            continue
        for traced in (LEFT, RIGHT):
            rep = ppt_check(build_channel("su2", (k, l, m), traced))
            count += 1
            indeterminate += rep.status == "indeterminate"
            expected = (k == 0) if traced == RIGHT else (k == l - m)
            if rep.is_ppt != expected or rep.status == "indeterminate":
                wrong.append(((k, l, m), traced, rep.min_eigenvalue))
    for N, (l, m), traced in itertools.product((3, 4), ((1, 1), (2, 1)), (LEFT, RIGHT)):
        rep = ppt_check(build_channel(f"onplus:{N}", (l + m, l, m), traced))
        count += 1
        if rep.status != "not_ppt":
            wrong.append((f"onplus:{N}", (l + m, l, m), traced, rep.min_eigenvalue))
    elapsed = time.perf_counter() - t0
    ok = not wrong and elapsed < 120
    report(7, ok, f"{count} channels, {len(wrong)} mismatches, {indeterminate} indeterminate, {elapsed:.1f}s")
    assert not wrong, wrong[:5]
    assert elapsed < 120


def test_08_degrading_identity(report):
    devs = {lm: verify_degrading_identity(*lm) for lm in ((1, 1), (2, 1), (2, 2), (3, 2))}
    worst = max(devs.values())
    report(8, worst <= 1e-8, f"max Choi deviation {worst:.2e}")
    assert worst <= 1e-8


def test_09_recoupling_oracle(report):
    t0 = time.perf_counter()
    trips = _triples(2)
    bad, count, worst = [], 0, 0.0
    for group in ("su2", "onplus:3"):
        g = GroupSpec.parse(group)
        for t1, t2 in itertools.product(trips, repeat=2):
            k1, k2 = t1[0], t2[0]
            for i in range(abs(k1 - k2), k1 + k2 + 1, 2):
                f = tensor_output_spectrum_formula(i, (t1, t2), g)
                b = tensor_output_spectrum_bruteforce(i, (t1, t2), g)
                ok, err = compare_spectra(f, b, 1e-8)
                dims_ok = all(mult == dim_irrep(l, g) for l, _, mult in f.entries)
                count += 1
                worst = max(worst, err)
                if not (ok and dims_ok) or b.flagged:
                    bad.append((group, i, t1, t2, err))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 120
    report(9, ok, f"{count} spectra, max eigenvalue error {worst:.2e}, {elapsed:.1f}s")
    assert not bad, bad[:5]
    assert elapsed < 120


def test_10_haar_separability(report):
    details, ok = [], True
    for l, m in ((1, 1), (2, 1)):
        _, d_small = haar_average_state(l, m, 100, seed=7)
        _, d_large = haar_average_state(l, m, 10_000, seed=7)
        ok &= d_large <= 5 / math.sqrt(10_000) and d_large < d_small
        details.append(f"({l},{m}): {d_small:.4f} -> {d_large:.5f}")
    report(10, ok, "; ".join(details))
    assert ok


def test_11_categorical_suite(report):
    t0 = time.perf_counter()
    results = list(run_suite("categorical"))
    elapsed = time.perf_counter() - t0
    failed = [r for r in results if r.status != "pass"]
    ok = not failed and elapsed < 60
    report(11, ok, f"{len(results)} checks, {len(failed)} not passing, {elapsed:.1f}s")
    assert not failed, failed[:5]
    assert elapsed < 60
