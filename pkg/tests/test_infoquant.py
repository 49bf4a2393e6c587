import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tlchannels.channels import LEFT, RIGHT, apply, build_channel
from tlchannels.infoquant import (
    CapacityBounds,
    Descent,
    Ensemble,
    PaperWitness,
    RandomPure,
    capacity_bounds,
    coherent_information,
    holevo_of_ensemble,
    min_output_entropy,
    moe_witness_state,
    q1_witness_state,
    theory_lower_bound,
    von_neumann_entropy,
)

probs = st.lists(st.floats(0.0, 1.0), min_size=1, max_size=6).filter(lambda p: sum(p) > 1e-3)


@given(probs)
def test_entropy_of_diagonal_states(p):
    p = np.asarray(p) / sum(p)
    expected = -sum(x * math.log(x) for x in p if x > 1e-12)
    assert von_neumann_entropy(np.diag(p)) == pytest.approx(expected, abs=1e-10)


@settings(max_examples=30)
@given(probs, st.integers(0, 2 ** 32 - 1))
def test_entropy_is_unitarily_invariant(p, seed):
    p = np.asarray(p) / sum(p)
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((p.size, p.size)) + 1j * rng.standard_normal((p.size, p.size)))
    rho = Q @ np.diag(p) @ Q.conj().T
    assert von_neumann_entropy(rho) == pytest.approx(von_neumann_entropy(np.diag(p)), abs=1e-9)


def test_entropy_rejects_non_states():
    with pytest.raises(ValueError):
        von_neumann_entropy(np.eye(2))
    with pytest.raises(ValueError):
        von_neumann_entropy(np.array([[0.5, 0.5], [0.0, 0.5]]))
    with pytest.raises(ValueError):
        von_neumann_entropy(np.diag([1.5, -0.5]))
    assert von_neumann_entropy(np.diag([1.0, 0.0])) == 0.0


def test_example_coherent_information():
    ch = build_channel("su2", (3, 3, 2), LEFT)
    rho = np.diag([0.25, 0.75, 0.0, 0.0])
    assert coherent_information(ch, rho) == pytest.approx(0.01924026, abs=1e-8)


def test_identity_channel():
    ch = build_channel("su2", (1, 1, 0), RIGHT)
    assert (ch.d_B_, ch.d_E_) == (2, 1)
    ens = Ensemble([0.5, 0.5], (np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))
    assert holevo_of_ensemble(ch, ens) == pytest.approx(math.log(2))
    assert coherent_information(ch, np.eye(2) / 2) == pytest.approx(math.log(2))
    assert min_output_entropy(ch, RandomPure(50, 0)).best_entropy == pytest.approx(0, abs=1e-10)


@pytest.mark.parametrize("N", [3, 4, 5])
@pytest.mark.parametrize("lm", [(1, 1), (2, 1), (2, 2)])
@pytest.mark.parametrize("traced", [LEFT, RIGHT])
def test_highest_weight_witnesses(N, lm, traced):
    l, m = lm
    ch = build_channel(f"onplus:{N}", (l + m, l, m), traced)
    report = min_output_entropy(ch)
    assert report.best_entropy == pytest.approx(0.0, abs=1e-10)
    assert isinstance(report.strategy, PaperWitness)
    rho = q1_witness_state(ch)
    kept = m if traced == LEFT else l
    assert coherent_information(ch, rho) == pytest.approx(kept * math.log(N - 1), abs=1e-9)
    assert abs(np.trace(rho) - 1) < 1e-12


@pytest.mark.parametrize("N", [3, 6])
def test_witness_on_lower_weights(N):
    ch = build_channel(f"onplus:{N}", (1, 2, 1), RIGHT)
    H = von_neumann_entropy(apply(ch, moe_witness_state(ch)))
    assert theory_lower_bound(ch) - 1e-12 <= H <= math.log(ch.d_B_)
    assert q1_witness_state(ch).shape == (3 if N == 3 else 6,) * 2


def test_witness_needs_onplus():
    ch = build_channel("su2", (2, 1, 1), LEFT)
    with pytest.raises(ValueError):
        moe_witness_state(ch)
    with pytest.raises(ValueError):
        q1_witness_state(ch)
    report = min_output_entropy(ch)
    assert isinstance(report.strategy, RandomPure)


def test_search_strategies_are_reproducible_and_bounded():
    ch = build_channel("onplus:3", (2, 2, 2), RIGHT)
    a = min_output_entropy(ch, RandomPure(300, 5))
    b = min_output_entropy(ch, RandomPure(300, 5))
    assert a.best_entropy == b.best_entropy
    np.testing.assert_array_equal(a.argmin, b.argmin)
    d = min_output_entropy(ch, Descent(iters=100, seed=5, samples=300))
    assert d.best_entropy <= a.best_entropy + 1e-12
    assert d.best_entropy >= d.theory_lower - 1e-9
    assert d.theory_upper_hint == pytest.approx(math.log(3))
    assert set(d.as_dict()) >= {"best_entropy", "strategy", "theory_lower", "theory_upper_hint"}
    rho = d.argmin
    assert von_neumann_entropy(apply(ch, rho)) == pytest.approx(d.best_entropy, abs=1e-9)


def test_theory_lower_bound_tends_to_r_log_n():
    for N in (10, 40):
        ch = build_channel(f"onplus:{N}", (1, 2, 1), LEFT)
        assert abs(theory_lower_bound(ch) - math.log(N)) < 2 / N ** 2


@pytest.mark.parametrize("group,triple", [("su2", (3, 3, 2)), ("onplus:3", (1, 2, 1)), ("onplus:4", (2, 2, 2))])
@pytest.mark.parametrize("traced", [LEFT, RIGHT])
def test_capacity_sandwich(group, triple, traced):
    ch = build_channel(group, triple, traced)
    b = capacity_bounds(ch)
    assert isinstance(b, CapacityBounds)
    dA, dB, dE = ch.d_A_, ch.d_B_, ch.d_E_
    assert b.q1_lower == pytest.approx(math.log(dB / dE))
    assert b.c_upper == pytest.approx(min(math.log(dA), math.log(dB), math.log(dA * dB / dE)))
    assert b.q1_lower <= b.c_upper
    # the maximally mixed input attains the lower bound exactly
    assert coherent_information(ch, np.eye(dA) / dA) == pytest.approx(b.q1_lower, abs=1e-10)


def test_ensemble_validation():
    with pytest.raises(ValueError):
        Ensemble([0.5, 0.6], (np.eye(2) / 2, np.eye(2) / 2))
    with pytest.raises(ValueError):
        Ensemble([1.0], (np.eye(2) / 2, np.eye(2) / 2))
    with pytest.raises(ValueError):
        Ensemble([0.5, 0.5], (np.eye(2) / 2, np.eye(3) / 3))
    ens = Ensemble([1.0], (np.eye(3) / 3,))
    with pytest.raises(ValueError):
        holevo_of_ensemble(build_channel("su2", (1, 1, 0), RIGHT), ens)
