"""Tests for quantum strategies and the SeeSaw optimizer."""
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adcomm.catalog import SCENARIOS, reference
from adcomm.classical import ClassicalModel, classical_value, operational_relaxation
from adcomm.cli import bundled
from adcomm.quantum.discrimination import resource_value
from adcomm.quantum.seesaw import (
    classical_embedding,
    min_total_resource,
    mixed_total_resource,
    povm_step,
    random_strategy,
    seesaw,
    seesaw_samples,
    state_step,
)
from adcomm.quantum.states import haar_pure, kron_all
from adcomm.quantum.strategy import (
    QuantumStrategy,
    coefficient_tensor,
    evaluate,
    sender_operators,
    verify_strategy,
)
from adcomm.scenario import FigureOfMerit


def fom_of(key, name):
    spec = SCENARIOS[key]
    return spec, FigureOfMerit.parse(reference(key, name), spec)


def direct_value(spec, fom, states, povm):
    """Sum of coefficients times Born probabilities, entry by entry."""
    total = float(fom.constant)
    for z, xs, y in spec.iter_behavior():
        c = float(fom.coeffs[spec.index(z, xs, y)])
        if c:
            rho = kron_all([states[i][x] for i, x in enumerate(xs)])
            total += c * np.trace(povm[y][z] @ rho).real
    return total


@pytest.fixture(scope="module")
def i6_strategy():
    return QuantumStrategy.load(bundled("i6_strategy.json"))


class TestStrategy:
    """Evaluation, reduced operators and serialization."""

    @pytest.mark.parametrize("key,name", [("222", "r1"), ("322D", "I2"), ("224", "I6")])
    def test_evaluate_matches_born_rule(self, key, name):
        """The tensor evaluation agrees with an entry-by-entry Born rule."""
        spec, fom = fom_of(key, name)
        rng = np.random.default_rng(0)
        states = random_strategy(spec, 2, rng)
        C = coefficient_tensor(spec, fom)
        povm = povm_step(C, states)
        assert evaluate(C, float(fom.constant), states, povm) == pytest.approx(
            direct_value(spec, fom, states, povm), abs=1e-10)

    @pytest.mark.parametrize("i", [0, 1])
    def test_sender_operators(self, i):
        """The reduced operators reproduce the dependence on one sender's states."""
        spec, fom = fom_of("322D", "I1")
        rng = np.random.default_rng(1)
        states = random_strategy(spec, 2, rng)
        C = coefficient_tensor(spec, fom)
        povm = povm_step(C, states)
        K = sender_operators(C, states, povm, i)
        base = evaluate(C, 0.0, states, povm)
        new = [haar_pure(2, rng) for _ in states[i]]
        moved = [s if j != i else new for j, s in enumerate(states)]
        lhs = evaluate(C, 0.0, moved, povm) - base
        rhs = sum(np.trace(k @ (a - b)).real for k, a, b in zip(K, new, states[i]))
        assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_json_round_trip(self):
        """Strategies survive JSON serialization."""
        spec, fom = fom_of("222", "r1")
        states = random_strategy(spec, 2, np.random.default_rng(2))
        povm = povm_step(coefficient_tensor(spec, fom), states)
        s = QuantumStrategy(states, povm)
        t = QuantumStrategy.from_json(s.to_json())
        assert all(np.allclose(a, b) for sa, sb in zip(s.states, t.states) for a, b in zip(sa, sb))
        assert all(np.allclose(a, b) for a, b in zip(s.povm[0], t.povm[0]))

    def test_bundled_i6(self, i6_strategy):
        """The bundled sixth-expression strategy gives 1.4571 with exclusion 0.8536 per sender."""
        spec, fom = fom_of("224", "I6")
        out = verify_strategy(spec, fom, i6_strategy)
        assert out["value"] == pytest.approx(1.4571, abs=1e-4)
        assert out["audited_resources"] == pytest.approx((0.5 + math.sqrt(2) / 4,) * 2, abs=1e-7)

    def test_shape_mismatch(self, i6_strategy):
        """A strategy for the wrong scenario is rejected."""
        spec, fom = fom_of("322D", "I1")
        with pytest.raises(ValueError):
            verify_strategy(spec, fom, i6_strategy)


class TestStateStep:
    """Single-sender conic updates."""

    def test_unbounded_is_top_eigenvector(self):
        """At resource 1 each state is the top eigenvector of its operator."""
        rng = np.random.default_rng(3)
        K = [haar_pure(3, rng) - haar_pure(3, rng) for _ in range(3)]
        states, _ = state_step(K, [1 / 3] * 3, "D", 1.0, 3)
        for k, r in zip(K, states):
            assert np.trace(k @ r).real == pytest.approx(np.linalg.eigvalsh(k)[-1], abs=1e-10)

    @pytest.mark.parametrize("kind", ["D", "A"])
    @pytest.mark.parametrize("bound", [0.55, 0.7, 0.85])
    def test_bound_respected(self, kind, bound):
        """The audited resource of the new ensemble does not exceed the bound."""
        rng = np.random.default_rng(4)
        K = [haar_pure(2, rng) - 0.5 * haar_pure(2, rng) for _ in range(2)]
        states, res = state_step(K, [0.5, 0.5], kind, bound, 2)
        assert res <= bound + 1e-6
        assert resource_value(states, [0.5, 0.5], kind) <= bound + 1e-6

    def test_minimize_resource(self):
        """The resource-minimizing form meets its target."""
        rng = np.random.default_rng(5)
        K = [haar_pure(2, rng) for _ in range(3)]
        top = sum(np.linalg.eigvalsh(k)[-1] for k in K)
        states, res = state_step(K, [1 / 3] * 3, "D", 1.0, 2, target=0.9 * top)
        assert sum(np.trace(k @ r).real for k, r in zip(K, states)) >= 0.9 * top - 1e-6
        assert resource_value(states, [1 / 3] * 3, "D") == pytest.approx(res, abs=1e-6)


class TestSeeSaw:
    """Invariants of the alternating optimizer."""

    @pytest.mark.parametrize("key,name,res", [
        ("322D", "I1", (0.7, 0.6)),
        ("224", "I6", (0.85, 0.85)),
        ("322A", "r3", (0.8, 0.7)),
    ])
    def test_invariants(self, key, name, res):
        """Monotone trace, audited resources within bounds, between best vertex and relaxation."""
        spec, fom = fom_of(key, name)
        out = seesaw(spec, fom, res, d=2, restarts=3, seed=0)
        assert np.all(np.diff(out.trace) >= -1e-7)
        assert all(a <= r + 1e-6 for a, r in zip(out.audited_resources, res))
        assert out.value <= operational_relaxation(spec, fom, res) + 1e-6
        best, _ = ClassicalModel(spec, fom).best_vertex([Fraction(r).limit_denominator(1000) for r in res])
        if max(spec.n_m) <= 2:
            assert out.value >= float(best) - 1e-6

    def test_deterministic(self):
        """A fixed seed reproduces the value."""
        spec, fom = fom_of("224", "I7")
        a = seesaw(spec, fom, (0.8, 0.8), d=2, restarts=2, seed=11, max_sweeps=20)
        b = seesaw(spec, fom, (0.8, 0.8), d=2, restarts=2, seed=11, max_sweeps=20)
        assert a.value == b.value

    def test_i6_advantage(self):
        """At A = (0.85, 0.85) the sixth expression beats its classical bound 1.4."""
        spec, fom = fom_of("224", "I6")
        out = seesaw(spec, fom, (0.85, 0.85), d=2, restarts=4, seed=0)
        assert classical_value(spec, fom, ("17/20", "17/20")) == Fraction(7, 5)
        assert out.value > 1.44

    @pytest.mark.parametrize("res", [(0.4, 1.0), (1.0, 1.1)])
    def test_bad_resources(self, res):
        """Resources outside their range are rejected."""
        spec, fom = fom_of("222", "r1")
        with pytest.raises(ValueError):
            seesaw(spec, fom, res, d=2, restarts=1)

    def test_classical_embedding(self):
        """The embedded best vertex reproduces its classical value."""
        spec, fom = fom_of("322D", "I2")
        res = (0.8, 0.7)
        states, povm = classical_embedding(spec, fom, res, 4)
        C = coefficient_tensor(spec, fom)
        best, _ = ClassicalModel(spec, fom).best_vertex([Fraction(r).limit_denominator(1000) for r in res])
        assert evaluate(C, float(fom.constant), states, povm) == pytest.approx(float(best), abs=1e-10)

    def test_infeasible_restart_discarded(self):
        """A restart whose state steps stall near the gap tolerance cannot report an infeasible value."""
        spec = SCENARIOS["223"]
        fom = FigureOfMerit.parse("-2p(1|1,1)+p(1|1,2)+p(1|2,1)-p(2|1,1)+p(2|1,2)+p(2|2,1)-p(2|2,2)", spec)
        res = (8 / 9, 17 / 18)
        out = seesaw(spec, fom, res, d=2, restarts=2, seed=42)
        assert all(a <= r + 1e-6 for a, r in zip(out.audited_resources, res))
        assert out.value <= float(classical_value(spec, fom, ("8/9", "17/18"))) + 1e-6

    @given(a=st.integers(0, 4), b=st.integers(0, 4))
    @settings(max_examples=6, deadline=None)
    def test_no_violation_binary(self, a, b):
        """The (2,2,2) facet admits no quantum violation."""
        spec, fom = fom_of("222", "r1")
        res = (0.5 + a / 8, 0.5 + b / 8)
        out = seesaw(spec, fom, res, d=2, restarts=2, seed=a * 5 + b)
        exact = classical_value(spec, fom, [Fraction(r) for r in res])
        assert out.value <= float(exact) + 1e-5


class TestTotalResource:
    """Least quantum resource product reaching a target."""

    def test_binary_facet(self):
        """Reaching the maximum of the (2,2,2) facet needs D2 = 1 and D1 at its floor."""
        spec, fom = fom_of("222", "r1")
        out = min_total_resource(spec, fom, 0.999, d=2, restarts=3, seed=0)
        assert out.value >= 0.999 - 1e-5
        assert out.product == pytest.approx(0.4998, abs=2e-3)

    def test_reported_resources_audited(self):
        """The reported resources are those of the returned states."""
        spec, fom = fom_of("224", "I6")
        out = min_total_resource(spec, fom, 1.3, d=2, restarts=3, seed=0)
        aud = tuple(resource_value(s, [0.5, 0.5], "A") for s in out.strategy.states)
        assert aud == pytest.approx(out.resources, abs=1e-6)
        assert out.product == pytest.approx(math.prod(aud), abs=1e-6)
        assert out.value >= 1.3 - 1e-5


class TestMixedTotal:
    """Least product when strategies may be mixed with shared randomness."""

    def test_classical_only(self):
        """Without quantum samples the mixed total equals the classical total."""
        spec, fom = fom_of("224", "I6")
        out = mixed_total_resource(spec, fom, 1.02, np.empty((0, 3)))
        assert out.product == pytest.approx(0.51, abs=1e-6)
        assert out.quantum_weight == 0 and out.value >= 1.02 - 1e-9

    def test_dominating_sample(self):
        """A sample reaching S at the lowest resources is used alone."""
        spec, fom = fom_of("224", "I6")
        out = mixed_total_resource(spec, fom, 1.02, np.array([[1.02, 0.5, 0.5]]))
        assert out.product == pytest.approx(0.25, abs=1e-6)
        assert out.quantum_weight == pytest.approx(1.0)

    def test_samples(self):
        """Grid samples carry audited resources and respect the no-violation facet."""
        spec, fom = fom_of("222", "r1")
        X = seesaw_samples(spec, fom, points=2, d=2, restarts=1, seed=0)
        assert X.shape == (4, 3)
        assert np.all(X[:, 0] <= 2 * X[:, 2] - 1 + 1e-6)
