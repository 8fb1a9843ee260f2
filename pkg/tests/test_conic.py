"""Tests for the conic solver, states and optimal measurements."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adcomm.quantum.conic import GAP_TOL, ConicError, ConicProblem, Infeasible, conic_solve
from adcomm.quantum.discrimination import (
    antidistinguishability,
    best_povm,
    distinguishability,
    helstrom_antidist_two,
    resource_value,
)
from adcomm.quantum.states import (
    POVM,
    DensityMatrix,
    InvalidPOVM,
    InvalidState,
    NonUnit,
    check_unit,
    haar_pure,
    proj,
)

KET0 = np.array([1, 0], dtype=complex)
KETP = np.array([1, 1], dtype=complex) / np.sqrt(2)


def random_ket(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_herm(rng, d):
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return A + A.conj().T


class TestConicSolver:
    """Small SDPs with closed-form answers."""

    def test_trace_below_identity(self):
        """max Tr X subject to X <= I in dimension 2 is 2."""
        p = ConicProblem("max")
        X = p.psd("X", 2)
        p.add_objective(p.trace(X))
        p.add_psd([(-1.0, X)], np.eye(2))
        sol = conic_solve(p)
        assert sol.optimum == pytest.approx(2.0, abs=1e-8)
        assert sol.gap <= GAP_TOL

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_largest_eigenvalue(self, d):
        """max <W, X> over density matrices is the top eigenvalue."""
        W = random_herm(np.random.default_rng(d), d)
        p = ConicProblem("max")
        X = p.psd("X", d)
        p.add_objective(p.inner(X, W))
        p.add_eq(p.trace(X), 1.0)
        sol = conic_solve(p)
        assert sol.optimum == pytest.approx(np.linalg.eigvalsh(W)[-1], abs=1e-7)
        assert sol.gap <= GAP_TOL

    @pytest.mark.parametrize("d", [2, 4])
    def test_smallest_eigenvalue(self, d):
        """min <W, X> over density matrices is the bottom eigenvalue."""
        W = random_herm(np.random.default_rng(10 + d), d)
        p = ConicProblem("min")
        X = p.psd("X", d)
        p.add_objective(p.inner(X, W))
        p.add_eq(p.trace(X), 1.0)
        assert conic_solve(p).optimum == pytest.approx(np.linalg.eigvalsh(W)[0], abs=1e-7)

    def test_scalar_lp(self):
        """A pure LP: max x + 2y with x + y <= 3, y <= 1."""
        p = ConicProblem("max")
        x, y = p.nonneg("x"), p.nonneg("y")
        p.add_objective(p.var(x) + p.var(y, 2.0))
        p.add_le(p.var(x) + p.var(y), 3.0)
        p.add_le(p.var(y), 1.0)
        sol = conic_solve(p)
        assert sol.optimum == pytest.approx(4.0, abs=1e-7)
        assert sol.values["y"] == pytest.approx(1.0, abs=1e-6)

    def test_objective_constant(self):
        """Constants are added to the optimum."""
        p = ConicProblem("max")
        X = p.psd("X", 1)
        p.add_objective(p.trace(X), constant=0.5)
        p.add_eq(p.trace(X), 1.0)
        assert conic_solve(p).optimum == pytest.approx(1.5)

    def test_infeasible(self):
        """A PSD block with negative trace is infeasible."""
        p = ConicProblem("max")
        X = p.psd("X", 2)
        p.add_objective(p.trace(X))
        p.add_eq(p.trace(X), -1.0)
        with pytest.raises((Infeasible, ConicError)):
            conic_solve(p)

    def test_duplicate_names(self):
        """Variable names are unique."""
        p = ConicProblem()
        p.psd("X", 2)
        with pytest.raises(ValueError):
            p.nonneg("X")


class TestStates:
    """Validation of states and measurements."""

    @pytest.mark.parametrize("A", [
        np.array([[1, 1], [0, 0]]),
        np.diag([1.5, -0.5]),
        np.diag([0.5, 0.4]),
        np.ones((2, 3)) / 2,
    ])
    def test_invalid_state(self, A):
        """Non-Hermitian, negative, unnormalized and non-square matrices are rejected."""
        with pytest.raises(InvalidState):
            DensityMatrix(A)

    def test_non_unit(self):
        """Kets must be normalized."""
        with pytest.raises(NonUnit):
            check_unit([1, 1])

    @pytest.mark.parametrize("els", [
        [np.eye(2), np.eye(2)],
        [np.diag([1.5, 1.0]), np.diag([-0.5, 0.0])],
        [np.eye(2), np.zeros((3, 3))],
    ])
    def test_invalid_povm(self, els):
        """Elements must be PSD, share a shape and sum to the identity."""
        with pytest.raises(InvalidPOVM):
            POVM(els)

    def test_haar_pure(self):
        """Sampled states are rank-one density matrices."""
        rho = haar_pure(3, np.random.default_rng(0))
        assert DensityMatrix(rho).dim == 3
        assert np.linalg.matrix_rank(rho, tol=1e-9) == 1


class TestDiscrimination:
    """Distinguishability and exclusion."""

    def test_helstrom(self):
        """|0> against |+> is distinguished with probability 0.85355."""
        res = distinguishability([KET0, KETP])
        assert res.value == pytest.approx(0.5 * (1 + 1 / np.sqrt(2)), abs=1e-8)
        assert res.value == pytest.approx(0.85355, abs=1e-5)
        assert res.gap <= GAP_TOL
        POVM(res.povm)

    def test_orthonormal_basis(self):
        """Orthonormal states are perfectly distinguishable."""
        assert distinguishability(list(np.eye(3))).value == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_identical_states(self, n):
        """Identical states give the largest prior, and exclusion 1 - 1/n."""
        rho = [proj(KET0)] * n
        assert distinguishability(rho).value == pytest.approx(1 / n, abs=1e-8)
        assert antidistinguishability(rho).value == pytest.approx(1 - 1 / n, abs=1e-8)

    def test_trine_exclusion(self):
        """The qubit trine is perfectly excludable."""
        kets = [np.array([np.cos(t), np.sin(t)]) for t in (0, 2 * np.pi / 3, 4 * np.pi / 3)]
        assert antidistinguishability(kets).value == pytest.approx(1.0, abs=1e-7)

    def test_priors(self):
        """Skewed priors on identical states give the largest prior."""
        rho = [proj(KET0)] * 2
        assert distinguishability(rho, [0.7, 0.3]).value == pytest.approx(0.7, abs=1e-8)
        with pytest.raises(ValueError):
            distinguishability(rho, [0.7, 0.7])

    @given(seed=st.integers(0, 10 ** 6))
    @settings(max_examples=25, deadline=None)
    def test_two_states_closed_form(self, seed):
        """For two pure states the SDP matches the closed form and D = A."""
        rng = np.random.default_rng(seed)
        a, b = random_ket(rng, 3), random_ket(rng, 3)
        ref = helstrom_antidist_two(a, b)
        assert distinguishability([a, b]).value == pytest.approx(ref, abs=1e-7)
        assert antidistinguishability([a, b]).value == pytest.approx(ref, abs=1e-7)

    @given(seed=st.integers(0, 10 ** 6), n=st.integers(2, 4))
    @settings(max_examples=20, deadline=None)
    def test_auto_matches_sdp(self, seed, n):
        """The support-restricted path agrees with the full SDP and stays in range."""
        rng = np.random.default_rng(seed)
        rho = [haar_pure(3, rng) for _ in range(n)]
        W = [r / n for r in rho]
        auto = best_povm(W, "auto").value
        full = best_povm(W, "sdp").value
        assert auto == pytest.approx(full, abs=1e-7)
        assert 1 / n - 1e-9 <= full <= 1 + 1e-9
        assert 1 - 1 / n - 1e-9 <= resource_value(rho, None, "A") <= 1 + 1e-9
