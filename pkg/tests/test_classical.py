"""Tests for classical values, total resources and the operational relaxation."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from adcomm.catalog import SCENARIOS, reference
from adcomm.classical import (
    ClassicalModel,
    InfeasibleResources,
    Unachievable,
    classical_total,
    classical_value,
    operational_relaxation,
)
from adcomm.exact_lp import LPInfeasible, LPUnbounded, solve_lp
from adcomm.scenario import FigureOfMerit, extended_vertices


def fom_of(key, name):
    spec = SCENARIOS[key]
    return spec, FigureOfMerit.parse(reference(key, name), spec)


def float_oracle(spec, fom, resources):
    """Mixture LP over all extended vertices, solved in floating point."""
    ev = extended_vertices(spec)
    vals = ev.behaviors @ fom.array() + float(fom.constant)
    out = linprog(-vals, A_ub=ev.resources.T, b_ub=[float(r) for r in resources],
                  A_eq=np.ones((1, len(vals))), b_eq=[1.0], bounds=(0, None), method="highs")
    return -out.fun


def brute_single_vertex(spec, fom, resources):
    ev = extended_vertices(spec)
    vals = ev.behaviors @ fom.array() + float(fom.constant)
    ok = np.all(ev.resources <= np.array([float(r) for r in resources]) + 1e-12, axis=1)
    return vals[ok].max()


class TestExactLP:
    """Rational simplex."""

    def test_small(self):
        """max x + y on the unit simplex scaled by 3/2."""
        out = solve_lp([1, 1], [[1, 1]], [Fraction(3, 2)], maximize=True)
        assert out.value == Fraction(3, 2)

    def test_infeasible(self):
        """x >= 1 and x <= 0 has no solution."""
        with pytest.raises(LPInfeasible):
            solve_lp([1], [[1], [-1]], [0, -1])

    def test_unbounded(self):
        """max x with no upper bound."""
        with pytest.raises(LPUnbounded):
            solve_lp([1], [[-1]], [0])


class TestClassicalValue:
    """Exact classical values."""

    @pytest.mark.parametrize("D2,expected", [(1, 1), (Fraction(1, 2), 0), (Fraction(3, 4), Fraction(1, 2))])
    def test_binary_facet(self, D2, expected):
        """The (2,2,2) facet is saturated: the value is 2 D2 - 1."""
        spec, fom = fom_of("222", "r1")
        assert classical_value(spec, fom, (1, D2)) == expected

    def test_i4_at_lower_bound(self):
        """With D1 at its lower bound the fourth expression is zero."""
        spec, fom = fom_of("322D", "I4")
        assert classical_value(spec, fom, (Fraction(1, 3), 1)) == 0

    def test_below_bound(self):
        """Resources below their lower bound are infeasible."""
        spec, fom = fom_of("222", "r1")
        with pytest.raises(InfeasibleResources):
            classical_value(spec, fom, (Fraction(1, 3), 1))

    def test_exact_type(self):
        """Exact inputs give an exact Fraction."""
        spec, fom = fom_of("322D", "I1")
        assert isinstance(classical_value(spec, fom, ("7/10", "3/5")), Fraction)

    @pytest.mark.parametrize("key,name", [("322D", "I1"), ("322D", "I2"), ("224", "I6"), ("322A", "r3")])
    @given(a=st.integers(0, 20), b=st.integers(0, 20))
    @settings(max_examples=10, deadline=None)
    def test_slice_consistency(self, key, name, a, b):
        """The exact LP agrees with a float LP and dominates the best single vertex."""
        spec, fom = fom_of(key, name)
        res = []
        for i, t in enumerate((a, b)):
            lo, _ = spec.resource_bounds(i)
            res.append(lo + (1 - lo) * Fraction(t, 20))
        exact = classical_value(spec, fom, res)
        assert float(exact) == pytest.approx(float_oracle(spec, fom, res), abs=1e-9)
        assert float(exact) >= brute_single_vertex(spec, fom, res) - 1e-12

    @pytest.mark.parametrize("key,name", [("322D", "I3"), ("224", "I7")])
    @given(a=st.integers(0, 10), b=st.integers(0, 10), da=st.integers(0, 5), db=st.integers(0, 5))
    @settings(max_examples=15, deadline=None)
    def test_monotone(self, key, name, a, b, da, db):
        """Raising any resource never lowers the value."""
        spec, fom = fom_of(key, name)
        model = ClassicalModel(spec, fom)
        lo = [spec.resource_bounds(i)[0] for i in range(2)]
        r0 = [lo[0] + (1 - lo[0]) * Fraction(a, 15), lo[1] + (1 - lo[1]) * Fraction(b, 15)]
        r1 = [r0[0] + (1 - lo[0]) * Fraction(da, 15), r0[1] + (1 - lo[1]) * Fraction(db, 15)]
        assert model.value(r1) >= model.value(r0)

    def test_best_vertex_not_above_lp(self):
        """The best single vertex never beats the mixture optimum."""
        spec, fom = fom_of("322D", "I1")
        model = ClassicalModel(spec, fom)
        res = (Fraction(689, 1000), Fraction(533, 1000))
        v, _ = model.best_vertex(res)
        assert v <= model.value(res)


class TestClassicalTotal:
    """Least product of resources reaching a target."""

    def test_saturated_facet(self):
        """A bound 2 D2 - 1 at S = 1 forces D2 = 1 and D1 to its lower bound."""
        spec, fom = fom_of("222", "r1")
        out = classical_total(spec, fom, 1)
        assert out.resources == pytest.approx((0.5, 1.0))
        assert out.product == pytest.approx(0.5)

    def test_low_target(self):
        """Below the zero-communication value the resources sit at their lower bounds."""
        spec, fom = fom_of("322D", "I4")
        out = classical_total(spec, fom, -1)
        assert out.product == pytest.approx(1 / 6)

    def test_unachievable(self):
        """Targets above the classical maximum are rejected."""
        spec, fom = fom_of("222", "r1")
        with pytest.raises(Unachievable):
            classical_total(spec, fom, 2)

    def test_i6_facet_cross_check(self):
        """For the sixth expression at S = 1.02 the optimum sits on 2 A1 + 2 A2 - 2 = S."""
        spec, fom = fom_of("224", "I6")
        out = classical_total(spec, fom, 1.02)
        a1, a2 = out.resources
        assert 2 * a1 + 2 * a2 - 2 == pytest.approx(1.02, abs=1e-8)
        assert out.product == pytest.approx(0.51, abs=1e-8)

    @pytest.mark.parametrize("key,name,S", [("322D", "I1", 2.1339), ("322D", "I2", 3.1579)])
    def test_reaches_target(self, key, name, S):
        """The returned resources reach S and the grid product is not beaten by a coarse scan."""
        spec, fom = fom_of(key, name)
        out = classical_total(spec, fom, S)
        model = ClassicalModel(spec, fom)
        res = [Fraction(r).limit_denominator(10 ** 9) + Fraction(1, 10 ** 8) for r in out.resources]
        assert float(model.value([min(r, 1) for r in res])) >= S - 1e-6
        for a in np.linspace(float(spec.resource_bounds(0)[0]), 1, 9):
            last = model.min_last_resource([Fraction(a)], S)
            if last is not None:
                assert a * float(last) >= out.product - 1e-9


class TestRelaxation:
    """Operational upper bound."""

    def test_single_coordinate(self):
        """A single probability can be 1."""
        spec = SCENARIOS["222"]
        fom = FigureOfMerit.parse("p(1|1,1)", spec)
        assert operational_relaxation(spec, fom, (0.5, 0.5)) == pytest.approx(1.0)

    def test_binary_facet(self):
        """At D2 = 1 the (2,2,2) facet relaxation is 1."""
        spec, fom = fom_of("222", "r1")
        assert operational_relaxation(spec, fom, (1, 1)) == pytest.approx(1.0)

    @pytest.mark.parametrize("key,name", [("322D", "I1"), ("224", "I6"), ("322A", "r2")])
    @given(a=st.integers(0, 8), b=st.integers(0, 8))
    @settings(max_examples=8, deadline=None)
    def test_above_classical(self, key, name, a, b):
        """The relaxation bounds the classical value from above."""
        spec, fom = fom_of(key, name)
        lo = [spec.resource_bounds(i)[0] for i in range(2)]
        res = (lo[0] + (1 - lo[0]) * Fraction(a, 8), lo[1] + (1 - lo[1]) * Fraction(b, 8))
        exact = classical_value(spec, fom, res)
        assert operational_relaxation(spec, fom, res) >= float(exact) - 1e-7
