"""Acceptance suite: one recorded pass/fail line per criterion.

Long reproductions carry the ``slow`` marker. Criteria that the package
cannot reach are strict xfails: the measured value is still recorded as a
FAIL line, and the test starts failing the suite if it ever passes.
"""
import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from adcomm.catalog import FACET_COUNTS, N_CLASSES_224, REFERENCE, SCENARIOS, TOTAL_RESOURCE_TARGETS, reference
from adcomm.classical import ClassicalModel, classical_total, classical_value
from adcomm.cli import bundled
from adcomm.distributed import (
    DistributedTask,
    brute_force_distributed,
    certify_perfect_exclusion,
    classical_bound,
    pbr_optimal_ratio,
    pbr_theta_range,
    product_states,
    quantum_common_resource,
    reference_states,
)
from adcomm.geometry import affine_hull
from adcomm.quantum import discrimination
from adcomm.quantum import seesaw as seesaw_module
from adcomm.quantum.conic import GAP_TOL, conic_solve
from adcomm.quantum.discrimination import antidistinguishability
from adcomm.quantum.seesaw import min_total_resource, mixed_total_resource, seesaw, seesaw_samples
from adcomm.quantum.strategy import QuantumStrategy, verify_strategy
from adcomm.scenario import FigureOfMerit, extended_vertices, facet_table, parse_inequality

SEED = 42
# Expressions whose total-resource ratio stays below target - 0.01 at 200 restarts, mixed or not.
UNREACHED_TOTAL = {"I1", "I2", "I3", "I4", "I6", "I7"}


def fom_of(key, name):
    spec = SCENARIOS[key]
    return spec, FigureOfMerit.parse(reference(key, name), spec)


def reference_rows_found(key, table):
    """Names of reference rows that are facets in a nontrivial class of the stated orbit size."""
    spec = SCENARIOS[key]
    hull = affine_hull(extended_vertices(spec).polytope())
    found = []
    for name, size, text in REFERENCE[key]:
        raw = parse_inequality(text, spec)
        c = table.class_of(hull.canonical(raw.coeffs, raw.bound))
        if c is not None and not c.trivial and c.orbit_size == size:
            found.append(name)
    return found


class TestFacetCriteria:
    """Criteria 1 to 5: facet tables."""

    @pytest.mark.parametrize("number,key,budget", [
        (1, "222", 10),
        (2, "223", 120),
        (3, "322A", 120),
        (4, "322D", 300),
    ])
    def test_small_tables(self, criterion, number, key, budget):
        """Counts, orbit sizes and reference rows, within the time budget."""
        extended_vertices.cache_clear()
        t0 = time.perf_counter()
        table = facet_table(SCENARIOS[key])
        elapsed = time.perf_counter() - t0
        total, trivial, orbits = FACET_COUNTS[key]
        sizes = sorted(c.orbit_size for c in table.nontrivial_classes)
        rows = reference_rows_found(key, table)
        ok = (table.n_facets == total and table.n_trivial == trivial and sizes == sorted(orbits)
              and len(rows) == len(REFERENCE[key]) and elapsed < budget)
        criterion(number, ok, f"{key}: {table.n_facets} facets, {table.n_trivial} trivial, orbits {sizes}, "
                              f"{len(rows)}/{len(REFERENCE[key])} reference rows, {elapsed:.1f} s")
        assert ok

    @pytest.mark.slow
    def test_two_two_four(self, criterion):
        """The (2,2,4) anti-distinguishability table: 2210 facets, 18 trivial, 21 classes."""
        t0 = time.perf_counter()
        table = facet_table(SCENARIOS["224"])
        elapsed = time.perf_counter() - t0
        total, trivial, _ = FACET_COUNTS["224"]
        rows = reference_rows_found("224", table)
        n_classes = len(table.nontrivial_classes)
        ok = (table.n_facets == total and table.n_trivial == trivial and n_classes == N_CLASSES_224
              and len(rows) == len(REFERENCE["224"]) and elapsed < 7200)
        criterion(5, ok, f"224: {table.n_facets} facets, {table.n_trivial} trivial, {n_classes} classes, "
                         f"{len(rows)}/{len(REFERENCE['224'])} listed rows found, {elapsed:.1f} s")
        assert ok


class TestQuantumCriteria:
    """Criteria 6 to 8: explicit strategy, SeeSaw reproductions, no-violation scenarios."""

    def test_i6_strategy(self, criterion):
        """The bundled strategy reaches 1.46 with audited resources at most 0.855."""
        spec, fom = fom_of("224", "I6")
        t0 = time.perf_counter()
        out = verify_strategy(spec, fom, QuantumStrategy.load(bundled("i6_strategy.json")))
        c = classical_value(spec, fom, ("17/20", "17/20"))
        ratio = out["value"] / float(c)
        again = verify_strategy(spec, fom, QuantumStrategy.load(bundled("i6_strategy.json")))
        elapsed = time.perf_counter() - t0
        ok = (abs(out["value"] - 1.46) <= 0.01 and max(out["audited_resources"]) <= 0.855
              and ratio >= 1.035 and again == out and elapsed < 10)
        criterion(6, ok, f"value {out['value']:.4f}, audited {max(out['audited_resources']):.6f}, "
                         f"classical {c} at (0.85, 0.85), ratio {ratio:.4f}")
        assert ok

    @pytest.mark.slow
    @pytest.mark.parametrize("key,name", [
        pytest.param(k, n, marks=pytest.mark.xfail(strict=True, reason="total-resource ratio below target"))
        if n in UNREACHED_TOTAL else (k, n)
        for k, n in TOTAL_RESOURCE_TARGETS
    ])
    def test_total_resource(self, criterion, key, name):
        """200 restarts at d = 4, with and without mixing, reach the reported ratio minus 0.01."""
        spec, fom = fom_of(key, name)
        S, target = TOTAL_RESOURCE_TARGETS[(key, name)]
        t0 = time.perf_counter()
        c = classical_total(spec, fom, S)
        q = min_total_resource(spec, fom, S, d=4, restarts=200, seed=SEED, anchors=[c.resources, (1.0, 1.0)])
        samples = np.vstack([seesaw_samples(spec, fom, points=6, d=4, seed=SEED), [[q.value, *q.resources]]])
        m = mixed_total_resource(spec, fom, S, samples)
        elapsed = time.perf_counter() - t0
        single, mixed = c.product / q.product, c.product / m.product
        ok = max(single, mixed) >= target - 0.01 and elapsed < 1800
        criterion(7, ok, f"{name} ratio {single:.4f} single, {mixed:.4f} mixed (need {target - 0.01:.4f})")
        assert ok

    @pytest.mark.slow
    def test_no_violation(self, criterion):
        """SeeSaw on a 10 x 10 grid never beats the classical value of any nontrivial class."""
        t0 = time.perf_counter()
        worst = -math.inf
        n_runs = 0
        for key in ("222", "223", "322A"):
            spec = SCENARIOS[key]
            grids = [[lo + (1 - lo) * Fraction(k, 9) for k in range(10)]
                     for lo in (spec.resource_bounds(i)[0] for i in range(spec.N))]
            for c in facet_table(spec).nontrivial_classes:
                fom = FigureOfMerit.from_facet(spec, c.representative)
                model = ClassicalModel(spec, fom)
                for a in grids[0]:
                    for b in grids[1]:
                        q = seesaw(spec, fom, (float(a), float(b)), d=max(spec.n_m), restarts=2, seed=SEED)
                        worst = max(worst, q.value - float(model.value((a, b))))
                        n_runs += 1
        elapsed = time.perf_counter() - t0
        ok = worst <= 1e-5 and elapsed < 3600
        criterion(8, ok, f"{n_runs} grid points, largest excess {worst:.2e}, {elapsed:.0f} s")
        assert ok


class TestDistributedCriteria:
    """Criteria 9 to 12: exclusion, PBR formulas, product bound, advantage curve endpoint."""

    def test_reference_states(self, criterion):
        """Exclusion 0.9798, perfect product exclusion, ratio 1.042."""
        kets = reference_states()
        single = antidistinguishability(kets).value
        prod = antidistinguishability(product_states(kets, 2)).value
        ratio = (1 / single) ** 2
        ok = abs(single - 0.9798) <= 5e-4 and prod >= 1 - 1e-6 and abs(ratio - 1.042) <= 3e-3
        criterion(9, ok, f"single {single:.6f}, product {prod:.9f}, ratio {ratio:.4f}")
        assert ok

    def test_pbr_formulas(self, criterion):
        """Optimal ratio for two senders and the certificate boundary for N = 2, 3."""
        r2 = pbr_optimal_ratio(2)
        flips = []
        for N in (2, 3):
            t = pbr_theta_range(N)[0]
            flips.append(not certify_perfect_exclusion(t - 1e-3, N).excluded
                         and certify_perfect_exclusion(t + 1e-3, N).excluded)
        ok = abs(r2 - 1.37258) <= 1e-5 and all(flips)
        criterion(10, ok, f"ratio(2) = {r2:.6f}, boundary flips {flips}")
        assert ok

    @pytest.mark.xfail(strict=True, reason="the normalized ratio tends to 1/4, not into [0.8, 1]")
    def test_pbr_limit(self, criterion):
        """value / 2^N lies in [0.8, 1] at N = 20."""
        v = pbr_optimal_ratio(20) / 2 ** 20
        ok = 0.8 <= v <= 1
        criterion(10, ok, f"ratio(20) / 2^20 = {v:.4f} (need [0.8, 1])")
        assert ok

    def test_product_bound(self, criterion):
        """100 random exact resource pairs never beat 1 - prod(1 - A_i)."""
        rng = np.random.default_rng(SEED)
        task = DistributedTask(2, 2)
        t0 = time.perf_counter()
        bad = 0
        for _ in range(100):
            A = [Fraction(1, 2) + Fraction(int(k), 2000) for k in rng.integers(0, 1001, size=2)]
            bad += brute_force_distributed(task, A) > classical_bound(A)
        elapsed = time.perf_counter() - t0
        ok = bad == 0 and elapsed < 300
        criterion(11, ok, f"100 exact samples, {bad} above the bound, {elapsed:.1f} s")
        assert ok

    @pytest.mark.slow
    def test_curve_endpoint(self, criterion):
        """Three senders with three inputs and qubits reach ratio 1.7489 at S = 1."""
        t0 = time.perf_counter()
        A_q, _ = quantum_common_resource(DistributedTask(3, 3), 1.0, d=2, restarts=20, seed=SEED)
        elapsed = time.perf_counter() - t0
        ratio = (1 / A_q) ** 3
        ok = abs(ratio - 1.7489) <= 0.02 and elapsed < 3600
        criterion(12, ok, f"A_Q = {A_q:.6f}, ratio {ratio:.4f}, {elapsed:.0f} s")
        assert ok


class TestHygiene:
    """Criterion 13: duality gaps and bit-reproducibility."""

    def test_gaps_and_reproducibility(self, criterion, monkeypatch):
        """Every conic solve of a mixed workload has gap at most 1e-8; exact results repeat exactly."""
        gaps = []

        def recording(p, *args, **kw):
            sol = conic_solve(p, *args, **kw)
            gaps.append(sol.gap)
            return sol

        monkeypatch.setattr(discrimination, "conic_solve", recording)
        monkeypatch.setattr(seesaw_module, "conic_solve", recording)
        kets = reference_states()
        antidistinguishability(kets)
        antidistinguishability(product_states(kets, 2), method="sdp")
        for N in (2, 3):
            certify_perfect_exclusion(pbr_theta_range(N)[0], N)
        spec, fom = fom_of("322D", "I1")
        seesaw(spec, fom, (0.7, 0.6), d=2, restarts=2, seed=SEED, max_sweeps=10)

        def exact_run():
            return json.dumps({
                "facets": facet_table(SCENARIOS["322A"]).to_json(),
                "value": str(classical_value(spec, fom, ("7/10", "3/5"))),
                "brute": str(brute_force_distributed(DistributedTask(2, 2), ("3/5", "7/10"))),
            }, sort_keys=True)

        same = exact_run() == exact_run()
        ok = bool(gaps) and max(gaps) <= GAP_TOL and same
        criterion(13, ok, f"{len(gaps)} conic solves, largest gap {max(gaps):.1e}, exact outputs identical {same}")
        assert ok
