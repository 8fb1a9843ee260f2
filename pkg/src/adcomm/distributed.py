"""Anti-distinguishing the joint input string of several senders.

Each of ``N`` senders holds ``x_i`` in ``[n]`` and sends a message; the receiver
outputs a guess ``z`` of a string it believes was *not* sent. The success
metric is ``1 - sum_x q_x p(z = x | x)``.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .geometry import HPolyhedron, h_to_v
from .geometry.exact import as_fraction
from .quantum.discrimination import antidistinguishability, helstrom_antidist_two
from .quantum.seesaw import seesaw
from .quantum.states import check_unit, kron_all, proj
from .scenario import (
    FigureOfMerit,
    ScenarioSpec,
    Sender,
    SizeOverflow,
    build_encoding_polytope,
)

PERFECT_TOL = 1e-7
BRUTE_FORCE_CAP = 200_000


class OutOfRange(ValueError):
    pass


class ThetaOutOfRange(ValueError):
    pass


class Unachievable(ValueError):
    pass


# ---------------------------------------------------------------- task

@dataclass(frozen=True)
class DistributedTask:
    N: int
    n: int
    priors: tuple | None = None
    n_m: int | None = None

    def __post_init__(self):
        if self.N < 1 or self.n < 2:
            raise ValueError("need N >= 1 senders with n >= 2 inputs")
        pri = self.priors or tuple((Fraction(1, self.n),) * self.n for _ in range(self.N))
        pri = tuple(tuple(as_fraction(q) for q in p) for p in pri)
        if len(pri) != self.N or any(len(p) != self.n or sum(p) != 1 or min(p) < 0 for p in pri):
            raise ValueError("priors must be N probability vectors of length n")
        object.__setattr__(self, "priors", pri)

    @property
    def message_size(self) -> int:
        return self.n_m if self.n_m is not None else self.n

    def spec(self) -> ScenarioSpec:
        senders = tuple(Sender(self.n, p, self.message_size) for p in self.priors)
        return ScenarioSpec(senders, 1, self.n ** self.N, "A")

    def outcome(self, xs: Sequence[int]) -> int:
        z = 0
        for x in xs:
            z = z * self.n + x
        return z

    def fom(self) -> FigureOfMerit:
        spec = self.spec()
        c = [Fraction(0)] * spec.n_behavior
        for xs in itertools.product(range(self.n), repeat=self.N):
            c[spec.index(self.outcome(xs), xs)] = -math.prod(p[x] for p, x in zip(self.priors, xs))
        return FigureOfMerit(tuple(c), Fraction(1))

    def lower_bound(self, i: int = 0) -> Fraction:
        return 1 - min(self.priors[i])


# ---------------------------------------------------------------- classical side

def classical_bound(A: Sequence, priors: Sequence | None = None):
    """Upper bound ``1 - prod_i (1 - A_i)`` on the classical success metric.

    Exact when every ``A_i`` is exact (int, Fraction or ``"p/q"``).
    """
    vals = [a if isinstance(a, float) else as_fraction(a) for a in A]
    for i, a in enumerate(vals):
        lo = Fraction(1, 2) if priors is None else 1 - min(as_fraction(q) for q in priors[i])
        if a < lo - (1e-12 if isinstance(a, float) else 0) or a > 1:
            raise OutOfRange(f"A_{i + 1} = {a} outside [{lo}, 1]")
    return 1 - math.prod(1 - a for a in vals)


def _slice_encodings(task: DistributedTask, i: int, A) -> list[np.ndarray]:
    """Vertices of one sender's encodings with anti-distinguishability at most ``A``."""
    spec = task.spec()
    h = build_encoding_polytope(spec, i)
    cut = [0] * h.dim
    cut[-1] = 1
    v = h_to_v(HPolyhedron(h.dim, h.inequalities + ((cut, as_fraction(A)),), h.equalities))
    n_m = task.message_size
    return [np.array(p[:-1], dtype=object).reshape(task.n, n_m) for p in v.vertices]


def brute_force_distributed(task: DistributedTask, A: Sequence) -> Fraction:
    """Exact classical optimum without shared randomness.

    Every combination of slice vertices (one per sender) is paired with the
    optimal deterministic decoder, which outputs for each message tuple the
    input string of least joint weight. The objective is multilinear in the
    encodings, so vertices suffice.
    """
    A = [as_fraction(a) for a in A]
    for i, a in enumerate(A):
        if a < task.lower_bound(i) or a > 1:
            raise OutOfRange(f"A_{i + 1} = {a} outside [{task.lower_bound(i)}, 1]")
    slices = [_slice_encodings(task, i, a) for i, a in enumerate(A)]
    count = math.prod(len(s) for s in slices)
    if count > BRUTE_FORCE_CAP:
        raise SizeOverflow(f"{count} encoding combinations exceed the cap {BRUTE_FORCE_CAP}")
    weighted = [[np.array(task.priors[i], dtype=object)[:, None] * e for e in s] for i, s in enumerate(slices)]
    best = None
    for combo in itertools.product(*weighted):
        # joint[x_1, m_1, x_2, m_2, ...] = prod_j q(x_j) p(m_j | x_j)
        joint = combo[0]
        for e in combo[1:]:
            joint = np.multiply.outer(joint, e)
        N = task.N
        order = [2 * j + 1 for j in range(N)] + [2 * j for j in range(N)]
        T = joint.transpose(order).reshape(task.message_size ** N, task.n ** N)
        err = sum((min(row) for row in T), Fraction(0))
        if best is None or err < best:
            best = err
    return 1 - best


# ---------------------------------------------------------------- PBR family

def pbr_theta_range(N: int) -> tuple[float, float]:
    if N < 2:
        raise ValueError("the construction needs N >= 2 senders")
    return 2.0 * math.atan(2.0 ** (1.0 / N) - 1.0), math.pi / 2


def pbr_ratio(theta: float, N: int) -> float:
    lo, hi = pbr_theta_range(N)
    if theta < lo - 1e-12 or theta > hi:
        raise ThetaOutOfRange(f"theta = {theta} outside [{lo}, {hi}]")
    return (2.0 / (1.0 + math.sin(theta))) ** N


def pbr_optimal_ratio(N: int) -> float:
    if N < 2:
        raise ValueError("the construction needs N >= 2 senders")
    return 2.0 ** N * (1.0 + 2.0 ** (1 - 2 / N) - 2.0 ** (1 - 1 / N)) ** N


def pbr_states(theta: float) -> list[np.ndarray]:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return [np.array([c, s], dtype=complex), np.array([c, -s], dtype=complex)]


def pbr_single_antidist(theta: float) -> float:
    return helstrom_antidist_two(*pbr_states(theta))


@dataclass
class ExclusionCertificate:
    theta: float
    N: int
    excluded: bool
    sdp_value: float
    gap: float

    def to_json(self) -> dict:
        return {"theta": self.theta, "N": self.N, "excluded": self.excluded,
                "sdp_value": self.sdp_value, "gap": self.gap}


def product_states(kets: Sequence[np.ndarray], N: int) -> list[np.ndarray]:
    return [kron_all([proj(kets[x]) for x in xs]) for xs in itertools.product(range(len(kets)), repeat=N)]


def certify_perfect_exclusion(theta: float, N: int) -> ExclusionCertificate:
    """Exclusion SDP on the ``2^N`` product states of the PBR pair."""
    if N > 3:
        raise SizeOverflow("certificates are limited to N <= 3")
    res = antidistinguishability(product_states(pbr_states(theta), N))
    return ExclusionCertificate(theta, N, bool(res.value >= 1 - PERFECT_TOL), res.value, res.gap)


# ---------------------------------------------------------------- Gram conditions

@dataclass(frozen=True)
class GramSummary:
    n: int
    N: int
    alpha: float
    beta: float

    @property
    def frob_sq(self) -> float:
        return (self.n + self.alpha) ** self.N


def gram_summary(kets: Sequence, N: int) -> GramSummary:
    V = np.array([check_unit(k) for k in kets])
    G = np.abs(V.conj() @ V.T)
    off = ~np.eye(len(V), dtype=bool)
    return GramSummary(len(V), N, float((G[off] ** 2).sum()), float(G[off].sum()))


def product_gram_frobenius_sq(kets: Sequence, N: int) -> float:
    """Squared Frobenius norm of the Gram matrix of all ``N``-fold products."""
    V = np.array([check_unit(k) for k in kets])
    G = V.conj() @ V.T
    P = np.ones((1, 1), dtype=complex)
    for _ in range(N):
        P = np.kron(P, G)
    return float(np.sum(np.abs(P) ** 2))


@dataclass(frozen=True)
class SufficientCondition:
    cond1: bool
    cond2: bool
    alpha: float
    beta: float
    frob_sq: float

    @property
    def holds(self) -> bool:
        return self.cond1 and self.cond2


def sufficient_condition(kets: Sequence, N: int) -> SufficientCondition:
    """Overlap test for an advantage at unit success.

    ``cond1``: ``n(n-2) < beta`` (the single-sender states are not perfectly
    anti-distinguishable). ``cond2``: ``alpha <= n^2 / 2^(1/N) - n`` (the
    product Gram matrix is small enough for perfect exclusion). Sums run
    over ordered pairs ``j != l``.
    """
    g = gram_summary(kets, N)
    n = g.n
    return SufficientCondition(
        bool(n * (n - 2) < g.beta),
        bool(g.alpha <= n * n / 2 ** (1 / N) - n),
        g.alpha,
        g.beta,
        g.frob_sq,
    )


def reference_states() -> list[np.ndarray]:
    """Three qubit states that are not perfectly anti-distinguishable while their pairwise products are."""
    a, b = 5 * math.pi / 18, 19 * math.pi / 60
    return [
        np.array([1, 0], dtype=complex),
        np.array([math.cos(a), math.sin(a)], dtype=complex),
        np.array([math.cos(b), np.exp(2j * math.pi / 3) * math.sin(b)], dtype=complex),
    ]


# ---------------------------------------------------------------- curves

def classical_common_resource(S: float, N: int) -> float:
    """Least common anti-distinguishability reaching ``S`` classically."""
    return 1.0 - (1.0 - S) ** (1.0 / N)


@dataclass(frozen=True)
class CurvePoint:
    S: float
    A_Q: float
    A_C: float
    ratio: float
    value: float


def _feasible(task, spec, fom, A, S, d, restarts, seed, initial):
    res = seesaw(spec, fom, [A] * task.N, d=d, restarts=restarts, seed=seed,
                 classical_start=False, initial=initial)
    return res.value >= S - PERFECT_TOL, res


def quantum_common_resource(task: DistributedTask, S: float, d: int = 2, restarts: int = 8,
                            seed: int = 42, tol: float = 1e-4, warm=None):
    """Bisection on the common anti-distinguishability reaching ``S`` with SeeSaw."""
    spec, fom = task.spec(), task.fom()
    lo, hi = float(task.lower_bound()), 1.0
    initial = [warm] if warm is not None else None
    ok, best = _feasible(task, spec, fom, hi, S, d, restarts, seed, initial)
    if not ok:
        raise Unachievable(f"S = {S} not reached at A = 1 with d = {d}")
    floor = 1.0 - float(math.prod(max(p) for p in task.priors))
    if S <= floor + 1e-12:
        return lo, best
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        ok, res = _feasible(task, spec, fom, mid, S, d, restarts, seed,
                            [best.strategy.states])
        if ok:
            hi, best = mid, res
        else:
            lo = mid
    return hi, best


def advantage_curve(N: int, n: int, S_grid: Sequence[float] | None = None, d: int = 2,
                    restarts: int = 8, seed: int = 42, tol: float = 1e-4) -> list[CurvePoint]:
    """Quantum advantage ``(A_C / A_Q)^N`` against the target success metric.

    Points are solved from the highest target down, each warm-started from
    the strategy of the previous one. A strategy meeting a higher target also
    meets every lower one, so ``A_Q`` is replaced by its running minimum from
    above, which keeps it nondecreasing in ``S``.
    """
    task = DistributedTask(N, n)
    floor = 1.0 - float(n) ** (-N)
    grid = sorted(S_grid if S_grid is not None else np.linspace(floor, 1.0, 21), reverse=True)
    out = []
    warm = None
    run_min = math.inf
    for S in grid:
        A_q, res = quantum_common_resource(task, float(S), d, restarts, seed, tol, warm)
        warm = res.strategy.states
        run_min = min(run_min, A_q)
        A_c = classical_common_resource(float(S), N)
        A_c = max(A_c, float(task.lower_bound()))
        out.append(CurvePoint(float(S), run_min, A_c, (A_c / run_min) ** N, res.value))
    return sorted(out, key=lambda p: p.S)


def curve_csv(points: Sequence[CurvePoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["S", "A_Q", "A_C", "ratio"])
    for p in points:
        w.writerow([f"{p.S:.10g}", f"{p.A_Q:.10g}", f"{p.A_C:.10g}", f"{p.ratio:.10g}"])
    return buf.getvalue()
