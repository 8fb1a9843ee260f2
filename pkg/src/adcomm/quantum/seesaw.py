"""SeeSaw lower bounds on quantum values and upper bounds on total resources.

A sweep fixes the states and optimizes the measurement, then optimizes each
sender's ensemble in turn with the measurement and the other senders fixed.
The resource bound of a sender enters its state step through an auxiliary
operator: ``sigma >= q_x rho_x`` with ``Tr sigma <= D`` for distinguishability,
``q_x rho_x >= omega`` with ``1 - Tr omega <= A`` for anti-distinguishability.
Both are exact by SDP duality.
"""
from __future__ import annotations

import itertools
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from fractions import Fraction
from functools import lru_cache

import numpy as np

from ..classical import ClassicalModel, classical_total
from ..scenario import FigureOfMerit, ScenarioError, ScenarioSpec, enumerate_decoders, extended_vertices
from .conic import ConicError, ConicProblem, conic_solve
from .discrimination import best_povm, resource_value
from .states import haar_pure, kron_all, proj
from .strategy import (
    QuantumStrategy,
    coefficient_tensor,
    evaluate,
    normalize_povm,
    normalize_state,
    povm_weights,
    sender_operators,
)

logger = logging.getLogger(__name__)

SWEEP_TOL = 1e-7
MAX_SWEEPS = 500
PIN_SLACK = 1e-6
AUDIT_TOL = 1e-6
THREADS_ENV = "ADCOMM_THREADS"


class Unachievable(ValueError):
    pass


@dataclass
class SeeSawResult:
    value: float
    strategy: QuantumStrategy
    audited_resources: tuple
    trace: list
    seed: int
    restart: int = 0
    resources: tuple = ()
    values: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "audited_resources": list(self.audited_resources),
            "resources": [float(r) for r in self.resources],
            "trace": self.trace,
            "seed": self.seed,
            "restart": self.restart,
            "strategy": self.strategy.to_json(),
        }


# ---------------------------------------------------------------- steps

def povm_step(C, states, method="auto"):
    W = povm_weights(C, states)
    povm = []
    for Wy in W:
        res = best_povm(Wy, method=method)
        povm.append(normalize_povm(res.povm))
    return povm


def _resource_block(p: ConicProblem, rho, q, kind):
    """Add the auxiliary-operator encoding; returns the form equal to the resource."""
    d = rho[0].n
    if kind == "D":
        sigma = p.psd("sigma", d)
        for x, r in enumerate(rho):
            if q[x] > 0:
                p.add_psd([(1.0, sigma), (-q[x], r)])
        return p.trace(sigma), 0.0
    ref = int(np.argmax(q))
    S = p.psd("S_ref", d)
    for x, r in enumerate(rho):
        if x != ref:
            p.add_psd([(q[x], r), (-q[ref], rho[ref]), (1.0, S)])
    # A = 1 - Tr(omega), omega = q_ref rho_ref - S
    return p.trace(S), 1.0 - q[ref]


def state_step(K, q, kind, bound, d, target=None, lower=None):
    """One sender's ensemble update.

    With ``target is None`` maximize ``sum_x Tr(K_x rho_x)`` subject to the
    resource bound. Otherwise minimize the resource subject to
    ``sum_x Tr(K_x rho_x) >= target``. Returns ``(states, resource)``.
    """
    n = len(K)
    if target is None and bound >= 1.0 - 1e-15:
        out = []
        for k in K:
            lam, U = np.linalg.eigh(k)
            out.append(proj(U[:, -1]))
        return out, None
    if target is None and lower is not None and bound <= lower + 1e-12 and len(set(q)) == 1:
        # only identical states meet the lower bound
        lam, U = np.linalg.eigh(sum(K))
        r = proj(U[:, -1])
        return [r] * n, lower
    p = ConicProblem("max" if target is None else "min")
    rho = [p.psd(f"rho{x}", d) for x in range(n)]
    for r in rho:
        p.add_eq(p.trace(r), 1.0)
    res_form, res_const = _resource_block(p, rho, q, kind)
    fom = p.inner(rho[0], K[0])
    for r, k in zip(rho[1:], K[1:]):
        fom = fom + p.inner(r, k)
    if target is None:
        p.add_le(res_form, bound - res_const)
        p.add_objective(fom)
    else:
        p.add_ge(fom, target)
        p.add_objective(res_form, res_const)
    sol = conic_solve(p)
    states = [normalize_state(sol.values[r.name]) for r in rho]
    resource = res_form.evaluate(sol.values) + res_const
    return states, resource


# ---------------------------------------------------------------- runs

def _priors(spec):
    return [[float(v) for v in s.prior] for s in spec.senders]


def random_strategy(spec: ScenarioSpec, d: int, rng: np.random.Generator) -> list:
    return [[haar_pure(d, rng) for _ in range(n)] for n in spec.n_x]


def _maximize(spec, C, const, resources, states, tol, max_sweeps):
    q = _priors(spec)
    lows = [float(spec.resource_bounds(i)[0]) for i in range(spec.N)]
    d = [s[0].shape[0] for s in states]
    trace = []
    prev = -np.inf
    povm = None
    for _ in range(max_sweeps):
        povm = povm_step(C, states)
        for i in range(spec.N):
            K = sender_operators(C, states, povm, i)
            try:
                new, _ = state_step(K, q[i], spec.kind, float(resources[i]), d[i], lower=lows[i])
            except ConicError as exc:
                logger.debug("state step failed: %s", exc)
                continue
            states[i] = new
        povm = povm_step(C, states)
        val = evaluate(C, const, states, povm)
        trace.append(val)
        if val - prev < tol:
            break
        prev = val
    return states, povm, trace


def _audit(spec, states):
    q = _priors(spec)
    return tuple(resource_value(states[i], q[i], spec.kind) for i in range(spec.N))


@lru_cache(maxsize=32)
def _classical_model(spec, fom):
    ev = extended_vertices(spec)
    return ev, ClassicalModel(spec, fom, ev)


def classical_embedding(spec: ScenarioSpec, fom: FigureOfMerit, resources, d: int):
    """Diagonal states and a decoder POVM reproducing the best classical vertex."""
    if any(m > d for m in spec.n_m):
        return None
    try:
        ev, model = _classical_model(spec, fom)
    except ScenarioError:
        return None
    try:
        _, k = model.best_vertex([Fraction(r).limit_denominator(10**9) for r in resources])
    except ValueError:
        return None
    enc_idx, dec = ev.provenance[model.origin[k]]
    states = []
    for i, e in enumerate(enc_idx):
        P, _, L = ev.encodings[i]
        enc = P[e] / L
        states.append([np.diag(np.concatenate([enc[x], np.zeros(d - spec.n_m[i])])).astype(complex)
                       for x in range(spec.n_x[i])])
    g = enumerate_decoders(spec)[dec].reshape(tuple(spec.n_m) + (spec.n_y,))
    D = d ** spec.N
    povm = [[np.zeros((D, D), dtype=complex) for _ in range(spec.n_z)] for _ in range(spec.n_y)]
    for ms in itertools.product(*(range(d) for _ in range(spec.N))):
        basis = kron_all([np.diag(np.eye(d)[m]).astype(complex) for m in ms])
        for y in range(spec.n_y):
            z = int(g[ms + (y,)]) if all(m < n for m, n in zip(ms, spec.n_m)) else 0
            povm[y][z] += basis
    return states, povm


def _one_restart(args):
    spec, fom, resources, d, seed_seq, tol, max_sweeps, init = args
    C = coefficient_tensor(spec, fom)
    const = float(fom.constant)
    if init is None:
        rng = np.random.default_rng(seed_seq)
        states = random_strategy(spec, d, rng)
    else:
        states = [[r.copy() for r in s] for s in init]
    try:
        states, povm, trace = _maximize(spec, C, const, resources, states, tol, max_sweeps)
    except ConicError as exc:
        logger.info("restart skipped: %s", exc)
        return None
    # a failed state step keeps the previous ensemble, which may be the unconstrained start
    if any(a > r + AUDIT_TOL for a, r in zip(_audit(spec, states), resources)):
        logger.info("restart skipped: resources exceed their bounds")
        return None
    return states, povm, trace


def _pool_size() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _map(fn, items):
    n = _pool_size()
    if n <= 1 or len(items) <= 1:
        return [fn(a) for a in items]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def seesaw(
    spec: ScenarioSpec,
    fom: FigureOfMerit,
    resources: Sequence,
    d: int = 4,
    restarts: int = 20,
    seed: int = 42,
    tol: float = SWEEP_TOL,
    max_sweeps: int = MAX_SWEEPS,
    classical_start: bool = True,
    initial: Sequence | None = None,
) -> SeeSawResult:
    """Best SeeSaw value over Haar-random restarts.

    Extra deterministic restarts embed the best classical vertex (when
    ``classical_start`` and the dimension allows it) and start from each
    state assignment in ``initial``.
    """
    resources = tuple(float(r) for r in resources)
    for i, r in enumerate(resources):
        lo, hi = spec.resource_bounds(i)
        if r < float(lo) - 1e-12 or r > float(hi) + 1e-12:
            raise ValueError(f"resource {i + 1} = {r} outside [{lo}, {hi}]")
    seqs = np.random.SeedSequence(seed).spawn(restarts)
    jobs = [(spec, fom, resources, d, s, tol, max_sweeps, None) for s in seqs]
    if classical_start:
        emb = classical_embedding(spec, fom, resources, d)
        if emb is not None:
            jobs.append((spec, fom, resources, d, None, tol, max_sweeps, emb[0]))
    for states in initial or ():
        jobs.append((spec, fom, resources, d, None, tol, max_sweeps, states))
    outs = _map(_one_restart, jobs)
    best = None
    values = []
    for k, out in enumerate(outs):
        if out is None:
            values.append(float("nan"))
            continue
        val = out[2][-1]
        values.append(val)
        if best is None or val > best[0] + 1e-12:
            best = (val, k, out)
    if best is None:
        raise ConicError("every restart failed")
    val, k, (states, povm, trace) = best
    audited = _audit(spec, states)
    strat = QuantumStrategy(states, povm, audited)
    return SeeSawResult(val, strat, audited, trace, seed, k, resources, values)


# ---------------------------------------------------------------- total resources

@dataclass
class TotalQuantumResult:
    resources: tuple
    product: float
    value: float
    strategy: QuantumStrategy
    seed: int
    restart: int
    trace: list
    product_variant: dict | None = None

    def to_json(self) -> dict:
        out = {
            "resources": list(self.resources),
            "product": self.product,
            "value": self.value,
            "seed": self.seed,
            "restart": self.restart,
            "trace": self.trace,
            "strategy": self.strategy.to_json(),
        }
        if self.product_variant is not None:
            out["product_variant"] = self.product_variant
        return out


def _reach(spec, C, const, states, S, max_sweeps):
    """Unconstrained sweeps until the value reaches ``S``."""
    q = _priors(spec)
    d = [s[0].shape[0] for s in states]
    prev = -np.inf
    for _ in range(max_sweeps):
        povm = povm_step(C, states)
        val = evaluate(C, const, states, povm)
        if val >= S:
            return states, povm, val
        for i in range(spec.N):
            K = sender_operators(C, states, povm, i)
            states[i], _ = state_step(K, q[i], spec.kind, 1.0, d[i])
        if val - prev < SWEEP_TOL:
            break
        prev = val
    povm = povm_step(C, states)
    val = evaluate(C, const, states, povm)
    return (states, povm, val) if val >= S else None


def _shrink(spec, C, const, states, S, tol, max_sweeps, fixed=None):
    """Alternate measurement maximization with per-sender resource minimization.

    ``fixed`` maps a sender index to a resource value that is held as an
    upper bound while that sender maximizes the figure of merit instead.
    """
    q = _priors(spec)
    d = [s[0].shape[0] for s in states]
    fixed = fixed or {}
    res = [None] * spec.N
    trace = []
    prev = np.inf
    povm = povm_step(C, states)
    for _ in range(max_sweeps):
        for i in range(spec.N):
            povm = povm_step(C, states)
            K = sender_operators(C, states, povm, i)
            base = evaluate(C, const, states, povm) - sum(np.trace(k @ r).real for k, r in zip(K, states[i]))
            try:
                if i in fixed:
                    states[i], _ = state_step(K, q[i], spec.kind, fixed[i], d[i],
                                              lower=float(spec.resource_bounds(i)[0]))
                    res[i] = fixed[i]
                else:
                    states[i], res[i] = state_step(K, q[i], spec.kind, 1.0, d[i], target=S - PIN_SLACK - base)
            except ConicError as exc:
                logger.debug("resource step failed: %s", exc)
                if res[i] is None:
                    raise
        povm = povm_step(C, states)
        total = sum(r for i, r in enumerate(res) if i not in fixed)
        trace.append(float(total))
        if prev - total < tol:
            break
        prev = total
    return states, povm, trace


def _total_restart(args):
    spec, fom, S, d, seed_seq, tol, max_sweeps, fixed, anchor = args
    C = coefficient_tensor(spec, fom)
    const = float(fom.constant)
    rng = np.random.default_rng(seed_seq)
    states = random_strategy(spec, d, rng)
    try:
        if anchor is None:
            start = _reach(spec, C, const, states, S, max_sweeps)
            if start is None:
                return None
            states = start[0]
        else:
            states, povm, trace = _maximize(spec, C, const, anchor, states, tol, max_sweeps)
            if trace[-1] < S:
                return None
        states, povm, trace = _shrink(spec, C, const, states, S, tol, max_sweeps, fixed)
    except ConicError as exc:
        logger.info("restart skipped: %s", exc)
        return None
    value = evaluate(C, const, states, povm)
    audited = _audit(spec, states)
    return states, povm, trace, value, audited


def min_total_resource(
    spec: ScenarioSpec,
    fom: FigureOfMerit,
    S: float,
    d: int = 4,
    restarts: int = 20,
    seed: int = 42,
    tol: float = SWEEP_TOL,
    max_sweeps: int = MAX_SWEEPS,
    anchors: Sequence | None = None,
    product: bool = False,
    grid: int = 11,
) -> TotalQuantumResult:
    """Upper bound on the least resource product reaching ``S`` quantumly.

    A restart first reaches ``S``, either by unconstrained sweeps or by
    maximizing at an anchor resource point, then alternates measurement
    steps with per-sender minimization of the resource subject to the value
    staying at least ``S - 1e-6``. Restarts cycle through the free start and
    the anchors; by default the single anchor is the classical optimum of the
    product. The reported product uses resources audited from the final
    states. With ``product=True`` the first sender's resource is also scanned
    on a grid and held fixed while the others are minimized, and the better
    product is reported separately.
    """
    if anchors is None:
        try:
            anchors = [classical_total(spec, fom, S).resources]
        except ScenarioError:
            anchors = []
    options = [None] + [tuple(float(r) for r in a) for a in anchors]
    seqs = np.random.SeedSequence(seed).spawn(restarts)
    jobs = [(spec, fom, S, d, s, tol, max_sweeps, None, options[k % len(options)])
            for k, s in enumerate(seqs)]
    best = _pick_total(_map(_total_restart, jobs), S)
    if best is None:
        raise Unachievable(f"no restart reached S = {S} at dimension {d}")
    k, (states, povm, trace, value, audited) = best
    result = TotalQuantumResult(audited, float(math.prod(audited)), value,
                                QuantumStrategy(states, povm, audited), seed, k, trace)
    if product and spec.N >= 2:
        lo = float(spec.resource_bounds(0)[0])
        variant = None
        for t in np.linspace(lo, 1.0, grid)[1:]:
            jobs = [(spec, fom, S, d, s, tol, max_sweeps, {0: float(t)}, None) for s in seqs]
            pick = _pick_total(_map(_total_restart, jobs), S)
            if pick is None:
                continue
            aud = pick[1][4]
            prod = float(math.prod(aud))
            if variant is None or prod < variant["product"]:
                variant = {"product": prod, "resources": [float(a) for a in aud], "first_resource_cap": float(t)}
        result.product_variant = variant
    return result


def _pick_total(outs, S):
    best = None
    for k, out in enumerate(outs):
        if out is None:
            continue
        value, audited = out[3], out[4]
        if value < S - 1e-5:
            continue
        prod = math.prod(audited)
        if best is None or prod < math.prod(best[1][4]) - 1e-12:
            best = (k, out)
    return best


# ---------------------------------------------------------------- shared randomness

@dataclass
class MixedTotalResult:
    resources: tuple
    product: float
    value: float
    quantum_weight: float
    n_samples: int

    def to_json(self) -> dict:
        return {"resources": list(self.resources), "product": self.product, "value": self.value,
                "quantum_weight": self.quantum_weight, "n_samples": self.n_samples}


def seesaw_samples(spec: ScenarioSpec, fom: FigureOfMerit, points: int = 6, d: int = 4,
                   restarts: int = 2, seed: int = 42) -> np.ndarray:
    """SeeSaw values on a ``points x points`` resource grid.

    Rows are ``(value, audited resource 1, ..., audited resource N)``; only
    two senders are supported.
    """
    if spec.N != 2:
        raise ValueError("grid sampling needs exactly two senders")
    axes = [np.linspace(float(spec.resource_bounds(i)[0]), 1.0, points) for i in range(2)]
    rows = []
    for a, b in itertools.product(*axes):
        r = seesaw(spec, fom, (a, b), d=d, restarts=restarts, seed=seed)
        rows.append((r.value, *r.audited_resources))
    return np.array(rows)


def mixed_total_resource(spec: ScenarioSpec, fom: FigureOfMerit, S: float, samples: np.ndarray,
                         grid: int = 401, rounds: int = 3) -> MixedTotalResult:
    """Least resource product reaching ``S`` when strategies may be mixed.

    With shared randomness the achievable (value, resources) points form the
    convex hull of the quantum ``samples`` (rows as in :func:`seesaw_samples`)
    together with the classical extended vertices, which is the quantum
    analogue of the convexity the classical LP already has. Two senders: the
    first resource is scanned, refined ``rounds`` times around the best grid
    point, and an LP gives the least second resource.
    """
    from scipy.optimize import linprog

    if spec.N != 2:
        raise ValueError("the mixed total is implemented for two senders")
    _, model = _classical_model(spec, fom)
    cl = np.array([[float(v), *(float(x) for x in r)] for v, r in zip(model.values, model.resources)])
    P = np.vstack([cl, np.asarray(samples, dtype=float).reshape(-1, 3)])
    n, n_cl = len(P), len(cl)

    def solve(t):
        out = linprog(P[:, 2], A_ub=np.vstack([P[:, 1], -P[:, 0]]), b_ub=[t, -S],
                      A_eq=np.ones((1, n)), b_eq=[1.0], bounds=(0, None), method="highs")
        return (t * out.fun, out.x) if out.status == 0 else (math.inf, None)

    lo = float(spec.resource_bounds(0)[0])
    ts = np.linspace(lo, 1.0, grid)
    best = min((solve(t) + (t,) for t in ts), key=lambda r: r[0])
    step = ts[1] - ts[0]
    for _ in range(rounds):
        ts = np.clip(np.linspace(best[2] - step, best[2] + step, 21), lo, 1.0)
        best = min([best] + [solve(t) + (t,) for t in ts], key=lambda r: r[0])
        step /= 10
    prod, w, _ = best
    if w is None:
        raise Unachievable(f"S = {S} is not reached by any mixture")
    res = tuple(float(x) for x in P[:, 1:].T @ w)
    return MixedTotalResult(res, float(math.prod(res)), float(P[:, 0] @ w), float(w[n_cl:].sum()), n - n_cl)
