"""Optimal measurements: discrimination, exclusion and the generic POVM step."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .conic import ConicProblem, conic_solve
from .states import as_density, check_unit, herm, support_basis


@dataclass
class MeasurementResult:
    value: float
    povm: list
    gap: float = 0.0


def best_povm(W: Sequence[np.ndarray], method: str = "auto") -> MeasurementResult:
    """Maximize ``sum_z Re Tr(W_z M_z)`` over POVMs ``{M_z}``.

    ``method="auto"`` uses the closed form for two outcomes and otherwise an
    SDP restricted to the joint support of the ``W_z``; ``"sdp"`` always
    solves the full SDP.
    """
    W = [herm(np.asarray(w, dtype=complex)) for w in W]
    n = W[0].shape[0]
    k = len(W)
    if k == 1:
        return MeasurementResult(float(np.trace(W[0]).real), [np.eye(n, dtype=complex)])
    if method == "auto" and k == 2:
        lam, U = np.linalg.eigh(W[0] - W[1])
        P = U[:, lam > 0]
        M0 = P @ P.conj().T
        M = [M0, np.eye(n) - M0]
        return MeasurementResult(float(np.trace(W[1]).real + lam[lam > 0].sum()), M)
    if method == "auto":
        V = support_basis(sum(w @ w for w in W))
        r = V.shape[1]
        if r == 0:
            M = [np.eye(n, dtype=complex)] + [np.zeros((n, n), dtype=complex)] * (k - 1)
            return MeasurementResult(0.0, M)
        if r < n:
            sub = best_povm([V.conj().T @ w @ V for w in W], method="sdp")
            comp = np.eye(n) - V @ V.conj().T
            M = [V @ m @ V.conj().T for m in sub.povm]
            M[0] = M[0] + comp
            val = float(sum(np.trace(w @ m).real for w, m in zip(W, M)))
            return MeasurementResult(val, [herm(m) for m in M], sub.gap)
    p = ConicProblem("max")
    blocks = [p.psd(f"M{z}", n) for z in range(k)]
    obj = p.inner(blocks[0], W[0])
    for b, w in zip(blocks[1:], W[1:]):
        obj = obj + p.inner(b, w)
    p.add_objective(obj)
    p.add_matrix_eq([(1.0, b) for b in blocks], np.eye(n))
    sol = conic_solve(p)
    M = [herm(sol.values[b.name]) for b in blocks]
    return MeasurementResult(sol.optimum, M, sol.gap)


def _priors(n: int, priors) -> np.ndarray:
    q = np.full(n, 1.0 / n) if priors is None else np.asarray(priors, dtype=float)
    if len(q) != n or np.any(q < 0) or abs(q.sum() - 1) > 1e-12:
        raise ValueError("priors must be a probability vector matching the states")
    return q


def distinguishability(states, priors=None, method: str = "sdp") -> MeasurementResult:
    """``max_M sum_x q_x Tr(rho_x M_x)``."""
    rho = [as_density(s) for s in states]
    q = _priors(len(rho), priors)
    return best_povm([qx * r for qx, r in zip(q, rho)], method=method)


def antidistinguishability(states, priors=None, method: str = "sdp") -> MeasurementResult:
    """``1 - min_M sum_x q_x Tr(rho_x M_x)`` over ``n``-outcome POVMs."""
    rho = [as_density(s) for s in states]
    q = _priors(len(rho), priors)
    res = best_povm([-qx * r for qx, r in zip(q, rho)], method=method)
    return MeasurementResult(1.0 + res.value, res.povm, res.gap)


def helstrom_antidist_two(psi0, psi1) -> float:
    """Exclusion probability of two equiprobable pure states."""
    a, b = check_unit(psi0), check_unit(psi1)
    ov = abs(np.vdot(a, b)) ** 2
    return 0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - ov)))


def resource_value(states, priors, kind: str, method: str = "sdp") -> float:
    if kind == "D":
        return distinguishability(states, priors, method).value
    return antidistinguishability(states, priors, method).value
