"""Quantum strategies: evaluation, reduced operators and serialization."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..scenario import FigureOfMerit, ScenarioSpec
from .discrimination import resource_value
from .states import DensityMatrix, check_povm, herm, kron_all


@dataclass
class QuantumStrategy:
    """States ``states[i][x]`` per sender and a POVM ``povm[y][z]`` for the receiver."""

    states: list
    povm: list
    audited: tuple | None = field(default=None)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s[0].shape[0] for s in self.states)

    def copy(self) -> "QuantumStrategy":
        return QuantumStrategy([[r.copy() for r in s] for s in self.states],
                               [[m.copy() for m in p] for p in self.povm], self.audited)

    def validate(self) -> "QuantumStrategy":
        for s in self.states:
            for r in s:
                DensityMatrix(r)
        total = int(np.prod(self.dims))
        for p in self.povm:
            if p[0].shape[0] != total:
                raise ValueError(f"POVM acts on dimension {p[0].shape[0]}, states on {total}")
            check_povm(p)
        return self

    # -- JSON
    def to_json(self) -> dict:
        def enc(A):
            return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(A)]

        out = {
            "states": [[enc(r) for r in s] for s in self.states],
            "povm": [[enc(m) for m in p] for p in self.povm],
        }
        if self.audited is not None:
            out["audited_resources"] = list(self.audited)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "QuantumStrategy":
        def dec(A):
            arr = np.asarray(A, dtype=float)
            if arr.ndim == 2:  # a ket given as [[re, im], ...]
                v = arr[:, 0] + 1j * arr[:, 1]
                return np.outer(v, v.conj())
            return arr[..., 0] + 1j * arr[..., 1]

        states = [[dec(r) for r in s] for s in obj["states"]]
        povm = obj["povm"]
        if povm and np.asarray(povm[0], dtype=float).ndim == 3:
            povm = [povm]  # single receiver input
        return cls(states, [[dec(m) for m in p] for p in povm])

    @classmethod
    def load(cls, path) -> "QuantumStrategy":
        return cls.from_json(json.loads(Path(path).read_text()))


def coefficient_tensor(spec: ScenarioSpec, fom: FigureOfMerit) -> np.ndarray:
    """Coefficients arranged as ``C[x_1, ..., x_N, y, z]``."""
    c = fom.array().reshape((spec.n_z,) + spec.n_x + (spec.n_y,))
    return np.moveaxis(c, 0, -1)


def input_tuples(spec: ScenarioSpec):
    return list(itertools.product(*(range(n) for n in spec.n_x)))


def povm_weights(C: np.ndarray, states) -> list[list[np.ndarray]]:
    """``W[y][z] = sum_x C[x, y, z] (rho_x1 (x) ... (x) rho_xN)``."""
    n_x = C.shape[:-2]
    n_y, n_z = C.shape[-2:]
    dim = int(np.prod([s[0].shape[0] for s in states]))
    W = [[np.zeros((dim, dim), dtype=complex) for _ in range(n_z)] for _ in range(n_y)]
    for xs in itertools.product(*(range(n) for n in n_x)):
        coeff = C[xs]
        if not np.any(coeff):
            continue
        P = kron_all([states[i][x] for i, x in enumerate(xs)])
        for y in range(n_y):
            for z in range(n_z):
                if coeff[y, z]:
                    W[y][z] += coeff[y, z] * P
    return W


def evaluate(C: np.ndarray, constant: float, states, povm) -> float:
    W = povm_weights(C, states)
    return constant + float(sum(np.trace(W[y][z] @ povm[y][z]).real
                                for y in range(len(W)) for z in range(len(W[y]))))


def sender_operators(C: np.ndarray, states, povm, i: int) -> list[np.ndarray]:
    """Operators ``K_x`` with objective ``sum_x Tr(K_x rho^i_x)`` at fixed rest."""
    N = len(states)
    dims = [s[0].shape[0] for s in states]
    n_x = C.shape[:N]
    n_y, n_z = C.shape[-2:]
    di = dims[i]
    rest = [j for j in range(N) if j != i]
    Rdim = int(np.prod([dims[j] for j in rest])) if rest else 1
    perm = [i] + rest
    K = [np.zeros((di, di), dtype=complex) for _ in range(n_x[i])]
    rest_inputs = list(itertools.product(*(range(n_x[j]) for j in rest)))
    rest_ops = [kron_all([states[j][x] for j, x in zip(rest, xr)]) for xr in rest_inputs]
    for y in range(n_y):
        for z in range(n_z):
            M = povm[y][z].reshape(dims + dims)
            M = M.transpose(perm + [N + p for p in perm]).reshape(di, Rdim, di, Rdim)
            for xr, Rop in zip(rest_inputs, rest_ops):
                idx = [0] * N
                for j, x in zip(rest, xr):
                    idx[j] = x
                cs = []
                for x in range(n_x[i]):
                    idx[i] = x
                    cs.append(C[tuple(idx) + (y, z)])
                if not any(cs):
                    continue
                T = np.einsum("akbl,lk->ab", M, Rop)
                for x, c in enumerate(cs):
                    if c:
                        K[x] += c * T
    return [herm(k) for k in K]


def verify_strategy(spec: ScenarioSpec, fom: FigureOfMerit, strategy: QuantumStrategy) -> dict:
    """Value of the figure of merit and audited per-sender resources."""
    strategy.validate()
    C = coefficient_tensor(spec, fom)
    if len(strategy.states) != spec.N or any(len(s) != n for s, n in zip(strategy.states, spec.n_x)):
        raise ValueError("strategy does not match the scenario's input alphabets")
    value = evaluate(C, float(fom.constant), strategy.states, strategy.povm)
    audited = tuple(
        resource_value(strategy.states[i], [float(q) for q in spec.senders[i].prior], spec.kind)
        for i in range(spec.N)
    )
    return {"value": value, "audited_resources": audited}


def normalize_state(rho: np.ndarray) -> np.ndarray:
    lam, U = np.linalg.eigh(herm(rho))
    lam = np.clip(lam, 0.0, None)
    rho = (U * lam) @ U.conj().T
    return herm(rho / np.trace(rho).real)


def normalize_povm(M: Sequence[np.ndarray]) -> list[np.ndarray]:
    out = []
    for m in M:
        lam, U = np.linalg.eigh(herm(m))
        out.append((U * np.clip(lam, 0.0, None)) @ U.conj().T)
    S = sum(out)
    lam, U = np.linalg.eigh(herm(S))
    Sih = (U / np.sqrt(lam)) @ U.conj().T
    return [herm(Sih @ m @ Sih) for m in out]
