"""Density matrices, POVMs and random state generation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

HERM_TOL = 1e-10
PSD_TOL = 1e-9
TRACE_TOL = 1e-9
POVM_SUM_TOL = 1e-8


class InvalidState(ValueError):
    pass


class InvalidPOVM(ValueError):
    pass


class NonUnit(ValueError):
    pass


def herm(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.conj().T)


def ket(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return v


def proj(v) -> np.ndarray:
    v = ket(v)
    return np.outer(v, v.conj())


def check_unit(v, tol: float = 1e-9) -> np.ndarray:
    v = ket(v)
    if abs(np.linalg.norm(v) - 1) > tol:
        raise NonUnit(f"state vector has norm {np.linalg.norm(v):.12g}")
    return v


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated density operator."""

    entries: np.ndarray

    def __post_init__(self):
        A = np.array(self.entries, dtype=complex)
        if A.ndim == 1:
            A = proj(check_unit(A))
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise InvalidState(f"density matrix must be square, got shape {A.shape}")
        if np.max(np.abs(A - A.conj().T)) > HERM_TOL:
            raise InvalidState("density matrix is not Hermitian")
        A = herm(A)
        lam = np.linalg.eigvalsh(A)
        if lam[0] < -PSD_TOL:
            raise InvalidState(f"negative eigenvalue {lam[0]:.3e}")
        if abs(np.trace(A).real - 1) > TRACE_TOL:
            raise InvalidState(f"trace {np.trace(A).real:.12g} differs from 1")
        A.setflags(write=False)
        object.__setattr__(self, "entries", A)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def pure(cls, v) -> "DensityMatrix":
        return cls(proj(check_unit(v)))


def as_density(x) -> np.ndarray:
    return x.entries if isinstance(x, DensityMatrix) else DensityMatrix(x).entries


def check_povm(elements: Sequence[np.ndarray]) -> list[np.ndarray]:
    els = [np.asarray(E, dtype=complex) for E in elements]
    if not els:
        raise InvalidPOVM("empty POVM")
    n = els[0].shape[0]
    for E in els:
        if E.shape != (n, n):
            raise InvalidPOVM("POVM elements must share one square shape")
        if np.max(np.abs(E - E.conj().T)) > PSD_TOL:
            raise InvalidPOVM("POVM element is not Hermitian")
        if np.linalg.eigvalsh(herm(E))[0] < -PSD_TOL:
            raise InvalidPOVM("POVM element is not positive semidefinite")
    if np.max(np.abs(sum(els) - np.eye(n))) > POVM_SUM_TOL:
        raise InvalidPOVM("POVM elements do not sum to the identity")
    return [herm(E) for E in els]


@dataclass(frozen=True, eq=False)
class POVM:
    elements: tuple

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(check_povm(self.elements)))

    def __len__(self):
        return len(self.elements)


def haar_pure(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    v /= np.linalg.norm(v)
    return proj(v)


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for M in mats:
        out = np.kron(out, M)
    return out


def support_basis(A: np.ndarray, rel_tol: float = 1e-11) -> np.ndarray:
    """Orthonormal basis (columns) of the range of a PSD matrix."""
    lam, U = np.linalg.eigh(herm(A))
    top = max(lam[-1], 0.0)
    if top == 0:
        return U[:, :0]
    return U[:, lam > rel_tol * top]
