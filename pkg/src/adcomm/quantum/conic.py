"""Conic layer: a primal-dual interior-point solver for small complex SDPs.

Problems are posed in standard primal form over a block-diagonal variable
whose blocks are Hermitian PSD matrices or nonnegative scalars::

    min/max  <C, X>   s.t.  <A_i, X> = b_i,   X >= 0

with ``<A, X> = Re Tr(A X)``.  Inequalities, affine PSD constraints and
matrix equalities are rewritten into that form with slack blocks.  The
iteration is the HKM direction with a Mehrotra predictor-corrector; the
Schur complement is assembled from sparse constraint rows, which keeps the
measurement steps of a see-saw cheap.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

logger = logging.getLogger(__name__)

GAP_TOL = 1e-8


class ConicError(Exception):
    """Base class for solver failures."""


class Infeasible(ConicError):
    pass


class NumericalFailure(ConicError):
    pass


@dataclass(frozen=True)
class Block:
    name: str
    n: int


class Form:
    """Real linear functional ``sum_k Re Tr(K_k X_k) + sum_j a_j t_j``."""

    __slots__ = ("mats", "lin")

    def __init__(self, mats=None, lin=None):
        self.mats = dict(mats or {})
        self.lin = dict(lin or {})

    def __add__(self, other):
        out = Form(self.mats, self.lin)
        for k, v in other.mats.items():
            out.mats[k] = out.mats[k] + v if k in out.mats else v
        for k, v in other.lin.items():
            out.lin[k] = out.lin.get(k, 0.0) + v
        return out

    def __mul__(self, s):
        return Form({k: s * v for k, v in self.mats.items()},
                    {k: s * v for k, v in self.lin.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def evaluate(self, values) -> float:
        out = sum(np.real(np.trace(K @ values[k])) for k, K in self.mats.items())
        out += sum(a * values[k] for k, a in self.lin.items())
        return float(out)


def _herm(A):
    return 0.5 * (A + A.conj().T)


@dataclass
class ConicSolution:
    optimum: float
    values: dict
    gap: float
    iterations: int
    y: np.ndarray = field(repr=False, default=None)


@dataclass
class ConicProblem:
    """Builder for a standard-form problem; see the module docstring."""

    sense: str = "max"

    def __post_init__(self):
        self.blocks: dict[str, Block] = {}
        self.scalars: list[str] = []
        self.objective = Form()
        self.obj_constant = 0.0
        self._rows: list[tuple[Form, float]] = []
        self._mat_eqs: list[tuple[list, np.ndarray]] = []
        self._nslack = 0

    # -- variables -------------------------------------------------------
    def psd(self, name: str, n: int) -> Block:
        if name in self.blocks or name in self.scalars:
            raise ValueError(f"duplicate variable {name!r}")
        blk = Block(name, n)
        self.blocks[name] = blk
        return blk

    def nonneg(self, name: str) -> str:
        if name in self.blocks or name in self.scalars:
            raise ValueError(f"duplicate variable {name!r}")
        self.scalars.append(name)
        return name

    # -- forms -----------------------------------------------------------
    @staticmethod
    def inner(block: Block, K, weight: float = 1.0) -> Form:
        return Form({block.name: weight * _herm(np.asarray(K, dtype=complex))})

    @staticmethod
    def trace(block: Block, weight: float = 1.0) -> Form:
        return Form({block.name: weight * np.eye(block.n, dtype=complex)})

    @staticmethod
    def var(name: str, weight: float = 1.0) -> Form:
        return Form(lin={name: float(weight)})

    # -- constraints -----------------------------------------------------
    def add_objective(self, form: Form, constant: float = 0.0):
        self.objective = self.objective + form
        self.obj_constant += constant

    def add_eq(self, form: Form, rhs: float):
        self._rows.append((form, float(rhs)))

    def add_le(self, form: Form, rhs: float):
        s = self.nonneg(f"_slack{self._nslack}")
        self._nslack += 1
        self.add_eq(form + self.var(s), rhs)

    def add_ge(self, form: Form, rhs: float):
        self.add_le(-form, -rhs)

    def add_matrix_eq(self, terms, const):
        """``sum(coef * X) == const`` as Hermitian matrices."""
        self._mat_eqs.append(([(float(c), b) for c, b in terms],
                              np.asarray(const, dtype=complex)))

    def add_psd(self, terms, const=None) -> Block:
        """Require ``sum(coef * X) + const`` PSD through a slack block."""
        n = terms[0][1].n
        if const is None:
            const = np.zeros((n, n))
        S = self.psd(f"_slack{self._nslack}", n)
        self._nslack += 1
        self.add_matrix_eq([(1.0, S)] + [(-c, b) for c, b in terms], const)
        return S

    # -- assembly --------------------------------------------------------
    def _assemble(self):
        names = list(self.blocks)
        sidx = {k: i for i, k in enumerate(self.scalars)}
        coo = {k: ([], [], []) for k in names}
        lin_r, lin_c, lin_v = [], [], []
        b = []
        r = 0
        for form, rhs in self._rows:
            for k, K in form.mats.items():
                n = self.blocks[k].n
                v = np.conj(_herm(K)).reshape(-1)
                nz = np.nonzero(v)[0]
                coo[k][0].append(np.full(len(nz), r)); coo[k][1].append(nz); coo[k][2].append(v[nz])
            for k, a in form.lin.items():
                lin_r.append(r); lin_c.append(sidx[k]); lin_v.append(a)
            b.append(rhs)
            r += 1
        for terms, C in self._mat_eqs:
            n = terms[0][1].n
            iu, ju = np.triu_indices(n, k=1)
            m = len(iu)
            rows_d = np.arange(r, r + n)
            rows_re = np.arange(r + n, r + n + m)
            rows_im = np.arange(r + n + m, r + n + 2 * m)
            for c, blk in terms:
                rr, cc, vv = coo[blk.name]
                dpos = np.arange(n) * (n + 1)
                rr.append(rows_d); cc.append(dpos); vv.append(np.full(n, c, dtype=complex))
                pq, qp = iu * n + ju, ju * n + iu
                rr.extend([rows_re, rows_re, rows_im, rows_im])
                cc.extend([pq, qp, pq, qp])
                vv.extend([np.full(m, c / 2, dtype=complex), np.full(m, c / 2, dtype=complex),
                           np.full(m, -0.5j * c), np.full(m, 0.5j * c)])
            b.extend(np.real(np.diag(C)).tolist())
            b.extend(C[iu, ju].real.tolist())
            b.extend(C[iu, ju].imag.tolist())
            r += n * n
        m_rows = r
        R = []
        for k in names:
            n = self.blocks[k].n
            rr, cc, vv = coo[k]
            if rr:
                M = sp.csr_matrix((np.concatenate(vv), (np.concatenate(rr), np.concatenate(cc))),
                                  shape=(m_rows, n * n))
            else:
                M = sp.csr_matrix((m_rows, n * n), dtype=complex)
            R.append(M)
        Al = sp.csr_matrix((lin_v, (lin_r, lin_c)), shape=(m_rows, len(self.scalars)))
        sign = -1.0 if self.sense == "max" else 1.0
        C = [sign * _herm(self.objective.mats.get(k, np.zeros((self.blocks[k].n,) * 2)))
             .astype(complex) for k in names]
        c = sign * np.array([self.objective.lin.get(k, 0.0) for k in self.scalars])
        return names, C, R, c, Al, np.asarray(b, dtype=float)


def _max_step(X, dX):
    """Largest alpha with X + alpha dX PSD (X positive definite)."""
    try:
        L = np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        return 0.0
    Li = sla.solve_triangular(L, np.eye(len(X)), lower=True)
    W = Li @ dX @ Li.conj().T
    lam = np.linalg.eigvalsh(_herm(W))[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _inv_pd(Z):
    lam, U = np.linalg.eigh(_herm(Z))
    lam = np.maximum(lam, 1e-14 * max(lam[-1], 1e-300))
    return _herm((U / lam) @ U.conj().T)


def _max_step_lp(x, dx):
    neg = dx < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-x[neg] / dx[neg]))


def _solve_standard(C, R, c, Al, b, tol, max_iter):
    """Minimize <C, X> + c.t s.t. A(X) + Al t = b over PSD blocks and t >= 0."""
    m = len(b)
    nl = len(c)
    # row scaling
    norms = np.zeros(m)
    for Rk in R:
        norms += np.asarray(abs(Rk).power(2).sum(axis=1)).ravel()
    norms += np.asarray(Al.power(2).sum(axis=1)).ravel()
    norms = np.sqrt(norms)
    if np.any(norms == 0):
        bad = norms == 0
        if np.any(np.abs(b[bad]) > 1e-12):
            raise Infeasible("empty constraint row with nonzero right-hand side")
        norms[bad] = 1.0
    Dinv = sp.diags(1.0 / norms)
    R = [(Dinv @ Rk).tocsr() for Rk in R]
    RH = [Rk.conj().T.tocsr() for Rk in R]
    Al = (Dinv @ Al).tocsr()
    b = b / norms
    ns = [Ck.shape[0] for Ck in C]
    ntot = sum(ns) + nl

    def A_op(Xs, x):
        out = Al @ x if nl else np.zeros(m)
        for Rk, Xk in zip(R, Xs):
            out = out + np.real(Rk @ Xk.reshape(-1))
        return out

    def At_op(y):
        return [(RHk @ y).reshape(n, n) for RHk, n in zip(RH, ns)], (Al.T @ y if nl else np.zeros(0))

    normC = max(1.0, np.sqrt(sum(np.linalg.norm(Ck) ** 2 for Ck in C) + np.dot(c, c)))
    normb = max(1.0, np.linalg.norm(b))
    xi = max(10.0, np.sqrt(max(ns + [nl, 1])), max(ns + [1]) * np.max(1 + np.abs(b)))
    eta = max(10.0, normC)
    X = [xi * np.eye(n, dtype=complex) for n in ns]
    Z = [eta * np.eye(n, dtype=complex) for n in ns]
    x = np.full(nl, xi)
    z = np.full(nl, eta)
    y = np.zeros(m)

    it = 0
    relgap = np.inf
    for it in range(1, max_iter + 1):
        AtY, aty = At_op(y)
        rp = b - A_op(X, x)
        Rd = [Ck - Zk - Ak for Ck, Zk, Ak in zip(C, Z, AtY)]
        rd = c - z - aty
        pobj = sum(np.real(np.trace(Ck @ Xk)) for Ck, Xk in zip(C, X)) + c @ x
        dobj = b @ y
        gap = sum(np.real(np.trace(Xk @ Zk)) for Xk, Zk in zip(X, Z)) + x @ z
        mu = gap / ntot
        relgap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        pinf = np.linalg.norm(rp) / normb
        dinf = np.sqrt(sum(np.linalg.norm(r) ** 2 for r in Rd) + rd @ rd) / normC
        if relgap < tol and pinf < tol and dinf < tol:
            break
        if abs(dobj) > 1e12 and pinf > 1e-6:
            raise Infeasible("primal infeasible (dual objective diverges)")
        if abs(pobj) > 1e12 and dinf > 1e-6:
            raise Infeasible("dual infeasible (primal objective diverges)")

        Zinv = [_inv_pd(Zk) for Zk in Z]
        M = np.zeros((m, m))
        for Rk, RHk, Xk, Zi in zip(R, RH, X, Zinv):
            if Rk.nnz == 0:
                continue
            K = np.kron(Xk, Zi.T)
            M += np.real((Rk @ K) @ RHk)
        if nl:
            M += (Al @ sp.diags(x / z) @ Al.T).toarray()
        M = 0.5 * (M + M.T)
        try:
            cho = sla.cho_factor(M + 1e-14 * np.trace(M) / m * np.eye(m))
            base = lambda v: sla.cho_solve(cho, v)
        except np.linalg.LinAlgError:
            Mp = np.linalg.pinv(M)
            base = lambda v: Mp @ v

        def solve(v):
            # one step of iterative refinement keeps the primal residual from stalling
            u = base(v)
            return u + base(v - M @ u)

        def direction(TZi, tlp):
            # TZi: per block T Z^{-1}; tlp: LP target t (dx z + x dz = t)
            rhs = rp - A_op([tz - Xk @ Rdk @ Zi for tz, Xk, Rdk, Zi in zip(TZi, X, Rd, Zinv)],
                            (tlp - x * rd) / z if nl else x)
            dy = solve(rhs)
            AtdY, atdy = At_op(dy)
            dZ = [Rdk - Ak for Rdk, Ak in zip(Rd, AtdY)]
            dX = [_herm(tz - Xk @ dZk @ Zi) for tz, Xk, dZk, Zi in zip(TZi, X, dZ, Zinv)]
            dz = rd - atdy
            dx = (tlp - x * dz) / z if nl else np.zeros(0)
            return dX, dy, dZ, dx, dz

        def steps(dX, dZ, dx, dz):
            ap = min([_max_step(Xk, d) for Xk, d in zip(X, dX)] + [_max_step_lp(x, dx)] if nl
                     else [_max_step(Xk, d) for Xk, d in zip(X, dX)])
            ad = min([_max_step(Zk, d) for Zk, d in zip(Z, dZ)] + [_max_step_lp(z, dz)] if nl
                     else [_max_step(Zk, d) for Zk, d in zip(Z, dZ)])
            return ap, ad

        # predictor
        dX, dy, dZ, dx, dz = direction([-Xk for Xk in X], -x * z)
        ap, ad = steps(dX, dZ, dx, dz)
        ap, ad = min(1.0, ap), min(1.0, ad)
        gap_aff = sum(np.real(np.trace((Xk + ap * a) @ (Zk + ad * bb)))
                      for Xk, a, Zk, bb in zip(X, dX, Z, dZ))
        if nl:
            gap_aff += (x + ap * dx) @ (z + ad * dz)
        sigma = min(1.0, max(0.0, gap_aff / gap)) ** 3
        # corrector
        TZi = [sigma * mu * Zi - Xk - a @ bb @ Zi for Zi, Xk, a, bb in zip(Zinv, X, dX, dZ)]
        tlp = sigma * mu - x * z - dx * dz if nl else np.zeros(0)
        dX, dy, dZ, dx, dz = direction(TZi, tlp)
        ap, ad = steps(dX, dZ, dx, dz)
        gamma = 0.98
        ap, ad = min(1.0, gamma * ap), min(1.0, gamma * ad)
        X = [_herm(Xk + ap * d) for Xk, d in zip(X, dX)]
        Z = [_herm(Zk + ad * d) for Zk, d in zip(Z, dZ)]
        y = y + ad * dy
        if nl:
            x = x + ap * dx
            z = z + ad * dz
        if ap < 1e-12 and ad < 1e-12:
            break
    else:
        it = max_iter
    return X, x, y * 1.0 / norms, pobj, dobj, relgap, pinf, dinf, it


def conic_solve(p: ConicProblem, tol: float = 1e-10, max_iter: int = 80) -> ConicSolution:
    """Solve ``p``; the returned gap is the relative primal-dual gap."""
    names, C, R, c, Al, b = p._assemble()
    X, x, y, pobj, dobj, relgap, pinf, dinf, it = _solve_standard(C, R, c, Al, b, tol, max_iter)
    if relgap > GAP_TOL or pinf > 1e-7 or dinf > 1e-7:
        if pinf > 1e-4:
            raise Infeasible(f"primal residual {pinf:.2e} after {it} iterations")
        raise NumericalFailure(f"gap={relgap:.2e} pinf={pinf:.2e} dinf={dinf:.2e} after {it} iterations")
    sign = -1.0 if p.sense == "max" else 1.0
    values = dict(zip(names, X))
    values.update(dict(zip(p.scalars, x.tolist())))
    return ConicSolution(sign * pobj + p.obj_constant, values, relgap, it, sign * y)
