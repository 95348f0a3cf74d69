"""Conjugate gradients with incomplete-Cholesky preconditioning for SPSD systems.

The factorizations are left-looking and column-oriented with the classic
linked-list column traversal, so cost stays proportional to stored fill. Two
variants share one kernel:

  ic_factorize   IC(tau):  plain drop, breakdown is an error
  mic_factorize  MIC(tau, alpha): factorizes A + alpha*diag(A); every dropped
                 Schur-complement entry s at (i, j) is added to both diagonals
                 (i, i) and (j, j), which preserves row sums of L L^T exactly;
                 pivot breakdown retries with a 10x larger shift.

Drop rule: entries inside A's lower-triangular pattern are always kept. With
tau = 0 no fill is kept at all; with tau > 0 a fill entry l_ij is kept iff
|l_ij| > tau * ||A[:, j]||_2.
"""

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit


class PivotBreakdownError(RuntimeError):
    """Nonpositive pivot encountered during incomplete factorization."""


class CgBreakdownError(RuntimeError):
    """p^T A p <= 0 twice in a row; the system is not consistent enough for CG."""


@dataclass
class SolverConfig:
    tol: float = 1e-4
    max_iter: Optional[int] = None      # default 10*sqrt(n) + 1000
    preconditioner: str = "none"        # none | ic | mic
    tau: float = 1e-3
    alpha: float = 1e-3

    def resolved_max_iter(self, n):
        if self.max_iter is not None:
            return self.max_iter
        return int(10 * np.sqrt(n) + 1000)


@dataclass
class CholeskyFactor:
    """Sparse lower-triangular factor stored by columns (CSC of L)."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    applied_alpha: float
    fill_count: int


@dataclass
class SolveStats:
    iterations: int
    residual_history: np.ndarray
    converged: bool
    wall_time: float
    restarts: int = 0


@njit(cache=True)
def _ict_kernel(n, Ap, Aj, Ax, tau, alpha, modify, colnorm):
    """Shared IC(tau)/MIC(tau, alpha) kernel. Returns (Lp, Li, Lx, nnz, fail_col)."""
    cap = 4 * len(Ax) + 16
    Li = np.empty(cap, np.int64)
    Lx = np.empty(cap, np.float64)
    Lp = np.zeros(n + 1, np.int64)

    w = np.zeros(n)
    inw = np.zeros(n, np.uint8)
    tbuf = np.empty(n, np.int64)   # rows touched in the current column
    kbuf = np.empty(n, np.int64)   # rows kept in the current column
    head = np.full(n, -1, np.int64)
    nxt = np.full(n, -1, np.int64)
    pos = np.zeros(n, np.int64)
    dcomp = np.zeros(n)
    nnz = 0

    for j in range(n):
        nt = 0
        a_lo = Ap[j]
        a_hi = Ap[j + 1]
        for t in range(a_lo, a_hi):
            i = Aj[t]
            if i >= j:
                v = Ax[t]
                if i == j:
                    v += alpha * Ax[t]
                w[i] += v
                if inw[i] == 0:
                    inw[i] = 1
                    tbuf[nt] = i
                    nt += 1
        if modify:
            w[j] += dcomp[j]

        k = head[j]
        while k != -1:
            knext = nxt[k]
            ljk = Lx[pos[k]]
            for t in range(pos[k], Lp[k + 1]):
                i = Li[t]
                w[i] -= ljk * Lx[t]
                if inw[i] == 0:
                    inw[i] = 1
                    tbuf[nt] = i
                    nt += 1
            pos[k] += 1
            if pos[k] < Lp[k + 1]:
                r = Li[pos[k]]
                nxt[k] = head[r]
                head[r] = k
            k = knext

        if w[j] <= 0.0:
            for s in range(nt):
                w[tbuf[s]] = 0.0
                inw[tbuf[s]] = 0
            return Lp, Li, Lx, nnz, j

        # drop decisions use the pre-compensation pivot
        thresh = tau * colnorm[j] * np.sqrt(w[j])
        nk = 0
        for s in range(nt):
            i = tbuf[s]
            if i == j:
                continue
            in_a = False
            for t in range(a_lo, a_hi):
                if Aj[t] == i:
                    in_a = True
                    break
            if in_a or (tau > 0.0 and abs(w[i]) > thresh):
                kbuf[nk] = i
                nk += 1
            else:
                if modify:
                    w[j] += w[i]
                    dcomp[i] += w[i]

        if w[j] <= 0.0:
            for s in range(nt):
                w[tbuf[s]] = 0.0
                inw[tbuf[s]] = 0
            return Lp, Li, Lx, nnz, j
        ljj = np.sqrt(w[j])

        kept = kbuf[:nk]
        kept.sort()
        if nnz + nk + 1 > cap:
            while nnz + nk + 1 > cap:
                cap *= 2
            Li2 = np.empty(cap, np.int64)
            Lx2 = np.empty(cap, np.float64)
            Li2[:nnz] = Li[:nnz]
            Lx2[:nnz] = Lx[:nnz]
            Li = Li2
            Lx = Lx2
        Li[nnz] = j
        Lx[nnz] = ljj
        nnz += 1
        for s in range(nk):
            i = kept[s]
            Li[nnz] = i
            Lx[nnz] = w[i] / ljj
            nnz += 1
        Lp[j + 1] = nnz

        for s in range(nt):
            w[tbuf[s]] = 0.0
            inw[tbuf[s]] = 0

        if nk > 0:
            pos[j] = Lp[j] + 1
            r = Li[pos[j]]
            nxt[j] = head[r]
            head[r] = j

    return Lp, Li, Lx, nnz, -1


@njit(cache=True)
def _forward_solve(Lp, Li, Lx, rhs):
    """Solve L y = rhs in place (column sweep)."""
    n = len(Lp) - 1
    for j in range(n):
        yj = rhs[j] / Lx[Lp[j]]
        rhs[j] = yj
        for t in range(Lp[j] + 1, Lp[j + 1]):
            rhs[Li[t]] -= Lx[t] * yj


@njit(cache=True)
def _backward_solve(Lp, Li, Lx, rhs):
    """Solve L^T z = rhs in place (dot-product form over columns of L)."""
    n = len(Lp) - 1
    for j in range(n - 1, -1, -1):
        s = rhs[j]
        for t in range(Lp[j] + 1, Lp[j + 1]):
            s -= Lx[t] * rhs[Li[t]]
        rhs[j] = s / Lx[Lp[j]]


def _column_norms(A):
    sq = A.multiply(A).sum(axis=0)
    return np.sqrt(np.asarray(sq).ravel())


def _run_kernel(A, tau, alpha, modify):
    A = A.tocsr()
    n = A.shape[0]
    colnorm = _column_norms(A)
    Lp, Li, Lx, nnz, fail = _ict_kernel(
        n, A.indptr, A.indices, A.data, float(tau), float(alpha), modify, colnorm)
    if fail >= 0:
        raise PivotBreakdownError("pivot breakdown at column %d" % fail)
    return CholeskyFactor(n=n, indptr=Lp, indices=Li[:nnz].copy(),
                          data=Lx[:nnz].copy(), applied_alpha=float(alpha),
                          fill_count=int(nnz))


def ic_factorize(A, tau=0.0):
    """Incomplete Cholesky IC(tau). Raises PivotBreakdownError on a bad pivot."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    return _run_kernel(A, tau, 0.0, False)


def mic_factorize(A, tau=0.0, alpha=1e-3):
    """Modified incomplete Cholesky MIC(tau, alpha) of A + alpha*diag(A).

    Dropped fill is folded into the diagonal so L L^T keeps the row sums of the
    shifted matrix. Retries with alpha <- max(10*alpha, 1e-3), up to 8 times.
    """
    if tau < 0 or alpha < 0:
        raise ValueError("tau and alpha must be >= 0")
    a = float(alpha)
    for attempt in range(9):
        try:
            return _run_kernel(A, tau, a, True)
        except PivotBreakdownError:
            if attempt == 8:
                raise
            a = max(10.0 * a, 1e-3)
    raise PivotBreakdownError("unreachable")


def apply_preconditioner(factor, r):
    """Solve L L^T z = r by forward then backward substitution."""
    z = np.array(r, dtype=np.float64, copy=True)
    _forward_solve(factor.indptr, factor.indices, factor.data, z)
    _backward_solve(factor.indptr, factor.indices, factor.data, z)
    return z


def build_preconditioner(system, cfg):
    """Factorize per the config; returns None for the unpreconditioned solver."""
    if cfg.preconditioner == "none":
        return None
    if cfg.preconditioner == "ic":
        return ic_factorize(system.A, cfg.tau)
    if cfg.preconditioner == "mic":
        return mic_factorize(system.A, cfg.tau, cfg.alpha)
    raise ValueError("unknown preconditioner %r" % (cfg.preconditioner,))


def _component_mean_removed(x, component_ids, n_components, which=None):
    out = x.copy()
    for c in range(n_components):
        if which is not None and not which[c]:
            continue
        m = component_ids == c
        out[m] -= out[m].mean()
    return out


def _singular_components(system):
    """Components whose indicator vector lies in the null space of A.

    Only those carry an arbitrary constant; nonsingular blocks (hand-built
    SPD test systems, pinned systems) must keep their solution untouched.
    """
    rowsum = np.asarray(system.A @ np.ones(system.n))
    scale = 1e-12 * (1.0 + np.abs(system.A.diagonal()).max())
    out = np.zeros(system.n_components, dtype=bool)
    for c in range(system.n_components):
        m = system.component_ids == c
        out[c] = np.abs(rowsum[m]).max() <= scale
    return out


def cg_solve(system, x0=None, factor=None, cfg=None):
    """(Preconditioned) conjugate gradients on A x = b.

    Stops when ||b - A x|| / ||b|| <= cfg.tol. On p^T A p <= 0 the iteration
    restarts once from a perturbed initial guess; a second breakdown raises.
    The arbitrary constant of singular components is fixed by removing their
    mean from the returned solution; nonsingular blocks are left alone.
    """
    if cfg is None:
        cfg = SolverConfig()
    A = system.A
    b = system.b
    n = system.n
    t0 = time.perf_counter()
    singular = _singular_components(system)

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64, copy=True)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        stats = SolveStats(iterations=0, residual_history=np.zeros(1),
                           converged=True, wall_time=time.perf_counter() - t0)
        return _component_mean_removed(x, system.component_ids,
                                       system.n_components, singular), stats

    max_iter = cfg.resolved_max_iter(n)
    hist = []
    iterations = 0
    restarts = 0
    converged = False

    while True:
        r = b - A @ x
        relres = np.linalg.norm(r) / bnorm
        hist.append(relres)
        if relres <= cfg.tol:
            converged = True
            break
        z = apply_preconditioner(factor, r) if factor is not None else r.copy()
        p = z.copy()
        rz = float(r @ z)
        broke = False
        while iterations < max_iter:
            Ap = A @ p
            pAp = float(p @ Ap)
            if pAp <= 0.0:
                broke = True
                break
            a = rz / pAp
            x += a * p
            r -= a * Ap
            iterations += 1
            relres = np.linalg.norm(r) / bnorm
            hist.append(relres)
            if relres <= cfg.tol:
                converged = True
                break
            z = apply_preconditioner(factor, r) if factor is not None else r.copy()
            rz_new = float(r @ z)
            p = z + (rz_new / rz) * p
            rz = rz_new
        if converged or not broke:
            break
        if restarts >= 1:
            raise CgBreakdownError("p^T A p <= 0 after restart")
        # restart from a perturbed initial guess with component-wise zero mean
        restarts += 1
        noise = np.random.default_rng(0).standard_normal(n)
        noise = _component_mean_removed(noise, system.component_ids, system.n_components)
        scale = 1e-2 * (1.0 + np.abs(x0).max() if x0 is not None else 1.0)
        x = (np.zeros(n) if x0 is None else np.asarray(x0, dtype=np.float64)) + scale * noise

    stats = SolveStats(iterations=iterations, residual_history=np.asarray(hist),
                       converged=converged, wall_time=time.perf_counter() - t0,
                       restarts=restarts)
    return _component_mean_removed(x, system.component_ids,
                                   system.n_components, singular), stats
