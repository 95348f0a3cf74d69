"""Estimator-style wrappers: fit() precomputes everything gradient-independent
(domain, system matrix, preconditioner factor, fast-marching auxiliary), then
transform() integrates gradient fields against the fitted domain.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .domain import build_domain
from .fastmarching import FmConfig, fm_prepare, integrate_fm
from .krylov import SolverConfig, build_preconditioner, cg_solve
from .poisson import (SparseSystem, assemble_matrix, assemble_rhs,
                      compatibilize, robustify_gradient)
from .datasets import GradientField
from .validation import check_gradient, check_mask


def _as_domain(X):
    if hasattr(X, "neighbors"):
        return X
    return build_domain(check_mask(X))


class PoissonIntegrator(BaseEstimator, TransformerMixin):
    """Least-squares integration of gradient fields over a fixed masked domain.

    fit(mask) assembles the system matrix and factorizes the preconditioner;
    transform(gradient) solves for depth. warm_start='fm' seeds the solver with
    the fast-marching reconstruction.
    """

    def __init__(self, preconditioner="mic", tau=1e-3, alpha=1e-3, tol=1e-4,
                 max_iter=None, warm_start="fm", robustify=False, lam=1e5,
                 auxiliary="geodesic"):
        self.preconditioner = preconditioner
        self.tau = tau
        self.alpha = alpha
        self.tol = tol
        self.max_iter = max_iter
        self.warm_start = warm_start
        self.robustify = robustify
        self.lam = lam
        self.auxiliary = auxiliary

    def fit(self, X, y=None):
        """X: boolean inside-mask (H, W) or an already built Domain."""
        self.domain_ = _as_domain(X)
        self.A_ = assemble_matrix(self.domain_)
        self.config_ = SolverConfig(tol=self.tol, max_iter=self.max_iter,
                                    preconditioner=self.preconditioner,
                                    tau=self.tau, alpha=self.alpha)
        stub = SparseSystem(n=self.domain_.n, A=self.A_,
                            b=np.zeros(self.domain_.n),
                            component_ids=self.domain_.component_of,
                            n_components=self.domain_.n_components)
        self.factor_ = build_preconditioner(stub, self.config_)
        if self.warm_start == "fm":
            self.fm_config_ = FmConfig(lam=self.lam, auxiliary=self.auxiliary)
            self.fm_prepared_ = fm_prepare(self.domain_, self.fm_config_)
        return self

    def transform(self, X):
        """X: gradient as GradientField, (p, q) pair, or (H, W, 2) array."""
        dom = self.domain_
        g = check_gradient(X, shape=dom.mask.shape)
        if self.robustify:
            rg = robustify_gradient(dom, g)
            g = GradientField(p=rg.p_bar, q=rg.q_bar)
        system = SparseSystem(n=dom.n, A=self.A_, b=assemble_rhs(dom, g),
                              component_ids=dom.component_of,
                              n_components=dom.n_components)
        system = compatibilize(system)
        x0 = None
        if self.warm_start == "fm":
            depth0 = integrate_fm(g, dom, self.fm_config_,
                                  prepared=self.fm_prepared_)
            x0 = dom.flat(depth0)
        x, stats = cg_solve(system, x0=x0, factor=self.factor_, cfg=self.config_)
        self.stats_ = stats
        return dom.grid(x)


class FastMarchingIntegrator(BaseEstimator, TransformerMixin):
    """Single-pass fast-marching integration over a fixed masked domain."""

    def __init__(self, lam=1e5, auxiliary="geodesic", seed_pixel=None):
        self.lam = lam
        self.auxiliary = auxiliary
        self.seed_pixel = seed_pixel

    def fit(self, X, y=None):
        self.domain_ = _as_domain(X)
        self.fm_config_ = FmConfig(lam=self.lam, auxiliary=self.auxiliary,
                                   seed_pixel=self.seed_pixel)
        self.fm_prepared_ = fm_prepare(self.domain_, self.fm_config_)
        return self

    def transform(self, X):
        g = check_gradient(X, shape=self.domain_.mask.shape)
        return integrate_fm(g, self.domain_, self.fm_config_,
                            prepared=self.fm_prepared_)
