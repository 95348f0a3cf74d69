"""Sparse assembly of the least-squares integration system A x = b on a Domain.

Interior rows use the 5-point Laplacian and central-difference divergence. At
boundary pixels every reference to a value outside the domain is eliminated
with the natural boundary condition (grad v - g) . mu = 0, discretised as the
mean of forward and backward differences. That substitution collapses all
fourteen boundary stencils to one rule per axis side:

  neighbor present -> Laplacian picks up the neighbor (+1) and the divergence
  the neighbor's gradient sample (+-1/2 with the central-difference sign);
  neighbor absent  -> both drop, and the divergence keeps -+ g_ij / 2 instead.

The system is stored negated (A = -Laplacian, b = -divergence) so A is
symmetric positive semidefinite with the per-component constant null space.
"""

from dataclasses import dataclass, replace

import numpy as np
from scipy import sparse

from .domain import UP, DOWN, LEFT, RIGHT
from .validation import check_gradient


@dataclass
class SparseSystem:
    """A = -Laplacian (CSR, positive semidefinite), b = -divergence."""

    n: int
    A: sparse.csr_matrix
    b: np.ndarray
    component_ids: np.ndarray
    n_components: int
    shifts: np.ndarray = None  # per-component b shift applied by compatibilize


@dataclass
class RobustifiedGradient:
    """Gradient rescaled by exp(-I^2) where I = p_y - q_x is the integrability."""

    p_bar: np.ndarray
    q_bar: np.ndarray
    nu: np.ndarray
    integrability: np.ndarray


def assemble_matrix(domain):
    """The gradient-independent matrix A = -Laplacian with natural BC (CSR)."""
    n = domain.n
    nb = domain.neighbors
    deg = (nb >= 0).sum(axis=1).astype(np.float64)

    # CSR rows in ascending column order: DOWN < LEFT < diag < RIGHT < UP
    cols5 = np.empty((n, 5), dtype=np.int32)
    vals5 = np.empty((n, 5))
    cols5[:, 0] = nb[:, DOWN]
    cols5[:, 1] = nb[:, LEFT]
    cols5[:, 2] = np.arange(n, dtype=np.int32)
    cols5[:, 3] = nb[:, RIGHT]
    cols5[:, 4] = nb[:, UP]
    vals5[:, :] = -1.0
    vals5[:, 2] = deg
    keep = cols5 >= 0
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(keep.sum(axis=1), out=indptr[1:])
    return sparse.csr_matrix((vals5[keep], cols5[keep], indptr), shape=(n, n))


def assemble_rhs(domain, g):
    """The right-hand side b = -(discrete divergence with natural BC)."""
    g = check_gradient(g, shape=domain.mask.shape)
    n = domain.n
    nb = domain.neighbors
    present = nb >= 0

    p_in = domain.flat(g.p)
    q_in = domain.flat(g.q)

    def at(field, side):
        # field value at the side-neighbor where present, else 0
        out = np.zeros(n)
        m = present[:, side]
        out[m] = field[nb[m, side]]
        return out, m

    div = np.zeros(n)
    val, m = at(p_in, RIGHT)
    div += np.where(m, val, -p_in)
    val, m = at(p_in, LEFT)
    div += np.where(m, -val, p_in)
    val, m = at(q_in, UP)
    div += np.where(m, val, -q_in)
    val, m = at(q_in, DOWN)
    div += np.where(m, -val, q_in)
    return -0.5 * div


def assemble(domain, g):
    """Assemble the integration system for a gradient field on a domain."""
    return SparseSystem(n=domain.n, A=assemble_matrix(domain),
                        b=assemble_rhs(domain, g),
                        component_ids=domain.component_of,
                        n_components=domain.n_components)


def _one_sided_pair(field, domain, axis_pos, axis_neg):
    """Forward and backward differences along one axis.

    Each difference includes the pixel's own sample: a corrupted datum must
    raise the curl residual *at its own pixel*, not only at the neighbors (a
    centered difference is blind to the center sample).  Where one side is
    missing the other substitutes; pixels isolated along the axis get zero.
    """
    nb = domain.neighbors
    pos = nb[:, axis_pos]
    neg = nb[:, axis_neg]
    have_pos = pos >= 0
    have_neg = neg >= 0
    f_pos = np.where(have_pos, field[np.where(have_pos, pos, 0)], field)
    f_neg = np.where(have_neg, field[np.where(have_neg, neg, 0)], field)
    fwd = np.where(have_pos, f_pos - field, np.where(have_neg, field - f_neg, 0.0))
    bwd = np.where(have_neg, field - f_neg, np.where(have_pos, f_pos - field, 0.0))
    return fwd, bwd


def robustify_gradient(domain, g):
    """Downweight gradient samples by exp(-I^2), I = p_y - q_x (outlier model).

    I is the worst (largest-magnitude) curl residual over the four one-sided
    difference combinations.  Taking the worst case matters when both channels
    of one pixel are corrupted: for any sign pattern at least one combination
    stacks the two errors instead of cancelling them, so the pixel cannot keep
    its weight by accident.  On a smooth integrable field every combination is
    O(h), so the weights stay within O(h^2) of 1.
    """
    g = check_gradient(g, shape=domain.mask.shape)
    p_in = domain.flat(g.p)
    q_in = domain.flat(g.q)
    py_fwd, py_bwd = _one_sided_pair(p_in, domain, UP, DOWN)
    qx_fwd, qx_bwd = _one_sided_pair(q_in, domain, RIGHT, LEFT)
    cands = np.stack([py_fwd - qx_fwd, py_fwd - qx_bwd,
                      py_bwd - qx_fwd, py_bwd - qx_bwd])
    worst = np.argmax(np.abs(cands), axis=0)
    integ = cands[worst, np.arange(cands.shape[1])]
    # clamp the exponent so nu stays finite; tiny weights flush to zero
    i2 = np.minimum(integ**2, 700.0)
    nu = np.expm1(i2)
    weight = np.exp(-i2)
    weight[weight < 1e-300] = 0.0
    return RobustifiedGradient(p_bar=domain.grid(p_in * weight),
                               q_bar=domain.grid(q_in * weight),
                               nu=domain.grid(nu),
                               integrability=domain.grid(integ))


def compatibilize(system):
    """Remove the per-component mean of b (discrete pure-Neumann solvability)."""
    b = system.b.copy()
    shifts = np.zeros(system.n_components)
    for c in range(system.n_components):
        m = system.component_ids == c
        shifts[c] = b[m].mean()
        b[m] -= shifts[c]
    return replace(system, b=b, shifts=shifts)


def export_matrix(system, path):
    """Write A in coordinate text format: one '<row> <col> <value>' line per entry."""
    coo = system.A.tocoo()
    with open(path, "w") as fh:
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write("%d %d %.17g\n" % (r, c, v))
