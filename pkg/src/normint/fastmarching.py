"""Single-pass fast-marching surface integration.

The integrator solves ||grad w|| = sqrt((p + lam*d_x)^2 + (q + lam*d_y)^2) for
w = v + lam*d, where d is an auxiliary function that makes the right-hand side
positive: the squared distance to the seed, either Euclidean (convex domains)
or geodesic (default; computed by a first fast-marching pass with rhs = 1 and
then squared). The depth is recovered as v = w - lam*d.

The auxiliary derivatives d_x, d_y are signed one-sided differences taken
toward the neighbor with the smaller auxiliary value, i.e. against the
direction the front travels; using unsigned magnitudes here would flip the
reconstruction on the far side of the seed.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numba import njit

from .domain import UP, DOWN, LEFT, RIGHT
from .validation import check_gradient


@dataclass
class FmConfig:
    lam: float = 1e5
    seed_pixel: Optional[Tuple[int, int]] = None  # default: nearest the component centroid
    auxiliary: str = "geodesic"                   # geodesic | squared-euclidean

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.auxiliary not in ("geodesic", "squared-euclidean"):
            raise ValueError("auxiliary must be 'geodesic' or 'squared-euclidean'")


def local_update(m1, m2, F):
    """Smallest w with sum_axes max(w - m_axis, 0)^2 = F^2 on a unit grid.

    m1, m2 are the per-axis neighbor minima (inf when the axis has no usable
    neighbor). Falls back to the one-sided solution min + F when the two-sided
    quadratic root does not dominate both minima.
    """
    if not (np.isfinite(m1) or np.isfinite(m2)):
        raise ValueError("no upwind information: both axis values are infinite")
    if F <= 0:
        raise ValueError("rhs must be positive")
    if not np.isfinite(m1):
        return m2 + F
    if not np.isfinite(m2):
        return m1 + F
    if F >= abs(m1 - m2):
        return 0.5 * (m1 + m2 + np.sqrt(2.0 * F * F - (m1 - m2) ** 2))
    return min(m1, m2) + F


@njit(cache=True)
def _fm_kernel(neighbors, rhs, seed_idx, seed_val):
    n = neighbors.shape[0]
    w = np.full(n, np.inf)
    state = np.zeros(n, np.uint8)  # 0 far, 1 trial, 2 accepted
    cap = 4 * n + seed_idx.shape[0] + 1
    hv = np.empty(cap, np.float64)
    hi = np.empty(cap, np.int64)
    hn = 0

    for s in range(seed_idx.shape[0]):
        i = seed_idx[s]
        if seed_val[s] < w[i]:
            w[i] = seed_val[s]
            state[i] = 1
            # push
            c = hn
            hn += 1
            hv[c] = w[i]
            hi[c] = i
            while c > 0:
                par = (c - 1) // 2
                if hv[c] < hv[par] or (hv[c] == hv[par] and hi[c] < hi[par]):
                    hv[c], hv[par] = hv[par], hv[c]
                    hi[c], hi[par] = hi[par], hi[c]
                    c = par
                else:
                    break

    accepted = 0
    last = -np.inf
    monotone = True
    while hn > 0:
        # pop min
        v = hv[0]
        i = hi[0]
        hn -= 1
        hv[0] = hv[hn]
        hi[0] = hi[hn]
        c = 0
        while True:
            l = 2 * c + 1
            rgt = l + 1
            m = c
            if l < hn and (hv[l] < hv[m] or (hv[l] == hv[m] and hi[l] < hi[m])):
                m = l
            if rgt < hn and (hv[rgt] < hv[m] or (hv[rgt] == hv[m] and hi[rgt] < hi[m])):
                m = rgt
            if m == c:
                break
            hv[c], hv[m] = hv[m], hv[c]
            hi[c], hi[m] = hi[m], hi[c]
            c = m

        if state[i] == 2 or v != w[i]:
            continue
        state[i] = 2
        accepted += 1
        if v < last - 1e-9 * (1.0 + abs(last)):
            monotone = False
        last = v

        for s in range(4):
            j = neighbors[i, s]
            if j < 0 or state[j] == 2:
                continue
            # axis minima over accepted neighbors of j
            mx = np.inf
            jl = neighbors[j, LEFT]
            if jl >= 0 and state[jl] == 2 and w[jl] < mx:
                mx = w[jl]
            jr = neighbors[j, RIGHT]
            if jr >= 0 and state[jr] == 2 and w[jr] < mx:
                mx = w[jr]
            my = np.inf
            jd = neighbors[j, DOWN]
            if jd >= 0 and state[jd] == 2 and w[jd] < my:
                my = w[jd]
            ju = neighbors[j, UP]
            if ju >= 0 and state[ju] == 2 and w[ju] < my:
                my = w[ju]

            F = rhs[j]
            if np.isinf(mx):
                cand = my + F
            elif np.isinf(my):
                cand = mx + F
            elif F >= abs(mx - my):
                cand = 0.5 * (mx + my + np.sqrt(2.0 * F * F - (mx - my) ** 2))
            else:
                cand = min(mx, my) + F

            if cand < w[j]:
                w[j] = cand
                state[j] = 1
                c = hn
                hn += 1
                hv[c] = cand
                hi[c] = j
                while c > 0:
                    par = (c - 1) // 2
                    if hv[c] < hv[par] or (hv[c] == hv[par] and hi[c] < hi[par]):
                        hv[c], hv[par] = hv[par], hv[c]
                        hi[c], hi[par] = hi[par], hi[c]
                        c = par
                    else:
                        break

    return w, accepted, monotone


def solve_eikonal(domain, rhs, seeds):
    """Fast-marching solve of ||grad w|| = rhs from seed pixels with given values.

    rhs may be a (H, W) field or a flat length-n vector, strictly positive.
    seeds is an iterable of ((row, col), value) pairs or a {(row, col): value}
    mapping. Returns the flat length-n solution.
    """
    rhs = np.asarray(rhs, dtype=np.float64)
    if rhs.ndim == 2:
        rhs = domain.flat(rhs)
    if rhs.shape != (domain.n,):
        raise ValueError("rhs shape does not match the domain")
    if np.any(rhs <= 0):
        raise ValueError("rhs must be strictly positive")

    if isinstance(seeds, dict):
        seeds = seeds.items()
    seed_idx = []
    seed_val = []
    for (r, c), value in seeds:
        k = int(domain.index_of[r, c])
        if k < 0:
            raise ValueError("seed (%d, %d) is outside the domain" % (r, c))
        seed_idx.append(k)
        seed_val.append(float(value))
    if not seed_idx:
        raise ValueError("at least one seed is required")

    w, accepted, monotone = _fm_kernel(
        domain.neighbors, np.ascontiguousarray(rhs),
        np.asarray(seed_idx, dtype=np.int64), np.asarray(seed_val))
    if not monotone:
        raise AssertionError("fast marching accepted a decreasing value")
    if accepted < domain.n:
        raise ValueError("%d domain pixels unreachable from the seeds"
                         % (domain.n - accepted))
    return w


def default_seeds(domain, seed_pixel=None):
    """One seed per connected component, nearest that component's centroid.

    A user-supplied seed replaces the automatic choice for its component.
    """
    rows = domain.rows.astype(np.float64)
    cols = domain.cols.astype(np.float64)
    chosen = {}
    for comp in range(domain.n_components):
        m = domain.component_of == comp
        r0 = rows[m].mean()
        c0 = cols[m].mean()
        d2 = (rows[m] - r0) ** 2 + (cols[m] - c0) ** 2
        k = np.nonzero(m)[0][np.argmin(d2)]
        chosen[comp] = (int(domain.rows[k]), int(domain.cols[k]))
    if seed_pixel is not None:
        r, c = seed_pixel
        k = int(domain.index_of[r, c])
        if k < 0:
            raise ValueError("seed_pixel is outside the domain")
        chosen[int(domain.component_of[k])] = (int(r), int(c))
    return [(px, 0.0) for px in chosen.values()]


def _auxiliary(domain, cfg, seeds):
    if cfg.auxiliary == "geodesic":
        dist = solve_eikonal(domain, np.ones(domain.n), seeds)
        return dist**2
    aux = np.empty(domain.n)
    seed_of_comp = {}
    for (r, c), _ in seeds:
        seed_of_comp[int(domain.component_of[domain.index_of[r, c]])] = (r, c)
    for comp, (r, c) in seed_of_comp.items():
        m = domain.component_of == comp
        aux[m] = ((domain.rows[m] - r).astype(np.float64) ** 2
                  + (domain.cols[m] - c).astype(np.float64) ** 2)
    return aux


def _upwind_signed(aux, domain, axis_pos, axis_neg):
    """Signed Godunov difference of ``aux`` along one axis, per pixel.

    Zero where the pixel sits at or below both axis neighbors (no upwind
    information flows along that axis), otherwise the one-sided difference
    toward the smaller neighbor, signed by which side it lies on. This is
    the discrete gradient the marching solver itself sees, so feeding it
    back through the speed function reproduces the auxiliary exactly.
    """
    nb = domain.neighbors
    pos = nb[:, axis_pos]
    neg = nb[:, axis_neg]
    have_pos = pos >= 0
    have_neg = neg >= 0
    a_pos = np.where(have_pos, aux[np.where(have_pos, pos, 0)], np.inf)
    a_neg = np.where(have_neg, aux[np.where(have_neg, neg, 0)], np.inf)
    use_neg = a_neg <= a_pos
    d = np.where(use_neg, aux - a_neg, a_pos - aux)
    downhill = np.minimum(a_neg, a_pos) < aux
    return np.where(downhill & (have_pos | have_neg), d, 0.0)


def fm_prepare(domain, cfg=None):
    """Gradient-independent precomputation: seeds and the auxiliary distance field."""
    if cfg is None:
        cfg = FmConfig()
    seeds = default_seeds(domain, cfg.seed_pixel)
    return seeds, _auxiliary(domain, cfg, seeds)


def integrate_fm(g, domain, cfg=None, prepared=None):
    """Fast-marching depth reconstruction; returns a (H, W) depth map (0 outside)."""
    if cfg is None:
        cfg = FmConfig()
    g = check_gradient(g, shape=domain.mask.shape)
    seeds, aux = fm_prepare(domain, cfg) if prepared is None else prepared

    dx = _upwind_signed(aux, domain, RIGHT, LEFT)
    dy = _upwind_signed(aux, domain, UP, DOWN)
    p = domain.flat(g.p)
    q = domain.flat(g.q)
    F = np.hypot(p + cfg.lam * dx, q + cfg.lam * dy)
    np.maximum(F, 1e-30, out=F)

    w = solve_eikonal(domain, F, seeds)
    return domain.grid(w - cfg.lam * aux)
