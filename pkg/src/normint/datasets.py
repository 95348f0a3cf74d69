"""Benchmark inputs: analytic surfaces with exact gradients, image gradients, corruption.

Gradients are expressed in depth units per pixel (analytic derivatives scaled by
the physical grid step), so integration always runs on a unit-spacing grid.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial import Polynomial

from .domain import Domain, build_domain, full_rect_domain


@dataclass
class GradientField:
    """Per-pixel surface gradient: p = dv/dx (along columns), q = dv/dy (along rows)."""

    p: np.ndarray
    q: np.ndarray


@dataclass
class Dataset:
    name: str
    domain: Domain
    gradient: GradientField
    ground_truth: Optional[np.ndarray]  # (H, W), meaningful on inside pixels


def gen_sombrero(n, amplitude=30.0, extent=15.0):
    """Radially symmetric a*sin(r)/r surface on [-extent, extent]^2, near-periodic at the rim."""
    if n < 8:
        raise ValueError("n must be >= 8")
    coords = np.linspace(-extent, extent, n)
    h = 2.0 * extent / (n - 1)
    x, y = np.meshgrid(coords, coords)
    r = np.hypot(x, y)
    with np.errstate(invalid="ignore", divide="ignore"):
        v = np.where(r > 0, amplitude * np.sin(r) / r, amplitude)
        # d/dr [a sin(r)/r] = a (r cos r - sin r) / r^2, -> 0 as r -> 0
        dvdr = np.where(r > 0, amplitude * (r * np.cos(r) - np.sin(r)) / r**2, 0.0)
        ux = np.where(r > 0, x / r, 0.0)
        uy = np.where(r > 0, y / r, 0.0)
    g = GradientField(p=dvdr * ux * h, q=dvdr * uy * h)
    return Dataset("sombrero", full_rect_domain(n, n), g, v)


def gen_peaks(n):
    """The classical three-Gaussian peaks surface on [-3, 3]^2; not periodic at the border."""
    if n < 8:
        raise ValueError("n must be >= 8")
    coords = np.linspace(-3.0, 3.0, n)
    h = 6.0 / (n - 1)
    x, y = np.meshgrid(coords, coords)
    e1 = np.exp(-x**2 - (y + 1) ** 2)
    e2 = np.exp(-x**2 - y**2)
    e3 = np.exp(-((x + 1) ** 2) - y**2)
    poly2 = x / 5 - x**3 - y**5
    v = 3 * (1 - x) ** 2 * e1 - 10 * poly2 * e2 - e3 / 3
    dvdx = (3 * (-2 * (1 - x)) * e1 + 3 * (1 - x) ** 2 * (-2 * x) * e1
            - 10 * (0.2 - 3 * x**2) * e2 - 10 * poly2 * (-2 * x) * e2
            + (2.0 / 3.0) * (x + 1) * e3)
    dvdy = (3 * (1 - x) ** 2 * (-2 * (y + 1)) * e1
            + 50 * y**4 * e2 - 10 * poly2 * (-2 * y) * e2
            + (2.0 / 3.0) * y * e3)
    g = GradientField(p=dvdx * h, q=dvdy * h)
    return Dataset("peaks", full_rect_domain(n, n), g, v)


# vase silhouette profile on y in [0, 1]
_VASE_POLY = (Polynomial([0, 1]) * Polynomial([1, 6]) ** 2
              * Polynomial([-1, 1]) ** 2 * Polynomial([-2, 3]))


def gen_vase(n):
    """Half vase of revolution z = sqrt(f(y)^2 - x^2) on the mask |x| < f(y).

    Depth is scaled to pixel units; the mask is shrunk by a small z margin so
    the silhouette gradient stays finite.
    """
    if n < 16:
        raise ValueError("n must be >= 16")
    h = 1.0 / (n - 1)
    y = np.linspace(0.0, 1.0, n)[:, None]
    x = np.linspace(-0.5, 0.5, n)[None, :]
    f = 0.15 - 0.1 * _VASE_POLY(y)
    fprime = -0.1 * _VASE_POLY.deriv()(y)
    zmin = 0.08
    inside = f**2 - x**2 >= zmin**2
    z = np.sqrt(np.maximum(f**2 - x**2, zmin**2))
    v = np.where(inside, z / h, 0.0)
    p = np.where(inside, -x / z, 0.0)
    q = np.where(inside, f * fprime / z, 0.0)
    return Dataset("vase", build_domain(inside), GradientField(p=p, q=q), v)


# classic Shepp-Logan ellipses: (value, a, b, x0, y0, phi_degrees) on [-1, 1]^2
# modified (high-contrast) Shepp-Logan ellipses: intensity, a, b, x0, y0, angle
_SHEPP_LOGAN = [
    (1.00, 0.6900, 0.9200, 0.00, 0.0000, 0.0),
    (-0.80, 0.6624, 0.8740, 0.00, -0.0184, 0.0),
    (-0.20, 0.1100, 0.3100, 0.22, 0.0000, -18.0),
    (-0.20, 0.1600, 0.4100, -0.22, 0.0000, 18.0),
    (0.10, 0.2100, 0.2500, 0.00, 0.3500, 0.0),
    (0.10, 0.0460, 0.0460, 0.00, 0.1000, 0.0),
    (0.10, 0.0460, 0.0460, 0.00, -0.1000, 0.0),
    (0.10, 0.0460, 0.0230, -0.08, -0.6050, 0.0),
    (0.10, 0.0230, 0.0230, 0.00, -0.6060, 0.0),
    (0.10, 0.0230, 0.0460, 0.06, -0.6050, 0.0),
]


def shepp_logan(n):
    """Shepp-Logan head phantom at n x n, intensities scaled to [0, 255]."""
    coords = np.linspace(-1.0, 1.0, n)
    x, y = np.meshgrid(coords, coords)
    img = np.zeros((n, n))
    for value, a, b, x0, y0, phi in _SHEPP_LOGAN:
        t = np.deg2rad(phi)
        xr = (x - x0) * np.cos(t) + (y - y0) * np.sin(t)
        yr = -(x - x0) * np.sin(t) + (y - y0) * np.cos(t)
        img[(xr / a) ** 2 + (yr / b) ** 2 <= 1.0] += value
    return img * (255.0 / img.max())


def gradient_from_image(image):
    """First-order forward differences; backward at the last column/row."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < 2 or img.shape[1] < 2:
        raise ValueError("image must be 2-D with both dimensions >= 2")
    p = np.empty_like(img)
    q = np.empty_like(img)
    p[:, :-1] = img[:, 1:] - img[:, :-1]
    p[:, -1] = img[:, -1] - img[:, -2]
    q[:-1, :] = img[1:, :] - img[:-1, :]
    q[-1, :] = img[-1, :] - img[-2, :]
    return GradientField(p=p, q=q)


def gen_phantom(n):
    """Shepp-Logan intensities treated as depth, with forward-difference gradient."""
    img = shepp_logan(n)
    return Dataset("phantom", full_rect_domain(n, n), gradient_from_image(img), img)


def _gradient_sup(g):
    """max over pixels of the infinity norm of [p, q]."""
    return max(np.abs(g.p).max(), np.abs(g.q).max())


def add_noise(g, sigma_pct, seed=0):
    """Add i.i.d. Gaussian noise with sigma = sigma_pct% of max |[p, q]| to both channels."""
    if not 0 <= sigma_pct <= 100:
        raise ValueError("sigma_pct must be in [0, 100]")
    if sigma_pct == 0:
        return GradientField(p=g.p.copy(), q=g.q.copy())
    rng = np.random.default_rng(seed)
    sigma = sigma_pct / 100.0 * _gradient_sup(g)
    return GradientField(p=g.p + rng.normal(0.0, sigma, g.p.shape),
                         q=g.q + rng.normal(0.0, sigma, g.q.shape))


def inject_outliers(g, fraction, magnitude, seed=0):
    """Replace floor(fraction * n) random pixels with +-magnitude * max |[p, q]|."""
    if not 0 < fraction < 1:
        raise ValueError("fraction must be in (0, 1)")
    if magnitude <= 0:
        raise ValueError("magnitude must be positive")
    rng = np.random.default_rng(seed)
    p = g.p.copy()
    q = g.q.copy()
    k = int(np.floor(fraction * p.size))
    if k == 0:
        return GradientField(p=p, q=q)
    pos = rng.choice(p.size, size=k, replace=False)
    amp = magnitude * _gradient_sup(g)
    p.flat[pos] = amp * (2 * rng.integers(0, 2, k) - 1)
    q.flat[pos] = amp * (2 * rng.integers(0, 2, k) - 1)
    return GradientField(p=p, q=q)
