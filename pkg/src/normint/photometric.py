"""Lambertian photometric stereo: normals from images, gradients, reprojection."""

from dataclasses import dataclass

import numpy as np

from .datasets import GradientField, gradient_from_image
from .metrics import ssim as ssim_metric

N3_MIN = 1e-2       # lower bound on n_z; steeper normals are flagged
RHO_MIN = 1e-12     # albedo below this is treated as unobserved


@dataclass
class PsProblem:
    """m >= 3 grayscale images of one surface under known directional lightings."""

    domain: object
    images: np.ndarray    # (m, H, W)
    lightings: np.ndarray  # (m, 3) rows are unit light vectors

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=np.float64)
        self.lightings = np.asarray(self.lightings, dtype=np.float64)
        if self.images.ndim != 3 or self.images.shape[0] < 3:
            raise ValueError("need at least 3 images stacked as (m, H, W)")
        if self.images.shape[1:] != self.domain.mask.shape:
            raise ValueError("images do not match the domain shape")
        if self.lightings.shape != (self.images.shape[0], 3):
            raise ValueError("lightings must be (m, 3)")
        if np.linalg.matrix_rank(self.lightings) < 3:
            raise ValueError("lighting matrix is rank deficient")


@dataclass
class NormalField:
    """Per-pixel unit normals (n_z > 0) and albedo on a domain's inside pixels."""

    domain: object
    n: np.ndarray          # (n_pixels, 3)
    albedo: np.ndarray     # (n_pixels,)
    degenerate: np.ndarray  # (n_pixels,) bool


def estimate_normals(problem):
    """Per-pixel least squares L (rho n) = I (the classical approach).

    Shadowed measurements are kept as-is. Pixels with vanishing albedo or
    n_z <= N3_MIN are flagged degenerate and set to n = (0, 0, 1), rho = 0.
    """
    dom = problem.domain
    m = problem.images.shape[0]
    intens = np.stack([dom.flat(problem.images[i]) for i in range(m)])  # (m, n)
    s = np.linalg.pinv(problem.lightings) @ intens                      # (3, n)
    rho = np.linalg.norm(s, axis=0)
    bad = rho <= RHO_MIN
    safe_rho = np.where(bad, 1.0, rho)
    n = (s / safe_rho).T
    bad |= n[:, 2] <= N3_MIN
    n[bad] = (0.0, 0.0, 1.0)
    rho = np.where(bad, 0.0, rho)
    return NormalField(domain=dom, n=n, albedo=rho, degenerate=bad)


def normals_to_gradient(nf):
    """p = -n_x / n_z, q = -n_y / n_z with n_z clamped at N3_MIN."""
    nz = np.maximum(nf.n[:, 2], N3_MIN)
    dom = nf.domain
    return GradientField(p=dom.grid(-nf.n[:, 0] / nz),
                         q=dom.grid(-nf.n[:, 1] / nz))


def gradient_to_normals(g, domain):
    """Unit normals (-p, -q, 1)/norm on inside pixels."""
    p = domain.flat(g.p)
    q = domain.flat(g.q)
    scale = 1.0 / np.sqrt(1.0 + p**2 + q**2)
    return np.stack([-p * scale, -q * scale, scale], axis=1)


def render_lambertian(normals, albedo, lightings, domain):
    """Render rho * max(n . l, 0) per lighting; returns (m, H, W)."""
    lightings = np.asarray(lightings, dtype=np.float64)
    shading = np.clip(normals @ lightings.T, 0.0, None)  # (n_pixels, m)
    return np.stack([domain.grid(albedo * shading[:, i])
                     for i in range(lightings.shape[0])])


@dataclass
class ReprojectionReport:
    images: np.ndarray       # (m, H, W) re-rendered
    mse: np.ndarray          # per image
    ssim: np.ndarray         # per image
    mean_mse: float
    mean_ssim: float


def reproject(depth, albedo, lightings, domain, images):
    """Re-render from depth (forward-difference normals) and score against inputs."""
    g = gradient_from_image(np.asarray(depth, dtype=np.float64))
    normals = gradient_to_normals(g, domain)
    rendered = render_lambertian(normals, albedo, lightings, domain)
    images = np.asarray(images, dtype=np.float64)
    mses = np.array([((domain.flat(rendered[i]) - domain.flat(images[i])) ** 2).mean()
                     for i in range(rendered.shape[0])])
    ssims = np.array([ssim_metric(rendered[i], images[i], domain.mask)
                      for i in range(rendered.shape[0])])
    return ReprojectionReport(images=rendered, mse=mses, ssim=ssims,
                              mean_mse=float(mses.mean()), mean_ssim=float(ssims.mean()))
