"""Reconstruction quality metrics: offset-optimal MSE and SSIM."""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

# standard SSIM parameterization: 11x11 Gaussian window, stability constants
_SIGMA = 1.5
_TRUNCATE = 3.5  # radius round(3.5 * 1.5) = 5 -> 11 taps
_PAD = 5
_K1 = 0.01
_K2 = 0.03


@dataclass
class Metrics:
    mse: float
    ssim: float
    offset_used: float


def _as_mask(domain_or_mask, shape):
    if domain_or_mask is None:
        return np.ones(shape, dtype=bool)
    m = getattr(domain_or_mask, "mask", domain_or_mask)
    return np.asarray(m, dtype=bool)


def ssim(a, b, mask=None):
    """Structural similarity of a against reference b.

    Gaussian-weighted 11x11 windows (sigma 1.5), K1 = 0.01, K2 = 0.03, dynamic
    range = max - min of the reference. Masked-out pixels are excluded from the
    average (window statistics still see mean-filled values there). A constant
    reference compares equal fields to 1.0 and otherwise uses range 1.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("fields must share a shape")
    m = _as_mask(mask, a.shape)

    rng = float(b[m].max() - b[m].min())
    if rng == 0.0:
        if np.array_equal(a[m], b[m]):
            return 1.0
        rng = 1.0
    if not m.all():
        a = np.where(m, a, a[m].mean())
        b = np.where(m, b, b[m].mean())

    c1 = (_K1 * rng) ** 2
    c2 = (_K2 * rng) ** 2
    f = lambda x: gaussian_filter(x, _SIGMA, truncate=_TRUNCATE)
    mu_a = f(a)
    mu_b = f(b)
    va = f(a * a) - mu_a * mu_a
    vb = f(b * b) - mu_b * mu_b
    cov = f(a * b) - mu_a * mu_b
    s = ((2 * mu_a * mu_b + c1) * (2 * cov + c2)
         / ((mu_a * mu_a + mu_b * mu_b + c1) * (va + vb + c2)))

    # crop the filter support margin, as the reference implementation does
    keep = np.zeros_like(m)
    keep[_PAD:-_PAD, _PAD:-_PAD] = True
    keep &= m
    if not keep.any():
        keep = m
    return float(s[keep].mean())


def mse_opt(estimate, truth, domain=None):
    """MSE after the additive constant minimising it, plus SSIM of the aligned pair."""
    estimate = np.asarray(estimate, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    m = _as_mask(domain, truth.shape)
    c = float((truth[m] - estimate[m]).mean())
    mse = float(((estimate[m] + c - truth[m]) ** 2).mean())
    return Metrics(mse=mse, ssim=ssim(estimate + c, truth, m), offset_used=c)
