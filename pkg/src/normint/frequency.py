"""Frequency-domain Poisson integration baselines on full rectangles.

Both solvers use the spectral symbols of the same second-order finite
differences as the sparse assembly (2cos(w) - 2 per axis for the Laplacian,
i*sin(w) for the central-difference divergence), so the only thing that
differs from the masked solver is the boundary model: periodic for the FFT
method, homogeneous Neumann (cosine basis) for the DCT method. Masked inputs
are handled by zero-padding the gradient to the bounding rectangle.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import fft as sfft

from .validation import check_gradient


@dataclass
class RectGradient:
    """Gradient on a full rectangle; mask records where values are meaningful."""

    p: np.ndarray
    q: np.ndarray
    mask: Optional[np.ndarray] = None

    @property
    def height(self):
        return self.p.shape[0]

    @property
    def width(self):
        return self.p.shape[1]


def embed_masked(domain, g):
    """Zero-fill a masked gradient onto its bounding rectangle."""
    g = check_gradient(g, shape=domain.mask.shape)
    return RectGradient(p=np.where(domain.mask, g.p, 0.0),
                        q=np.where(domain.mask, g.q, 0.0),
                        mask=domain.mask.copy())


def _as_rect(g):
    if isinstance(g, RectGradient):
        return g
    g = check_gradient(g)
    return RectGradient(p=g.p, q=g.q)


def integrate_fft(g):
    """Poisson integration with periodic boundary assumptions (Fourier basis)."""
    g = _as_rect(g)
    h, w = g.p.shape
    if h < 2 or w < 2:
        raise ValueError("rectangle must be at least 2x2")
    wx = 2.0 * np.pi * np.fft.fftfreq(w)[None, :]
    wy = 2.0 * np.pi * np.fft.fftfreq(h)[:, None]
    num = 1j * np.sin(wx) * sfft.fft2(g.p) + 1j * np.sin(wy) * sfft.fft2(g.q)
    denom = 2.0 * np.cos(wx) + 2.0 * np.cos(wy) - 4.0
    vhat = np.zeros_like(num)
    np.divide(num, denom, out=vhat, where=denom != 0)  # zero mode fixed to 0
    return np.real(sfft.ifft2(vhat))


def integrate_dct(g):
    """Poisson integration in the homogeneous-Neumann cosine basis."""
    g = _as_rect(g)
    h, w = g.p.shape
    if h < 2 or w < 2:
        raise ValueError("rectangle must be at least 2x2")
    # Central-difference divergence in the interior.  At the rectangle border
    # the cosine basis has zero normal derivative, so the prescribed boundary
    # flux is folded into the source term instead of differenced across it.
    div = np.zeros_like(g.p)
    div[:, 1:-1] += 0.5 * (g.p[:, 2:] - g.p[:, :-2])
    div[:, 0] += 0.5 * (g.p[:, 0] + g.p[:, 1])
    div[:, -1] -= 0.5 * (g.p[:, -1] + g.p[:, -2])
    div[1:-1, :] += 0.5 * (g.q[2:, :] - g.q[:-2, :])
    div[0, :] += 0.5 * (g.q[0, :] + g.q[1, :])
    div[-1, :] -= 0.5 * (g.q[-1, :] + g.q[-2, :])
    fhat = sfft.dctn(div, type=2, norm="ortho")
    kx = np.arange(w)[None, :]
    ky = np.arange(h)[:, None]
    denom = 2.0 * np.cos(np.pi * kx / w) + 2.0 * np.cos(np.pi * ky / h) - 4.0
    vhat = np.zeros_like(fhat)
    np.divide(fhat, denom, out=vhat, where=denom != 0)  # zero mode fixed to 0
    return sfft.idctn(vhat, type=2, norm="ortho")
