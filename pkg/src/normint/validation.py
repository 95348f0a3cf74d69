"""Small input-validation helpers shared by the public entry points."""

import numpy as np


def check_mask(mask):
    """Validate and normalize a domain mask to a 2-D boolean array."""
    m = np.asarray(mask)
    if m.ndim != 2:
        raise ValueError("mask must be 2-D, got shape %r" % (m.shape,))
    if m.size == 0:
        raise ValueError("mask must be non-empty")
    m = m.astype(bool, copy=False)
    if not m.any():
        raise ValueError("mask has no inside cells")
    return m


def check_field(arr, shape=None, name="field"):
    """Validate a 2-D float field, optionally against an expected shape."""
    a = np.asarray(arr, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("%s must be 2-D, got shape %r" % (name, a.shape))
    if shape is not None and a.shape != tuple(shape):
        raise ValueError("%s has shape %r, expected %r" % (name, a.shape, tuple(shape)))
    if not np.all(np.isfinite(a)):
        raise ValueError("%s contains non-finite values" % name)
    return a


def check_gradient(g, shape=None):
    """Validate a gradient field; accepts GradientField, (p, q) pair, or (H, W, 2) array."""
    from .datasets import GradientField

    if isinstance(g, GradientField):
        p, q = g.p, g.q
    elif isinstance(g, (tuple, list)) and len(g) == 2:
        p, q = g
    else:
        a = np.asarray(g)
        if a.ndim == 3 and a.shape[2] == 2:
            p, q = a[:, :, 0], a[:, :, 1]
        else:
            raise ValueError("gradient must be GradientField, (p, q), or (H, W, 2) array")
    p = check_field(p, shape, "p")
    q = check_field(q, p.shape, "q")
    return GradientField(p=p, q=q)
