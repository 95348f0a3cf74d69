"""On-disk formats: Gf gradient pairs, PFM depth maps, masks, lightings, reports."""

import json
import sys

import numpy as np
from PIL import Image


def write_gradient(path, g):
    """Two-channel float32 little-endian gradient with a 2-line text header."""
    data = np.stack([g.p, g.q], axis=-1).astype("<f4")
    h, w = g.p.shape
    with open(path, "wb") as fh:
        fh.write(b"Gf\n%d %d\n" % (w, h))
        fh.write(data.tobytes())


def read_gradient(path):
    from .datasets import GradientField

    with open(path, "rb") as fh:
        if fh.readline().strip() != b"Gf":
            raise ValueError("not a Gf gradient file: %s" % path)
        w, h = (int(t) for t in fh.readline().split())
        data = np.frombuffer(fh.read(w * h * 2 * 4), dtype="<f4")
    data = data.reshape(h, w, 2).astype(np.float64)
    return GradientField(p=data[:, :, 0], q=data[:, :, 1])


def write_pfm(path, arr):
    """Single-channel PFM, scale -1 (little-endian), rows stored bottom-up."""
    a = np.asarray(arr, dtype="<f4")
    h, w = a.shape
    with open(path, "wb") as fh:
        fh.write(b"Pf\n%d %d\n-1.0\n" % (w, h))
        fh.write(a[::-1].tobytes())


def read_pfm(path):
    with open(path, "rb") as fh:
        if fh.readline().strip() != b"Pf":
            raise ValueError("not a grayscale PFM file: %s" % path)
        w, h = (int(t) for t in fh.readline().split())
        scale = float(fh.readline())
        dtype = "<f4" if scale < 0 else ">f4"
        data = np.frombuffer(fh.read(w * h * 4), dtype=dtype)
    return data.reshape(h, w)[::-1].astype(np.float64)


def write_mask(path, mask):
    img = Image.fromarray(np.where(mask, 255, 0).astype(np.uint8), mode="L")
    img.save(path)


def read_mask(path):
    """8-bit grayscale image; value > 127 means inside."""
    img = Image.open(path).convert("L")
    return np.asarray(img) > 127


def read_gray(path):
    return np.asarray(Image.open(path).convert("L"), dtype=np.float64)


def write_gray(path, arr):
    a = np.asarray(arr, dtype=np.float64)
    Image.fromarray(np.clip(a, 0, 255).astype(np.uint8), mode="L").save(path)


def read_lightings(path):
    """One whitespace-separated 'lx ly lz' triple per line."""
    l = np.loadtxt(path, dtype=np.float64)
    l = np.atleast_2d(l)
    if l.shape[1] != 3:
        raise ValueError("lightings file must have 3 columns")
    return l


def write_lightings(path, lightings):
    np.savetxt(path, np.asarray(lightings, dtype=np.float64), fmt="%.17g")


def write_error_map(path, err, cap):
    """Absolute-error color map: blue at 0 ramping to red at >= cap."""
    e = np.clip(np.abs(np.asarray(err, dtype=np.float64)) / cap, 0.0, 1.0)
    rgb = np.zeros(e.shape + (3,), dtype=np.uint8)
    rgb[:, :, 0] = np.round(255 * e)
    rgb[:, :, 2] = np.round(255 * (1.0 - e))
    Image.fromarray(rgb, mode="RGB").save(path)


def write_normal_map(path, normals_grid):
    """(H, W, 3) unit normals encoded as RGB in [0, 255]."""
    rgb = np.round((np.clip(normals_grid, -1, 1) + 1.0) * 127.5).astype(np.uint8)
    Image.fromarray(rgb, mode="RGB").save(path)


def write_manifest(path, payload):
    """Run manifest: the spec that produced the outputs plus library versions."""
    import numba
    import scipy

    payload = dict(payload)
    payload["versions"] = {
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
