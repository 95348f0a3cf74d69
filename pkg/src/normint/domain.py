"""Masked pixel domains: linear indexing, neighbor tables, boundary classification.

Conventions used across the package: arrays are indexed [row, col], the x axis
runs along columns and the y axis along rows. "up" denotes the +y neighbor
(row + 1), "down" the -y neighbor, "left"/"right" the -x/+x neighbors. Linear
indices enumerate inside pixels in row-major order.
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from scipy import ndimage

from .validation import check_mask

# columns of the neighbor table
UP, DOWN, LEFT, RIGHT = 0, 1, 2, 3

# 4-connectivity
_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


class BoundaryClass(IntEnum):
    """Pixel classification by which of the 4 neighbors lie inside the domain.

    MISSING_* names the single absent neighbor, CORNER_* the absent pair,
    LINE_* the orientation of the two present neighbors, ONLY_* the single
    present neighbor. Interior pixels have all four neighbors present.
    """

    INTERIOR = 0
    MISSING_UP = 1
    MISSING_DOWN = 2
    MISSING_LEFT = 3
    MISSING_RIGHT = 4
    LINE_HORIZONTAL = 5   # up and down absent
    LINE_VERTICAL = 6     # left and right absent
    CORNER_UP_LEFT = 7    # up and left absent
    CORNER_UP_RIGHT = 8
    CORNER_DOWN_LEFT = 9
    CORNER_DOWN_RIGHT = 10
    ONLY_UP = 11
    ONLY_DOWN = 12
    ONLY_LEFT = 13
    ONLY_RIGHT = 14


class IsolatedPixelError(ValueError):
    """Raised for inside pixels with no inside neighbor (no stencil exists)."""


# presence bitmask -> class; bit 1 = up, 2 = down, 4 = left, 8 = right
_CLASS_OF_BITS = np.zeros(16, dtype=np.uint8)
_CLASS_OF_BITS[15] = BoundaryClass.INTERIOR
_CLASS_OF_BITS[14] = BoundaryClass.MISSING_UP
_CLASS_OF_BITS[13] = BoundaryClass.MISSING_DOWN
_CLASS_OF_BITS[11] = BoundaryClass.MISSING_LEFT
_CLASS_OF_BITS[7] = BoundaryClass.MISSING_RIGHT
_CLASS_OF_BITS[12] = BoundaryClass.LINE_HORIZONTAL
_CLASS_OF_BITS[3] = BoundaryClass.LINE_VERTICAL
_CLASS_OF_BITS[10] = BoundaryClass.CORNER_UP_LEFT   # down+right present
_CLASS_OF_BITS[6] = BoundaryClass.CORNER_UP_RIGHT   # down+left present
_CLASS_OF_BITS[9] = BoundaryClass.CORNER_DOWN_LEFT  # up+right present
_CLASS_OF_BITS[5] = BoundaryClass.CORNER_DOWN_RIGHT # up+left present
_CLASS_OF_BITS[1] = BoundaryClass.ONLY_UP
_CLASS_OF_BITS[2] = BoundaryClass.ONLY_DOWN
_CLASS_OF_BITS[4] = BoundaryClass.ONLY_LEFT
_CLASS_OF_BITS[8] = BoundaryClass.ONLY_RIGHT


def classify_boundary(up, down, left, right):
    """Classify a pixel from the presence of its 4 neighbors."""
    bits = int(bool(up)) | int(bool(down)) << 1 | int(bool(left)) << 2 | int(bool(right)) << 3
    if bits == 0:
        raise IsolatedPixelError("isolated pixel: no inside neighbor")
    return BoundaryClass(_CLASS_OF_BITS[bits])


@dataclass
class Domain:
    """A masked 4-connected pixel domain with row-major linear indexing.

    Immutable after construction; all per-pixel arrays are aligned with the
    linear index (0..n-1 over inside pixels, row-major scan order).
    """

    mask: np.ndarray          # (H, W) bool
    index_of: np.ndarray      # (H, W) int32, -1 outside
    rows: np.ndarray          # (n,) int32
    cols: np.ndarray          # (n,) int32
    neighbors: np.ndarray     # (n, 4) int32, columns UP/DOWN/LEFT/RIGHT, -1 if absent
    boundary_class: np.ndarray  # (n,) uint8
    component_of: np.ndarray  # (n,) int32, 0-based labels
    n_components: int

    @property
    def height(self):
        return self.mask.shape[0]

    @property
    def width(self):
        return self.mask.shape[1]

    @property
    def n(self):
        return self.rows.shape[0]

    def flat(self, field):
        """Restrict a (H, W) field to inside pixels as a length-n vector."""
        return np.ascontiguousarray(np.asarray(field)[self.rows, self.cols])

    def grid(self, values, fill=0.0):
        """Scatter a length-n vector back onto the (H, W) grid."""
        out = np.full(self.mask.shape, fill, dtype=np.float64)
        out[self.rows, self.cols] = values
        return out


def build_domain(mask):
    """Build a Domain from a boolean mask (True = inside).

    Rejects empty masks and masks containing isolated inside pixels.
    """
    inside = check_mask(mask)
    h, w = inside.shape

    index_of = np.full((h, w), -1, dtype=np.int32)
    n = int(inside.sum())
    index_of[inside] = np.arange(n, dtype=np.int32)
    rr, cc = np.nonzero(inside)
    rows = rr.astype(np.int32)
    cols = cc.astype(np.int32)

    # neighbor linear indices via shifted copies of index_of (-1 where absent)
    shifted = np.full((4, h, w), -1, dtype=np.int32)
    shifted[UP, :-1, :] = index_of[1:, :]
    shifted[DOWN, 1:, :] = index_of[:-1, :]
    shifted[LEFT, :, 1:] = index_of[:, :-1]
    shifted[RIGHT, :, :-1] = index_of[:, 1:]
    neighbors = np.ascontiguousarray(shifted[:, inside].T)  # (n, 4)

    present = neighbors >= 0
    bits = (present[:, UP].astype(np.uint8)
            | present[:, DOWN].astype(np.uint8) << 1
            | present[:, LEFT].astype(np.uint8) << 2
            | present[:, RIGHT].astype(np.uint8) << 3)
    if (bits == 0).any():
        k = int(np.nonzero(bits == 0)[0][0])
        raise IsolatedPixelError(
            "degenerate domain: isolated inside pixel at (row=%d, col=%d)"
            % (rows[k], cols[k]))
    boundary_class = _CLASS_OF_BITS[bits]

    labels2d, n_components = ndimage.label(inside, structure=_CROSS)
    component_of = (labels2d[inside] - 1).astype(np.int32)

    return Domain(mask=inside, index_of=index_of, rows=rows, cols=cols,
                  neighbors=neighbors, boundary_class=boundary_class,
                  component_of=component_of, n_components=int(n_components))


def connected_components(domain):
    """Per-pixel 4-connected component labels (0-based) and component count."""
    return domain.component_of, domain.n_components


def full_rect_domain(height, width):
    """Domain covering a full height x width rectangle."""
    return build_domain(np.ones((height, width), dtype=bool))
