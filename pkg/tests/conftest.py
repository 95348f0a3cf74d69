"""Shared fixtures and reference oracles used across the test suite.

The oracles here are intentionally written with different algorithms than the
library under test: dense pseudo-inverse solves instead of CG, graph Dijkstra
instead of fast marching, explicit loops instead of vectorized stencils.
Agreement between the two paths is the evidence the tests rely on.
"""

import sys

import numpy as np
import pytest
import scipy.ndimage as ndi
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra as graph_dijkstra

from normint.domain import build_domain


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance-criteria verdict lines after the test summary."""
    mod = sys.modules.get("test_acceptance")
    report = getattr(mod, "REPORT", None) if mod else None
    if report:
        terminalreporter.section("acceptance criteria")
        for line in sorted(report):
            terminalreporter.write_line(line)

FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=int)


def random_connected_mask(rng, max_side=20, keep_prob=0.7):
    """A random 4-connected mask with at least two pixels and no isolated ones.

    Draws a Bernoulli field, keeps its largest 4-connected component, and
    retries until that component has >= 2 pixels (a single pixel has no
    neighbor to difference against and is rejected by the domain builder).
    """
    while True:
        h = int(rng.integers(1, max_side + 1))
        w = int(rng.integers(1, max_side + 1))
        cand = rng.random((h, w)) < keep_prob
        if not cand.any():
            continue
        labels, count = ndi.label(cand, structure=FOUR_CONNECTED)
        if count == 0:
            continue
        sizes = ndi.sum_labels(np.ones_like(labels), labels,
                               index=np.arange(1, count + 1))
        mask = labels == (1 + int(np.argmax(sizes)))
        if mask.sum() >= 2:
            return mask


def random_domain(rng, max_side=20):
    return build_domain(random_connected_mask(rng, max_side=max_side))


def dense_min_norm_solution(system):
    """Minimum-norm least-squares solution of the assembled system.

    Dense pseudo-inverse; only usable on small domains, which is the point --
    it shares no code with the CG path.
    """
    return np.linalg.pinv(system.A.toarray()) @ system.b


def align_per_component(x, reference, component_ids, n_components):
    """Shift x by a constant per connected component to best match reference."""
    out = x.copy()
    for c in range(n_components):
        sel = component_ids == c
        out[sel] += (reference[sel] - x[sel]).mean()
    return out


def grid_dijkstra(domain, seed_pixel):
    """Unit-cost shortest-path distance on the 4-connected pixel graph.

    Upper bound oracle for unit-rhs eikonal distances: the fast-marching
    two-sided update can only undercut single-edge paths, never exceed them.
    """
    rows, cols, data = [], [], []
    for axis in range(4):
        nb = domain.neighbors[:, axis]
        ok = nb >= 0
        rows.append(np.nonzero(ok)[0])
        cols.append(nb[ok])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    graph = sp.csr_matrix((np.ones(rows.size), (rows, cols)),
                          shape=(domain.n, domain.n))
    return graph_dijkstra(graph, directed=False,
                          indices=int(domain.index_of[seed_pixel]))


def tilted_lights(tilt_deg, azimuth_deg=(0.0, 90.0, 180.0, 270.0)):
    """Unit light directions at a common zenith tilt and the given azimuths."""
    t = np.deg2rad(tilt_deg)
    out = [(np.sin(t) * np.cos(np.deg2rad(a)),
            np.sin(t) * np.sin(np.deg2rad(a)),
            np.cos(t)) for a in azimuth_deg]
    return np.asarray(out, dtype=np.float64)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
