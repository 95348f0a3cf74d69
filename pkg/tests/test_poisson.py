"""Sparse Poisson assembly on masked domains, compatibilization, robust weights."""

import numpy as np
import pytest

from conftest import (
    align_per_component,
    dense_min_norm_solution,
    random_connected_mask,
)
from normint.datasets import GradientField, gen_sombrero
from normint.domain import build_domain, full_rect_domain
from normint.krylov import SolverConfig, cg_solve
from normint.poisson import (
    assemble,
    assemble_matrix,
    assemble_rhs,
    compatibilize,
    export_matrix,
    robustify_gradient,
)


def zero_gradient(shape):
    return GradientField(p=np.zeros(shape), q=np.zeros(shape))


class TestAssembly:
    def test_two_pixel_strip(self):
        dom = build_domain(np.ones((1, 2), dtype=bool))
        p = np.array([[0.8, -0.3]])
        system = assemble(dom, GradientField(p=p, q=np.zeros((1, 2))))
        np.testing.assert_array_equal(system.A.toarray(),
                                      [[1.0, -1.0], [-1.0, 1.0]])
        mean_slope = 0.5 * (0.8 - 0.3)
        np.testing.assert_allclose(system.b, [-mean_slope, mean_slope])

    def test_zero_gradient_gives_zero_rhs(self):
        dom = build_domain(random_connected_mask(np.random.default_rng(0)))
        b = assemble_rhs(dom, zero_gradient(dom.mask.shape))
        assert np.all(b == 0.0)

    def test_interior_five_point_stencil(self):
        dom = full_rect_domain(3, 3)
        A = assemble_matrix(dom).toarray()
        center = dom.index_of[1, 1]
        row = A[center]
        assert row[center] == 4.0
        neighbors = [dom.index_of[0, 1], dom.index_of[2, 1],
                     dom.index_of[1, 0], dom.index_of[1, 2]]
        for j in neighbors:
            assert row[j] == -1.0
        assert row.sum() == 0.0

    def test_matrix_invariants_on_random_masks(self, rng):
        for _ in range(25):
            dom = build_domain(random_connected_mask(rng))
            system = assemble(dom, zero_gradient(dom.mask.shape))
            A = system.A
            # exact symmetry, zero row sums, diagonal dominance with equality
            assert (A - A.T).nnz == 0
            assert np.all(A.sum(axis=1) == 0.0)
            diag = A.diagonal()
            offdiag_abs = np.asarray(np.abs(A).sum(axis=1)).ravel() - np.abs(diag)
            np.testing.assert_array_equal(diag, offdiag_abs)
            # each component's indicator lies exactly in the null space
            for c in range(system.n_components):
                indicator = (system.component_ids == c).astype(np.float64)
                assert np.all(A @ indicator == 0.0)

    def test_dirichlet_form_identity(self, rng):
        # u'Av equals the sum of (u_i - u_j)(v_i - v_j) over grid edges.
        dom = full_rect_domain(6, 7)
        A = assemble_matrix(dom)
        u = rng.normal(size=dom.n)
        v = rng.normal(size=dom.n)
        total = 0.0
        for axis in (0, 3):  # one representative per undirected edge
            nb = dom.neighbors[:, axis]
            ok = nb >= 0
            i = np.nonzero(ok)[0]
            j = nb[ok]
            total += np.sum((u[i] - u[j]) * (v[i] - v[j]))
        np.testing.assert_allclose(u @ (A @ v), total, rtol=1e-12)

    def test_small_domain_solution_matches_dense_oracle(self, rng):
        for _ in range(8):
            dom = build_domain(random_connected_mask(rng, max_side=12))
            g = GradientField(p=rng.normal(size=dom.mask.shape),
                              q=rng.normal(size=dom.mask.shape))
            system = compatibilize(assemble(dom, g))
            oracle = dense_min_norm_solution(system)
            x, stats = cg_solve(system, cfg=SolverConfig(tol=1e-10))
            assert stats.converged
            aligned = align_per_component(x, oracle, system.component_ids,
                                          system.n_components)
            np.testing.assert_allclose(aligned, oracle, atol=1e-6)


class TestCompatibilize:
    def test_two_pixel_example(self):
        dom = build_domain(np.ones((1, 2), dtype=bool))
        system = assemble(dom, zero_gradient((1, 2)))
        system.b[:] = [1.0, 1.0]
        fixed = compatibilize(system)
        np.testing.assert_array_equal(fixed.b, [0.0, 0.0])

    def test_component_sums_vanish(self, rng):
        for _ in range(10):
            dom = build_domain(random_connected_mask(rng))
            g = GradientField(p=rng.normal(size=dom.mask.shape),
                              q=rng.normal(size=dom.mask.shape))
            fixed = compatibilize(assemble(dom, g))
            for c in range(fixed.n_components):
                sel = fixed.component_ids == c
                assert abs(fixed.b[sel].sum()) <= 1e-12 * (1 + np.abs(fixed.b).max())

    def test_compatible_rhs_is_left_alone(self):
        dom = full_rect_domain(4, 4)
        system = assemble(dom, zero_gradient((4, 4)))
        before = system.b.copy()
        after = compatibilize(system)
        np.testing.assert_array_equal(after.b, before)


class TestRobustify:
    def test_smooth_field_is_nearly_unchanged(self):
        ds = gen_sombrero(128)
        rob = robustify_gradient(ds.domain, ds.gradient)
        assert np.abs(rob.p_bar - ds.gradient.p).max() < 0.01
        assert np.abs(rob.q_bar - ds.gradient.q).max() < 0.01
        assert rob.nu.min() >= 0.0

    def test_constant_gradient_passes_through_exactly(self):
        dom = full_rect_domain(9, 9)
        g = GradientField(p=np.full((9, 9), 0.4), q=np.full((9, 9), -1.1))
        rob = robustify_gradient(dom, g)
        np.testing.assert_array_equal(rob.p_bar, g.p)
        np.testing.assert_array_equal(rob.q_bar, g.q)
        np.testing.assert_array_equal(rob.nu, np.zeros((9, 9)))
        np.testing.assert_array_equal(rob.integrability, np.zeros((9, 9)))

    def test_spike_pixel_loses_most_of_its_weight(self):
        dom = full_rect_domain(9, 9)
        p = np.zeros((9, 9))
        p[4, 4] = 5.0
        rob = robustify_gradient(dom, GradientField(p=p, q=np.zeros((9, 9))))
        # the corrupted sample must be attenuated well below half
        assert abs(rob.p_bar[4, 4]) < 0.5 * p[4, 4]
        assert rob.nu[4, 4] > 1.0
        assert abs(rob.integrability[4, 4]) >= 5.0

    def test_double_channel_spike_cannot_hide_by_cancellation(self):
        # equal-sign corruption of p and q at one pixel: the residual picks
        # the difference combination that stacks the two errors
        dom = full_rect_domain(9, 9)
        p = np.zeros((9, 9))
        q = np.zeros((9, 9))
        p[4, 4] = 4.0
        q[4, 4] = 4.0
        rob = robustify_gradient(dom, GradientField(p=p, q=q))
        assert abs(rob.p_bar[4, 4]) < 0.5 * p[4, 4]
        assert abs(rob.q_bar[4, 4]) < 0.5 * q[4, 4]


def test_export_matrix_round_trips(tmp_path, rng):
    dom = build_domain(random_connected_mask(rng, max_side=8))
    system = assemble(dom, GradientField(p=rng.normal(size=dom.mask.shape),
                                         q=rng.normal(size=dom.mask.shape)))
    path = tmp_path / "system.txt"
    export_matrix(system, path)
    triples = np.loadtxt(path).reshape(-1, 3)
    rebuilt = np.zeros((system.n, system.n))
    rebuilt[triples[:, 0].astype(int), triples[:, 1].astype(int)] = triples[:, 2]
    np.testing.assert_array_equal(rebuilt, system.A.toarray())
