"""Eikonal fast marching and the auxiliary-field surface integrator."""

import numpy as np
import pytest

from conftest import grid_dijkstra
from normint.datasets import GradientField, gen_sombrero, gen_vase
from normint.domain import build_domain, full_rect_domain
from normint.fastmarching import (
    FmConfig,
    default_seeds,
    fm_prepare,
    integrate_fm,
    local_update,
    solve_eikonal,
)
from normint.metrics import mse_opt

SQRT2 = np.sqrt(2.0)


class TestLocalUpdate:
    def test_single_axis_step(self):
        assert local_update(0.0, np.inf, 1.0) == 1.0
        assert local_update(np.inf, 0.0, 1.0) == 1.0

    def test_two_axis_update(self):
        np.testing.assert_allclose(local_update(0.0, 0.0, 1.0), SQRT2 / 2)

    def test_falls_back_when_neighbors_disagree_too_much(self):
        # |m1 - m2| exceeds the speed: the quadratic has no upwind root
        assert local_update(0.0, 10.0, 1.0) == 1.0

    def test_no_upwind_information_raises(self):
        with pytest.raises(ValueError, match="upwind"):
            local_update(np.inf, np.inf, 1.0)

    def test_nonpositive_rhs_raises(self):
        with pytest.raises(ValueError, match="positive"):
            local_update(0.0, 1.0, 0.0)
        with pytest.raises(ValueError, match="positive"):
            local_update(0.0, 1.0, -2.0)


class TestEikonal:
    def test_two_by_two_from_a_corner(self):
        dom = full_rect_domain(2, 2)
        w = solve_eikonal(dom, np.ones((2, 2)), {(0, 0): 0.0})
        np.testing.assert_allclose(sorted(w), [0.0, 1.0, 1.0, (2 + SQRT2) / 2])

    def test_axis_distances_are_exact(self):
        dom = full_rect_domain(128, 128)
        w = dom.grid(solve_eikonal(dom, np.ones((128, 128)), {(63, 63): 0.0}))
        offsets = np.abs(np.arange(128) - 63).astype(np.float64)
        np.testing.assert_array_equal(w[63, :], offsets)
        np.testing.assert_array_equal(w[:, 63], offsets)

    def test_diagonal_distance_within_ten_percent(self):
        dom = full_rect_domain(128, 128)
        w = dom.grid(solve_eikonal(dom, np.ones((128, 128)), {(63, 63): 0.0}))
        exact = SQRT2 * 63
        assert abs(w[0, 0] - exact) <= 0.10 * exact
        assert abs(w[126, 126] - exact) <= 0.10 * exact

    def test_distances_around_a_wall(self):
        # a vertical wall forces paths through the bottom gap; the marching
        # distance must respect it, staying between the straight-line lower
        # bound and the 4-connected shortest-path upper bound
        mask = np.ones((40, 40), dtype=bool)
        mask[0:30, 19:21] = False
        dom = build_domain(mask)
        w = solve_eikonal(dom, np.ones((40, 40)), {(0, 5): 0.0})
        upper = grid_dijkstra(dom, (0, 5))
        assert (w <= upper + 1e-9).all()
        assert (w >= 0.70 * upper - 1e-9).all()
        tip = dom.index_of[0, 35]
        straight = np.hypot(0 - 0, 35 - 5)
        assert w[tip] > 1.5 * straight  # the wall detour is real
        assert w[tip] <= upper[tip] + 1e-9

    def test_seed_value_offsets_propagate(self):
        dom = full_rect_domain(1, 5)
        w = solve_eikonal(dom, np.ones((1, 5)), {(0, 0): 2.5})
        np.testing.assert_allclose(dom.grid(w)[0], 2.5 + np.arange(5))

    def test_rhs_accepts_grid_or_flat_and_seed_pairs_or_dict(self):
        mask = np.zeros((5, 6), dtype=bool)
        mask[:2, :2] = True
        mask[3:, 4:] = True
        dom = build_domain(mask)
        a = solve_eikonal(dom, np.ones(dom.n), {(0, 0): 0.0, (3, 4): 0.0})
        b = solve_eikonal(dom, np.ones((5, 6)), [((0, 0), 0.0), ((3, 4), 0.0)])
        np.testing.assert_array_equal(a, b)

    def test_unreachable_pixels_raise(self):
        mask = np.zeros((5, 6), dtype=bool)
        mask[:2, :2] = True
        mask[3:, 4:] = True
        dom = build_domain(mask)
        with pytest.raises(ValueError, match="unreachable"):
            solve_eikonal(dom, np.ones((5, 6)), {(0, 0): 0.0})


class TestSeeds:
    def test_one_seed_per_component(self):
        mask = np.zeros((5, 6), dtype=bool)
        mask[:2, :2] = True
        mask[3:, 4:] = True
        dom = build_domain(mask)
        seeds = default_seeds(dom)
        assert len(seeds) == 2

    def test_override_must_lie_inside(self):
        mask = np.zeros((4, 4), dtype=bool)
        mask[:2, :] = True
        dom = build_domain(mask)
        with pytest.raises(ValueError, match="outside"):
            default_seeds(dom, seed_pixel=(3, 3))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            FmConfig(lam=0.0)
        with pytest.raises(ValueError):
            FmConfig(lam=-1.0)
        with pytest.raises(ValueError):
            FmConfig(auxiliary="cubic")


class TestIntegrator:
    def test_zero_gradient_reconstructs_a_constant(self):
        dom = full_rect_domain(32, 32)
        flat = GradientField(p=np.zeros((32, 32)), q=np.zeros((32, 32)))
        for auxiliary in ("geodesic", "squared-euclidean"):
            v = integrate_fm(flat, dom, FmConfig(auxiliary=auxiliary))
            assert np.ptp(v) <= 1e-6

    def test_error_shrinks_under_refinement(self):
        errs = {}
        for n in (64, 128):
            ds = gen_sombrero(n)
            v = integrate_fm(ds.gradient, ds.domain)
            errs[n] = mse_opt(v, ds.ground_truth, ds.domain).mse
        assert errs[128] < errs[64]
        assert errs[64] < 10.0

    def test_masked_domain_reconstruction_is_subpixel(self):
        ds = gen_vase(128)
        v = integrate_fm(ds.gradient, ds.domain)
        assert mse_opt(v, ds.ground_truth, ds.domain).mse < 1.0

    def test_disconnected_domains_integrate_per_component(self):
        mask = np.zeros((5, 6), dtype=bool)
        mask[:2, :2] = True
        mask[3:, 4:] = True
        dom = build_domain(mask)
        flat = GradientField(p=np.zeros((5, 6)), q=np.zeros((5, 6)))
        v = integrate_fm(flat, dom)
        assert np.ptp(v[mask]) <= 1e-6

    def test_prepared_state_reproduces_the_direct_call(self):
        ds = gen_sombrero(32)
        prepared = fm_prepare(ds.domain)
        a = integrate_fm(ds.gradient, ds.domain, prepared=prepared)
        b = integrate_fm(ds.gradient, ds.domain)
        np.testing.assert_array_equal(a, b)
