import numpy as np
import pytest

from vlinetomo import (ConfigError, RayQuadrature, ScalarField,
                       divergent_beam, directional_derivative, invert_signed,
                       moment_beam, signed_vline)
from vlinetomo.beam import beam_field, sample_with_strips, strip_ring_radius
from vlinetomo.phantoms import bump_scalar

from conftest import rel_l2

D = np.array([1.0, 0.0])


def test_quadrature_validation():
    with pytest.raises(ConfigError):
        RayQuadrature(step=0.0)
    with pytest.raises(ConfigError):
        RayQuadrature(step=0.1, interpolation="cubic")


def test_divergent_beam_closed_form(small_grid):
    # int_0^1 (1 - t^2)^3 dt = 16/35
    h = bump_scalar(small_grid)
    val = divergent_beam(h, (0.0, 0.0), D)
    assert val == pytest.approx(16.0 / 35.0, abs=5e-3)


def test_divergent_beam_misses_support(small_grid):
    h = bump_scalar(small_grid)
    assert divergent_beam(h, (1.5, 1.5), D) == 0.0


def test_moment_beam_closed_form(small_grid):
    # int_0^1 t (1 - t^2)^3 dt = 1/8
    h = bump_scalar(small_grid)
    assert moment_beam(h, (0.0, 0.0), D) == pytest.approx(0.125, abs=5e-3)


def test_moment_beam_miss_and_zero(small_grid):
    h = bump_scalar(small_grid)
    assert moment_beam(h, (1.5, 1.5), D) == 0.0
    z = ScalarField(small_grid, np.zeros((small_grid.nx, small_grid.ny)))
    assert moment_beam(z, (0.0, 0.0), D) == 0.0


def test_quadrature_second_order(grid):
    # compare against a very fine step of the same interpolant so the
    # bilinear floor cancels and only the midpoint-rule error remains
    h = bump_scalar(grid)
    ref = divergent_beam(h, (0.0, 0.0), D, RayQuadrature(grid.h / 20))
    errs = [abs(divergent_beam(h, (0.0, 0.0), D, RayQuadrature(s)) - ref)
            for s in (8 * grid.h, 4 * grid.h)]
    assert errs[0] / errs[1] >= 3.5


def test_intertwining_relation(grid):
    # X_d(D_d h) = -h away from the support edge
    h = bump_scalar(grid, scale=0.8)
    dh = directional_derivative(h, D)
    vals = beam_field(dh, D)
    interior = grid.disc_mask(0.6 * grid.r1)
    err = np.abs(vals + h.values)[interior].max()
    assert err <= 0.02 * h.max_norm()


def test_signed_vline_zero_at_origin_for_radial(grid, geom):
    h = bump_scalar(grid, scale=0.8)
    ts = signed_vline(h, geom)
    ix = int(np.argmin(np.abs(grid.xs())))
    assert abs(ts.values[ix, ix]) <= 1e-3 * np.abs(ts.values).max()


def test_signed_vline_zero_field(grid, geom):
    z = ScalarField(grid, np.zeros((grid.nx, grid.ny)))
    assert np.all(signed_vline(z, geom).values == 0.0)


def test_signed_vline_vs_fine_quadrature(grid, geom):
    h = bump_scalar(grid, center=(0.1, -0.15), scale=0.6)
    coarse = signed_vline(h, geom)
    ix = int(np.argmin(np.abs(grid.xs() + 0.5)))
    iy = int(np.argmin(np.abs(grid.ys())))
    x = (grid.xs()[ix], grid.ys()[iy])
    fine = (divergent_beam(h, x, geom.u, RayQuadrature(grid.h / 20))
            - divergent_beam(h, x, geom.v, RayQuadrature(grid.h / 20)))
    assert coarse.values[ix, iy] == pytest.approx(fine, abs=5e-3)


def test_strip_constancy_of_signed_transform(grid, geom):
    h = bump_scalar(grid, scale=0.7)
    ts = signed_vline(h, geom)
    # inside the u-strip beyond the r2 disc the data is constant along u
    ring = strip_ring_radius(grid)
    q0 = np.array([-ring, 0.2])
    vals = sample_with_strips(grid, ts.values, (geom.u, geom.v),
                              np.array([q0[0], q0[0] - 0.5, q0[0] - 2.0]),
                              np.array([q0[1], q0[1], q0[1]]))
    assert np.abs(vals - vals[0]).max() <= 1e-12 * abs(vals[0])


def test_strip_sampler_zero_outside_strips(grid, geom):
    h = bump_scalar(grid)
    ts = signed_vline(h, geom)
    vals = sample_with_strips(grid, ts.values, (geom.u, geom.v),
                              np.array([3.0]), np.array([3.0]))
    assert vals[0] == 0.0


def test_invert_signed_round_trip(geom):
    from vlinetomo import grid_for_vline
    g = grid_for_vline(128, 1.0, geom)
    h = bump_scalar(g, scale=0.8)
    rec = invert_signed(signed_vline(h, geom), geom)
    mask = g.disc_mask(g.r1)
    assert rel_l2(rec.values, h.values + 1e-300, mask) <= 0.05


def test_invert_signed_zero_and_linearity(grid, geom):
    from vlinetomo import TransformField
    z = TransformField(grid, np.zeros((grid.nx, grid.ny)), "Ts")
    assert np.all(invert_signed(z, geom).values == 0.0)
    h = bump_scalar(grid, scale=0.7)
    ts = signed_vline(h, geom)
    one = invert_signed(ts, geom).values
    scaled = invert_signed(
        TransformField(grid, 3.0 * ts.values, "Ts"), geom).values
    assert np.abs(scaled - 3.0 * one).max() <= 1e-10 * np.abs(one).max()
