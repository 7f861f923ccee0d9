import numpy as np
import pytest

from vlinetomo import (ConfigError, GeometryError, Grid2D, ScalarField,
                       TransformField, VectorField, VLineGeometry, det2,
                       direction, grid_for_vline, perp, unit_vector)


def test_perp_paper_examples():
    assert np.allclose(perp((1, 0)), (0, 1))
    assert np.allclose(perp((0, 1)), (-1, 0))


def test_perp_double_application_is_negation():
    rng = np.random.default_rng(0)
    for _ in range(10):
        x = rng.normal(size=2)
        assert np.allclose(perp(perp(x)), -x)


def test_det2_hand_value():
    assert det2((0.0, 1.0), (1.0, 0.0)) == -1.0


def test_det2_identical_vectors():
    d = direction(0.7)
    assert det2(d, d) == 0.0


def test_det2_trig_identity():
    rng = np.random.default_rng(1)
    for _ in range(20):
        a, b = rng.uniform(0, 2 * np.pi, 2)
        u, v = direction(a), direction(b)
        assert det2(v, u) == pytest.approx(np.sin(a - b), abs=1e-12)


def test_det2_equals_dot_u_perp_v():
    rng = np.random.default_rng(2)
    for _ in range(20):
        u, v = direction(rng.uniform(0, 7)), direction(rng.uniform(0, 7))
        assert det2(v, u) == pytest.approx(float(np.dot(u, perp(v))), abs=1e-15)


def test_unit_vector_rejects_non_unit():
    with pytest.raises(GeometryError):
        unit_vector((1.0, 1.0))


def test_grid_requires_disc_coverage():
    with pytest.raises(ConfigError):
        Grid2D(nx=32, ny=32, h=0.01, origin=(-0.15, -0.15), r1=0.1, r2=0.2)


def test_grid_rejects_small_counts():
    with pytest.raises(ConfigError):
        Grid2D.centered(8, 1.0, 2.0)


def test_centered_grid_contains_r2_disc():
    g = Grid2D.centered(64, 1.0, 2.0)
    assert g.xs()[0] <= -g.r2 and g.xs()[-1] >= g.r2
    assert g.ys()[0] <= -g.r2 and g.ys()[-1] >= g.r2


def test_scalar_field_shape_check(small_grid):
    with pytest.raises(ConfigError):
        ScalarField(small_grid, np.zeros((3, 3)))


def test_scalar_field_rejects_nan(small_grid):
    vals = np.zeros((small_grid.nx, small_grid.ny))
    vals[0, 0] = np.nan
    with pytest.raises(ConfigError):
        ScalarField(small_grid, vals)


def test_compactness_flag(small_grid):
    vals = np.where(small_grid.disc_mask(0.9 * small_grid.r1), 1.0, 0.0)
    assert ScalarField(small_grid, vals).is_compact()
    assert not ScalarField(small_grid, np.ones_like(vals)).is_compact()


def test_vector_field_perp(small_grid):
    rng = np.random.default_rng(3)
    f1 = rng.normal(size=(small_grid.nx, small_grid.ny))
    f2 = rng.normal(size=(small_grid.nx, small_grid.ny))
    fp = VectorField(small_grid, f1, f2).perp()
    assert np.array_equal(fp.f1, -f2) and np.array_equal(fp.f2, f1)


def test_vline_geometry_rejects_parallel():
    with pytest.raises(GeometryError):
        VLineGeometry(np.array([1.0, 0.0]), np.array([1.0, 0.0]))


def test_vline_required_r2():
    geom = VLineGeometry(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    # angle pi/2 between rays: r2 = r1 / sin(pi/4)
    assert geom.required_r2(1.0) == pytest.approx(np.sqrt(2.0), rel=1e-12)


def test_grid_for_vline_meets_requirement(oblique_geom):
    g = grid_for_vline(64, 1.0, oblique_geom)
    oblique_geom.check_grid(g)


def test_check_grid_raises_on_small_r2():
    geom = VLineGeometry(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    g = Grid2D.centered(64, 1.0, 1.2)
    with pytest.raises(GeometryError):
        geom.check_grid(g)


def test_transform_field_kinds(small_grid):
    vals = np.zeros((small_grid.nx, small_grid.ny))
    assert TransformField(small_grid, vals, "L").ncomp == 1
    two = np.zeros((2, small_grid.nx, small_grid.ny))
    assert TransformField(small_grid, two, "S").ncomp == 2
    with pytest.raises(ConfigError):
        TransformField(small_grid, vals, "Q")
