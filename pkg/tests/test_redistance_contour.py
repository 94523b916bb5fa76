import numpy as np
import pytest

from willmore.levelset import (
    EmptyInterfaceError,
    LevelSetField,
    extract_zero_set,
    field_from_sdf,
    inside_components,
    is_closed,
    read_field,
    redistance,
    signed_area,
    write_field,
)
from willmore.shapes import make_shape, polyline_distance

H = 4.0 / 100


def _sdf_field(name, cells=100, **params):
    return field_from_sdf(make_shape(name, **params)[1], -2.0, 2.0, cells)


@pytest.mark.parametrize("init", ["crossing", "gradient"])
def test_redistance_is_idempotent(init):
    f = _sdf_field("ellipse")
    once = redistance(f.u, f.h, init)
    twice = redistance(once, f.h, init)
    assert np.abs(twice - once).max() <= f.h / 2


@pytest.mark.parametrize("init", ["crossing", "gradient"])
def test_redistance_restores_unit_gradient(init):
    f = _sdf_field("circle")
    d = redistance(2.0 * f.u, f.h, init)
    gx, gy = np.gradient(d, f.h)
    g = np.hypot(gx, gy)[2:-2, 2:-2]
    assert 0.95 <= np.median(g) <= 1.05
    # the sign pattern is kept
    assert np.array_equal(np.sign(d), np.sign(f.u))


def test_redistance_square_distance():
    f = _sdf_field("square")
    d = redistance(np.tanh(3 * f.u), f.h)
    assert np.abs(d - f.u).max() <= 2 * f.h


def test_empty_interface():
    with pytest.raises(EmptyInterfaceError, match="empty interface"):
        redistance(np.ones((10, 10)), 0.1)
    with pytest.raises(ValueError):
        redistance(np.ones((10, 10)), 0.1, init="exact")


def test_plane_contour():
    X = np.linspace(0, 1, 11)[:, None] * np.ones((1, 11))
    f = LevelSetField(X - 0.5, 0.1)
    (line,) = extract_zero_set(f)
    assert not is_closed(line)
    assert np.allclose(line[:, 0], 0.5)
    assert np.allclose(sorted(line[:, 1]), np.linspace(0, 1, 11))


def test_circle_contour():
    f = _sdf_field("circle")
    (c,) = extract_zero_set(f)
    assert is_closed(c)
    assert np.abs(np.hypot(*c.T) - 1).max() < 5e-3
    # inside on the left: counterclockwise
    assert signed_area(c) == pytest.approx(np.pi, rel=1e-2)


def test_two_components():
    # the gap between the curves is 0.02
    f = field_from_sdf(make_shape("circle_in_ellipse")[1], -1.2, 1.2, 400)
    parts = extract_zero_set(f)
    assert len(parts) == 2 and all(is_closed(p) for p in parts)
    areas = sorted(signed_area(p) for p in parts)
    # the annulus is positive: the inner circle runs clockwise
    assert areas[0] < 0 < areas[1]


def test_inside_components_of_annulus():
    f = field_from_sdf(make_shape("circle_in_ellipse", radius=0.5)[1], -1.2, 1.2, 120)
    assert inside_components(f) == 1
    # cut the annulus along the short axis
    X, _ = f.coords()
    assert inside_components(f.replace(u=np.where(np.abs(X) < 0.05, -1.0, f.u))) == 2


def test_diagonal_contact_is_not_connected():
    u = np.full((6, 6), -1.0)
    u[2, 2] = u[3, 3] = 1.0
    assert inside_components(LevelSetField(u, 1.0)) == 2
    u[2, 3] = 1.0
    assert inside_components(LevelSetField(u, 1.0)) == 1


def test_saddle_cell_uses_average():
    u = np.full((6, 6), -1.0)
    u[2, 2] = u[3, 3] = 1.5
    joined = extract_zero_set(LevelSetField(u + 0.0, 1.0))
    u[2, 2] = u[3, 3] = 0.2
    split = extract_zero_set(LevelSetField(u, 1.0))
    assert len(joined) == 1 and len(split) == 2


def test_flower_contour_is_close(tmp_path):
    shape, sdf = make_shape("flower")
    f = field_from_sdf(sdf, -1.5, 1.5, 300)
    (c,) = extract_zero_set(f)
    d = polyline_distance(c[:, 0], c[:, 1], shape.sample(4000)[0])
    assert d.max() < 1e-3


def test_field_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    f = LevelSetField(rng.normal(size=(7, 9)), 0.125, (-1.0, 0.5), t=0.3)
    path = tmp_path / "u.txt"
    write_field(path, f)
    g = read_field(path)
    assert np.array_equal(g.u, f.u)
    assert (g.h, g.origin, g.t) == (f.h, f.origin, f.t)
    assert f.extent == (-1.0 + 6 * 0.125, 0.5 + 8 * 0.125)


def test_field_validation():
    with pytest.raises(ValueError):
        LevelSetField(np.zeros((3, 10)), 0.1)
    with pytest.raises(ValueError):
        LevelSetField(np.zeros((10, 10)), 0.0)
