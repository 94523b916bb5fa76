import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from willmore.curve import (
    DegenerateCurveError,
    curve_average_kbeta,
    curve_from_nodes,
    elastic_energy,
    init_from_parametric,
    normal_velocity,
    normal_velocity_from,
    read_curves_csv,
    write_curves_csv,
    write_polylines_csv,
)
from willmore.shapes import make_shape


@pytest.fixture
def circle():
    return make_shape("circle")[0]


def test_inscribed_square(circle):
    c = curve_from_nodes(circle.sample(4)[0])
    assert np.allclose(c.r, np.sqrt(2))


@pytest.mark.parametrize("curvature", ["turning-angle", "circumcircle"])
def test_circle_curvature(circle, curvature):
    c = init_from_parametric(circle, 100, curvature)
    assert np.all((c.k > 0.99) & (c.k < 1.01))


def test_ellipse_length():
    shape, _ = make_shape("ellipse")
    c = init_from_parametric(shape, 100)
    assert c.total_length == pytest.approx(shape.perimeter, rel=1e-2)


def test_degenerate_nodes():
    nodes = np.array([[0, 0], [1, 0], [1, 0], [0, 1]], dtype=float)
    with pytest.raises(DegenerateCurveError, match="degenerate discretization"):
        curve_from_nodes(nodes)


def test_too_few_nodes(circle):
    with pytest.raises(ValueError):
        init_from_parametric(circle, 5)


def test_length_bookkeeping(circle):
    c = init_from_parametric(circle, 30)
    assert np.allclose(c.eta, np.log(c.r))
    assert np.allclose(c.q, 0.5 * (c.r + np.roll(c.r, -1)))
    assert np.allclose(c.r, np.linalg.norm(c.nodes - np.roll(c.nodes, 1, axis=0), axis=1))


@pytest.mark.parametrize("R, n", [(0.5, 12), (1.0, 40), (3.0, 100)])
def test_normal_velocity_constant_curvature(R, n):
    r = np.full(n, 0.1)
    beta = normal_velocity_from(r, r, np.full(n, 1 / R))
    assert np.allclose(beta, -1 / (2 * R**3))


def test_normal_velocity_bump():
    k = np.zeros(9)
    k[2] = 1.0
    ones = np.ones(9)
    beta = normal_velocity_from(ones, ones, k)
    assert beta[2] == pytest.approx(1.5)
    assert beta[1] == pytest.approx(-1.0) and beta[3] == pytest.approx(-1.0)


def test_normal_velocity_unit_circle(circle):
    beta = normal_velocity(init_from_parametric(circle, 200))
    assert np.allclose(beta, -0.5, atol=1e-3)


def test_energy_circle(circle):
    c = init_from_parametric(circle, 100)
    assert elastic_energy(c) == pytest.approx(np.pi, rel=1e-2)


def test_energy_zero_curvature(circle):
    c = init_from_parametric(circle, 20)
    assert elastic_energy(c.replace(k=np.zeros(20))) == 0.0


def test_average_kbeta():
    circle = make_shape("circle")[0]
    c = init_from_parametric(circle, 64)
    c = c.replace(k=np.ones(64), beta=np.full(64, -0.5))
    assert curve_average_kbeta(c) == pytest.approx(-0.5)
    assert curve_average_kbeta(c.replace(beta=np.zeros(64))) == 0.0


def test_average_kbeta_flower():
    c = init_from_parametric(make_shape("flower")[0], 100)
    num = sum(ri * ki * bi for ri, ki, bi in zip(c.r, c.k, c.beta))
    den = sum(c.r)
    assert curve_average_kbeta(c) == pytest.approx(num / den, rel=1e-12)


@settings(deadline=None, max_examples=25)
@given(n=st.integers(8, 60), R=st.floats(0.2, 5.0), phase=st.floats(0, 1))
def test_regular_polygon_is_uniform(n, R, phase):
    u = (np.arange(n) + phase) / n
    nodes = R * np.stack([np.cos(2 * np.pi * u), np.sin(2 * np.pi * u)], axis=1)
    c = curve_from_nodes(nodes)
    assert np.allclose(c.r, c.r[0])
    assert np.allclose(c.k, c.k[0])
    # turning angle 2 pi / n over the dual length q = r
    assert c.k[0] == pytest.approx(2 * np.pi / (n * c.r[0]))


def test_clockwise_curve_has_negative_curvature(circle):
    nodes = circle.sample(50)[0][::-1]
    assert np.all(curve_from_nodes(nodes).k < 0)


def test_csv_round_trip(tmp_path, circle):
    a = init_from_parametric(circle, 16)
    b = a.replace(nodes=2 * a.nodes, t=0.25)
    path = tmp_path / "curves.csv"
    write_curves_csv(path, [a, b])
    assert path.read_text().splitlines()[0] == "t,i,x,y,k,r,alpha"
    back = read_curves_csv(path)
    assert sorted(back) == [0.0, 0.25]
    assert np.allclose(back[0.25][0], b.nodes, rtol=0, atol=1e-14)


def test_polyline_csv_multiple_components(tmp_path):
    p1 = np.array([[0, 0], [1, 0], [1, 1], [0, 0]], dtype=float)
    p2 = p1 + 5
    path = tmp_path / "contours.csv"
    write_polylines_csv(path, [(0.5, [p1, p2])])
    back = read_curves_csv(path)
    assert len(back[0.5]) == 2
    assert np.allclose(back[0.5][1], p2)
