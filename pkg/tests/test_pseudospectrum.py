import numpy as np
import pytest

from polydist.linalg_core import singular_values
from polydist.polynomial import MatrixPolynomial
from polydist.pseudospectrum import (
    PseudospectrumGrid,
    Region,
    contour_extract,
    grid_sigma_min,
    read_grid_csv,
    sigma_min_at,
    write_grid_csv,
)

from conftest import rand_poly


def test_region_validation():
    with pytest.raises(ValueError):
        Region(1, 0, 0, 1, 3, 3)
    with pytest.raises(ValueError):
        Region(0, 1, 0, 1, 1, 3)


def test_grid_values():
    P = MatrixPolynomial([-np.diag([0.0, 1.0]), np.eye(2)])
    g = grid_sigma_min(P, Region(-1, 1, -1, 1, 3, 3))
    assert g.values.shape == (3, 3)
    assert g.values[1, 1] <= 1e-10  # z = 0 is an eigenvalue
    Q = rand_poly(1, 3, 2)
    reg = Region(-1, 2, -0.5, 1, 7, 5)
    g = grid_sigma_min(Q, reg)
    i, j = 4, 2
    assert g.values[i, j] == sigma_min_at(Q, complex(reg.xs[i], reg.ys[j]))
    assert g.values[i, j] == pytest.approx(singular_values(Q.eval(complex(reg.xs[i], reg.ys[j])))[-1], rel=1e-14)


def test_nested_sublevel_sets():
    g = grid_sigma_min(rand_poly(2, 3, 2), Region(-2, 2, -2, 2, 20, 20))
    for a, b in ((0.1, 0.3), (0.3, 1.0)):
        assert np.all(g.indicator(a) <= g.indicator(b))


def test_csv_layout(tmp_path):
    P = rand_poly(3, 2, 1)
    g = grid_sigma_min(P, Region(0, 1, 0, 1, 2, 2))
    path = tmp_path / "g.csv"
    write_grid_csv(g, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,sigma_min"
    assert len(lines) == 5
    rows = read_grid_csv(path)
    assert np.array_equal(rows[:, :2], [[0, 0], [1, 0], [0, 1], [1, 1]])
    assert np.array_equal(rows[:, 2], [g.values[0, 0], g.values[1, 0], g.values[0, 1], g.values[1, 1]])


def _abs_grid(n=41):
    reg = Region(-1, 1, -1, 1, n, n)
    X, Y = np.meshgrid(reg.xs, reg.ys, indexing="ij")
    return PseudospectrumGrid(reg, np.hypot(X, Y))


def test_constant_grid_has_no_contour():
    reg = Region(0, 1, 0, 1, 4, 4)
    assert contour_extract(PseudospectrumGrid(reg, np.full((4, 4), 2.0)), 1.0) == []
    assert contour_extract(_abs_grid(40), 1e-3) == []  # below the grid minimum


def test_circle_contour():
    g = _abs_grid()
    lines = contour_extract(g, 0.5)
    assert len(lines) == 1
    pl = lines[0]
    assert np.array_equal(pl[0], pl[-1])
    diag = np.hypot(g.region.xs[1] - g.region.xs[0], g.region.ys[1] - g.region.ys[0])
    assert np.max(np.abs(np.hypot(pl[:, 0], pl[:, 1]) - 0.5)) <= 2 * diag
    assert all(g.region.contains(x, y) for x, y in pl)


def test_vertices_lie_on_edges_at_level():
    rng = np.random.default_rng(3)
    reg = Region(0, 1, 0, 2, 9, 11)
    vals = rng.uniform(0, 1, size=(9, 11))
    g = PseudospectrumGrid(reg, vals)
    for pl in contour_extract(g, 0.5):
        for x, y in pl:
            i = np.flatnonzero(np.isclose(reg.xs, x, rtol=0, atol=1e-14))
            j = np.flatnonzero(np.isclose(reg.ys, y, rtol=0, atol=1e-14))
            assert i.size or j.size
            if i.size:
                jj = np.searchsorted(reg.ys, y) - 1
                jj = min(max(jj, 0), 9)
                t = (y - reg.ys[jj]) / (reg.ys[jj + 1] - reg.ys[jj])
                val = vals[i[0], jj] + t * (vals[i[0], jj + 1] - vals[i[0], jj])
            else:
                ii = min(max(np.searchsorted(reg.xs, x) - 1, 0), 7)
                t = (x - reg.xs[ii]) / (reg.xs[ii + 1] - reg.xs[ii])
                val = vals[ii, j[0]] + t * (vals[ii + 1, j[0]] - vals[ii, j[0]])
            assert val == pytest.approx(0.5, abs=1e-12)


def test_open_curve_touches_boundary():
    reg = Region(0, 1, 0, 1, 5, 5)
    X, _ = np.meshgrid(reg.xs, reg.ys, indexing="ij")
    lines = contour_extract(PseudospectrumGrid(reg, X), 0.3)
    assert len(lines) == 1
    pl = lines[0]
    assert not np.array_equal(pl[0], pl[-1])
    assert np.allclose(pl[:, 0], 0.3)


@pytest.mark.parametrize("eps,segment", [
    (0.4, {(0.0, 0.4), (0.4, 0.0)}),  # mean above eps: low corner (0,0) cut off
    (0.6, {(0.6, 0.0), (1.0, 0.4)}),  # mean below eps: high corner (1,0) cut off
])
def test_saddle_rule(eps, segment):
    reg = Region(0, 1, 0, 1, 2, 2)
    g = PseudospectrumGrid(reg, np.array([[0.0, 1.0], [1.0, 0.0]]))
    lines = contour_extract(g, eps)
    assert len(lines) == 2
    found = [{tuple(np.round(p, 12)) for p in pl} for pl in lines]
    assert segment in found


def test_eps_must_be_positive():
    with pytest.raises(ValueError):
        contour_extract(_abs_grid(5), 0.0)
