import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rdmass.mesh import build_interval, build_rectangle


def test_interval_basic():
    m = build_interval(1, 4)
    assert m.cell_volume == 0.25
    assert m.bface_mid.ravel().tolist() == [0.0, 1.0]
    assert m.bface_area.tolist() == [1.0, 1.0]


def test_interval_two_cells():
    m = build_interval(2, 2)
    assert m.n_interior_faces == 1 and m.face_area[0] == 1 and m.face_dist[0] == 1


def test_interval_partition():
    assert abs(build_interval(1, 200).volumes.sum() - 1) < 1e-14


def test_rectangle_counts():
    m = build_rectangle(1, 1, 4, 4)
    assert (m.n_cells, m.n_interior_faces, m.n_boundary_faces) == (16, 2 * 4 * 3, 16)
    assert abs(build_rectangle(1, 1, 10, 10).boundary_measure() - 4) < 1e-14


def test_rejects_too_few_cells():
    with pytest.raises(ValueError):
        build_rectangle(2, 1, 2, 1)
    with pytest.raises(ValueError):
        build_interval(1, 1)
    with pytest.raises(ValueError):
        build_interval(0, 4)


@given(st.integers(2, 9), st.integers(2, 9), st.floats(0.1, 5), st.floats(0.1, 5))
def test_rectangle_geometry(nx, ny, Lx, Ly):
    m = build_rectangle(Lx, Ly, nx, ny)
    assert abs(m.volumes.sum() - Lx * Ly) <= 1e-14 * Lx * Ly * 10
    assert abs(m.boundary_measure() - 2 * (Lx + Ly)) <= 1e-13 * (Lx + Ly)
    # each boundary face touches one cell; corner cells carry two faces
    counts = np.bincount(m.bface_cell, minlength=m.n_cells)
    assert sorted(set(counts.tolist()) - {0}) in ([1, 2], [2])
    assert np.all(m.face_left != m.face_right)


@given(st.integers(2, 7), st.integers(2, 7), st.integers(0, 2**31))
def test_discrete_divergence_theorem(nx, ny, seed):
    m = build_rectangle(1.0, 2.0, nx, ny)
    rng = np.random.default_rng(seed)
    interior = rng.normal(size=m.n_interior_faces)
    boundary = rng.normal(size=m.n_boundary_faces)
    net = m.divergence(interior, boundary)
    assert abs(net.sum() - boundary.sum()) < 1e-12 * (1 + np.abs(boundary).sum() + np.abs(interior).sum())
