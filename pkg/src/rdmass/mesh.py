"""Uniform finite-volume grids on an interval or a rectangle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Mesh:
    """Cell-centred tensor grid.

    Interior faces are stored as parallel arrays ``(left, right, area, dist)``;
    boundary faces as ``(cell, area, axis, sign, midpoint)`` where ``sign`` is
    the sign of the outward normal along ``axis``.  In 1D each end point is a
    boundary face of unit area, so boundary integrals are ``f(0) + f(L)``.
    """

    dim: int
    extents: tuple[float, ...]
    cells: tuple[int, ...]
    cell_volume: float
    centers: np.ndarray  # (n_cells, dim)
    face_left: np.ndarray
    face_right: np.ndarray
    face_area: np.ndarray
    face_dist: np.ndarray
    bface_cell: np.ndarray
    bface_area: np.ndarray
    bface_axis: np.ndarray
    bface_sign: np.ndarray
    bface_mid: np.ndarray  # (n_bfaces, dim)

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.cells))

    @property
    def volumes(self) -> np.ndarray:
        return np.full(self.n_cells, self.cell_volume)

    @property
    def n_interior_faces(self) -> int:
        return len(self.face_left)

    @property
    def n_boundary_faces(self) -> int:
        return len(self.bface_cell)

    def boundary_measure(self) -> float:
        return float(self.bface_area.sum())

    def divergence(self, interior_flux: np.ndarray, boundary_flux: np.ndarray) -> np.ndarray:
        """Net inflow per cell.

        ``interior_flux[f]`` flows from ``face_left[f]`` to ``face_right[f]``;
        ``boundary_flux[b]`` flows into ``bface_cell[b]`` from outside.
        """
        net = np.zeros(self.n_cells)
        np.add.at(net, self.face_left, -interior_flux)
        np.add.at(net, self.face_right, interior_flux)
        np.add.at(net, self.bface_cell, boundary_flux)
        return net

    def describe(self) -> dict:
        return {"dim": self.dim, "extents": list(self.extents), "cells": list(self.cells)}


def build_interval(length: float, n: int) -> Mesh:
    if not length > 0:
        raise ValueError(f"interval length must be positive, got {length}")
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"need at least 2 cells, got {n}")
    n = int(n)
    h = length / n
    centers = ((np.arange(n) + 0.5) * h).reshape(n, 1)
    left = np.arange(n - 1)
    return Mesh(
        dim=1,
        extents=(float(length),),
        cells=(n,),
        cell_volume=h,
        centers=centers,
        face_left=left,
        face_right=left + 1,
        face_area=np.ones(n - 1),
        face_dist=np.full(n - 1, h),
        bface_cell=np.array([0, n - 1]),
        bface_area=np.ones(2),
        bface_axis=np.zeros(2, dtype=int),
        bface_sign=np.array([-1, 1]),
        bface_mid=np.array([[0.0], [float(length)]]),
    )


def build_rectangle(Lx: float, Ly: float, nx: int, ny: int) -> Mesh:
    if not (Lx > 0 and Ly > 0):
        raise ValueError(f"extents must be positive, got {Lx}, {Ly}")
    if nx < 2 or ny < 2:
        raise ValueError(f"need at least 2 cells per axis, got {nx}x{ny}")
    hx, hy = Lx / nx, Ly / ny
    ix, iy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
    ix, iy = ix.ravel(), iy.ravel()
    idx = ix + nx * iy
    centers = np.column_stack([(ix + 0.5) * hx, (iy + 0.5) * hy])

    xl = idx[ix < nx - 1]
    yl = idx[iy < ny - 1]
    face_left = np.concatenate([xl, yl])
    face_right = np.concatenate([xl + 1, yl + nx])
    face_area = np.concatenate([np.full(len(xl), hy), np.full(len(yl), hx)])
    face_dist = np.concatenate([np.full(len(xl), hx), np.full(len(yl), hy)])

    bc, ba, bax, bs, bm = [], [], [], [], []
    for j in range(ny):
        yc = (j + 0.5) * hy
        bc += [nx * j, nx * j + nx - 1]
        ba += [hy, hy]
        bax += [0, 0]
        bs += [-1, 1]
        bm += [(0.0, yc), (Lx, yc)]
    for i in range(nx):
        xc = (i + 0.5) * hx
        bc += [i, i + nx * (ny - 1)]
        ba += [hx, hx]
        bax += [1, 1]
        bs += [-1, 1]
        bm += [(xc, 0.0), (xc, Ly)]

    return Mesh(
        dim=2,
        extents=(float(Lx), float(Ly)),
        cells=(int(nx), int(ny)),
        cell_volume=hx * hy,
        centers=centers,
        face_left=face_left,
        face_right=face_right,
        face_area=face_area,
        face_dist=face_dist,
        bface_cell=np.array(bc),
        bface_area=np.array(ba),
        bface_axis=np.array(bax),
        bface_sign=np.array(bs),
        bface_mid=np.array(bm),
    )
