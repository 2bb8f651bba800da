"""Realisation of the ruled strip in R^3.

The reference curve is recovered from its curvature and torsion by
integrating the Serret-Frenet system

    T' = kappa N,   N' = -kappa T + tau B,   B' = -tau N,   Gamma' = T

with classical RK4 and a nearest-rotation projection after every step.  The
surface is ``L(s, t) = Gamma(s) + t (N cos(theta) - B sin(theta))``; its
measured first fundamental form is compared with ``diag(h**2, 1)``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, UnsupportedGeometryError


@dataclass
class FrenetFrame:
    """Samples ``s``, positions ``gamma`` (n, 3) and frames ``frame`` (n, 3, 3).

    ``frame[i]`` has rows ``T, N, B``.
    """

    s: np.ndarray
    gamma: np.ndarray
    frame: np.ndarray

    @property
    def T(self):
        return self.frame[:, 0]

    @property
    def N(self):
        return self.frame[:, 1]

    @property
    def B(self):
        return self.frame[:, 2]

    def orthonormality_defect(self):
        eye = np.eye(3)
        gram = np.einsum("nij,nkj->nik", self.frame, self.frame)
        return float(np.max(np.abs(gram - eye)))

    def orientation_defect(self):
        return float(np.max(np.abs(np.linalg.det(self.frame) - 1.0)))


@dataclass
class SurfaceMesh:
    s: np.ndarray
    t: np.ndarray
    vertices: np.ndarray  # (n_s, n_t, 3)

    @property
    def vertex_count(self):
        return self.vertices.shape[0] * self.vertices.shape[1]


def _nearest_rotation(F):
    U, _, Vt = np.linalg.svd(F)
    R = U @ Vt
    if np.linalg.det(R) < 0:
        U[:, -1] *= -1
        R = U @ Vt
    return R


def _generator(k, t):
    return np.array([[0.0, k, 0.0], [-k, 0.0, t], [0.0, -t, 0.0]])


def integrate_frenet(kappa, tau, s_grid, step=None, initial_frame=None, origin=None):
    """Curve and Frenet frame with prescribed curvature and torsion.

    Parameters
    ----------
    kappa, tau : FunctionSpec
    s_grid : increasing array of output samples; integration starts at
        ``s_grid[0]`` from ``initial_frame`` (identity) and ``origin`` (0).
    step : maximal RK4 step; default ``min(1e-3, ds/10)``.

    Raises
    ------
    UnsupportedGeometryError
        If ``kappa`` is not positive on the grid (unless kappa and tau both
        vanish identically: straight line with constant frame).
    """
    s_grid = np.asarray(s_grid, dtype=float)
    if s_grid.ndim != 1 or s_grid.size < 1 or np.any(np.diff(s_grid) <= 0):
        raise PreconditionError("s_grid must be a strictly increasing 1D array")
    straight = kappa.is_zero() and tau.is_zero()
    if kappa.is_zero() and not tau.is_zero():
        raise UnsupportedGeometryError("torsion is undefined on a straight line (kappa = 0, tau != 0)")
    if not straight and np.any(kappa(s_grid) <= 0):
        raise UnsupportedGeometryError("curvature must be positive where the frame is needed")

    F = np.eye(3) if initial_frame is None else _nearest_rotation(np.asarray(initial_frame, float))
    g = np.zeros(3) if origin is None else np.asarray(origin, dtype=float).copy()
    n = s_grid.size
    frames = np.empty((n, 3, 3))
    gammas = np.empty((n, 3))
    frames[0], gammas[0] = F, g
    if straight:
        frames[:] = F
        gammas[:] = g + (s_grid - s_grid[0])[:, None] * F[0]
        return FrenetFrame(s=s_grid, gamma=gammas, frame=frames)

    if step is None:
        ds = np.min(np.diff(s_grid)) if n > 1 else 1e-3
        step = min(1e-3, ds / 10.0)
    for i in range(n - 1):
        a, b = s_grid[i], s_grid[i + 1]
        m = int(np.ceil((b - a) / step - 1e-9))
        h = (b - a) / m
        nodes = a + h * np.arange(2 * m + 1) / 2.0
        kv, tv = kappa(nodes), tau(nodes)
        for j in range(m):
            k0 = _generator(kv[2 * j], tv[2 * j])
            k1 = _generator(kv[2 * j + 1], tv[2 * j + 1])
            k2 = _generator(kv[2 * j + 2], tv[2 * j + 2])
            d1 = k0 @ F
            F2 = F + 0.5 * h * d1
            d2 = k1 @ F2
            F3 = F + 0.5 * h * d2
            d3 = k1 @ F3
            F4 = F + h * d3
            d4 = k2 @ F4
            g = g + h / 6.0 * (F[0] + 2.0 * F2[0] + 2.0 * F3[0] + F4[0])
            F = _nearest_rotation(F + h / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4))
        frames[i + 1], gammas[i + 1] = F, g
    return FrenetFrame(s=s_grid, gamma=gammas, frame=frames)


def build_mesh(geom, frame, t):
    """Vertices ``L(s_i, t_j)`` on the frame samples ``s_i`` and transverse nodes ``t``."""
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > geom.a):
        raise PreconditionError("transverse nodes must lie in [-a, a]")
    th = geom.theta(frame.s)
    ruling = frame.N * np.cos(th)[:, None] - frame.B * np.sin(th)[:, None]
    verts = frame.gamma[:, None, :] + t[None, :, None] * ruling[:, None, :]
    return SurfaceMesh(s=frame.s.copy(), t=t.copy(), vertices=verts)


def mesh_on_grid(geom, grid, step=None):
    """Frame integration plus mesh on the interior nodes of a :class:`Grid2D`."""
    frame = integrate_frenet(geom.kappa, geom.tau, grid.s, step=step)
    return frame, build_mesh(geom, frame, grid.t)


def measure_metric(mesh):
    """First fundamental form ``(G11, G12, G22)`` from second-order differences."""
    V = mesh.vertices
    if mesh.s.size < 3 or mesh.t.size < 3:
        raise PreconditionError("need at least 3 samples in each direction")
    Ls = np.gradient(V, mesh.s, axis=0, edge_order=2)
    Lt = np.gradient(V, mesh.t, axis=1, edge_order=2)
    G11 = np.einsum("ijk,ijk->ij", Ls, Ls)
    G12 = np.einsum("ijk,ijk->ij", Ls, Lt)
    G22 = np.einsum("ijk,ijk->ij", Lt, Lt)
    return G11, G12, G22


def mesh_gauss_curvature(mesh):
    """Gauss curvature ``-(sqrt(G11))_tt / sqrt(G11)`` of the measured metric.

    Valid for the orthogonal form ``diag(E, 1)`` produced by geodesic
    coordinates; returned on interior transverse nodes only.
    """
    G11, _, _ = measure_metric(mesh)
    r = np.sqrt(G11)
    d2 = np.gradient(np.gradient(r, mesh.t, axis=1, edge_order=2), mesh.t, axis=1,
                     edge_order=2)
    return (-d2 / r)[:, 1:-1]


def write_mesh_csv(mesh, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s", "t", "x", "y", "z"])
        for i, s in enumerate(mesh.s):
            for j, t in enumerate(mesh.t):
                x, y, z = mesh.vertices[i, j]
                w.writerow([repr(float(s)), repr(float(t)), repr(float(x)), repr(float(y)),
                            repr(float(z))])


def write_obj(mesh, path):
    """Wavefront OBJ: one vertex per node, two triangles per lattice cell."""
    ns, nt = mesh.vertices.shape[:2]
    with open(path, "w") as fh:
        fh.write(f"# ruled strip mesh {ns} x {nt}\n")
        for x, y, z in mesh.vertices.reshape(-1, 3):
            fh.write(f"v {x:.12g} {y:.12g} {z:.12g}\n")
        idx = np.arange(ns * nt).reshape(ns, nt) + 1
        for i in range(ns - 1):
            for j in range(nt - 1):
                a, b, c, d = idx[i, j], idx[i + 1, j], idx[i + 1, j + 1], idx[i, j + 1]
                fh.write(f"f {a} {b} {c}\nf {a} {c} {d}\n")
