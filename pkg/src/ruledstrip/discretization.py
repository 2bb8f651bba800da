"""Finite-difference assembly of the strip quadratic forms.

The 2D form ``Q[psi] = int (h^-1 |d_s psi|^2 + h |d_t psi|^2) ds dt`` is
truncated to ``(-L, L) x (-a, a)`` with Dirichlet data on the whole boundary
and discretised on interior nodes of a uniform tensor grid.  Coefficients
of the difference quotients sit at edge midpoints, which keeps the matrices
exactly symmetric and the scheme second order.  Mass matrices are diagonal
(nodal quadrature), so every eigenproblem is ``A x = mu B x`` with a
positive diagonal ``B``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import HypothesisError, PreconditionError
from .geometry import eval_h, eval_h0, eval_V


@dataclass(frozen=True)
class Grid1D:
    """Interior nodes ``t_j = -a + j*dt``, ``j = 1..n``, ``dt = 2a/(n+1)``."""

    a: float
    n: int

    def __post_init__(self):
        if self.n < 2 or self.a <= 0:
            raise PreconditionError(f"need n >= 2 and a > 0, got n={self.n}, a={self.a}")

    @property
    def step(self):
        return 2.0 * self.a / (self.n + 1)

    @cached_property
    def nodes(self):
        return -self.a + self.step * np.arange(1, self.n + 1)

    @cached_property
    def midpoints(self):
        return -self.a + self.step * (np.arange(self.n + 1) + 0.5)


@dataclass(frozen=True)
class Grid2D:
    """Uniform interior grid on ``(-L, L) x (-a, a)``; node index ``i * n_t + j``."""

    L: float
    a: float
    n_s: int
    n_t: int

    def __post_init__(self):
        if self.n_s < 8 or self.n_t < 8:
            raise PreconditionError(f"need n_s, n_t >= 8, got {self.n_s}, {self.n_t}")
        if not (self.L > 0 and self.a > 0):
            raise PreconditionError("L and a must be positive")

    @property
    def ds(self):
        return 2.0 * self.L / (self.n_s + 1)

    @property
    def dt(self):
        return 2.0 * self.a / (self.n_t + 1)

    @cached_property
    def s(self):
        return -self.L + self.ds * np.arange(1, self.n_s + 1)

    @cached_property
    def t(self):
        return -self.a + self.dt * np.arange(1, self.n_t + 1)

    @property
    def size(self):
        return self.n_s * self.n_t

    def mesh(self):
        return np.meshgrid(self.s, self.t, indexing="ij")


def discrete_first_mode_energy(a, n):
    """Smallest eigenvalue of the 3-point Dirichlet Laplacian with ``n`` interior nodes."""
    dt = 2.0 * a / (n + 1)
    return 4.0 / dt**2 * math.sin(math.pi / (2.0 * (n + 1))) ** 2


def _coefficient(geom, metric):
    if metric == "full":
        return lambda s, t: eval_h(geom, s, t)
    if metric == "geodesic":
        return lambda s, t: eval_h0(geom, s, t)
    raise PreconditionError(f"metric must be 'full' or 'geodesic', got {metric!r}")


def assemble_stiffness(geom, grid, metric="full"):
    """Stiffness matrix of the truncated form on ``grid`` (CSR, symmetric).

    ``x^T A x`` approximates ``int (h^-1 |d_s psi|^2 + h |d_t psi|^2) ds dt``
    with ``h`` replaced by ``h0`` when ``metric="geodesic"``.
    """
    if metric == "full" and not geom.a * geom.sup_k() < 1.0:
        raise HypothesisError(f"a*sup|k| = {geom.a * geom.sup_k():.6g} violates a*sup|k| < 1")
    coef = _coefficient(geom, metric)
    ns, nt, ds, dt = grid.n_s, grid.n_t, grid.ds, grid.dt
    s_mid = -grid.L + ds * (np.arange(ns + 1) + 0.5)
    t_mid = -grid.a + dt * (np.arange(nt + 1) + 0.5)
    S, T = np.meshgrid(s_mid, grid.t, indexing="ij")
    h_s = coef(S, T)
    S, T = np.meshgrid(grid.s, t_mid, indexing="ij")
    h_t = coef(S, T)
    if np.min(h_s) <= 0 or np.min(h_t) <= 0:
        raise HypothesisError("metric coefficient is not positive on the grid")
    cs = (dt / ds) / h_s          # (ns+1, nt)
    ct = (ds / dt) * h_t          # (ns, nt+1)

    idx = np.arange(grid.size).reshape(ns, nt)
    diag = cs[:-1] + cs[1:] + ct[:, :-1] + ct[:, 1:]
    rows = [idx.ravel(), idx[:-1].ravel(), idx[1:].ravel(),
            idx[:, :-1].ravel(), idx[:, 1:].ravel()]
    cols = [idx.ravel(), idx[1:].ravel(), idx[:-1].ravel(),
            idx[:, 1:].ravel(), idx[:, :-1].ravel()]
    vs, vt = -cs[1:-1].ravel(), -ct[:, 1:-1].ravel()
    vals = [diag.ravel(), vs, vs, vt, vt]
    A = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(grid.size, grid.size),
    )
    return A.tocsr()


def assemble_mass(geom, grid, weight="h", s0=None, w=None):
    """Diagonal mass matrix with entries ``weight(s_i, t_j) * ds * dt``.

    ``weight`` is one of ``"h"``, ``"h0"``, ``"h0_times_rho_inv_sq"`` (needs
    ``s0``; ``rho**2 = 1 + (s - s0)**2``) or ``"h0_times_w"`` (needs a
    callable ``w(s)``).
    """
    S, T = grid.mesh()
    if weight == "h":
        if not geom.a * geom.sup_k() < 1.0:
            raise HypothesisError("a*sup|k| < 1 violated")
        vals = eval_h(geom, S, T)
    elif weight == "h0":
        vals = eval_h0(geom, S, T)
    elif weight == "h0_times_rho_inv_sq":
        if s0 is None:
            raise PreconditionError("weight 'h0_times_rho_inv_sq' needs s0")
        vals = eval_h0(geom, S, T) / (1.0 + (S - s0) ** 2)
    elif weight == "h0_times_w":
        if w is None:
            raise PreconditionError("weight 'h0_times_w' needs w")
        vals = eval_h0(geom, S, T) * np.asarray(w(S), dtype=float)
    else:
        raise PreconditionError(f"unknown mass weight {weight!r}")
    bad = np.argwhere(~(vals > 0))
    if bad.size:
        i, j = bad[0]
        raise PreconditionError(
            f"non-positive mass weight {vals[i, j]:.3g} at node (s={grid.s[i]:.6g}, "
            f"t={grid.t[j]:.6g})"
        )
    return sp.diags(vals.ravel() * grid.ds * grid.dt, format="csr")


def transverse_pair(geom, s, n, form="sl"):
    """Tridiagonal ``(diag, off, mass)`` arrays of a transverse problem at ``s``.

    ``form="sl"``:  ``-(h0 phi')' = mu h0 phi``; midpoint weights in the
    stiffness, nodal weights in the mass.
    ``form="schrodinger"``: ``-phi'' + V phi = mu phi``.
    """
    g = Grid1D(geom.a, n)
    dt = g.step
    if form == "sl":
        c = eval_h0(geom, s, g.midpoints) / dt
        diag = c[:-1] + c[1:]
        off = -c[1:-1]
        mass = eval_h0(geom, s, g.nodes) * dt
    elif form == "schrodinger":
        V = eval_V(geom, s, g.nodes)
        diag = 2.0 / dt + V * dt
        off = np.full(n - 1, -1.0 / dt)
        mass = np.full(n, dt)
    else:
        raise PreconditionError(f"unknown transverse form {form!r}")
    return diag, off, mass


def assemble_transverse(geom, s, n, form="sl"):
    """Sparse symmetric ``(stiffness, mass)`` pair of the transverse problem at ``s``."""
    diag, off, mass = transverse_pair(geom, s, n, form)
    A = sp.diags([off, diag, off], [-1, 0, 1], format="csr")
    return A, sp.diags(mass, format="csr")


def export_coo(matrix, path):
    """Write ``row col value`` lines (0-based) for every stored entry."""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        fh.write(f"% {coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{r} {c} {v:.17g}\n")


def read_coo(path):
    rows, cols, vals = [], [], []
    with open(path) as fh:
        header = fh.readline().split()
        shape = (int(header[1]), int(header[2]))
        for line in fh:
            r, c, v = line.split()
            rows.append(int(r))
            cols.append(int(c))
            vals.append(float(v))
    return sp.coo_matrix((vals, (rows, cols)), shape=shape).tocsr()
