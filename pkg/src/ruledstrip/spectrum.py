"""Bottom of the spectrum of the Dirichlet-truncated strip.

Truncating ``R x (-a, a)`` to ``(-L, L) x (-a, a)`` with Dirichlet data only
raises eigenvalues (domain monotonicity), so a truncated ground energy
below ``E1`` certifies spectrum below ``E1`` up to discretisation error.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

from .discretization import (
    Grid2D,
    assemble_mass,
    assemble_stiffness,
    discrete_first_mode_energy,
)
from .eigen import DEFAULT_SEED, DEFAULT_TOL, smallest_eig
from .geometry import first_mode_energy

DEFAULT_L = 12.0
DEFAULT_NS = 600
DEFAULT_NT = 60
BOUND_STATE_TOL = 1e-3


@dataclass
class SpectrumResult:
    mu1: float
    E1: float
    E1_grid: float
    residual: float
    L: float
    n_s: int
    n_t: int
    metric: str
    degenerate: bool

    @property
    def gap(self):
        return self.mu1 - self.E1

    def classify(self, tol=BOUND_STATE_TOL):
        return "bound state" if self.mu1 < self.E1 - tol else "stable"

    def to_dict(self, tol=BOUND_STATE_TOL):
        d = asdict(self)
        d["gap"] = self.gap
        d["classification"] = self.classify(tol)
        return d


def truncated_ground_state(geom, L=DEFAULT_L, n_s=DEFAULT_NS, n_t=DEFAULT_NT,
                           metric="full", tol=DEFAULT_TOL, seed=DEFAULT_SEED):
    """Smallest eigenvalue of the truncated, discretised Dirichlet Laplacian."""
    grid = Grid2D(L=L, a=geom.a, n_s=n_s, n_t=n_t)
    A = assemble_stiffness(geom, grid, metric)
    B = assemble_mass(geom, grid, "h" if metric == "full" else "h0")
    res = smallest_eig(A, B, tol=tol, seed=seed)
    return SpectrumResult(
        mu1=res.value,
        E1=first_mode_energy(geom.a),
        E1_grid=discrete_first_mode_energy(geom.a, n_t),
        residual=res.residual,
        L=float(L),
        n_s=int(n_s),
        n_t=int(n_t),
        metric=metric,
        degenerate=res.degenerate,
    )


def l_doubling(geom, L=DEFAULT_L, n_s=DEFAULT_NS, n_t=DEFAULT_NT, levels=2, **kw):
    """Ground energies for ``L, 2L, 4L, ...`` at a fixed longitudinal step."""
    out = []
    for k in range(levels):
        scale = 2**k
        out.append(truncated_ground_state(
            geom, L=L * scale, n_s=(n_s + 1) * scale - 1, n_t=n_t, **kw))
    return out
