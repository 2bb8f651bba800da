import math

import numpy as np
import pytest
import scipy.sparse as sp

from ruledstrip.discretization import (
    Grid1D,
    Grid2D,
    assemble_mass,
    assemble_stiffness,
    assemble_transverse,
    discrete_first_mode_energy,
    export_coo,
    read_coo,
)
from ruledstrip.eigen import smallest_eig
from ruledstrip.errors import PreconditionError
from ruledstrip.geometry import FunctionSpec as F, StripGeometry, eval_h0
from ruledstrip.trials import TrialFunction, TrialQuadrature, trial_rule


def test_grid_validation():
    with pytest.raises(PreconditionError):
        Grid2D(L=1.0, a=0.5, n_s=4, n_t=20)
    g = Grid2D(L=2.0, a=0.5, n_s=9, n_t=9)
    assert g.ds == pytest.approx(0.4) and g.dt == pytest.approx(0.1)
    assert g.s[0] == pytest.approx(-1.6) and g.t[-1] == pytest.approx(0.4)
    assert Grid1D(0.5, 9).midpoints.size == 10


def test_flat_stiffness_is_five_point(flat):
    g = Grid2D(L=1.0, a=0.5, n_s=9, n_t=8)
    A = assemble_stiffness(flat, g).toarray()
    i = 4 * g.n_t + 3
    r = g.dt / g.ds
    assert A[i, i] == pytest.approx(2 * r + 2 / r)
    assert A[i, i + g.n_t] == pytest.approx(-r) and A[i, i + 1] == pytest.approx(-1 / r)
    assert np.count_nonzero(A[i]) == 5


def test_flat_mass_is_scaled_identity(flat):
    g = Grid2D(L=1.0, a=0.5, n_s=9, n_t=8)
    B = assemble_mass(flat, g)
    assert np.allclose(B.diagonal(), g.ds * g.dt)


def test_rho_weight_at_s0(twisted):
    g = Grid2D(L=1.0, a=0.5, n_s=9, n_t=8)
    B = assemble_mass(twisted, g, "h0_times_rho_inv_sq", s0=0.0).diagonal().reshape(9, 8)
    assert np.allclose(B[4], eval_h0(twisted, 0.0, g.t) * g.ds * g.dt)


def test_mass_error_names_node(twisted):
    g = Grid2D(L=1.0, a=0.5, n_s=9, n_t=8)
    with pytest.raises(PreconditionError, match="node"):
        assemble_mass(twisted, g, "h0_times_w", w=lambda s: s)


def test_symmetry_and_semidefinite():
    geom = StripGeometry(a=0.5, kappa=F.constant(1.0), tau=F.gaussian_bump(1.0, 0, 1),
                         theta=F.rational_decay(0.5, 0.0, 2.0))
    g = Grid2D(L=2.0, a=0.5, n_s=30, n_t=10)
    for metric in ("full", "geodesic"):
        A = assemble_stiffness(geom, g, metric)
        assert abs(A - A.T).max() == 0.0
        assert np.linalg.eigvalsh(A.toarray())[0] >= -1e-10


def test_flat_rectangle_discrete_eigenvalue(flat):
    g = Grid2D(L=2.0, a=0.5, n_s=79, n_t=19)
    mu = smallest_eig(assemble_stiffness(flat, g), assemble_mass(flat, g)).value
    discrete = discrete_first_mode_energy(2.0, 79) + discrete_first_mode_energy(0.5, 19)
    assert mu == pytest.approx(discrete, rel=1e-12)
    # leading error term -(k_s^4 ds^2 + k_t^4 dt^2)/12
    exact = (math.pi / 4) ** 2 + math.pi**2
    lead = ((math.pi / 4) ** 4 * g.ds**2 + math.pi**4 * g.dt**2) / 12
    assert exact - mu == pytest.approx(lead, rel=1e-2)


def test_flat_rectangle_unit_wavenumbers():
    # 3 max(ds, dt)^2 bounds the error when both wave numbers are O(1)
    a = L = math.pi / 2
    geom = StripGeometry.from_k_sigma(a)
    g = Grid2D(L=L, a=a, n_s=39, n_t=39)
    mu = smallest_eig(assemble_stiffness(geom, g), assemble_mass(geom, g)).value
    assert abs(mu - 2.0) <= 3 * max(g.ds, g.dt) ** 2


def test_transverse_flat_spectrum(flat):
    A, B = assemble_transverse(flat, 0.0, 400)
    assert abs(A - A.T).max() == 0.0
    mu = smallest_eig(A, B).value
    assert mu == pytest.approx(discrete_first_mode_energy(0.5, 400), rel=1e-12)
    assert abs(mu - math.pi**2) < 1e-3


def test_transverse_convergence_order(twisted):
    mus = [smallest_eig(*assemble_transverse(twisted, 0.0, n)).value for n in (63, 127, 255, 511)]
    d = np.abs(np.diff(mus))
    assert np.all(np.log2(d[:-1] / d[1:]) > 1.9)


def test_coo_roundtrip(tmp_path, twisted):
    A, _ = assemble_transverse(twisted, 0.0, 20)
    export_coo(A, tmp_path / "A.txt")
    assert abs(read_coo(tmp_path / "A.txt") - A).max() == 0.0


def test_discrete_form_matches_quadrature(twisted):
    """x^T A x on a sampled trial converges to Q0[psi] at second order."""
    profile = F.gaussian_bump(1.0, 0.2, 0.8)
    trial = TrialFunction.product(0.5, profile, (1.0, 0.3))
    tq = TrialQuadrature(twisted, trial, trial_rule(trial))
    exact = tq.integrate(tq.ps**2 / tq.h0) + tq.integrate(tq.h0 * tq.pt**2)
    errs = []
    for n_s, n_t in ((79, 19), (159, 39), (319, 79)):
        g = Grid2D(L=5.0, a=0.5, n_s=n_s, n_t=n_t)
        S, T = g.mesh()
        x = trial(S, T).ravel()
        A = assemble_stiffness(twisted, g, "geodesic")
        errs.append(abs(x @ (A @ x) - exact))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1.9)
