import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st

from ruledstrip.discretization import discrete_first_mode_energy, transverse_pair
from ruledstrip.errors import HypothesisError, PreconditionError
from ruledstrip.geometry import FunctionSpec as F, StripGeometry
from ruledstrip.transverse import (
    LambdaTable,
    lambda_profile,
    lambda_schrodinger,
    lambda_sl,
    profile_to_csv,
    transverse_result,
)


def const_twist(a, sigma):
    return StripGeometry.from_k_sigma(a, sigma=F.constant(sigma))


def test_vanishes_without_twist(flat):
    for n in (16, 100, 2048):
        assert abs(lambda_sl(flat, 0.0, n)) <= 1e-10
        assert abs(lambda_schrodinger(flat, 0.0, n)) <= 1e-10


def test_dense_oracle(twisted):
    n = 2048
    d, e, m = transverse_pair(twisted, 0.0, n, "sl")
    r = 1.0 / np.sqrt(m)
    M = np.diag(d * r * r) + np.diag(e * r[:-1] * r[1:], 1) + np.diag(e * r[:-1] * r[1:], -1)
    mu = sla.eigh(M, eigvals_only=True, subset_by_index=[0, 0])[0]
    ref = mu - discrete_first_mode_energy(0.5, n)
    assert lambda_sl(twisted, 0.0, n) == pytest.approx(ref, rel=1e-8)


def test_sign_symmetry():
    assert lambda_sl(const_twist(0.5, 1.0), 0.0) == lambda_sl(const_twist(0.5, -1.0), 0.0)


def test_formulations_agree(twisted):
    r = transverse_result(twisted, 0.0, 2048)
    assert r.discrepancy <= 1e-6
    assert r.lambda_sl == pytest.approx(0.4636, abs=1e-4)


def test_small_twist_expansion():
    # second-order perturbation theory: lambda ~ sigma^2 <V/sigma^2> for small sigma
    a, sig = 0.5, 1e-2
    t = np.linspace(-a, a, 20001)
    phi2 = np.cos(np.pi * t / (2 * a)) ** 2 / a
    first = np.trapezoid(sig**2 * (2 - t**2 * sig**2) / 4 / (1 + t**2 * sig**2) ** 2 * phi2, t)
    assert lambda_schrodinger(const_twist(a, sig), 0.0) == pytest.approx(first, rel=1e-3)


def test_mesh_convergence_order(twisted):
    vals = [lambda_sl(twisted, 0.0, n) for n in (127, 255, 511, 1023)]
    d = np.abs(np.diff(vals))
    assert np.all(np.log2(d[:-1] / d[1:]) >= 1.9)


def test_hypothesis_and_grid_checks():
    with pytest.raises(HypothesisError):
        lambda_sl(const_twist(1.0, 1.5), 0.0)
    with pytest.raises(PreconditionError):
        lambda_sl(const_twist(0.5, 1.0), 0.0, n=8)


def test_profiles():
    prof = lambda_profile(const_twist(0.5, 1.0), -3, 3, 13, 512)
    lam = [r.lambda_sl for r in prof]
    assert max(lam) - min(lam) <= 1e-8
    bump = StripGeometry.from_k_sigma(0.5, sigma=F.gaussian_bump(1.0, 0.0, 1.0))
    prof = lambda_profile(bump, -15, 15, 31, 512)
    lam = np.array([r.lambda_sl for r in prof])
    assert lam.min() >= -1e-8
    assert lam[0] <= 1e-8 and lam[-1] <= 1e-8
    assert np.argmax(lam) == 15
    text = profile_to_csv(prof)
    assert text.splitlines()[0] == "s,lambda,lambda_alt,discrepancy"
    assert len(text.splitlines()) == 32


@settings(max_examples=25, deadline=None)
@given(a=st.floats(0.2, 2.0), u=st.floats(0.01, 1.4))
def test_lambda_positive_where_twisted(a, u):
    g = const_twist(a, u / a)
    lam = lambda_schrodinger(g, 0.0, 512)
    assert lam > 1e-8


def test_lambda_table_matches_direct():
    g = StripGeometry.from_k_sigma(0.6, sigma=F.sum_of(F.gaussian_bump(1.5, 0.0, 1.0),
                                                       F.rational_decay(0.5, 2.0, 1.0)))
    table = LambdaTable(g)
    s = np.linspace(-6, 6, 25)
    direct = np.array([lambda_schrodinger(g, x, 4096) for x in s])
    assert np.max(np.abs(table(s) - direct)) < 1e-7
    assert table.error < 1e-7
