import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ruledstrip.errors import (
    HypothesisError,
    InconsistencyError,
    NoCertificateError,
    PreconditionError,
)
from ruledstrip.geometry import (
    CurvatureEnvelope,
    FunctionSpec as F,
    StripGeometry,
    f_bounds,
    first_mode_energy,
)
from ruledstrip.hardy import (
    HardyTrial1D,
    StabilityReport,
    build_certificate,
    cutoff,
    hardy_constant,
    random_hardy_trials_1d,
    stability_threshold,
    stability_weight,
    verify_curved_hardy,
    verify_hardy_1d,
    verify_lemma_kinetic,
    verify_local_hardy,
    verify_theorem1,
    with_constant,
)
from ruledstrip.transverse import lambda_profile
from ruledstrip.trials import TrialFunction, random_trials


@pytest.fixture(scope="module")
def twist():
    return StripGeometry.from_k_sigma(0.5, F.zero(), F.constant(1.0))


@pytest.fixture(scope="module")
def cert(twist):
    return build_certificate(twist)


@pytest.fixture(scope="module")
def report(twist, cert):
    return stability_threshold(twist, cert)


# -- Hardy constant ----------------------------------------------------------

def test_hardy_constant_examples():
    # a * sup|sigma| = 1 is realised by a = 0.5, sup|sigma| = 2
    assert hardy_constant(0.1, 2.0, 0.5, 2.0) == pytest.approx(0.1 / (18 * math.sqrt(2)), abs=1e-12)
    assert hardy_constant(0.1, 2.0, 0.5, 2.0) == pytest.approx(0.0039284, abs=1e-7)
    assert hardy_constant(1e9, 2.0, 0.5, 2.0) == pytest.approx(1 / 32)
    assert hardy_constant(0.1, 2.0, 0.5, 0.0) == pytest.approx(0.1 / 18)
    assert hardy_constant(0.1, 2.0, 0.5, 0.0) == pytest.approx(0.0055556, abs=1e-7)


@pytest.mark.parametrize("args", [(0.0, 2, 0.5, 1), (0.1, 0.0, 0.5, 1), (0.1, 2, -0.5, 1)])
def test_hardy_constant_rejects(args):
    with pytest.raises(PreconditionError):
        hardy_constant(*args)


@settings(max_examples=60, deadline=None)
@given(m=st.floats(1e-3, 10), L=st.floats(0.1, 20), a=st.floats(0.1, 2), S=st.floats(0, 3),
       f=st.floats(1.0, 3.0))
def test_hardy_constant_monotone(m, L, a, S, f):
    c = hardy_constant(m, L, a, S)
    assert hardy_constant(m * f, L, a, S) >= c
    assert hardy_constant(m, L * f, a, S) >= c
    assert hardy_constant(m, L, a, S * f) <= c


# -- certificates ------------------------------------------------------------

def test_certificate_refuses_flat():
    with pytest.raises(NoCertificateError, match="σ ≡ 0"):
        build_certificate(StripGeometry.from_k_sigma(0.5))


def test_certificate_constant_twist(cert):
    assert cert.s0 == 0.0
    assert cert.interval_len == 8.0
    assert cert.is_consistent()
    assert cert.c_bound == pytest.approx(cert.recompute(), abs=1e-12)
    assert cert.rho_inv_sq(cert.s0) == 1.0
    d = cert.to_dict()
    assert d["interval"] == [-4.0, 4.0] and d["c_bound"] > 0


def test_certificate_bump_centre():
    g = StripGeometry.from_k_sigma(0.5, sigma=F.gaussian_bump(1.0, 0.7, 1.0))
    c = build_certificate(g)
    prof = lambda_profile(g, -20, 20, 401, 2048)
    peak = prof[int(np.argmax([r.lambda_schrodinger for r in prof]))].s
    assert abs(c.s0 - peak) <= 4.0 / 16 + 1e-12  # one candidate-centre step
    assert abs(c.s0 - 0.7) <= 0.25


# -- stability weight --------------------------------------------------------

def test_weight_without_curvature(twist, cert):
    s = np.linspace(-50, 50, 11)
    w = stability_weight(twist, CurvatureEnvelope(0.0), cert, s)
    assert np.allclose(w, cert.c_bound / (1 + (s - cert.s0) ** 2), rtol=1e-15)


def test_weight_asymptotics(twist, cert):
    eps0 = 1e-3
    env = CurvatureEnvelope(eps0)
    fm0, fp0 = f_bounds(twist, env, 0.0)
    g = 1 + (twist.a * twist.sup_sigma()) ** 2
    limit = cert.c_bound * min(1 / fp0, fm0) - first_mode_energy(0.5) * 0.5 * eps0 * (1 + 1 / g)
    s = 1e3
    assert s**2 * stability_weight(twist, env, cert, s) == pytest.approx(limit, rel=1e-4)


def test_weight_positive_at_s0(twist, cert):
    assert stability_weight(twist, CurvatureEnvelope(1e-3), cert, cert.s0) > 0


def test_threshold_basic(twist, cert, report):
    assert report.eps0_max > 0
    assert report.w_min >= 0
    doubled = stability_threshold(twist, with_constant(cert, 2 * cert.c_bound))
    assert doubled.eps0_max >= report.eps0_max


def test_threshold_grid_search_oracle(twist, cert, report):
    s = np.concatenate([np.linspace(-300, 300, 12001), [-1e7, 1e7]])
    eps_grid = np.linspace(0, 0.05, 5001)[1:]
    ok = [np.min(stability_weight(twist, CurvatureEnvelope(e), cert, s) * (1 + s**2)) > 0
          for e in eps_grid]
    best = eps_grid[np.flatnonzero(ok).max()]
    assert abs(best - report.eps0_max) <= 1e-3


# -- 1D Hardy ----------------------------------------------------------------

def test_1d_gaussian_ratio():
    rep = verify_hardy_1d([HardyTrial1D("x_gaussian", ((1.0, 0.0, 1.0),))])
    assert rep.extra["ratios"][0] == pytest.approx(4 / 3, rel=1e-10)
    assert rep.extra["normalized_ratios"][0] == pytest.approx(1 / 3, rel=1e-10)


def test_1d_sharpening_family():
    ds = (0.4, 0.2, 0.1, 0.05, 0.02, 0.01)
    rep = verify_hardy_1d([HardyTrial1D("power_spline", (d,)) for d in ds])
    r = np.array(rep.extra["ratios"])
    assert np.all(np.diff(r) > 0) and np.all(r < 4)
    assert np.allclose(r, 4 / (1 + 4 * np.array(ds) ** 2), rtol=1e-9)
    assert 4 - r[-1] < 2e-3


def test_1d_half_line_and_random():
    trials = [HardyTrial1D("half_line", (2.0, 0.7))] + random_hardy_trials_1d(30, 5)
    rep = verify_hardy_1d(trials)
    assert rep.passed and rep.extra["max_ratio"] <= 4


def test_1d_requires_zero_at_origin():
    class Bad(HardyTrial1D):
        def u(self, x):
            return np.ones_like(np.asarray(x, float))
    with pytest.raises(PreconditionError):
        verify_hardy_1d([Bad("x_gaussian", ((1.0, 0.0, 1.0),))])


# -- local and global inequalities --------------------------------------------

def test_local_equality_case_flat():
    flat = StripGeometry.from_k_sigma(0.5)
    tr = TrialFunction.product(0.5, F.gaussian_bump(2.0, 0.0, 1.0))
    rep = verify_local_hardy(flat, [tr])
    assert abs(rep.min_normalized_defect) < 1e-12


def test_local_random(twist, rng):
    rep = verify_local_hardy(twist, random_trials(0.5, 50, rng))
    assert rep.passed and rep.min_normalized_defect >= -1e-8


def test_local_concentrated_at_peak():
    g = StripGeometry.from_k_sigma(0.5, sigma=F.gaussian_bump(2.5, 0.0, 1.0))
    trials = [TrialFunction.product(0.5, F.gaussian_bump(1.0, 0.0, w), (1.0, m))
              for w in (0.2, 0.3) for m in (0.0, -0.2, 0.2)]
    rep = verify_local_hardy(g, trials)
    assert rep.min_normalized_defect >= -1e-8


def test_theorem1_refuses_flat():
    with pytest.raises(HypothesisError):
        verify_theorem1(StripGeometry.from_k_sigma(0.5), None, [])


def test_theorem1_random(twist, cert, rng):
    rep = verify_theorem1(twist, cert, random_trials(0.5, 100, rng, s0=cert.s0))
    assert rep.passed
    assert rep.extra["empirical_c"] >= cert.c_bound


def test_theorem1_distance_scaling(twist, cert):
    trials = [TrialFunction.product(0.5, F.gaussian_bump(1.0, d, 1.0)) for d in (10, 20, 40)]
    r = verify_theorem1(twist, cert, trials).extra["ratios"]
    assert 3.0 < r[1] / r[0] < 5.0 and 3.0 < r[2] / r[1] < 5.0


def test_cutoff():
    assert np.allclose(cutoff([0.0, 1.0, 2.0, 5.0], 0.0, 2.0), [0.0, 0.5, 1.0, 1.0])


def test_kinetic_targeted(twist, cert):
    lo, hi = cert.interval
    outside = TrialFunction.product(0.5, F.compact_bump(1.0, hi + 3.0, 2.0))
    inside = TrialFunction.product(0.5, F.compact_bump(1.0, cert.s0, 0.5 * cert.b))
    rep = verify_lemma_kinetic(twist, cert, [outside, inside])
    assert rep.passed and all(rep.extra["chain_ok"])
    assert min(rep.normalized) > 0


def test_kinetic_random(twist, cert, rng):
    rep = verify_lemma_kinetic(twist, cert, random_trials(0.5, 50, rng, s0=cert.s0))
    assert rep.passed and all(rep.extra["chain_ok"])


# -- curved inequality -------------------------------------------------------

def test_curved_reduces_to_theorem1(twist, cert, report, rng):
    trials = random_trials(0.5, 10, rng, s0=cert.s0)
    a = verify_curved_hardy(twist, CurvatureEnvelope(0.0), cert, trials, report=report)
    b = verify_theorem1(twist, cert, trials)
    assert np.allclose(a.normalized, b.normalized, rtol=0, atol=1e-12)


def test_curved_half_threshold(cert, report, rng):
    eps0 = 0.5 * report.eps0_max
    g = StripGeometry.from_k_sigma(0.5, F.rational_decay(eps0), F.constant(1.0))
    trials = random_trials(0.5, 20, rng, s0=cert.s0)
    trials.append(TrialFunction.product(0.5, F.gaussian_bump(1.0, cert.s0, 0.5)))
    rep = verify_curved_hardy(g, CurvatureEnvelope(eps0), cert, trials, report=report)
    assert rep.passed
    assert rep.extra["ratio_bound_violation"] == 0.0


def test_curved_rejects_large_envelope(cert, report):
    eps0 = 2 * report.eps0_max
    g = StripGeometry.from_k_sigma(0.5, F.rational_decay(eps0), F.constant(1.0))
    with pytest.raises(HypothesisError):
        verify_curved_hardy(g, CurvatureEnvelope(eps0), cert, [], report=report)


def test_curved_detects_inconsistent_report(cert, report):
    fake = StabilityReport(eps0_max=0.6, w_min=0.0, certificate=cert)
    g = StripGeometry.from_k_sigma(0.5, F.rational_decay(0.5), F.constant(1.0))
    tr = [TrialFunction.product(0.5, F.gaussian_bump(1.0, 0.0, 1.0))]
    with pytest.raises(InconsistencyError):
        verify_curved_hardy(g, CurvatureEnvelope(0.5), cert, tr, report=fake)


def test_curved_envelope_must_fit(cert, report):
    eps0 = 0.5 * report.eps0_max
    g = StripGeometry.from_k_sigma(0.5, F.constant(eps0), F.constant(1.0))
    with pytest.raises(HypothesisError):
        verify_curved_hardy(g, CurvatureEnvelope(eps0), cert, [], report=report)
