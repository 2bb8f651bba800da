"""Hardy constants, the stability weight, and trial-function verification.

Inequalities checked here, for ``psi`` vanishing at ``t = +-a``
(norms in ``H0`` carry the weight ``h0``, norms in ``H`` the weight ``h``):

* 1D Hardy: ``int u^2/x^2 <= 4 int u'^2`` when ``u(0) = 0``;
* local:    ``Q0[psi] - E1 |psi|^2 >= |h0^-1/2 d_s psi|^2 + |lambda^1/2 psi|^2``;
* global:   ``Q0[psi] - E1 |psi|^2 >= c |rho^-1 psi|^2``,
  ``rho(s) = sqrt(1 + (s - s0)^2)``;
* kinetic:  the bound of ``|rho^-1 psi|^2`` by the longitudinal kinetic
  energy plus the mass on an interval ``I`` centred at ``s0``;
* curved:   ``Q[psi] - E1 |psi|_H^2 >= |w^1/2 psi|_H0^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate

from .errors import (
    HypothesisError,
    InconsistencyError,
    NoCertificateError,
    PreconditionError,
    QuadratureError,
)
from .geometry import (
    CurvatureEnvelope,
    check_assumptions,
    eval_h,
    eval_h0,
    f_bounds,
    f_gap,
    first_mode_energy,
)
from .transverse import DEFAULT_N, LambdaTable, lambda_schrodinger
from .trials import converged_quantities

DEFECT_TOL = 1e-8
CERT_TOL = 1e-12
LAMBDA_FLOOR = 1e-8
DEFAULT_WIDTHS = (0.5, 1.0, 2.0, 4.0, 8.0)


def hardy_constant(min_lambda, interval_len, a, sup_sigma):
    """Lower bound for the global Hardy constant.

    ``min(m / ((2 + 64/|I|^2) sqrt(1 + a^2 S^2)), 1 / (16 (1 + a^2 S^2)))``
    with ``m`` the minimum of ``lambda`` on ``I`` and ``S = sup|sigma|``.
    """
    if not min_lambda > 0:
        raise PreconditionError(f"min_lambda must be positive, got {min_lambda}")
    if not interval_len > 0:
        raise PreconditionError(f"interval length must be positive, got {interval_len}")
    if a <= 0 or sup_sigma < 0:
        raise PreconditionError("need a > 0 and sup_sigma >= 0")
    g = 1.0 + (a * sup_sigma) ** 2
    first = min_lambda / ((2.0 + 64.0 / interval_len**2) * math.sqrt(g))
    return min(first, 1.0 / (16.0 * g))


@dataclass(frozen=True)
class HardyCertificate:
    s0: float
    b: float
    min_lambda: float
    c_bound: float
    sup_sigma: float
    a: float

    @property
    def interval(self):
        return (self.s0 - self.b, self.s0 + self.b)

    @property
    def interval_len(self):
        return 2.0 * self.b

    def recompute(self):
        return hardy_constant(self.min_lambda, self.interval_len, self.a, self.sup_sigma)

    def is_consistent(self, tol=CERT_TOL):
        return abs(self.recompute() - self.c_bound) <= tol * max(1.0, self.c_bound)

    def rho_inv_sq(self, s):
        s = np.asarray(s, dtype=float)
        return 1.0 / (1.0 + (s - self.s0) ** 2)

    def to_dict(self):
        lo, hi = self.interval
        return {
            "s0": self.s0,
            "interval": [lo, hi],
            "interval_len": self.interval_len,
            "min_lambda_on_I": self.min_lambda,
            "c_bound": self.c_bound,
            "sup_sigma": self.sup_sigma,
            "a": self.a,
        }


def _require_hardy_hypotheses(geom):
    rep = check_assumptions(geom)
    if not rep.checks["twist_bound"].passed:
        raise HypothesisError(
            f"hypothesis failed: a*sup|sigma| = {rep.checks['twist_bound'].value:.6g} >= sqrt(2)"
        )
    if not rep.checks["twist_nonzero"].passed:
        raise NoCertificateError("hypothesis failed: σ ≡ 0 (sigma vanishes identically)")


def build_certificate(geom, n=DEFAULT_N, widths=DEFAULT_WIDTHS, n_centers=17,
                      samples=64, scan=(-20.0, 20.0, 401), center_span=2.0):
    """Best Hardy certificate over a family of candidate intervals.

    The ``lambda`` profile is scanned on ``scan = (s_min, s_max, count)`` to
    locate its maximum (ties go to the point closest to the origin).
    Candidate centres are ``n_centers`` points of ``[argmax - center_span,
    argmax + center_span]``, candidate lengths are ``widths``, and the minimum
    of ``lambda`` on each interval is taken over ``samples`` equispaced
    points including both ends.  The certificate with the largest constant
    wins; ties prefer the centre closest to the origin, then the widest
    interval (for a constant profile the first branch of the constant grows
    with ``|I|``).
    """
    _require_hardy_hypotheses(geom)
    s_scan = np.linspace(*scan[:2], int(scan[2]))
    lam = np.array([lambda_schrodinger(geom, s, n) for s in s_scan])
    top = lam.max()
    if top <= LAMBDA_FLOOR:
        raise NoCertificateError(
            f"lambda <= {LAMBDA_FLOOR:g} on the whole scan; sigma is effectively zero"
        )
    near_top = np.flatnonzero(lam >= top - 1e-12 * top)
    s_peak = float(s_scan[near_top[np.argmin(np.abs(s_scan[near_top]))]])

    best = None
    for center in np.linspace(s_peak - center_span, s_peak + center_span, n_centers):
        for width in widths:
            b = 0.5 * width
            pts = np.linspace(center - b, center + b, samples)
            m = min(lambda_schrodinger(geom, p, n) for p in pts)
            if m <= LAMBDA_FLOOR:
                continue
            c = hardy_constant(m, width, geom.a, geom.sup_sigma())
            key = (c, -abs(center), width)
            if best is None or key > best[0]:
                best = (key, HardyCertificate(
                    s0=float(center), b=float(b), min_lambda=float(m), c_bound=float(c),
                    sup_sigma=geom.sup_sigma(), a=geom.a,
                ))
    if best is None:
        raise NoCertificateError("lambda is not positive on any candidate interval")
    return best[1]


# ---------------------------------------------------------------------------
# stability weight and threshold

def _weight_parts(geom, env, cert, bound):
    fm0, fp0 = f_bounds(geom, env, 0.0, bound)
    lead = cert.c_bound * min(1.0 / fp0, fm0)
    return lead, first_mode_energy(geom.a)


def stability_weight(geom, env, cert, s, bound="sharp"):
    """``w(s) = c min(1/f_plus(0), f_minus(0)) / rho(s)^2 - E1 (f_plus(s) - f_minus(s))``."""
    lead, E1 = _weight_parts(geom, env, cert, bound)
    s = np.asarray(s, dtype=float)
    return lead * cert.rho_inv_sq(s) - E1 * f_gap(geom, env, s, bound)


def _scaled_weight(geom, env, cert, s, bound):
    # w(s) * rho(s)^2: same sign as w, finite as |s| -> infinity
    lead, E1 = _weight_parts(geom, env, cert, bound)
    return lead - E1 * (1.0 + (s - cert.s0) ** 2) * f_gap(geom, env, s, bound)


def default_s_sample(s0, count=6001, stretch=12.0):
    u = np.linspace(-stretch, stretch, count)
    far = np.array([-1e8, -1e6, 1e6, 1e8])
    return np.unique(np.concatenate([s0 + np.sinh(u), far, [0.0, s0]]))


@dataclass
class StabilityReport:
    eps0_max: float
    w_min: float
    certificate: HardyCertificate
    bound: str = "sharp"
    samples: list = field(default_factory=list)

    def to_dict(self):
        return {
            "eps0_max": self.eps0_max,
            "w_min": self.w_min,
            "bound": self.bound,
            "certificate": self.certificate.to_dict(),
            "samples": [{"s": s, "w": w} for s, w in self.samples],
        }


def stability_threshold(geom, cert, bound="sharp", s_sample=None, rtol=1e-13,
                        n_report=41):
    """Largest envelope amplitude ``eps0`` keeping ``w > 0`` on a dense ``s`` sample.

    The sample is sinh-stretched around ``s0`` out to ``|s| ~ 1e8``, so the
    tail condition is checked as well.  ``w`` decreases in ``eps0`` pointwise,
    so feasibility is monotone and bisection is exact up to ``rtol``.
    """
    s = default_s_sample(cert.s0) if s_sample is None else np.asarray(s_sample, float)
    upper = min(1.0 / (3.0 * geom.a), 1.0 / geom.a)

    def feasible(eps0):
        env = CurvatureEnvelope(eps0)
        return float(np.min(_scaled_weight(geom, env, cert, s, bound))) > 0.0

    if feasible(upper):
        eps = upper
    else:
        lo, hi = 0.0, upper
        while hi - lo > rtol * upper:
            mid = 0.5 * (lo + hi)
            if feasible(mid):
                lo = mid
            else:
                hi = mid
        eps = lo
    env = CurvatureEnvelope(eps)
    w = stability_weight(geom, env, cert, s, bound)
    picks = np.unique(np.clip(np.searchsorted(
        s, cert.s0 + np.sinh(np.linspace(-8, 8, n_report))), 0, s.size - 1))
    samples = [(float(s[i]), float(w[i])) for i in picks]
    return StabilityReport(eps0_max=float(eps), w_min=float(np.min(w)), certificate=cert,
                           bound=bound, samples=samples)


# ---------------------------------------------------------------------------
# reports

@dataclass
class InequalityReport:
    """Per-trial defects ``rhs_gap`` normalised by the relevant squared norm."""

    name: str
    defects: list
    norms: list
    tol: float
    extra: dict = field(default_factory=dict)

    @property
    def normalized(self):
        return [d / n for d, n in zip(self.defects, self.norms)]

    @property
    def min_normalized_defect(self):
        return min(self.normalized) if self.defects else float("nan")

    @property
    def worst_trial(self):
        return int(np.argmin(self.normalized)) if self.defects else -1

    @property
    def passed(self):
        ok = all(v >= -self.tol for v in self.normalized)
        return ok and self.extra.get("passed_extra", True)

    def to_dict(self):
        return {
            "inequality": self.name,
            "passed": bool(self.passed),
            "tol": self.tol,
            "n_trials": len(self.defects),
            "min_normalized_defect": self.min_normalized_defect,
            "worst_trial": self.worst_trial,
            "defects": self.defects,
            "norms": self.norms,
            **{k: v for k, v in self.extra.items() if k != "passed_extra"},
        }


# ---------------------------------------------------------------------------
# 1D Hardy inequality

@dataclass(frozen=True)
class HardyTrial1D:
    """Test functions with ``u(0) = 0``.

    kinds:
      ``x_gaussian``    u = x * sum_i A_i exp(-(x - c_i)^2 / (2 w_i^2));
                        params: tuple of (A, c, w)
      ``power_spline``  odd, |x|^(1/2+d) on |x| <= 1 and |x|^(1/2-d) beyond;
                        params: (d,) with 0 < d < 1/2
      ``half_line``     u = 0 for x < 0, A x exp(-x / w) for x >= 0; params: (A, w)
    """

    kind: str
    params: tuple

    def u(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "x_gaussian":
            return x * sum(A * np.exp(-0.5 * ((x - c) / w) ** 2) for A, c, w in self.params)
        if self.kind == "power_spline":
            (d,) = self.params
            ax = np.abs(x)
            return np.sign(x) * np.where(ax <= 1.0, ax ** (0.5 + d), ax ** (0.5 - d))
        if self.kind == "half_line":
            A, w = self.params
            return np.where(x >= 0.0, A * x * np.exp(-np.maximum(x, 0.0) / w), 0.0)
        raise PreconditionError(f"unknown 1D trial kind {self.kind!r}")

    def du(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "x_gaussian":
            out = 0.0
            for A, c, w in self.params:
                e = A * np.exp(-0.5 * ((x - c) / w) ** 2)
                out = out + e * (1.0 - x * (x - c) / w**2)
            return out
        if self.kind == "power_spline":
            (d,) = self.params
            ax = np.abs(x)
            return np.where(ax <= 1.0, (0.5 + d) * ax ** (d - 0.5), (0.5 - d) * ax ** (-0.5 - d))
        if self.kind == "half_line":
            A, w = self.params
            xp = np.maximum(x, 0.0)
            return np.where(x >= 0.0, A * np.exp(-xp / w) * (1.0 - xp / w), 0.0)
        raise PreconditionError(f"unknown 1D trial kind {self.kind!r}")

    def breakpoints(self):
        pts = {0.0}
        if self.kind == "x_gaussian":
            for _, c, w in self.params:
                pts.update(c + w * np.array([-6.0, -2.0, 0.0, 2.0, 6.0]))
        elif self.kind == "power_spline":
            pts.update([-1.0, 1.0])
        elif self.kind == "half_line":
            _, w = self.params
            pts.update([w, 10.0 * w, 40.0 * w])
        return sorted(pts)


def random_hardy_trials_1d(count, rng=None, max_terms=3):
    rng = np.random.default_rng(rng)
    out = []
    for _ in range(count):
        k = int(rng.integers(1, max_terms + 1))
        params = tuple(
            (float(rng.uniform(-10, 10)), float(rng.uniform(-5, 5)), float(rng.uniform(0.2, 5)))
            for _ in range(k)
        )
        out.append(HardyTrial1D("x_gaussian", params))
    return out


def _quad_line(f, points, rtol=1e-11):
    """``int_R f`` split at ``points``, with infinite tails."""
    edges = [-np.inf] + list(points) + [np.inf]
    total, err = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if lo == hi:
            continue
        val, e = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=rtol, limit=400)
        total += val
        err += e
    if not err <= 1e-8 * max(abs(total), 1e-300):
        raise QuadratureError(f"1D quadrature error estimate {err:.3g} for value {total:.6g}")
    return total


def verify_hardy_1d(trials, tol=DEFECT_TOL):
    """Ratio ``int u^2/x^2 / int u'^2`` per trial (must not exceed 4)."""
    ratios, lhs_all, rhs_all = [], [], []
    for tr in trials:
        pts = tr.breakpoints()
        if abs(float(tr.u(0.0))) > 0.0:
            raise PreconditionError("1D Hardy trials must vanish at the origin")
        lhs = _quad_line(lambda x: float(tr.u(x)) ** 2 / (x * x), pts)
        rhs = _quad_line(lambda x: float(tr.du(x)) ** 2, pts)
        ratios.append(lhs / rhs)
        lhs_all.append(lhs)
        rhs_all.append(rhs)
    defects = [4.0 * r - l for l, r in zip(lhs_all, rhs_all)]
    rep = InequalityReport("hardy_1d", defects=defects, norms=rhs_all, tol=tol)
    max_ratio = max(ratios) if ratios else float("nan")
    rep.extra.update(
        ratios=ratios,
        normalized_ratios=[r / 4.0 for r in ratios],
        max_ratio=max_ratio,
        passed_extra=bool(max_ratio <= 4.0 + tol) if ratios else True,
    )
    return rep


# ---------------------------------------------------------------------------
# 2D inequalities

def verify_local_hardy(geom, trials, table=None, tol=DEFECT_TOL, order=20, n_t=64):
    """Defect of the local Hardy inequality with weight ``lambda``."""
    rep0 = check_assumptions(geom)
    if not rep0.checks["twist_bound"].passed:
        raise HypothesisError("hypothesis failed: a*sup|sigma| >= sqrt(2)")
    table = LambdaTable(geom) if table is None else table
    E1 = first_mode_energy(geom.a)

    def compute(tq):
        p2 = tq.psi**2
        q_s = tq.integrate(tq.ps**2 / tq.h0)
        q_t = tq.integrate(tq.h0 * tq.pt**2)
        n0 = tq.integrate(tq.h0 * p2)
        lam = tq.weighted(table, tq.h0 * p2)
        return {"defect": (q_s + q_t - E1 * n0) - q_s - lam, "norm": n0}

    defects, norms = [], []
    for tr in trials:
        v = converged_quantities(geom, tr, compute, order=order, n_t=n_t,
                                 scale_key="norm")
        defects.append(v["defect"])
        norms.append(v["norm"])
    rep = InequalityReport("local", defects, norms, tol)
    rep.extra["lambda_table_error"] = table.error
    return rep


def _theorem1_parts(geom, cert, E1):
    def compute(tq):
        p2 = tq.psi**2
        q0 = tq.integrate(tq.ps**2 / tq.h0) + tq.integrate(tq.h0 * tq.pt**2)
        n0 = tq.integrate(tq.h0 * p2)
        rho = tq.weighted(cert.rho_inv_sq, tq.h0 * p2)
        gap = q0 - E1 * n0
        return {"defect": gap - cert.c_bound * rho, "norm": n0, "gap": gap, "rho": rho}
    return compute


def _require_certificate(geom, cert):
    if cert is None or geom.sigma_vanishes():
        raise HypothesisError("hypothesis failed: σ ≡ 0, the global Hardy inequality needs a twist")
    _require_hardy_hypotheses(geom)


def verify_theorem1(geom, cert, trials, tol=DEFECT_TOL, order=20, n_t=64):
    """Defect of ``Q0 - E1 |psi|^2 >= c |rho^-1 psi|^2`` plus the empirical constant."""
    _require_certificate(geom, cert)
    E1 = first_mode_energy(geom.a)
    compute = _theorem1_parts(geom, cert, E1)
    defects, norms, ratios = [], [], []
    for tr in trials:
        v = converged_quantities(geom, tr, compute, order=order, n_t=n_t, scale_key="norm")
        defects.append(v["defect"])
        norms.append(v["norm"])
        ratios.append(v["gap"] / v["rho"])
    rep = InequalityReport("theorem1", defects, norms, tol)
    emp = min(ratios) if ratios else float("nan")
    rep.extra.update(
        c_bound=cert.c_bound,
        empirical_c=emp,
        ratios=ratios,
        passed_extra=bool(emp >= cert.c_bound - 1e-10) if ratios else True,
    )
    return rep


def cutoff(s, s0, b):
    """Piecewise-linear cutoff: ``|s - s0| / b`` inside the interval, 1 outside."""
    return np.minimum(np.abs(np.asarray(s, float) - s0) / b, 1.0)


def verify_lemma_kinetic(geom, cert, trials, tol=DEFECT_TOL, order=20, n_t=64):
    """Defect of the kinetic bound on ``|rho^-1 psi|^2`` with the interval of ``cert``.

    Also reports, per trial, the unweighted chain
    ``A <= B <= C <= D`` obtained with the cutoff ``f`` (diagnostic).
    """
    _require_certificate(geom, cert)
    s0, b = cert.s0, cert.b
    lo, hi = cert.interval
    g = 1.0 + (geom.a * cert.sup_sigma) ** 2
    kI = 2.0 + 64.0 / cert.interval_len**2

    def chi(s):
        return ((s >= lo) & (s <= hi)).astype(float)

    def compute(tq):
        p2 = tq.psi**2
        h0 = tq.h0
        rho = tq.weighted(cert.rho_inv_sq, h0 * p2)
        kin = tq.integrate(tq.ps**2 / h0)
        mass_I = tq.weighted(chi, h0 * p2)
        lhs = rho / math.sqrt(g)
        rhs = 16.0 * math.sqrt(g) * kin + kI * mass_I
        # unweighted chain of the cutoff argument
        sn = tq.rule.s
        f = cutoff(sn, s0, b)
        inside = np.abs(sn - s0) < b
        chi_v = chi(sn)
        dist2 = np.maximum((sn - s0) ** 2, 1e-300)
        f2_over_dist2 = np.where(inside, 1.0 / b**2, 1.0 / dist2)
        df2 = np.where(inside, 1.0 / b**2, 0.0)
        ps2 = tq.ps**2
        term_I = tq.weighted_by(chi_v * (1.0 - f) ** 2, p2)
        A = tq.weighted_by(cert.rho_inv_sq(sn), p2)
        B = 2.0 * tq.weighted_by(f2_over_dist2, p2) + 2.0 * term_I
        Cc = 16.0 * tq.weighted_by(df2, p2) + 16.0 * tq.weighted_by(f * f, ps2) + 2.0 * term_I
        D = 16.0 * tq.integrate(ps2) + (2.0 + 16.0 / b**2) * tq.weighted_by(chi_v, p2)
        return {"defect": rhs - lhs, "norm": tq.integrate(h0 * p2),
                "A": A, "B": B, "C": Cc, "D": D}

    defects, norms, chain_ok = [], [], []
    breaks = (lo, s0, hi)
    for tr in trials:
        v = converged_quantities(geom, tr, compute, breakpoints=breaks, order=order,
                                 n_t=n_t, scale_key="norm")
        defects.append(v["defect"])
        norms.append(v["norm"])
        eps = tol * v["norm"]
        chain_ok.append(bool(v["A"] <= v["B"] + eps and v["B"] <= v["C"] + eps
                             and v["C"] <= v["D"] + eps))
    rep = InequalityReport("kinetic", defects, norms, tol)
    rep.extra.update(chain_ok=chain_ok, interval=[lo, hi])
    return rep


def verify_curved_hardy(geom, env, cert, trials, report=None, bound="sharp",
                        tol=DEFECT_TOL, order=20, n_t=64):
    """Defect of ``Q[psi] - E1 |psi|_H^2 >= int w h0 |psi|^2`` for the curved strip.

    ``geom`` carries the curvature ``k``; it must satisfy ``|k(s)| <= eps(s)``
    and ``env.eps0`` must not exceed the certified threshold of ``report``
    (computed when not given).  The weight is clamped at zero only for
    round-off size negatives; anything larger is an inconsistency.
    """
    _require_certificate(geom, cert)
    rep0 = check_assumptions(geom, env)
    for key in ("basic", "envelope", "envelope_ratio", "envelope_fit"):
        if not rep0.checks[key].passed:
            raise HypothesisError(f"hypothesis failed: {rep0.checks[key].detail}")
    if report is None:
        report = stability_threshold(geom, cert, bound=bound)
    if env.eps0 > report.eps0_max:
        raise HypothesisError(
            f"eps0={env.eps0:.6g} exceeds the certified threshold {report.eps0_max:.6g}"
        )
    E1 = first_mode_energy(geom.a)
    noise = 1e-13 * cert.c_bound

    def weight(s):
        w = stability_weight(geom, env, cert, s, bound)
        if np.min(w) < -noise:
            raise InconsistencyError(
                f"negative stability weight {np.min(w):.3g} below the certified threshold"
            )
        return np.maximum(w, 0.0)

    def compute(tq):
        p2 = tq.psi**2
        h, h0 = tq.h, tq.h0
        q = tq.integrate(tq.ps**2 / h) + tq.integrate(h * tq.pt**2)
        n = tq.integrate(h * p2)
        wint = tq.weighted(weight, h0 * p2)
        return {"defect": (q - E1 * n) - wint, "norm": n}

    defects, norms = [], []
    for tr in trials:
        v = converged_quantities(geom, tr, compute, order=order, n_t=n_t, scale_key="norm")
        defects.append(v["defect"])
        norms.append(v["norm"])
    # the ratio bounds themselves, on a sample of the strip
    s = np.linspace(-30.0, 30.0, 601)
    t = np.linspace(-geom.a, geom.a, 43)[1:-1]
    S, T = np.meshgrid(s, t, indexing="ij")
    ratio = eval_h(geom, S, T) / eval_h0(geom, S, T)
    fm, fp = f_bounds(geom, env, S, bound)
    ratio_viol = float(max(np.max(fm - ratio), np.max(ratio - fp), 0.0))
    rep = InequalityReport("curved", defects, norms, tol)
    rep.extra.update(eps0=env.eps0, eps0_max=report.eps0_max, bound=bound,
                     ratio_bound_violation=ratio_viol)
    return rep


def with_constant(cert, c_bound):
    """Copy of ``cert`` with a different (synthetic) constant."""
    return replace(cert, c_bound=float(c_bound))
