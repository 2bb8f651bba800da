"""Analytic trial functions on the strip and the quadrature used to integrate them.

A trial function is a finite sum ``psi(s, t) = sum_i g_i(s) chi_i(t)`` where
``g_i`` is a Gaussian or compactly supported bump and ``chi_i`` is a
combination of Dirichlet modes ``sin(m pi (t + a) / (2a))`` of ``(-a, a)``.
All partial derivatives are closed form, so the quadratic forms are pure
quadrature problems.

Longitudinal integrals use composite Gauss-Legendre on panels no longer
than the narrowest bump width (plus caller-supplied breakpoints where a
weight is discontinuous); transverse integrals use a single Gauss-Legendre
rule on ``(-a, a)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError, QuadratureError
from .geometry import FunctionSpec, eval_h, eval_h0

SUPPORT_CUTOFF = 1e-14


def _compact_edges(prof):
    # geometric grading towards the flat ends of a compact bump's support
    x = 1.0 - 2.0 ** -np.arange(1, 11)
    x = np.concatenate([[-1.0, 1.0], np.linspace(-0.5, 0.5, 5), x, -x])
    return prof.center + prof.width * x


@dataclass(frozen=True)
class TrialTerm:
    profile: FunctionSpec
    modes: tuple = (1.0,)

    def __post_init__(self):
        if self.profile.family not in ("gaussian_bump", "compact_bump"):
            raise PreconditionError("trial profiles must be gaussian or compact bumps")
        if not self.modes:
            raise PreconditionError("need at least one transverse mode")


@dataclass(frozen=True)
class TrialFunction:
    """``psi(s, t) = sum_i profile_i(s) * sum_m modes_i[m-1] sin(m pi (t+a)/(2a))``."""

    a: float
    terms: tuple = field(default=())

    @classmethod
    def product(cls, a, profile, modes=(1.0,)):
        return cls(a=float(a), terms=(TrialTerm(profile, tuple(modes)),))

    def transverse(self, term, t):
        t = np.asarray(t, dtype=float)
        chi = np.zeros_like(t)
        dchi = np.zeros_like(t)
        for m, c in enumerate(term.modes, start=1):
            if c == 0.0:
                continue
            k = m * math.pi / (2.0 * self.a)
            arg = k * (t + self.a)
            chi += c * np.sin(arg)
            dchi += c * k * np.cos(arg)
        return chi, dchi

    def evaluate(self, s, t):
        """``(psi, d_s psi, d_t psi)`` on the tensor grid ``s x t`` (shape ``(len(s), len(t))``)."""
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        psi = np.zeros((s.size, t.size))
        ps = np.zeros_like(psi)
        pt = np.zeros_like(psi)
        for term in self.terms:
            g = term.profile(s)
            dg = term.profile.derivative(s)
            chi, dchi = self.transverse(term, t)
            psi += np.outer(g, chi)
            ps += np.outer(dg, chi)
            pt += np.outer(g, dchi)
        return psi, ps, pt

    def __call__(self, s, t):
        """Pointwise value with broadcasting of ``s`` and ``t``."""
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        out = np.zeros(s.shape)
        for term in self.terms:
            chi, _ = self.transverse(term, t)
            out = out + term.profile(s) * chi
        return out

    def support(self):
        parts = [term.profile.support(SUPPORT_CUTOFF) for term in self.terms]
        return min(p[0] for p in parts), max(p[1] for p in parts)

    def panel_edges(self):
        edges = []
        for term in self.terms:
            prof = term.profile
            if prof.family == "compact_bump":
                edges.append(_compact_edges(prof))
                continue
            lo, hi = prof.support(SUPPORT_CUTOFF)
            n = max(1, int(math.ceil((hi - lo) / prof.width)))
            edges.append(np.linspace(lo, hi, n + 1))
        return np.unique(np.concatenate(edges))

    def to_dict(self):
        return {
            "a": self.a,
            "terms": [
                {"profile": t.profile.to_dict(), "modes": list(t.modes)} for t in self.terms
            ],
        }


def random_trials(a, count, rng=None, s0=0.0, max_bumps=3, max_admixture=0.5,
                  compact_fraction=0.25):
    """Random trial functions spanning localized, delocalized and multi-bump regimes.

    Amplitudes in [0.1, 10], centers in [s0 - 10, s0 + 10], widths in
    [0.2, 5], up to ``max_bumps`` summed bumps, each with the first
    Dirichlet mode plus a second-mode admixture of at most ``max_admixture``.
    """
    rng = np.random.default_rng(rng)
    out = []
    for _ in range(count):
        terms = []
        for _ in range(int(rng.integers(1, max_bumps + 1))):
            amp = float(rng.uniform(0.1, 10.0))
            center = float(rng.uniform(s0 - 10.0, s0 + 10.0))
            width = float(rng.uniform(0.2, 5.0))
            if rng.random() < compact_fraction:
                prof = FunctionSpec.compact_bump(amp, center, width)
            else:
                prof = FunctionSpec.gaussian_bump(amp, center, width)
            admix = float(rng.uniform(-max_admixture, max_admixture)) if rng.random() < 0.7 else 0.0
            terms.append(TrialTerm(prof, (1.0, admix)))
        out.append(TrialFunction(a=float(a), terms=tuple(terms)))
    return out


def gauss_legendre_panels(edges, order):
    """Composite Gauss-Legendre nodes and weights on consecutive ``edges``."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo) + half * x[None, :]).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


@dataclass
class TensorRule:
    s: np.ndarray
    ws: np.ndarray
    t: np.ndarray
    wt: np.ndarray

    def integrate(self, values):
        return float(self.ws @ values @ self.wt)


def _leaves(geom):
    out = []

    def collect(f):
        if f.family == "sum":
            for term in f.terms:
                collect(term)
        elif f.family != "constant":
            out.append(f)

    for f in (geom.kappa, geom.tau, geom.theta):
        collect(f)
    return out


def feature_scale(geom, cap=1.0):
    """Shortest length on which the coefficients of ``geom`` vary (at most ``cap``)."""
    return min([cap] + [f.width for f in _leaves(geom)])


def geometry_breakpoints(geom):
    """Panel edges resolving the compactly supported coefficients of ``geom``."""
    parts = [_compact_edges(f) for f in _leaves(geom) if f.family == "compact_bump"]
    return np.concatenate(parts) if parts else np.empty(0)


def trial_rule(trial, breakpoints=(), order=20, n_t=64, refine=1, max_panel=None):
    """Tensor rule adapted to ``trial``.

    ``max_panel`` caps the panel length (to resolve the weights as well as
    the trial); ``refine`` then splits every panel that many times.
    """
    edges = trial.panel_edges()
    lo, hi = edges[0], edges[-1]
    bp = [b for b in breakpoints if lo < b < hi]
    edges = np.unique(np.concatenate([edges, bp]))
    if max_panel is not None:
        parts = np.maximum(np.ceil(np.diff(edges) / max_panel).astype(int), 1)
        edges = np.concatenate([np.linspace(edges[i], edges[i + 1], parts[i] + 1)[:-1]
                                for i in range(edges.size - 1)] + [edges[-1:]])
    if refine > 1:
        fine = [np.linspace(edges[i], edges[i + 1], refine + 1)[:-1]
                for i in range(edges.size - 1)]
        edges = np.concatenate(fine + [edges[-1:]])
    s, ws = gauss_legendre_panels(edges, order)
    t, wt = np.polynomial.legendre.leggauss(n_t)
    a = trial.a
    return TensorRule(s=s, ws=ws, t=a * t, wt=a * wt)


class TrialQuadrature:
    """Trial values, derivatives and metric coefficients at the nodes of a rule."""

    def __init__(self, geom, trial, rule):
        if abs(trial.a - geom.a) > 1e-14 * geom.a:
            raise PreconditionError("trial and geometry have different half-widths")
        self.geom = geom
        self.trial = trial
        self.rule = rule
        self.psi, self.ps, self.pt = trial.evaluate(rule.s, rule.t)
        S, T = np.meshgrid(rule.s, rule.t, indexing="ij")
        self.S, self.T = S, T
        self.h0 = eval_h0(geom, S, T)
        self._h = None

    @property
    def h(self):
        if self._h is None:
            self._h = eval_h(self.geom, self.S, self.T)
        return self._h

    def integrate(self, values):
        return self.rule.integrate(values)

    def weighted(self, g_of_s, values):
        """``int g(s) * values`` with ``g`` evaluated on the longitudinal nodes."""
        return self.weighted_by(np.asarray(g_of_s(self.rule.s), dtype=float), values)

    def weighted_by(self, g, values):
        """``int g(s) * values`` for ``g`` given on the longitudinal nodes."""
        return float((self.rule.ws * g) @ values @ self.rule.wt)


def converged_quantities(geom, trial, compute, breakpoints=(), order=20, n_t=64,
                         check_keys=("defect",), scale_key=None, rtol=1e-10):
    """Evaluate ``compute(TrialQuadrature) -> dict`` on a rule and its refinement.

    Panels are no longer than :func:`feature_scale` of ``geom`` and also
    break at :func:`geometry_breakpoints`.  Raises :class:`QuadratureError` when a key in ``check_keys`` changes by
    more than ``rtol`` times ``|scale_key|`` (or the value itself) between the
    two rules.  Returns the refined values.
    """
    panel = feature_scale(geom)
    breakpoints = np.concatenate([np.asarray(breakpoints, float), geometry_breakpoints(geom)])
    coarse = compute(TrialQuadrature(
        geom, trial, trial_rule(trial, breakpoints, order, n_t, max_panel=panel)))
    fine = compute(TrialQuadrature(
        geom, trial, trial_rule(trial, breakpoints, order, n_t + n_t // 2, refine=2,
                                max_panel=panel)))
    for key in check_keys:
        scale = abs(fine[scale_key]) if scale_key else abs(fine[key])
        if abs(fine[key] - coarse[key]) > rtol * max(scale, 1e-300):
            raise QuadratureError(
                f"quadrature for {key!r} not converged: {coarse[key]!r} vs {fine[key]!r}"
            )
    return fine
