"""Pointwise geometry of a ruled strip.

A strip of half-width ``a`` is described by three bounded functions of the
arc length ``s``: the curvature ``kappa`` and torsion ``tau`` of the
reference curve, and the rotation angle ``theta`` of the rulings about the
tangent.  Everything spectral depends only on the two combinations

    k(s)     = kappa(s) * cos(theta(s))    (geodesic curvature of the curve)
    sigma(s) = tau(s) - theta'(s)          (effective twist)

through the metric ``diag(h**2, 1)`` with
``h(s, t) = sqrt((1 - t k)**2 + t**2 sigma**2)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (
    ConfigError,
    DomainError,
    InfeasibleEnvelopeError,
    PreconditionError,
)

FAMILIES = ("constant", "gaussian_bump", "rational_decay", "compact_bump", "sum")

# max_x |x| exp(-x^2/2), max_x 2|x|/(1+x^2)^2, and the compact bump analogue
# (attained at x = 1, x^2 = 1/3 and x^4 = 1/3 respectively).
_GAUSS_DMAX = math.exp(-0.5)
_RATIONAL_DMAX = 3.0 * math.sqrt(3.0) / 8.0
_X_COMPACT = 3.0 ** -0.25
_COMPACT_DMAX = (
    2.0 * _X_COMPACT / (1.0 - _X_COMPACT**2) ** 2
    * math.exp(1.0 - 1.0 / (1.0 - _X_COMPACT**2))
)


@dataclass(frozen=True)
class FunctionSpec:
    """A bounded function on the real line with a closed-form derivative.

    Families (``x = (s - center) / width``):

    ``constant``        amplitude
    ``gaussian_bump``   amplitude * exp(-x**2 / 2)
    ``rational_decay``  amplitude / (1 + x**2)
    ``compact_bump``    amplitude * exp(1 - 1 / (1 - x**2)) for |x| < 1, else 0
    ``sum``             sum of ``terms``

    All bump families peak at ``amplitude`` so the sup-norm is exact.
    """

    family: str
    amplitude: float = 0.0
    center: float = 0.0
    width: float = 1.0
    terms: tuple = field(default=())

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown function family {self.family!r}")
        if self.family == "sum":
            if not all(isinstance(t, FunctionSpec) for t in self.terms):
                raise ConfigError("sum terms must be FunctionSpec instances")
        elif self.family != "constant" and not self.width > 0:
            raise ConfigError(f"width must be positive, got {self.width}")

    # constructors -------------------------------------------------------
    @classmethod
    def constant(cls, value):
        return cls("constant", amplitude=float(value))

    @classmethod
    def zero(cls):
        return cls("constant", amplitude=0.0)

    @classmethod
    def gaussian_bump(cls, amplitude, center=0.0, width=1.0):
        return cls("gaussian_bump", float(amplitude), float(center), float(width))

    @classmethod
    def rational_decay(cls, amplitude, center=0.0, width=1.0):
        return cls("rational_decay", float(amplitude), float(center), float(width))

    @classmethod
    def compact_bump(cls, amplitude, center=0.0, width=1.0):
        return cls("compact_bump", float(amplitude), float(center), float(width))

    @classmethod
    def sum_of(cls, *terms):
        return cls("sum", terms=tuple(terms))

    # evaluation ---------------------------------------------------------
    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        fam = self.family
        if fam == "constant":
            return np.full_like(s, self.amplitude)
        if fam == "sum":
            out = np.zeros_like(s)
            for term in self.terms:
                out = out + term(s)
            return out
        x = (s - self.center) / self.width
        if fam == "gaussian_bump":
            return self.amplitude * np.exp(-0.5 * x * x)
        if fam == "rational_decay":
            return self.amplitude / (1.0 + x * x)
        # compact bump
        out = np.zeros_like(x)
        inside = np.abs(x) < 1.0
        xi = x[inside]
        out[inside] = self.amplitude * np.exp(1.0 - 1.0 / (1.0 - xi * xi))
        return out

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        fam = self.family
        if fam == "constant":
            return np.zeros_like(s)
        if fam == "sum":
            out = np.zeros_like(s)
            for term in self.terms:
                out = out + term.derivative(s)
            return out
        w = self.width
        x = (s - self.center) / w
        if fam == "gaussian_bump":
            return -self.amplitude * x * np.exp(-0.5 * x * x) / w
        if fam == "rational_decay":
            return -2.0 * self.amplitude * x / (w * (1.0 + x * x) ** 2)
        out = np.zeros_like(x)
        inside = np.abs(x) < 1.0
        xi = x[inside]
        one_m = 1.0 - xi * xi
        out[inside] = (
            self.amplitude * np.exp(1.0 - 1.0 / one_m) * (-2.0 * xi / one_m**2) / w
        )
        return out

    # norms ---------------------------------------------------------------
    def sup(self):
        """Upper bound for ``sup |f|``; exact except for sums."""
        if self.family == "sum":
            return float(sum(t.sup() for t in self.terms))
        return abs(self.amplitude)

    def sup_derivative(self):
        """Upper bound for ``sup |f'|``; exact except for sums."""
        fam = self.family
        if fam == "constant":
            return 0.0
        if fam == "sum":
            return float(sum(t.sup_derivative() for t in self.terms))
        scale = abs(self.amplitude) / self.width
        if fam == "gaussian_bump":
            return scale * _GAUSS_DMAX
        if fam == "rational_decay":
            return scale * _RATIONAL_DMAX
        return scale * _COMPACT_DMAX

    def is_zero(self):
        if self.family == "sum":
            return all(t.is_zero() for t in self.terms)
        return self.amplitude == 0.0

    def is_constant(self):
        if self.family == "sum":
            return all(t.is_constant() or t.is_zero() for t in self.terms)
        return self.family == "constant" or self.amplitude == 0.0

    def support(self, cutoff=1e-14):
        """Interval outside which ``|f| < cutoff * sup|f|`` (None if unbounded)."""
        fam = self.family
        if self.is_zero():
            return (0.0, 0.0)
        if fam == "gaussian_bump":
            r = self.width * math.sqrt(-2.0 * math.log(cutoff))
        elif fam == "compact_bump":
            r = self.width
        elif fam == "rational_decay":
            r = self.width * math.sqrt(1.0 / cutoff - 1.0)
        elif fam == "sum":
            parts = [t.support(cutoff) for t in self.terms if not t.is_zero()]
            if any(p is None for p in parts):
                return None
            return (min(p[0] for p in parts), max(p[1] for p in parts))
        else:
            return None
        return (self.center - r, self.center + r)

    # serialisation -------------------------------------------------------
    def to_dict(self):
        if self.family == "sum":
            return {"family": "sum", "terms": [t.to_dict() for t in self.terms]}
        if self.family == "constant":
            return {"family": "constant", "params": {"amplitude": self.amplitude}}
        return {
            "family": self.family,
            "params": {
                "amplitude": self.amplitude,
                "center": self.center,
                "width": self.width,
            },
        }

    @classmethod
    def from_dict(cls, d):
        if isinstance(d, (int, float)):
            return cls.constant(d)
        if not isinstance(d, dict) or "family" not in d:
            raise ConfigError(f"function spec must be an object with 'family': {d!r}")
        fam = d["family"]
        if fam == "sum":
            terms = d.get("terms")
            if not isinstance(terms, list) or not terms:
                raise ConfigError("'sum' needs a non-empty 'terms' list")
            return cls.sum_of(*(cls.from_dict(t) for t in terms))
        params = d.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("'params' must be an object")
        if fam == "constant":
            value = params.get("amplitude", params.get("value", 0.0))
            return cls.constant(_as_float(value, "amplitude"))
        if fam not in FAMILIES:
            raise ConfigError(f"unknown function family {fam!r}")
        unknown = set(params) - {"amplitude", "center", "width"}
        if unknown:
            raise ConfigError(f"unknown parameters for {fam}: {sorted(unknown)}")
        return cls(
            fam,
            amplitude=_as_float(params.get("amplitude", 1.0), "amplitude"),
            center=_as_float(params.get("center", 0.0), "center"),
            width=_as_float(params.get("width", 1.0), "width"),
        )


def _as_float(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"parameter {name!r} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"parameter {name!r} must be finite")
    return float(value)


@dataclass(frozen=True)
class CurvatureEnvelope:
    """Decay envelope ``eps(s) = eps0 / (1 + s**2)`` for the geodesic curvature."""

    eps0: float

    def __post_init__(self):
        if not self.eps0 >= 0:
            raise PreconditionError(f"eps0 must be non-negative, got {self.eps0}")

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return self.eps0 / (1.0 + s * s)


@dataclass(frozen=True)
class StripGeometry:
    """Half-width ``a`` and the curve data ``kappa``, ``tau``, ``theta``."""

    a: float
    kappa: FunctionSpec = field(default_factory=FunctionSpec.zero)
    tau: FunctionSpec = field(default_factory=FunctionSpec.zero)
    theta: FunctionSpec = field(default_factory=FunctionSpec.zero)

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise PreconditionError(f"half-width a must be positive, got {self.a}")

    @classmethod
    def from_k_sigma(cls, a, k=None, sigma=None):
        """Abstract strip given directly by ``k`` and ``sigma`` (theta = 0)."""
        return cls(
            a=float(a),
            kappa=k if k is not None else FunctionSpec.zero(),
            tau=sigma if sigma is not None else FunctionSpec.zero(),
        )

    def k(self, s):
        s = np.asarray(s, dtype=float)
        if self.theta.is_zero():
            return self.kappa(s)
        return self.kappa(s) * np.cos(self.theta(s))

    def sigma(self, s):
        s = np.asarray(s, dtype=float)
        return self.tau(s) - self.theta.derivative(s)

    def sup_k(self):
        """Upper bound for ``sup |kappa cos(theta)|``."""
        if self.theta.is_constant():
            c = abs(math.cos(float(self.theta(0.0))))
            return self.kappa.sup() * c
        return self.kappa.sup()

    def sup_sigma(self):
        """Upper bound for ``sup |tau - theta'|`` (triangle inequality)."""
        return self.tau.sup() + self.theta.sup_derivative()

    def sigma_vanishes(self):
        return self.sup_sigma() == 0.0

    def is_geodesic(self):
        return self.sup_k() == 0.0

    def geodesic(self):
        """The geodesic strip with the same twist (k replaced by 0)."""
        return StripGeometry(a=self.a, tau=self.tau, theta=self.theta)

    def to_dict(self):
        return {
            "a": self.a,
            "kappa": self.kappa.to_dict(),
            "tau": self.tau.to_dict(),
            "theta": self.theta.to_dict(),
        }


def _check_t(geom, t, margin=0.0):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) + margin >= geom.a):
        raise DomainError(f"|t| must be below a={geom.a} (stencil margin {margin})")
    return t


def eval_h(geom, s, t):
    """Metric coefficient ``h(s, t)`` of the curved strip."""
    t = _check_t(geom, t)
    s = np.asarray(s, dtype=float)
    return np.hypot(1.0 - t * geom.k(s), t * geom.sigma(s))


def eval_h0(geom, s, t):
    """Metric coefficient ``h0(s, t) = sqrt(1 + t**2 sigma**2)`` of the geodesic strip."""
    t = _check_t(geom, t)
    s = np.asarray(s, dtype=float)
    return np.hypot(1.0, t * geom.sigma(s))


def eval_K(geom, s, t):
    """Gauss curvature ``-sigma**2 / h**4`` (always non-positive)."""
    sig = geom.sigma(np.asarray(s, dtype=float))
    h = eval_h(geom, s, t)
    return -(sig * sig) / h**4


def eval_K_numeric(geom, s, t, step=1e-3):
    """Gauss curvature ``-h_tt / h`` by a central second difference in ``t``."""
    _check_t(geom, t, margin=2.0 * step)
    t = np.asarray(t, dtype=float)
    hm = eval_h(geom, s, t - step)
    h = eval_h(geom, s, t)
    hp = eval_h(geom, s, t + step)
    return -(hp - 2.0 * h + hm) / (step * step) / h


def eval_V(geom, s, t):
    """Transverse potential of the geodesic strip after the ``sqrt(h0)`` transform."""
    if not geom.a * geom.sup_sigma() < math.sqrt(2.0):
        raise PreconditionError(
            f"a * sup|sigma| = {geom.a * geom.sup_sigma():.6g} must be below sqrt(2)"
        )
    t = _check_t(geom, t)
    sig2 = geom.sigma(np.asarray(s, dtype=float)) ** 2
    ts2 = t * t * sig2
    return sig2 * (2.0 - ts2) / (4.0 * (1.0 + ts2) ** 2)


def first_mode_energy(a):
    """Lowest Dirichlet eigenvalue ``pi**2 / (2a)**2`` of ``-d^2/dt^2`` on (-a, a)."""
    if not a > 0:
        raise PreconditionError(f"a must be positive, got {a}")
    return math.pi**2 / (2.0 * a) ** 2


def _ratio_terms(geom, env, s, bound):
    ae = geom.a * env(s)
    up = ae * (2.0 + ae)
    if bound == "sharp":
        down = up / (1.0 + (geom.a * geom.sup_sigma()) ** 2)
    elif bound == "uniform":
        # (1 - a eps)**2 is the exact infimum of (h/h0)**2 over |t| < a, |k| <= eps
        down = ae * (2.0 - ae)
    else:
        raise PreconditionError(f"unknown ratio bound {bound!r}")
    return ae, up, down


def f_bounds(geom, env, s, bound="sharp"):
    """Bounds ``f_minus <= h / h0 <= f_plus`` under the curvature envelope.

    ``bound="sharp"`` divides the lower deficit by ``1 + a**2 sup|sigma|**2``;
    ``bound="uniform"`` uses ``f_minus = 1 - a*eps``, valid for every ``t``
    and every twist profile.
    """
    ae, up, down = _ratio_terms(geom, env, s, bound)
    rad = 1.0 - down
    if np.any(rad <= 0) or (bound == "uniform" and np.any(ae >= 1.0)):
        raise InfeasibleEnvelopeError(
            f"lower ratio bound undefined (eps0={env.eps0}, a={geom.a})"
        )
    fp = np.sqrt(1.0 + up)
    fm = 1.0 - ae if bound == "uniform" else np.sqrt(rad)
    return fm, fp


def sharp_bound_applies(geom):
    """Whether ``bound="sharp"`` really bounds ``h/h0`` from below.

    The divided deficit is a valid lower bound for every ``|k| <= eps`` and
    ``|t| < a`` exactly when ``|sigma|`` is constant with ``a |sigma| <= 1``;
    where ``sigma`` dips below its sup norm, or ``a |sigma| > 1``, the ratio
    can fall beneath it.  ``bound="uniform"`` has no such restriction.
    """
    # constant theta is the only way to get constant sigma recognised here
    if not (geom.theta.is_constant() and geom.tau.is_constant()):
        return False
    return geom.a * geom.sup_sigma() <= 1.0


def f_gap(geom, env, s, bound="sharp"):
    """``f_plus - f_minus`` without cancellation for tiny envelopes."""
    _, up, down = _ratio_terms(geom, env, s, bound)
    fm, fp = f_bounds(geom, env, s, bound)
    return (up + down) / (fp + fm)


@dataclass
class Check:
    passed: bool
    value: float
    limit: float
    detail: str = ""


@dataclass
class AssumptionReport:
    """Pass/fail per standing assumption, with the sup-norms used."""

    a: float
    sup_k: float
    sup_sigma: float
    checks: dict

    @property
    def ok(self):
        return all(c.passed for c in self.checks.values())

    def failed(self):
        return [name for name, c in self.checks.items() if not c.passed]

    def to_dict(self):
        return {
            "a": self.a,
            "sup_k": self.sup_k,
            "sup_sigma": self.sup_sigma,
            "checks": {
                name: {
                    "passed": bool(c.passed),
                    "value": float(c.value),
                    "limit": float(c.limit),
                    "detail": c.detail,
                }
                for name, c in self.checks.items()
            },
        }


def check_assumptions(geom, env=None, s_sample=None):
    """Evaluate every standing assumption on ``geom`` (and ``env`` if given).

    ``basic``         a sup|k| < 1
    ``twist_bound``   a sup|sigma| < sqrt(2)
    ``twist_nonzero`` sigma is not identically zero
    ``envelope``      eps0 < 1/a
    ``envelope_ratio`` eps0 <= 1/(3a)
    ``envelope_fit``  |k(s)| <= eps(s) on a sample of s
    """
    a = geom.a
    sk, ss = geom.sup_k(), geom.sup_sigma()
    checks = {
        "basic": Check(a * sk < 1.0, a * sk, 1.0, "a*sup|k| < 1"),
        "twist_bound": Check(
            a * ss < math.sqrt(2.0), a * ss, math.sqrt(2.0), "a*sup|sigma| < sqrt(2)"
        ),
        "twist_nonzero": Check(ss > 0.0, ss, 0.0, "sigma not identically zero"),
    }
    if env is not None:
        checks["envelope"] = Check(env.eps0 < 1.0 / a, env.eps0, 1.0 / a, "eps0 < 1/a")
        checks["envelope_ratio"] = Check(
            env.eps0 <= 1.0 / (3.0 * a), env.eps0, 1.0 / (3.0 * a), "eps0 <= 1/(3a)"
        )
        if s_sample is None:
            s_sample = np.concatenate([np.linspace(-50, 50, 20001), [-1e3, 1e3]])
        excess = np.abs(geom.k(s_sample)) - env(s_sample)
        worst = float(np.max(excess))
        checks["envelope_fit"] = Check(
            worst <= 1e-15 * max(env.eps0, 1.0), worst, 0.0, "|k(s)| <= eps(s) on sample"
        )
    return AssumptionReport(a=a, sup_k=sk, sup_sigma=ss, checks=checks)


def geometry_from_dict(d):
    """Parse a geometry config into ``(StripGeometry, CurvatureEnvelope | None)``."""
    if not isinstance(d, dict):
        raise ConfigError("geometry config must be a JSON object")
    if "a" not in d:
        raise ConfigError("geometry config needs 'a'")
    unknown = set(d) - {"a", "kappa", "tau", "theta", "eps0", "schema_version"}
    if unknown:
        raise ConfigError(f"unknown geometry keys: {sorted(unknown)}")
    a = _as_float(d["a"], "a")
    if a <= 0:
        raise ConfigError(f"'a' must be positive, got {a}")
    specs = {
        name: FunctionSpec.from_dict(d[name]) if name in d else FunctionSpec.zero()
        for name in ("kappa", "tau", "theta")
    }
    geom = StripGeometry(a=a, **specs)
    env = None
    if d.get("eps0") is not None:
        eps0 = _as_float(d["eps0"], "eps0")
        if eps0 < 0:
            raise ConfigError("'eps0' must be non-negative")
        env = CurvatureEnvelope(eps0)
    return geom, env


def load_geometry(path):
    """Read a geometry JSON file (see :func:`geometry_from_dict`)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read geometry file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return geometry_from_dict(data)


def geometry_to_dict(geom, env: Optional[CurvatureEnvelope] = None):
    d = geom.to_dict()
    if env is not None:
        d["eps0"] = env.eps0
    return d
