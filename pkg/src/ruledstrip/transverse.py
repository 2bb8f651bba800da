"""The Hardy weight ``lambda(s)``: transverse ground energy above ``E1``.

For fixed ``s`` the weight is the bottom of ``-(h0 phi')' = mu h0 phi`` on
``(-a, a)`` (Dirichlet) minus ``E1``.  The substitution ``phi -> sqrt(h0) phi``
turns it into the Schrodinger problem ``-phi'' + V phi = mu phi``, which is
computed independently as a cross-check.

Both discretisations subtract the discrete Dirichlet ground energy of the
same grid instead of the exact ``E1``; the leading discretisation error then
cancels and ``lambda`` vanishes identically where ``sigma(s) = 0``.

``lambda`` depends on ``s`` only through ``sigma(s)**2``, which is used for
caching and for :class:`LambdaTable`.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as C

from .discretization import discrete_first_mode_energy, transverse_pair
from .eigen import tridiagonal_smallest
from .errors import HypothesisError, PreconditionError, SolverError
from .geometry import FunctionSpec, StripGeometry

DEFAULT_N = 2048
AGREEMENT_TOL = 1e-6
CLAMP = 1e-10


@dataclass(frozen=True)
class TransverseResult:
    s: float
    lambda_sl: float
    lambda_schrodinger: float
    n_points: int

    @property
    def discrepancy(self):
        return abs(self.lambda_sl - self.lambda_schrodinger)


def _check(geom, n):
    if n < 16:
        raise PreconditionError(f"transverse grid needs n >= 16, got {n}")
    if not geom.a * geom.sup_sigma() < math.sqrt(2.0):
        raise HypothesisError(
            f"a*sup|sigma| = {geom.a * geom.sup_sigma():.6g} must be below sqrt(2)"
        )


@lru_cache(maxsize=65536)
def _lambda_q(a, q, n, form):
    if q == 0.0:
        return 0.0
    geom = StripGeometry.from_k_sigma(a, sigma=FunctionSpec.constant(math.sqrt(q)))
    diag, off, mass = transverse_pair(geom, 0.0, n, form)
    try:
        mu = tridiagonal_smallest(diag, off, mass)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise SolverError(f"tridiagonal eigensolver failed: {exc}") from exc
    lam = mu - discrete_first_mode_energy(a, n)
    if -CLAMP < lam < 0.0:
        lam = 0.0
    return lam


def _sigma_sq(geom, s):
    return float(geom.sigma(float(s))) ** 2


def lambda_sl(geom, s, n=DEFAULT_N):
    """``lambda(s)`` from the weighted Sturm-Liouville form."""
    _check(geom, n)
    return _lambda_q(geom.a, _sigma_sq(geom, s), int(n), "sl")


def lambda_schrodinger(geom, s, n=DEFAULT_N):
    """``lambda(s)`` from the potential form ``-d^2/dt^2 + V(s, .)``."""
    _check(geom, n)
    return _lambda_q(geom.a, _sigma_sq(geom, s), int(n), "schrodinger")


def transverse_result(geom, s, n=DEFAULT_N):
    return TransverseResult(
        s=float(s),
        lambda_sl=lambda_sl(geom, s, n),
        lambda_schrodinger=lambda_schrodinger(geom, s, n),
        n_points=int(n),
    )


def lambda_profile(geom, s_min, s_max, n_s, n_t=DEFAULT_N):
    """Both formulations of ``lambda`` on ``n_s`` equispaced points of ``[s_min, s_max]``."""
    if not s_min < s_max:
        raise PreconditionError("need s_min < s_max")
    if n_s < 2:
        raise PreconditionError("need n_s >= 2")
    _check(geom, n_t)
    out = []
    for s in np.linspace(s_min, s_max, n_s):
        try:
            out.append(transverse_result(geom, s, n_t))
        except SolverError as exc:
            raise SolverError(f"at s={s:.6g}: {exc}", exc.residual) from exc
    return out


def profile_to_csv(results, fh=None):
    """Write ``s, lambda, lambda_alt, discrepancy`` rows; returns the text if ``fh`` is None."""
    buf = io.StringIO() if fh is None else fh
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "lambda", "lambda_alt", "discrepancy"])
    for r in results:
        w.writerow([repr(r.s), repr(r.lambda_sl), repr(r.lambda_schrodinger),
                    repr(r.discrepancy)])
    if fh is None:
        return buf.getvalue()
    return None


class LambdaTable:
    """Fast evaluation of ``lambda(s) = Lam(sigma(s)**2)`` at many points.

    ``Lam(q)`` is analytic in ``q``, so a Chebyshev interpolant on
    ``[0, sup|sigma|**2]`` needs only a few dozen nodes.  Node values are
    Richardson extrapolations of potential-form solves at ``n`` and ``2n``.
    Round-off in those solves grows like ``eps * n**2`` while the
    extrapolated discretisation error falls like ``n**-4``; ``n = 512``
    balances the two at about ``1e-9``.
    """

    def __init__(self, geom, n=512, degree=32, tol=5e-9):
        _check(geom, n)
        self.geom = geom
        self.q_max = geom.sup_sigma() ** 2
        self.n = n
        if self.q_max == 0.0:
            self._coef = np.zeros(1)
            self.error = 0.0
            return
        while True:
            nodes = self._nodes(degree)
            vals = np.array([self.exact(q) for q in nodes])
            self._coef = C.chebfit(self._to_unit(nodes), vals, degree)
            # check half-way between Chebyshev nodes
            mids = self._nodes(degree + 1)
            err = np.max(np.abs(self._eval_q(mids) - [self.exact(q) for q in mids]))
            self.error = float(err)
            if err <= tol * max(1.0, np.max(np.abs(vals))) or degree >= 128:
                break
            degree *= 2

    def _nodes(self, degree):
        x = np.cos(np.pi * (np.arange(degree + 1) + 0.5) / (degree + 1))
        return 0.5 * self.q_max * (x + 1.0)

    def _to_unit(self, q):
        return 2.0 * np.asarray(q) / self.q_max - 1.0

    def exact(self, q):
        a, n = self.geom.a, self.n
        lo = _lambda_q(a, float(q), n, "schrodinger")
        hi = _lambda_q(a, float(q), 2 * n, "schrodinger")
        return hi + (hi - lo) / 3.0

    def _eval_q(self, q):
        if self.q_max == 0.0:
            return np.zeros_like(np.asarray(q, dtype=float))
        return C.chebval(self._to_unit(np.clip(q, 0.0, self.q_max)), self._coef)

    def __call__(self, s):
        q = self.geom.sigma(np.asarray(s, dtype=float)) ** 2
        return np.maximum(self._eval_q(q), 0.0)
