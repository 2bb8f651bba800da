"""Smallest eigenpair of symmetric pencils ``A x = mu B x`` with diagonal ``B > 0``.

Two paths:

* sparse 2D problems go through shift-and-invert Lanczos (ARPACK via
  :func:`scipy.sparse.linalg.eigsh`) on the symmetrically scaled matrix
  ``B^{-1/2} A B^{-1/2}``, followed by inverse-iteration polishing when the
  residual is not yet small enough;
* tridiagonal pencils use Sturm-sequence bisection, either through LAPACK
  (:func:`scipy.linalg.eigh_tridiagonal`) or through :func:`sturm_count`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import PreconditionError, SolverError

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 500
DEFAULT_SEED = 42
_DENSE_LIMIT = 64


@dataclass
class EigResult:
    """Converged smallest eigenpair.

    ``residual`` is ``||A x - mu B x||_{B^-1}`` for the B-normalised ``x``,
    i.e. the Euclidean residual of the scaled problem; it has the units of
    ``mu``.
    """

    value: float
    vector: np.ndarray
    residual: float
    iterations: int
    degenerate: bool = False
    second_value: float = float("nan")


def _mass_diagonal(B, n):
    if sp.issparse(B):
        off = B - sp.diags(B.diagonal())
        if off.count_nonzero():
            raise PreconditionError("mass matrix must be diagonal")
        d = np.asarray(B.diagonal(), dtype=float)
    else:
        B = np.asarray(B, dtype=float)
        d = B.copy() if B.ndim == 1 else np.diag(B).copy()
        if B.ndim == 2 and np.count_nonzero(B - np.diag(d)):
            raise PreconditionError("mass matrix must be diagonal")
    if d.shape != (n,):
        raise PreconditionError(f"mass diagonal has shape {d.shape}, expected ({n},)")
    if np.any(d <= 0) or not np.all(np.isfinite(d)):
        raise PreconditionError("mass matrix must be positive definite")
    return d


def _scaled(A, d):
    r = 1.0 / np.sqrt(d)
    if sp.issparse(A):
        D = sp.diags(r)
        return (D @ A @ D).tocsc()
    A = np.asarray(A, dtype=float)
    return r[:, None] * A * r[None, :]


def rayleigh_quotient(A, B, x):
    x = np.asarray(x, dtype=float)
    Bx = B @ x if sp.issparse(B) or np.ndim(B) == 2 else B * x
    return float(x @ (A @ x) / (x @ Bx))


def smallest_eig(A, B, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, seed=DEFAULT_SEED,
                 shift=None):
    """Smallest eigenpair of the pencil ``(A, B)``.

    Parameters
    ----------
    A : sparse or dense symmetric matrix
    B : diagonal positive definite matrix, or its diagonal as a 1D array
    tol : float
        Residual target, relative to ``max(1, |mu|)``.
    max_iter : int
        Cap on Lanczos restarts and on polishing steps.
    seed : int
        Seed of the start vector; results are deterministic given the seed.
    shift : float, optional
        Spectral shift placed below the target.  Defaults to a small negative
        multiple of the mean diagonal so that positive semidefinite ``A``
        never makes the shifted operator singular.

    Raises
    ------
    SolverError
        If the residual target is not met; carries the best residual.
    """
    n = A.shape[0]
    if A.shape != (n, n):
        raise PreconditionError("A must be square")
    d = _mass_diagonal(B, n)
    C = _scaled(A, d)
    if sp.issparse(C):
        asym = abs(C - C.T).max() if C.nnz else 0.0
    else:
        asym = np.max(np.abs(C - C.T)) if n else 0.0
    if asym > 1e-12 * max(1.0, abs(C).max()):
        raise PreconditionError(f"A is not symmetric (max asymmetry {asym:.3g})")

    if n <= _DENSE_LIMIT:
        dense = C.toarray() if sp.issparse(C) else C
        vals, vecs = np.linalg.eigh(dense)
        y = vecs[:, 0]
        mu = float(y @ dense @ y)
        res = float(np.linalg.norm(dense @ y - mu * y))
        second = float(vals[1]) if n > 1 else float("nan")
        return _finish(mu, y, d, res, 1, second, tol)

    if shift is None:
        shift = -1e-6 * float(np.mean(np.abs(C.diagonal())))
    shifted = (C - shift * sp.identity(n, format="csc")).tocsc()
    lu = spla.splu(shifted)
    calls = [0]

    def solve(v):
        calls[0] += 1
        return lu.solve(np.asarray(v, dtype=float).ravel())

    op = spla.LinearOperator((n, n), matvec=solve, dtype=float)
    v0 = np.random.default_rng(seed).standard_normal(n)
    try:
        vals, vecs = spla.eigsh(
            C, k=2, sigma=shift, which="LM", OPinv=op, v0=v0,
            tol=tol * 1e-3, maxiter=max_iter,
        )
    except spla.ArpackNoConvergence as exc:
        if len(exc.eigenvalues) == 0:
            raise SolverError("Lanczos did not converge", float("inf")) from exc
        vals, vecs = exc.eigenvalues, exc.eigenvectors
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    y = vecs[:, 0] / np.linalg.norm(vecs[:, 0])
    mu = float(y @ (C @ y))
    res = float(np.linalg.norm(C @ y - mu * y))
    target = tol * max(1.0, abs(mu))
    it = 0
    while res > target and it < max_iter:
        it += 1
        y = solve(y)
        y /= np.linalg.norm(y)
        mu = float(y @ (C @ y))
        res = float(np.linalg.norm(C @ y - mu * y))
        log.debug("inverse-iteration polish %d: mu=%.15g residual=%.3g", it, mu, res)
    second = float(vals[1]) if len(vals) > 1 else float("nan")
    log.debug("smallest_eig: n=%d mu=%.15g residual=%.3g solves=%d", n, mu, res, calls[0])
    return _finish(mu, y, d, res, calls[0], second, tol)


def _finish(mu, y, d, res, iterations, second, tol):
    target = tol * max(1.0, abs(mu))
    if not res <= target:
        raise SolverError(
            f"eigensolver residual {res:.3g} above target {target:.3g}", res
        )
    x = y / np.sqrt(d)
    # sign convention: largest-magnitude component positive
    if x[np.argmax(np.abs(x))] < 0:
        x = -x
    degenerate = bool(np.isfinite(second) and abs(second - mu) <= target)
    return EigResult(
        value=mu, vector=x, residual=res, iterations=int(iterations),
        degenerate=degenerate, second_value=second,
    )


# ---------------------------------------------------------------------------
# tridiagonal pencils

def tridiagonal_parts(A, B):
    """Split a tridiagonal pencil into ``(diag, off, mass)`` arrays."""
    A = sp.csr_matrix(A)
    n = A.shape[0]
    coo = A.tocoo()
    if coo.nnz and np.max(np.abs(coo.row - coo.col)) > 1:
        raise PreconditionError("stiffness matrix is not tridiagonal")
    diag = np.asarray(A.diagonal(), dtype=float)
    off = np.asarray(A.diagonal(1), dtype=float)
    if np.max(np.abs(off - A.diagonal(-1)), initial=0.0) > 1e-14 * max(1.0, np.abs(diag).max()):
        raise PreconditionError("stiffness matrix is not symmetric")
    mass = _mass_diagonal(B, n)
    return diag, off, mass


def sturm_count(A, B, threshold):
    """Number of eigenvalues of the tridiagonal pencil ``(A, B)`` below ``threshold``.

    Counts negative pivots of the ``LDL^T`` factorisation of ``A - x B``
    (Sylvester's law of inertia).  ``threshold`` may be an array, in which
    case one count per entry is returned.
    """
    diag, off, mass = tridiagonal_parts(A, B)
    return _sturm(diag, off, mass, threshold)


def _sturm(diag, off, mass, threshold):
    x = np.atleast_1d(np.asarray(threshold, dtype=float))
    scale = max(np.abs(diag).max(), np.abs(off).max(initial=0.0), 1.0)
    pivmin = np.finfo(float).tiny / np.finfo(float).eps * scale
    off2 = off * off
    count = np.zeros(x.shape, dtype=int)
    q = diag[0] - x * mass[0]
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count += q < 0
    for i in range(1, diag.size):
        q = diag[i] - x * mass[i] - off2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return int(count[0]) if np.ndim(threshold) == 0 else count


def bisect_smallest(A, B, rtol=1e-15, max_iter=200):
    """Smallest eigenvalue of a tridiagonal pencil by Sturm bisection."""
    diag, off, mass = tridiagonal_parts(A, B)
    # Gershgorin on the scaled matrix
    r = 1.0 / np.sqrt(mass)
    sd = diag * r * r
    so = np.abs(off) * r[:-1] * r[1:]
    rad = np.zeros_like(sd)
    rad[:-1] += so
    rad[1:] += so
    lo, hi = float(np.min(sd - rad)), float(np.max(sd + rad))
    for _ in range(max_iter):
        if hi - lo <= rtol * max(abs(lo), abs(hi), 1e-300):
            break
        mid = 0.5 * (lo + hi)
        if _sturm(diag, off, mass, mid) >= 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def tridiagonal_smallest(diag, off, mass):
    """Smallest generalised eigenvalue of a tridiagonal pencil (LAPACK bisection)."""
    r = 1.0 / np.sqrt(mass)
    d = diag * r * r
    e = off * r[:-1] * r[1:]
    if d.size == 1:
        return float(d[0])
    w = sla.eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, 0))
    return float(w[0])
