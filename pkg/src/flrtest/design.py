"""Sample-level operator objects for the functional regression test.

Everything downstream (estimate, test statistic, calibration moments) is a
function of a handful of arrays built once per sample: boundary values of the
iterated integrals of the predictor curves, the projection that removes the
polynomial boundary directions, the projected curves, and the eigensystem of
their Gram matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .errors import DegenerateDesignError, InvalidInputError, NumericError
from .grid import Grid, GridFunction, t0_pow_values, t1_pow_values

__all__ = [
    "FunctionalSample",
    "DesignOperators",
    "EigenSystem",
    "build_design",
    "eig_qhat",
    "eig_qraw",
    "qplus_apply",
    "qplus_apply_rows",
]

#: eigenvalues below this fraction of the largest one are treated as zero
RANK_CUTOFF = 1e-12

#: condition-number threshold beyond which the boundary matrix gets a ridge
COND_LIMIT = 1e12


@dataclass(frozen=True)
class FunctionalSample:
    """n predictor curves on a shared grid plus n scalar responses."""

    grid: Grid
    curves: np.ndarray  # (n, p) row i = X_i sampled on the grid
    responses: np.ndarray  # (n,)
    centered: bool = False

    def __post_init__(self):
        x = np.asarray(self.curves, dtype=float)
        y = np.asarray(self.responses, dtype=float)
        if x.ndim != 2 or x.shape[1] != self.grid.n_points:
            raise InvalidInputError("curves must be (n, p) on the sample grid")
        if y.shape != (x.shape[0],):
            raise InvalidInputError("responses must be length n")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InvalidInputError("sample contains non-finite values")
        if self.centered:
            scale = max(1.0, float(np.max(np.abs(x))), float(np.max(np.abs(y))))
            if abs(y.mean()) > 1e-10 * scale:
                raise InvalidInputError("responses are not centered")
            if np.max(np.abs(x.mean(axis=0))) > 1e-10 * scale:
                raise InvalidInputError("curves are not centered pointwise")
        object.__setattr__(self, "curves", x)
        object.__setattr__(self, "responses", y)

    @property
    def n(self) -> int:
        return self.curves.shape[0]

    def curve(self, i: int) -> GridFunction:
        return GridFunction(self.grid, self.curves[i])


@dataclass(frozen=True)
class DesignOperators:
    """Precomputed operator objects for one sample and penalty order m."""

    grid: Grid
    m: int
    curves: np.ndarray  # (n, p): the centered predictor curves
    xtilde1: np.ndarray  # (m, n): row i holds the i-fold integral of X_j at t=1
    hhat: np.ndarray  # (m, m)
    hhat_inv: np.ndarray  # (m, m)
    bhat: np.ndarray  # (n, n) idempotent projection onto boundary directions
    t0m_x: np.ndarray  # (n, p): m-fold integrals of the curves
    u: np.ndarray  # (n, p): projected curves, rows of U(t)
    gram: np.ndarray  # (n, n): quadrature Gram of the U rows
    gram_raw: np.ndarray  # (n, n): quadrature Gram of the unprojected integrals
    ridge_used: float = 0.0

    @property
    def n(self) -> int:
        return self.u.shape[0]

    def u_row(self, i: int) -> GridFunction:
        return GridFunction(self.grid, self.u[i])

    @property
    def u_rows(self):
        return [self.u_row(i) for i in range(self.n)]


@dataclass(frozen=True)
class EigenSystem:
    """Retained spectrum of an n x n Gram-scaled operator.

    kappa holds the nonincreasing eigenvalues; xi the (n, r) score matrix so
    that row i of the underlying function family is sum_k xi[i, k] * phi_k.
    """

    kappa: np.ndarray  # (r,)
    xi: np.ndarray  # (n, r)
    phi: np.ndarray = field(default=None)  # type: ignore[assignment]  # (r, p)
    grid: Grid = None  # type: ignore[assignment]

    @property
    def r(self) -> int:
        return self.kappa.size

    def phi_function(self, k: int) -> GridFunction:
        if self.phi is None:
            raise InvalidInputError("eigenfunctions were not materialized")
        return GridFunction(self.grid, self.phi[k])


def build_design(sample: FunctionalSample, m: int) -> DesignOperators:
    """Assemble the boundary matrices, projected curves, and Gram matrices."""
    if m < 1:
        raise InvalidInputError("penalty order m must be >= 1")
    n = sample.n
    if n < m:
        raise InvalidInputError(f"need at least m = {m} curves, got {n}")
    grid = sample.grid
    h = grid.spacing
    w = grid.weights

    # one pass per power: after k passes the trailing value is T0^k X_j(1)
    running = sample.curves
    xtilde1 = np.empty((m, n))
    for k in range(m):
        running = t0_pow_values(running, 1, h)
        xtilde1[k] = running[:, -1]
    t0m_x = running

    hhat = (xtilde1 @ xtilde1.T) / n
    ridge_used = 0.0
    cond = np.linalg.cond(hhat)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        ridge_used = 1e-10 * np.trace(hhat) / m
        if ridge_used <= 0 or np.linalg.cond(hhat + ridge_used * np.eye(m)) > COND_LIMIT:
            raise DegenerateDesignError(
                f"boundary matrix is numerically singular (condition number {cond:.3e})"
            )
        hhat = hhat + ridge_used * np.eye(m)
    hhat_inv = np.linalg.inv(hhat)
    hhat_inv = 0.5 * (hhat_inv + hhat_inv.T)

    bhat = (xtilde1.T @ hhat_inv @ xtilde1) / n
    bhat = 0.5 * (bhat + bhat.T)
    u = t0m_x - bhat @ t0m_x

    gram = (u * w) @ u.T
    gram = 0.5 * (gram + gram.T)
    gram_raw = (t0m_x * w) @ t0m_x.T
    gram_raw = 0.5 * (gram_raw + gram_raw.T)

    return DesignOperators(
        grid=grid,
        m=m,
        curves=sample.curves,
        xtilde1=xtilde1,
        hhat=hhat,
        hhat_inv=hhat_inv,
        bhat=bhat,
        t0m_x=t0m_x,
        u=u,
        gram=gram,
        gram_raw=gram_raw,
        ridge_used=ridge_used,
    )


def _eig_of_gram(gram: np.ndarray, rows: np.ndarray, grid: Grid,
                 materialize_phi: bool, scale: float = 0.0) -> EigenSystem:
    n = gram.shape[0]
    try:
        vals, vecs = eigh(gram / n)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericError("eigendecomposition failed") from exc
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    floor = RANK_CUTOFF * max(vals[0] if vals.size else 0.0, scale)
    if vals.size == 0 or vals[0] <= floor:
        empty = np.empty((0,))
        return EigenSystem(kappa=empty, xi=np.empty((n, 0)),
                           phi=np.empty((0, grid.n_points)), grid=grid)
    keep = vals > floor
    kappa = vals[keep]
    vecs = vecs[:, keep]
    xi = vecs * np.sqrt(n * kappa)
    phi = None
    if materialize_phi:
        # rows = xi @ phi  =>  phi_k = rows^T xi_k / (n kappa_k)
        phi = (xi.T @ rows) / (n * kappa)[:, None]
    return EigenSystem(kappa=kappa, xi=xi, phi=phi, grid=grid)


def eig_qhat(design: DesignOperators) -> EigenSystem:
    """Spectrum of the deflated empirical operator via its n x n Gram matrix.

    Eigenvalues are measured against the undeflated energy as well, so a
    projection that annihilates the curves exactly yields an empty spectrum
    instead of a spurious round-off eigenvalue.
    """
    scale = float(np.trace(design.gram_raw)) / design.n
    return _eig_of_gram(design.gram, design.u, design.grid,
                        materialize_phi=True, scale=scale)


def eig_qraw(design: DesignOperators) -> EigenSystem:
    """Spectrum of the un-deflated operator (used by the smoothing selector)."""
    return _eig_of_gram(design.gram_raw, design.t0m_x, design.grid,
                        materialize_phi=True)


def _qplus_values(eigs: EigenSystem, lam: float, values: np.ndarray) -> np.ndarray:
    """Low-rank resolvent: (lam I + Q)^(-1) applied along the trailing axis."""
    if lam <= 0:
        raise InvalidInputError("lambda must be positive")
    if eigs.r == 0:
        return values / lam
    w = eigs.grid.weights
    coeffs = (values * w) @ eigs.phi.T  # projections onto eigenfunctions
    shrink = eigs.kappa / (lam + eigs.kappa)
    return (values - (coeffs * shrink) @ eigs.phi) / lam


def qplus_apply(design: DesignOperators, eigs: EigenSystem, lam: float,
                f: GridFunction) -> GridFunction:
    """Apply the resolvent (lam I + Q)^(-1) to a single function."""
    if f.grid != design.grid:
        raise InvalidInputError("function lives on a different grid")
    return GridFunction(design.grid, _qplus_values(eigs, lam, f.values))


def qplus_apply_rows(eigs: EigenSystem, lam: float, rows: np.ndarray) -> np.ndarray:
    """Apply the resolvent to each row of an (k, p) array."""
    return _qplus_values(eigs, lam, rows)
