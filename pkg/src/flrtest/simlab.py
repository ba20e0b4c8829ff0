"""Monte Carlo laboratory: synthetic data generators and the size/power driver.

Curves are finite Fourier sums with geometrically structured coefficient
scales; the slope under the alternative is a fixed smooth Fourier sum whose
magnitude is controlled by a single constant B.  Replications draw from
counter-based random streams keyed by (seed, replication index), so runs are
reproducible under any degree of parallelism.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .design import FunctionalSample, build_design, eig_qhat, eig_qraw
from .errors import DegenerateDesignError, InvalidInputError
from .glrt import run_test
from .grid import Grid, GridFunction, fourier_basis, make_grid
from .lambda_select import select_lambda

__all__ = [
    "SimConfig",
    "SizePowerRow",
    "gen_setup1",
    "gen_setup2",
    "run_monte_carlo",
    "power_curve",
    "replication_rng",
]

N_BASIS = 50


@dataclass(frozen=True)
class SimConfig:
    """One Monte Carlo setting."""

    setup: int = 1
    n: int = 100
    nu: float = 2.0
    B: float = 0.0
    reps: int = 1000
    alpha: float = 0.05
    m: int = 2
    grid_points: int = 201
    seed: int = 0
    sided: str = "two"
    lambda_rule: str = "adaptive"  # "adaptive" or "fixed"
    fixed_lambda: float = 0.0
    setup2_bracket: str = "floor"  # "floor" or "literal"
    threads: int = 0  # 0 = auto

    def __post_init__(self):
        if self.setup not in (1, 2):
            raise InvalidInputError("setup must be 1 or 2")
        if self.reps < 1 or self.n < 10 or self.B < 0:
            raise InvalidInputError("need reps >= 1, n >= 10, B >= 0")
        if self.lambda_rule not in ("adaptive", "fixed"):
            raise InvalidInputError("lambda_rule must be 'adaptive' or 'fixed'")
        if self.lambda_rule == "fixed" and self.fixed_lambda <= 0:
            raise InvalidInputError("fixed lambda must be positive")


@dataclass(frozen=True)
class SizePowerRow:
    """Aggregated rejection rate for one configuration."""

    config: SimConfig
    reject_rate: float
    mc_stderr: float
    mean_lambda: float


def replication_rng(seed: int, rep: int) -> np.random.Generator:
    """Independent counter-based stream for one replication."""
    key = np.array([seed, rep], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _basis_matrix(grid: Grid) -> np.ndarray:
    return np.stack([fourier_basis(k, grid).values for k in range(1, N_BASIS + 1)])


def _beta0_values(B: float, basis: np.ndarray) -> np.ndarray:
    k = np.arange(1, N_BASIS + 1)
    coeff = B * (-1.0) ** (k + 1) * k**-2.0
    return coeff @ basis


def _setup1_zeta(nu: float) -> np.ndarray:
    k = np.arange(1, N_BASIS + 1)
    zeta = (-1.0) ** (k + 1) * k ** (-nu / 2.0)
    return zeta / np.linalg.norm(zeta)


def _setup2_zeta(nu: float, bracket: str = "floor") -> np.ndarray:
    k = np.arange(1, N_BASIS + 1, dtype=float)
    sign = (-1.0) ** (k + 1)
    if bracket == "floor":
        base = 5.0 * np.floor(k / 5.0)
    elif bracket == "literal":
        base = k
    else:
        raise InvalidInputError("bracket must be 'floor' or 'literal'")
    with np.errstate(divide="ignore"):
        tail = 0.2 * sign * base ** (-nu / 5.0) - 0.0001 * (k % 5.0)
    zeta = np.where(k == 1, 1.0,
                    np.where(k <= 4, 0.2 * sign * (1.0 - 0.0001 * k), tail))
    return zeta


def _generate(zeta: np.ndarray, n: int, B: float, rng: np.random.Generator,
              grid: Grid):
    basis = _basis_matrix(grid)
    z = rng.uniform(-np.sqrt(3.0), np.sqrt(3.0), size=(n, N_BASIS))
    eps = rng.standard_normal(n)
    x = (z * zeta) @ basis
    beta0 = _beta0_values(B, basis)
    y = (x * grid.weights) @ beta0 + eps
    x = x - x.mean(axis=0)
    y = y - y.mean()
    sample = FunctionalSample(grid=grid, curves=x, responses=y, centered=True)
    return sample, GridFunction(grid, beta0)


def gen_setup1(n: int, nu: float, B: float, rng: np.random.Generator,
               grid: Grid | None = None):
    """Curves with sign-alternating, norm-one coefficient scales k^(-nu/2)."""
    if n < 1 or nu <= 0:
        raise InvalidInputError("need n >= 1 and nu > 0")
    grid = grid or make_grid()
    return _generate(_setup1_zeta(nu), n, B, rng, grid)


def gen_setup2(n: int, nu: float, B: float, rng: np.random.Generator,
               grid: Grid | None = None, bracket: str = "floor"):
    """Curves with the piecewise coefficient scales (no normalization)."""
    if n < 1 or nu <= 0:
        raise InvalidInputError("need n >= 1 and nu > 0")
    grid = grid or make_grid()
    return _generate(_setup2_zeta(nu, bracket), n, B, rng, grid)


def _run_replication(config: SimConfig, rep: int) -> tuple[bool, float]:
    rng = replication_rng(config.seed, rep)
    grid = make_grid(config.grid_points)
    if config.setup == 1:
        sample, _ = gen_setup1(config.n, config.nu, config.B, rng, grid)
    else:
        sample, _ = gen_setup2(config.n, config.nu, config.B, rng, grid,
                               config.setup2_bracket)
    try:
        design = build_design(sample, config.m)
    except DegenerateDesignError as exc:
        raise DegenerateDesignError(f"replication {rep}: {exc}") from exc
    if config.lambda_rule == "adaptive":
        lam = select_lambda(eig_qraw(design), config.n).lambda_tilde
    else:
        lam = config.fixed_lambda
    eigs = eig_qhat(design)
    result = run_test(design, eigs, sample.responses, lam,
                      alpha=config.alpha, sided=config.sided)
    return result.reject, lam


def _worker(args) -> tuple[bool, float]:
    return _run_replication(*args)


def resolve_threads(requested: int = 0) -> int:
    """Thread count: explicit request, else FLRT_THREADS, else CPU count."""
    if requested > 0:
        return requested
    env = os.environ.get("FLRT_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return os.cpu_count() or 1


def run_monte_carlo(config: SimConfig) -> SizePowerRow:
    """Run all replications and aggregate the rejection rate."""
    threads = resolve_threads(config.threads)
    jobs = [(config, rep) for rep in range(config.reps)]
    if threads > 1 and config.reps > 1:
        chunk = max(1, config.reps // (threads * 8))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(_worker, jobs, chunksize=chunk))
    else:
        outcomes = [_worker(job) for job in jobs]
    rejects = np.array([o[0] for o in outcomes], dtype=bool)
    lambdas = np.array([o[1] for o in outcomes])
    rate = float(rejects.sum()) / config.reps
    stderr = float(np.sqrt(rate * (1.0 - rate) / config.reps))
    return SizePowerRow(config=config, reject_rate=rate, mc_stderr=stderr,
                        mean_lambda=float(lambdas.mean()))


def power_curve(config: SimConfig, b_values) -> list[SizePowerRow]:
    """One Monte Carlo row per slope magnitude B."""
    b_values = list(b_values)
    if not b_values:
        raise InvalidInputError("need at least one B value")
    if any(b2 < b1 for b1, b2 in zip(b_values, b_values[1:])):
        raise InvalidInputError("B values must be nondecreasing")
    return [run_monte_carlo(replace(config, B=float(b))) for b in b_values]
