"""
Stochastic trajectory oracle
============================

Direct simulation of the generalized Langevin equation on the inverted
barrier::

    dx/dt = v
    m dv/dt = -m int_0^t beta(t - t') v(t') dt' + m omega_b**2 x + xi(t)

with ``beta = C / (m kT)``. Gaussian noise paths are drawn from the exact
covariance of the step-averaged noise ``(1/dt) int_{t_j}^{t_j+dt} xi``, which
is a symmetric Toeplitz matrix factorised once per grid. The memory integral
is a trapezoid sum over the stored velocity history, and the end-point term
(including the delta part of the kernel) is treated implicitly.

Trajectories are processed in fixed-size chunks; trajectory ``i`` draws from
``SeedSequence(seed, spawn_key=(i,))``, so results do not depend on the number
of worker threads.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import CovarianceError, ValidationError
from .model import Convention, correlation_form
from .resolvent import _expm1c

__all__ = [
    "TimeGrid",
    "EnsembleResult",
    "KappaEstimate",
    "noise_covariance",
    "noise_factor",
    "sample_noise_paths",
    "integrate_gle",
    "ensemble_stats",
    "simulate_ensemble",
    "empirical_kappa",
]

CHUNK = 256
JITTER = 1e-10


@dataclass(frozen=True)
class TimeGrid:
    t_max: float = 30.0
    dt: float = 0.01

    def __post_init__(self):
        if not self.t_max > 0:
            raise ValidationError("t_max", "must be positive")
        if not self.dt > 0:
            raise ValidationError("dt", "must be positive")
        if self.dt > self.t_max:
            raise ValidationError("dt", "must not exceed t_max")

    @property
    def n(self):
        return int(np.floor(self.t_max / self.dt + 1e-9)) + 1

    @property
    def times(self):
        return np.arange(self.n) * self.dt

    def index(self, t):
        return int(round(t / self.dt))


@dataclass(frozen=True)
class EnsembleResult:
    grid: np.ndarray
    mean_hat: np.ndarray
    var_hat: np.ndarray
    chi_hat: np.ndarray
    kappa_hat: np.ndarray
    se_mean: np.ndarray
    se_var: np.ndarray
    se_chi: np.ndarray
    se_kappa: np.ndarray
    n_traj: int
    seed: int


@dataclass(frozen=True)
class KappaEstimate:
    grid: np.ndarray
    kappa: np.ndarray
    se: np.ndarray
    n_traj: int
    seed: int


def noise_covariance(corr, grid):
    """Covariance of the step-averaged noise, shape ``(n-1, n-1)``."""
    m = grid.n - 1
    dt = grid.dt
    lags = np.arange(m)
    col = np.zeros(m)
    for c, mu in zip(corr.coeffs, corr.exponents):
        z = mu * dt
        em1 = _expm1c(z)
        cross = (em1 * _expm1c(-z) * -1.0) / z**2  # (e^z - 1)(1 - e^-z) / z^2
        diag = 2.0 * (em1 - z) / z**2
        term = c * np.exp(z * lags) * cross
        term[0] = c * diag
        col += term.real
    col[0] += corr.delta_weight / dt
    return linalg.toeplitz(col)


def noise_factor(corr, grid):
    """Lower Cholesky factor of :func:`noise_covariance`.

    A diagonal jitter of at most ``1e-10`` times the largest variance is
    tried when the plain factorisation fails.

    Raises
    ------
    CovarianceError
        The matrix is not positive semidefinite within the jitter budget.
    """
    cov = noise_covariance(corr, grid)
    if not np.any(cov):
        return np.zeros_like(cov)
    try:
        return linalg.cholesky(cov, lower=True)
    except linalg.LinAlgError:
        pass
    jitter = JITTER * np.max(np.diag(cov))
    try:
        return linalg.cholesky(cov + jitter * np.eye(len(cov)), lower=True)
    except linalg.LinAlgError:
        lam = float(np.min(linalg.eigvalsh(cov)))
        raise CovarianceError(
            f"noise covariance is not positive semidefinite (most negative eigenvalue {lam:.3e})",
            lam,
        ) from None


def _rng(seed, index):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def sample_noise_paths(corr, grid, n_traj, seed, factor=None, start=0):
    """Draw ``n_traj`` noise paths, one value per time step (shape ``(n_traj, n-1)``)."""
    if n_traj < 1:
        raise ValidationError("n_traj", "must be at least 1")
    L = noise_factor(corr, grid) if factor is None else factor
    Z = np.stack([_rng(seed, start + i).standard_normal(grid.n - 1) for i in range(n_traj)])
    return Z @ L.T


def integrate_gle(model, barrier, noise, state, grid, well=False):
    """Integrate one or many trajectories driven by given noise paths.

    Parameters
    ----------
    noise : ndarray, shape (n-1,) or (n_traj, n-1)
        Step-averaged noise force.
    state : InitialState or tuple of arrays
        Initial position and velocity; arrays of length ``n_traj`` allowed.
    well : bool
        Flip the curvature to a stable well ``+m omega_b**2 x**2 / 2`` (used
        for calibration only).

    Returns
    -------
    x, v : ndarray, shape matching ``noise`` with ``n`` time samples

    Notes
    -----
    The friction kernel always comes from the rational kernel of ``model``;
    the covariance convention only affects how ``noise`` was sampled.
    """
    corr = correlation_form(model)
    noise = np.asarray(noise, dtype=float)
    single = noise.ndim == 1
    noise = np.atleast_2d(noise)
    n, dt = grid.n, grid.dt
    if noise.shape[1] != n - 1:
        raise ValueError(f"noise path has {noise.shape[1]} steps, grid needs {n - 1}")
    B = noise.shape[0]
    m, kT = model.mass, model.kT
    w = -barrier.omega_b**2 if well else barrier.omega_b**2
    beta = corr.smooth(grid.times) / (m * kT)
    b_inf = corr.delta_weight / (2.0 * m * kT)
    has_memory = bool(np.any(beta))

    x0, v0 = (state.x0, state.v0) if hasattr(state, "x0") else state
    X = np.empty((B, n))
    V = np.empty((B, n))
    X[:, 0] = x0
    V[:, 0] = v0
    M = np.zeros(B)
    denom = 1.0 + 0.5 * dt * (b_inf + 0.5 * dt * beta[0])
    force = noise / m
    for k in range(n - 1):
        a = w * X[:, k] - M - b_inf * V[:, k]
        f = force[:, k]
        X[:, k + 1] = X[:, k] + dt * V[:, k] + 0.5 * dt * dt * (a + f)
        if has_memory:
            P = dt * (0.5 * beta[k + 1] * V[:, 0] + V[:, 1:k + 1] @ beta[k:0:-1])
        else:
            P = 0.0
        V[:, k + 1] = (V[:, k] + 0.5 * dt * (a + w * X[:, k + 1] - P) + dt * f) / denom
        M = P + 0.5 * dt * beta[0] * V[:, k + 1]
    if single:
        return X[0], V[0]
    return X, V


def _se_var(x, var):
    n = x.shape[0]
    dev = x - x.mean(axis=0)
    m4 = np.mean(dev**4, axis=0)
    return np.sqrt(np.maximum(m4 - var**2 * (n - 3) / (n - 1), 0.0) / n)


def ensemble_stats(trajectories, grid, state=None, model=None, seed=None):
    """Per-time mean, variance, passing fraction and standard errors.

    ``kappa_hat`` is the plug-in transmission coefficient built from the
    empirical mean and variance; it is only defined for ``x0 == 0`` and
    ``v0 != 0`` (``NaN`` otherwise).
    """
    x = np.asarray(trajectories, dtype=float)
    n_traj = x.shape[0]
    if n_traj < 2:
        raise ValidationError("n_traj", "must be at least 2")
    # shifting by one trajectory limits cancellation in the variance
    dx = x - x[0]
    mean = x[0] + dx.mean(axis=0)
    var = dx.var(axis=0, ddof=1)
    chi = np.mean(x > 0, axis=0)
    se_mean = np.sqrt(var / n_traj)
    se_var = _se_var(x, var)
    se_chi = np.sqrt(chi * (1.0 - chi) / n_traj)
    kappa = np.full_like(mean, np.nan)
    se_kappa = np.full_like(mean, np.nan)
    if state is not None and model is not None and state.x0 == 0 and state.v0 != 0:
        H = mean / state.v0
        with np.errstate(divide="ignore", invalid="ignore"):
            q = model.mass * var / (model.kT * H**2)
            kappa = 1.0 / np.sqrt(1.0 + q)
            se_q = q * np.sqrt((se_var / var) ** 2 + 4.0 * (se_mean / mean) ** 2)
            se_kappa = 0.5 * (1.0 + q) ** -1.5 * se_q
    grid_t = grid.times if isinstance(grid, TimeGrid) else np.asarray(grid)
    return EnsembleResult(grid_t, mean, var, chi, kappa, se_mean, se_var, se_chi, se_kappa,
                          n_traj, seed)


def _chunks(n_traj):
    return [(s, min(s + CHUNK, n_traj)) for s in range(0, n_traj, CHUNK)]


def _map_chunks(fn, n_items, workers):
    chunks = _chunks(n_items)
    if workers <= 1 or len(chunks) == 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))


def simulate_trajectories(model, barrier, state, grid, n_traj, seed, convention=None, workers=1):
    """Positions of ``n_traj`` trajectories, shape ``(n_traj, n)``."""
    corr = correlation_form(model, convention or Convention())
    L = noise_factor(corr, grid)

    def run(chunk):
        lo, hi = chunk
        noise = sample_noise_paths(corr, grid, hi - lo, seed, factor=L, start=lo)
        return integrate_gle(model, barrier, noise, state, grid)[0]

    return np.concatenate(_map_chunks(run, n_traj, workers), axis=0)


def simulate_ensemble(model, barrier, state, grid, n_traj, seed, convention=None, workers=1):
    """Simulate ``n_traj`` trajectories from ``state`` and summarise them."""
    x = simulate_trajectories(model, barrier, state, grid, n_traj, seed, convention, workers)
    return ensemble_stats(x, grid, state, model, seed)


def empirical_kappa(model, barrier, grid, n_traj, seed, convention=None, workers=1):
    """Reactive-flux estimate of ``kappa(t)`` from trajectories started on the barrier top.

    Speeds ``|v0|`` follow the flux-weighted Maxwell density
    ``|v0| exp(-m v0**2 / 2kT)`` (a Rayleigh law). Each speed is run twice
    with ``+|v0|`` and ``-|v0|`` on the same noise path; the pair contributes
    ``1[x+ > 0] - 1[x- > 0]``, whose mean is ``kappa``. In the noise-free
    limit every pair contributes exactly 1.
    """
    if n_traj < 100:
        raise ValidationError("n_traj", "must be at least 100")
    corr = correlation_form(model, convention or Convention())
    L = noise_factor(corr, grid)
    n_pairs = (n_traj + 1) // 2
    v_th = np.sqrt(model.kT / model.mass)

    def run(chunk):
        lo, hi = chunk
        speeds = np.empty(hi - lo)
        Z = np.empty((hi - lo, grid.n - 1))
        for i in range(lo, hi):
            rng = _rng(seed, i)
            speeds[i - lo] = rng.rayleigh(v_th)
            Z[i - lo] = rng.standard_normal(grid.n - 1)
        noise = Z @ L.T
        noise = np.concatenate([noise, noise])
        v0 = np.concatenate([speeds, -speeds])
        x, _ = integrate_gle(model, barrier, noise, (np.zeros_like(v0), v0), grid)
        k = hi - lo
        return (x[:k] > 0).astype(float) - (x[k:] > 0).astype(float)

    p = np.concatenate(_map_chunks(run, n_pairs, workers), axis=0)
    kappa = p.mean(axis=0)
    se = p.std(axis=0, ddof=1) / np.sqrt(n_pairs)
    return KappaEstimate(grid.times, kappa, se, 2 * n_pairs, seed)
