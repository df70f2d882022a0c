"""
Barrier-passing kinetics
========================

Passing probability ``chi``, transmission coefficient ``kappa`` and the
reactive-flux rate ratio ``k(t) / k_TST`` for a Gaussian position density
centred at ``<x(t)>`` with variance ``var(t)``.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, special

from .errors import AccuracyError, ValidationError
from .model import Convention, correlation_form
from .moments import InitialState, mean_position, variance_closed
from .resolvent import decompose, response, response_integral

__all__ = [
    "TstNormalization",
    "KineticsCurves",
    "erfc",
    "passing_probability",
    "transmission",
    "rate_ratio_by_flux",
    "tst_rate",
    "kinetics_curves",
    "late_window_mean",
    "sign_changes",
    "sign_change_rate",
]

ERFC_SATURATION = 8.0


def erfc(z):
    """Complementary error function, saturated to exactly 2 / 0 beyond +-8."""
    z = np.asarray(z, dtype=float)
    out = np.where(z > ERFC_SATURATION, 0.0, np.where(z < -ERFC_SATURATION, 2.0, special.erfc(z)))
    return float(out) if out.ndim == 0 else out


def passing_probability(mean, sigma):
    """``chi = erfc(-mean / (sqrt(2) sigma)) / 2``.

    For ``sigma == 0`` the density is a point mass: 1 beyond the saddle,
    0 before it, 1/2 exactly on it.
    """
    mean = np.asarray(mean, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma < 0):
        raise ValueError("sigma must be non-negative")
    degenerate = sigma == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        z = -mean / (np.sqrt(2.0) * np.where(degenerate, 1.0, sigma))
    chi = 0.5 * erfc(z)
    chi = np.where(degenerate, 0.5 * (1.0 + np.sign(mean)), chi)
    return float(chi) if chi.ndim == 0 else chi


def _kappa(H, var, model):
    """Transmission coefficient and a flag marking samples where ``H == 0``."""
    H = np.asarray(H, dtype=float)
    var = np.asarray(var, dtype=float)
    zero = H == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = model.mass * var / (model.kT * np.where(zero, 1.0, H) ** 2)
    kappa = np.where(zero, 0.0, 1.0 / np.sqrt(1.0 + ratio))
    return kappa, zero


def transmission(decomp, corr, model=None, t=1.0, region="symmetric"):
    """``kappa(t) = [1 + m var(t) / (kT H(t)**2)]**(-1/2)``.

    Where ``H(t) == 0`` the limiting value 0 is returned; use
    :func:`kinetics_curves` to get the flags for such samples.
    """
    model = model or decomp.model
    t = np.asarray(t, dtype=float)
    kappa, _ = _kappa(response(decomp, t), variance_closed(decomp, corr, t, region), model)
    return float(kappa) if kappa.ndim == 0 else kappa


def rate_ratio_by_flux(decomp, corr, model=None, barrier=None, t=1.0, region="symmetric",
                       epsabs=1e-10, epsrel=1e-10):
    """``k(t) / k_TST`` by direct quadrature over the initial velocity.

    Integrates ``(m/kT) v0 exp(-m v0**2 / 2kT) chi(0, v0; t)`` over the real
    line. The result carries the sign of ``H(t)``; for ``H(t) > 0`` it equals
    :func:`transmission`.
    """
    model = model or decomp.model
    t = float(t)
    H = response(decomp, t)
    sigma = np.sqrt(variance_closed(decomp, corr, t, region))
    a = model.mass / model.kT
    v_th = 1.0 / np.sqrt(a)

    def integrand(v0):
        return a * v0 * np.exp(-0.5 * a * v0 * v0) * passing_probability(H * v0, sigma)

    # the integrand is concentrated within a few thermal velocities
    lim = 40.0 * v_th
    val, err = integrate.quad(integrand, -lim, lim, epsabs=epsabs, epsrel=epsrel, limit=400,
                              points=[0.0])
    if not np.isfinite(val) or err > 1e-6:
        raise AccuracyError("flux quadrature did not converge", estimate=val, error=err)
    return val


def _flux_curve(H, var, model, epsabs=1e-10):
    """Vectorised flux quadrature over a whole curve (one adaptive call)."""
    a = model.mass / model.kT
    sigma = np.sqrt(var)
    lim = 40.0 / np.sqrt(a)

    def integrand(v0):
        return a * v0 * np.exp(-0.5 * a * v0 * v0) * passing_probability(H * v0, sigma)

    val, err = integrate.quad_vec(integrand, -lim, lim, epsabs=epsabs, epsrel=0.0,
                                  points=[0.0], limit=2000)
    if not np.all(np.isfinite(val)) or err > 1e-6:
        raise AccuracyError("flux quadrature did not converge", estimate=val, error=err)
    return val


@dataclass(frozen=True)
class TstNormalization:
    partition_Q: float = 1.0
    planck_h: float = 1.0
    barrier_height_VB: float = 0.0
    kT: float = 1.0

    def __post_init__(self):
        for name in ("partition_Q", "planck_h", "kT"):
            if getattr(self, name) <= 0:
                raise ValidationError(name, "must be positive")
        if self.barrier_height_VB < 0:
            raise ValidationError("barrier_height_VB", "must be non-negative")


def tst_rate(norm):
    """``kT / (Q h) * exp(-V_B / kT)``."""
    return norm.kT / (norm.partition_Q * norm.planck_h) * np.exp(-norm.barrier_height_VB / norm.kT)


@dataclass(frozen=True)
class KineticsCurves:
    grid: np.ndarray
    H: np.ndarray
    H_integral: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    chi: np.ndarray
    kappa: np.ndarray
    rate_ratio: Optional[np.ndarray] = None
    absolute_rate: Optional[np.ndarray] = None
    h_zero: Optional[np.ndarray] = None


def kinetics_curves(model, barrier, state=None, grid=None, convention=None, with_flux=False,
                    tst=None):
    """Evaluate every analytic curve on a time grid.

    ``kappa(0)`` is set to its limit 1 (the variance vanishes faster than
    ``H**2``). ``rate_ratio`` is filled by flux quadrature when ``with_flux``
    is set, otherwise it is the closed form ``kappa``.
    """
    convention = convention or Convention()
    state = state or InitialState()
    grid = np.asarray(grid if grid is not None else np.linspace(0.0, 30.0, 3001), dtype=float)
    decomp = decompose(model, barrier)
    corr = correlation_form(model, convention)
    H = response(decomp, grid)
    H_int = response_integral(decomp, grid)
    mean = mean_position(decomp, state, barrier, grid)
    var = variance_closed(decomp, corr, grid, convention.region)
    chi = passing_probability(mean, np.sqrt(var))
    kappa, zero = _kappa(H, var, model)
    at_origin = grid == 0
    kappa = np.where(at_origin, 1.0, kappa)
    zero = zero & ~at_origin
    if with_flux:
        rate = np.where(at_origin, 1.0, _flux_curve(H, var, model))
    else:
        rate = kappa.copy()
    absolute = None if tst is None else rate * tst_rate(tst)
    return KineticsCurves(grid, H, H_int, mean, var, chi, kappa, rate, absolute, zero)


def late_window_mean(grid, values, fraction=0.5):
    """Mean of ``values`` over the last ``fraction`` of the time horizon."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    start = grid[-1] - fraction * (grid[-1] - grid[0])
    return float(np.mean(values[grid >= start]))


def sign_changes(values, level=0.0):
    d = np.sign(np.asarray(values, dtype=float) - level)
    d = d[d != 0]
    return int(np.count_nonzero(d[1:] != d[:-1]))


def sign_change_rate(grid, values, level=0.5, t_start=None, t_end=None):
    """Sign changes of ``values - level`` per unit time within ``[t_start, t_end]``.

    Twice the dominant oscillation frequency for a near-periodic curve.
    """
    grid = np.asarray(grid, dtype=float)
    t_start = grid[0] if t_start is None else t_start
    t_end = grid[-1] if t_end is None else t_end
    mask = (grid >= t_start) & (grid <= t_end)
    return sign_changes(np.asarray(values)[mask], level) / (t_end - t_start)
