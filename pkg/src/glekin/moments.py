"""
Position moments
================

Mean position and position variance of a particle started at ``(x0, v0)`` on
the barrier top. The variance is a double integral of the noise autocovariance
weighted by the response function::

    var(t) = 1/m**2 int_0^t int_0^t H(u) H(w) C(u - w) du dw

With ``H`` a pole sum and ``C`` an exponential sum, the integral is a finite
sum over (pole, pole, noise exponent) triples.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import AccuracyError, NumericalError, ResonanceError
from .resolvent import _as_times, _expm1c, response, response_integral

__all__ = [
    "InitialState",
    "MomentCurves",
    "mean_position",
    "variance_closed",
    "variance_quadrature",
    "moment_curves",
    "is_nondecreasing",
]

RESONANCE_TOL = 1e-8


@dataclass(frozen=True)
class InitialState:
    x0: float = 0.0
    v0: float = 2.0

    def __post_init__(self):
        if not (np.isfinite(self.x0) and np.isfinite(self.v0)):
            raise ValueError("initial state must be finite")


@dataclass(frozen=True)
class MomentCurves:
    grid: np.ndarray
    mean: np.ndarray
    var: np.ndarray


def mean_position(decomp, state, barrier=None, t=0.0):
    """``<x(t)> = (1 + omega_b**2 int_0^t H) x0 + H(t) v0``."""
    barrier = barrier or decomp.barrier
    return (1.0 + barrier.omega_b**2 * response_integral(decomp, t)) * state.x0 + response(
        decomp, t
    ) * state.v0


def _E(z, t):
    """``(exp(z t) - 1) / z`` with the ``z -> 0`` limit ``t``."""
    zt = z * t
    small = np.abs(zt) < 1e-6
    safe_z = np.where(small, 1.0, z)
    out = _expm1c(zt) / safe_z
    series = t * (1.0 + zt / 2.0 + zt * zt / 6.0)
    return np.where(small, series, out)


def _check_resonance(s, mu):
    scale = max(np.max(np.abs(s)), np.max(np.abs(mu), initial=0.0), 1.0)
    tol = RESONANCE_TOL * scale
    if mu.size and np.min(np.abs(s[:, None] - mu[None, :])) < tol:
        raise ResonanceError("resonant exponents unsupported (pole equals a noise exponent)")
    if mu.size and np.min(np.abs(s[:, None] + mu[None, :])) < tol:
        raise ResonanceError("resonant exponents unsupported (pole equals minus a noise exponent)")
    if np.min(np.abs(s[:, None] + s[None, :])) < tol:
        raise ResonanceError("resonant exponents unsupported (two poles sum to zero)")


def _double_integrals(decomp, corr, t):
    """Smooth full-square integral and ``d0 int_0^t H**2``, both without ``1/m**2``."""
    t = _as_times(t)
    if corr.is_zero:
        zero = np.zeros(t.shape, dtype=complex)
        return zero, zero
    s, r = decomp.poles, decomp.residues
    mu, c = corr.exponents, corr.coeffs
    _check_resonance(s, mu)
    tt = t[..., None, None]
    rr = r[:, None] * r[None, :]
    delta = corr.delta_weight * np.sum(rr * _E(s[:, None] + s[None, :], tt), axis=(-2, -1))

    smooth = np.zeros(t.shape, dtype=complex)
    if mu.size:
        e_ab = _E(s[:, None] + s[None, :], tt)  # (..., i, j)
        for ck, mk in zip(c, mu):
            # J(a, b) = int_0^t du e^{a u} int_0^u dw e^{b w} e^{mu (u - w)}
            e_amu = _E(s + mk, t[..., None])[..., :, None]
            J = (e_ab - e_amu) / (s[None, :] - mk)
            smooth += 2.0 * ck * np.sum(rr * J, axis=(-2, -1))
    return smooth, delta


def _finish(value, region, mass):
    smooth, delta = value
    if region == "half-region":
        total = 0.5 * (smooth + delta)
    else:
        total = (smooth + delta) / mass**2
    scale = np.abs(smooth) + np.abs(delta)
    if np.any(np.abs(total.imag) > 1e-9 * np.maximum(scale, np.finfo(float).tiny)):
        raise NumericalError("variance has a non-negligible imaginary part")
    return total.real


def variance_closed(decomp, corr, t, region="symmetric"):
    """Position variance in closed form.

    Parameters
    ----------
    decomp : SpectralDecomposition
    corr : CorrelationForm
    t : float or array_like
        Non-negative times.
    region : {"symmetric", "half-region"}
        Integration region; see :class:`glekin.model.Convention`.

    Raises
    ------
    ResonanceError
        If a pole coincides with a noise exponent (or its negative) or two
        poles sum to zero.
    """
    t_arr = np.asarray(t, dtype=float)
    out = _finish(_double_integrals(decomp, corr, t_arr), region, decomp.model.mass)
    out = np.maximum(out, 0.0) if np.ndim(out) else max(float(out), 0.0)
    return out


def variance_quadrature(decomp, corr, t, region="symmetric", epsabs=1e-8, epsrel=1e-8):
    """Position variance by adaptive nested quadrature.

    The smooth part is integrated over the triangle ``w < u`` (the kink of
    ``exp(mu |u - w|)`` sits on its edge) and doubled; the delta part reduces
    to ``d0 int_0^t H**2``.
    """
    t = float(_as_times(t))
    if t == 0.0:
        return 0.0

    def H(u):
        return response(decomp, u)

    def inner(u):
        val, _ = integrate.quad(
            lambda w: corr.smooth(u - w) * H(w), 0.0, u, epsabs=epsabs * 1e-2, epsrel=epsrel * 1e-2,
            limit=200,
        )
        return H(u) * val

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            smooth = 0.0
            if corr.coeffs.size:
                smooth, _ = integrate.quad(inner, 0.0, t, epsabs=epsabs, epsrel=epsrel, limit=200)
            delta, _ = integrate.quad(
                lambda u: H(u) ** 2, 0.0, t, epsabs=epsabs, epsrel=epsrel, limit=200
            )
        except integrate.IntegrationWarning as exc:
            raise AccuracyError(f"variance quadrature did not converge: {exc}") from exc
    total = 2.0 * smooth + corr.delta_weight * delta
    if region == "half-region":
        return 0.5 * total
    return total / decomp.model.mass**2


def moment_curves(decomp, corr, state, grid, region="symmetric"):
    grid = np.asarray(grid, dtype=float)
    return MomentCurves(
        grid,
        mean_position(decomp, state, decomp.barrier, grid),
        variance_closed(decomp, corr, grid, region),
    )


def is_nondecreasing(values, rtol=1e-12):
    """Empirical monotonicity flag (tolerates round-off relative to the scale)."""
    values = np.asarray(values, dtype=float)
    steps = np.diff(values)
    return bool(np.all(steps >= -rtol * np.maximum(np.abs(values[1:]), 1.0)))
