"""
Response function of the inverted parabolic barrier
===================================================

``H_hat(s) = 1 / (s**2 + s*beta_hat(s) - omega_b**2)``. Clearing the kernel
denominator gives ``H_hat(s) = N(s) / Q(s)`` with polynomials ``N = D`` and
``Q = (s**2 - omega_b**2) D + s B``. All kernels are rational, so the inverse
transform is a finite pole sum ``H(t) = sum_i r_i exp(s_i t)``.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfluentPolesError, DomainError, NumericalError, ValidationError
from .model import NoiseModel, kernel_coefficients

__all__ = [
    "BarrierSpec",
    "CharacteristicPolynomial",
    "SpectralDecomposition",
    "characteristic_polynomial",
    "find_poles",
    "residues",
    "decompose",
    "response",
    "response_integral",
]

CONFLUENT_TOL = 1e-8
IMAG_TOL = 1e-9


@dataclass(frozen=True)
class BarrierSpec:
    """Inverted harmonic barrier ``U(x) = -m omega_b**2 x**2 / 2`` with top at 0."""

    omega_b: float = 1.0
    x_b: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.omega_b) or self.omega_b <= 0:
            raise ValidationError("omega_b", "must be positive")
        if self.x_b != 0.0:
            raise ValidationError("x_b", "must be 0 (barrier top at the origin)")


class CharacteristicPolynomial(NamedTuple):
    numerator: np.ndarray
    denominator: np.ndarray


def characteristic_polynomial(model, barrier):
    """Coefficients (highest power first) of ``N`` and ``Q``.

    Degree of ``Q`` is 4 for the structured noises and 2 for Ohmic friction.
    """
    B, D = kernel_coefficients(model)
    Q = np.polyadd(np.polymul([1.0, 0.0, -barrier.omega_b**2], D), np.polymul(B, [1.0, 0.0]))
    return CharacteristicPolynomial(np.asarray(D, dtype=float), np.asarray(Q, dtype=float))


def _companion(monic):
    n = len(monic) - 1
    C = np.zeros((n, n))
    C[0, :] = -monic[1:]
    C[1:, :-1] = np.eye(n - 1)
    return C


def find_poles(coefficients, polish_tol=1e-12, max_newton=50):
    """All roots of a real polynomial (highest power first).

    Roots are the eigenvalues of the companion matrix, then Newton-polished.

    Raises
    ------
    ConfluentPolesError
        If two roots are closer than ``1e-8`` relative to the largest root.
    """
    a = np.trim_zeros(np.asarray(coefficients, dtype=float), "f")
    if a.size < 3:
        raise ValueError("polynomial degree must be at least 2")
    monic = a / a[0]
    roots = np.linalg.eigvals(_companion(monic)).astype(complex)
    da = np.polyder(monic)
    absc = np.abs(monic)
    for i, z in enumerate(roots):
        for _ in range(max_newton):
            q = np.polyval(monic, z)
            if abs(q) <= polish_tol * np.polyval(absc, abs(z)):
                break
            dq = np.polyval(da, z)
            if dq == 0:
                break
            z = z - q / dq
        roots[i] = z
    # snap numerically real roots onto the axis; conjugate pairs stay paired
    scale = max(np.max(np.abs(roots)), 1.0)
    roots = np.where(np.abs(roots.imag) < 1e-13 * scale, roots.real + 0j, roots)

    resid = np.abs(np.polyval(monic, roots)) / np.polyval(absc, np.abs(roots))
    if np.any(~np.isfinite(roots)) or np.any(resid > 1e-9):
        raise NumericalError(f"root finding did not converge; relative residuals {resid}")
    diff = np.abs(roots[:, None] - roots[None, :])
    diff[np.diag_indices_from(diff)] = np.inf
    if diff.min() < CONFLUENT_TOL * scale:
        raise ConfluentPolesError(f"confluent poles unsupported (separation {diff.min():.3g})")
    return roots[np.lexsort((roots.imag, -roots.real))]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Poles and residues of ``H_hat(s)``."""

    poles: np.ndarray
    residues: np.ndarray
    model: NoiseModel = None
    barrier: BarrierSpec = None

    @property
    def dominant_pole(self):
        return self.poles[np.argmax(self.poles.real)]

    @property
    def n_unstable(self):
        return int(np.sum(self.poles.real > 0))

    @property
    def single_unstable_mode(self):
        """True when exactly one pole is unstable and it is real and positive."""
        lam = self.dominant_pole
        return self.n_unstable == 1 and lam.imag == 0.0 and lam.real > 0

    def response(self, t):
        return response(self, t)

    def response_integral(self, t):
        return response_integral(self, t)


def residues(N, Q, poles, model=None, barrier=None):
    """``r_i = N(s_i) / Q'(s_i)`` for simple poles."""
    poles = np.asarray(poles, dtype=complex)
    dQ = np.polyval(np.polyder(Q), poles)
    scale = np.polyval(np.abs(np.polyder(Q)), np.abs(poles))
    if np.any(np.abs(dQ) < CONFLUENT_TOL * scale):
        raise ConfluentPolesError("confluent poles unsupported (vanishing Q')")
    r = np.polyval(N, poles) / dQ
    # real poles carry real residues for real polynomials
    r = np.where(poles.imag == 0.0, r.real + 0j, r)
    return SpectralDecomposition(poles, r, model, barrier)


def decompose(model, barrier):
    """Spectral decomposition of the response function for ``model``."""
    N, Q = characteristic_polynomial(model, barrier)
    return residues(N, Q, find_poles(Q), model, barrier)


def _as_times(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("time must be non-negative")
    return t


def _real_part(terms, t):
    val = terms.sum(axis=-1)
    bound = np.abs(terms).sum(axis=-1)
    if np.any(np.abs(val.imag) > IMAG_TOL * np.maximum(bound, np.finfo(float).tiny)):
        raise NumericalError("pole sum has a non-negligible imaginary part")
    out = val.real
    return float(out) if np.ndim(t) == 0 else out


def response(decomp, t):
    """``H(t) = sum_i r_i exp(s_i t)`` for ``t >= 0`` (scalar or array)."""
    t = _as_times(t)
    terms = decomp.residues * np.exp(np.multiply.outer(t, decomp.poles))
    return _real_part(terms, t)


def response_integral(decomp, t):
    """``int_0^t H = sum_i r_i (exp(s_i t) - 1) / s_i``."""
    t = _as_times(t)
    s = decomp.poles
    terms = decomp.residues * _expm1c(np.multiply.outer(t, s)) / s
    return _real_part(terms, t)


def _expm1c(z):
    """``exp(z) - 1`` for complex ``z`` without cancellation near 0."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    # exp(x+iy) - 1 = expm1(x) cos y - 2 sin^2(y/2) + i exp(x) sin y
    re = np.expm1(x) * np.cos(y) - 2.0 * np.sin(y / 2.0) ** 2
    im = np.exp(x) * np.sin(y)
    return re + 1j * im
