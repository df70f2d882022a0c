"""
Noise environments
==================

Parameters, characteristic roots, Laplace-domain friction kernels and the
time-domain noise autocovariance for the three structured noises (harmonic
noise HN, harmonic velocity noise HVN, harmonic acceleration noise HAN) and an
Ohmic (white noise) reference.

Every kernel is a rational function ``beta_hat(s) = B(s) / D(s)``. The noise
autocovariance is obtained from the kernel through the second fluctuation
dissipation theorem, ``<xi(t) xi(t')> = m kT beta(t - t')``, written as an
exponential sum plus a delta spike::

    C(tau) = sum_k c_k exp(mu_k |tau|) + d0 * delta(tau)

A delta at the end point of a one-sided Laplace integral is given half
weight, so ``sum_k c_k / (s - mu_k) + d0 / 2 == m kT beta_hat(s)``.
"""

import cmath
import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfluentPolesError, DomainError, ValidationError

__all__ = [
    "NoiseKind",
    "Convention",
    "NoiseModel",
    "CorrelationForm",
    "make_noise_model",
    "kernel_coefficients",
    "kernel_laplace",
    "correlation_form",
]

# relative separation below which mu_1 == mu_2 is treated as degenerate
DEGENERATE_ROOT_TOL = 1e-8


class NoiseKind(str, enum.Enum):
    HN = "HN"
    HVN = "HVN"
    HAN = "HAN"
    OHMIC = "Ohmic"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for kind in cls:
            if kind.value.lower() == str(value).strip().lower():
                return kind
        names = ", ".join(k.value for k in cls)
        raise ValidationError("kind", f"must be one of {names} (got {value!r})")


@dataclass(frozen=True)
class Convention:
    """Normalisation conventions.

    kernel
        ``"fdt-kernel"`` derives the noise covariance from the Laplace-domain
        kernel through the FDT (default). ``"literal-eq2"`` uses the closed-form
        time-domain autocorrelations of the three noises directly; the kernel
        entering the response function is unchanged.
    region
        ``"symmetric"`` integrates the variance over the full square with the
        ``1/m**2`` prefactor (default). ``"half-region"`` integrates over
        ``t2 < t1`` only, without the mass prefactor.
    """

    kernel: str = "fdt-kernel"
    region: str = "symmetric"

    def __post_init__(self):
        if self.kernel not in ("fdt-kernel", "literal-eq2"):
            raise ValidationError("kernel_convention", "must be 'fdt-kernel' or 'literal-eq2'")
        if self.region not in ("symmetric", "half-region"):
            raise ValidationError("region_convention", "must be 'symmetric' or 'half-region'")


@dataclass(frozen=True)
class NoiseModel:
    """Noise environment of the particle.

    ``eta = 0`` is accepted as the deterministic limit (no friction, no noise).
    """

    kind: NoiseKind
    gamma_big: float = 1.0
    omega2: float = 2.0
    eta: float = 1.0
    mass: float = 1.0
    kT: float = 1.0
    gamma_ohmic: float = 0.0
    mu: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind.parse(self.kind))
        for name in ("gamma_big", "omega2", "mass", "kT"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValidationError(name, "must be positive")
        for name in ("eta", "gamma_ohmic"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValidationError(name, "must be non-negative")
        disc = cmath.sqrt(self.gamma_big**2 - 4.0 * self.omega2)
        mu1 = (-self.gamma_big + disc) / 2.0
        mu2 = (-self.gamma_big - disc) / 2.0
        object.__setattr__(self, "mu", (complex(mu1), complex(mu2)))

    def with_(self, **changes):
        params = {
            k: getattr(self, k)
            for k in ("kind", "gamma_big", "omega2", "eta", "mass", "kT", "gamma_ohmic")
        }
        params.update(changes)
        return NoiseModel(**params)


def make_noise_model(kind, gamma_big=1.0, omega2=2.0, eta=1.0, mass=1.0, kT=1.0, gamma_ohmic=0.0):
    """Build and validate a :class:`NoiseModel`.

    The characteristic roots ``mu`` of ``mu**2 + gamma_big*mu + omega2 = 0``
    are a complex-conjugate pair when ``gamma_big**2 < 4*omega2``.
    """
    return NoiseModel(
        kind=kind,
        gamma_big=float(gamma_big),
        omega2=float(omega2),
        eta=float(eta),
        mass=float(mass),
        kT=float(kT),
        gamma_ohmic=float(gamma_ohmic),
    )


def kernel_coefficients(model):
    """Numerator and denominator of ``beta_hat(s)``, highest power first.

    Returns
    -------
    B, D : ndarray
        ``beta_hat(s) = polyval(B, s) / polyval(D, s)``. For HN and HAN the
        denominator carries the factor ``gamma_big``.
    """
    g, w2, eta = model.gamma_big, model.omega2, model.eta
    quad = np.array([1.0, g, w2])
    if model.kind is NoiseKind.HN:
        return eta * w2 * np.array([1.0, g]), g * quad
    if model.kind is NoiseKind.HVN:
        return np.array([eta * g, 0.0]), quad
    if model.kind is NoiseKind.HAN:
        return eta * np.array([g, w2, 0.0]), g * quad
    return np.array([model.gamma_ohmic]), np.array([1.0])


def kernel_laplace(model, s):
    """Laplace transform of the friction kernel at complex ``s``."""
    B, D = kernel_coefficients(model)
    s = complex(s)
    den = np.polyval(D, s)
    scale = np.polyval(np.abs(D), abs(s))
    if abs(den) <= 1e-14 * scale:
        raise DomainError(f"beta_hat evaluated at a kernel pole s={s}")
    return complex(np.polyval(B, s) / den)


@dataclass(frozen=True)
class CorrelationForm:
    """Noise autocovariance as an exponential sum plus a delta spike."""

    coeffs: np.ndarray
    exponents: np.ndarray
    delta_weight: float = 0.0

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        mu = np.atleast_1d(np.asarray(self.exponents, dtype=complex))
        if c.shape != mu.shape:
            raise ValueError("coeffs and exponents must have the same length")
        if np.any(mu.real >= 0):
            raise ValidationError("exponents", "must have negative real parts")
        if self.delta_weight < 0:
            raise ValidationError("delta_weight", "must be non-negative")
        c.setflags(write=False)
        mu.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "exponents", mu)
        object.__setattr__(self, "delta_weight", float(self.delta_weight))

    def smooth(self, tau):
        """Smooth part ``sum_k c_k exp(mu_k |tau|)`` (real)."""
        tau = np.abs(np.asarray(tau, dtype=float))
        if self.coeffs.size == 0:
            return np.zeros_like(tau)
        val = np.exp(np.multiply.outer(tau, self.exponents)) @ self.coeffs
        return val.real

    def laplace(self, s):
        """One-sided Laplace transform of the smooth part."""
        s = np.asarray(s, dtype=complex)
        return np.sum(self.coeffs / (s[..., None] - self.exponents), axis=-1)

    def scaled(self, factor):
        return CorrelationForm(self.coeffs * factor, self.exponents, self.delta_weight * factor)

    @property
    def is_zero(self):
        return not np.any(self.coeffs) and self.delta_weight == 0.0


def _check_distinct_roots(model):
    mu1, mu2 = model.mu
    if abs(mu1 - mu2) < DEGENERATE_ROOT_TOL * abs(mu1 + mu2):
        raise ConfluentPolesError(
            "degenerate characteristic roots (gamma_big**2 == 4*omega2); "
            "perturb gamma_big or omega2 slightly"
        )


def _combine(terms):
    """Merge (coefficient, exponent) pairs sharing an exponent."""
    out = {}
    for c, mu in terms:
        out[mu] = out.get(mu, 0.0) + c
    return np.array(list(out.values()), dtype=complex), np.array(list(out.keys()), dtype=complex)


def _literal_terms(model):
    eta = model.eta
    mu1, mu2 = model.mu
    norm = eta / (mu1**2 - mu2**2)
    hn = [(norm / mu1, mu1), (-norm / mu2, mu2)]
    hvn = [(-norm * mu1, mu1), (norm * mu2, mu2)]
    if model.kind is NoiseKind.HN:
        return hn, 0.0
    if model.kind is NoiseKind.HVN:
        return hvn, 0.0
    weight = 1.0 - 2.0 * model.omega2 / model.gamma_big**2
    terms = [(-c, mu) for c, mu in hn] + [(-weight * c, mu) for c, mu in hvn]
    return terms, eta


def correlation_form(model, convention=None):
    """Autocovariance of the noise force for ``model``.

    Under the default ``fdt-kernel`` convention the kernel is expanded in
    partial fractions ``beta_hat(s) = b_inf + sum_k a_k / (s - mu_k)``; the
    smooth coefficients are ``m kT a_k`` and the delta weight is
    ``2 m kT b_inf`` (half of it is seen by the one-sided transform).

    Raises
    ------
    ConfluentPolesError
        If the characteristic roots coincide.
    """
    convention = convention or Convention()
    mkT = model.mass * model.kT
    if model.kind is NoiseKind.OHMIC:
        return CorrelationForm([], [], 2.0 * mkT * model.gamma_ohmic)
    _check_distinct_roots(model)
    if model.eta == 0.0:
        return CorrelationForm([], [], 0.0)

    if convention.kernel == "literal-eq2":
        terms, d0 = _literal_terms(model)
        c, mu = _combine(terms)
        return CorrelationForm(c, mu, d0)

    B, D = kernel_coefficients(model)
    b_inf = B[0] / D[0] if len(B) == len(D) else 0.0
    dD = np.polyder(D)
    terms = [(mkT * np.polyval(B, m) / np.polyval(dD, m), m) for m in model.mu]
    c, mu = _combine(terms)
    return CorrelationForm(c, mu, 2.0 * mkT * float(np.real(b_inf)))
