"""Solitons of u'' + u^(p-1) = omega u on the real line.

phi_omega(x) = [(p/2) omega sech^2((p/2 - 1) sqrt(omega) x)]^(1/(p-2)).
The mass-omega relation is an exact power law, so the mass-parametrised
soliton is always obtained by inverting it rather than through the
implicit constants of the sech form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import check_p, check_positive
from .quadrature import integral_I


def frequency_exponent(p: float) -> float:
    """kappa with mass ~ omega**kappa, (6 - p)/(2(p - 2))."""
    return (6.0 - p) / (2.0 * (p - 2.0))


def width_rate(p: float, omega: float) -> float:
    """c = (p/2 - 1) sqrt(omega), the argument scale of the sech profile."""
    return (p / 2.0 - 1.0) * np.sqrt(omega)


def _sech2(y):
    y = np.abs(y)
    z = np.exp(-2.0 * y)
    return 4.0 * z / (1.0 + z) ** 2


def soliton_value(p: float, omega: float, x):
    """phi_omega(x); accepts scalars or arrays for ``x``."""
    p = check_p(p)
    omega = check_positive("omega", omega)
    x = np.asarray(x, dtype=float)
    value = (0.5 * p * omega * _sech2(width_rate(p, omega) * x)) ** (1.0 / (p - 2.0))
    return float(value) if value.ndim == 0 else value


def soliton_derivative(p: float, omega: float, x):
    """phi_omega'(x) = -sqrt(omega) tanh(c x) phi_omega(x)."""
    phi = np.asarray(soliton_value(p, omega, x))
    x = np.asarray(x, dtype=float)
    value = -np.sqrt(omega) * np.tanh(width_rate(p, omega) * x) * phi
    return float(value) if value.ndim == 0 else value


def mass_prefactor(p: float) -> float:
    """4 (p/2)^(2/(p-2)) / (p - 2)."""
    return 4.0 * (p / 2.0) ** (2.0 / (p - 2.0)) / (p - 2.0)


def soliton_mass(p: float, omega: float) -> float:
    p = check_p(p)
    omega = check_positive("omega", omega)
    return mass_prefactor(p) * omega ** frequency_exponent(p) * integral_I(p, 0.0)


def omega_of_mass_line(p: float, mu: float) -> float:
    p = check_p(p)
    mu = check_positive("mu", mu)
    return (mu / (mass_prefactor(p) * integral_I(p, 0.0))) ** (1.0 / frequency_exponent(p))


def virial_coefficient(p: float) -> float:
    """(6 - p)/(2(p + 2)): stationary energy = -coefficient * omega * mass (no vertex term)."""
    return (6.0 - p) / (2.0 * (p + 2.0))


def theta_p(p: float) -> float:
    p = check_p(p)
    return virial_coefficient(p) * omega_of_mass_line(p, 1.0)


def line_energy(p: float, mu: float) -> float:
    """Ground-state energy E(mu) = -theta_p mu^(2 beta + 1) of the line problem."""
    p = check_p(p)
    mu = check_positive("mu", mu)
    return -virial_coefficient(p) * omega_of_mass_line(p, mu) * mu


@dataclass(frozen=True)
class Soliton:
    p: float
    omega: float
    mass: float
    energy: float

    @classmethod
    def from_omega(cls, p: float, omega: float) -> "Soliton":
        mass = soliton_mass(p, omega)
        return cls(p, omega, mass, -virial_coefficient(p) * omega * mass)

    @classmethod
    def from_mass(cls, p: float, mu: float) -> "Soliton":
        omega = omega_of_mass_line(p, mu)
        return cls(p, omega, float(mu), -virial_coefficient(p) * omega * mu)

    @property
    def peak(self) -> float:
        return (self.p * self.omega / 2.0) ** (1.0 / (self.p - 2.0))

    def __call__(self, x):
        return soliton_value(self.p, self.omega, x)
