"""Parameter integrals of (1 - s^2)^k over subintervals of [0, 1].

For p in (4, 6] the exponent (4 - p)/(p - 2) is negative and the integrand
blows up at s = 1.  Writing (1 - s^2)^k = (1 - s)^k (1 + s)^k moves the
singular factor into an algebraic weight, which QUADPACK's QAWS rule
integrates exactly, leaving the smooth factor (1 + s)^k to the adaptive part.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy import integrate

from .params import DomainError, check_p

DEFAULT_ABS_TOL = 1e-12
_LIMIT = 200
# exponents from here on give an integrand that is smooth up to s = 1
_SMOOTH_EXPONENT = 1.0
# below this distance to s = 1 the log tail uses its endpoint expansion
_ENDPOINT_GAP = 1e-9


def mass_exponent(p: float) -> float:
    """Exponent (4 - p)/(p - 2) of the integrand in every mass formula."""
    return (4.0 - p) / (p - 2.0)


@dataclass(frozen=True)
class IntegralParams:
    p: float
    lower: float = 0.0
    abs_tol: float = DEFAULT_ABS_TOL

    def __post_init__(self):
        object.__setattr__(self, "p", check_p(self.p, allow_six=True))
        lower = float(self.lower)
        if not 0.0 <= lower <= 1.0:
            raise DomainError(f"lower limit {lower!r} outside [0, 1]")
        object.__setattr__(self, "lower", lower)
        if not self.abs_tol > 0:
            raise DomainError("abs_tol must be positive")

    @property
    def exponent(self) -> float:
        return mass_exponent(self.p)


def _qaws(f, lower: float, weight: str, k: float, abs_tol: float) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, _ = integrate.quad(f, lower, 1.0, weight=weight, wvar=(0.0, k),
                                  epsabs=abs_tol, epsrel=1e-13, limit=_LIMIT)
    return value


def _log_one_minus_sq(s: float) -> float:
    # factored so that it stays finite for every s < 1
    return math.log1p(-s) + math.log1p(s)


def _plain(f, lower: float, abs_tol: float) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, _ = integrate.quad(f, lower, 1.0, epsabs=abs_tol, epsrel=1e-13, limit=_LIMIT)
    return value


def _tail(k: float, x: float, abs_tol: float) -> float:
    # int_x^1 (1 - s^2)^k ds for x in [-1, 1]
    if x >= 1.0:
        return 0.0
    if x < 0.0:
        return 2.0 * _tail(k, 0.0, abs_tol) - _tail(k, -x, abs_tol)
    if k >= _SMOOTH_EXPONENT:
        # bounded integrand; (1 + s)^k alone would overflow as p -> 2
        return _plain(lambda s: 0.0 if s >= 1.0 else math.exp(k * _log_one_minus_sq(s)),
                      x, abs_tol)
    return _qaws(lambda s: (1.0 + s) ** k, x, "alg", k, abs_tol)


def _tail_log(k: float, x: float, abs_tol: float) -> float:
    # int_x^1 (1 - s^2)^k ln(1 - s^2) ds for x in [0, 1]
    if x >= 1.0:
        return 0.0
    if k >= _SMOOTH_EXPONENT:
        def f(s):
            if s >= 1.0:
                return 0.0
            lg = _log_one_minus_sq(s)
            return math.exp(k * lg) * lg
        return _plain(f, x, abs_tol)
    gap = 1.0 - x
    if gap < _ENDPOINT_GAP:
        # (1 + s)^k ~ 2^k on so short an interval; relative error O(gap)
        k1 = k + 1.0
        return 2.0 ** k * gap ** k1 * ((math.log(gap) + math.log(2.0)) / k1 - 1.0 / k1 ** 2)
    near = _qaws(lambda s: (1.0 + s) ** k, x, "alg-logb", k, abs_tol / 2)
    far = _qaws(lambda s: (1.0 + s) ** k * math.log1p(s), x, "alg", k, abs_tol / 2)
    return near + far


def power_integral(exponent: float, lower: float, upper: float = 1.0,
                   abs_tol: float = DEFAULT_ABS_TOL) -> float:
    """Integral of (1 - s^2)**exponent over [lower, upper], -1 <= lower <= upper <= 1.

    ``exponent`` must exceed -1 so that the endpoint singularities are
    integrable.  Negative ``lower`` is handled by evenness of the integrand.
    """
    if not exponent > -1.0:
        raise DomainError(f"exponent {exponent!r} makes the integral diverge")
    if not -1.0 <= lower <= upper <= 1.0:
        raise DomainError(f"need -1 <= lower <= upper <= 1, got [{lower!r}, {upper!r}]")
    if lower == upper:
        return 0.0
    return _tail(exponent, lower, abs_tol) - _tail(exponent, upper, abs_tol)


def integral_I(p: float, lower: float = 0.0, abs_tol: float = DEFAULT_ABS_TOL) -> float:
    """I(lower) = int_lower^1 (1 - s^2)^((4-p)/(p-2)) ds, with p in (2, 6]."""
    params = IntegralParams(p, lower, abs_tol)
    return max(_tail(params.exponent, params.lower, params.abs_tol), 0.0)


def integral_I_log(p: float, lower: float = 0.0, upper: float = 1.0,
                   abs_tol: float = DEFAULT_ABS_TOL) -> float:
    """int_lower^upper (1 - s^2)^((4-p)/(p-2)) ln(1 - s^2) ds; never positive."""
    p = check_p(p, allow_six=True)
    if not 0.0 <= lower <= upper <= 1.0:
        raise DomainError(f"need 0 <= lower <= upper <= 1, got [{lower!r}, {upper!r}]")
    if lower == upper:
        return 0.0
    k = mass_exponent(p)
    value = _tail_log(k, lower, abs_tol / 2) - _tail_log(k, upper, abs_tol / 2)
    return min(value, 0.0)


def _sech(v: float) -> float:
    v = abs(v)
    return 2.0 * math.exp(-v) / (1.0 + math.exp(-2.0 * v))


def sech_power_tail(power: float, w: float, rel_tol: float = 1.2e-14) -> float:
    """int_w^inf sech(v)**power dv for any real w and power > 0.

    Equals the (1 - s^2)^(power/2 - 1) integral from tanh(w) to 1, but stays
    accurate when tanh(w) rounds to 1.
    """
    if not power > 0:
        raise DomainError(f"sech power must be positive, got {power!r}")
    if w < 0:
        return 2.0 * sech_power_tail(power, 0.0, rel_tol) - sech_power_tail(power, -w, rel_tol)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, _ = integrate.quad(lambda v: _sech(v) ** power, w, math.inf,
                                  epsabs=0.0, epsrel=rel_tol, limit=_LIMIT)
    return value
