"""Positive stationary states eta_J^omega on the star graph S_N.

Every positive solution of the Euler-Lagrange system is a soliton shifted by
the same |a| on each edge: J edges carry phi_omega(x - a) (they contain a
peak), the remaining N - J carry the decreasing tail phi_omega(x + a).  The
vertex flux condition fixes t = tanh((p/2 - 1) sqrt(omega) a) through

    t / (1 - t^2)^r = (p/2)^r omega^gamma / (N - 2J),
    r = (q - 2)/(p - 2),  gamma = (2q - 2 - p)/(2(p - 2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .params import DomainError, NonlinearParams, SearchFailure, check_edges, check_positive
from .quadrature import integral_I, sech_power_tail
from .soliton import (frequency_exponent, mass_prefactor, omega_of_mass_line,
                      soliton_derivative, soliton_value, virial_coefficient, width_rate)

OMEGA_REL_TOL = 1e-12
_MAX_EXPANSIONS = 200
_T_MAX = math.nextafter(1.0, 0.0)


@dataclass(frozen=True)
class StarTopology:
    n_edges: int

    def __post_init__(self):
        object.__setattr__(self, "n_edges", check_edges(self.n_edges))

    def bump_counts(self) -> range:
        """Admissible numbers J of peak-containing edges, 0 <= J <= (N-1)/2."""
        return range(0, (self.n_edges - 1) // 2 + 1)


def check_bumps(n_edges: int, bumps: int) -> tuple[int, int]:
    n_edges = check_edges(n_edges)
    if int(bumps) != bumps or not 0 <= 2 * bumps <= n_edges - 1:
        raise DomainError(
            f"bump count J={bumps!r} not admissible on {n_edges} edges "
            f"(need integer 0 <= J <= (N-1)/2)")
    return n_edges, int(bumps)


def _ratio_exponent(params: NonlinearParams) -> float:
    return (params.q - 2.0) / (params.p - 2.0)


def _omega_exponent(params: NonlinearParams) -> float:
    return (2.0 * params.q - 2.0 - params.p) / (2.0 * (params.p - 2.0))


def matching_rhs(params: NonlinearParams, n_edges: int, bumps: int, omega: float) -> float:
    r = _ratio_exponent(params)
    return (params.p / 2.0) ** r * omega ** _omega_exponent(params) / (n_edges - 2 * bumps)


def _log_cosh(w: float) -> float:
    return w + math.log1p(math.exp(-2.0 * w)) - math.log(2.0)


def _solve_rapidity(params: NonlinearParams, n_edges: int, bumps: int, omega: float) -> float:
    """w = artanh(t) solving log tanh(w) + 2 r log cosh(w) = log(rhs)."""
    r = _ratio_exponent(params)
    target = math.log(matching_rhs(params, n_edges, bumps, omega))

    def residual(w):
        return math.log(math.tanh(w)) + 2.0 * r * _log_cosh(w) - target

    lo = hi = 1.0
    for _ in range(_MAX_EXPANSIONS):
        if residual(lo) < 0:
            break
        lo *= 0.25
    for _ in range(_MAX_EXPANSIONS):
        if residual(hi) > 0:
            break
        hi *= 2.0
    if not residual(lo) < 0 < residual(hi):
        raise SearchFailure("could not bracket the matching variable", lo=lo, hi=hi)
    return optimize.brentq(residual, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                           maxiter=500)


def solve_t(params: NonlinearParams, n_edges: int, bumps: int, omega: float) -> float:
    """Unique root t in (0, 1) of the vertex matching equation."""
    n_edges, bumps = check_bumps(n_edges, bumps)
    omega = check_positive("omega", omega)
    return _t_of_rapidity(_solve_rapidity(params, n_edges, bumps, omega))


def _t_of_rapidity(w: float) -> float:
    # tanh(w) rounds to 1 for w > ~19; keep the largest double below 1 instead
    return min(math.tanh(w), _T_MAX)


def shift_from_t(p: float, omega: float, t: float) -> float:
    """Shift a > 0 with tanh((p/2 - 1) sqrt(omega) a) = t."""
    omega = check_positive("omega", omega)
    if not 0.0 < t < 1.0:
        raise DomainError(f"matching variable t={t!r} outside (0, 1)")
    return float(math.atanh(t) / width_rate(p, omega))


def _tail_integral(p: float, w: float) -> float:
    # I(tanh w) in the sech variable, accurate even when tanh(w) rounds to 1
    return sech_power_tail(4.0 / (p - 2.0), w)


def _sech_power(w: float, power: float) -> float:
    """(1 - t^2)^(power/2) for t = tanh(w), without forming t."""
    return math.exp(-power * _log_cosh(w))


def _mass_from_rapidity(params: NonlinearParams, n_edges: int, bumps: int, omega: float,
                        w: float) -> float:
    p = params.p
    bracket = 2 * bumps * integral_I(p, 0.0) + (n_edges - 2 * bumps) * _tail_integral(p, w)
    return 0.5 * mass_prefactor(p) * omega ** frequency_exponent(p) * bracket


def mass_eta(params: NonlinearParams, n_edges: int, bumps: int, omega: float) -> float:
    n_edges, bumps = check_bumps(n_edges, bumps)
    omega = check_positive("omega", omega)
    w = _solve_rapidity(params, n_edges, bumps, omega)
    return _mass_from_rapidity(params, n_edges, bumps, omega, w)


def _dt_domega(params: NonlinearParams, n_edges: int, bumps: int, omega: float,
               w: float) -> float:
    p = params.p
    r = _ratio_exponent(params)
    gamma = _omega_exponent(params)
    t2 = math.tanh(w) ** 2
    lead = (p / 2.0) ** r * (2.0 * params.q - 2.0 - p) / (2.0 * (p - 2.0) * (n_edges - 2 * bumps))
    return (lead * omega ** (gamma - 1.0) * _sech_power(w, 2.0 * r + 2.0)
            / (t2 * (2.0 * r - 1.0) + 1.0))


def dt_domega(params: NonlinearParams, n_edges: int, bumps: int, omega: float) -> float:
    """Derivative of the matching root t with respect to omega."""
    n_edges, bumps = check_bumps(n_edges, bumps)
    omega = check_positive("omega", omega)
    return _dt_domega(params, n_edges, bumps, omega,
                      _solve_rapidity(params, n_edges, bumps, omega))


def dmass_domega(params: NonlinearParams, n_edges: int, bumps: int, omega: float) -> float:
    n_edges, bumps = check_bumps(n_edges, bumps)
    omega = check_positive("omega", omega)
    p = params.p
    w = _solve_rapidity(params, n_edges, bumps, omega)
    kappa = frequency_exponent(p)
    scale = (p / 2.0) ** (2.0 / (p - 2.0))
    peaks = scale * (6.0 - p) / (p - 2.0) ** 2 * 2 * bumps * omega ** (kappa - 1.0) * integral_I(p, 0.0)
    # (1 - t^2)^((4-p)/(p-2)) = sech(w)^(2(4-p)/(p-2))
    tails = (2.0 * scale / (p - 2.0) * (n_edges - 2 * bumps) * omega ** (kappa - 1.0)
             * (kappa * _tail_integral(p, w)
                - omega * _sech_power(w, 2.0 * (4.0 - p) / (p - 2.0))
                * _dt_domega(params, n_edges, bumps, omega, w)))
    return peaks + tails


def omega_of_mass_eta(params: NonlinearParams, n_edges: int, bumps: int, mu: float,
                      rel_tol: float = OMEGA_REL_TOL) -> float:
    """Unique omega with mass_eta(omega) = mu."""
    n_edges, bumps = check_bumps(n_edges, bumps)
    mu = check_positive("mu", mu)

    def excess(log_omega):
        return mass_eta(params, n_edges, bumps, math.exp(log_omega)) - mu

    seed = math.log(omega_of_mass_line(params.p, 2.0 * mu / n_edges))
    lo = hi = seed
    step = math.log(4.0)
    for _ in range(_MAX_EXPANSIONS):
        if excess(lo) <= 0:
            break
        lo -= step
    for _ in range(_MAX_EXPANSIONS):
        if excess(hi) >= 0:
            break
        hi += step
    f_lo, f_hi = excess(lo), excess(hi)
    if f_lo == 0:
        return math.exp(lo)
    if f_hi == 0:
        return math.exp(hi)
    if not f_lo < 0 < f_hi:
        raise SearchFailure("mass map failed to bracket mu", mu=mu, lo=math.exp(lo),
                            hi=math.exp(hi))
    # xtol on log(omega) is the relative tolerance on omega
    return math.exp(optimize.brentq(excess, lo, hi, xtol=rel_tol, rtol=4 * np.finfo(float).eps))


def vertex_value(p: float, omega: float, t: float) -> float:
    return (0.5 * p * omega * (1.0 - t * t)) ** (1.0 / (p - 2.0))


def _vertex_from_rapidity(p: float, omega: float, w: float) -> float:
    return math.exp((math.log(0.5 * p * omega) - 2.0 * _log_cosh(w)) / (p - 2.0))


def stationary_energy(params: NonlinearParams, omega: float, mu: float, vertex: float) -> float:
    """F(eta) = -(6-p)/(2(p+2)) omega mu + (2/(p+2) - 1/q) eta(0)^q."""
    p, q = params.p, params.q
    return -virial_coefficient(p) * omega * mu + (2.0 / (p + 2.0) - 1.0 / q) * vertex ** q


@dataclass(frozen=True)
class StationaryState:
    params: NonlinearParams
    topology: StarTopology
    bump_count: int
    omega: float
    t: float
    shift: float
    mass: float
    vertex_value: float
    energy: float

    @property
    def n_edges(self) -> int:
        return self.topology.n_edges

    def edge_shifts(self) -> np.ndarray:
        """Per-edge offsets s_i with eta_i(x) = phi_omega(x + s_i); peaks first."""
        shifts = np.full(self.n_edges, self.shift)
        shifts[:self.bump_count] = -self.shift
        return shifts

    def profile(self, x) -> np.ndarray:
        """Edge values, shape (N, len(x))."""
        x = np.asarray(x, dtype=float)
        return np.stack([soliton_value(self.params.p, self.omega, x + s)
                         for s in self.edge_shifts()])

    def profile_derivative(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.stack([soliton_derivative(self.params.p, self.omega, x + s)
                         for s in self.edge_shifts()])

    def flux_residual(self) -> float:
        """sum_i eta_i'(0+) + eta(0)^(q-1); zero for a genuine stationary state."""
        slopes = self.profile_derivative(np.zeros(1))[:, 0]
        return float(slopes.sum() + self.vertex_value ** (self.params.q - 1.0))

    def as_dict(self) -> dict:
        return {
            "p": self.params.p, "q": self.params.q, "N": self.n_edges,
            "J": self.bump_count, "omega": self.omega, "t": self.t, "shift": self.shift,
            "mass": self.mass, "vertex_value": self.vertex_value, "energy": self.energy,
        }


def state_from_omega(params: NonlinearParams, n_edges: int, bumps: int,
                     omega: float) -> StationaryState:
    n_edges, bumps = check_bumps(n_edges, bumps)
    omega = check_positive("omega", omega)
    w = _solve_rapidity(params, n_edges, bumps, omega)
    t = _t_of_rapidity(w)
    mass = _mass_from_rapidity(params, n_edges, bumps, omega, w)
    vertex = _vertex_from_rapidity(params.p, omega, w)
    return StationaryState(params, StarTopology(n_edges), bumps, omega, t,
                           float(w / width_rate(params.p, omega)), mass, vertex,
                           stationary_energy(params, omega, mass, vertex))


def solve_stationary(params: NonlinearParams, n_edges: int, bumps: int, mu: float,
                     rel_tol: float = OMEGA_REL_TOL) -> StationaryState:
    omega = omega_of_mass_eta(params, n_edges, bumps, mu, rel_tol)
    state = state_from_omega(params, n_edges, bumps, omega)
    # report the requested mass; the solved one agrees to rel_tol
    return StationaryState(state.params, state.topology, state.bump_count, state.omega,
                           state.t, state.shift, float(mu), state.vertex_value,
                           stationary_energy(params, omega, float(mu), state.vertex_value))


def energy_eta(params: NonlinearParams, n_edges: int, bumps: int, mu: float,
               rel_tol: float = OMEGA_REL_TOL) -> float:
    return solve_stationary(params, n_edges, bumps, mu, rel_tol).energy
