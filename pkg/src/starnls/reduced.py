"""Reduced energy on the multi-soliton manifold and its Hessian at the radial point.

On each half-line the manifold carries a piece phi_omega(x + a), x >= 0,
fixed by its mass m and endpoint value h.  Pieces are parametrised by the
signed rapidity w = c a, c = (p/2 - 1) sqrt(omega): w < 0 contains the peak,
w >= 0 is a pure tail.  At fixed h the endpoint condition gives
omega = 2 h^(p-2) cosh(w)^2 / p, and

    m = (p omega/2)^(2/(p-2)) / c * S_{4/(p-2)}(w),
    ||phi||_p^p = (p omega/2)^(p/(p-2)) / c * S_{2p/(p-2)}(w),

with S_k(w) = int_w^inf sech^k.  m is strictly decreasing in w, so the
branch choice reduces to comparing m with the mass of the w = 0 piece.
The kinetic term follows from phi'^2 = omega phi^2 - (2/p) phi^p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .discrete import DiscreteField
from .params import (DomainError, InfeasiblePairError, NonlinearParams, check_edges, check_p,
                     check_positive)
from .quadrature import sech_power_tail
from .soliton import soliton_derivative, soliton_value, width_rate
from .stationary import solve_stationary

# cosh(w)^2 overflows past w ~ 355
RAPIDITY_MAX = 300.0
DEFAULT_STEP = 1e-4
STEP_WINDOW = (1e-6, 1e-2)
# exp(-600) is still a normal double
_LOG_RANGE = 600.0


def _log_cosh(w: float) -> float:
    w = abs(w)
    return w + math.log1p(math.exp(-2.0 * w)) - math.log(2.0)


def _rapidity_limit(p: float) -> float:
    # sech(w)^(2p/(p-2)) must stay a normal double on the tail side
    return min(RAPIDITY_MAX, _LOG_RANGE * (p - 2.0) / (2.0 * p))


def _omega(p: float, h: float, w: float) -> float:
    return 2.0 * h ** (p - 2.0) * math.cosh(w) ** 2 / p


def _log_mass(p: float, h: float, w: float) -> float:
    k = 4.0 / (p - 2.0)
    c = width_rate(p, _omega(p, h, w))
    return (2.0 * math.log(h) + k * _log_cosh(w) - math.log(c)
            + math.log(sech_power_tail(k, w)))


def _p_norm(p: float, h: float, w: float) -> float:
    k = 2.0 * p / (p - 2.0)
    c = width_rate(p, _omega(p, h, w))
    return math.exp(p * math.log(h) + k * _log_cosh(w) - math.log(c)
                    + math.log(sech_power_tail(k, w)))


@dataclass(frozen=True)
class SolitonPiece:
    """phi_omega(x + shift) on x >= 0."""

    p: float
    omega: float
    shift: float
    mass: float
    endpoint_value: float

    @property
    def rapidity(self) -> float:
        return float(width_rate(self.p, self.omega) * self.shift)

    def values(self, x):
        return soliton_value(self.p, self.omega, np.asarray(x, dtype=float) + self.shift)

    def derivatives(self, x):
        return soliton_derivative(self.p, self.omega, np.asarray(x, dtype=float) + self.shift)

    def p_norm(self) -> float:
        """int_0^inf phi^p."""
        return _p_norm(self.p, self.endpoint_value, self.rapidity)

    def kinetic(self) -> float:
        """int_0^inf phi'^2, from the first integral of the soliton equation."""
        return self.omega * self.mass - 2.0 / self.p * self.p_norm()


def _piece_from_rapidity(p: float, h: float, w: float) -> SolitonPiece:
    omega = _omega(p, h, w)
    return SolitonPiece(p, omega, float(w / width_rate(p, omega)),
                        math.exp(_log_mass(p, h, w)), h)


def piece_from_omega_shift(p: float, omega: float, shift: float) -> SolitonPiece:
    """Forward map (omega, a) -> piece with its mass and endpoint value."""
    p = check_p(p)
    omega = check_positive("omega", omega)
    w = float(width_rate(p, omega) * shift)
    h = soliton_value(p, omega, shift)
    if not h > 0:
        raise DomainError(f"endpoint value underflows at shift {shift!r}")
    mass = math.exp(2.0 / (p - 2.0) * math.log(0.5 * p * omega) - math.log(width_rate(p, omega))
                    + math.log(sech_power_tail(4.0 / (p - 2.0), w)))
    return SolitonPiece(p, omega, float(shift), mass, h)


def tail_mass_max(p: float, h: float) -> float:
    """Mass of the piece with endpoint value h whose peak sits at the endpoint.

    Larger masses need a peak-containing piece (a < 0), smaller ones a tail.
    """
    p = check_p(p)
    h = check_positive("h", h)
    return math.exp(_log_mass(p, h, 0.0))


def solve_piece(p: float, m: float, h: float) -> SolitonPiece:
    """The unique piece with half-line mass m and endpoint value h."""
    p = check_p(p)
    m = check_positive("m", m)
    h = check_positive("h", h)
    target = math.log(m)

    def residual(w):
        return _log_mass(p, h, w) - target

    limit = _rapidity_limit(p)
    # mass at w = 0 decides the branch; expand away from 0 on that side
    if residual(0.0) == 0.0:
        return _piece_from_rapidity(p, h, 0.0)
    sign = 1.0 if residual(0.0) > 0 else -1.0
    near, far = 0.0, sign
    while residual(far) * sign > 0:
        near = far
        far *= 2.0
        if abs(far) > limit:
            far = sign * limit
            if residual(far) * sign > 0:
                raise InfeasiblePairError(
                    f"no soliton piece with mass {m!r} and endpoint value {h!r} "
                    f"within rapidity {limit:g}", bracket=(near, far))
            break
    lo, hi = sorted((near, far))
    w = optimize.brentq(residual, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    return _piece_from_rapidity(p, h, w)


def half_line_energy(piece: SolitonPiece, params: NonlinearParams, N: int) -> float:
    """e(m, h): edge energy plus the 1/N share of the vertex term."""
    N = check_edges(N)
    return (0.5 * piece.omega * piece.mass - 2.0 / params.p * piece.p_norm()
            - piece.endpoint_value ** params.q / (params.q * N))


def edge_energy(params: NonlinearParams, N: int, m: float, h: float) -> float:
    return half_line_energy(solve_piece(params.p, m, h), params, N)


@dataclass(frozen=True)
class ReducedPoint:
    """P = (m_1, ..., m_{N-1}, h); the last edge carries mu - sum(m_i)."""

    masses: tuple[float, ...]
    vertex_value: float
    total_mass: float
    params: NonlinearParams
    N: int

    def __post_init__(self):
        N = check_edges(self.N)
        object.__setattr__(self, "N", N)
        masses = tuple(float(m) for m in self.masses)
        if len(masses) != N - 1:
            raise DomainError(f"need {N - 1} free masses, got {len(masses)}")
        if any(not m > 0 for m in masses):
            raise DomainError("edge masses must be positive")
        object.__setattr__(self, "masses", masses)
        check_positive("vertex_value", self.vertex_value)
        check_positive("total_mass", self.total_mass)
        if not self.last_mass > 0:
            raise DomainError(f"free masses sum to {sum(masses)!r} >= total mass {self.total_mass!r}")

    @property
    def last_mass(self) -> float:
        return self.total_mass - math.fsum(self.masses)

    @property
    def edge_masses(self) -> tuple[float, ...]:
        return self.masses + (self.last_mass,)

    def as_vector(self) -> np.ndarray:
        return np.array(self.masses + (self.vertex_value,))

    def moved(self, vector) -> "ReducedPoint":
        vector = np.asarray(vector, dtype=float)
        return ReducedPoint(tuple(vector[:-1]), float(vector[-1]), self.total_mass, self.params,
                            self.N)


def reduced_r(point: ReducedPoint) -> float:
    total = []
    for edge, m in enumerate(point.edge_masses):
        try:
            total.append(edge_energy(point.params, point.N, m, point.vertex_value))
        except InfeasiblePairError as exc:
            raise InfeasiblePairError(f"edge {edge}: {exc}", bracket=exc.bracket,
                                      edge=edge) from exc
    return math.fsum(total)


def stationary_point(params: NonlinearParams, N: int, mu: float) -> ReducedPoint:
    """P-bar: equal masses mu/N and the vertex value of the radial state."""
    N = check_edges(N)
    state = solve_stationary(params, N, 0, mu)
    return ReducedPoint((mu / N,) * (N - 1), state.vertex_value, float(mu), params, N)


def _steps(point: ReducedPoint, step: float) -> np.ndarray:
    # relative steps; masses share the scale mu/N
    scale = np.append(np.full(point.N - 1, point.total_mass / point.N), point.vertex_value)
    return step * scale


def reduced_gradient(point: ReducedPoint, step: float = DEFAULT_STEP) -> np.ndarray:
    """Central-difference gradient of r in (m_1, ..., m_{N-1}, h)."""
    x = point.as_vector()
    d = _steps(point, step)
    grad = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = d[i]
        grad[i] = (reduced_r(point.moved(x + e)) - reduced_r(point.moved(x - e))) / (2 * d[i])
    return grad


def reduced_hessian(point: ReducedPoint, step: float = 1e-3) -> np.ndarray:
    """Dense central-difference Hessian of r in (m_1, ..., m_{N-1}, h)."""
    x = point.as_vector()
    d = _steps(point, step)
    n = x.size
    r0 = reduced_r(point)
    hess = np.empty((n, n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = d[i]
        hess[i, i] = (reduced_r(point.moved(x + ei)) - 2 * r0
                      + reduced_r(point.moved(x - ei))) / d[i] ** 2
        for j in range(i):
            ej = np.zeros(n)
            ej[j] = d[j]
            hess[i, j] = hess[j, i] = (
                reduced_r(point.moved(x + ei + ej)) - reduced_r(point.moved(x + ei - ej))
                - reduced_r(point.moved(x - ei + ej)) + reduced_r(point.moved(x - ei - ej))
            ) / (4 * d[i] * d[j])
    return hess


@dataclass(frozen=True)
class StabilityCertificate:
    params: NonlinearParams
    N: int
    mu: float
    vertex_value: float
    step: float
    e_mm: float
    e_hh: float
    cross: float
    cross_relative: float
    eigenvalues: tuple[float, ...]
    richardson_consistent: bool
    positive_definite: bool

    def as_dict(self) -> dict:
        return {
            "p": self.params.p, "q": self.params.q, "N": self.N, "mu": self.mu,
            "vertex_value": self.vertex_value, "step": self.step,
            "e_mm": self.e_mm, "e_hh": self.e_hh, "cross": self.cross,
            "cross_relative": self.cross_relative, "eigenvalues": list(self.eigenvalues),
            "richardson_consistent": self.richardson_consistent,
            "positive_definite": self.positive_definite,
        }


def _second_difference(f, x: float, dx: float) -> float:
    return (f(x + dx) - 2.0 * f(x) + f(x - dx)) / dx ** 2


def hessian_check(params: NonlinearParams, N: int, mu: float,
                  step: float = DEFAULT_STEP) -> StabilityCertificate:
    """Positive definiteness of the Hessian of r at P-bar from finite differences.

    At the symmetric point the Hessian has eigenvalues N e_mm (once),
    e_mm (N - 2 times) and N e_hh (once), so its sign is decided by the two
    second derivatives of e.  Each is recomputed at step/2 and must keep its
    sign; the mixed m_1-h derivative of r is reported relative to the
    diagonal scale and vanishes in exact arithmetic.
    """
    N = check_edges(N)
    mu = check_positive("mu", mu)
    lo, hi = STEP_WINDOW
    if not lo < step < hi:
        raise DomainError(f"relative step {step!r} outside ({lo:g}, {hi:g})")
    point = stationary_point(params, N, mu)
    m_bar, h_bar = mu / N, point.vertex_value

    def e_of_m(m):
        return edge_energy(params, N, m, h_bar)

    def e_of_h(h):
        return edge_energy(params, N, m_bar, h)

    try:
        e_mm = _second_difference(e_of_m, m_bar, step * m_bar)
        e_hh = _second_difference(e_of_h, h_bar, step * h_bar)
        e_mm_half = _second_difference(e_of_m, m_bar, 0.5 * step * m_bar)
        e_hh_half = _second_difference(e_of_h, h_bar, 0.5 * step * h_bar)
        x = point.as_vector()
        dm, dh = step * m_bar, step * h_bar

        def r_at(sm, sh):
            y = x.copy()
            y[0] += sm * dm
            y[-1] += sh * dh
            return reduced_r(point.moved(y))

        cross = (r_at(1, 1) - r_at(1, -1) - r_at(-1, 1) + r_at(-1, -1)) / (4 * dm * dh)
    except InfeasiblePairError as exc:
        raise DomainError(f"finite-difference stencil left the feasible region ({exc}); "
                          f"reduce the step") from exc
    scale = max(abs(e_mm) * m_bar ** 2, abs(e_hh) * h_bar ** 2)
    cross_relative = abs(cross) * m_bar * h_bar / scale if scale > 0 else math.inf
    richardson = (np.sign(e_mm) == np.sign(e_mm_half)) and (np.sign(e_hh) == np.sign(e_hh_half))
    eigenvalues = (N * e_mm,) + (e_mm,) * (N - 2) + (N * e_hh,)
    return StabilityCertificate(params, N, float(mu), h_bar, step, e_mm, e_hh, cross,
                                cross_relative, eigenvalues, bool(richardson),
                                bool(e_mm > 0 and e_hh > 0 and richardson))


def project_to_manifold(field: DiscreteField, params: NonlinearParams) -> ReducedPoint:
    """Sigma map: keep per-edge masses and |u(0)|, replace each edge by a soliton piece."""
    h = abs(field.vertex)
    if h == 0:
        raise DomainError("projection needs a nonzero vertex value")
    masses = field.edge_masses()
    return ReducedPoint(tuple(masses[:-1]), h, float(np.sum(masses)), params, field.grid.N)
