"""Existence verdicts, critical masses and critical edge counts.

Ground states at mass mu exist exactly when the radial stationary state
eta_0 has energy at or below the line soliton level E(mu).  Writing
K(mu) = F_rad(mu) / mu^(2 beta + 1), the criterion reads K(mu) + theta_p <= 0,
and K is strictly monotone off the balanced line q = p/2 + 1.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .params import (DomainError, NoThresholdError, NonlinearParams, Regime, RegimeError,
                     SearchFailure, check_edges, check_p, check_positive)
from .quadrature import integral_I, integral_I_log
from .soliton import line_energy, theta_p
from .stationary import solve_stationary

log = logging.getLogger(__name__)

BOUNDARY_REL = 1e-9
MU_BOUNDS = (1e-8, 1e8)
N_CAP = 10_000


class Verdict(str, Enum):
    EXISTS = "exists"
    NOT_EXISTS = "not_exists"


@dataclass(frozen=True)
class ExistenceReport:
    params: NonlinearParams
    N: int
    mu: float
    radial_energy: float
    line_energy: float
    margin: float
    verdict: Verdict
    regime: Regime
    boundary: bool = False

    def as_dict(self) -> dict:
        return {
            "p": self.params.p, "q": self.params.q, "N": self.N, "mu": self.mu,
            "radial_energy": self.radial_energy, "line_energy": self.line_energy,
            "margin": self.margin, "verdict": self.verdict.value,
            "regime": self.regime.value, "boundary": self.boundary,
        }


def exists_ground_state(params: NonlinearParams, N: int, mu: float) -> ExistenceReport:
    N = check_edges(N)
    mu = check_positive("mu", mu)
    radial = solve_stationary(params, N, 0, mu).energy
    level = line_energy(params.p, mu)
    margin = radial - level
    verdict = Verdict.EXISTS if margin <= 0 else Verdict.NOT_EXISTS
    return ExistenceReport(params, N, mu, radial, level, margin, verdict, params.regime,
                           boundary=abs(margin) <= BOUNDARY_REL * abs(level))


def K_value(params: NonlinearParams, N: int, mu: float) -> float:
    """F_rad(mu) / mu^(2 beta + 1)."""
    mu = check_positive("mu", mu)
    return solve_stationary(params, N, 0, mu).energy / mu ** params.energy_exponent


def K_derivative(params: NonlinearParams, N: int, mu: float) -> float:
    mu = check_positive("mu", mu)
    p, q = params.p, params.q
    if params.regime is Regime.BALANCED:
        return 0.0
    vertex = solve_stationary(params, N, 0, mu).vertex_value
    return ((p + 2.0 - 2.0 * q) / (q * (6.0 - p))
            * vertex ** q / mu ** (params.energy_exponent + 1.0))


@dataclass(frozen=True)
class CriticalMassResult:
    params: NonlinearParams
    N: int
    mu_critical: float
    bracket: tuple[float, float]
    iterations: int
    side: str  # "below" when ground states exist for mu <= mu_c, "above" otherwise

    def as_dict(self) -> dict:
        return {
            "p": self.params.p, "q": self.params.q, "N": self.N,
            "mu_critical": self.mu_critical, "bracket": list(self.bracket),
            "iterations": self.iterations, "side": self.side,
        }


def critical_mass(params: NonlinearParams, N: int, rel_tol: float = 1e-10,
                  mu_bounds: tuple[float, float] = MU_BOUNDS) -> CriticalMassResult:
    """Locate the unique sign change of K(mu) + theta_p by expansion and bisection."""
    N = check_edges(N)
    regime = params.regime
    if regime is Regime.BALANCED:
        raise RegimeError("balanced regime q = p/2 + 1 has no critical mass; use critical_N")
    if N == 2:
        raise NoThresholdError("on two half-lines ground states exist at every mass")
    theta = theta_p(params.p)

    def excess(mu):
        return K_value(params, N, mu) + theta

    # orient so that `inside` (criterion holds) is the small-mass side
    increasing = regime is Regime.WEAK_VERTEX
    lo_mu, hi_mu = mu_bounds
    mu = 1.0
    holds = excess(mu) <= 0
    a = b = mu
    iterations = 0
    # expand until the verdict differs between a and b
    while True:
        iterations += 1
        if holds == increasing:
            b *= 4.0
            if b > hi_mu:
                raise SearchFailure("critical mass above search window", params=params, N=N,
                                    bracket=(a, b), window=mu_bounds)
            if (excess(b) <= 0) != holds:
                break
            a = b
        else:
            a /= 4.0
            if a < lo_mu:
                raise SearchFailure("critical mass below search window", params=params, N=N,
                                    bracket=(a, b), window=mu_bounds)
            if (excess(a) <= 0) != holds:
                break
            b = a
    # bisection in log(mu); a < b always bracket the switch
    holds_a = excess(a) <= 0
    while b - a > rel_tol * a:
        iterations += 1
        mid = math.sqrt(a * b)
        if (excess(mid) <= 0) == holds_a:
            a = mid
        else:
            b = mid
    side = "below" if increasing else "above"
    # report the endpoint lying in the existence set
    mu_c = a if increasing else b
    return CriticalMassResult(params, N, mu_c, (a, b), iterations, side)


def trial_exponential_energy(params: NonlinearParams, N: int, mu: float) -> float:
    """Energy of the radial competitor A exp(-B x) obeying the vertex condition."""
    N = check_edges(N)
    mu = check_positive("mu", mu)
    p, q = params.p, params.q
    scale = 2.0 / N ** 2
    return (-(1.0 / q - 0.25) * (scale * mu) ** (q / (4.0 - q))
            - (N ** 2 / p ** 2) * (scale * mu) ** ((p - q + 2.0) / (4.0 - q)))


def balanced_t(p: float, N: int) -> float:
    return math.sqrt(p / (p + 2.0 * N * N))


def condcrit_lhs(p: float, N: int) -> float:
    """N * I(sqrt(p / (p + 2N^2))) / I(0); the balanced criterion is lhs <= 2."""
    p = check_p(p, allow_six=True)
    if int(N) != N or N < 1:
        raise DomainError(f"edge count must be a positive integer, got {N!r}")
    return N * integral_I(p, balanced_t(p, N)) / integral_I(p, 0.0)


def critical_N_lower_bound(p: float, N: int) -> bool:
    """True when the analytic majorant of condcrit_lhs, valid for p < 4, is <= 2."""
    p = check_p(p)
    if p >= 4.0:
        raise DomainError("the majorant of condcrit_lhs is only valid for p < 4")
    x = p / (p + 2.0 * N * N)
    e = (4.0 - p) / (p - 2.0)
    # log form: the power can underflow close to p = 2
    log_bound = (math.log(2.0 * N / (p - 2.0)) + e * math.log1p(-x)
                 + math.log1p(-math.sqrt(x)))
    return log_bound <= math.log(2.0)


def certified_N(p: float, cap: int = N_CAP) -> int:
    """Largest N certified by critical_N_lower_bound (1 when none is)."""
    best = 1
    for N in range(2, cap + 1):
        if not critical_N_lower_bound(p, N):
            break
        best = N
    return best


def critical_N(p: float, cap: int = N_CAP) -> int:
    """Largest N with condcrit_lhs(p, N) <= 2 (lhs is non-decreasing in N)."""
    p = check_p(p)
    N = 2
    if p < 4.0:
        N = max(N, certified_N(p, cap))
    while condcrit_lhs(p, N + 1) <= 2.0:
        N += 1
        if N >= cap:
            raise SearchFailure("critical edge count exceeds cap", p=p, cap=cap)
    return N


def g_polynomial(N: float) -> float:
    pi = math.pi
    return N ** 4 - 2 * pi * N ** 3 + pi ** 2 * N ** 2 - 6 * pi * N + 3 * pi ** 2


def r_value(p: float) -> float:
    """R(p) = I(sqrt(p/(p+18))) / I(0), the N = 3 criterion reads 3 R(p) <= 2."""
    p = check_p(p, allow_six=True)
    return integral_I(p, balanced_t(p, 3)) / integral_I(p, 0.0)


def r_curve(p_grid: Iterable[float]) -> list[tuple[float, float]]:
    return [(float(p), r_value(p)) for p in p_grid]


def r_derivative(p: float) -> float:
    """Closed-form dR/dp, assembled from I and its log-weighted variant."""
    p = check_p(p, allow_six=True)
    e = (4.0 - p) / (p - 2.0)
    de = -2.0 / (p - 2.0) ** 2
    s0 = balanced_t(p, 3)
    ds0 = 9.0 * math.sqrt(p + 18.0) / (math.sqrt(p) * (p + 18.0) ** 2)
    top = integral_I(p, s0)
    full = integral_I(p, 0.0)
    d_top = -ds0 * (18.0 / (p + 18.0)) ** e + de * integral_I_log(p, s0, 1.0)
    d_full = de * integral_I_log(p, 0.0, 1.0)
    return (d_top * full - top * d_full) / full ** 2


@dataclass
class PhaseRow:
    p: float
    q: float
    N: int
    mu: float
    radial_energy: float = math.nan
    line_energy: float = math.nan
    margin: float = math.nan
    verdict: str = "error"
    boundary: bool = False
    error: str | None = field(default=None)

    COLUMNS = ("p", "q", "N", "mu", "radial_energy", "line_energy", "margin", "verdict",
               "boundary")


def _phase_cell(cell: tuple[float, float, int, float]) -> PhaseRow:
    p, q, N, mu = cell
    try:
        report = exists_ground_state(NonlinearParams(p, q), N, mu)
    except (DomainError, SearchFailure, ArithmeticError) as exc:
        log.warning("phase cell p=%s q=%s N=%s mu=%s failed: %s", p, q, N, mu, exc)
        return PhaseRow(p, q, N, mu, error=f"{type(exc).__name__}: {exc}")
    return PhaseRow(p, q, N, mu, report.radial_energy, report.line_energy, report.margin,
                    report.verdict.value, report.boundary)


def phase_diagram(params_grid: Sequence[NonlinearParams | tuple[float, float]],
                  N_list: Sequence[int], mu_grid: Sequence[float],
                  workers: int = 1) -> list[PhaseRow]:
    """One row per (p, q, N, mu) in grid order; failing cells are recorded, not raised."""
    cells = []
    for item in params_grid:
        p, q = (item.p, item.q) if isinstance(item, NonlinearParams) else item
        for N in N_list:
            for mu in mu_grid:
                cells.append((float(p), float(q), int(N), float(mu)))
    if workers <= 1:
        return [_phase_cell(c) for c in cells]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_phase_cell, cells, chunksize=max(1, len(cells) // (4 * workers))))
