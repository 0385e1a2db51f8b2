"""Exponent pairs, regimes and the error hierarchy shared by every module."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

BALANCE_TOL = 1e-12


class DomainError(ValueError):
    """Input outside the admissible parameter window."""


class RegimeError(DomainError):
    """Operation undefined in the requested nonlinearity regime."""


class NoThresholdError(DomainError):
    """No critical mass exists for the requested graph (e.g. N = 2)."""


class InfeasiblePairError(DomainError):
    """No soliton piece carries the requested (mass, endpoint value) pair."""

    def __init__(self, message: str, bracket: tuple[float, float] | None = None,
                 edge: int | None = None):
        super().__init__(message)
        self.bracket = bracket
        self.edge = edge


class SearchFailure(RuntimeError):
    """A bracketing search left its configured bounds."""

    def __init__(self, message: str, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class Regime(str, Enum):
    WEAK_VERTEX = "weak_vertex"
    BALANCED = "balanced"
    STRONG_VERTEX = "strong_vertex"


def check_p(p: float, *, allow_six: bool = False) -> float:
    p = float(p)
    upper_ok = p <= 6.0 if allow_six else p < 6.0
    if not (math.isfinite(p) and p > 2.0 and upper_ok):
        window = "(2, 6]" if allow_six else "(2, 6)"
        raise DomainError(f"exponent p={p!r} outside the admissible window {window}")
    return p


def check_positive(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0.0):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")
    return value


def check_edges(n_edges: int) -> int:
    if int(n_edges) != n_edges or n_edges < 2:
        raise DomainError(f"star graph needs an integer N >= 2 half-lines, got {n_edges!r}")
    return int(n_edges)


@dataclass(frozen=True)
class NonlinearParams:
    """Standard-nonlinearity power ``p`` in (2, 6) and vertex power ``q`` in (2, 4)."""

    p: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "p", check_p(self.p))
        q = float(self.q)
        if not (math.isfinite(q) and 2.0 < q < 4.0):
            raise DomainError(f"vertex exponent q={q!r} outside the admissible window (2, 4)")
        object.__setattr__(self, "q", q)

    @classmethod
    def balanced(cls, p: float) -> "NonlinearParams":
        return cls(p, p / 2 + 1)

    @property
    def alpha(self) -> float:
        return 2.0 / (6.0 - self.p)

    @property
    def beta(self) -> float:
        return (self.p - 2.0) / (6.0 - self.p)

    @property
    def energy_exponent(self) -> float:
        """Power of the mass in the line ground-state energy, 2*beta + 1."""
        return (self.p + 2.0) / (6.0 - self.p)

    @property
    def regime(self) -> Regime:
        gap = self.q - (self.p / 2 + 1)
        if abs(gap) <= BALANCE_TOL:
            return Regime.BALANCED
        return Regime.WEAK_VERTEX if gap < 0 else Regime.STRONG_VERTEX
