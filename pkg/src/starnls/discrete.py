"""Brute-force discretisation of the star-graph energy.

Each half-line is truncated to [0, L] with nodes x_k = k dx, a homogeneous
Dirichlet condition at x = L, and a single shared vertex node.  Integrals use
the trapezoidal rule, derivatives forward differences, so the discrete energy
is second-order accurate for smooth fields.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, TextIO

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from .params import DomainError, NonlinearParams, check_edges, check_positive
from .soliton import soliton_value
from .stationary import StationaryState

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridSpec:
    N: int
    L: float
    dx: float

    def __post_init__(self):
        object.__setattr__(self, "N", check_edges(self.N))
        check_positive("L", self.L)
        check_positive("dx", self.dx)
        cells = self.L / self.dx
        if abs(cells - round(cells)) > 1e-9 * cells:
            raise DomainError(f"L/dx = {cells!r} must be an integer")

    @property
    def cells(self) -> int:
        return int(round(self.L / self.dx))

    @property
    def nodes_per_edge(self) -> int:
        return self.cells + 1

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.nodes_per_edge) * self.dx

    def tail_ok(self, omega_ref: float) -> bool:
        """Whether L >= 20/sqrt(omega_ref), i.e. the soliton tail is below ~1e-8 at L."""
        return self.L >= 20.0 / math.sqrt(omega_ref)

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.nodes_per_edge, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        return w


@dataclass
class DiscreteField:
    """Node values, shape (N, L/dx + 1); column 0 is the shared vertex."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.N, self.grid.nodes_per_edge):
            raise DomainError(f"field shape {values.shape} does not match the grid")
        if not np.all(np.isfinite(values)):
            raise DomainError("field values must be finite")
        if np.any(values[:, 0] != values[0, 0]):
            raise DomainError("field is discontinuous at the vertex")
        self.values = values

    @property
    def vertex(self) -> float:
        return float(self.values[0, 0])

    def edge_masses(self) -> np.ndarray:
        return (self.values ** 2) @ self.grid.trapezoid_weights()

    def scaled(self, factor: float) -> "DiscreteField":
        return DiscreteField(self.grid, factor * self.values)

    def to_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream)
        writer.writerow(["edge", "node", "x", "value"])
        x = self.grid.x
        for i, row in enumerate(self.values):
            for k, (xk, v) in enumerate(zip(x, row)):
                writer.writerow([i, k, repr(float(xk)), repr(float(v))])


def sample_field(grid: GridSpec, edge_functions: Callable[[np.ndarray], np.ndarray]) -> DiscreteField:
    """Field from a callable mapping node positions to an (N, n) array."""
    return DiscreteField(grid, np.asarray(edge_functions(grid.x), dtype=float))


def sample_soliton_on_edge(grid: GridSpec, p: float, omega: float, center: float,
                           edge: int = 0) -> DiscreteField:
    """Line soliton centred at distance ``center`` along one edge; the other
    edges only share its (tiny) vertex value."""
    if not 0 <= edge < grid.N:
        raise DomainError(f"edge index {edge!r} outside 0..{grid.N - 1}")
    values = np.zeros((grid.N, grid.nodes_per_edge))
    values[edge] = soliton_value(p, omega, grid.x - center)
    values[:, 0] = values[edge, 0]
    return DiscreteField(grid, values)


def sample_stationary(state: StationaryState, grid: GridSpec) -> DiscreteField:
    if state.n_edges != grid.N:
        raise DomainError("state and grid disagree on the number of edges")
    values = state.profile(grid.x)
    values[:, 0] = state.vertex_value
    return DiscreteField(grid, values)


def kinetic_integral(field: DiscreteField) -> float:
    """Discrete ||u'||_2^2 from forward differences."""
    diffs = np.diff(field.values, axis=1)
    return float(np.sum(diffs ** 2) / field.grid.dx)


def discrete_energy(field: DiscreteField, params: NonlinearParams) -> float:
    w = field.grid.trapezoid_weights()
    potential = np.sum(np.abs(field.values) ** params.p @ w)
    return (0.5 * kinetic_integral(field) - potential / params.p
            - abs(field.vertex) ** params.q / params.q)


def discrete_mass(field: DiscreteField) -> float:
    return float(np.sum(field.edge_masses()))


def renormalize(field: DiscreteField, mu: float) -> DiscreteField:
    mu = check_positive("mu", mu)
    mass = discrete_mass(field)
    if mass <= 0:
        raise DomainError("the zero field cannot be renormalised")
    return field.scaled(math.sqrt(mu / mass))


def gn_coercivity_bound(params: NonlinearParams, mu: float, kinetic: float) -> float:
    """Lower bound on the energy from the Gagliardo-Nirenberg inequalities.

    ``kinetic`` is ||u'||_2 (the norm, not its square).  The constant in front
    of the p-term is 1, from ||u||_p^p <= ||u||_inf^(p-2) mu and
    ||u||_inf^2 <= ||u||_2 ||u'||_2.
    """
    if kinetic < 0:
        raise DomainError("kinetic norm must be non-negative")
    p, q = params.p, params.q
    return (0.5 * kinetic ** 2 - mu ** ((p + 2) / 4) * kinetic ** (p / 2 - 1) / p
            - mu ** (q / 4) * kinetic ** (q / 2) / q)


class _StarOperator:
    """Unknowns: vertex value followed by the interior nodes of each edge.

    The node at x = L is pinned to zero.
    """

    def __init__(self, grid: GridSpec):
        self.grid = grid
        N, M, dx = grid.N, grid.cells, grid.dx
        self.inner = M - 1
        self.size = 1 + N * self.inner
        # difference operator: row (i, k) gives u_{k+1} - u_k on edge i, k = 0..M-1
        rows, cols, vals = [], [], []
        for i in range(N):
            base = 1 + i * self.inner
            for k in range(M):
                r = i * M + k
                left = 0 if k == 0 else base + k - 1
                rows.append(r); cols.append(left); vals.append(-1.0)
                if k < M - 1:
                    rows.append(r); cols.append(base + k); vals.append(1.0)
        diff = sparse.csr_matrix((vals, (rows, cols)), shape=(N * M, self.size))
        self.stiffness = (diff.T @ diff / dx).tocsc()
        self.weights = np.full(self.size, dx)
        self.weights[0] = 0.5 * dx * N
        self.set_shift(1.0)

    def set_shift(self, shift: float) -> None:
        """Use K + shift * W as the inner product; shift ~ omega conditions best."""
        self.shift = shift
        precond = self.stiffness + shift * sparse.diags(self.weights)
        self._solve = splinalg.factorized(precond.tocsc())

    def multiplier(self, v, params: NonlinearParams) -> float:
        """Lagrange multiplier estimate omega = -<E'(v), v> / mass."""
        return -float(self.gradient(v, params) @ v) / self.mass(v)

    def pack(self, field: DiscreteField) -> np.ndarray:
        return np.concatenate([[field.vertex], field.values[:, 1:-1].ravel()])

    def unpack(self, v: np.ndarray) -> DiscreteField:
        values = np.zeros((self.grid.N, self.grid.nodes_per_edge))
        values[:, 0] = v[0]
        values[:, 1:-1] = v[1:].reshape(self.grid.N, self.inner)
        return DiscreteField(self.grid, values)

    def mass(self, v):
        return float(self.weights @ v ** 2)

    def kinetic(self, v):
        return float(v @ (self.stiffness @ v))

    def energy(self, v, params: NonlinearParams):
        return (0.5 * self.kinetic(v) - self.weights @ np.abs(v) ** params.p / params.p
                - abs(v[0]) ** params.q / params.q)

    def gradient(self, v, params: NonlinearParams):
        g = self.stiffness @ v - self.weights * np.abs(v) ** (params.p - 2) * v
        g[0] -= abs(v[0]) ** (params.q - 2) * v[0]
        return g

    def descent(self, v, params: NonlinearParams):
        """H^1 gradient projected onto the tangent space of the mass sphere at v.

        The projection uses the H^1 inner product, so the direction is a
        descent direction for the energy composed with rescaling.
        """
        d = self._solve(self.gradient(v, params))
        z = self._solve(self.weights * v)
        return d - (self.weights * v) @ d / ((self.weights * v) @ z) * z


@dataclass
class MinimizeResult:
    field: DiscreteField
    energy: float
    iterations: int
    converged: bool
    energies: list[float] = field(default_factory=list)
    kinetic_norms: list[float] = field(default_factory=list)


def minimize(params: NonlinearParams, grid: GridSpec, mu: float, init: DiscreteField,
             max_iter: int = 5000, tol: float = 1e-10) -> MinimizeResult:
    """Projected H^1-gradient descent on the discrete energy at fixed mass.

    Each step moves along the Sobolev gradient restricted to the tangent space
    of the mass sphere, with the length halved until the energy decreases, and
    is followed by rescaling to mass ``mu``.
    Stops once the relative energy decrease falls below ``tol``.
    """
    mu = check_positive("mu", mu)
    op = _StarOperator(grid)
    v = op.pack(init)
    if op.mass(v) <= 0:
        raise DomainError("initial field has zero mass")
    v *= math.sqrt(mu / op.mass(v))
    energy = op.energy(v, params)
    energies = [energy]
    kinetic_norms = [math.sqrt(op.kinetic(v))]
    step = 1.0
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        omega = op.multiplier(v, params)
        if omega > 0 and not 0.5 < omega / op.shift < 2.0:
            op.set_shift(omega)
        direction = op.descent(v, params)
        accepted = False
        for _ in range(60):
            trial = v - step * direction
            trial *= math.sqrt(mu / op.mass(trial))
            trial_energy = op.energy(trial, params)
            if trial_energy < energy:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            # no representable decrease left along the gradient
            converged = True
            break
        decrease = energy - trial_energy
        v, energy = trial, trial_energy
        energies.append(energy)
        kinetic_norms.append(math.sqrt(op.kinetic(v)))
        step *= 2.0
        if decrease <= tol * abs(energy):
            converged = True
            break
    if not converged:
        log.info("minimize stopped after %d iterations without meeting tol=%g", iterations, tol)
    return MinimizeResult(op.unpack(v), energy, iterations, converged, energies, kinetic_norms)


def edge_centroid(field: DiscreteField, edge: int) -> float:
    """Mass-weighted mean distance from the vertex along one edge."""
    w = field.grid.trapezoid_weights() * field.values[edge] ** 2
    return float(w @ field.grid.x / w.sum())
