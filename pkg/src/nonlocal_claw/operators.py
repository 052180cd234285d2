"""Grids, ghost cells and the spatial operators ``L(u)``.

Every operator returns ``L(u)`` such that the semi-discrete scheme reads
``du/dt + L(u) = 0``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .fluxes import FluxSpec, numerical_flux
from .reconstruction import minmod, reconstruct
from .weights import Order, WeightTable


class BC(enum.Enum):
    PERIODIC = "periodic"
    OUTFLOW = "outflow"


@dataclass(frozen=True)
class Grid1D:
    a: float
    b: float
    n: int
    bc: BC = BC.PERIODIC

    def __post_init__(self):
        if self.n < 4:
            raise ValueError(f"grid needs at least 4 cells, got {self.n}")
        if not self.b > self.a:
            raise ValueError(f"empty domain [{self.a}, {self.b}]")

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.n

    @property
    def centers(self) -> np.ndarray:
        return self.a + (np.arange(self.n) + 0.5) * self.dx

    @property
    def interfaces(self) -> np.ndarray:
        return self.a + np.arange(self.n + 1) * self.dx

    def with_n(self, n: int) -> "Grid1D":
        return Grid1D(self.a, self.b, n, self.bc)


@dataclass(frozen=True)
class StateField:
    grid: Grid1D
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("state contains non-finite entries")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def mass(self) -> float:
        return float(self.values.sum() * self.grid.dx)


def pad(values: np.ndarray, bc: BC, width: int) -> np.ndarray:
    """Extend ``values`` by ``width`` ghost cells on each side."""
    if width == 0:
        return np.asarray(values, dtype=float)
    mode = "wrap" if bc is BC.PERIODIC else "edge"
    return np.pad(values, width, mode=mode)


# 5-point Gauss-Legendre rule on [-1, 1]
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)


def initial_average(u0: Callable, grid: Grid1D) -> StateField:
    """Cell averages of ``u0`` (vectorised in ``x``) by Gauss-Legendre quadrature."""
    x = grid.centers[:, None] + 0.5 * grid.dx * _GL_NODES[None, :]
    vals = np.asarray(u0(x), dtype=float) * np.ones_like(x)
    return StateField(grid, 0.5 * vals @ _GL_WEIGHTS, 0.0)


class ContractError(ValueError):
    pass


def _check(weights: WeightTable, order: Order, dx: float):
    if weights.order is not order:
        raise ContractError(f"operator needs a {order.value}-order weight table")
    if not np.isclose(weights.dx, dx, rtol=1e-12, atol=0.0):
        raise ContractError(f"weight table built for dx={weights.dx}, grid has dx={dx}")


def _pair_sum(padded: np.ndarray, w: int, n: int, flux: FluxSpec,
              ks: np.ndarray, wk: np.ndarray) -> np.ndarray:
    """``sum_k (g(u_j, u_{j+k}) - g(u_{j-k}, u_j)) / k * W_k`` for the interior."""
    keep = wk != 0.0
    ks, wk = ks[keep], wk[keep]
    if ks.size == 0:
        return np.zeros(n)
    j = w + np.arange(n)
    u = padded[j][None, :]
    right = padded[j[None, :] + ks[:, None]]
    left = padded[j[None, :] - ks[:, None]]
    diff = numerical_flux(flux, u, right) - numerical_flux(flux, left, u)
    return (wk / ks) @ diff


def apply_nonlocal_first_order(u: StateField, weights: WeightTable, flux: FluxSpec) -> np.ndarray:
    grid = u.grid
    _check(weights, Order.FIRST, grid.dx)
    w = len(weights.w)
    padded = pad(u.values, grid.bc, w)
    return _pair_sum(padded, w, grid.n, flux, weights.offsets, weights.w) / grid.dx


def ghost_width(weights: WeightTable) -> int:
    if weights.order is Order.FIRST:
        return len(weights.w)
    return weights.r + 2


def _interface_fluxes(padded: np.ndarray, w: int, n: int, flux: FluxSpec,
                      limiter: Callable) -> np.ndarray:
    """``g(u_j^+, u_{j+1}^-)`` for interfaces ``j = -1 .. n-1``."""
    # faces for cells -1 .. n, each with one neighbour on both sides
    faces = reconstruct(padded[w - 2:w + n + 2], ghost=1, limiter=limiter)
    return numerical_flux(flux, faces.plus[:-1], faces.minus[1:])


def apply_nonlocal_second_order(u: StateField, weights: WeightTable, flux: FluxSpec,
                                limiter: Callable = minmod) -> np.ndarray:
    grid = u.grid
    _check(weights, Order.SECOND, grid.dx)
    w = ghost_width(weights)
    padded = pad(u.values, grid.bc, w)
    n = grid.n
    out = np.zeros(n)
    if weights.w[0] != 0.0:
        gi = _interface_fluxes(padded, w, n, flux, limiter)
        out += (gi[1:] - gi[:-1]) * weights.w[0]
    out += _pair_sum(padded, w, n, flux, weights.offsets[1:], weights.w[1:])
    return out / grid.dx


def apply_local_second_order(u: StateField, flux: FluxSpec,
                             limiter: Callable = minmod) -> np.ndarray:
    grid = u.grid
    padded = pad(u.values, grid.bc, 2)
    gi = _interface_fluxes(padded, 2, grid.n, flux, limiter)
    return (gi[1:] - gi[:-1]) / grid.dx


class SchemeKind(enum.Enum):
    FIRST = "first"
    SECOND = "second"
    LOCAL_SECOND = "local-second"


@dataclass(frozen=True)
class Discretization:
    """A spatial operator bound to its grid, weights, flux and limiter."""

    kind: SchemeKind
    grid: Grid1D
    flux: FluxSpec
    weights: WeightTable | None = None
    limiter: Callable = field(default=minmod)

    def __post_init__(self):
        if self.kind is not SchemeKind.LOCAL_SECOND and self.weights is None:
            raise ContractError(f"{self.kind.value} scheme needs a weight table")

    def __call__(self, values: np.ndarray) -> np.ndarray:
        u = StateField(self.grid, values)
        if self.kind is SchemeKind.FIRST:
            return apply_nonlocal_first_order(u, self.weights, self.flux)
        if self.kind is SchemeKind.SECOND:
            return apply_nonlocal_second_order(u, self.weights, self.flux, self.limiter)
        return apply_local_second_order(u, self.flux, self.limiter)

    @property
    def reach(self) -> int:
        """Cells on each side that influence ``L(u)_j``."""
        if self.kind is SchemeKind.LOCAL_SECOND:
            return 2
        return ghost_width(self.weights)
