"""Quadrature weight tables for the nonlocal flux sum."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .kernels import KernelSpec, kernel_moment

# absorbs representation error when delta is meant as an exact multiple of dx
FLOOR_EPS = 1e-12


class Order(enum.Enum):
    FIRST = "first"
    SECOND = "second"


@dataclass(frozen=True)
class WeightTable:
    """Weights for one ``(delta, dx)`` pair.

    For ``Order.FIRST`` ``w[k-1]`` holds ``W_k`` for ``k = 1..max(r, 1)``.
    For ``Order.SECOND`` ``w[k]`` holds ``W_k`` for ``k = 0..r+1``.
    """

    dx: float
    delta: float
    r: int
    order: Order
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def offsets(self) -> np.ndarray:
        """Stencil offsets ``k`` matching the entries of :attr:`w`."""
        if self.order is Order.FIRST:
            return np.arange(1, len(self.w) + 1)
        return np.arange(len(self.w))

    def rows(self):
        return list(zip(self.offsets.tolist(), self.w.tolist()))


def cells_in_horizon(delta: float, dx: float) -> int:
    if not dx > 0:
        raise ValueError(f"dx must be positive, got {dx}")
    return int(math.floor(delta / dx + FLOOR_EPS))


def build_first_order(k: KernelSpec, dx: float) -> WeightTable:
    r = cells_in_horizon(k.delta, dx)
    m = max(r, 1)
    w = np.empty(m)
    for i in range(1, m + 1):
        w[i - 1] = kernel_moment(k, (i - 1) * dx, i * dx)
    # tail [r*dx, delta] joins the last weight; for r = 0 it is already covered.
    # The floor guard may put r*dx a hair above delta, leaving no tail.
    if r >= 1 and k.delta > r * dx:
        w[r - 1] += kernel_moment(k, r * dx, k.delta)
    return WeightTable(dx=dx, delta=k.delta, r=r, order=Order.FIRST, w=w)


def build_second_order(k: KernelSpec, dx: float) -> WeightTable:
    r = cells_in_horizon(k.delta, dx)
    w = np.zeros(r + 2)
    # hat 0 on I_1: 1 - h/dx
    w[0] = kernel_moment(k, 0.0, dx, 1.0, -1.0 / dx)
    for i in range(1, r + 2):
        # rising edge on I_i, falling edge on I_{i+1}
        rise = kernel_moment(k, (i - 1) * dx, i * dx, -(i - 1.0), 1.0 / dx)
        fall = kernel_moment(k, i * dx, (i + 1) * dx, i + 1.0, -1.0 / dx)
        w[i] = rise + fall
    return WeightTable(dx=dx, delta=k.delta, r=r, order=Order.SECOND, w=w)


def local_table(dx: float) -> WeightTable:
    """Second-order table with all mass on the reconstructed term."""
    return WeightTable(dx=dx, delta=0.0, r=0, order=Order.SECOND,
                       w=np.array([1.0, 0.0]))
