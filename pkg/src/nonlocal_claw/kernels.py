"""Interaction kernels supported on ``[0, delta]``.

Two kinds of kernel are supported:

* :class:`PowerLaw` -- ``((1 + p) / delta**(1 + p)) * h**p``, with closed-form
  moments.
* :class:`Custom` -- an arbitrary nonnegative profile ``h -> omega(h)``
  normalised to unit mass. Moments use adaptive Gauss-Kronrod quadrature.

Kernels are immutable, so a kernel can be shared between runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import integrate

QUAD_ABS_TOL = 1e-12
QUAD_SUBDIVISIONS = 2 ** 16
NORMALIZATION_TOL = 1e-12
DYADIC_LEVELS = 60


class KernelError(ValueError):
    pass


class QuadratureError(KernelError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


def _quad(func, a: float, b: float, points=None) -> float:
    if b <= a:
        return 0.0
    with np.errstate(all="ignore"):
        value, err, *rest = integrate.quad(
            func, a, b, epsabs=QUAD_ABS_TOL, epsrel=0.0,
            limit=QUAD_SUBDIVISIONS, points=points, full_output=1)
    info = rest[1] if len(rest) > 1 else ""
    if not np.isfinite(value) or err > max(QUAD_ABS_TOL, 1e-10 * abs(value)) * 10:
        raise QuadratureError(f"quadrature on [{a}, {b}] failed: {info}", err)
    return float(value)


@dataclass(frozen=True)
class PowerLaw:
    p: float
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise KernelError(f"delta must be positive, got {self.delta}")
        if not self.p > -1:
            raise KernelError(f"power-law kernel needs p > -1, got {self.p}")

    @property
    def scale(self) -> float:
        return (1.0 + self.p) / self.delta ** (1.0 + self.p)

    def __call__(self, h):
        h = np.asarray(h, dtype=float)
        inside = (h > 0) & (h <= self.delta)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = self.scale * np.where(inside, h, 1.0) ** self.p
        return np.where(inside, val, 0.0)


@dataclass(frozen=True)
class Custom:
    """User-supplied kernel profile.

    ``evaluator`` takes the offset ``h`` (scalar) and returns ``omega(h)``.
    ``singular_at_zero`` marks profiles that are unbounded near the origin.
    """

    evaluator: Callable[[float], float]
    delta: float
    name: str = "custom"
    singular_at_zero: bool = False
    _mass: float = field(default=float("nan"), init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.delta > 0:
            raise KernelError(f"delta must be positive, got {self.delta}")
        mass = _custom_integral(self, lambda h: 1.0, 0.0, self.delta)
        if abs(mass - 1.0) > NORMALIZATION_TOL:
            raise KernelError(
                f"kernel {self.name!r} integrates to {mass!r}, not 1")
        object.__setattr__(self, "_mass", mass)

    def __call__(self, h):
        h = np.asarray(h, dtype=float)
        out = np.zeros_like(h)
        flat_h, flat_out = h.reshape(-1), out.reshape(-1)
        for i, hi in enumerate(flat_h):
            if 0 < hi <= self.delta:
                flat_out[i] = self.evaluator(float(hi))
        return out


KernelSpec = Union[PowerLaw, Custom]


def _custom_integral(k: Custom, weight, a: float, b: float) -> float:
    b = min(b, k.delta)
    a = max(a, 0.0)
    if b <= a:
        return 0.0

    def integrand(h):
        return weight(h) * k.evaluator(h) if 0 < h <= k.delta else 0.0

    return _quad(integrand, a, b)


def normalization_integral(k: KernelSpec) -> float:
    if isinstance(k, PowerLaw):
        return 1.0
    return _custom_integral(k, lambda h: 1.0, 0.0, k.delta)


def kernel_moment(k: KernelSpec, a: float, b: float,
                  alpha: float = 1.0, beta: float = 0.0) -> float:
    """Return the integral of ``(alpha + beta*h) * omega(h)`` over ``[a, b]``.

    The range is clipped to the kernel support ``[0, delta]``.
    """
    if not 0 <= a <= b:
        raise KernelError(f"need 0 <= a <= b, got a={a}, b={b}")
    b = min(b, k.delta)
    if b <= a:
        return 0.0
    if isinstance(k, PowerLaw):
        p, d = k.p, k.delta
        sa, sb = a / d, b / d
        m0 = sb ** (p + 1) - sa ** (p + 1)
        m1 = d * (p + 1) / (p + 2) * (sb ** (p + 2) - sa ** (p + 2))
        return alpha * m0 + beta * m1
    return _custom_integral(k, lambda h: alpha + beta * h, a, b)


def growth_condition_value(k: KernelSpec) -> Optional[float]:
    """Integral of ``omega(h) / h`` over ``(0, delta]``.

    Returns ``math.inf`` when the integral diverges and ``None`` when the
    dyadic Cauchy test on a custom kernel is inconclusive.
    """
    if isinstance(k, PowerLaw):
        if k.p <= 0:
            return math.inf
        return (1.0 + k.p) / (k.p * k.delta)

    pieces = []
    hi = k.delta
    for _ in range(DYADIC_LEVELS):
        lo = hi / 2
        pieces.append(_quad(lambda h: k.evaluator(h) / h, lo, hi))
        hi = lo
    pieces = np.array(pieces)
    total = float(pieces.sum())
    if pieces[-1] == 0.0 and np.all(pieces[-10:] == 0.0):
        return total
    tail = pieces[-10:]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = tail[1:] / tail[:-1]
    if np.all(np.isfinite(ratios)):
        rho = float(ratios.max())
        if rho < 1.0 - 1e-3:
            remainder = tail[-1] * rho / (1.0 - rho)
            if remainder <= 1e-10 * max(total, 1.0):
                return total + remainder
        if float(ratios.min()) >= 1.0 - 1e-6:
            return math.inf
    return None


def satisfies_growth_condition(k: KernelSpec) -> Optional[bool]:
    value = growth_condition_value(k)
    if value is None:
        return None
    return math.isfinite(value)


# {{{ named custom profiles

def _linear(delta):
    return lambda h: 2.0 * h / delta ** 2


def _uniform(delta):
    return lambda h: 1.0 / delta


def _parabolic(delta):
    # 6 h (delta - h) / delta^3
    return lambda h: 6.0 * h * (delta - h) / delta ** 3


def _inverse_sqrt(delta):
    return lambda h: 0.5 / math.sqrt(h * delta)


PROFILES = {
    "linear": (_linear, False),
    "uniform": (_uniform, False),
    "parabolic": (_parabolic, False),
    "inverse-sqrt": (_inverse_sqrt, True),
}


def custom_profile(name: str, delta: float) -> Custom:
    try:
        factory, singular = PROFILES[name]
    except KeyError:
        raise KernelError(
            f"unknown kernel profile {name!r}; known: {sorted(PROFILES)}") from None
    return Custom(factory(delta), delta, name=name, singular_at_zero=singular)

# }}}
