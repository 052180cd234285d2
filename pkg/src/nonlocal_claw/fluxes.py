"""Local fluxes, monotone two-point numerical fluxes and entropy fluxes.

All flux functions broadcast over numpy arrays.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

SAMPLE_POINTS = 1024
SAFETY = 1.05


@dataclass(frozen=True)
class LocalFlux:
    """A convex local flux ``f`` with derivative ``df``.

    ``sonic`` is the minimiser of ``f``; the Godunov and Engquist-Osher
    formulas below rely on convexity around it.
    """

    name: str
    f: Callable
    df: Callable
    sonic: float = 0.0
    analytic_bounds: bool = False


BURGERS = LocalFlux(
    name="burgers",
    f=lambda u: 0.5 * np.square(u),
    df=lambda u: np.asarray(u, dtype=float),
    sonic=0.0,
    analytic_bounds=True,
)


class Numerical(enum.Enum):
    GODUNOV = "godunov"
    ENGQUIST_OSHER = "engquist-osher"
    LAX_FRIEDRICHS = "lax-friedrichs"
    UPWIND = "upwind"
    DOWNWIND = "downwind"


@dataclass(frozen=True)
class FluxSpec:
    numerical: Numerical = Numerical.GODUNOV
    local: LocalFlux = BURGERS
    alpha: Optional[float] = None  # Lax-Friedrichs dissipation

    def __post_init__(self):
        if self.numerical is Numerical.LAX_FRIEDRICHS and self.alpha is None:
            raise ValueError("Lax-Friedrichs flux needs a dissipation coefficient alpha")

    def with_alpha(self, alpha: float) -> "FluxSpec":
        return FluxSpec(self.numerical, self.local, alpha)

    def __call__(self, u, v):
        return numerical_flux(self, u, v)


def local_flux(spec: FluxSpec, u):
    return spec.local.f(u)


def numerical_flux(spec: FluxSpec, u, v):
    f, s = spec.local.f, spec.local.sonic
    kind = spec.numerical
    if kind is Numerical.GODUNOV:
        return np.maximum(f(np.maximum(u, s)), f(np.minimum(v, s)))
    if kind is Numerical.ENGQUIST_OSHER:
        return f(np.maximum(u, s)) + f(np.minimum(v, s)) - f(s)
    if kind is Numerical.LAX_FRIEDRICHS:
        return 0.5 * (f(u) + f(v)) - 0.5 * spec.alpha * (np.asarray(v) - u)
    if kind is Numerical.UPWIND:
        return f(np.asarray(u, dtype=float)) + 0.0 * np.asarray(v)
    if kind is Numerical.DOWNWIND:
        return f(np.asarray(v, dtype=float)) + 0.0 * np.asarray(u)
    raise ValueError(kind)


def _derivative_extremes(spec: FluxSpec, m: float, M: float) -> Tuple[float, float]:
    df = spec.local.df
    if spec.local.analytic_bounds:
        # df is monotone for the convex fluxes we ship analytic bounds for
        return float(df(m)), float(df(M))
    vals = df(np.linspace(m, M, SAMPLE_POINTS))
    return float(vals.min()), float(vals.max())


def _sampled_partials(spec: FluxSpec, m: float, M: float, n: int = SAMPLE_POINTS):
    """Finite-difference suprema of d1 g and -d2 g over a sampled square."""
    if M == m:
        M = m + 1e-8
    grid = np.linspace(m, M, n)
    h = (M - m) / (n - 1)
    U, V = np.meshgrid(grid, grid, indexing="ij")
    g = numerical_flux(spec, U, V)
    d1 = np.diff(g, axis=0) / h
    d2 = np.diff(g, axis=1) / h
    return d1, d2


def cfl_coefficient(spec: FluxSpec, interval: Tuple[float, float]) -> float:
    """Upper bound ``B`` of ``sup d1 g - inf d2 g`` over states in ``interval``."""
    m, M = interval
    if m > M:
        raise ValueError(f"empty state interval [{m}, {M}]")
    if not spec.local.analytic_bounds:
        d1, d2 = _sampled_partials(spec, m, M)
        return SAFETY * (max(d1.max(), 0.0) + max(-d2.min(), 0.0))
    lo, hi = _derivative_extremes(spec, m, M)
    up, down = max(hi, 0.0), max(-lo, 0.0)
    kind = spec.numerical
    if kind in (Numerical.GODUNOV, Numerical.ENGQUIST_OSHER):
        return up + down
    if kind is Numerical.LAX_FRIEDRICHS:
        return up + down + spec.alpha
    if kind is Numerical.UPWIND:
        return max(abs(lo), abs(hi))
    return max(abs(lo), abs(hi))


def lipschitz_bound(spec: FluxSpec, interval: Tuple[float, float]) -> float:
    """``C`` with ``|g(u1,v1) - g(u2,v2)| <= C (|u1-u2| + |v1-v2|)`` on ``interval``."""
    m, M = interval
    if not spec.local.analytic_bounds:
        d1, d2 = _sampled_partials(spec, m, M)
        return SAFETY * max(np.abs(d1).max(), np.abs(d2).max())
    lo, hi = _derivative_extremes(spec, m, M)
    amax = max(abs(lo), abs(hi))
    if spec.numerical is Numerical.LAX_FRIEDRICHS:
        return 0.5 * (amax + abs(spec.alpha))
    return amax


def rusanov_alpha(spec: FluxSpec, interval: Tuple[float, float]) -> float:
    lo, hi = _derivative_extremes(spec, *interval)
    return max(abs(lo), abs(hi))


def monotonicity_violations(spec: FluxSpec, interval: Tuple[float, float],
                            n: int = 201, tol: float = 1e-12) -> int:
    """Count sampled pairs where ``g`` decreases in ``u`` or increases in ``v``."""
    d1, d2 = _sampled_partials(spec, interval[0], interval[1], n)
    scale = tol * max(1.0, np.abs(d1).max(), np.abs(d2).max())
    return int(np.count_nonzero(d1 < -scale) + np.count_nonzero(d2 > scale))


def is_consistent(spec: FluxSpec, interval: Tuple[float, float],
                  n: int = 1001, tol: float = 1e-14) -> bool:
    u = np.linspace(interval[0], interval[1], n)
    f = spec.local.f(u)
    return bool(np.all(np.abs(numerical_flux(spec, u, u) - f) <= tol * np.maximum(1.0, np.abs(f))))


def entropy_flux(spec: FluxSpec, a, b, c):
    """Kruzkov-type two-point entropy flux ``q(a, b; c)`` for ``|u - c|``."""
    return (numerical_flux(spec, np.maximum(a, c), np.maximum(b, c))
            - numerical_flux(spec, np.minimum(a, c), np.minimum(b, c)))


def entropy_flux_sign_form(spec: FluxSpec, a, b, c):
    """Sign-expression form of :func:`entropy_flux`.

    Agrees with the max/min form whenever ``a != c`` and ``b != c``.
    """
    sa, sb = np.sign(np.asarray(a) - c), np.sign(np.asarray(b) - c)
    g = lambda x, y: numerical_flux(spec, x, y)
    return sa * sb * (0.5 * (sa + sb) * (g(a, b) - g(c, c))
                      + 0.5 * (sa - sb) * (g(c, b) - g(a, c)))


def riemann_stationary(spec: FluxSpec, uL: float, uR: float, tol: float = 1e-14) -> bool:
    """Whether the step ``uL | uR`` is a stationary entropy solution of the nonlocal model.

    Requires ``f(uL) = f(uR) = g(uL, uR)``.
    """
    fL, fR = float(spec.local.f(uL)), float(spec.local.f(uR))
    g = float(numerical_flux(spec, uL, uR))
    return abs(fL - fR) <= tol and abs(g - fL) <= tol


def parse_flux(name: str, alpha: Optional[float] = None,
               local: LocalFlux = BURGERS) -> FluxSpec:
    try:
        kind = Numerical(name)
    except ValueError:
        known = ", ".join(k.value for k in Numerical)
        raise ValueError(f"unknown flux {name!r}; expected one of {known}") from None
    return FluxSpec(kind, local, alpha)
