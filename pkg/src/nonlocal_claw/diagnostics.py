"""Norms, error tables, convergence rates and scheme audits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .fluxes import numerical_flux
from .operators import BC, Discretization, Grid1D, SchemeKind, StateField, pad
from .reconstruction import reconstruct
from .weights import Order


def total_variation(u: StateField) -> float:
    v = u.values
    tv = float(np.abs(np.diff(v)).sum())
    if u.grid.bc is BC.PERIODIC:
        tv += abs(float(v[0] - v[-1]))
    return tv


def _same_grid(u: StateField, v: StateField):
    gu, gv = u.grid, v.grid
    if gu.n != gv.n or not (np.isclose(gu.a, gv.a) and np.isclose(gu.b, gv.b)):
        raise ValueError("fields live on different grids")


def l1_distance(u: StateField, v: StateField) -> float:
    _same_grid(u, v)
    return float(u.grid.dx * np.abs(u.values - v.values).sum())


def restrict(fine: StateField, coarse: Grid1D) -> StateField:
    """Average nested fine cells onto ``coarse``."""
    g = fine.grid
    if not (np.isclose(g.a, coarse.a) and np.isclose(g.b, coarse.b)):
        raise ValueError("restriction needs the same domain")
    if g.n % coarse.n:
        raise ValueError(f"coarse n={coarse.n} does not divide fine n={g.n}")
    ratio = g.n // coarse.n
    return StateField(coarse, fine.values.reshape(coarse.n, ratio).mean(axis=1), fine.time)


def track_extreme_jump(u: StateField):
    """Interface position and size of the largest jump between neighbouring cells."""
    jumps = np.abs(np.diff(u.values))
    i = int(np.argmax(jumps))  # first occurrence, i.e. leftmost
    return float(u.grid.interfaces[i + 1]), float(jumps[i])


def observed_orders(errors: Sequence[float]) -> List[Optional[float]]:
    """``log2(e_n / e_2n)`` for consecutive rows; the first entry is ``None``."""
    out: List[Optional[float]] = [None]
    for coarse, fine in zip(errors[:-1], errors[1:]):
        if coarse > 0 and fine > 0:
            out.append(math.log2(coarse / fine))
        else:
            out.append(None)
    return out


@dataclass
class ErrorRow:
    n: int
    error: float
    ooc: Optional[float]
    delta: Optional[float] = None


@dataclass
class ErrorTable:
    rows: List[ErrorRow]
    scheme: str = ""
    n_ref: int = 0
    same_physics: bool = True
    complete: bool = True
    failure: Optional[str] = None

    @property
    def errors(self) -> List[float]:
        return [r.error for r in self.rows]

    @property
    def orders(self) -> List[Optional[float]]:
        return [r.ooc for r in self.rows]

    @classmethod
    def from_errors(cls, ns, errors, deltas=None, **kw) -> "ErrorTable":
        deltas = deltas if deltas is not None else [None] * len(ns)
        rows = [ErrorRow(n, e, o, d) for n, e, o, d in
                zip(ns, errors, observed_orders(errors), deltas)]
        return cls(rows, **kw)


# {{{ incremental-form audit

@dataclass
class HartenAudit:
    """Worst-case margins of the incremental-form coefficient conditions.

    ``linf_margin`` is ``1 - max_j [(A + B) W_0 + sum_k (C + D) W_k / k]``;
    ``tv_margin`` is ``1 - max_i (A + B + E + F)`` at interface ``i``, with
    ``E`` and ``F`` the largest telescoped coefficient landing on ``i``
    (``A`` and ``B`` drop out when ``W_0 = 0``).
    """

    linf_margin: float
    tv_margin: float
    min_coefficient: float
    degenerate: int
    residual: float
    tol: float = 1e-12

    @property
    def passed(self) -> bool:
        return (self.linf_margin >= -self.tol and self.tv_margin >= -self.tol
                and self.min_coefficient >= -self.tol)

    @property
    def identity_holds(self) -> bool:
        return self.residual <= 1e-11


def _divided(num, den, thresh):
    bad = np.abs(den) < thresh
    safe = np.where(bad, 1.0, den)
    return np.where(bad, 0.0, num / safe), int(np.count_nonzero(bad))


def harten_audit(u: StateField, disc: Discretization, dt: float) -> HartenAudit:
    """Rewrite one forward Euler step in incremental form and check the coefficients."""
    grid, flux = u.grid, disc.flux
    n, dx = grid.n, grid.dx
    lam = dt / dx
    g = lambda a, b: numerical_flux(flux, a, b)

    if disc.kind is SchemeKind.LOCAL_SECOND:
        w0, ks, wk = 1.0, np.zeros(0, dtype=int), np.zeros(0)
    elif disc.weights.order is Order.FIRST:
        w0, ks, wk = 0.0, disc.weights.offsets, disc.weights.w
    else:
        w0, ks, wk = disc.weights.w[0], disc.weights.offsets[1:], disc.weights.w[1:]
    keep = wk != 0.0
    ks, wk = ks[keep], wk[keep]
    kmax = int(ks.max()) if ks.size else 0

    width = max(kmax, 1) + 2
    U = pad(u.values, grid.bc, width)
    thresh = 1e-13 * max(1.0, float(np.abs(u.values).max()))
    degenerate = 0
    coeffs = []

    # interfaces i + 1/2 for i = -1 .. n-1 (index 0 is the left boundary)
    ci = width - 1 + np.arange(n + 1)
    du = U[ci + 1] - U[ci]

    faces = reconstruct(U[width - 2:width + n + 2], ghost=1, limiter=disc.limiter)
    up, um = faces.plus, faces.minus          # cells -1 .. n
    gstar = g(up, um)                         # g(u_j^+, u_j^-)
    gface = g(up[:-1], um[1:])                # interfaces -1/2 .. n-1/2
    A, d1 = _divided(-lam * (gface - gstar[:-1]), du, thresh)
    B, d2 = _divided(lam * (gstar[1:] - gface), du, thresh)
    degenerate += d1 + d2
    coeffs += [A, B]

    j = width + np.arange(n)
    uj = U[j]
    gjj = g(uj, uj)
    linf = (A[1:] + B[:-1]) * w0
    # reassemble the update from incremental form I alongside
    incr = (A[1:] * du[1:] - B[:-1] * du[:-1]) * w0
    for k, wkk in zip(ks, wk):
        dr, dl = U[j + k] - uj, uj - U[j - k]
        C, d1 = _divided(-lam * (g(uj, U[j + k]) - gjj), dr, thresh)
        D, d2 = _divided(lam * (gjj - g(U[j - k], uj)), dl, thresh)
        degenerate += d1 + d2
        coeffs += [C, D]
        linf = linf + (C + D) * wkk / k
        incr = incr + (C * dr - D * dl) * wkk / k

    # telescoped coefficients per interface, worst case over contributing pairs
    Emax = np.zeros(n + 1)
    Fmax = np.zeros(n + 1)
    for l in ks:
        E, d1 = _divided(-lam * (g(U[ci - l + 1], U[ci + 1]) - g(U[ci - l + 1], U[ci])), du, thresh)
        F, d2 = _divided(lam * (g(U[ci + 1], U[ci + l]) - g(U[ci], U[ci + l])), du, thresh)
        degenerate += d1 + d2
        coeffs += [E, F]
        Emax = np.maximum(Emax, E)
        Fmax = np.maximum(Fmax, F)
    tv = ((A + B) * (w0 > 0) + Emax + Fmax)[1:]

    actual = -dt * disc(u.values)
    residual = float(np.abs(incr - actual).max())

    return HartenAudit(
        linf_margin=float(1.0 - linf.max()),
        tv_margin=float(1.0 - tv.max()),
        min_coefficient=float(min(c.min() for c in coeffs)),
        degenerate=degenerate,
        residual=residual,
    )

# }}}


# {{{ run records

@dataclass
class StepRecord:
    step: int
    time: float
    tv: float
    min: float
    max: float
    mass: float
    l1_change: float
    max_jump: float = 0.0


@dataclass
class RunReport:
    series: List[StepRecord]
    final: StateField
    audits: List[HartenAudit] = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)
    cfl_number: float = float("nan")
    cfl_limit: float = float("nan")
    l1_continuity_bound: float = float("nan")
    warnings: List[str] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.series) - 1

    @property
    def audits_passed(self) -> bool:
        return all(a.passed for a in self.audits)

    @property
    def max_l1_rate(self) -> float:
        """Largest observed ``dx * sum |u^{n+1} - u^n| / dt``."""
        rates = [(b.l1_change / (b.time - a.time)) for a, b in zip(self.series[:-1], self.series[1:])
                 if b.time > a.time]
        return max(rates, default=0.0)

# }}}
