"""Explicit time integration with ``dt = lambda * dx``."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .diagnostics import (RunReport, StepRecord, harten_audit, total_variation,
                          track_extreme_jump)
from .fluxes import cfl_coefficient, lipschitz_bound
from .operators import Discretization, SchemeKind, StateField

log = logging.getLogger(__name__)

# Largest lambda * B for which the incremental-form coefficients of one forward
# Euler step provably satisfy both coefficient conditions with minmod slopes
# (slope ratio in [-1, 1]): A + B <= 1.5 lambda B, E + F <= lambda B.
CFL_LIMITS = {
    SchemeKind.FIRST: 1.0,
    SchemeKind.LOCAL_SECOND: 2.0 / 3.0,
    SchemeKind.SECOND: 0.4,
}

LANDING_TOL = 1e-9


class CFLMode(enum.Enum):
    WARN = "warn"
    ENFORCE = "enforce"
    OFF = "off"


class Integrator(enum.Enum):
    EULER = "euler"
    SSPRK2 = "ssprk2"


class BlowUpError(FloatingPointError):
    def __init__(self, step: int, cell: int, time: float):
        super().__init__(f"non-finite value at step {step}, cell {cell} (t={time:.6g})")
        self.step, self.cell, self.time = step, cell, time


class CFLViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class StepControl:
    lam: float
    t_end: float
    cfl_mode: CFLMode = CFLMode.WARN
    integrator: Integrator = Integrator.SSPRK2
    output_times: Sequence[float] = ()
    audit: bool = False

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")


def _finite_or_raise(values: np.ndarray, step: int, time: float) -> np.ndarray:
    bad = ~np.isfinite(values)
    if bad.any():
        raise BlowUpError(step, int(np.argmax(bad)), time)
    return values


def step_forward_euler(u: StateField, op: Callable, dt: float, step: int = 0) -> StateField:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    with np.errstate(all="ignore"):
        new = u.values - dt * op(u.values)
    return StateField(u.grid, _finite_or_raise(new, step, u.time + dt), u.time + dt)


def step_ssprk2(u: StateField, op: Callable, dt: float, step: int = 0) -> StateField:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    with np.errstate(all="ignore"):
        u1 = _finite_or_raise(u.values - dt * op(u.values), step, u.time + dt)
        u2 = _finite_or_raise(u1 - dt * op(u1), step, u.time + dt)
        new = 0.5 * (u.values + u2)
    return StateField(u.grid, new, u.time + dt)


def cfl_number(disc: Discretization, lam: float, interval) -> float:
    return lam * cfl_coefficient(disc.flux, interval)


def time_levels(dt: float, t_end: float, output_times: Sequence[float] = ()):
    """Yield ``(t_old, t_new)`` pairs; steps shorten to land on every target."""
    targets = sorted({float(t) for t in output_times if 0 < t < t_end} | {float(t_end)})
    t = 0.0
    for target in targets:
        while t < target:
            if target - t <= dt * (1 + LANDING_TOL):
                yield t, target
                t = target
            else:
                yield t, t + dt
                t = t + dt


def _record(step: int, old: StateField, new: StateField) -> StepRecord:
    v = new.values
    return StepRecord(step, new.time, total_variation(new), float(v.min()), float(v.max()),
                      new.mass, float(new.grid.dx * np.abs(v - old.values).sum()),
                      track_extreme_jump(new)[1])


def run(u0: StateField, disc: Discretization, control: StepControl) -> RunReport:
    grid = u0.grid
    dt = control.lam * grid.dx
    interval = (float(u0.values.min()), float(u0.values.max()))
    number = cfl_number(disc, control.lam, interval)
    limit = CFL_LIMITS[disc.kind]
    warnings = []
    if number > limit * (1 + 1e-12):
        msg = (f"lambda*B = {number:.4g} exceeds the sufficient bound {limit:.4g} "
               f"for the {disc.kind.value} scheme")
        if control.cfl_mode is CFLMode.ENFORCE:
            raise CFLViolation(msg)
        if control.cfl_mode is CFLMode.WARN:
            log.warning(msg)
            warnings.append(msg)

    stepper = step_ssprk2 if control.integrator is Integrator.SSPRK2 else step_forward_euler
    series = [_record(0, u0, u0)]
    snapshots = {}
    wanted = {float(t) for t in control.output_times}
    if 0.0 in wanted:
        snapshots[0.0] = u0
    audits = []
    u = u0
    for step, (t_old, t_new) in enumerate(time_levels(dt, control.t_end, control.output_times), 1):
        h = t_new - t_old
        if control.audit:
            audits.append(harten_audit(u, disc, h))
        if control.audit and control.integrator is Integrator.SSPRK2:
            mid = step_forward_euler(u, disc, h, step)
            audits.append(harten_audit(mid, disc, h))
        new = stepper(u, disc, h, step)
        new = StateField(grid, new.values, t_new)
        series.append(_record(step, u, new))
        u = new
        if t_new in wanted:
            snapshots[t_new] = u
    if control.t_end in wanted or control.t_end == 0.0:
        snapshots.setdefault(control.t_end, u)

    report = RunReport(series=series, final=u, audits=audits, snapshots=snapshots,
                       cfl_number=number, cfl_limit=limit, warnings=warnings)
    report.l1_continuity_bound = 4.0 * lipschitz_bound(disc.flux, interval) * series[0].tv
    log.debug("L1 rate %.4g vs bound %.4g", report.max_l1_rate, report.l1_continuity_bound)
    return report
