"""Convergence studies and the five numerical experiments.

Each experiment starts from its preset (see :data:`config.PRESETS`), applies the
caller's overrides, runs, and writes CSV tables and snapshot files into an
output directory.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from . import output
from .config import ExperimentConfig, from_preset
from .diagnostics import ErrorTable, RunReport, l1_distance, restrict, track_extreme_jump
from .fluxes import Numerical, riemann_stationary
from .operators import BC, SchemeKind, StateField
from .stepping import BlowUpError, run

log = logging.getLogger(__name__)

EXPERIMENTS = (1, 2, 3, 4, 5)
EXP4_FLUXES = (Numerical.GODUNOV, Numerical.ENGQUIST_OSHER, Numerical.LAX_FRIEDRICHS)


def simulate(config: ExperimentConfig, n: Optional[int] = None, audit: bool = False) -> RunReport:
    n = n or config.n
    return run(config.initial_state(n), config.discretization(n), config.step_control(audit))


def _final_values(job):
    config, n = job
    return simulate(config, n).final.values


# {{{ convergence study

def reference_config(config: ExperimentConfig) -> ExperimentConfig:
    if config.reference == "local":
        return config.replace(scheme=SchemeKind.LOCAL_SECOND, delta=None, delta_cells=None)
    return config


def convergence_study(config: ExperimentConfig, n_list: Optional[Sequence[int]] = None,
                      workers: Optional[int] = None) -> ErrorTable:
    """L1 errors against a fine-grid reference, restricted by cell averaging.

    A blow-up at some resolution stops the table there; the rows computed so
    far are kept and the table is marked incomplete.
    """
    ns = list(n_list or config.n_list)
    if ns != sorted(ns) or len(set(ns)) != len(ns):
        raise ValueError(f"resolutions must be strictly ascending, got {ns}")
    n_ref = config.reference_n
    for n in ns:
        if n_ref % n:
            raise ValueError(f"n={n} does not divide the reference resolution {n_ref}")

    config = config.replace(snapshots=())
    ref_cfg = reference_config(config)
    jobs = [(ref_cfg, n_ref)] + [(config, n) for n in ns]
    workers = workers or config.workers
    kw = dict(scheme=config.scheme.value, n_ref=n_ref, same_physics=config.reference == "same")

    results: List[object] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_final_values, job) for job in jobs]
            for fut in futures:
                try:
                    results.append(fut.result())
                except BlowUpError as exc:
                    results.append(exc)
    else:
        for job in jobs:
            try:
                results.append(_final_values(job))
            except BlowUpError as exc:
                results.append(exc)
                break

    if isinstance(results[0], BlowUpError):
        return ErrorTable([], complete=False, failure=f"reference run: {results[0]}", **kw)
    ref = StateField(config.grid(n_ref), results[0])
    done_ns, errors, failure = [], [], None
    for n, res in zip(ns, results[1:]):
        if isinstance(res, BlowUpError):
            failure = f"n={n}: {res}"
            break
        coarse = config.grid(n)
        errors.append(l1_distance(StateField(coarse, res), restrict(ref, coarse)))
        done_ns.append(n)
    if failure is None and len(done_ns) < len(ns):
        failure = "incomplete"
    deltas = [config.horizon(n) if config.scheme is not SchemeKind.LOCAL_SECOND else None
              for n in done_ns]
    return ErrorTable.from_errors(done_ns, errors, deltas, complete=failure is None,
                                  failure=failure, **kw)

# }}}


@dataclass
class ExperimentResult:
    experiment: int
    tables: Dict[str, ErrorTable] = field(default_factory=dict)
    files: List[Path] = field(default_factory=list)
    summary: List[str] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)
    rows: list = field(default_factory=list)

    def save(self, out: Optional[Path], name: str, text: str):
        if out is not None:
            self.files.append(output.write_text(out / name, text))

    def add_table(self, out: Optional[Path], name: str, table: ErrorTable):
        self.tables[name] = table
        self.save(out, f"{name}.csv", output.table_csv(table))
        if not table.complete:
            self.failures.append(f"{name}: {table.failure}")
        self.summary.append(f"{name}: " + ", ".join(
            f"n={r.n} {r.error:.3e}" + ("" if r.ooc is None else f" ({r.ooc:.2f})")
            for r in table.rows))


def _tag(value: float) -> str:
    return f"{value:g}"


# {{{ experiments

def experiment1(overrides, out, workers) -> ExperimentResult:
    res = ExperimentResult(1)
    base = from_preset("experiment1", overrides)
    ps = [base.p] if "p" in overrides else [1.0, 0.0, -0.9]
    for p in ps:
        for scheme in (SchemeKind.SECOND, SchemeKind.FIRST):
            cfg = base.replace(p=p, scheme=scheme)
            res.add_table(out, f"exp1_p{_tag(p)}_{scheme.value}",
                          convergence_study(cfg, workers=workers))
    return res


def experiment2(overrides, out, workers) -> ExperimentResult:
    res = ExperimentResult(2)
    base = from_preset("experiment2", overrides)
    res.add_table(out, "exp2_nonlocal", convergence_study(base, workers=workers))
    local = base.replace(scheme=SchemeKind.LOCAL_SECOND, delta=None, delta_cells=None)
    res.add_table(out, "exp2_local", convergence_study(local, workers=workers))
    return res


EXP3_CASES = (("u02", (0.5,)), ("u03", (0.5, 1.5)))


def experiment3(overrides, out, workers) -> ExperimentResult:
    res = ExperimentResult(3)
    base = from_preset("experiment3", overrides)
    local = base.replace(scheme=SchemeKind.LOCAL_SECOND, delta=None, delta_cells=None)
    for datum, times in EXP3_CASES:
        for label, cfg in (("nonlocal", base), ("local", local)):
            cfg = cfg.replace(initial=datum, t_end=max(times), snapshots=times)
            report = simulate(cfg)
            for t in times:
                res.save(out, f"exp3_{datum}_{label}_t{_tag(t)}.dat",
                         output.snapshot_text(report.snapshots[t]))
            dx = cfg.grid().dx
            res.save(out, f"exp3_{datum}_{label}_gradient.csv", output.gradient_csv(report, dx))
            res.summary.append(
                f"{datum} {label}: max gradient " + ", ".join(
                    f"t={_tag(t)} {track_extreme_jump(report.snapshots[t])[1] / dx:.3f}"
                    for t in times))
    return res


@dataclass
class StationarityRow:
    flux: str
    criterion: bool
    max_deviation: float
    position_drift: float
    final_max_jump: float
    positions: List[float]


def riemann_study(config: ExperimentConfig, uL: float = 1.0, uR: float = -1.0):
    """Run the Riemann problem and measure how far the discontinuity moves."""
    report = simulate(config)
    u0 = config.initial_state()
    pos0 = track_extreme_jump(u0)[0]
    times = sorted(report.snapshots)
    positions = [track_extreme_jump(report.snapshots[t])[0] for t in times]
    final = report.final
    row = StationarityRow(
        flux=config.flux.value,
        criterion=riemann_stationary(config.flux_spec(), uL, uR),
        max_deviation=float(np.abs(final.values - u0.values).max()),
        position_drift=max((abs(p - pos0) for p in positions), default=0.0),
        final_max_jump=track_extreme_jump(final)[1],
        positions=positions,
    )
    return row, report


def experiment4(overrides, out, workers, fluxes=EXP4_FLUXES, tables=True) -> ExperimentResult:
    res = ExperimentResult(4)
    base = from_preset("experiment4", overrides)
    rows = []
    for fl in fluxes:
        cfg = base.replace(flux=fl)
        row, report = riemann_study(cfg)
        rows.append(row)
        for t, snap in sorted(report.snapshots.items()):
            res.save(out, f"exp4_riemann_{fl.value}_t{_tag(t)}.dat", output.snapshot_text(snap))
        local = cfg.replace(scheme=SchemeKind.LOCAL_SECOND, delta=None, delta_cells=None,
                            snapshots=())
        res.save(out, f"exp4_riemann_{fl.value}_local.dat",
                 output.snapshot_text(simulate(local).final))
        res.summary.append(
            f"{fl.value}: g(1,-1)=f(1) {'holds' if row.criterion else 'fails'}; "
            f"max deviation {row.max_deviation:.3e}; jump drift {row.position_drift:.3e}; "
            f"final max jump {row.final_max_jump:.3f}")
        if tables:
            sine = base.replace(flux=fl, initial="u02", bc=BC.PERIODIC, snapshots=())
            res.add_table(out, f"exp4_sine_{fl.value}", convergence_study(sine, workers=workers))
    text = output.csv_text(
        ("flux", "criterion", "max_deviation", "position_drift", "final_max_jump"),
        [(r.flux, str(r.criterion).lower(), output.number(r.max_deviation),
          output.number(r.position_drift), output.number(r.final_max_jump)) for r in rows])
    res.save(out, "exp4_stationarity.csv", text)
    res.rows.extend(rows)
    return res


def experiment5(overrides, out, workers) -> ExperimentResult:
    res = ExperimentResult(5)
    base = from_preset("experiment5", overrides)
    res.add_table(out, "exp5", convergence_study(base, workers=workers))
    return res

# }}}


def run_experiment(number: int, overrides: Optional[Mapping[str, str]] = None,
                   out: Optional[Path] = None, workers: Optional[int] = None,
                   fluxes: Optional[Sequence[Numerical]] = None) -> ExperimentResult:
    """Run experiment ``number`` (1 to 5) and write its files into ``out``."""
    overrides = dict(overrides or {})
    out = None if out is None else Path(out)
    if number == 4:
        return experiment4(overrides, out, workers, fluxes or EXP4_FLUXES)
    runners = {1: experiment1, 2: experiment2, 3: experiment3, 5: experiment5}
    if number not in runners:
        raise ValueError(f"unknown experiment {number}; expected one of {EXPERIMENTS}")
    if fluxes:
        overrides.setdefault("flux", fluxes[0].value)
    return runners[number](overrides, out, workers)
