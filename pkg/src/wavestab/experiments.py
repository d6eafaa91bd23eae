"""Reproducible studies built on the analysis and simulation layers.

Every function returns plain row objects; rendering is left to
:mod:`wavestab.cli`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from wavestab.core import (
    Grid1D,
    InitialCondition,
    RandomIC,
    Scheme,
    SchemeSpec,
    SineMode,
    build_stencil,
    initial_field,
    l2_norm,
    scheme_name,
)
from wavestab.simulate import apply_step, empirical_amplification, exact_solution
from wavestab.von_neumann import (
    N_SAMPLES,
    ModeSpec,
    Verdict,
    amplification_factor,
    classify_stability,
)

DEFAULT_TABLE1_SAMPLES = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5)
DEFAULT_SWEEP_GRID = tuple(round(0.1 * k, 10) for k in range(1, 21))
MODE_TOL = 1e-10


class Remark(enum.Enum):
    CFL_SATISFIED = "CFL criterion satisfied"
    UNCONDITIONALLY_UNSTABLE = "unconditionally unstable"
    DISCREPANCY = "discrepancy"


@dataclass(frozen=True)
class Table1Row:
    case_id: int
    time_scheme_label: str
    space_scheme_label: str
    remark: Remark
    scheme: Scheme
    stable_samples: tuple[float, ...] = ()

    def as_row(self) -> dict:
        return {
            "case": self.case_id,
            "time_derivative": self.time_scheme_label,
            "spatial_derivative": self.space_scheme_label,
            "scheme": self.scheme.cli_name,
            "remark": self.remark.value,
        }


def _remark_for(verdicts: dict[float, bool]) -> Remark:
    if not any(verdicts.values()):
        return Remark.UNCONDITIONALLY_UNSTABLE
    if all(stable == (c <= 1.0) for c, stable in verdicts.items()):
        return Remark.CFL_SATISFIED
    return Remark.DISCREPANCY


def reproduce_table1(
    c_samples: Sequence[float] = DEFAULT_TABLE1_SAMPLES, n_samples: int = N_SAMPLES
) -> list[Table1Row]:
    """Classify the four cases from the analytic theta sweep at each sample C.

    A case is "CFL criterion satisfied" when it is stable exactly on the
    samples with C <= 1, and "unconditionally unstable" when no sample is
    stable. Any other pattern yields a DISCREPANCY row instead of an
    exception, so the rest of the table is still available.
    """
    c_samples = [float(c) for c in c_samples]
    if not c_samples:
        raise ValueError("c_samples must be nonempty")
    if any(not 0 < c <= 2 for c in c_samples):
        raise ValueError("c_samples must lie in (0, 2]")
    rows = []
    for scheme in sorted(Scheme, key=lambda s: s.case_id):
        verdicts = {
            c: classify_stability(build_stencil(scheme, c), n_samples).stable for c in c_samples
        }
        rows.append(
            Table1Row(
                scheme.case_id,
                scheme.time_label,
                scheme.space_label,
                _remark_for(verdicts),
                scheme,
                tuple(c for c, ok in verdicts.items() if ok),
            )
        )
    return rows


@dataclass(frozen=True)
class SweepRow:
    scheme: str
    courant: float
    max_modulus: float
    worst_theta: float
    verdict: Verdict

    def as_row(self) -> dict:
        return {
            "scheme": self.scheme,
            "courant": self.courant,
            "max_modulus": self.max_modulus,
            "worst_theta": self.worst_theta,
            "verdict": self.verdict.value,
        }


def cfl_sweep(
    schemes: Iterable[SchemeSpec], c_grid: Sequence[float], n_samples: int = N_SAMPLES
) -> list[SweepRow]:
    """One row per (scheme, C), in input order."""
    c_grid = [float(c) for c in c_grid]
    if any(b < a for a, b in zip(c_grid, c_grid[1:])):
        raise ValueError("c_grid must be sorted ascending")
    rows = []
    for scheme in schemes:
        for c in c_grid:
            rep = classify_stability(build_stencil(scheme, c), n_samples)
            rows.append(
                SweepRow(scheme_name(scheme), c, rep.max_modulus, rep.worst_theta, rep.verdict)
            )
    return rows


@dataclass
class ConvergenceResult:
    scheme: str
    courant: float
    grid_sizes: list[int]
    errors: list[float]
    orders: list[float] = field(default_factory=list)
    final_time: float = 0.0

    def as_rows(self) -> list[dict]:
        rows = []
        for k, (n, err) in enumerate(zip(self.grid_sizes, self.errors)):
            rows.append(
                {
                    "scheme": self.scheme,
                    "courant": self.courant,
                    "cells": n,
                    "l2_error": err,
                    "observed_order": self.orders[k - 1] if k > 0 else "",
                }
            )
        return rows


def convergence_study(
    scheme: SchemeSpec,
    courant: float,
    base_n: int = 64,
    n_doublings: int = 3,
    final_time: float | None = None,
    ic: InitialCondition = SineMode(1),
    a: float = 1.0,
    length: float = 1.0,
) -> ConvergenceResult:
    """Grid-refinement study against the exact transported profile.

    Grids are ``base_n * 2**k`` for k = 0..n_doublings with C held fixed,
    so dt shrinks with dx. ``final_time`` defaults to half a domain
    crossing and must be a whole number of steps on the coarsest grid.
    """
    if isinstance(ic, RandomIC):
        raise ValueError("convergence needs an analytic initial condition")
    report = classify_stability(build_stencil(scheme, courant))
    if not report.stable:
        raise ValueError(
            f"{scheme_name(scheme)} is unstable at C={courant} (max |G| = {report.max_modulus:.6g})"
        )
    if final_time is None:
        final_time = 0.5 * length / abs(a)
    dt0 = courant * (length / base_n) / a
    steps0 = final_time / dt0 if dt0 else 0.0
    if dt0 <= 0 or abs(steps0 - round(steps0)) > 1e-9 * max(1.0, steps0):
        raise ValueError(
            f"final_time {final_time} is not a whole number of steps (dt = {dt0}) on the coarsest grid"
        )
    steps0 = int(round(steps0))

    stencil = build_stencil(scheme, courant)
    sizes, errors = [], []
    for k in range(n_doublings + 1):
        n = base_n * 2**k
        grid = Grid1D(n, length / n)
        u = initial_field(ic, grid)
        for _ in range(steps0 * 2**k):
            u = apply_step(u, stencil)
        exact = exact_solution(ic, a, final_time, grid)
        sizes.append(n)
        errors.append(l2_norm(u.values - exact.values))
    orders = []
    for e0, e1 in zip(errors, errors[1:]):
        orders.append(math.log2(e0 / e1) if e0 > 0 and e1 > 0 else math.nan)
    return ConvergenceResult(scheme_name(scheme), float(courant), sizes, errors, orders, final_time)


@dataclass(frozen=True)
class ModeRow:
    scheme: str
    courant: float
    n: int
    analytic: complex
    empirical: complex

    @property
    def abs_diff(self) -> float:
        return abs(self.analytic - self.empirical)

    @property
    def passed(self) -> bool:
        return self.abs_diff <= MODE_TOL

    def as_row(self) -> dict:
        return {
            "scheme": self.scheme,
            "courant": self.courant,
            "n": self.n,
            "analytic_re": self.analytic.real,
            "analytic_im": self.analytic.imag,
            "empirical_re": self.empirical.real,
            "empirical_im": self.empirical.imag,
            "abs_diff": self.abs_diff,
            "status": "PASS" if self.passed else "FAIL",
        }


def mode_validation(
    schemes: Iterable[SchemeSpec],
    c_list: Sequence[float],
    modes: Sequence[int],
    n_cells: int = 64,
) -> list[ModeRow]:
    """Compare the analytic G(theta_n) with the measured one-step mode ratio."""
    modes = [int(n) for n in modes]
    if any(not 1 <= n <= n_cells // 2 - 1 for n in modes):
        raise ValueError(f"modes must lie in [1, {n_cells // 2 - 1}]")
    rows = []
    for scheme in schemes:
        for c in c_list:
            stencil = build_stencil(scheme, c)
            for n in modes:
                mode = ModeSpec(n, n_cells)
                g = amplification_factor(stencil, mode.theta)
                emp = empirical_amplification(scheme, c, mode)
                rows.append(ModeRow(scheme_name(scheme), float(c), n, g, emp))
    return rows

