"""Time stepping on the periodic grid and empirical amplification measurement."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from wavestab.core import (
    Field,
    Gaussian,
    Grid1D,
    InitialCondition,
    RandomIC,
    RunConfig,
    SchemeSpec,
    SineMode,
    Stencil,
    build_stencil,
    initial_field,
    l2_norm,
    linf_norm,
)
from wavestab.von_neumann import ModeSpec

OVERFLOW_GUARD = 1e100
GROWTH_WINDOW = 10


@dataclass
class SimulationRecord:
    """Norm history of one run.

    ``per_step_l2[m]`` is the l2 norm after ``m`` steps. When the run
    diverges at step ``diverged_at`` the histories end at that step.
    """

    config: RunConfig | None
    per_step_l2: np.ndarray
    per_step_linf: np.ndarray
    final_field: Field
    diverged_at: int | None = None
    growth_rate_estimate: float | None = None

    @property
    def l2_ratios(self) -> np.ndarray:
        l2 = self.per_step_l2
        with np.errstate(divide="ignore", invalid="ignore"):
            return l2[1:] / l2[:-1]


@dataclass
class ErrorEvolution:
    """Exact solution E, perturbed solution N and error eps after stepping.

    ``residual`` is linf(N - E - eps); it stays at round-off level because
    the error obeys the same linear update as the solution.
    """

    exact: Field
    perturbed: Field
    error: Field

    @property
    def residual(self) -> float:
        return linf_norm(self.perturbed.values - self.exact.values - self.error.values)


def apply_step(field: Field, stencil: Stencil) -> Field:
    """One explicit update out_i = sum_j c_j in_{(i+j) mod n}; returns a new Field."""
    u = field.values
    out = np.zeros_like(u)
    # overflow is reported through the divergence flag instead
    with np.errstate(over="ignore", invalid="ignore"):
        for j, c in zip(stencil.offsets, stencil.coeffs):
            out += c * np.roll(u, -j)
    diverged = field.diverged or not bool(np.all(np.isfinite(out)))
    return Field(out, field.time_level + 1, diverged)


def _growth_estimate(l2: np.ndarray) -> float | None:
    if l2.size < 2:
        return None
    window = min(GROWTH_WINDOW, l2.size - 1)
    first, last = l2[-1 - window], l2[-1]
    if first <= 0 or not math.isfinite(last):
        return None
    return float((last / first) ** (1.0 / window))


def _march(field: Field, stencil: Stencil, n_steps: int, config: RunConfig | None):
    l2 = [l2_norm(field)]
    linf = [linf_norm(field)]
    diverged_at = None
    for step in range(1, n_steps + 1):
        field = apply_step(field, stencil)
        norm = l2_norm(field) if field.is_finite() else math.inf
        if field.diverged or not norm <= OVERFLOW_GUARD:
            field.diverged = True
            diverged_at = step
            break
        l2.append(norm)
        linf.append(linf_norm(field))
    l2 = np.asarray(l2)
    return SimulationRecord(
        config=config,
        per_step_l2=l2,
        per_step_linf=np.asarray(linf),
        final_field=field,
        diverged_at=diverged_at,
        growth_rate_estimate=_growth_estimate(l2),
    )


def run_simulation(config: RunConfig, scheme: SchemeSpec) -> SimulationRecord:
    """Step ``config.ic`` forward ``config.n_steps`` times under ``scheme``.

    Runs that overflow (non-finite values or l2 above 1e100) stop early with
    ``diverged_at`` set; this is a recorded outcome, not an exception.
    """
    stencil = build_stencil(scheme, config.courant)
    return _march(initial_field(config.ic, config.grid), stencil, config.n_steps, config)


def evolve_error(seed_error: Field, stencil: Stencil, n_steps: int) -> SimulationRecord:
    """Propagate an error field with the same update as the solution."""
    if n_steps < 1:
        raise ValueError("n_steps must be positive")
    return _march(seed_error, stencil, n_steps, None)


def error_evolution(exact: Field, seed_error: Field, stencil: Stencil, n_steps: int) -> ErrorEvolution:
    """Step E, N = E + eps and eps side by side for ``n_steps`` steps."""
    perturbed = Field(exact.values + seed_error.values, exact.time_level)
    error = seed_error
    for _ in range(n_steps):
        exact = apply_step(exact, stencil)
        perturbed = apply_step(perturbed, stencil)
        error = apply_step(error, stencil)
    return ErrorEvolution(exact, perturbed, error)


def exact_solution(ic: InitialCondition, a: float, t: float, grid: Grid1D) -> Field:
    """Characteristic solution u0(x - a t) sampled at cell centres."""
    if isinstance(ic, RandomIC):
        raise ValueError("no analytic transport form for a RANDOM initial condition")
    if not isinstance(ic, (Gaussian, SineMode)):
        raise TypeError(f"unsupported initial condition {ic!r}")
    L = grid.length
    x = np.mod(grid.centers() - a * t, L)
    return Field(ic.profile(x, L))


def dft_coefficient(values: np.ndarray, n: int) -> complex:
    """(1/N) sum_i u_i exp(-2 pi i n i / N), by direct summation."""
    N = values.shape[0]
    idx = np.arange(N)
    return complex(np.sum(values * np.exp(-2j * np.pi * n * idx / N)) / N)


def mode_ratios(stencil: Stencil, mode: ModeSpec, n_steps: int = 1) -> np.ndarray:
    """Per-step ratios of the mode-``n`` Fourier coefficient, starting from cos(theta i)."""
    if not 1 <= mode.n <= mode.n_cells // 2 - 1:
        raise ValueError(f"mode index must lie in [1, {mode.n_cells // 2 - 1}], got {mode.n}")
    if n_steps < 1:
        raise ValueError("n_steps must be positive")
    field = Field(np.cos(mode.theta * np.arange(mode.n_cells)))
    before = dft_coefficient(field.values, mode.n)
    if before == 0:
        raise ValueError("initial Fourier coefficient is zero")
    floor = 1e-12 * abs(before)
    ratios = []
    for _ in range(n_steps):
        field = apply_step(field, stencil)
        after = dft_coefficient(field.values, mode.n)
        ratios.append(after / before)
        before = after
        # past this point the coefficient is round-off noise
        if abs(before) < floor:
            break
    return np.asarray(ratios)


def empirical_amplification(
    scheme: SchemeSpec,
    courant: float,
    mode: ModeSpec,
    n_cells: int | None = None,
    n_steps: int = 1,
) -> complex:
    """Measured one-step multiplier of a single Fourier mode.

    The first step's ratio is returned. With ``n_steps > 1`` the later
    ratios are checked against it and a RuntimeWarning is issued if they
    drift, which would mean the update is not linear and shift-invariant.
    """
    if n_cells is not None and n_cells != mode.n_cells:
        mode = ModeSpec(mode.n, n_cells, mode.dx)
    stencil = build_stencil(scheme, courant)
    ratios = mode_ratios(stencil, mode, n_steps)
    g = complex(ratios[0])
    drift = np.abs(ratios - g)
    if np.any(drift > 1e-8 * max(1.0, abs(g))):
        warnings.warn(
            f"per-step mode ratio drifts by up to {drift.max():.3e}", RuntimeWarning, stacklevel=2
        )
    return g
