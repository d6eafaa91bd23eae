"""Grids, fields, stencils and run configuration for the 1D advection schemes.

Every update in this package has the explicit one-step form

    u_i^{m+1} = sum_j c_j * u_{i+j}^m

on a uniform periodic grid, with the weights c_j depending only on the
Courant number C = a * dt / dx.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

DEFAULT_SEED = 20180401
DEFAULT_RANDOM_AMPLITUDE = 1e-10
CONSISTENCY_TOL = 1e-12


class ConsistencyWarning(UserWarning):
    """Stencil weights do not sum to one (the update is not consistent)."""


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid with ``n_cells`` cells of width ``dx``."""

    n_cells: int
    dx: float = 1.0

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 3:
            raise ValueError(f"n_cells must be an integer >= 3, got {self.n_cells!r}")
        if not (math.isfinite(self.dx) and self.dx > 0):
            raise ValueError(f"dx must be positive and finite, got {self.dx!r}")

    @property
    def length(self) -> float:
        return self.n_cells * self.dx

    def centers(self) -> np.ndarray:
        """Cell-center coordinates ``(i + 0.5) * dx``."""
        return (np.arange(self.n_cells) + 0.5) * self.dx


@dataclass
class Field:
    """Solution samples at one time level.

    ``values`` is the only mutable part; the stepper always returns a new
    Field rather than writing into an existing one.
    """

    values: np.ndarray
    time_level: int = 0
    diverged: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise ValueError("field values must be one-dimensional")
        if self.time_level < 0:
            raise ValueError("time_level must be non-negative")

    @property
    def n_cells(self) -> int:
        return self.values.shape[0]

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))


class Scheme(enum.Enum):
    """The four discretizations of u_t + a u_x = 0 (cases 1-4)."""

    LAX_CD = "lax"
    FT_CS = "ftcs"
    FT_FS = "ftfs"
    FT_BS = "ftbs"

    @property
    def case_id(self) -> int:
        return _CASES[self][0]

    @property
    def time_label(self) -> str:
        return _CASES[self][1]

    @property
    def space_label(self) -> str:
        return _CASES[self][2]

    @property
    def cli_name(self) -> str:
        return self.value

    @classmethod
    def from_name(cls, name: str) -> "Scheme":
        key = name.strip().lower()
        for scheme in cls:
            if key in (scheme.value, scheme.name.lower()):
                return scheme
        choices = ", ".join(s.value for s in cls)
        raise ValueError(f"unknown scheme {name!r} (expected one of: {choices})")


# case number, time-derivative label, space-derivative label
_CASES = {
    Scheme.LAX_CD: (1, "LD", "CD"),
    Scheme.FT_CS: (2, "FD", "CD"),
    Scheme.FT_FS: (3, "FD", "FD"),
    Scheme.FT_BS: (4, "FD", "RD"),
}


@dataclass(frozen=True)
class CustomScheme:
    """User-supplied stencil family: fixed offsets, weights as a function of C."""

    offsets: tuple[int, ...]
    coeff_fn: Callable[[float], Sequence[float]]
    name: str = "custom"

    @property
    def cli_name(self) -> str:
        return self.name


SchemeSpec = Union[Scheme, CustomScheme]


def scheme_name(scheme: SchemeSpec) -> str:
    return scheme.cli_name


@dataclass(frozen=True)
class Stencil:
    """Offsets and weights of one explicit update at a given Courant number."""

    offsets: tuple[int, ...]
    coeffs: tuple[float, ...]
    courant: float
    scheme: SchemeSpec | None = None

    def __post_init__(self):
        if len(self.offsets) != len(self.coeffs):
            raise ValueError(
                f"offsets and coeffs differ in length ({len(self.offsets)} != {len(self.coeffs)})"
            )
        if len(set(self.offsets)) != len(self.offsets):
            raise ValueError(f"duplicate offsets in {list(self.offsets)}")
        if not all(math.isfinite(c) for c in self.coeffs):
            raise ValueError("stencil coefficients must be finite")

    def coeff(self, offset: int) -> float:
        """Weight at ``offset``; zero for offsets the stencil does not touch."""
        try:
            return self.coeffs[self.offsets.index(offset)]
        except ValueError:
            return 0.0

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.offsets, self.coeffs))

    @property
    def coeff_sum(self) -> float:
        return math.fsum(self.coeffs)

    @property
    def is_consistent(self) -> bool:
        return abs(self.coeff_sum - 1.0) <= CONSISTENCY_TOL


def _check_courant(courant: float) -> float:
    courant = float(courant)
    if not math.isfinite(courant):
        raise ValueError(f"Courant number must be finite, got {courant!r}")
    return courant


def build_stencil(scheme: SchemeSpec, courant: float) -> Stencil:
    """Update weights for ``scheme`` at Courant number ``courant``.

    For the named schemes one weight is formed as one minus the others so
    that the weights sum to one up to a single rounding.
    """
    C = _check_courant(courant)
    if isinstance(scheme, CustomScheme):
        return custom_stencil(scheme.offsets, scheme.coeff_fn(C), C, scheme=scheme)
    if scheme is Scheme.LAX_CD:
        right = (1.0 - C) / 2.0
        offsets, coeffs = (-1, 1), (1.0 - right, right)
    elif scheme is Scheme.FT_CS:
        offsets, coeffs = (-1, 0, 1), (C / 2.0, 1.0, -C / 2.0)
    elif scheme is Scheme.FT_FS:
        offsets, coeffs = (0, 1), (1.0 + C, -C)
    elif scheme is Scheme.FT_BS:
        offsets, coeffs = (-1, 0), (C, 1.0 - C)
    else:
        raise TypeError(f"not a scheme: {scheme!r}")
    return Stencil(offsets, coeffs, C, scheme)


def custom_stencil(
    offsets: Sequence[int],
    coeffs: Sequence[float],
    courant: float,
    scheme: SchemeSpec | None = None,
) -> Stencil:
    """Wrap arbitrary weights as a Stencil.

    Inconsistent weights (sum differs from one by more than 1e-12) are
    accepted with a :class:`ConsistencyWarning`.
    """
    offsets = tuple(int(j) for j in offsets)
    coeffs = tuple(float(c) for c in coeffs)
    stencil = Stencil(offsets, coeffs, _check_courant(courant), scheme)
    if not stencil.is_consistent:
        warnings.warn(
            f"stencil weights sum to {stencil.coeff_sum!r}, not 1",
            ConsistencyWarning,
            stacklevel=2,
        )
    return stencil


def _values(field: Field | np.ndarray) -> np.ndarray:
    return field.values if isinstance(field, Field) else np.asarray(field, dtype=float)


def l2_norm(field: Field | np.ndarray) -> float:
    """Grid-averaged l2 norm, sqrt(mean(u**2))."""
    v = _values(field)
    scale = np.max(np.abs(v)) if v.size else 0.0
    if scale == 0 or not np.isfinite(scale):
        return float(scale)
    # scaled to avoid under/overflow in the squares
    w = v / scale
    return float(scale * np.sqrt(np.mean(w * w)))


def linf_norm(field: Field | np.ndarray) -> float:
    v = _values(field)
    return float(np.max(np.abs(v))) if v.size else 0.0


# -- initial conditions -------------------------------------------------------


@dataclass(frozen=True)
class Gaussian:
    """Periodic Gaussian bump centred at 0.5 L with width 0.05 L."""

    center_frac: float = 0.5
    width_frac: float = 0.05

    def profile(self, x: np.ndarray, length: float) -> np.ndarray:
        center = self.center_frac * length
        sigma = self.width_frac * length
        # signed periodic distance to the centre
        d = np.mod(x - center + 0.5 * length, length) - 0.5 * length
        return np.exp(-0.5 * (d / sigma) ** 2)


@dataclass(frozen=True)
class SineMode:
    """Single Fourier mode cos(2 pi n x / L)."""

    n: int = 1

    def profile(self, x: np.ndarray, length: float) -> np.ndarray:
        return np.cos(2.0 * np.pi * self.n * x / length)


@dataclass(frozen=True)
class RandomIC:
    """Uniform noise in [-amplitude, amplitude]; models a seeded round-off error."""

    amplitude: float = DEFAULT_RANDOM_AMPLITUDE
    seed: int = DEFAULT_SEED


InitialCondition = Union[Gaussian, SineMode, RandomIC]


def initial_field(ic: InitialCondition, grid: Grid1D) -> Field:
    """Sample ``ic`` at the cell centres of ``grid``."""
    if isinstance(ic, RandomIC):
        rng = np.random.default_rng(ic.seed)
        return Field(ic.amplitude * rng.uniform(-1.0, 1.0, grid.n_cells))
    return Field(ic.profile(grid.centers(), grid.length))


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one simulation; the time step is always derived from C."""

    a: float = 1.0
    dx: float = 0.01
    courant: float = 0.5
    n_cells: int = 100
    n_steps: int = 100
    ic: InitialCondition = field(default_factory=Gaussian)

    def __post_init__(self):
        if not math.isfinite(self.a) or self.a == 0:
            raise ValueError(f"advection speed a must be finite and nonzero, got {self.a!r}")
        _check_courant(self.courant)
        if self.courant != 0 and (self.courant > 0) != (self.a > 0):
            raise ValueError("Courant number and advection speed must share a sign (dt > 0)")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be positive, got {self.n_steps!r}")
        Grid1D(self.n_cells, self.dx)

    @property
    def dt(self) -> float:
        return self.courant * self.dx / self.a

    @property
    def grid(self) -> Grid1D:
        return Grid1D(self.n_cells, self.dx)
