"""Von Neumann stability analysis of one-step explicit stencils.

A Fourier error mode exp(i k x) is multiplied each step by the
amplification factor G(theta) = sum_j c_j exp(i j theta), theta = k dx.
The update is stable when |G(theta)| <= 1 for every theta in [0, pi];
negative angles need no separate check because real weights give
G(-theta) = conj(G(theta)).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from wavestab.core import Scheme, SchemeSpec, Stencil, build_stencil

TOL_STAB = 1e-12
N_SAMPLES = 4096
C_PROBE_MAX = 4.0
TIE_TOL = 1e-12

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class Verdict(enum.Enum):
    STABLE = "STABLE"
    UNSTABLE = "UNSTABLE"


@dataclass(frozen=True)
class ModeSpec:
    """Discrete Fourier mode ``n`` on a periodic grid of ``n_cells`` cells."""

    n: int
    n_cells: int
    dx: float = 1.0

    def __post_init__(self):
        if not 0 <= self.n <= self.n_cells // 2:
            raise ValueError(f"mode index must lie in [0, {self.n_cells // 2}], got {self.n}")

    @property
    def theta(self) -> float:
        return 2.0 * math.pi * self.n / self.n_cells

    @property
    def wavenumber(self) -> float:
        return self.theta / self.dx


@dataclass(frozen=True)
class StabilityReport:
    scheme: SchemeSpec | None
    courant: float
    max_modulus: float
    worst_theta: float
    verdict: Verdict

    @property
    def stable(self) -> bool:
        return self.verdict is Verdict.STABLE


def amplification_factor(stencil: Stencil, theta):
    """G(theta) = sum_j c_j exp(i j theta); vectorised over ``theta``."""
    th = np.asarray(theta, dtype=float)
    g = np.zeros(th.shape, dtype=complex)
    for j, c in zip(stencil.offsets, stencil.coeffs):
        g = g + c * np.exp(1j * j * th)
    return complex(g) if g.ndim == 0 else g


def _golden_max(f: Callable[[float], float], a: float, b: float, xtol: float = 1e-13):
    """Maximise a unimodal ``f`` on [a, b]; returns (x, f(x))."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > xtol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def max_amplification(stencil: Stencil, n_samples: int = N_SAMPLES) -> tuple[float, float]:
    """Largest |G| over [0, pi] and the smallest angle attaining it.

    The angle range is sampled uniformly (both endpoints included). An
    interior peak is then polished by golden-section search between the
    neighbouring samples, so a maximum falling between samples (theta = pi/2
    on an even sample count) is not underestimated. The polished value is
    kept only if it beats the samples by more than the 1e-12 tie tolerance.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    thetas = np.linspace(0.0, math.pi, n_samples)
    mods = np.abs(amplification_factor(stencil, thetas))
    best = float(mods.max())
    idx = int(np.argmax(mods >= best - TIE_TOL))
    worst_theta = float(thetas[idx])

    if 0 < idx < n_samples - 1:
        theta_r, mod_r = _golden_max(
            lambda t: abs(amplification_factor(stencil, t)), thetas[idx - 1], thetas[idx + 1]
        )
        if mod_r > best + TIE_TOL:
            best, worst_theta = float(mod_r), float(theta_r)
    return best, worst_theta


def classify_stability(stencil: Stencil, n_samples: int = N_SAMPLES) -> StabilityReport:
    """STABLE iff max |G| <= 1 + 1e-12."""
    max_mod, theta = max_amplification(stencil, n_samples)
    verdict = Verdict.STABLE if max_mod <= 1.0 + TOL_STAB else Verdict.UNSTABLE
    return StabilityReport(stencil.scheme, stencil.courant, max_mod, theta, verdict)


def _is_stable(scheme: SchemeSpec, courant: float, n_samples: int) -> bool:
    return classify_stability(build_stencil(scheme, courant), n_samples).stable


def _bisect_edge(scheme, stable_c, unstable_c, tol, n_samples):
    while abs(unstable_c - stable_c) > tol:
        mid = 0.5 * (stable_c + unstable_c)
        if _is_stable(scheme, mid, n_samples):
            stable_c = mid
        else:
            unstable_c = mid
    return stable_c


def critical_courant(
    scheme: SchemeSpec,
    c_lo: float = 1e-6,
    c_hi: float = C_PROBE_MAX,
    tol: float = 1e-6,
    n_samples: int = N_SAMPLES,
) -> float | None:
    """Largest stable Courant number in [c_lo, c_hi], resolved to ``tol``.

    Assumes the stable set is an interval containing 0. Returns None when
    no stable C can be resolved above ``c_lo``: either ``c_lo`` itself is
    unstable, or the stable range ends less than ``tol`` beyond it (FTCS
    counts as stable for C below about 1.4e-6 only because of the 1e-12
    round-off allowance).
    """
    if not 0 < c_lo < c_hi:
        raise ValueError("need 0 < c_lo < c_hi")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not _is_stable(scheme, c_lo, n_samples):
        return None
    if _is_stable(scheme, c_hi, n_samples):
        return c_hi
    edge = _bisect_edge(scheme, c_lo, c_hi, tol, n_samples)
    if edge - c_lo < tol:
        return None
    return edge


def stability_interval(
    scheme: SchemeSpec,
    c_probe_max: float = C_PROBE_MAX,
    tol: float = 1e-6,
    n_samples: int = N_SAMPLES,
) -> tuple[float, float]:
    """Maximal interval of signed C around 0 on which the scheme is stable."""
    if c_probe_max <= 0:
        raise ValueError("c_probe_max must be positive")
    if not _is_stable(scheme, 0.0, n_samples):
        raise ValueError("scheme is unstable at C = 0; no stability interval around 0")
    edges = []
    for end in (-c_probe_max, c_probe_max):
        if _is_stable(scheme, end, n_samples):
            edges.append(end)
        else:
            edges.append(_bisect_edge(scheme, 0.0, end, tol, n_samples))
    return edges[0], edges[1]


# -- corner substitution --------------------------------------------------------
#
# Each named scheme's stability condition is |z(xi1, xi2, C)| <= 1 where z is
# the amplification factor written with xi1 = exp(i k dx), xi2 = exp(-i k dx).
# Condition "a" is z <= 1, condition "b" is z >= -1, each evaluated at one
# fixed corner assignment of xi1/xi2 to +-1.

_HALF = Fraction(1, 2)

_Z = {
    Scheme.LAX_CD: lambda x1, x2, C: _HALF * (-C * (x1 - x2) + (x1 + x2)),
    Scheme.FT_CS: lambda x1, x2, C: -_HALF * C * (x1 - x2) + 1,
    Scheme.FT_FS: lambda x1, x2, C: -C * (x1 - 1) + 1,
    Scheme.FT_BS: lambda x1, x2, C: -C * (1 - x2) + 1,
}

# (condition label, relation, corner as ((symbol, value), ...))
_CORNERS = {
    Scheme.LAX_CD: (("a", "<=", (("xi1", -1), ("xi2", 1))), ("b", ">=", (("xi1", 1), ("xi2", -1)))),
    Scheme.FT_CS: (("a", "<=", (("xi1", -1), ("xi2", 1))), ("b", ">=", (("xi1", 1), ("xi2", -1)))),
    Scheme.FT_FS: (("a", "<=", (("xi1", -1),)), ("b", ">=", (("xi1", 1),))),
    Scheme.FT_BS: (("a", "<=", (("xi2", 1),)), ("b", ">=", (("xi2", -1),))),
}


class BoundKind(enum.Enum):
    UPPER = "<="
    LOWER = ">="
    TRIVIAL = "TRIVIAL"
    INFEASIBLE = "INFEASIBLE"


class JointVerdict(enum.Enum):
    CFL_BOUND = "CFL_BOUND"
    UNSATISFIABLE_FOR_POSITIVE_C = "UNSATISFIABLE_FOR_POSITIVE_C"
    TRIVIAL = "TRIVIAL"


@dataclass(frozen=True)
class CornerCondition:
    label: str
    relation: str
    corner: tuple[tuple[str, int], ...]
    kind: BoundKind
    bound: Fraction | None = None

    def corner_text(self) -> str:
        return ", ".join(f"{name}={value:+d}" for name, value in self.corner)

    def inequality_text(self) -> str:
        rhs = "1" if self.relation == "<=" else "-1"
        return f"z {self.relation} {rhs}"

    def bound_text(self) -> str:
        if self.kind in (BoundKind.UPPER, BoundKind.LOWER):
            return f"C {self.kind.value} {_frac_text(self.bound)}"
        return self.kind.value

    def holds(self, courant: float) -> bool:
        if self.kind is BoundKind.UPPER:
            return courant <= self.bound
        if self.kind is BoundKind.LOWER:
            return courant >= self.bound
        return self.kind is BoundKind.TRIVIAL


def _frac_text(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{float(q):g}"


@dataclass(frozen=True)
class CornerCheckResult:
    scheme: Scheme
    courant: float
    conditions: tuple[CornerCondition, ...]
    joint_verdict: JointVerdict
    c_max: float | None = None

    @property
    def admits(self) -> bool:
        """Whether ``courant`` satisfies every corner condition literally."""
        return all(c.holds(self.courant) for c in self.conditions)

    def predicts_stable(self, courant: float) -> bool:
        """Stability predicted by the joint verdict for a positive C."""
        if self.joint_verdict is JointVerdict.TRIVIAL:
            return True
        if self.joint_verdict is JointVerdict.UNSATISFIABLE_FOR_POSITIVE_C:
            return False
        return courant > 0 and (self.c_max is None or courant <= self.c_max)


def _solve_linear(relation: str, alpha: Fraction, beta: Fraction):
    # alpha + beta*C <= 1   or   alpha + beta*C >= -1
    rhs = (1 - alpha) if relation == "<=" else (-1 - alpha)
    if beta == 0:
        ok = (0 <= rhs) if relation == "<=" else (0 >= rhs)
        return (BoundKind.TRIVIAL if ok else BoundKind.INFEASIBLE), None
    bound = rhs / beta
    upper = (relation == "<=") == (beta > 0)
    return (BoundKind.UPPER if upper else BoundKind.LOWER), bound


def corner_check(scheme: SchemeSpec, courant: float = 1.0) -> CornerCheckResult:
    """Substitute the +-1 corner values of xi1/xi2 into the scheme's
    modulus condition and read off each resulting bound on C.

    The corners are taken as independent values, exactly as in the
    classical hand derivation, even though xi2 = conj(xi1) on the unit
    circle. The theta sweep in :func:`classify_stability` stays the
    reference answer.
    """
    if not isinstance(scheme, Scheme):
        raise ValueError("corner_check only covers the four named schemes")
    z = _Z[scheme]
    conditions = []
    for label, relation, corner in _CORNERS[scheme]:
        xi = dict(corner)
        x1, x2 = Fraction(xi.get("xi1", 0)), Fraction(xi.get("xi2", 0))
        alpha = z(x1, x2, Fraction(0))
        beta = z(x1, x2, Fraction(1)) - alpha
        kind, bound = _solve_linear(relation, alpha, beta)
        conditions.append(CornerCondition(label, relation, corner, kind, bound))

    uppers = [c.bound for c in conditions if c.kind is BoundKind.UPPER]
    lowers = [c.bound for c in conditions if c.kind is BoundKind.LOWER]
    c_max = min(uppers) if uppers else None
    c_min = max(lowers) if lowers else Fraction(0)
    if any(c.kind is BoundKind.INFEASIBLE for c in conditions):
        joint = JointVerdict.UNSATISFIABLE_FOR_POSITIVE_C
    elif c_max is None and not lowers:
        joint = JointVerdict.TRIVIAL
    elif c_max is not None and c_max <= max(c_min, 0):
        joint = JointVerdict.UNSATISFIABLE_FOR_POSITIVE_C
    else:
        joint = JointVerdict.CFL_BOUND
    return CornerCheckResult(
        scheme,
        float(courant),
        tuple(conditions),
        joint,
        float(c_max) if joint is JointVerdict.CFL_BOUND and c_max is not None else None,
    )
