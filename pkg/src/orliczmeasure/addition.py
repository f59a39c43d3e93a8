"""Orlicz addition of functions and measures.

The sum of values ``v_1, ..., v_m`` under a compositor ``phi`` is the
unique ``lam > 0`` with ``phi(v_1/lam, ..., v_m/lam) = 1`` (zero when
all values vanish in the increasing case). The map ``lam -> phi(v/lam)``
is strictly monotone, so a sign-checked bisection bracket contains
exactly one root:

* upper bracket ``lam_hi = tau0^-1 * sum(v)`` from the diagonal bound,
* lower bracket found by halving ``lam_hi`` until the residual changes
  side (at most 200 halvings; failure to flip means the compositor
  violates its class limit axioms).

Separable power compositors route through the compiled kernel; any
other compositor is solved by the same bisection driven through its
vectorized evaluation.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DomainViolationError,
    InvalidParameterError,
    NumericalFailureError,
)
from .gauges import CompositorClass, MonotoneCompositor, tau0
from .spaces import DensityField, Measure, Positivity

__all__ = [
    "RESIDUAL_TOL",
    "orlicz_add_pointwise",
    "orlicz_add_field",
    "orlicz_add_measure",
    "solve_values",
    "DiscrepancyReport",
    "ConvergenceReport",
    "check_homogeneity",
    "check_monotone_bound",
    "check_convergence",
]

RESIDUAL_TOL = 1e-12
_MAX_ITER = 200


@functools.lru_cache(maxsize=512)
def _tau0_cached(phi: MonotoneCompositor) -> float:
    return tau0(phi)


def _validate_values(phi: MonotoneCompositor, vals: np.ndarray) -> None:
    if not np.all(np.isfinite(vals)):
        raise DomainViolationError("input values must be finite")
    if phi.klass is CompositorClass.PSI:
        if np.any(vals <= 0):
            raise DomainViolationError(
                "decreasing-class addition requires strictly positive values")
    elif np.any(vals < 0):
        raise DomainViolationError("values must be nonnegative")


def _generic_bisect(phi: MonotoneCompositor, vals: np.ndarray, t0: float) -> np.ndarray:
    """Vectorized monotone bisection through ``phi.evaluate``."""
    is_psi = phi.klass is CompositorClass.PSI
    m, n = vals.shape
    lam = np.zeros(n)
    sums = vals.sum(axis=0)
    active = np.ones(n, dtype=bool) if is_psi else sums > 0.0
    if not np.any(active):
        return lam
    sub = vals[:, active]

    def g(lamv: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", divide="ignore"):
            return np.asarray(phi.evaluate(sub / lamv[None, :]))

    hi = sums[active] / t0
    lo = hi.copy()
    need = np.ones(lo.shape[0], dtype=bool)
    for _ in range(_MAX_ITER):
        if not np.any(need):
            break
        lo[need] *= 0.5
        gv = g(lo)
        need &= (gv < 1.0) if not is_psi else (gv > 1.0)
    # the halving walk flips inside a factor-2 window: root in [lo, 2*lo]
    hi = 2.0 * lo

    for _ in range(_MAX_ITER):
        mid = 0.5 * (lo + hi)
        splittable = (mid > lo) & (mid < hi)
        if not np.any(splittable):
            break
        gm = g(mid)
        go_up = (gm >= 1.0) if not is_psi else (gm <= 1.0)
        lo = np.where(splittable & go_up, mid, lo)
        hi = np.where(splittable & ~go_up, mid, hi)

    lam[active] = 0.5 * (lo + hi)
    return lam


def solve_values(phi: MonotoneCompositor, vals) -> np.ndarray:
    """Solve the implicit addition for every column of an (m, N) array.

    Returns the per-column roots after verifying the residual
    ``|phi(v/lam) - 1| <= 1e-12`` on every solved column.
    """
    vals = np.ascontiguousarray(vals, dtype=float)
    if vals.ndim != 2 or vals.shape[0] != phi.arity:
        raise InvalidParameterError(f"expected values of shape ({phi.arity}, N)")
    _validate_values(phi, vals)
    t0 = _tau0_cached(phi)
    if phi.power_terms is not None:
        alphas = np.array([a for a, _ in phi.power_terms])
        powers = np.array([p for _, p in phi.power_terms])
        lam = _kernels.solve_separable(alphas, powers, vals,
                                       t0, phi.klass is CompositorClass.PSI)
    else:
        lam = _generic_bisect(phi, vals, t0)

    solved = lam > 0
    if np.any(solved):
        resid = np.abs(phi.evaluate(vals[:, solved] / lam[solved][None, :]) - 1.0)
        worst = float(np.max(resid))
        if worst > RESIDUAL_TOL:
            raise NumericalFailureError(
                "bisection did not reach the residual tolerance", worst)
    return lam


def orlicz_add_pointwise(phi: MonotoneCompositor, vals) -> float:
    """Orlicz sum of one tuple of values."""
    vals = np.asarray(vals, dtype=float)
    if vals.shape != (phi.arity,):
        raise InvalidParameterError(f"expected {phi.arity} values")
    return float(solve_values(phi, vals[:, None])[0])


def _common_space(fields):
    space = fields[0].space
    for f in fields[1:]:
        if not space.compatible_with(f.space):
            raise InvalidParameterError("all fields must share one measure space")
    return space


def orlicz_add_field(phi: MonotoneCompositor, fields) -> DensityField:
    """Pointwise Orlicz sum of density fields on a shared space."""
    fields = list(fields)
    if len(fields) != phi.arity:
        raise InvalidParameterError(
            f"compositor has arity {phi.arity}, got {len(fields)} fields")
    space = _common_space(fields)
    if phi.klass is CompositorClass.PSI:
        for f in fields:
            if f.positivity is not Positivity.STRICTLY_POSITIVE:
                raise DomainViolationError(
                    "decreasing-class addition needs strictly positive fields")
    vals = np.stack([f.values for f in fields])
    lam = solve_values(phi, vals)
    strictly = all(f.positivity is Positivity.STRICTLY_POSITIVE for f in fields)
    return DensityField(space=space, values=lam,
                        positivity=Positivity.STRICTLY_POSITIVE if strictly
                        else Positivity.NONNEGATIVE)


def orlicz_add_measure(phi: MonotoneCompositor, measures) -> Measure:
    """Orlicz sum of measures: the measure whose density is the field sum."""
    measures = list(measures)
    return Measure(orlicz_add_field(phi, [p.density for p in measures]))


# ---------------------------------------------------------------------------
# property checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiscrepancyReport:
    """Worst-case deviation of a verified identity or bound."""

    max_rel_deviation: float
    worst_bound_margin: float | None = None
    worst_domination_margin: float | None = None
    tolerance: float = 1e-10

    @property
    def passed(self) -> bool:
        ok = self.max_rel_deviation <= self.tolerance
        for margin in (self.worst_bound_margin, self.worst_domination_margin):
            if margin is not None:
                ok = ok and margin >= -self.tolerance
        return ok


def _rel_dev(a: np.ndarray, b: np.ndarray) -> float:
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-300)
    return float(np.max(np.abs(a - b) / scale))


def check_homogeneity(phi: MonotoneCompositor, fields, r: float) -> DiscrepancyReport:
    """Degree-1 homogeneity: the sum of ``r*p_j`` equals ``r`` times the sum.

    Both sides are re-solved independently.
    """
    if r < 0 or (r == 0 and phi.klass is CompositorClass.PSI):
        raise InvalidParameterError("r must be positive (nonnegative in the increasing class)")
    fields = list(fields)
    space = _common_space(fields)
    base = orlicz_add_field(phi, fields).values
    if r == 0:
        scaled = np.zeros(space.size)
    else:
        scaled = orlicz_add_field(
            phi, [DensityField.infer(space, r * f.values) for f in fields]).values
    return DiscrepancyReport(max_rel_deviation=_rel_dev(scaled, r * base))


def check_monotone_bound(phi: MonotoneCompositor, fields,
                         bump: float = 1.0) -> DiscrepancyReport:
    """Domination monotonicity and the diagonal bound.

    Verifies that the sum is dominated pointwise by ``tau0^-1 * sum p_j``
    and that bumping every field by a constant never decreases the sum.
    """
    fields = list(fields)
    space = _common_space(fields)
    vals = np.stack([f.values for f in fields])
    lam = solve_values(phi, vals)
    bound = vals.sum(axis=0) / _tau0_cached(phi)
    scale = np.maximum(np.abs(bound), 1e-300)
    bound_margin = float(np.min((bound - lam) / scale))

    bumped = orlicz_add_field(
        phi, [DensityField.infer(space, f.values + bump) for f in fields]).values
    dom_scale = np.maximum(np.abs(bumped), 1e-300)
    dom_margin = float(np.min((bumped - lam) / dom_scale))
    return DiscrepancyReport(
        max_rel_deviation=0.0,
        worst_bound_margin=bound_margin,
        worst_domination_margin=dom_margin,
        tolerance=1e-12,
    )


@dataclass(frozen=True)
class ConvergenceReport:
    """Distances of the summed sequence to the summed limit."""

    mode: str
    distances: tuple[float, ...]
    final_distance: float
    final_pointwise: np.ndarray | None
    tolerance: float = 1e-8

    @property
    def passed(self) -> bool:
        if self.final_distance > self.tolerance:
            return False
        d = np.asarray(self.distances)
        return bool(np.all(d[1:] <= d[:-1] * (1 + 1e-9) + 1e-15))


def check_convergence(phi: MonotoneCompositor, steps, limits,
                      mode: str = "Uniform") -> ConvergenceReport:
    """Continuity of the addition along a convergent sequence of fields.

    ``steps`` is a sequence of m-tuples of fields converging (in the
    caller-declared mode) to the m-tuple ``limits``.
    """
    if mode not in ("Uniform", "Pointwise"):
        raise InvalidParameterError("mode must be 'Uniform' or 'Pointwise'")
    limits = list(limits)
    if mode == "Uniform":
        for f in limits:
            if f.positivity is not Positivity.STRICTLY_POSITIVE:
                raise InvalidParameterError(
                    "uniform mode requires strictly positive limit fields")
    target = orlicz_add_field(phi, limits).values
    dists = []
    final_pw = None
    for tup in steps:
        cur = orlicz_add_field(phi, list(tup)).values
        final_pw = np.abs(cur - target)
        dists.append(float(np.max(final_pw)))
    return ConvergenceReport(
        mode=mode,
        distances=tuple(dists),
        final_distance=dists[-1] if dists else float("nan"),
        final_pointwise=final_pw if mode == "Pointwise" else None,
    )
