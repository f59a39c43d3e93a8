"""f-divergences, weighted s-norms, and the Jensen comparison bound.

The divergence of P against Q with kernel f is the quadrature of
``f(p/q) * q`` over the shared measure space. For concave (convex) f it
is bounded above (below) by ``Q(total) * f(P(total)/Q(total))``; the
module exposes both sides and flags equality, which occurs exactly when
the density ratio is constant.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DomainViolationError,
    InvalidParameterError,
    NumericalFailureError,
)
from .gauges import (
    MonotoneCompositor,
    Shape,
    SurfaceClass,
    SurfaceGauge,
    UnivariateGauge,
)
from .spaces import DensityField, Measure, Positivity, SubsetMask

__all__ = [
    "Direction",
    "InequalityReport",
    "DivergenceResult",
    "f_divergence",
    "s_norm",
    "s_power_integral",
    "jensen_bound_check",
    "scalar_gauge",
    "proportional_inputs",
]


class Direction(Enum):
    GE = ">="
    LE = "<="


@dataclass(frozen=True)
class InequalityReport:
    """One verified inequality: ``lhs <direction> rhs``.

    ``margin`` is always ``lhs - rhs``; a passing GE report has a
    nonnegative margin, a passing LE report a nonpositive one, both up
    to a relative slack for quadrature noise.
    """

    lhs: float
    rhs: float
    direction: Direction
    margin: float
    equality: bool
    equality_expected: bool
    seed: int = 0
    eq_rtol: float = 1e-8
    dir_rtol: float = 1e-10

    @property
    def scale(self) -> float:
        return max(abs(self.lhs), abs(self.rhs), 1e-300)

    @property
    def passed(self) -> bool:
        slack = self.dir_rtol * self.scale
        if self.direction is Direction.GE:
            return self.margin >= -slack
        return self.margin <= slack


def make_inequality_report(lhs: float, rhs: float, direction: Direction,
                           equality_expected: bool, seed: int = 0,
                           eq_rtol: float = 1e-8) -> InequalityReport:
    margin = lhs - rhs
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return InequalityReport(
        lhs=lhs, rhs=rhs, direction=direction, margin=margin,
        equality=abs(margin) <= eq_rtol * scale,
        equality_expected=equality_expected, seed=seed, eq_rtol=eq_rtol,
    )


def scalar_gauge(f):
    """Normalize the accepted gauge kinds to ``(callable, shape)``.

    Accepts a ``SurfaceGauge``, a ``UnivariateGauge``, an arity-1
    compositor, or a bare callable (shape unknown).
    """
    if isinstance(f, SurfaceGauge):
        shape = {
            SurfaceClass.PHI_CLASS: Shape.STRICTLY_CONVEX,
            SurfaceClass.PSI_CLASS: Shape.STRICTLY_CONCAVE,
            SurfaceClass.STRICTLY_CONVEX_ONLY: Shape.STRICTLY_CONVEX,
        }[f.klass]
        return f, shape
    if isinstance(f, UnivariateGauge):
        return f, f.shape
    if isinstance(f, MonotoneCompositor):
        if f.arity != 1:
            raise InvalidParameterError("divergence kernel must be univariate")
        return (lambda t, _f=f: _f.evaluate(np.asarray(t, dtype=float).reshape(1, -1))), f.shape
    if callable(f):
        return f, Shape.UNKNOWN
    raise InvalidParameterError(f"not a usable gauge: {f!r}")


@dataclass(frozen=True)
class DivergenceResult:
    value: float
    integrand_extrema: tuple[float, float]
    equality_gap: float


def f_divergence(f, P: Measure, Q: Measure) -> DivergenceResult:
    """Csiszar divergence ``D_f(P, Q) = sum f(p_i/q_i) q_i w_i``.

    Q must be strictly positive. Points where p vanishes use the direct
    evaluation of f at ratio 0 and are rejected when f is not finite
    there.
    """
    if not P.space.compatible_with(Q.space):
        raise InvalidParameterError("P and Q must live on one measure space")
    q = Q.values
    if np.any(q <= 0):
        raise DomainViolationError("Q must have a strictly positive density")
    fn, _ = scalar_gauge(f)
    p = P.values
    with np.errstate(divide="ignore", invalid="ignore"):
        fv = np.asarray(fn(p / q), dtype=float)
    if not np.all(np.isfinite(fv)):
        if np.any(p == 0):
            raise DomainViolationError(
                "kernel is not finite at ratio 0 but P has zero density values")
        raise NumericalFailureError("divergence kernel produced non-finite values")
    integrand = fv * q
    w = P.space.weights
    value = float(np.sum(integrand * w))
    ptot, qtot = P.total(), Q.total()
    bound = qtot * float(np.asarray(fn(np.array([ptot / qtot])))[0])
    return DivergenceResult(
        value=value,
        integrand_extrema=(float(np.min(integrand)), float(np.max(integrand))),
        equality_gap=abs(value - bound),
    )


def s_power_integral(p: DensityField, s: float, A: SubsetMask | None = None) -> float:
    """The raw power integral ``sum_{i in A} p_i^s w_i``."""
    if s == 0:
        raise InvalidParameterError("s must be nonzero")
    if A is None:
        A = SubsetMask.full(p.space)
    sel = A.select(p.space)
    v = p.values[sel]
    if s < 0 and np.any(v <= 0):
        raise DomainViolationError("negative s needs strictly positive values on A")
    return float(np.sum(v ** s * p.space.weights[sel]))


def s_norm(p: DensityField, s: float, A: SubsetMask | None = None) -> float:
    """The s-norm ``(sum_{i in A} p_i^s w_i)^(1/s)``."""
    return s_power_integral(p, s, A) ** (1.0 / s)


def proportional_inputs(values_list, rtol: float = 1e-10) -> bool:
    """Whether every array is a constant multiple of the first.

    Follows the ratio-variance convention: where the reference is
    positive the relative variance of the ratio must fall below
    ``rtol``; where it vanishes the other field must vanish too.
    """
    ref = np.asarray(values_list[0], dtype=float)
    pos = ref > 0
    if not np.any(pos):
        return all(not np.any(np.asarray(v) != 0) for v in values_list[1:])
    for v in values_list[1:]:
        v = np.asarray(v, dtype=float)
        if np.any(v[~pos] != 0):
            return False
        r = v[pos] / ref[pos]
        mean = float(np.mean(r))
        if np.var(r) > rtol * max(mean * mean, 1e-300):
            return False
    return True


def jensen_bound_check(phi, P1: Measure, P2: Measure, seed: int = 0) -> InequalityReport:
    """Compare ``D_phi(P2, P1)`` with ``P1(total) * phi(P2(total)/P1(total))``.

    Equality holds exactly when the density ratio is constant; the
    comparison direction comes from the declared curvature of phi.
    """
    if P1.density.positivity is not Positivity.STRICTLY_POSITIVE:
        raise DomainViolationError("P1 must be strictly positive")
    fn, shape = scalar_gauge(phi)
    if shape not in (Shape.STRICTLY_CONVEX, Shape.STRICTLY_CONCAVE):
        raise InvalidParameterError("phi needs a declared convexity/concavity")
    lhs = f_divergence(phi, P2, P1).value
    p1tot = P1.total()
    rhs = p1tot * float(np.asarray(fn(np.array([P2.total() / p1tot])))[0])
    direction = Direction.LE if shape is Shape.STRICTLY_CONCAVE else Direction.GE
    return make_inequality_report(
        lhs, rhs, direction,
        equality_expected=proportional_inputs([P1.values, P2.values]),
        seed=seed,
    )
