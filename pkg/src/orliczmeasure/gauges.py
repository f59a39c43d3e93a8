"""Monotone compositor functions and univariate gauges.

Two families drive everything else in this package:

* ``MonotoneCompositor`` - an m-variate function that is strictly
  increasing in each coordinate (class ``PHI``, defined on ``[0, inf)^m``
  with value 0 at the origin and blowing up along every nonzero ray) or
  strictly decreasing in each coordinate (class ``PSI``, defined on
  ``(0, inf)^m``, blowing up near the origin and vanishing at infinity).
  The implicit equation ``phi(v / lam) = 1`` then has a unique positive
  root ``lam`` for every admissible value tuple ``v``.

* ``SurfaceGauge`` - a univariate map on ``(0, inf)`` used as the
  integrand of divergences and surface-area functionals. Its class tag
  records monotonicity/curvature: decreasing strictly convex
  (``PHI_CLASS``), increasing strictly concave (``PSI_CLASS``), or merely
  strictly convex (``STRICTLY_CONVEX_ONLY``).

All objects are immutable and their evaluation is pure, so they are safe
to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import (
    InvalidParameterError,
    NoSolutionError,
    NumericalFailureError,
)

__all__ = [
    "CompositorClass",
    "Shape",
    "SurfaceClass",
    "MonotoneCompositor",
    "UnivariateGauge",
    "SurfaceGauge",
    "ClassReport",
    "make_power_sum",
    "make_linear_combo",
    "transform_phi0",
    "transform_phis",
    "tau0",
    "classify_numeric",
    "univariate_power",
    "univariate_gauge",
    "surface_gauge",
    "parse_compositor",
    "parse_univariate",
    "parse_surface",
    "BUILTIN_SURFACE_GAUGES",
]


class CompositorClass(Enum):
    PHI = "phi"  # strictly increasing, phi(o)=0, phi(tz) -> inf
    PSI = "psi"  # strictly decreasing, phi(tz) -> inf at 0+, -> 0 at inf


class Shape(Enum):
    STRICTLY_CONVEX = "strictly_convex"
    STRICTLY_CONCAVE = "strictly_concave"
    NEITHER = "neither"
    UNKNOWN = "unknown"


class SurfaceClass(Enum):
    PHI_CLASS = "phi"  # decreasing and strictly convex on (0, inf)
    PSI_CLASS = "psi"  # increasing and strictly concave on (0, inf)
    STRICTLY_CONVEX_ONLY = "strictly_convex_only"


# Evaluation contract: callables accept an (m, K) float array and return
# a (K,) float array. `evaluate` promotes a bare (m,) vector.


@dataclass(frozen=True, eq=False)
class MonotoneCompositor:
    """An m-variate monotone compositor with declared metadata.

    The library trusts the declared class and shape; `classify_numeric`
    is the guard for user-supplied functions. When the function is a
    positive combination of coordinate powers, ``power_terms`` holds one
    ``(alpha_j, p_j)`` pair per coordinate so solvers can route the
    implicit equation to the compiled kernel.
    """

    arity: int
    klass: CompositorClass
    fn: Callable[[np.ndarray], np.ndarray]
    shape: Shape = Shape.UNKNOWN
    normalized_at_basis: bool = False
    name: str = ""
    power_terms: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.arity < 1:
            raise InvalidParameterError("arity must be >= 1")
        if self.power_terms is not None and len(self.power_terms) != self.arity:
            raise InvalidParameterError("power_terms must have one entry per coordinate")

    def evaluate(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            if x.shape[0] != self.arity:
                raise InvalidParameterError(
                    f"expected {self.arity} coordinates, got {x.shape[0]}")
            return float(self.fn(x[:, None])[0])
        if x.ndim != 2 or x.shape[0] != self.arity:
            raise InvalidParameterError(
                f"expected shape ({self.arity},) or ({self.arity}, K)")
        return np.asarray(self.fn(x), dtype=float)

    __call__ = evaluate


@dataclass(frozen=True, eq=False)
class UnivariateGauge:
    """A univariate compositor with its one-sided derivatives at t=1.

    Members of the normalized classes (value 1 at t=1) feed the linear
    Orlicz addition; the derivative at 1 scales first-variation limits.
    """

    base: MonotoneCompositor
    value_at_one: float
    left_deriv_at_one: float | None = None
    right_deriv_at_one: float | None = None

    def __post_init__(self):
        if self.base.arity != 1:
            raise InvalidParameterError("UnivariateGauge needs an arity-1 base")

    @property
    def klass(self) -> CompositorClass:
        return self.base.klass

    @property
    def shape(self) -> Shape:
        return self.base.shape

    @property
    def name(self) -> str:
        return self.base.name

    @property
    def is_normalized(self) -> bool:
        return self.value_at_one == 1.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            return float(self.base.fn(t.reshape(1, 1))[0])
        return self.base.fn(t.reshape(1, -1)).reshape(t.shape)


@dataclass(frozen=True, eq=False)
class SurfaceGauge:
    """Univariate gauge on (0, inf) for divergences and surface areas."""

    fn: Callable[[np.ndarray], np.ndarray]
    klass: SurfaceClass
    name: str = ""

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            return float(np.asarray(self.fn(t.reshape(1)))[0])
        return np.asarray(self.fn(t.reshape(-1)), dtype=float).reshape(t.shape)


def _power_eval(alphas: np.ndarray, powers: np.ndarray):
    def fn(x: np.ndarray) -> np.ndarray:
        return np.sum(alphas[:, None] * x ** powers[:, None], axis=0)

    return fn


def make_power_sum(exponent: float, m: int) -> MonotoneCompositor:
    """Sum of coordinate powers, ``x -> x_1^p + ... + x_m^p``.

    Increasing class for ``p > 0``, decreasing class for ``p < 0``.
    """
    if exponent == 0:
        raise InvalidParameterError("power-sum exponent must be nonzero")
    if m < 1:
        raise InvalidParameterError("arity must be >= 1")
    p = float(exponent)
    alphas = np.ones(m)
    powers = np.full(m, p)
    if p > 1 or p < 0:
        shape = Shape.STRICTLY_CONVEX
    elif p == 1:
        shape = Shape.NEITHER
    else:
        shape = Shape.STRICTLY_CONCAVE
    return MonotoneCompositor(
        arity=m,
        klass=CompositorClass.PHI if p > 0 else CompositorClass.PSI,
        fn=_power_eval(alphas, powers),
        shape=shape,
        normalized_at_basis=p > 0,
        name=f"power_sum(p={p:g}, m={m})",
        power_terms=tuple((1.0, p) for _ in range(m)),
    )


def make_linear_combo(
    phi1: UnivariateGauge,
    phi2: UnivariateGauge,
    alpha1: float,
    alpha2: float,
) -> MonotoneCompositor:
    """Weighted separable combination ``(x1, x2) -> a1*phi1(x1) + a2*phi2(x2)``.

    Both gauges must sit in the same monotone class; the combination
    inherits it. This is the compositor behind the linear Orlicz
    addition and the two-measure Brunn-Minkowski inequality.
    """
    if alpha1 <= 0 or alpha2 <= 0:
        raise InvalidParameterError("combination weights must be positive")
    if phi1.klass is not phi2.klass:
        raise InvalidParameterError(
            "mixed classes: both gauges must be increasing or both decreasing")
    a1, a2 = float(alpha1), float(alpha2)
    f1, f2 = phi1.base.fn, phi2.base.fn

    def fn(x: np.ndarray) -> np.ndarray:
        return a1 * f1(x[0:1]) + a2 * f2(x[1:2])

    terms = None
    t1, t2 = phi1.base.power_terms, phi2.base.power_terms
    if t1 is not None and t2 is not None:
        terms = ((a1 * t1[0][0], t1[0][1]), (a2 * t2[0][0], t2[0][1]))
    shapes = {phi1.shape, phi2.shape}
    shape = shapes.pop() if len(shapes) == 1 and Shape.UNKNOWN not in shapes else Shape.UNKNOWN
    return MonotoneCompositor(
        arity=2,
        klass=phi1.klass,
        fn=fn,
        shape=shape,
        normalized_at_basis=False,
        name=f"{a1:g}*{phi1.name or 'phi1'}(x1) + {a2:g}*{phi2.name or 'phi2'}(x2)",
        power_terms=terms,
    )


def _transform_power(phi: MonotoneCompositor, inv_exp: float):
    """Power terms of ``z -> phi(z^inv_exp)`` when phi is separable."""
    if phi.power_terms is None:
        return None
    return tuple((a, p * inv_exp) for a, p in phi.power_terms)


def _power_shape(terms) -> Shape:
    ps = [p for _, p in terms]
    if all(p > 1 for p in ps) or all(p < 0 for p in ps):
        return Shape.STRICTLY_CONVEX
    if all(0 < p < 1 for p in ps):
        return Shape.STRICTLY_CONCAVE
    if all(p == 1 for p in ps):
        return Shape.NEITHER
    if all(p >= 1 for p in ps) or all(p <= 0 for p in ps):
        # convex but not strictly so in the affine coordinates
        return Shape.UNKNOWN
    return Shape.UNKNOWN


def _transformed(phi: MonotoneCompositor, inv_exp: float, label: str) -> MonotoneCompositor:
    base_fn = phi.fn

    def fn(z: np.ndarray) -> np.ndarray:
        return base_fn(z ** inv_exp)

    flips = inv_exp < 0
    klass = phi.klass
    if flips:
        klass = (CompositorClass.PSI if klass is CompositorClass.PHI
                 else CompositorClass.PHI)
    terms = _transform_power(phi, inv_exp)
    shape = _power_shape(terms) if terms is not None else Shape.UNKNOWN
    return MonotoneCompositor(
        arity=phi.arity,
        klass=klass,
        fn=fn,
        shape=shape,
        normalized_at_basis=phi.normalized_at_basis,
        name=f"{label}[{phi.name or 'phi'}]",
        power_terms=terms,
    )


def transform_phi0(phi: MonotoneCompositor, n: int) -> MonotoneCompositor:
    """Volume-bridge transform ``z -> phi(z_1^(1/n), ..., z_m^(1/n))``.

    Links the radial sum of star bodies to the addition of their n-th
    power radial functions.
    """
    if n < 1:
        raise InvalidParameterError("n must be a positive integer")
    return _transformed(phi, 1.0 / n, f"phi0(n={n})")


def transform_phis(phi: MonotoneCompositor, s: float) -> MonotoneCompositor:
    """Norm-bridge transform ``z -> phi(z_1^(1/s), ..., z_m^(1/s))``.

    For ``s < 0`` the coordinate maps are decreasing, so the monotone
    class flips between the increasing and decreasing families.
    """
    if s == 0:
        raise InvalidParameterError("s must be nonzero")
    return _transformed(phi, 1.0 / float(s), f"phis(s={s:g})")


_BRACKET_CAP = 1e300
_BRACKET_FLOOR = 1e-300


def tau0(phi: MonotoneCompositor, tol: float = 1e-12) -> float:
    """The positive diagonal normalizer: ``phi(tau, ..., tau) = 1``.

    Located by geometric bracket expansion from tau=1 followed by
    bisection. Existence and uniqueness follow from the class axioms;
    a runaway bracket therefore signals a class violation.
    """
    if phi.power_terms is not None:
        ps = {p for _, p in phi.power_terms}
        if len(ps) == 1:
            # closed form: (sum alpha) * tau^p = 1
            p = ps.pop()
            ssum = sum(a for a, _ in phi.power_terms)
            return float(ssum ** (-1.0 / p))

    increasing = phi.klass is CompositorClass.PHI

    def h(t: float) -> float:
        return phi.evaluate(np.full(phi.arity, t))

    lo = hi = 1.0
    v = h(1.0)
    if v == 1.0:
        return 1.0
    # expand in the direction that brings h towards 1
    if (v < 1.0) == increasing:
        while h(hi) < 1.0 if increasing else h(hi) > 1.0:
            hi *= 2.0
            if hi > _BRACKET_CAP:
                raise NoSolutionError(
                    "diagonal bracket expansion exceeded 1e300; "
                    "function violates its class limit axioms")
        lo = hi / 2.0
    else:
        while h(lo) > 1.0 if increasing else h(lo) < 1.0:
            lo /= 2.0
            if lo < _BRACKET_FLOOR:
                raise NoSolutionError(
                    "diagonal bracket expansion underflowed 1e-300; "
                    "function violates its class limit axioms")
        hi = lo * 2.0

    best, best_res = None, math.inf
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        v = h(mid)
        res = abs(v - 1.0)
        if res < best_res:
            best, best_res = mid, res
        if res <= tol:
            return mid
        if (v < 1.0) == increasing:
            lo = mid
        else:
            hi = mid
    if best is None or best_res > tol:
        raise NumericalFailureError("tau0 bisection did not converge", best_res)
    return best


@dataclass(frozen=True)
class ClassReport:
    """Findings of the numeric class check. Never raises by itself."""

    samples: int
    seed: int
    monotone_violations: int
    convex_violations: int
    concave_violations: int
    shape_estimate: Shape
    origin_value: float | None
    ray_growth_ok: bool
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def monotone_ok(self) -> bool:
        return self.monotone_violations == 0


def classify_numeric(
    phi: MonotoneCompositor,
    samples: int = 1000,
    seed: int = 0,
    box: tuple[float, float] = (0.05, 10.0),
) -> ClassReport:
    """Sample-based guard for user-declared compositors.

    Runs seeded coordinate-increase tests, random midpoint convexity
    probes, and limit spot checks on rays. Findings are reported, not
    raised: the caller decides whether a violation is fatal.
    """
    if samples < 100:
        raise InvalidParameterError("need at least 100 samples")
    rng = np.random.default_rng(seed)
    m = phi.arity
    lo, hi = box
    increasing = phi.klass is CompositorClass.PHI
    notes: list[str] = []

    x = rng.uniform(lo, hi, size=(m, samples))
    vals = phi.evaluate(x)
    if not np.all(np.isfinite(vals)):
        notes.append("non-finite values on sampled domain points")

    # directional monotonicity
    bump_idx = rng.integers(0, m, size=samples)
    bumps = rng.uniform(0.01, 1.0, size=samples)
    xb = x.copy()
    xb[bump_idx, np.arange(samples)] += bumps
    vals_b = phi.evaluate(xb)
    diffs = vals_b - vals
    mono_viol = int(np.sum(diffs <= 0)) if increasing else int(np.sum(diffs >= 0))

    # midpoint curvature probes
    y = rng.uniform(lo, hi, size=(m, samples))
    mid = 0.5 * (x + y)
    f_mid = phi.evaluate(mid)
    f_avg = 0.5 * (vals + phi.evaluate(y))
    band = 1e-9 * np.maximum(np.abs(f_mid), np.abs(f_avg)) + 1e-12
    convex_viol = int(np.sum(f_mid > f_avg + band))
    concave_viol = int(np.sum(f_mid < f_avg - band))
    if convex_viol == 0 and concave_viol > 0:
        shape_est = Shape.STRICTLY_CONVEX
    elif concave_viol == 0 and convex_viol > 0:
        shape_est = Shape.STRICTLY_CONCAVE
    elif convex_viol == 0 and concave_viol == 0:
        shape_est = Shape.NEITHER  # affine within tolerance
        notes.append("midpoint tests affine within tolerance")
    else:
        shape_est = Shape.NEITHER
        notes.append("curvature changes sign on sampled midpoints")

    # limit behavior along rays: growth/decay must show by t = 1e12, which
    # only misses exponents below ~0.08 in magnitude
    origin_value = None
    ray_ok = True
    if increasing:
        origin_value = phi.evaluate(np.zeros(m))
        if abs(origin_value) > 1e-12:
            ray_ok = False
            notes.append(f"value at origin is {origin_value:.3e}, expected 0")
    for _ in range(8):
        z = rng.uniform(lo, hi, size=m)
        ts = np.array([1.0, 1e3, 1e6, 1e9, 1e12])
        ray_vals = np.array([phi.evaluate(t * z) for t in ts])
        if increasing:
            if not np.all(np.diff(ray_vals) > 0) or ray_vals[-1] < 10 * ray_vals[0]:
                ray_ok = False
                notes.append("growth along an increasing ray looks bounded")
                break
        else:
            small = phi.evaluate(1e-8 * z)
            if not np.all(np.diff(ray_vals) < 0) or small < 10 * ray_vals[0]:
                ray_ok = False
                notes.append("blow-up near the origin looks bounded")
                break
            if ray_vals[-1] > 0.5 * ray_vals[0]:
                ray_ok = False
                notes.append("decay at infinity stalls above zero")
                break

    return ClassReport(
        samples=samples,
        seed=seed,
        monotone_violations=mono_viol,
        convex_violations=convex_viol,
        concave_violations=concave_viol,
        shape_estimate=shape_est,
        origin_value=origin_value,
        ray_growth_ok=ray_ok,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# univariate and surface gauge construction
# ---------------------------------------------------------------------------

_FD_STEP = 1e-6
_FD_RTOL = 1e-4


def _check_one_sided(gauge_fn, declared: float, side: int) -> None:
    fd = (gauge_fn(1.0 + side * _FD_STEP) - gauge_fn(1.0)) / (side * _FD_STEP)
    scale = max(abs(declared), abs(fd), 1e-30)
    if abs(fd - declared) > _FD_RTOL * scale:
        raise InvalidParameterError(
            f"declared derivative {declared:g} disagrees with one-sided "
            f"finite difference {fd:g} at t=1")


def univariate_gauge(
    base: MonotoneCompositor,
    left_deriv_at_one: float | None = None,
    right_deriv_at_one: float | None = None,
    estimate_missing: bool = True,
) -> UnivariateGauge:
    """Wrap an arity-1 compositor, validating derivative declarations.

    Declared one-sided derivatives are cross-checked against a one-sided
    finite difference; missing ones are estimated the same way.
    """
    if base.arity != 1:
        raise InvalidParameterError("base must have arity 1")

    def f(t: float) -> float:
        return base.evaluate(np.array([t]))

    value_at_one = f(1.0)
    ld, rd = left_deriv_at_one, right_deriv_at_one
    if ld is not None:
        _check_one_sided(f, ld, -1)
    elif estimate_missing:
        ld = (f(1.0) - f(1.0 - _FD_STEP)) / _FD_STEP
    if rd is not None:
        _check_one_sided(f, rd, +1)
    elif estimate_missing:
        rd = (f(1.0 + _FD_STEP) - f(1.0)) / _FD_STEP
    return UnivariateGauge(base=base, value_at_one=value_at_one,
                           left_deriv_at_one=ld, right_deriv_at_one=rd)


def univariate_power(p: float) -> UnivariateGauge:
    """The normalized power gauge ``t -> t^p`` (increasing for p>0)."""
    base = make_power_sum(p, 1)
    return UnivariateGauge(base=base, value_at_one=1.0,
                           left_deriv_at_one=float(p),
                           right_deriv_at_one=float(p))


def surface_gauge(fn, klass: SurfaceClass, name: str = "") -> SurfaceGauge:
    return SurfaceGauge(fn=fn, klass=klass, name=name)


def _xlogx(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = t[pos] * np.log(t[pos])
    return out


BUILTIN_SURFACE_GAUGES: dict[str, SurfaceGauge] = {
    # decreasing, strictly convex on (0, inf)
    "exp_neg": surface_gauge(lambda t: np.exp(-t), SurfaceClass.PHI_CLASS, "exp_neg"),
    "recip": surface_gauge(lambda t: 1.0 / t, SurfaceClass.PHI_CLASS, "recip"),
    # increasing, strictly concave on (0, inf)
    "sqrt": surface_gauge(np.sqrt, SurfaceClass.PSI_CLASS, "sqrt"),
    "ratio": surface_gauge(lambda t: t / (1.0 + t), SurfaceClass.PSI_CLASS, "ratio"),
    # strictly convex but not monotone: classical divergence kernels
    "kl": surface_gauge(_xlogx, SurfaceClass.STRICTLY_CONVEX_ONLY, "kl"),
    "chi2": surface_gauge(lambda t: (t - 1.0) ** 2, SurfaceClass.STRICTLY_CONVEX_ONLY, "chi2"),
}


# ---------------------------------------------------------------------------
# config-style gauge specifications, e.g. "power_sum:p=2,m=2"
# ---------------------------------------------------------------------------


def _parse_kv(spec: str) -> tuple[str, dict[str, float]]:
    name, _, rest = spec.partition(":")
    name = name.strip().lower()
    params: dict[str, float] = {}
    if rest:
        for part in rest.split(","):
            key, _, val = part.partition("=")
            if not val:
                raise InvalidParameterError(f"malformed gauge parameter {part!r}")
            try:
                params[key.strip()] = float(val)
            except ValueError as exc:
                raise InvalidParameterError(f"non-numeric gauge parameter {part!r}") from exc
    return name, params


def parse_compositor(spec: str) -> MonotoneCompositor:
    """Build a compositor from a flat spec string, e.g. ``power_sum:p=2,m=2``."""
    name, params = _parse_kv(spec)
    if name == "power_sum":
        if "p" not in params:
            raise InvalidParameterError("power_sum needs p=<exponent>")
        return make_power_sum(params["p"], int(params.get("m", 2)))
    if name == "linear_combo":
        p1 = params.get("p1", 1.0)
        p2 = params.get("p2", 1.0)
        return make_linear_combo(univariate_power(p1), univariate_power(p2),
                                 params.get("a1", 1.0), params.get("a2", 1.0))
    raise InvalidParameterError(f"unknown compositor kind {name!r}")


def parse_univariate(spec: str) -> UnivariateGauge:
    """Build a normalized univariate gauge from a spec string."""
    name, params = _parse_kv(spec)
    aliases = {"identity": 1.0, "id": 1.0, "square": 2.0, "sqrt": 0.5, "recip": -1.0}
    if name in aliases:
        return univariate_power(aliases[name])
    if name == "power":
        if "p" not in params or params["p"] == 0:
            raise InvalidParameterError("power needs a nonzero p=<exponent>")
        return univariate_power(params["p"])
    raise InvalidParameterError(f"unknown univariate gauge {name!r}")


def parse_surface(spec: str) -> SurfaceGauge:
    """Build a surface gauge (divergence kernel) from a spec string."""
    name, params = _parse_kv(spec)
    if name in BUILTIN_SURFACE_GAUGES and not params:
        return BUILTIN_SURFACE_GAUGES[name]
    if name == "power":
        a = params.get("p")
        if a is None or a == 0:
            raise InvalidParameterError("power needs a nonzero p=<exponent>")
        if a < 0:
            klass = SurfaceClass.PHI_CLASS
        elif a < 1:
            klass = SurfaceClass.PSI_CLASS
        else:
            klass = SurfaceClass.STRICTLY_CONVEX_ONLY
        return surface_gauge(lambda t, a=a: t ** a, klass, f"power(p={a:g})")
    if name == "const":
        alpha = params.get("alpha", 1.0)
        if alpha <= 0:
            raise InvalidParameterError("const needs alpha > 0")
        return surface_gauge(lambda t, alpha=alpha: np.full_like(np.asarray(t, dtype=float), alpha),
                             SurfaceClass.STRICTLY_CONVEX_ONLY, f"const({alpha:g})")
    raise InvalidParameterError(f"unknown surface gauge {name!r}")
