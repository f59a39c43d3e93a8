"""Verification harness for the dual Orlicz-Brunn-Minkowski inequalities.

Every check evaluates both sides of one inequality from scratch and
reports the signed margin. The randomized suites derive one child seed
per trial from a master seed, cover both monotone classes, both strict
curvatures, arities 2 and 3, and two grid sizes, and plant proportional
inputs at a fixed cadence so the equality characterization is exercised
alongside the strict case.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .addition import orlicz_add_field, orlicz_add_measure
from .divergence import (
    Direction,
    InequalityReport,
    jensen_bound_check,
    make_inequality_report,
    proportional_inputs,
    s_norm,
)
from .errors import DegenerateInputError, InvalidParameterError
from .gauges import (
    CompositorClass,
    MonotoneCompositor,
    Shape,
    UnivariateGauge,
    make_linear_combo,
    make_power_sum,
    transform_phis,
    univariate_power,
)
from .runtime import worker_count
from .spaces import DensityField, Measure, MeasureSpace, Positivity, SubsetMask

__all__ = [
    "check_dual_obmi",
    "CorollaryReport",
    "check_obmi_corollary",
    "check_ls_theorem",
    "EquivalenceReport",
    "check_crdm_equivalence",
    "run_check_suite",
    "SUITE_NAMES",
]


def _direction_for(shape: Shape) -> Direction:
    if shape is Shape.STRICTLY_CONCAVE:
        return Direction.GE
    if shape is Shape.STRICTLY_CONVEX:
        return Direction.LE
    raise InvalidParameterError(
        "the compositor needs a declared strictly convex or concave shape")


def check_dual_obmi(phi: MonotoneCompositor, measures, A: SubsetMask | None = None,
                    seed: int = 0) -> InequalityReport:
    """Mass-ratio inequality for the Orlicz sum of measures.

    Evaluates ``phi(P_1(A)/S(A), ..., P_m(A)/S(A))`` with S the Orlicz
    sum; concave compositors push the value to >= 1, convex to <= 1,
    with equality exactly on proportional densities.
    """
    measures = list(measures)
    direction = _direction_for(phi.shape)
    if A is None:
        A = SubsetMask.full(measures[0].space)
    if A.mu(measures[0].space) <= 0:
        raise DegenerateInputError("subset has zero base mass")
    summed = orlicz_add_measure(phi, measures)
    sa = summed.on(A)
    if sa == 0:
        raise DegenerateInputError("the Orlicz sum vanishes on A")
    ratios = np.array([p.on(A) / sa for p in measures])
    value = float(phi.evaluate(ratios))
    sel = A.select(measures[0].space)
    prop = proportional_inputs([p.values[sel] for p in measures])
    return make_inequality_report(value, 1.0, direction,
                                  equality_expected=prop, seed=seed)


@dataclass(frozen=True)
class CorollaryReport:
    """Regularized-limit run of the mass-ratio inequality."""

    reports: tuple[InequalityReport, ...]
    epsilons: tuple[float, ...]
    direct: InequalityReport | None
    direct_gap: float | None

    @property
    def final(self) -> InequalityReport:
        return self.reports[-1]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def approach_monotone(self) -> bool:
        """Distances to the final value never increase along the schedule."""
        vals = np.array([r.lhs for r in self.reports])
        gaps = np.abs(vals - vals[-1])
        return bool(np.all(gaps[1:] <= gaps[:-1] * (1 + 1e-9) + 1e-12))


def check_obmi_corollary(phi: MonotoneCompositor, measures, A: SubsetMask | None = None,
                         eps_schedule=(1e-1, 1e-2, 1e-3, 1e-5, 1e-7, 1e-9),
                         seed: int = 0) -> CorollaryReport:
    """The inequality survives the limit of regularized densities.

    Adds a vanishing constant to every density (so zero densities are
    admissible), checks the inequality along the schedule, and compares
    the final value with the direct unregularized evaluation when that
    is defined.
    """
    if phi.klass is not CompositorClass.PHI or not phi.normalized_at_basis:
        raise InvalidParameterError(
            "the corollary needs an increasing compositor with phi(e_j) = 1")
    measures = list(measures)
    if A is None:
        A = SubsetMask.full(measures[0].space)
    if not any(p.on(A) > 0 for p in measures):
        raise InvalidParameterError("some measure must have positive mass on A")
    space = measures[0].space
    reports = []
    for e in eps_schedule:
        reg = [Measure.from_values(space, p.values + e) for p in measures]
        reports.append(check_dual_obmi(phi, reg, A, seed=seed))
    direct = None
    gap = None
    summed = orlicz_add_measure(phi, measures)
    if summed.on(A) > 0:
        direct = check_dual_obmi(phi, measures, A, seed=seed)
        gap = abs(reports[-1].lhs - direct.lhs)
    return CorollaryReport(reports=tuple(reports), epsilons=tuple(eps_schedule),
                           direct=direct, direct_gap=gap)


def check_ls_theorem(phi: MonotoneCompositor, s: float, fields,
                     A: SubsetMask | None = None,
                     phis_shape: Shape | None = None,
                     seed: int = 0) -> InequalityReport:
    """Norm-ratio inequality driven by the curvature of ``phi_s``.

    Evaluates ``phi(|p_1|_s / |S|_s, ...)`` with S the pointwise Orlicz
    sum. The direction follows the declared shape of the transformed
    compositor; an affine transform forces equality (the s=1 linear case
    is the classical triangle inequality).
    """
    if s == 0:
        raise InvalidParameterError("s must be nonzero")
    fields = list(fields)
    for f in fields:
        if f.positivity is not Positivity.STRICTLY_POSITIVE:
            raise InvalidParameterError("the norm theorem needs strictly positive fields")
    if A is None:
        A = SubsetMask.full(fields[0].space)
    shape = phis_shape if phis_shape is not None else transform_phis(phi, s).shape
    if shape is Shape.NEITHER:
        direction, expect_eq = Direction.GE, True
    else:
        direction, expect_eq = _direction_for(shape), False
    norms = np.array([s_norm(f, s, A) for f in fields])
    if not np.all((norms > 0) & np.isfinite(norms)):
        raise DegenerateInputError("every field needs a finite positive s-norm on A")
    summed = orlicz_add_field(phi, fields)
    ns = s_norm(summed, s, A)
    value = float(phi.evaluate(norms / ns))
    sel = A.select(fields[0].space)
    prop = expect_eq or proportional_inputs([f.values[sel] for f in fields])
    return make_inequality_report(value, 1.0, direction,
                                  equality_expected=prop, seed=seed)


@dataclass(frozen=True)
class EquivalenceReport:
    """Joint run of the two-measure mass-ratio inequality and the
    Jensen divergence bound, which the theory makes equivalent."""

    obmi: InequalityReport
    jensen: InequalityReport

    @property
    def pass_agree(self) -> bool:
        return self.obmi.passed == self.jensen.passed

    @property
    def equality_agree(self) -> bool:
        return self.obmi.equality == self.jensen.equality

    @property
    def passed(self) -> bool:
        return self.obmi.passed and self.jensen.passed and \
            self.pass_agree and self.equality_agree


def check_crdm_equivalence(phi1: UnivariateGauge, phi2: UnivariateGauge,
                           alpha1: float, alpha2: float,
                           P1: Measure, P2: Measure,
                           seed: int = 0) -> EquivalenceReport:
    """Evaluate both equivalent inequalities on one input pair."""
    if P1.density.positivity is not Positivity.STRICTLY_POSITIVE:
        raise InvalidParameterError("P1 must be strictly positive")
    if phi1.shape is not phi2.shape or phi1.shape not in (
            Shape.STRICTLY_CONVEX, Shape.STRICTLY_CONCAVE):
        raise InvalidParameterError(
            "phi1 and phi2 must share a strict convexity/concavity")
    combo = make_linear_combo(phi1, phi2, alpha1, alpha2)
    summed = orlicz_add_measure(combo, [P1, P2])
    stot = summed.total()
    value = float(combo.evaluate(np.array([P1.total() / stot, P2.total() / stot])))
    prop = proportional_inputs([P1.values, P2.values])
    obmi = make_inequality_report(value, 1.0, _direction_for(combo.shape),
                                  equality_expected=prop, seed=seed)
    jensen = jensen_bound_check(phi2, P1, P2, seed=seed)
    return EquivalenceReport(obmi=obmi, jensen=jensen)


# ---------------------------------------------------------------------------
# seeded randomized suites
# ---------------------------------------------------------------------------

SUITE_NAMES = ("obmi", "corollary", "ls", "crdm")

_GRID_SIZES = (64, 1024)


def _abstract_space(rng: np.random.Generator, size: int) -> MeasureSpace:
    return MeasureSpace(points=np.arange(size, dtype=float),
                        weights=rng.uniform(0.5, 1.5, size=size))


def _positive_values(rng: np.random.Generator, size: int) -> np.ndarray:
    return np.exp(rng.normal(0.0, 1.0, size=size))


def _trial_fields(rng: np.random.Generator, space: MeasureSpace, m: int,
                  proportional: bool) -> list[np.ndarray]:
    base = _positive_values(rng, space.size)
    if proportional:
        return [base * rng.uniform(0.2, 5.0) for _ in range(m)]
    return [_positive_values(rng, space.size) for _ in range(m)]


def _pick_compositor(rng: np.random.Generator, m: int) -> MonotoneCompositor:
    style = rng.integers(0, 4)
    if style == 0:    # increasing, strictly concave
        phi = make_power_sum(rng.uniform(0.3, 0.9), m)
    elif style == 1:  # increasing, strictly convex
        phi = make_power_sum(rng.uniform(1.5, 3.0), m)
    elif style == 2:  # decreasing, strictly convex
        phi = make_power_sum(-rng.uniform(0.5, 2.5), m)
    else:             # mixed-exponent separable combination (arity 2)
        if m != 2:
            return _pick_compositor(rng, m)
        if rng.integers(0, 2):
            a, b = rng.uniform(0.3, 0.9, size=2)
        else:
            a, b = rng.uniform(1.5, 3.0, size=2)
        phi = make_linear_combo(univariate_power(a), univariate_power(b),
                                rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0))
    return phi


def _obmi_trial(rng: np.random.Generator, seed: int) -> dict:
    m = int(rng.choice([2, 3]))
    grid = int(rng.choice(_GRID_SIZES))
    space = _abstract_space(rng, grid)
    phi = _pick_compositor(rng, m)
    proportional = seed % 10 == 0
    vals = _trial_fields(rng, space, m, proportional)
    if phi.klass is CompositorClass.PHI and not proportional and seed % 7 == 3:
        # exercise the nonnegative clause: zero out a chunk of one field
        vals[-1] = vals[-1] * (rng.uniform(size=grid) > 0.3)
    measures = [Measure.from_values(space, v) for v in vals]
    sub = SubsetMask(rng.choice(grid, size=max(2, grid // 2), replace=False)) \
        if rng.integers(0, 2) else SubsetMask.full(space)
    rep = check_dual_obmi(phi, measures, sub, seed=seed)
    return {"suite": "obmi", "seed": seed, "gauge": phi.name, "m": m,
            "grid": grid, "klass": phi.klass.value, "shape": phi.shape.value,
            "lhs": rep.lhs, "rhs": rep.rhs, "margin": rep.margin,
            "direction": rep.direction.value, "passed": rep.passed,
            "equality": rep.equality, "equality_expected": rep.equality_expected,
            "flags_consistent": rep.equality == rep.equality_expected}


def _corollary_trial(rng: np.random.Generator, seed: int) -> dict:
    m = int(rng.choice([2, 3]))
    grid = int(rng.choice(_GRID_SIZES))
    space = _abstract_space(rng, grid)
    # concave increasing compositors normalized at the basis vectors
    phi = make_power_sum(rng.uniform(0.3, 0.9), m)
    vals = _trial_fields(rng, space, m, proportional=False)
    if seed % 3 == 0:
        vals[-1] = np.zeros(grid)  # a fully vanishing summand
    measures = [Measure.from_values(space, v) for v in vals]
    rep = check_obmi_corollary(phi, measures, seed=seed)
    ok = rep.passed and rep.approach_monotone
    return {"suite": "corollary", "seed": seed, "gauge": phi.name, "m": m,
            "grid": grid, "klass": phi.klass.value, "shape": phi.shape.value,
            "lhs": rep.final.lhs, "rhs": 1.0, "margin": rep.final.margin,
            "direction": rep.final.direction.value, "passed": ok,
            "equality": rep.final.equality,
            "equality_expected": rep.final.equality_expected,
            "flags_consistent": True,
            "direct_gap": rep.direct_gap if rep.direct_gap is not None else float("nan")}


def _ls_trial(rng: np.random.Generator, seed: int) -> dict:
    m = int(rng.choice([2, 3]))
    grid = int(rng.choice(_GRID_SIZES))
    space = _abstract_space(rng, grid)
    s = float(rng.choice([-2.0, -1.0, 0.5, 1.0, 2.0, 3.0]))
    # pick p so phi_s has a strict declared shape (p/s in (0,1) or > 1 or < 0)
    if rng.integers(0, 2):
        p = s * rng.uniform(0.3, 0.9)   # phi_s strictly concave
    else:
        p = s * rng.uniform(1.5, 3.0)   # phi_s strictly convex
    if p == 0:
        p = s
    phi = make_power_sum(p, m)
    proportional = seed % 10 == 0
    vals = _trial_fields(rng, space, m, proportional)
    fields = [DensityField.infer(space, v) for v in vals]
    rep = check_ls_theorem(phi, s, fields, seed=seed)
    return {"suite": "ls", "seed": seed, "gauge": phi.name, "m": m,
            "grid": grid, "klass": phi.klass.value, "shape": phi.shape.value,
            "s": s, "lhs": rep.lhs, "rhs": rep.rhs, "margin": rep.margin,
            "direction": rep.direction.value, "passed": rep.passed,
            "equality": rep.equality, "equality_expected": rep.equality_expected,
            "flags_consistent": rep.equality == rep.equality_expected}


def _crdm_trial(rng: np.random.Generator, seed: int) -> dict:
    grid = int(rng.choice(_GRID_SIZES))
    space = _abstract_space(rng, grid)
    style = rng.integers(0, 3)
    if style == 0:
        e1, e2 = rng.uniform(0.3, 0.9, size=2)       # concave increasing
    elif style == 1:
        e1, e2 = rng.uniform(1.5, 3.0, size=2)       # convex increasing
    else:
        e1, e2 = -rng.uniform(0.5, 2.5, size=2)      # convex decreasing
    phi1, phi2 = univariate_power(e1), univariate_power(e2)
    a1, a2 = rng.uniform(0.5, 2.0, size=2)
    proportional = seed % 10 == 0
    vals = _trial_fields(rng, space, 2, proportional)
    P1 = Measure.from_values(space, vals[0])
    P2 = Measure.from_values(space, vals[1])
    rep = check_crdm_equivalence(phi1, phi2, a1, a2, P1, P2, seed=seed)
    return {"suite": "crdm", "seed": seed,
            "gauge": f"power({e1:g})|power({e2:g})", "m": 2, "grid": grid,
            "klass": phi1.klass.value, "shape": phi1.shape.value,
            "lhs": rep.obmi.lhs, "rhs": rep.obmi.rhs, "margin": rep.obmi.margin,
            "direction": rep.obmi.direction.value,
            "jensen_lhs": rep.jensen.lhs, "jensen_rhs": rep.jensen.rhs,
            "passed": rep.passed,
            "equality": rep.obmi.equality,
            "equality_expected": rep.obmi.equality_expected,
            "flags_consistent": rep.pass_agree and rep.equality_agree}


_TRIALS = {"obmi": _obmi_trial, "corollary": _corollary_trial,
           "ls": _ls_trial, "crdm": _crdm_trial}


def run_check_suite(name: str, trials: int, seed: int) -> tuple[list[dict], int]:
    """Run a named suite; returns the trial records and the violation count.

    Trials are independent pure computations with per-trial child seeds,
    so the ``ORLICZ_THREADS`` cap may fan them out across a thread pool
    without changing the records or their order.
    """
    if name not in _TRIALS:
        raise InvalidParameterError(f"unknown suite {name!r}; pick from {SUITE_NAMES}")
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    fn = _TRIALS[name]
    children = np.random.SeedSequence(seed).spawn(trials)
    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(
                lambda ks: fn(np.random.default_rng(ks[1]), ks[0]),
                enumerate(children)))
    else:
        records = [fn(np.random.default_rng(child), k)
                   for k, child in enumerate(children)]
    violations = sum(1 for r in records
                     if not (r["passed"] and r["flags_consistent"]))
    return records, violations
