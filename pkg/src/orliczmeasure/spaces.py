"""Finite quadrature spaces, density fields, and measures.

A ``MeasureSpace`` is a finite list of support points with positive
weights approximating a base measure. A ``DensityField`` is an array of
density values on such a space; a ``Measure`` is the pair of the two.
All containers are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainViolationError, InvalidParameterError

__all__ = [
    "DomainTag",
    "Positivity",
    "MeasureSpace",
    "DensityField",
    "Measure",
    "SubsetMask",
    "uniform_interval_space",
]


class DomainTag(Enum):
    ABSTRACT = "abstract"
    EUCLIDEAN_BOX = "euclidean_box"
    SPHERE = "sphere"


class Positivity(Enum):
    NONNEGATIVE = "nonnegative"
    STRICTLY_POSITIVE = "strictly_positive"


def _as_readonly(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MeasureSpace:
    """Support points plus positive weights for the base measure."""

    points: np.ndarray  # (N, d) coordinates; abstract label spaces use indices
    weights: np.ndarray  # (N,) strictly positive
    domain_tag: DomainTag = DomainTag.ABSTRACT
    meta: tuple = ()  # e.g. ("n", 2, "half_width", 8.0)

    def __post_init__(self):
        pts = _as_readonly(self.points)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
            pts.setflags(write=False)
        w = _as_readonly(self.weights)
        if w.ndim != 1 or len(w) != pts.shape[0] or len(w) < 1:
            raise InvalidParameterError("points and weights must align, length >= 1")
        if not np.all(w > 0) or not np.all(np.isfinite(w)):
            raise InvalidParameterError("weights must be positive and finite")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return len(self.weights)

    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    def compatible_with(self, other: "MeasureSpace") -> bool:
        if self is other:
            return True
        return (self.domain_tag is other.domain_tag
                and self.size == other.size
                and np.array_equal(self.weights, other.weights)
                and np.array_equal(self.points, other.points))


def uniform_interval_space(n_points: int, lo: float = 0.0, hi: float = 1.0) -> MeasureSpace:
    """Midpoint-rule discretization of Lebesgue measure on [lo, hi]."""
    if n_points < 1 or hi <= lo:
        raise InvalidParameterError("need n_points >= 1 and hi > lo")
    h = (hi - lo) / n_points
    pts = lo + h * (np.arange(n_points) + 0.5)
    return MeasureSpace(points=pts, weights=np.full(n_points, h),
                        domain_tag=DomainTag.EUCLIDEAN_BOX,
                        meta=("n", 1, "lo", lo, "hi", hi))


@dataclass(frozen=True, eq=False)
class DensityField:
    """Density values aligned with a measure space."""

    space: MeasureSpace
    values: np.ndarray
    positivity: Positivity = Positivity.NONNEGATIVE

    def __post_init__(self):
        v = _as_readonly(self.values)
        if v.ndim != 1 or len(v) != self.space.size:
            raise InvalidParameterError("values must align with the space")
        if not np.all(np.isfinite(v)):
            raise DomainViolationError("density values must be finite")
        if self.positivity is Positivity.STRICTLY_POSITIVE:
            if not np.all(v > 0):
                raise DomainViolationError("field declared strictly positive has a zero")
        elif np.any(v < 0):
            raise DomainViolationError("density values must be nonnegative")
        object.__setattr__(self, "values", v)

    @staticmethod
    def infer(space: MeasureSpace, values) -> "DensityField":
        """Build a field, inferring the positivity tag from the data."""
        v = np.asarray(values, dtype=float)
        tag = Positivity.STRICTLY_POSITIVE if np.all(v > 0) else Positivity.NONNEGATIVE
        return DensityField(space=space, values=v, positivity=tag)

    def mass(self, mask: "SubsetMask | None" = None) -> float:
        if mask is None:
            return float(np.sum(self.values * self.space.weights))
        sel = mask.select(self.space)
        return float(np.sum(self.values[sel] * self.space.weights[sel]))


@dataclass(frozen=True, eq=False)
class Measure:
    """A finite measure given by its density against the base measure."""

    density: DensityField

    @staticmethod
    def from_values(space: MeasureSpace, values) -> "Measure":
        return Measure(DensityField.infer(space, values))

    @property
    def space(self) -> MeasureSpace:
        return self.density.space

    @property
    def values(self) -> np.ndarray:
        return self.density.values

    def total(self) -> float:
        return self.density.mass()

    def on(self, mask: "SubsetMask") -> float:
        """P(A) for the index subset A."""
        return self.density.mass(mask)


@dataclass(frozen=True, eq=False)
class SubsetMask:
    """An index subset of a measure space's points."""

    indices: np.ndarray  # sorted unique int indices

    def __post_init__(self):
        idx = np.unique(np.asarray(self.indices, dtype=np.int64))
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    @staticmethod
    def full(space: MeasureSpace) -> "SubsetMask":
        return SubsetMask(np.arange(space.size))

    @property
    def size(self) -> int:
        return len(self.indices)

    def select(self, space: MeasureSpace) -> np.ndarray:
        if self.size == 0:
            raise InvalidParameterError("empty subset where a nonempty one is required")
        if self.indices[0] < 0 or self.indices[-1] >= space.size:
            raise InvalidParameterError("subset indices out of range for this space")
        return self.indices

    def mu(self, space: MeasureSpace) -> float:
        return float(np.sum(space.weights[self.select(space)]))
