import numpy as np
import pytest

from orliczmeasure.spaces import DensityField, Measure, MeasureSpace


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_space(rng, size=128) -> MeasureSpace:
    return MeasureSpace(points=np.arange(size, dtype=float),
                        weights=rng.uniform(0.5, 1.5, size=size))


def positive_field(rng, space, scale=1.0) -> DensityField:
    return DensityField.infer(space, scale * np.exp(rng.normal(size=space.size)))


def positive_measure(rng, space, scale=1.0) -> Measure:
    return Measure(positive_field(rng, space, scale))
