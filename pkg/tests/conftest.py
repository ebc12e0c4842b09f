import numpy as np
import pytest

from heunspec.heun_core import PotentialKind, PotentialSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)


def make_spec(kind: str, l: float, k2: float) -> PotentialSpec:
    return PotentialSpec.from_k2(PotentialKind(kind), l, k2)
