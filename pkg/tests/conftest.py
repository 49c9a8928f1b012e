import numpy as np
import pytest

from resodyn import TwoLevelParams


@pytest.fixture
def reference_params() -> TwoLevelParams:
    """The well-studied benchmark point: Delta=d=1, v=0.75, g1=g2=0.5, theta=pi/10."""
    return TwoLevelParams(
        delta=1.0, gamma1=0.5, gamma2=0.5, theta=np.pi / 10, d=1.0, v=0.75
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20250810)
