import numpy as np
import pytest

from ruledstrip.geometry import FunctionSpec as F, StripGeometry


@pytest.fixture
def flat():
    return StripGeometry.from_k_sigma(0.5, F.zero(), F.zero())


@pytest.fixture
def twisted():
    """Constant twist sigma = 1 on a strip of half-width 1/2."""
    return StripGeometry.from_k_sigma(0.5, F.zero(), F.constant(1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
