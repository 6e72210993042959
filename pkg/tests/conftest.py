from __future__ import annotations

import numpy as np
import pytest

from mgpbbbc.core import Problem


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_square():
    return Problem([0.0, 0.0], [1.0, 1.0], lambda x: -np.sum((x - 0.5) ** 2, axis=1), name="bowl")
