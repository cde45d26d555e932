import pytest

from rebh.options import RebhOptions
from rebh.utils import UniformSource


@pytest.fixture
def source() -> UniformSource:
    return UniformSource(seed=12345)


@pytest.fixture
def opt() -> RebhOptions:
    return RebhOptions(num_workers=2)
