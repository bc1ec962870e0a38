import pytest

from subres.coefficient import CoefficientSpec


@pytest.fixture(scope="session")
def spec25() -> CoefficientSpec:
    """The reference configuration k=2, p=5 (alpha = 0.2)."""
    return CoefficientSpec(k=2, p=5)
