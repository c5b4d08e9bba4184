import pytest

from ahft import FactorSpec, builtin_table3, builtin_table8, fit_mle


@pytest.fixture(scope="session")
def table3():
    return builtin_table3()


@pytest.fixture(scope="session")
def table8():
    return builtin_table8()


@pytest.fixture(scope="session")
def table3_model(table3):
    """The two-factor workshop model reused across the suite."""
    return fit_mle(table3, (FactorSpec("available_time"), FactorSpec("stress")))
