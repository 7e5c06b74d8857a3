import pytest

from rovella.combinatorics import derive_constants


@pytest.fixture
def bundle():
    # function-scoped: induction runs mutate the bundle (a0, N1, A)
    return derive_constants()


@pytest.fixture(scope="session")
def probe_run():
    """Shallow induction run used by the search pipeline tests."""
    from rovella.induction import run_induction
    return run_induction(10, derive_constants())
