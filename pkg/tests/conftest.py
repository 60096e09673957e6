import pytest

from chanmodel.error_handling.error_manager import get_error_manager


@pytest.fixture(autouse=True)
def clear_diagnostics():
    """The error manager is a process-wide singleton; start every test empty."""
    get_error_manager().clear()
    yield
    get_error_manager().clear()
