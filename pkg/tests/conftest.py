import pytest

from dietks.assessment import load_default_rules
from dietks.kb import load_default_kb


@pytest.fixture(scope="session")
def default_kb():
    return load_default_kb()


@pytest.fixture(scope="session")
def default_rules():
    return load_default_rules()
