import pytest

from tscc.code import build_code


@pytest.fixture(scope="session")
def code4():
    return build_code(4)


@pytest.fixture(scope="session")
def code8():
    return build_code(8)
