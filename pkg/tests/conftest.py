import pytest

import mulfix as mx


@pytest.fixture(scope="session")
def report_3_15():
    return mx.run_fixture("example_3_15")


@pytest.fixture(scope="session")
def report_3_16():
    return mx.run_fixture("example_3_16")


@pytest.fixture(scope="session")
def report_3_17():
    return mx.run_fixture("example_3_17")


@pytest.fixture(scope="session")
def remark_report():
    return mx.run_fixture("remark_2_5")
