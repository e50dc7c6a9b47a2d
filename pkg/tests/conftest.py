import pytest

from catrewire.necklace import Q_LAMBDA, Q_NS, q_all


@pytest.fixture(scope="session")
def all4():
    return q_all(4)


SYSTEMS = {"lambda": Q_LAMBDA, "nonseparable": Q_NS}
