import pytest

from goassign import Assignment, NO_ITEM, parse_instance
from goassign.engine import warmup

EXAMPLE4_TEXT = """\
goa 1
alpha 2
agents a1 a2 a3 a4
items b1 b2 b3 b4
layer
a1: b1
a2: b3 > b2 > b1
a3: b3 > b1
a4: b2 > b1 > b3
layer
a1: b2 > b1
a2: b2 > b3
a3: b1 > b2 > b3
a4: b3
layer
a1: b2 > b1
a2: b4 > b2 > b1
a3: b1 > b3
a4: b2 > b1 > b3
layer
a1: b3 > b1 > b2
a2: b1 > b2
a3: b2 > b3
"""

# five agents, one layer; the assignment used alongside it in tests is
# (a1 b2, a2 b4, a3 b1, a4 b5, a5 unassigned)
EXAMPLE5_TEXT = """\
goa 1
alpha 1
agents a1 a2 a3 a4 a5
items b1 b2 b3 b4 b5
layer
a1: b4 > b1 > b2 > b5
a2: b1 > b4 > b5
a3: b2 > b1
a4: b3 > b5
a5: b5
"""


@pytest.fixture(scope="session", autouse=True)
def compiled_kernels():
    warmup()


@pytest.fixture(scope="session")
def example4():
    return parse_instance(EXAMPLE4_TEXT)


@pytest.fixture(scope="session")
def example4_assignment():
    # a_i takes b_i for i <= 3, a4 takes nothing
    return Assignment((0, 1, 2, NO_ITEM))


@pytest.fixture(scope="session")
def example5():
    return parse_instance(EXAMPLE5_TEXT)


@pytest.fixture(scope="session")
def example5_assignment():
    return Assignment((1, 3, 0, 4, NO_ITEM))
