import pytest

from arrowlab.axioms import build_constraints
from arrowlab.core import Config
from arrowlab.search import refute
from arrowlab.trace import emit_trace


@pytest.fixture(scope="session")
def cons23():
    return build_constraints(Config(2, 3))


@pytest.fixture(scope="session")
def ref23(cons23):
    return refute(Config(2, 3), cons=cons23)


@pytest.fixture(scope="session")
def trace23(ref23, cons23):
    return emit_trace(ref23, cons23)


@pytest.fixture(scope="session")
def cons33():
    return build_constraints(Config(3, 3))


@pytest.fixture(scope="session")
def ref33(cons33):
    return refute(Config(3, 3), cons=cons33)


@pytest.fixture(scope="session")
def trace33(ref33, cons33):
    return emit_trace(ref33, cons33)
