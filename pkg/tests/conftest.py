import numpy as np
import pytest

from biquant import builtins
from biquant.reduction import QuotientContext


@pytest.fixture(scope="session")
def example5():
    return builtins.load("example5")


@pytest.fixture(scope="session")
def heisenberg():
    return builtins.load("heisenberg3")


@pytest.fixture(scope="session")
def sl2():
    return builtins.load("sl2")


@pytest.fixture(scope="session")
def example5_ctx(example5):
    h = example5.subalgebra("h")
    return QuotientContext(example5.algebra, h, example5.character("lambda"), example5.subspaces["q"])


@pytest.fixture(scope="session")
def heisenberg_ctx(heisenberg):
    h = heisenberg.subalgebra("h")
    return QuotientContext(heisenberg.algebra, h, heisenberg.character("lambda"), heisenberg.subspaces["q"])


@pytest.fixture
def rng():
    return np.random.default_rng(0)
