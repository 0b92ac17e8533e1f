import pytest

from builders import M, instance, layout


@pytest.fixture
def two_swaps():
    inst = instance(M("a", 1), M("b", 1), M("a", 2), M("b", 2), M("a", 3), M("b", 3))
    return inst, layout("ab", "ba", "ab")
